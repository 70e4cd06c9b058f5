//! Homogeneous Riemannian manifolds encoded by Lie brackets on `R^q + R^n`.
//!
//! A bracket `mu` describes a Lie algebra `g = k + p` with isotropy `k = R^q`
//! and tangent space `p = R^n` carrying the standard inner product. The crate
//! checks the conditions that make `mu` a homogeneous space, computes its
//! curvature at the origin both algebraically and from the metric in
//! canonical coordinates, compares brackets through curvature invariants, and
//! integrates the bracket flow.

pub mod bracket;
pub mod classify;
pub mod coordinates;
pub mod curvature;
pub mod error;
pub mod families;
pub mod fingerprint;
pub mod flow;
pub mod io;
pub mod poly;
pub mod scalar;
pub mod tensor;

pub use bracket::{Bracket, FamilyTag, H2Status, MembershipReport};
pub use error::{Error, Result};
pub use families::Param;
pub use tensor::CovariantTensor;
