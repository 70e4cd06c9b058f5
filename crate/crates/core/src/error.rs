use thiserror::Error;

use crate::flow::FlowTrajectory;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bracket is not in H_{{q,n}}: {0}")]
    NotMember(String),

    #[error("matrix is singular or ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("matrix is not block upper-triangular with respect to R^q + R^n")]
    BlockForm,

    #[error("jet degree {have} is too small, need at least {need}")]
    JetDegree { have: usize, need: usize },

    #[error("fingerprint order {order} exceeds the maximum {max} for this dimension")]
    OrderTooLarge { order: usize, max: i64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64, partial: Box<FlowTrajectory> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
