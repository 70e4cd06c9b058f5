//! Named families of brackets.
//!
//! Basis conventions: for `q = 0` families the vectors `e_1, e_2, e_3` are
//! indices `0, 1, 2`; for `q >= 1` families `e_0` is index 0 and the
//! numbering is unchanged.

use std::fmt;

use num::rational::Ratio;
use num::{BigRational, Zero};

use crate::bracket::{Bracket, FamilyTag, H2Status};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real parameter whose rationality matters for closedness of the
/// isotropy subgroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Rational(Ratio<i64>),
    /// An irrational number, represented by a double approximation.
    Irrational(f64),
}

impl Param {
    pub fn int(v: i64) -> Self {
        Param::Rational(Ratio::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Param::Rational(Ratio::new(num, den)))
    }

    pub fn value(&self) -> f64 {
        match self {
            Param::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Param::Irrational(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Param::Rational(r) => r.is_zero(),
            Param::Irrational(_) => false,
        }
    }

    pub fn to_big(&self) -> Option<BigRational> {
        match self {
            Param::Rational(r) => Some(BigRational::from_ratio(*r.numer(), *r.denom())),
            Param::Irrational(_) => None,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Rational(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Param::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Param::Irrational(x) => write!(f, "irr:{x:?}"),
        }
    }
}

impl std::str::FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad parameter '{s}'"));
        if let Some(rest) = s.strip_prefix("irr:") {
            let x: f64 = rest.parse().map_err(|_| bad())?;
            if !x.is_finite() {
                return Err(bad());
            }
            return Ok(Param::Irrational(x));
        }
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            return Param::ratio(a, b);
        }
        if let Ok(v) = s.parse::<i64>() {
            return Ok(Param::int(v));
        }
        // a finite decimal literal is rational
        if s.contains(['.', 'e', 'E']) {
            let (mant, exp) = match s.find(['e', 'E']) {
                Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
                None => (s, 0),
            };
            let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
            let digits = format!("{ip}{fp}");
            let num: i64 = digits.parse().map_err(|_| bad())?;
            let scale = fp.len() as i32 - exp;
            let r = if scale >= 0 {
                Ratio::new(num, 10i64.checked_pow(scale as u32).ok_or_else(bad)?)
            } else {
                Ratio::from_integer(num.checked_mul(10i64.checked_pow((-scale) as u32).ok_or_else(bad)?).ok_or_else(bad)?)
            };
            return Ok(Param::Rational(r));
        }
        Err(bad())
    }
}

/// Closedness of the one-parameter isotropy subgroup with slopes `p`, `q`.
fn h2_from_ratio(p: &Param, q: &Param) -> H2Status {
    match (p, q) {
        (Param::Rational(_), Param::Rational(_)) => H2Status::Holds,
        (Param::Irrational(_), other) | (other, Param::Irrational(_)) if other.is_zero() => H2Status::Holds,
        (Param::Irrational(_), Param::Rational(_)) | (Param::Rational(_), Param::Irrational(_)) => H2Status::Fails,
        (Param::Irrational(_), Param::Irrational(_)) => H2Status::Unknown,
    }
}

fn finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("parameters must be finite".into()))
    }
}

fn tag(name: &str, params: Vec<(&str, String)>) -> FamilyTag {
    FamilyTag { name: name.into(), params: params.into_iter().map(|(k, v)| (k.into(), v)).collect() }
}

fn ex03_constants<T: Scalar>(a: T, b: T, c: T) -> Bracket<T> {
    let mut mu = Bracket::zero(0, 3);
    mu.set(1, 2, 0, a);
    mu.set(2, 0, 1, b);
    mu.set(0, 1, 2, c);
    mu
}

fn ex13_constants<T: Scalar>(a: T, b: T, c: T, d: T) -> Bracket<T> {
    let mut mu = Bracket::zero(1, 3);
    mu.set(3, 0, 2, d.clone());
    mu.set(0, 2, 3, d);
    // mu(e2,e3) = a e1 + b e0
    mu.set(2, 3, 1, a);
    mu.set(2, 3, 0, b);
    mu.set(3, 1, 2, c.clone());
    mu.set(1, 2, 3, c);
    mu
}

#[allow(clippy::too_many_arguments)]
fn ex15_constants<T: Scalar>(p: T, q: T, a: T, b: T, c: T, d: T, e: T, f: T) -> Bracket<T> {
    let mut mu = Bracket::zero(1, 5);
    mu.set(0, 2, 3, p.clone());
    mu.set(0, 3, 2, -p);
    mu.set(0, 4, 5, q.clone());
    mu.set(0, 5, 4, -q);
    mu.set(1, 2, 3, e.clone());
    mu.set(1, 3, 2, -e);
    mu.set(1, 4, 5, f.clone());
    mu.set(1, 5, 4, -f);
    mu.set(2, 3, 0, a);
    mu.set(2, 3, 1, b);
    mu.set(4, 5, 0, c);
    mu.set(4, 5, 1, d);
    mu
}

/// `mu(e_2,e_3) = a e_1`, `mu(e_3,e_1) = b e_2`, `mu(e_1,e_2) = c e_3` in H_{0,3}.
pub fn mu_ex03(a: f64, b: f64, c: f64) -> Result<Bracket> {
    finite(&[a, b, c])?;
    let t = tag("ex0-3", vec![("a", a.repr()), ("b", b.repr()), ("c", c.repr())]);
    Ok(ex03_constants(a, b, c).with_tag(t, H2Status::Holds))
}

pub fn mu_ex03_exact(a: BigRational, b: BigRational, c: BigRational) -> Bracket<BigRational> {
    ex03_constants(a, b, c)
}

/// The Heisenberg bracket `mu(e_2, e_3) = e_1`.
pub fn heisenberg3() -> Bracket {
    ex03_constants(1.0, 0.0, 0.0).with_tag(tag("h3", vec![]), H2Status::Holds)
}

/// The family in R + R^3 with `mu(e_3,e_0) = d e_2`, `mu(e_0,e_2) = d e_3`,
/// `mu(e_2,e_3) = a e_1 + b e_0`, `mu(e_3,e_1) = c e_2`, `mu(e_1,e_2) = c e_3`.
pub fn mu_ex13(a: f64, b: f64, c: f64, d: f64) -> Result<Bracket> {
    finite(&[a, b, c, d])?;
    let t = tag("ex1-3", vec![("a", a.repr()), ("b", b.repr()), ("c", c.repr()), ("d", d.repr())]);
    Ok(ex13_constants(a, b, c, d).with_tag(t, H2Status::Holds))
}

pub fn mu_ex13_exact(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Bracket<BigRational> {
    ex13_constants(a, b, c, d)
}

/// The family in R + R^5 describing homogeneous metrics on S^3 x S^2.
#[allow(clippy::too_many_arguments)]
pub fn mu_ex15(p: Param, q: Param, a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Bracket> {
    finite(&[p.value(), q.value(), a, b, c, d, e, f])?;
    let t = tag(
        "ex1-5",
        vec![
            ("p", p.to_string()),
            ("q", q.to_string()),
            ("a", a.repr()),
            ("b", b.repr()),
            ("c", c.repr()),
            ("d", d.repr()),
            ("e", e.repr()),
            ("f", f.repr()),
        ],
    );
    Ok(ex15_constants(p.value(), q.value(), a, b, c, d, e, f).with_tag(t, h2_from_ratio(&p, &q)))
}

#[allow(clippy::too_many_arguments)]
pub fn mu_ex15_exact(
    p: BigRational,
    q: BigRational,
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
    e: BigRational,
    f: BigRational,
) -> Bracket<BigRational> {
    ex15_constants(p, q, a, b, c, d, e, f)
}

/// Aloff-Wallach brackets on R + R^7 (`su(3)` with isotropy `e_0`), a,b,c,d > 0.
///
/// The `[e_i, e_{i+1}]` components along `e_0, e_1` carry the factor
/// `3 / (p^2 + pq + q^2)` that makes them the structure constants of the
/// matrix realisation; for `p^2 + pq + q^2 = 3` no correction occurs.
pub fn mu_aw(p: Param, q: Param, a: f64, b: f64, c: f64, d: f64) -> Result<Bracket> {
    finite(&[p.value(), q.value(), a, b, c, d])?;
    if !(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0) {
        return Err(Error::InvalidParameter("a, b, c, d must be positive".into()));
    }
    let (pv, qv) = (p.value(), q.value());
    let r = pv * pv + pv * qv + qv * qv;
    if r == 0.0 {
        return Err(Error::InvalidParameter("(p, q) must not be (0, 0)".into()));
    }
    let mut mu = Bracket::zero(1, 7);
    mu.set(0, 2, 3, -d * (pv + 2.0 * qv));
    mu.set(0, 3, 2, d * (pv + 2.0 * qv));
    mu.set(0, 4, 5, -d * (2.0 * pv + qv));
    mu.set(0, 5, 4, d * (2.0 * pv + qv));
    mu.set(0, 6, 7, -d * (pv - qv));
    mu.set(0, 7, 6, d * (pv - qv));
    mu.set(1, 2, 3, -pv);
    mu.set(1, 3, 2, pv);
    mu.set(1, 4, 5, qv);
    mu.set(1, 5, 4, -qv);
    mu.set(1, 6, 7, pv + qv);
    mu.set(1, 7, 6, -(pv + qv));

    let ka = (3.0 * b * c * d / a).sqrt();
    let kb = (3.0 * a * c * d / b).sqrt();
    let kc = (3.0 * a * b * d / c).sqrt();
    mu.set(4, 6, 2, -ka);
    mu.set(5, 7, 2, -ka);
    mu.set(5, 6, 3, -ka);
    mu.set(4, 7, 3, ka);
    mu.set(6, 2, 4, -kb);
    mu.set(7, 3, 4, kb);
    mu.set(7, 2, 5, -kb);
    mu.set(6, 3, 5, -kb);
    mu.set(2, 4, 6, -kc);
    mu.set(3, 5, 6, -kc);
    mu.set(3, 4, 7, kc);
    mu.set(2, 5, 7, -kc);

    let s = 3.0 / r;
    mu.set(2, 3, 0, -a * (pv + 2.0 * qv) * s);
    mu.set(2, 3, 1, -3.0 * a * d * pv * s);
    mu.set(4, 5, 0, -b * (2.0 * pv + qv) * s);
    mu.set(4, 5, 1, 3.0 * b * d * qv * s);
    mu.set(6, 7, 0, -c * (pv - qv) * s);
    mu.set(6, 7, 1, 3.0 * c * d * (pv + qv) * s);

    let t = tag(
        "aw",
        vec![
            ("p", p.to_string()),
            ("q", q.to_string()),
            ("a", a.repr()),
            ("b", b.repr()),
            ("c", c.repr()),
            ("d", d.repr()),
        ],
    );
    Ok(mu.with_tag(t, h2_from_ratio(&p, &q)))
}

/// Canonical family names accepted by [`from_params`].
pub const FAMILY_NAMES: [&str; 5] = ["ex0-3", "ex1-3", "ex1-5", "aw", "h3"];

/// Number of parameters a family takes.
pub fn arity(name: &str) -> Option<usize> {
    match name {
        "ex0-3" => Some(3),
        "ex1-3" => Some(4),
        "ex1-5" => Some(8),
        "aw" => Some(6),
        "h3" => Some(0),
        _ => None,
    }
}

fn real(s: &str) -> Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(x) => Ok(x),
        Err(_) => Ok(s.parse::<Param>()?.value()),
    }
}

/// Builds a family member from textual parameters in the constructor's order.
/// Slopes `p, q` may be written as integers, fractions, decimals or
/// `irr:<value>`; the other parameters are plain reals.
pub fn from_params(name: &str, params: &[String]) -> Result<Bracket> {
    let want = arity(name).ok_or_else(|| Error::InvalidParameter(format!("unknown family '{name}'")))?;
    if params.len() != want {
        return Err(Error::InvalidParameter(format!(
            "family {name} takes {want} parameters, got {}",
            params.len()
        )));
    }
    let r = |i: usize| real(&params[i]);
    let slope = |i: usize| params[i].parse::<Param>();
    match name {
        "ex0-3" => mu_ex03(r(0)?, r(1)?, r(2)?),
        "ex1-3" => mu_ex13(r(0)?, r(1)?, r(2)?, r(3)?),
        "ex1-5" => mu_ex15(slope(0)?, slope(1)?, r(2)?, r(3)?, r(4)?, r(5)?, r(6)?, r(7)?),
        "aw" => mu_aw(slope(0)?, slope(1)?, r(2)?, r(3)?, r(4)?, r(5)?),
        "h3" => Ok(heisenberg3()),
        _ => unreachable!(),
    }
}

/// Rebuilds a tagged bracket from its tag.
pub fn from_tag(t: &FamilyTag) -> Result<Bracket> {
    let vals: Vec<String> = t.params.iter().map(|(_, v)| v.clone()).collect();
    from_params(&t.name, &vals)
}

/// Exact rational constants of a family member, when every parameter is
/// rational and the family is polynomial in its parameters.
pub fn exact_from_params(name: &str, params: &[String]) -> Result<Bracket<BigRational>> {
    let want = arity(name).ok_or_else(|| Error::InvalidParameter(format!("unknown family '{name}'")))?;
    if params.len() != want {
        return Err(Error::InvalidParameter(format!("family {name} takes {want} parameters")));
    }
    let mut v = Vec::with_capacity(want);
    for s in params {
        let p: Param = s.parse()?;
        v.push(p.to_big().ok_or_else(|| Error::InvalidParameter(format!("'{s}' is not rational")))?);
    }
    let g = |i: usize| v[i].clone();
    match name {
        "ex0-3" => Ok(mu_ex03_exact(g(0), g(1), g(2))),
        "ex1-3" => Ok(mu_ex13_exact(g(0), g(1), g(2), g(3))),
        "ex1-5" => Ok(mu_ex15_exact(g(0), g(1), g(2), g(3), g(4), g(5), g(6), g(7))),
        "h3" => Ok(ex03_constants(BigRational::from_ratio(1, 1), BigRational::zero(), BigRational::zero())),
        _ => Err(Error::InvalidParameter(format!("family {name} has irrational constants"))),
    }
}
