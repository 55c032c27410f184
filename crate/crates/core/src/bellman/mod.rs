//! Bellman-function certificates.
//!
//! Three explicit functions, each on a convex domain above the hyperbola
//! `uv >= 1`:
//!
//! | id | function | controls |
//! |----|----------|----------|
//! | `b1` | `u - 1/(v(1+l))` on `0 <= l <= 1` | `sum lambda_I / m_I w^-1` for Carleson `lambda` |
//! | `b2` | `(uv)^{1/4}` | the quarter-power disbalance sum |
//! | `b3` | `v - 1/u` | the cubic disbalance sum |
//!
//! For each we provide evaluation, closed-form Hessians, the concavity
//! margins they certify, and the midpoint gap `B(x) - (B(x+) + B(x-)) / 2`
//! that drives the dyadic iteration. [`certify::verify_certificate`] sweeps
//! random domain points and checks every condition, cross-checking the
//! closed forms against finite differences and chord quadrature.

pub mod carleson_lemma;
pub mod certify;
pub mod cubic;
pub mod numeric;
pub mod quarter_power;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};

pub use certify::{verify_certificate, CertificateReport, ConditionSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellmanFunction {
    B1,
    B2,
    B3,
}

impl BellmanFunction {
    pub fn id(&self) -> &'static str {
        match self {
            BellmanFunction::B1 => "b1",
            BellmanFunction::B2 => "b2",
            BellmanFunction::B3 => "b3",
        }
    }
}

impl std::str::FromStr for BellmanFunction {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b1" => Ok(BellmanFunction::B1),
            "b2" => Ok(BellmanFunction::B2),
            "b3" => Ok(BellmanFunction::B3),
            other => Err(DyadicError::domain(format!("unknown Bellman function {other:?}"))),
        }
    }
}

fn check_uv(u: f64, v: f64) -> Result<()> {
    if !(u.is_finite() && v.is_finite() && u >= 0.0 && v >= 0.0 && u * v >= 1.0) {
        return Err(DyadicError::domain(format!(
            "(u, v) = ({u}, {v}) is outside u, v >= 0, uv >= 1"
        )));
    }
    Ok(())
}

/// A point of `{u, v, l >= 0, uv >= 1, l <= 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellmanPoint3 {
    pub u: f64,
    pub v: f64,
    pub l: f64,
}

impl BellmanPoint3 {
    pub fn new(u: f64, v: f64, l: f64) -> Result<Self> {
        check_uv(u, v)?;
        if !(0.0..=1.0).contains(&l) {
            return Err(DyadicError::domain(format!("l = {l} is outside [0, 1]")));
        }
        Ok(BellmanPoint3 { u, v, l })
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.u, self.v, self.l]
    }
}

/// A point of `{u, v >= 0, uv >= 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellmanPoint2 {
    pub u: f64,
    pub v: f64,
}

impl BellmanPoint2 {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        check_uv(u, v)?;
        Ok(BellmanPoint2 { u, v })
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.u, self.v]
    }

    /// Midpoint of two domain points, itself in the domain by convexity.
    pub fn midpoint(a: &BellmanPoint2, b: &BellmanPoint2) -> Result<Self> {
        BellmanPoint2::new(0.5 * (a.u + b.u), 0.5 * (a.v + b.v))
    }
}

/// Draws domain points with `u`, `v` log-uniform on `[2^-r, 2^r]`
/// conditioned on `uv >= 1`, and `l` uniform on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct DomainSampler {
    pub log2_range: f64,
}

impl DomainSampler {
    pub fn new(log2_range: f64) -> Self {
        DomainSampler { log2_range }
    }

    pub fn point2<R: Rng>(&self, rng: &mut R) -> BellmanPoint2 {
        let r = self.log2_range;
        loop {
            let u = rng.random_range(-r..=r).exp2();
            let v = rng.random_range(-r..=r).exp2();
            if u * v >= 1.0 {
                return BellmanPoint2 { u, v };
            }
        }
    }

    pub fn point3<R: Rng>(&self, rng: &mut R) -> BellmanPoint3 {
        let p = self.point2(rng);
        BellmanPoint3 {
            u: p.u,
            v: p.v,
            l: rng.random::<f64>(),
        }
    }
}
