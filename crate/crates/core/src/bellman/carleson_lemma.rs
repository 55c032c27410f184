//! `B(u, v, l) = u - 1/(v(1+l))`, the certificate behind the Carleson
//! sequence lemma. On the domain it satisfies `0 <= B <= u`,
//! `dB/dl >= 1/(4v)` and `-d^2 B >= 0`, which together give the shifted
//! midpoint inequality `B(x) - (B(x+) + B(x-))/2 >= alpha / (4v)` whenever
//! `x - (x+ + x-)/2 = (0, 0, alpha)`.

use crate::error::{DyadicError, Result};

use super::numeric::sym2_eigenvalues;
use super::BellmanPoint3;

pub fn eval(p: &BellmanPoint3) -> f64 {
    eval_raw(&p.to_array())
}

pub(crate) fn eval_raw(x: &[f64; 3]) -> f64 {
    x[0] - 1.0 / (x[1] * (1.0 + x[2]))
}

/// `B` written as `(uv(1+l) - 1) / (v(1+l))`; nonnegative in floating point
/// whenever `uv >= 1` holds in floating point.
pub fn range_lower_slack(p: &BellmanPoint3) -> f64 {
    let s = p.v * (1.0 + p.l);
    (p.u * s - 1.0) / s
}

/// `u - B = 1/(v(1+l))`.
pub fn range_upper_slack(p: &BellmanPoint3) -> f64 {
    1.0 / (p.v * (1.0 + p.l))
}

pub fn l_derivative(p: &BellmanPoint3) -> f64 {
    let s = 1.0 + p.l;
    1.0 / (p.v * s * s)
}

/// `dB/dl - 1/(4v) = (1 - l)(3 + l) / (4 v (1 + l)^2)`; zero at `l = 1`.
pub fn l_derivative_slack(p: &BellmanPoint3) -> f64 {
    let s = 1.0 + p.l;
    (1.0 - p.l) * (3.0 + p.l) / (4.0 * p.v * s * s)
}

/// `-d^2 B` in the coordinates `(u, v, l)`.
pub fn neg_hessian(p: &BellmanPoint3) -> [[f64; 3]; 3] {
    let (v, s) = (p.v, 1.0 + p.l);
    let vv = 2.0 / (v * v * v * s);
    let vl = 1.0 / (v * v * s * s);
    let ll = 2.0 / (v * s * s * s);
    [[0.0, 0.0, 0.0], [0.0, vv, vl], [0.0, vl, ll]]
}

/// Smallest eigenvalue of `-d^2 B`: the `u` row is zero, so this is
/// `min(0, lambda_min)` of the `(v, l)` block, whose determinant is
/// `3 / (v^4 (1+l)^4) > 0`.
pub fn hessian_min_eigenvalue(p: &BellmanPoint3) -> f64 {
    let m = neg_hessian(p);
    let (lo, _) = sym2_eigenvalues(m[1][1], m[1][2], m[2][2]);
    lo.min(0.0)
}

/// Midpoint gap `B(x) - (B(x+) + B(x-)) / 2` for
/// `x = ((u+ + u-)/2, (v+ + v-)/2, (l+ + l-)/2 + alpha)`. The `u` term is
/// affine and cancels, so only `-1/(v(1+l))` is evaluated.
pub fn midpoint_gap(x_plus: &BellmanPoint3, x_minus: &BellmanPoint3, alpha: f64) -> Result<(BellmanPoint3, f64)> {
    if !(alpha >= 0.0) {
        return Err(DyadicError::domain(format!("alpha must be nonnegative, got {alpha}")));
    }
    let x = BellmanPoint3::new(
        0.5 * (x_plus.u + x_minus.u),
        0.5 * (x_plus.v + x_minus.v),
        0.5 * (x_plus.l + x_minus.l) + alpha,
    )?;
    let tail = |p: &BellmanPoint3| 1.0 / (p.v * (1.0 + p.l));
    let gap = 0.5 * (tail(x_plus) + tail(x_minus)) - tail(&x);
    Ok((x, gap))
}

/// `gap - alpha / (4v)`, nonnegative on the domain.
pub fn midpoint_gap_slack(x_plus: &BellmanPoint3, x_minus: &BellmanPoint3, alpha: f64) -> Result<f64> {
    let (x, gap) = midpoint_gap(x_plus, x_minus, alpha)?;
    Ok(gap - alpha / (4.0 * x.v))
}
