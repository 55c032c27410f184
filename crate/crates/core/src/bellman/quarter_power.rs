//! `B(u, v) = (uv)^{1/4}`. Its negative Hessian dominates
//! `(1/8) v^{1/4} u^{-7/4} |du|^2`, and along chords this turns into the
//! midpoint bound `B(x) - (B(x+) + B(x-))/2 >= C v^{1/4} u^{-7/4} (u+ - u-)^2`.
//! The infimum of the ratio is `1/48`, approached by short chords along the
//! direction that minimizes the quadratic form for fixed `du`.

use crate::error::Result;

use super::numeric::sym2_eigenvalues;
use super::BellmanPoint2;

pub fn eval(p: &BellmanPoint2) -> f64 {
    eval_raw(&p.to_array())
}

pub(crate) fn eval_raw(x: &[f64; 2]) -> f64 {
    (x[0] * x[1]).powf(0.25)
}

/// `v^{1/4} u^{-7/4}`.
pub fn curvature_weight(p: &BellmanPoint2) -> f64 {
    p.v.powf(0.25) * p.u.powf(-1.75)
}

/// `-d^2 B` with entries `(3/16) v^{1/4} u^{-7/4}`, `-(1/16)(uv)^{-3/4}`,
/// `(3/16) v^{-7/4} u^{1/4}`.
pub fn neg_hessian(p: &BellmanPoint2) -> [[f64; 2]; 2] {
    let uu = 3.0 / 16.0 * curvature_weight(p);
    let uv = -(p.u * p.v).powf(-0.75) / 16.0;
    let vv = 3.0 / 16.0 * p.v.powf(-1.75) * p.u.powf(0.25);
    [[uu, uv], [uv, vv]]
}

/// `min over unit (du, dv)` of `-d^2 B(du, dv) - (1/8) v^{1/4} u^{-7/4} du^2`,
/// i.e. the smallest eigenvalue of the difference matrix.
pub fn hessian_lower_bound_slack(p: &BellmanPoint2) -> f64 {
    let m = neg_hessian(p);
    let a = m[0][0] - curvature_weight(p) / 8.0;
    sym2_eigenvalues(a, m[0][1], m[1][1]).0
}

/// The same margin along one direction, normalized to unit length.
pub fn directional_slack(p: &BellmanPoint2, du: f64, dv: f64) -> f64 {
    let n2 = du * du + dv * dv;
    let m = neg_hessian(p);
    let q = m[0][0] * du * du + 2.0 * m[0][1] * du * dv + m[1][1] * dv * dv;
    (q - curvature_weight(p) / 8.0 * du * du) / n2
}

/// `(x, B(x) - (B(x+) + B(x-)) / 2)` with `x` the midpoint.
pub fn midpoint_gap(x_plus: &BellmanPoint2, x_minus: &BellmanPoint2) -> Result<(BellmanPoint2, f64)> {
    let x = BellmanPoint2::midpoint(x_plus, x_minus)?;
    Ok((x, eval(&x) - 0.5 * (eval(x_plus) + eval(x_minus))))
}

/// `gap / (v^{1/4} u^{-7/4} (u+ - u-)^2)` at the midpoint; the bare gap
/// when `u+ = u-`.
pub fn midpoint_ratio(x_plus: &BellmanPoint2, x_minus: &BellmanPoint2) -> Result<f64> {
    let (x, gap) = midpoint_gap(x_plus, x_minus)?;
    let du = x_plus.u - x_minus.u;
    if du == 0.0 {
        return Ok(gap);
    }
    Ok(gap / (curvature_weight(&x) * du * du))
}
