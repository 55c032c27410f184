//! `B(u, v) = v - 1/u`, with `-d^2 B = 2 u^{-3} |du|^2` exactly. The
//! midpoint gap has the closed form `(u+ - u-)^2 / (2 u+ u- (u+ + u-))`,
//! and `u+ u- <= u^2` turns it into `gap >= (1/4) u^{-3} (u+ - u-)^2`.

use crate::error::Result;

use super::BellmanPoint2;

pub fn eval(p: &BellmanPoint2) -> f64 {
    eval_raw(&p.to_array())
}

pub(crate) fn eval_raw(x: &[f64; 2]) -> f64 {
    x[1] - 1.0 / x[0]
}

/// `B = (uv - 1)/u >= 0`.
pub fn range_lower_slack(p: &BellmanPoint2) -> f64 {
    (p.u * p.v - 1.0) / p.u
}

/// `v - B = 1/u`.
pub fn range_upper_slack(p: &BellmanPoint2) -> f64 {
    1.0 / p.u
}

pub fn neg_hessian(p: &BellmanPoint2) -> [[f64; 2]; 2] {
    [[2.0 / (p.u * p.u * p.u), 0.0], [0.0, 0.0]]
}

/// `2 u^{-3} du^2`.
pub fn curvature(p: &BellmanPoint2, du: f64) -> f64 {
    2.0 * du * du / (p.u * p.u * p.u)
}

/// `(x, B(x) - (B(x+) + B(x-)) / 2)`. The `v` part is affine and cancels,
/// so the gap is evaluated from the `-1/u` part alone.
pub fn midpoint_gap(x_plus: &BellmanPoint2, x_minus: &BellmanPoint2) -> Result<(BellmanPoint2, f64)> {
    let x = BellmanPoint2::midpoint(x_plus, x_minus)?;
    Ok((x, 0.5 * (1.0 / x_plus.u + 1.0 / x_minus.u) - 1.0 / x.u))
}

pub fn midpoint_gap_closed_form(u_plus: f64, u_minus: f64) -> f64 {
    let d = u_plus - u_minus;
    d * d / (2.0 * u_plus * u_minus * (u_plus + u_minus))
}

/// `gap / (u^{-3} (u+ - u-)^2)` from the closed form, which simplifies to
/// `u^2 / (4 u+ u-) >= 1/4`; the bare gap when `u+ = u-`.
pub fn midpoint_ratio(x_plus: &BellmanPoint2, x_minus: &BellmanPoint2) -> Result<f64> {
    let x = BellmanPoint2::midpoint(x_plus, x_minus)?;
    if x_plus.u == x_minus.u {
        return Ok(0.0);
    }
    Ok(x.u * x.u / (4.0 * x_plus.u * x_minus.u))
}
