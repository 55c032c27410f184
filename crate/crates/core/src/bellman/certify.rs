//! Randomized certificate sweeps.
//!
//! Every condition is reduced to a scalar that is either a slack (must stay
//! above `-tolerance`) or a deviation (must stay below `tolerance`), and the
//! report keeps the worst value together with the point that produced it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::BellmanConstants;
use crate::error::{DyadicError, Result};
use crate::seeded_rng;

use super::numeric::{chord_gap_integral, fd_hessian, fd_hessian_richardson, scaled_relative_error};
use super::{carleson_lemma, cubic, quarter_power, BellmanFunction, BellmanPoint2, BellmanPoint3, DomainSampler};

/// Number of directions used for directional Hessian bounds.
pub const DIRECTIONS: usize = 32;
/// Points used for finite-difference checks, capped by the sample count.
pub const FD_POINTS: usize = 1000;
/// Chords used for the quadrature cross-check, capped by the sample count.
pub const QUADRATURE_CHORDS: usize = 100;
const QUADRATURE_PANELS: usize = 256;
/// Relative step of the Richardson fallback.
const RICHARDSON_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionKind {
    /// Passes when `worst >= -tolerance`.
    Slack,
    /// Passes when `worst <= tolerance`.
    Deviation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub name: String,
    pub kind: ConditionKind,
    pub checked: usize,
    pub worst: f64,
    pub tolerance: f64,
    /// Coordinates of the worst case: a point, or both endpoints of a chord
    /// followed by any shift.
    pub witness: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub function: BellmanFunction,
    pub points: usize,
    pub seed: u64,
    pub conditions: Vec<ConditionSummary>,
    pub passed: bool,
}

impl CertificateReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionSummary> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

struct Tracker {
    name: &'static str,
    kind: ConditionKind,
    tolerance: f64,
    checked: usize,
    worst: f64,
    witness: Vec<f64>,
}

impl Tracker {
    fn new(name: &'static str, kind: ConditionKind, tolerance: f64) -> Self {
        let worst = match kind {
            ConditionKind::Slack => f64::INFINITY,
            ConditionKind::Deviation => 0.0,
        };
        Tracker { name, kind, tolerance, checked: 0, worst, witness: Vec::new() }
    }

    fn slack(name: &'static str, tolerance: f64) -> Self {
        Self::new(name, ConditionKind::Slack, tolerance)
    }

    fn deviation(name: &'static str, tolerance: f64) -> Self {
        Self::new(name, ConditionKind::Deviation, tolerance)
    }

    fn record(&mut self, value: f64, witness: impl FnOnce() -> Vec<f64>) {
        self.checked += 1;
        // NaN always becomes the witness
        let worse = match self.kind {
            ConditionKind::Slack => !(value >= self.worst),
            ConditionKind::Deviation => !(value <= self.worst),
        };
        if worse && (self.witness.is_empty() || !self.worst.is_nan()) {
            self.worst = value;
            self.witness = witness();
        }
    }

    fn finish(self) -> ConditionSummary {
        let pass = self.checked > 0
            && match self.kind {
                ConditionKind::Slack => self.worst >= -self.tolerance,
                ConditionKind::Deviation => self.worst <= self.tolerance,
            };
        ConditionSummary {
            name: self.name.to_string(),
            kind: self.kind,
            checked: self.checked,
            worst: self.worst,
            tolerance: self.tolerance,
            witness: self.witness,
            pass,
        }
    }
}

/// Sweeps `samples` random domain points (and as many chords) for one
/// function and checks every certificate condition. Finite-difference and
/// quadrature cross-checks use up to [`FD_POINTS`] and [`QUADRATURE_CHORDS`]
/// points drawn from the smaller `fd_log2_range` box.
pub fn verify_certificate(
    function: BellmanFunction,
    samples: usize,
    seed: u64,
    constants: &BellmanConstants,
) -> Result<CertificateReport> {
    if samples == 0 {
        return Err(DyadicError::domain("at least one sample is required"));
    }
    let conditions = match function {
        BellmanFunction::B1 => sweep_b1(samples, seed, constants)?,
        BellmanFunction::B2 => sweep_b2(samples, seed, constants)?,
        BellmanFunction::B3 => sweep_b3(samples, seed, constants)?,
    };
    let passed = conditions.iter().all(|c| c.pass);
    Ok(CertificateReport { function, points: samples, seed, conditions, passed })
}

fn unit_direction(k: usize) -> (f64, f64) {
    let t = std::f64::consts::PI * k as f64 / DIRECTIONS as f64;
    (t.cos(), t.sin())
}

/// A second point near `p`, at a random relative distance between `2^-10`
/// and `1`, so that short chords are exercised as well as long ones.
fn nearby<R: Rng>(rng: &mut R, p: &BellmanPoint2) -> BellmanPoint2 {
    loop {
        let scale = (-rng.random_range(0.0..10.0f64)).exp2();
        let u = p.u * (scale * rng.random_range(-1.0..=1.0f64)).exp();
        let v = p.v * (scale * rng.random_range(-1.0..=1.0f64)).exp();
        if u * v >= 1.0 {
            return BellmanPoint2 { u, v };
        }
    }
}

fn chord_pair<R: Rng>(rng: &mut R, sampler: &DomainSampler, k: usize) -> (BellmanPoint2, BellmanPoint2) {
    let a = sampler.point2(rng);
    let b = if k.is_multiple_of(2) { sampler.point2(rng) } else { nearby(rng, &a) };
    (a, b)
}

/// Scaled relative discrepancy between a closed-form `-d^2 B` and central
/// differences with steps `relative * scale`, retrying with a Richardson
/// estimate at a larger step when the plain estimate misses the tolerance.
fn fd_discrepancy<const D: usize>(
    f: &impl Fn(&[f64; D]) -> f64,
    x: &[f64; D],
    exact_neg: &[[f64; D]; D],
    scale: &[f64; D],
    constants: &BellmanConstants,
) -> f64 {
    let neg = |m: [[f64; D]; D]| m.map(|row| row.map(|e| -e));
    let steps = |relative: f64| scale.map(|s| relative * s);
    let plain = neg(fd_hessian(f, x, &steps(constants.fd_relative_step)));
    let err = scaled_relative_error(&plain, exact_neg, scale);
    if err <= constants.fd_relative_tolerance {
        return err;
    }
    let refined = neg(fd_hessian_richardson(f, x, &steps(RICHARDSON_STEP)));
    err.min(scaled_relative_error(&refined, exact_neg, scale))
}

fn quadratic_form<const D: usize>(m: &[[f64; D]; D], d: &[f64; D]) -> f64 {
    let mut q = 0.0;
    for i in 0..D {
        for j in 0..D {
            q += m[i][j] * d[i] * d[j];
        }
    }
    q
}

fn relative_gap_error(direct: f64, quadrature: f64) -> f64 {
    let denom = direct.abs().max(f64::MIN_POSITIVE);
    (direct - quadrature).abs() / denom
}

fn sweep_b1(samples: usize, seed: u64, c: &BellmanConstants) -> Result<Vec<ConditionSummary>> {
    let mut rng = seeded_rng(seed);
    let wide = DomainSampler::new(c.log2_range);
    let tol = c.slack_tolerance;
    let mut range_lower = Tracker::slack("range_lower", tol);
    let mut range_upper = Tracker::slack("range_upper", tol);
    let mut l_deriv = Tracker::slack("l_derivative", tol);
    let mut hessian = Tracker::slack("hessian_psd", tol);
    let mut midpoint = Tracker::slack("midpoint_gap", tol);
    let mut convex = Tracker::slack("domain_convexity", 0.0);

    for k in 0..samples {
        let p = wide.point3(&mut rng);
        let w = || p.to_array().to_vec();
        range_lower.record(carleson_lemma::range_lower_slack(&p), w);
        range_upper.record(carleson_lemma::range_upper_slack(&p), w);
        l_deriv.record(carleson_lemma::l_derivative_slack(&p), w);
        hessian.record(carleson_lemma::hessian_min_eigenvalue(&p), w);

        let (a, b) = chord_pair(&mut rng, &wide, k);
        let lp = rng.random::<f64>();
        let lm = rng.random::<f64>();
        let alpha = rng.random::<f64>() * (1.0 - 0.5 * (lp + lm));
        let xp = BellmanPoint3 { u: a.u, v: a.v, l: lp };
        let xm = BellmanPoint3 { u: b.u, v: b.v, l: lm };
        let witness = || vec![xp.u, xp.v, xp.l, xm.u, xm.v, xm.l, alpha];
        let mid = BellmanPoint2::midpoint(&a, &b);
        convex.record(if mid.is_ok() { 0.0 } else { -1.0 }, witness);
        // slack in units of the size of the tail 1/(v(1+l)) at the midpoint
        let (x, gap) = carleson_lemma::midpoint_gap(&xp, &xm, alpha)?;
        let unit = x.v * (1.0 + x.l);
        midpoint.record((gap - alpha / (4.0 * x.v)) * unit, witness);
    }

    let mut fd = Tracker::deviation("hessian_fd", c.fd_relative_tolerance);
    let mut fd_l = Tracker::deviation("l_derivative_fd", c.fd_derivative_tolerance);
    let moderate = DomainSampler::new(c.fd_log2_range);
    let f = |x: &[f64; 3]| carleson_lemma::eval_raw(x);
    for _ in 0..samples.min(FD_POINTS) {
        let mut p = moderate.point3(&mut rng);
        p.l = rng.random_range(0.05..0.95);
        let x = p.to_array();
        let exact = carleson_lemma::neg_hessian(&p);
        // B depends on l through 1 + l, which sets the natural scale
        fd.record(fd_discrepancy(&f, &x, &exact, &[p.u, p.v, 1.0 + p.l], c), || x.to_vec());
        let h = c.fd_relative_step;
        let mut hi = x;
        hi[2] += h;
        let mut lo = x;
        lo[2] -= h;
        let central = (f(&hi) - f(&lo)) / (2.0 * h);
        let closed = carleson_lemma::l_derivative(&p);
        fd_l.record((central - closed).abs() / closed, || x.to_vec());
    }

    let mut quad = Tracker::deviation("chord_quadrature", c.quadrature_relative_tolerance);
    for _ in 0..samples.min(QUADRATURE_CHORDS) {
        let a = moderate.point3(&mut rng);
        let b = moderate.point3(&mut rng);
        let (x, gap) = carleson_lemma::midpoint_gap(&a, &b, 0.0)?;
        let d = [0.5 * (a.u - b.u), 0.5 * (a.v - b.v), 0.5 * (a.l - b.l)];
        let second = |t: f64| {
            let p = BellmanPoint3 { u: x.u + t * d[0], v: x.v + t * d[1], l: x.l + t * d[2] };
            -quadratic_form(&carleson_lemma::neg_hessian(&p), &d)
        };
        let integral = chord_gap_integral(second, QUADRATURE_PANELS);
        quad.record(relative_gap_error(gap, integral), || {
            vec![a.u, a.v, a.l, b.u, b.v, b.l]
        });
    }

    Ok(vec![
        range_lower.finish(),
        range_upper.finish(),
        l_deriv.finish(),
        hessian.finish(),
        midpoint.finish(),
        convex.finish(),
        fd.finish(),
        fd_l.finish(),
        quad.finish(),
    ])
}

fn sweep_b2(samples: usize, seed: u64, c: &BellmanConstants) -> Result<Vec<ConditionSummary>> {
    let mut rng = seeded_rng(seed);
    let wide = DomainSampler::new(c.log2_range);
    let tol = c.slack_tolerance;
    let mut range = Tracker::slack("range_lower", tol);
    let mut hessian = Tracker::slack("hessian_lower_bound", tol);
    let mut directional = Tracker::slack("directional_lower_bound", tol);
    let mut ratio = Tracker::slack("midpoint_ratio", tol);
    let mut convex = Tracker::slack("domain_convexity", 0.0);

    for k in 0..samples {
        let p = wide.point2(&mut rng);
        let w = || p.to_array().to_vec();
        range.record(quarter_power::eval(&p), w);
        hessian.record(quarter_power::hessian_lower_bound_slack(&p), w);
        let worst_dir = (0..DIRECTIONS)
            .map(|j| {
                let (du, dv) = unit_direction(j);
                quarter_power::directional_slack(&p, du, dv)
            })
            .fold(f64::INFINITY, f64::min);
        directional.record(worst_dir, w);

        let (a, b) = chord_pair(&mut rng, &wide, k);
        let witness = || vec![a.u, a.v, b.u, b.v];
        convex.record(if BellmanPoint2::midpoint(&a, &b).is_ok() { 0.0 } else { -1.0 }, witness);
        if a.u != b.u {
            let r = quarter_power::midpoint_ratio(&a, &b)?;
            ratio.record(r - c.b2_midpoint_ratio, witness);
        }
    }

    let mut fd = Tracker::deviation("hessian_fd", c.fd_relative_tolerance);
    let moderate = DomainSampler::new(c.fd_log2_range);
    let f = |x: &[f64; 2]| quarter_power::eval_raw(x);
    for _ in 0..samples.min(FD_POINTS) {
        let p = moderate.point2(&mut rng);
        let x = p.to_array();
        let exact = quarter_power::neg_hessian(&p);
        fd.record(fd_discrepancy(&f, &x, &exact, &[p.u, p.v], c), || x.to_vec());
    }

    let mut quad = Tracker::deviation("chord_quadrature", c.quadrature_relative_tolerance);
    for _ in 0..samples.min(QUADRATURE_CHORDS) {
        let a = moderate.point2(&mut rng);
        let b = moderate.point2(&mut rng);
        let (x, gap) = quarter_power::midpoint_gap(&a, &b)?;
        let d = [0.5 * (a.u - b.u), 0.5 * (a.v - b.v)];
        let second = |t: f64| {
            let p = BellmanPoint2 { u: x.u + t * d[0], v: x.v + t * d[1] };
            -quadratic_form(&quarter_power::neg_hessian(&p), &d)
        };
        let integral = chord_gap_integral(second, QUADRATURE_PANELS);
        quad.record(relative_gap_error(gap, integral), || vec![a.u, a.v, b.u, b.v]);
    }

    Ok(vec![
        range.finish(),
        hessian.finish(),
        directional.finish(),
        ratio.finish(),
        convex.finish(),
        fd.finish(),
        quad.finish(),
    ])
}

fn sweep_b3(samples: usize, seed: u64, c: &BellmanConstants) -> Result<Vec<ConditionSummary>> {
    let mut rng = seeded_rng(seed);
    let wide = DomainSampler::new(c.log2_range);
    let tol = c.slack_tolerance;
    let mut range_lower = Tracker::slack("range_lower", tol);
    let mut range_upper = Tracker::slack("range_upper", tol);
    let mut identity = Tracker::deviation("hessian_identity", tol);
    let mut closed = Tracker::deviation("midpoint_closed_form", tol);
    let mut ratio = Tracker::slack("midpoint_ratio", tol);
    let mut convex = Tracker::slack("domain_convexity", 0.0);

    for k in 0..samples {
        let p = wide.point2(&mut rng);
        let w = || p.to_array().to_vec();
        range_lower.record(cubic::range_lower_slack(&p), w);
        range_upper.record(cubic::range_upper_slack(&p), w);
        let m = cubic::neg_hessian(&p);
        let worst_dir = (0..DIRECTIONS)
            .map(|j| {
                let (du, dv) = unit_direction(j);
                let exact = cubic::curvature(&p, du);
                let q = quadratic_form(&m, &[du, dv]);
                // relative to the curvature scale 2 u^-3 of a unit step
                (q - exact).abs() / cubic::curvature(&p, 1.0)
            })
            .fold(0.0, f64::max);
        identity.record(worst_dir, w);

        let (a, b) = chord_pair(&mut rng, &wide, k);
        let witness = || vec![a.u, a.v, b.u, b.v];
        convex.record(if BellmanPoint2::midpoint(&a, &b).is_ok() { 0.0 } else { -1.0 }, witness);
        let (_, gap) = cubic::midpoint_gap(&a, &b)?;
        let exact = cubic::midpoint_gap_closed_form(a.u, b.u);
        // in units of the terms 1/u+-, which bound the attainable accuracy
        let unit = 0.5 * (1.0 / a.u + 1.0 / b.u);
        closed.record((gap - exact).abs() / unit, witness);
        if a.u != b.u {
            ratio.record(cubic::midpoint_ratio(&a, &b)? - c.b3_midpoint_ratio, witness);
        }
    }

    let mut fd = Tracker::deviation("hessian_fd", c.fd_relative_tolerance);
    let moderate = DomainSampler::new(c.fd_log2_range);
    let f = |x: &[f64; 2]| cubic::eval_raw(x);
    for _ in 0..samples.min(FD_POINTS) {
        let p = moderate.point2(&mut rng);
        let x = p.to_array();
        let exact = cubic::neg_hessian(&p);
        fd.record(fd_discrepancy(&f, &x, &exact, &[p.u, p.v], c), || x.to_vec());
    }

    let mut quad = Tracker::deviation("chord_quadrature", c.quadrature_relative_tolerance);
    for _ in 0..samples.min(QUADRATURE_CHORDS) {
        let a = moderate.point2(&mut rng);
        let b = moderate.point2(&mut rng);
        let (x, gap) = cubic::midpoint_gap(&a, &b)?;
        let d = [0.5 * (a.u - b.u), 0.5 * (a.v - b.v)];
        let second = |t: f64| {
            let p = BellmanPoint2 { u: x.u + t * d[0], v: x.v + t * d[1] };
            -quadratic_form(&cubic::neg_hessian(&p), &d)
        };
        let integral = chord_gap_integral(second, QUADRATURE_PANELS);
        quad.record(relative_gap_error(gap, integral), || vec![a.u, a.v, b.u, b.v]);
    }

    Ok(vec![
        range_lower.finish(),
        range_upper.finish(),
        identity.finish(),
        closed.finish(),
        ratio.finish(),
        convex.finish(),
        fd.finish(),
        quad.finish(),
    ])
}
