//! Checkers for the inequalities in the linear-bound argument, and scans of
//! the weighted operator norm against the `A2` characteristic.
//!
//! Every checker is evaluated for all roots `J` at once: per-interval terms
//! are summed over subtrees, and the characteristics on the right-hand side
//! (`[w]_A2`, the Carleson constant `Q`, `||b||_BMO`) are taken over `D(J)`.
//! Those local constants never exceed the global ones, so each check is at
//! least as strict as its global form, and a report for `J` coincides with
//! the root report of the data restricted to `J`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CheckConstants, ScanConstants};
use crate::error::{DyadicError, Result};
use crate::grid::{haar_analyze, DyadicIndex, DyadicSequence, StepFunction};
use crate::paraproduct::{weighted_operator_norm, PowerIteration};
use crate::weights::{
    bmo_norm_carleson, gen_bmo_symbol, gen_cascade_weight, gen_power_weight, squared_coefficients,
    SymbolKind, Weight,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    /// `(1/|J|) sum lambda_I / m_I w^-1 <= 4 Q m_J w`.
    Prop1,
    /// `(1/|J|) sum m_I w lambda_I <= 4 Q [w] m_J w`.
    Prop1c,
    /// `(1/|J|) sum b_I^2 <= ||b||^2`.
    CarlesonB,
    /// `(1/|J|) sum m_I w^-1 b_I^2 <= 4 [w] ||b||^2 m_J w^-1`.
    Embed,
    /// Quarter-power disbalance sum.
    Prop2,
    /// `(1/|J|) sum (dw/m_I w)^2 |I| m_I w m_I w^-1 <= 256 [w]`.
    Prop2c,
    /// `(1/|J|) sum (dw/m_I w)^2 |I| m_I w^-1 <= 4 [w] m_J w^-1`.
    Prop3,
    /// `(1/|J|) sum dw^2 / (m_I w)^3 |I| <= 4 m_J w^-1`.
    Prop3e,
    /// `(1/|J|) sum (A_I^w)^2 |I| m_I w` against `[w] m_J w`.
    Wittwer,
    /// `alpha_I = |b_I A_I^w| sqrt|I|` weighted by `m_I w m_I w^-1`.
    BilinearProduct,
    /// `alpha_I` weighted by `m_I w`.
    BilinearWeight,
    /// `alpha_I` weighted by `m_I w^-1`.
    BilinearDual,
}

impl CheckId {
    pub const ALL: [CheckId; 12] = [
        CheckId::Prop1,
        CheckId::Prop1c,
        CheckId::CarlesonB,
        CheckId::Embed,
        CheckId::Prop2,
        CheckId::Prop2c,
        CheckId::Prop3,
        CheckId::Prop3e,
        CheckId::Wittwer,
        CheckId::BilinearProduct,
        CheckId::BilinearWeight,
        CheckId::BilinearDual,
    ];

    pub const BILINEAR: [CheckId; 3] =
        [CheckId::BilinearProduct, CheckId::BilinearWeight, CheckId::BilinearDual];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::Prop1 => "prop1",
            CheckId::Prop1c => "prop1c",
            CheckId::CarlesonB => "carleson-b",
            CheckId::Embed => "embed",
            CheckId::Prop2 => "prop2",
            CheckId::Prop2c => "prop2c",
            CheckId::Prop3 => "prop3",
            CheckId::Prop3e => "prop3e",
            CheckId::Wittwer => "wittwer",
            CheckId::BilinearProduct => "bilinear-product",
            CheckId::BilinearWeight => "bilinear-weight",
            CheckId::BilinearDual => "bilinear-dual",
        }
    }

    /// Whether the check reads the symbol `b` (or `lambda = b_I^2`).
    pub fn needs_symbol(&self) -> bool {
        matches!(
            self,
            CheckId::CarlesonB
                | CheckId::Embed
                | CheckId::BilinearProduct
                | CheckId::BilinearWeight
                | CheckId::BilinearDual
        )
    }

    /// Whether the check reads a Carleson sequence.
    pub fn needs_carleson(&self) -> bool {
        matches!(self, CheckId::Prop1 | CheckId::Prop1c)
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| DyadicError::domain(format!("unknown check {s:?}")))
    }
}

/// One inequality evaluated at one root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: CheckId,
    pub root: DyadicIndex,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, and `0` whenever `lhs = 0`.
    pub ratio: f64,
    pub constant: f64,
    pub pass: bool,
    /// The interval of `D(root)` carrying the largest single term.
    pub witness: DyadicIndex,
}

/// Data a check may read. `carleson` is only used by the two `prop1`
/// checks, `symbol` by the checks that involve `b`.
#[derive(Debug, Clone, Copy)]
pub struct CheckInputs<'a> {
    pub weight: &'a Weight,
    pub symbol: Option<&'a StepFunction>,
    pub carleson: Option<&'a DyadicSequence>,
}

impl<'a> CheckInputs<'a> {
    pub fn weight(weight: &'a Weight) -> Self {
        CheckInputs { weight, symbol: None, carleson: None }
    }

    pub fn with_symbol(mut self, symbol: &'a StepFunction) -> Self {
        self.symbol = Some(symbol);
        self
    }

    pub fn with_carleson(mut self, carleson: &'a DyadicSequence) -> Self {
        self.carleson = Some(carleson);
        self
    }

    fn symbol(&self, id: CheckId) -> Result<&'a StepFunction> {
        let b = self
            .symbol
            .ok_or_else(|| DyadicError::domain(format!("check {id} needs a symbol")))?;
        self.weight.values().same_depth(b)?;
        Ok(b)
    }

    fn carleson(&self, id: CheckId) -> Result<&'a DyadicSequence> {
        let lam = self
            .carleson
            .ok_or_else(|| DyadicError::domain(format!("check {id} needs a Carleson sequence")))?;
        if lam.depth() != self.weight.depth() {
            return Err(DyadicError::DepthMismatch {
                expected: self.weight.depth(),
                found: lam.depth(),
            });
        }
        if let Some((i, v)) = lam.iter().find(|(_, v)| *v < 0.0) {
            return Err(DyadicError::domain(format!(
                "Carleson sequences are nonnegative; entry at {i} is {v}"
            )));
        }
        Ok(lam)
    }
}

/// A check evaluated at every root `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckProfile {
    pub id: CheckId,
    pub constant: f64,
    pub pass_slack: f64,
    pub lhs: DyadicSequence,
    pub rhs: DyadicSequence,
    witness: Vec<DyadicIndex>,
}

impl CheckProfile {
    pub fn depth(&self) -> u32 {
        self.lhs.depth()
    }

    pub fn report(&self, root: DyadicIndex) -> Result<CheckReport> {
        root.validate_parent(self.depth())?;
        let lhs = self.lhs.get(root);
        let rhs = self.rhs.get(root);
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Ok(CheckReport {
            id: self.id,
            root,
            lhs,
            rhs,
            ratio,
            constant: self.constant,
            pass: ratio <= self.constant + self.pass_slack,
            witness: self.witness[root.heap_index()],
        })
    }

    pub fn reports(&self) -> Vec<CheckReport> {
        DyadicIndex::all_below(self.depth())
            .map(|j| self.report(j).expect("root is on the grid"))
            .collect()
    }

    /// The root with the largest ratio (first in heap order on ties).
    pub fn worst(&self) -> CheckReport {
        let mut worst: Option<CheckReport> = None;
        for r in self.reports() {
            if worst.as_ref().is_none_or(|w| r.ratio > w.ratio || r.ratio.is_nan()) {
                worst = Some(r);
            }
        }
        worst.expect("profiles have at least one root")
    }

    pub fn failures(&self) -> usize {
        self.reports().iter().filter(|r| !r.pass).count()
    }
}

/// The checkers, parameterized by the frozen constants.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityLab {
    pub constants: CheckConstants,
}

impl Default for InequalityLab {
    fn default() -> Self {
        InequalityLab {
            constants: crate::config::SuiteConstants::frozen().checks,
        }
    }
}

/// Per-interval quantities shared by the weight checks.
struct WeightTerms<'a> {
    w: &'a Weight,
    a2: DyadicSequence,
}

impl<'a> WeightTerms<'a> {
    fn new(w: &'a Weight) -> Self {
        WeightTerms { w, a2: local_a2(w) }
    }

    fn u(&self, i: DyadicIndex) -> f64 {
        self.w.mean(i)
    }

    fn v(&self, i: DyadicIndex) -> f64 {
        self.w.inv_mean(i)
    }

    /// `(m_{I+} w - m_{I-} w) / m_I w`, twice the disbalance.
    fn relative_jump(&self, i: DyadicIndex) -> f64 {
        (self.w.mean(i.left_child()) - self.w.mean(i.right_child())) / self.w.mean(i)
    }
}

impl InequalityLab {
    pub fn new(constants: CheckConstants) -> Self {
        InequalityLab { constants }
    }

    pub fn profile(&self, id: CheckId, inputs: &CheckInputs<'_>) -> Result<CheckProfile> {
        let depth = inputs.weight.depth();
        if depth == 0 {
            return Err(DyadicError::domain("checks need a grid of depth at least 1"));
        }
        let t = WeightTerms::new(inputs.weight);
        let c = &self.constants;
        let (terms, rhs, constant): (DyadicSequence, DyadicSequence, f64) = match id {
            CheckId::Prop1 | CheckId::Prop1c => {
                let lam = inputs.carleson(id)?;
                let q = local_carleson(lam)?;
                if id == CheckId::Prop1 {
                    let terms = lam.map(|i, l| l / t.v(i))?;
                    let rhs = q.map(|j, q| c.carleson_lemma * q * t.u(j))?;
                    (terms, rhs, 1.0)
                } else {
                    let terms = lam.map(|i, l| t.u(i) * l)?;
                    let rhs = q.map(|j, q| c.carleson_lemma * q * t.a2.get(j) * t.u(j))?;
                    (terms, rhs, 1.0)
                }
            }
            CheckId::CarlesonB | CheckId::Embed => {
                let b = inputs.symbol(id)?;
                let sq = squared_coefficients(&haar_analyze(b));
                let q = local_carleson(&sq)?;
                if id == CheckId::CarlesonB {
                    (sq, q, 1.0)
                } else {
                    let terms = sq.map(|i, s| t.v(i) * s)?;
                    let rhs = q.map(|j, q| c.carleson_lemma * t.a2.get(j) * q * t.v(j))?;
                    (terms, rhs, 1.0)
                }
            }
            CheckId::Prop2 => {
                let terms = DyadicSequence::from_fn(depth, |i| {
                    let r = t.relative_jump(i);
                    r * r * i.length() * (t.u(i) * t.v(i)).powf(0.25)
                })?;
                let rhs = DyadicSequence::from_fn(depth, |j| {
                    c.quarter_power * (t.u(j) * t.v(j)).powf(0.25)
                })?;
                (terms, rhs, 1.0)
            }
            CheckId::Prop2c => {
                let terms = DyadicSequence::from_fn(depth, |i| {
                    let r = t.relative_jump(i);
                    r * r * i.length() * t.u(i) * t.v(i)
                })?;
                let rhs = t.a2.map(|_, a| c.quarter_power * a)?;
                (terms, rhs, 1.0)
            }
            CheckId::Prop3 => {
                let terms = DyadicSequence::from_fn(depth, |i| {
                    let r = t.relative_jump(i);
                    r * r * i.length() * t.v(i)
                })?;
                let rhs = t.a2.map(|j, a| c.cubic * a * t.v(j))?;
                (terms, rhs, 1.0)
            }
            CheckId::Prop3e => {
                let terms = DyadicSequence::from_fn(depth, |i| {
                    let u = t.u(i);
                    let d = t.w.mean(i.left_child()) - t.w.mean(i.right_child());
                    d * d / (u * u * u) * i.length()
                })?;
                let rhs = DyadicSequence::from_fn(depth, |j| c.cubic * t.v(j))?;
                (terms, rhs, 1.0)
            }
            CheckId::Wittwer => {
                let terms = DyadicSequence::from_fn(depth, |i| {
                    let a = 0.5 * t.relative_jump(i);
                    a * a * i.length() * t.u(i)
                })?;
                let rhs = t.a2.map(|j, a| a * t.u(j))?;
                (terms, rhs, c.wittwer)
            }
            CheckId::BilinearProduct | CheckId::BilinearWeight | CheckId::BilinearDual => {
                let b = inputs.symbol(id)?;
                let spectrum = haar_analyze(b);
                let bmo = local_carleson(&squared_coefficients(&spectrum))?.map(|_, q| q.sqrt())?;
                let alpha = spectrum
                    .coeffs
                    .map(|i, bi| (bi * 0.5 * t.relative_jump(i)).abs() * i.length().sqrt())?;
                let (terms, rhs) = match id {
                    CheckId::BilinearProduct => (
                        alpha.map(|i, a| a * t.u(i) * t.v(i))?,
                        bmo.map(|j, n| n * t.a2.get(j))?,
                    ),
                    CheckId::BilinearWeight => (
                        alpha.map(|i, a| a * t.u(i))?,
                        bmo.map(|j, n| n * t.a2.get(j) * t.u(j))?,
                    ),
                    _ => (
                        alpha.map(|i, a| a * t.v(i))?,
                        bmo.map(|j, n| n * t.a2.get(j) * t.v(j))?,
                    ),
                };
                (terms, rhs, c.bilinear)
            }
        };
        let sums = terms.subtree_sums();
        let lhs = sums.map(|j, s| s / j.length())?;
        Ok(CheckProfile {
            id,
            constant,
            pass_slack: c.pass_slack,
            lhs,
            rhs,
            witness: subtree_argmax(&terms),
        })
    }

    pub fn check(&self, id: CheckId, inputs: &CheckInputs<'_>, root: DyadicIndex) -> Result<CheckReport> {
        self.profile(id, inputs)?.report(root)
    }

    pub fn prop1_main(&self, w: &Weight, lam: &DyadicSequence, root: DyadicIndex) -> Result<CheckReport> {
        self.check(CheckId::Prop1, &CheckInputs::weight(w).with_carleson(lam), root)
    }

    pub fn prop1_consequence(&self, w: &Weight, lam: &DyadicSequence, root: DyadicIndex) -> Result<CheckReport> {
        self.check(CheckId::Prop1c, &CheckInputs::weight(w).with_carleson(lam), root)
    }

    /// The Carleson property of `{b_I^2}` needs no weight; a flat one is used.
    pub fn carleson_b(&self, b: &StepFunction, root: DyadicIndex) -> Result<CheckReport> {
        let w = Weight::constant(b.depth(), 1.0)?;
        self.check(CheckId::CarlesonB, &CheckInputs::weight(&w).with_symbol(b), root)
    }

    pub fn embedding(&self, b: &StepFunction, w: &Weight, root: DyadicIndex) -> Result<CheckReport> {
        self.check(CheckId::Embed, &CheckInputs::weight(w).with_symbol(b), root)
    }

    pub fn prop2(&self, w: &Weight, root: DyadicIndex) -> Result<CheckReport> {
        self.check(CheckId::Prop2, &CheckInputs::weight(w), root)
    }

    pub fn prop2_consequence(&self, w: &Weight, root: DyadicIndex) -> Result<CheckReport> {
        self.check(CheckId::Prop2c, &CheckInputs::weight(w), root)
    }

    pub fn prop3(&self, w: &Weight, root: DyadicIndex) -> Result<CheckReport> {
        self.check(CheckId::Prop3, &CheckInputs::weight(w), root)
    }

    pub fn prop3_essential(&self, w: &Weight, root: DyadicIndex) -> Result<CheckReport> {
        self.check(CheckId::Prop3e, &CheckInputs::weight(w), root)
    }

    pub fn wittwer(&self, w: &Weight, root: DyadicIndex) -> Result<CheckReport> {
        self.check(CheckId::Wittwer, &CheckInputs::weight(w), root)
    }

    pub fn bilinear(&self, b: &StepFunction, w: &Weight, root: DyadicIndex) -> Result<[CheckReport; 3]> {
        let inputs = CheckInputs::weight(w).with_symbol(b);
        Ok([
            self.check(CheckId::BilinearProduct, &inputs, root)?,
            self.check(CheckId::BilinearWeight, &inputs, root)?,
            self.check(CheckId::BilinearDual, &inputs, root)?,
        ])
    }
}

/// Bottom-up maximum of `f` over all intervals of `D(J)` down to level
/// `depth` inclusive, reported for every `J` with `level < depth`.
fn local_max(depth: u32, f: impl Fn(DyadicIndex) -> f64) -> DyadicSequence {
    let mut below: Vec<f64> = (0..(1usize << depth))
        .map(|k| f(DyadicIndex::new(depth, k)))
        .collect();
    let mut out = vec![0.0; (1usize << depth) - 1];
    for level in (0..depth).rev() {
        let start = (1usize << level) - 1;
        let here: Vec<f64> = (0..(1usize << level))
            .map(|k| {
                f(DyadicIndex::new(level, k))
                    .max(below[2 * k])
                    .max(below[2 * k + 1])
            })
            .collect();
        out[start..start + here.len()].copy_from_slice(&here);
        below = here;
    }
    DyadicSequence::from_entries(depth, out).expect("maxima of finite values are finite")
}

/// `[w]_A2` restricted to `D(J)`, single cells included.
pub fn local_a2(w: &Weight) -> DyadicSequence {
    local_max(w.depth(), |i| w.mean(i) * w.inv_mean(i))
}

/// The Carleson constant of `seq` restricted to `D(J)`, for every `J`.
pub fn local_carleson(seq: &DyadicSequence) -> Result<DyadicSequence> {
    let sums = seq.subtree_sums();
    let depth = seq.depth();
    // cells carry no entries; their contribution is the neutral 0
    Ok(local_max(depth, |i| if i.level == depth { 0.0 } else { sums.get(i) / i.length() }))
}

fn subtree_argmax(terms: &DyadicSequence) -> Vec<DyadicIndex> {
    let depth = terms.depth();
    let mut best: Vec<(f64, DyadicIndex)> = terms.iter().map(|(i, v)| (v, i)).collect();
    for level in (0..depth.saturating_sub(1)).rev() {
        for k in 0..(1usize << level) {
            let i = DyadicIndex::new(level, k);
            for child in [i.left_child(), i.right_child()] {
                let c = best[child.heap_index()];
                if c.0 > best[i.heap_index()].0 {
                    best[i.heap_index()] = c;
                }
            }
        }
    }
    best.into_iter().map(|(_, i)| i).collect()
}

/// Ordinary least-squares slope of `ln y` against `ln x`. `None` with fewer
/// than two distinct `x`, or any nonpositive coordinate.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    // distinct abscissae leave sxx well above rounding
    if !(sxx > 1e-24) {
        return None;
    }
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightFamily {
    /// `x^alpha`, parameter `alpha` in `(-1, 1)`.
    Power,
    /// Multiplicative cascade, parameter `delta` in `[0, 1)`.
    Cascade,
}

impl WeightFamily {
    pub fn generate(&self, param: f64, depth: u32, seed: u64) -> Result<Weight> {
        match self {
            WeightFamily::Power => gen_power_weight(param, depth),
            WeightFamily::Cascade => gen_cascade_weight(depth, param, seed),
        }
    }
}

impl FromStr for WeightFamily {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(WeightFamily::Power),
            "cascade" => Ok(WeightFamily::Cascade),
            other => Err(DyadicError::domain(format!("unknown weight family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub family: WeightFamily,
    pub params: Vec<f64>,
    pub depth: u32,
    pub seed: u64,
    pub symbol: SymbolKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub param: f64,
    pub a2: f64,
    pub bmo: f64,
    pub norm: f64,
    /// `norm / (a2 * bmo)`.
    pub ratio: f64,
    /// Log-log slope fitted over this record and all earlier ones.
    pub slope_so_far: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Sorted by `a2`; ties keep parameter order.
    pub records: Vec<ScanRecord>,
    pub slope: Option<f64>,
    /// `max ratio / min ratio`.
    pub ratio_spread: f64,
}

impl ScanResult {
    pub fn within(&self, limits: &ScanConstants) -> bool {
        self.slope.is_some_and(|s| s <= limits.max_slope) && self.ratio_spread <= limits.max_ratio_spread
    }
}

/// Generates one weight per parameter (in parallel), estimates
/// `||pi_b||_{L2(w)}` for the fixed symbol and fits `ln norm` against
/// `ln [w]_A2`.
pub fn scan_norm_vs_a2(spec: &ScanSpec, opts: &PowerIteration) -> Result<ScanResult> {
    if spec.params.is_empty() {
        return Err(DyadicError::domain("scan needs at least one parameter"));
    }
    let b = gen_bmo_symbol(spec.symbol, spec.depth, spec.seed)?;
    let bmo = bmo_norm_carleson(&b);
    let mut records = spec
        .params
        .par_iter()
        .map(|&param| {
            let w = spec.family.generate(param, spec.depth, spec.seed)?;
            let a2 = crate::weights::a2_characteristic(&w).value;
            let norm = weighted_operator_norm(&b, &w, opts)?.norm;
            let ratio = if norm == 0.0 { 0.0 } else { norm / (a2 * bmo) };
            Ok(ScanRecord { param, a2, bmo, norm, ratio, slope_so_far: None })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.a2.total_cmp(&b.a2));

    let points: Vec<(f64, f64)> = records.iter().map(|r| (r.a2, r.norm)).collect();
    for k in 0..records.len() {
        records[k].slope_so_far = log_log_slope(&points[..=k]);
    }
    let slope = log_log_slope(&points);
    let max = records.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = records.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let ratio_spread = if min > 0.0 { max / min } else { f64::INFINITY };
    Ok(ScanResult { records, slope, ratio_spread })
}

/// `||pi_b||_{L2} / ||b||_BMO` on the unweighted space; `0` for constant `b`.
pub fn unweighted_constant(b: &StepFunction, opts: &PowerIteration) -> Result<f64> {
    let bmo = bmo_norm_carleson(b);
    if bmo == 0.0 {
        return Ok(0.0);
    }
    let w = Weight::constant(b.depth(), 1.0)?;
    Ok(weighted_operator_norm(b, &w, opts)?.norm / bmo)
}
