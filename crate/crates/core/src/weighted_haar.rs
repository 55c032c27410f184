//! The weighted Haar system `H_I^w = h_I sqrt|I| - A_I^w 1_I`, whose
//! disbalance coefficient `A_I^w = (m_{I+} w - m_{I-} w) / (2 m_I w)` makes
//! `H_I^w` mean-zero against `w`. The functions `w^{1/2} H_I^w` are then
//! orthogonal in unweighted `L2` with `||w^{1/2} H_I^w||^2 = |I| m_I w (1 - A^2)`.

use crate::error::Result;
use crate::grid::{AveragePyramid, DyadicIndex, DyadicSequence, StepFunction};
use crate::weights::Weight;

pub fn disbalance(w: &Weight, interval: DyadicIndex) -> Result<f64> {
    interval.validate_parent(w.depth())?;
    Ok(disbalance_unchecked(w, interval))
}

pub(crate) fn disbalance_unchecked(w: &Weight, i: DyadicIndex) -> f64 {
    (w.mean(i.left_child()) - w.mean(i.right_child())) / (2.0 * w.mean(i))
}

/// `A_I^w` for every interval with children.
pub fn disbalances(w: &Weight) -> DyadicSequence {
    DyadicSequence::from_fn(w.depth(), |i| disbalance_unchecked(w, i))
        .expect("disbalances of a positive weight are finite")
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHaarFunction {
    pub interval: DyadicIndex,
    pub disbalance: f64,
    pub representation: StepFunction,
}

impl WeightedHaarFunction {
    /// `int_I H_I^w w`, which vanishes up to rounding.
    pub fn weighted_mean(&self, w: &Weight) -> Result<f64> {
        self.representation.inner(w.values())
    }

    /// `||w^{1/2} H_I^w||^2` by direct integration.
    pub fn weighted_norm_sq(&self, w: &Weight) -> Result<f64> {
        let sq = self.representation.mul(&self.representation)?;
        sq.inner(w.values())
    }
}

pub fn weighted_haar(w: &Weight, interval: DyadicIndex) -> Result<WeightedHaarFunction> {
    let a = disbalance(w, interval)?;
    let depth = w.depth();
    let cells = interval.cells(depth);
    let mid = cells.start + cells.len() / 2;
    let mut values = vec![0.0; 1usize << depth];
    values[cells.start..mid].fill(1.0 - a);
    values[mid..cells.end].fill(-1.0 - a);
    Ok(WeightedHaarFunction {
        interval,
        disbalance: a,
        representation: StepFunction::new(depth, values)?,
    })
}

/// The exact value `|I| m_I w (1 - (A_I^w)^2)` of `||w^{1/2} H_I^w||^2`.
pub fn weighted_haar_norm_sq(w: &Weight, interval: DyadicIndex) -> Result<f64> {
    let a = disbalance(w, interval)?;
    Ok(interval.length() * w.mean(interval) * (1.0 - a * a))
}

/// `<g, w^{1/2} H_I^w>` for every interval, integrating `g w^{1/2}` over the
/// two halves of `I` against the values `1 - A` and `-1 - A`.
pub fn weighted_haar_pairings(w: &Weight, g: &StepFunction) -> Result<DyadicSequence> {
    w.values().same_depth(g)?;
    let gw = g.mul(&w.sqrt())?;
    let p = AveragePyramid::new(&gw);
    DyadicSequence::from_fn(w.depth(), |i| {
        let a = disbalance_unchecked(w, i);
        let half = 0.5 * i.length();
        let plus = half * p.get(i.left_child());
        let minus = half * p.get(i.right_child());
        (1.0 - a) * plus - (1.0 + a) * minus
    })
}

/// `sum_I (|I| m_I w)^-1 <g, w^{1/2} H_I^w>^2`, at most `||g||^2`.
pub fn bessel_sum(w: &Weight, g: &StepFunction) -> Result<f64> {
    let pairings = weighted_haar_pairings(w, g)?;
    Ok(pairings
        .iter()
        .map(|(i, c)| c * c / (i.length() * w.mean(i)))
        .sum())
}
