//! Weights, BMO symbols and the functionals measuring them: the dyadic `A2`
//! characteristic, the BMO norm in its oscillation and Carleson forms, and
//! Carleson constants of interval sequences. Also the seeded generators for
//! the test families (power weights, multiplicative cascades, BMO symbols).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};
use crate::grid::{
    haar_analyze, haar_synthesize, AveragePyramid, DyadicIndex, DyadicSequence, HaarSpectrum,
    StepFunction,
};
use crate::seeded_rng;

/// A strictly positive step function together with the average pyramids of
/// `w` and of its pointwise reciprocal.
#[derive(Debug, Clone)]
pub struct Weight {
    values: StepFunction,
    reciprocal: StepFunction,
    avg: AveragePyramid,
    inv_avg: AveragePyramid,
}

impl Weight {
    pub fn new(values: StepFunction) -> Result<Self> {
        if let Some(k) = values.values().iter().position(|&v| v <= 0.0) {
            return Err(DyadicError::domain(format!(
                "weight must be strictly positive; cell {k} holds {}",
                values.values()[k]
            )));
        }
        let reciprocal = values.map(|v| 1.0 / v)?;
        let avg = AveragePyramid::new(&values);
        let inv_avg = AveragePyramid::new(&reciprocal);
        Ok(Weight {
            values,
            reciprocal,
            avg,
            inv_avg,
        })
    }

    pub fn constant(depth: u32, c: f64) -> Result<Self> {
        Weight::new(StepFunction::constant(depth, c)?)
    }

    pub fn depth(&self) -> u32 {
        self.values.depth()
    }

    pub fn values(&self) -> &StepFunction {
        &self.values
    }

    /// `w^-1` as a step function.
    pub fn reciprocal_values(&self) -> &StepFunction {
        &self.reciprocal
    }

    /// `m_I w`; panics if `interval` is off the grid.
    pub fn mean(&self, interval: DyadicIndex) -> f64 {
        self.avg.get(interval)
    }

    /// `m_I w^-1`; panics if `interval` is off the grid.
    pub fn inv_mean(&self, interval: DyadicIndex) -> f64 {
        self.inv_avg.get(interval)
    }

    pub fn averages(&self) -> &AveragePyramid {
        &self.avg
    }

    pub fn inverse_averages(&self) -> &AveragePyramid {
        &self.inv_avg
    }

    /// The weight `w^-1`.
    pub fn inverse(&self) -> Weight {
        Weight {
            values: self.reciprocal.clone(),
            reciprocal: self.values.clone(),
            avg: self.inv_avg.clone(),
            inv_avg: self.avg.clone(),
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Weight> {
        Weight::new(self.values.scale(c)?)
    }

    /// `w` on `root`, re-rooted to `[0, 1)`.
    pub fn restrict(&self, root: DyadicIndex) -> Result<Weight> {
        Weight::new(self.values.restrict(root)?)
    }

    pub fn sqrt(&self) -> StepFunction {
        self.values.map(f64::sqrt).expect("sqrt of a positive weight is finite")
    }

    pub fn inv_sqrt(&self) -> StepFunction {
        self.reciprocal
            .map(f64::sqrt)
            .expect("sqrt of a positive weight is finite")
    }
}

/// Supremum of a functional over grid intervals together with where it is
/// attained (the first maximizer in heap order).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Supremum {
    pub value: f64,
    pub argmax: DyadicIndex,
}

fn supremum(depth_inclusive: u32, f: impl Fn(DyadicIndex) -> f64) -> Supremum {
    let mut best = Supremum {
        value: f(DyadicIndex::ROOT),
        argmax: DyadicIndex::ROOT,
    };
    for i in DyadicIndex::all_below(depth_inclusive + 1).skip(1) {
        let v = f(i);
        if v > best.value {
            best = Supremum { value: v, argmax: i };
        }
    }
    best
}

/// `max_I m_I w * m_I w^-1` over every grid interval, single cells included.
pub fn a2_characteristic(w: &Weight) -> Supremum {
    supremum(w.depth(), |i| w.mean(i) * w.inv_mean(i))
}

/// `max_J (1/|J|) sum_{I in D(J)} s(I)`.
pub fn carleson_sup(seq: &DyadicSequence) -> Result<Supremum> {
    if let Some((i, v)) = seq.iter().find(|(_, v)| *v < 0.0) {
        return Err(DyadicError::domain(format!(
            "Carleson sequences are nonnegative; entry at {i} is {v}"
        )));
    }
    let sums = seq.subtree_sums();
    Ok(supremum(seq.depth() - 1, |j| sums.get(j) / j.length()))
}

pub fn carleson_constant(seq: &DyadicSequence) -> Result<f64> {
    carleson_sup(seq).map(|s| s.value)
}

/// The squared Haar coefficients `{b_I^2}` of a symbol.
pub fn squared_coefficients(spectrum: &HaarSpectrum) -> DyadicSequence {
    spectrum
        .coeffs
        .map(|_, c| c * c)
        .expect("squares of finite coefficients are finite")
}

/// BMO norm from the Carleson constant of `{b_I^2}`, with the maximizing `J`.
pub fn bmo_carleson_sup(b: &StepFunction) -> Supremum {
    let sq = squared_coefficients(&haar_analyze(b));
    let sup = carleson_sup(&sq).expect("squares are nonnegative");
    Supremum {
        value: sup.value.sqrt(),
        argmax: sup.argmax,
    }
}

pub fn bmo_norm_carleson(b: &StepFunction) -> f64 {
    bmo_carleson_sup(b).value
}

/// BMO norm as the largest mean-square oscillation `(1/|I|) int_I |b - m_I b|^2`,
/// computed cell by cell for every interval.
pub fn bmo_norm_oscillation(b: &StepFunction) -> f64 {
    let depth = b.depth();
    let pyramid = AveragePyramid::new(b);
    let values = b.values();
    let mut best = 0.0f64;
    for level in 0..depth {
        for position in 0..(1usize << level) {
            let i = DyadicIndex::new(level, position);
            let m = pyramid.get(i);
            let cells = &values[i.cells(depth)];
            let osc = cells.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / cells.len() as f64;
            best = best.max(osc);
        }
    }
    best.sqrt()
}

/// Exact cell averages of `x^alpha`, `-1 < alpha < 1`.
pub fn gen_power_weight(alpha: f64, depth: u32) -> Result<Weight> {
    if !(alpha.abs() < 1.0) {
        return Err(DyadicError::domain(format!(
            "power weight needs |alpha| < 1, got {alpha}"
        )));
    }
    let p = alpha + 1.0;
    let values = StepFunction::from_cell_averages(depth, |a, b| {
        if a == 0.0 {
            b.powf(alpha) / p
        } else {
            // b^p - a^p without cancellation
            a.powf(p) * (p * ((b - a) / a).ln_1p()).exp_m1() / (p * (b - a))
        }
    })?;
    Weight::new(values)
}

/// Multiplicative martingale cascade: starting from `m_[0,1) w = 1`, each
/// interval splits its mean as `m_{I+} w = m_I w (1 + e_I)` and
/// `m_{I-} w = m_I w (1 - e_I)` with `e_I` uniform on `[-delta, delta]`.
/// Draws happen level by level, left to right.
pub fn gen_cascade_weight(depth: u32, delta: f64, seed: u64) -> Result<Weight> {
    if !(0.0..1.0).contains(&delta) {
        return Err(DyadicError::domain(format!(
            "cascade needs 0 <= delta < 1, got {delta}"
        )));
    }
    DyadicSequence::zeros(depth)?;
    let mut rng = seeded_rng(seed);
    let mut current = vec![1.0f64];
    for _ in 0..depth {
        current = current
            .iter()
            .flat_map(|&m| {
                let e = delta * (2.0 * rng.random::<f64>() - 1.0);
                [m * (1.0 + e), m * (1.0 - e)]
            })
            .collect();
    }
    Weight::new(StepFunction::new(depth, current)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    /// `b = h_[0,1)`.
    SingleHaar,
    /// `b_I = sqrt|I|` along `[0,1) > [0,1/2) > [0,1/4) > ...`, zero elsewhere.
    DyadicLog,
    /// Random Haar coefficients rescaled to unit BMO norm.
    RandomNormalized,
}

impl SymbolKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymbolKind::SingleHaar => "single-haar",
            SymbolKind::DyadicLog => "dyadic-log",
            SymbolKind::RandomNormalized => "random-normalized",
        }
    }
}

impl std::str::FromStr for SymbolKind {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self> {
        [SymbolKind::SingleHaar, SymbolKind::DyadicLog, SymbolKind::RandomNormalized]
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| DyadicError::domain(format!("unknown symbol kind {s:?}")))
    }
}

pub fn gen_bmo_symbol(kind: SymbolKind, depth: u32, seed: u64) -> Result<StepFunction> {
    let mut coeffs = DyadicSequence::zeros(depth)?;
    match kind {
        SymbolKind::SingleHaar => coeffs.set(DyadicIndex::ROOT, 1.0),
        SymbolKind::DyadicLog => {
            for level in 0..depth {
                let i = DyadicIndex::new(level, 0);
                coeffs.set(i, i.length().sqrt());
            }
        }
        SymbolKind::RandomNormalized => {
            let mut rng = seeded_rng(seed);
            coeffs = DyadicSequence::from_fn(depth, |i| {
                i.length().sqrt() * (2.0 * rng.random::<f64>() - 1.0)
            })?;
            // guarantees a nonzero symbol even in the degenerate all-zero draw
            if coeffs.sum_of_squares() == 0.0 {
                coeffs.set(DyadicIndex::ROOT, 1.0);
            }
            let q = carleson_constant(&coeffs.map(|_, c| c * c)?)?;
            let scale = 1.0 / q.sqrt();
            coeffs = coeffs.map(|_, c| c * scale)?;
        }
    }
    Ok(haar_synthesize(&HaarSpectrum { mean: 0.0, coeffs }))
}
