//! Finite dyadic grid over `[0, 1)`.
//!
//! A grid of depth `N` has finest cells `[k 2^-N, (k+1) 2^-N)`. Every
//! function lives on those cells as its exact cell averages, so averages over
//! grid intervals and Haar coefficients are exact grid quantities.
//!
//! Intervals are addressed by `(level, position)`. Sequences indexed by
//! intervals are stored in heap order: level `j`, position `k` maps to slot
//! `2^j - 1 + k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DyadicError, Result};

/// Largest grid depth accepted anywhere in the crate.
pub const MAX_DEPTH: u32 = 24;

/// The dyadic interval `[k 2^-j, (k+1) 2^-j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub level: u32,
    pub position: usize,
}

impl DyadicIndex {
    pub const ROOT: DyadicIndex = DyadicIndex {
        level: 0,
        position: 0,
    };

    /// Unchecked constructor; use [`DyadicIndex::checked`] to validate
    /// against a grid.
    pub const fn new(level: u32, position: usize) -> Self {
        DyadicIndex { level, position }
    }

    /// Validates `0 <= position < 2^level` and `level <= depth`.
    pub fn checked(level: u32, position: usize, depth: u32) -> Result<Self> {
        let idx = DyadicIndex { level, position };
        idx.validate(depth)?;
        Ok(idx)
    }

    pub fn validate(&self, depth: u32) -> Result<()> {
        if self.level > depth || self.level > MAX_DEPTH || self.position >= (1usize << self.level) {
            return Err(DyadicError::InvalidInterval {
                level: self.level,
                position: self.position,
                depth,
            });
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate), additionally requiring children on
    /// the grid (`level < depth`).
    pub fn validate_parent(&self, depth: u32) -> Result<()> {
        self.validate(depth)?;
        if self.level >= depth {
            return Err(DyadicError::NoChildren(*self));
        }
        Ok(())
    }

    /// `|I| = 2^-level`.
    pub fn length(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn left(&self) -> f64 {
        self.position as f64 * self.length()
    }

    pub fn right(&self) -> f64 {
        (self.position + 1) as f64 * self.length()
    }

    /// Left half `I+`.
    pub fn left_child(&self) -> Self {
        DyadicIndex::new(self.level + 1, 2 * self.position)
    }

    /// Right half `I-`.
    pub fn right_child(&self) -> Self {
        DyadicIndex::new(self.level + 1, 2 * self.position + 1)
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| DyadicIndex::new(self.level - 1, self.position / 2))
    }

    /// Whether `other` is contained in `self`.
    pub fn contains(&self, other: &DyadicIndex) -> bool {
        other.level >= self.level && other.position >> (other.level - self.level) == self.position
    }

    /// Range of finest cells covered at grid depth `depth`.
    pub fn cells(&self, depth: u32) -> std::ops::Range<usize> {
        let shift = depth - self.level;
        (self.position << shift)..((self.position + 1) << shift)
    }

    /// Slot of this interval in heap-ordered storage.
    pub fn heap_index(&self) -> usize {
        (1usize << self.level) - 1 + self.position
    }

    pub fn from_heap_index(slot: usize) -> Self {
        let level = (slot + 1).ilog2();
        DyadicIndex::new(level, slot + 1 - (1usize << level))
    }

    /// Re-expresses `self` relative to an ancestor `root`, which becomes `[0, 1)`.
    pub fn relative_to(&self, root: &DyadicIndex) -> Option<Self> {
        if !root.contains(self) {
            return None;
        }
        let rel_level = self.level - root.level;
        let offset = root.position << rel_level;
        Some(DyadicIndex::new(rel_level, self.position - offset))
    }

    /// All intervals with `level < max_level`, in heap order.
    pub fn all_below(max_level: u32) -> impl Iterator<Item = DyadicIndex> {
        (0..(1usize << max_level) - 1).map(DyadicIndex::from_heap_index)
    }
}

impl fmt::Display for DyadicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}/2^{}, {}/2^{})",
            self.position,
            self.level,
            self.position + 1,
            self.level
        )
    }
}

fn check_depth(depth: u32) -> Result<()> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(DyadicError::InvalidStepFunction(format!(
            "depth must lie in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    Ok(())
}

/// A function constant on each of the `2^depth` finest cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepFunction")]
pub struct StepFunction {
    depth: u32,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStepFunction {
    depth: u32,
    values: Vec<f64>,
}

impl TryFrom<RawStepFunction> for StepFunction {
    type Error = DyadicError;

    fn try_from(raw: RawStepFunction) -> Result<Self> {
        StepFunction::new(raw.depth, raw.values)
    }
}

impl StepFunction {
    pub fn new(depth: u32, values: Vec<f64>) -> Result<Self> {
        check_depth(depth)?;
        if values.len() != 1usize << depth {
            return Err(DyadicError::InvalidStepFunction(format!(
                "depth {depth} needs {} values, got {}",
                1usize << depth,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(DyadicError::InvalidStepFunction(format!(
                "value at cell {i} is not finite"
            )));
        }
        Ok(StepFunction { depth, values })
    }

    pub fn constant(depth: u32, c: f64) -> Result<Self> {
        check_depth(depth)?;
        StepFunction::new(depth, vec![c; 1usize << depth])
    }

    /// Cell averages of `g` computed by the caller-supplied cell integrator
    /// `cell(a, b)`, which must return the average of `g` over `[a, b)`.
    pub fn from_cell_averages(depth: u32, cell: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_depth(depth)?;
        let n = 1usize << depth;
        let h = 1.0 / n as f64;
        let values = (0..n).map(|k| cell(k as f64 * h, (k + 1) as f64 * h)).collect();
        StepFunction::new(depth, values)
    }

    pub fn indicator(depth: u32, interval: DyadicIndex) -> Result<Self> {
        interval.validate(depth)?;
        let mut values = vec![0.0; 1usize << depth];
        for v in &mut values[interval.cells(depth)] {
            *v = 1.0;
        }
        StepFunction::new(depth, values)
    }

    /// `h_I` sampled on the grid.
    pub fn haar(depth: u32, interval: DyadicIndex) -> Result<Self> {
        interval.validate_parent(depth)?;
        let amp = 1.0 / interval.length().sqrt();
        let mut values = vec![0.0; 1usize << depth];
        let cells = interval.cells(depth);
        let mid = cells.start + cells.len() / 2;
        for (k, v) in values.iter_mut().enumerate().take(cells.end).skip(cells.start) {
            *v = if k < mid { amp } else { -amp };
        }
        StepFunction::new(depth, values)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Width of a finest cell, `2^-depth`.
    pub fn cell_width(&self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    /// `2^-N * sum(values)`, summed left to right.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_width()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.cell_width()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unweighted `L2` pairing.
    pub fn inner(&self, other: &StepFunction) -> Result<f64> {
        self.same_depth(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.cell_width())
    }

    /// Direct mean of the cells covered by `interval`.
    pub fn average(&self, interval: DyadicIndex) -> Result<f64> {
        interval.validate(self.depth)?;
        let cells = &self.values[interval.cells(self.depth)];
        Ok(cells.iter().sum::<f64>() / cells.len() as f64)
    }

    /// `<f, h_I>` through the two child averages.
    pub fn haar_coefficient(&self, interval: DyadicIndex) -> Result<f64> {
        interval.validate_parent(self.depth)?;
        let plus = self.average(interval.left_child())?;
        let minus = self.average(interval.right_child())?;
        Ok(0.5 * interval.length().sqrt() * (plus - minus))
    }

    pub fn same_depth(&self, other: &StepFunction) -> Result<()> {
        if self.depth != other.depth {
            return Err(DyadicError::DepthMismatch {
                expected: self.depth,
                found: other.depth,
            });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<StepFunction> {
        StepFunction::new(self.depth, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        self.same_depth(other)?;
        StepFunction::new(
            self.depth,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Result<StepFunction> {
        self.map(|v| c * v)
    }

    /// The part of `self` on `root`, rescaled so that `root` becomes `[0, 1)`.
    pub fn restrict(&self, root: DyadicIndex) -> Result<StepFunction> {
        root.validate(self.depth)?;
        if root.level == self.depth {
            return Err(DyadicError::domain(
                "cannot re-root a grid at a finest cell",
            ));
        }
        StepFunction::new(
            self.depth - root.level,
            self.values[root.cells(self.depth)].to_vec(),
        )
    }

    /// Cell averages on the grid one level coarser.
    pub fn coarsen(&self) -> Result<StepFunction> {
        if self.depth == 1 {
            return Err(DyadicError::domain("depth-1 function cannot be coarsened"));
        }
        StepFunction::new(
            self.depth - 1,
            self.values.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect(),
        )
    }
}

/// Averages over every grid interval, levels `0..=depth`, built bottom-up by
/// pairwise halving. Two-scale consistency `m_I = (m_{I+} + m_{I-}) / 2`
/// therefore holds bit for bit.
#[derive(Debug, Clone)]
pub struct AveragePyramid {
    depth: u32,
    data: Vec<f64>,
}

impl AveragePyramid {
    pub fn new(f: &StepFunction) -> Self {
        let depth = f.depth;
        let n = 1usize << depth;
        let mut data = vec![0.0; 2 * n - 1];
        data[n - 1..].copy_from_slice(&f.values);
        for level in (0..depth).rev() {
            let start = (1usize << level) - 1;
            let child_start = (1usize << (level + 1)) - 1;
            for k in 0..(1usize << level) {
                data[start + k] = 0.5 * (data[child_start + 2 * k] + data[child_start + 2 * k + 1]);
            }
        }
        AveragePyramid { depth, data }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `m_I f`; panics if `interval` is off the grid.
    pub fn get(&self, interval: DyadicIndex) -> f64 {
        debug_assert!(interval.level <= self.depth);
        self.data[interval.heap_index()]
    }

    pub fn average(&self, interval: DyadicIndex) -> Result<f64> {
        interval.validate(self.depth)?;
        Ok(self.get(interval))
    }

    /// `<f, h_I>` for `level < depth`; panics otherwise.
    pub fn haar_coefficient(&self, interval: DyadicIndex) -> f64 {
        0.5 * interval.length().sqrt()
            * (self.get(interval.left_child()) - self.get(interval.right_child()))
    }

    pub fn mean(&self) -> f64 {
        self.data[0]
    }
}

/// A real number per grid interval with `level < depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicSequence {
    depth: u32,
    entries: Vec<f64>,
}

impl DyadicSequence {
    pub fn zeros(depth: u32) -> Result<Self> {
        check_depth(depth)?;
        Ok(DyadicSequence {
            depth,
            entries: vec![0.0; (1usize << depth) - 1],
        })
    }

    pub fn from_fn(depth: u32, mut f: impl FnMut(DyadicIndex) -> f64) -> Result<Self> {
        let mut seq = DyadicSequence::zeros(depth)?;
        for (slot, e) in seq.entries.iter_mut().enumerate() {
            *e = f(DyadicIndex::from_heap_index(slot));
        }
        seq.check_finite()?;
        Ok(seq)
    }

    /// Entries in heap order; length must be `2^depth - 1`.
    pub fn from_entries(depth: u32, entries: Vec<f64>) -> Result<Self> {
        check_depth(depth)?;
        if entries.len() != (1usize << depth) - 1 {
            return Err(DyadicError::InvalidStepFunction(format!(
                "depth {depth} sequence needs {} entries, got {}",
                (1usize << depth) - 1,
                entries.len()
            )));
        }
        let seq = DyadicSequence { depth, entries };
        seq.check_finite()?;
        Ok(seq)
    }

    fn check_finite(&self) -> Result<()> {
        if let Some(slot) = self.entries.iter().position(|v| !v.is_finite()) {
            return Err(DyadicError::domain(format!(
                "sequence entry at {} is not finite",
                DyadicIndex::from_heap_index(slot)
            )));
        }
        Ok(())
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Panics if `interval.level >= depth`.
    pub fn get(&self, interval: DyadicIndex) -> f64 {
        self.entries[interval.heap_index()]
    }

    pub fn set(&mut self, interval: DyadicIndex, value: f64) {
        self.entries[interval.heap_index()] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (DyadicIndex, f64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(|(slot, &v)| (DyadicIndex::from_heap_index(slot), v))
    }

    pub fn map(&self, f: impl Fn(DyadicIndex, f64) -> f64) -> Result<DyadicSequence> {
        DyadicSequence::from_fn(self.depth, |i| f(i, self.get(i)))
    }

    /// `S(J) = sum over I in D(J) of s(I)` for every `J`, in one bottom-up pass.
    pub fn subtree_sums(&self) -> DyadicSequence {
        let mut sums = self.entries.clone();
        for level in (0..self.depth.saturating_sub(1)).rev() {
            let start = (1usize << level) - 1;
            let child_start = (1usize << (level + 1)) - 1;
            for k in 0..(1usize << level) {
                sums[start + k] += sums[child_start + 2 * k] + sums[child_start + 2 * k + 1];
            }
        }
        DyadicSequence {
            depth: self.depth,
            entries: sums,
        }
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    /// The entries on `D(root)`, relabelled with `root` as `[0, 1)` and
    /// divided by `|root|` so that normalized sums are preserved.
    pub fn restrict(&self, root: DyadicIndex) -> Result<DyadicSequence> {
        root.validate_parent(self.depth)?;
        let scale = root.length();
        DyadicSequence::from_fn(self.depth - root.level, |rel| {
            let abs = DyadicIndex::new(
                root.level + rel.level,
                (root.position << rel.level) + rel.position,
            );
            self.get(abs) / scale
        })
    }
}

/// Global mean plus every Haar coefficient of a step function.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarSpectrum {
    pub mean: f64,
    pub coeffs: DyadicSequence,
}

impl HaarSpectrum {
    pub fn depth(&self) -> u32 {
        self.coeffs.depth()
    }
}

/// One bottom-up pass producing all averages and Haar coefficients.
pub fn haar_analyze(f: &StepFunction) -> HaarSpectrum {
    let pyramid = AveragePyramid::new(f);
    haar_analyze_pyramid(&pyramid)
}

pub(crate) fn haar_analyze_pyramid(pyramid: &AveragePyramid) -> HaarSpectrum {
    let depth = pyramid.depth();
    let entries = DyadicIndex::all_below(depth)
        .map(|i| pyramid.haar_coefficient(i))
        .collect();
    HaarSpectrum {
        mean: pyramid.mean(),
        coeffs: DyadicSequence { depth, entries },
    }
}

/// `mean * 1 + sum_I c_I h_I` on the finest cells, top-down.
pub fn haar_synthesize(spectrum: &HaarSpectrum) -> StepFunction {
    let depth = spectrum.depth();
    let mut current = vec![spectrum.mean];
    for level in 0..depth {
        let inv_sqrt_len = (level as f64 * 0.5).exp2();
        let start = (1usize << level) - 1;
        let coeffs = &spectrum.coeffs.entries()[start..start + (1usize << level)];
        current = current
            .iter()
            .zip(coeffs)
            .flat_map(|(&parent, &c)| {
                let d = c * inv_sqrt_len;
                [parent + d, parent - d]
            })
            .collect();
    }
    StepFunction { depth, values: current }
}

/// `sum_I c_I 1_I` evaluated on the finest cells, for a sequence on
/// levels `< depth`.
pub(crate) fn accumulate_indicators(seq: &DyadicSequence) -> Vec<f64> {
    let depth = seq.depth();
    let mut current = vec![0.0];
    for level in 0..depth {
        let start = (1usize << level) - 1;
        let row = &seq.entries()[start..start + (1usize << level)];
        current = current
            .iter()
            .zip(row)
            .flat_map(|(&acc, &c)| [acc + c, acc + c])
            .collect();
    }
    current
}
