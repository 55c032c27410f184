//! The dyadic paraproduct `pi_b f = sum_I m_I f b_I h_I`, its behaviour on
//! `L2(w)`, and the split of the dual pairing
//! `<pi_b(f w^-1/2), g w^1/2>` into the weighted-Haar part and the
//! disbalance part.
//!
//! Operator norms on `L2(w)` go through the similarity transform
//! `T f = w^{1/2} pi_b(w^{-1/2} f)`, which is unitarily equivalent to `pi_b`
//! on `L2(w)`, followed by power iteration on `T*T`. Each application costs
//! `O(2^N)`.

use rand::Rng;
use serde::Serialize;

use crate::config::NormConstants;
use crate::error::{DyadicError, Result};
use crate::grid::{
    accumulate_indicators, haar_analyze, haar_synthesize, AveragePyramid, DyadicIndex,
    DyadicSequence, HaarSpectrum, StepFunction,
};
use crate::seeded_rng;
use crate::weighted_haar::{disbalance_unchecked, weighted_haar_pairings};
use crate::weights::{a2_characteristic, bmo_norm_carleson, Weight};

#[derive(Debug, Clone)]
pub struct ParaproductOperator {
    symbol: StepFunction,
    spectrum: HaarSpectrum,
}

impl ParaproductOperator {
    pub fn new(symbol: StepFunction) -> Self {
        let spectrum = haar_analyze(&symbol);
        ParaproductOperator { symbol, spectrum }
    }

    pub fn depth(&self) -> u32 {
        self.symbol.depth()
    }

    pub fn symbol(&self) -> &StepFunction {
        &self.symbol
    }

    pub fn spectrum(&self) -> &HaarSpectrum {
        &self.spectrum
    }

    /// `pi_b f`: one pyramid pass for the averages, one synthesis pass.
    pub fn apply(&self, f: &StepFunction) -> Result<StepFunction> {
        self.symbol.same_depth(f)?;
        let averages = AveragePyramid::new(f);
        let coeffs = self.spectrum.coeffs.map(|i, b| averages.get(i) * b)?;
        Ok(haar_synthesize(&HaarSpectrum { mean: 0.0, coeffs }))
    }

    /// `pi_b^* g = sum_I b_I <g, h_I> 1_I / |I|`.
    pub(crate) fn apply_adjoint(&self, g: &StepFunction) -> Result<StepFunction> {
        self.symbol.same_depth(g)?;
        let gs = haar_analyze(g);
        let weights = DyadicSequence::from_fn(self.depth(), |i| {
            self.spectrum.coeffs.get(i) * gs.coeffs.get(i) / i.length()
        })?;
        StepFunction::new(self.depth(), accumulate_indicators(&weights))
    }
}

/// `f -> w^{1/2} pi_b(w^{-1/2} f)` on unweighted `L2`.
#[derive(Debug, Clone)]
pub struct WeightedParaproduct {
    op: ParaproductOperator,
    sqrt_w: StepFunction,
    inv_sqrt_w: StepFunction,
}

impl WeightedParaproduct {
    pub fn new(b: &StepFunction, w: &Weight) -> Result<Self> {
        b.same_depth(w.values())?;
        Ok(WeightedParaproduct {
            op: ParaproductOperator::new(b.clone()),
            sqrt_w: w.sqrt(),
            inv_sqrt_w: w.inv_sqrt(),
        })
    }

    pub fn depth(&self) -> u32 {
        self.op.depth()
    }

    pub fn apply(&self, f: &StepFunction) -> Result<StepFunction> {
        self.op.apply(&f.mul(&self.inv_sqrt_w)?)?.mul(&self.sqrt_w)
    }

    pub fn apply_adjoint(&self, g: &StepFunction) -> Result<StepFunction> {
        self.op.apply_adjoint(&g.mul(&self.sqrt_w)?)?.mul(&self.inv_sqrt_w)
    }

    /// Dense `2^N x 2^N` matrix of the operator in cell coordinates, column
    /// by column. Memory is `4^N`; meant as a slow cross-check on small grids.
    pub fn dense_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let n = 1usize << self.depth();
        let mut columns = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            columns.push(self.apply(&StepFunction::new(self.depth(), e)?)?.into_values());
        }
        Ok(columns)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerIteration {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seeds: Vec<u64>,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tolerance: 1e-9,
            max_iterations: 5000,
            seeds: vec![0x5eed_0001, 0x5eed_0002, 0x5eed_0003],
        }
    }
}

impl From<&NormConstants> for PowerIteration {
    fn from(c: &NormConstants) -> Self {
        PowerIteration {
            tolerance: c.tolerance,
            max_iterations: c.max_iterations,
            seeds: c.restart_seeds.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub norm: f64,
    /// Iterations used by the restart that produced `norm`.
    pub iterations: usize,
}

fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn power_iterate(t: &WeightedParaproduct, seed: u64, opts: &PowerIteration) -> Result<NormEstimate> {
    let depth = t.depth();
    let n = 1usize << depth;
    let mut rng = seeded_rng(seed);
    let mut x: Vec<f64> = (0..n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
    let nx = euclidean_norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut previous = f64::NAN;
    for iteration in 1..=opts.max_iterations {
        let y = t.apply(&StepFunction::new(depth, x)?)?;
        let rayleigh = y.values().iter().map(|v| v * v).sum::<f64>();
        let z = t.apply_adjoint(&y)?.into_values();
        let nz = euclidean_norm(&z);
        if nz == 0.0 || rayleigh == 0.0 {
            return Ok(NormEstimate {
                norm: 0.0,
                iterations: iteration,
            });
        }
        if (rayleigh - previous).abs() < opts.tolerance * rayleigh {
            return Ok(NormEstimate {
                norm: rayleigh.sqrt(),
                iterations: iteration,
            });
        }
        previous = rayleigh;
        x = z.into_iter().map(|v| v / nz).collect();
    }
    Err(DyadicError::Convergence {
        iterations: opts.max_iterations,
        last_estimate: previous.sqrt(),
        last_iterate: x,
    })
}

/// `||pi_b||_{L2(w) -> L2(w)}` by power iteration on `T*T`, restarted from
/// every seed in `opts`; the largest estimate wins.
pub fn weighted_operator_norm(
    b: &StepFunction,
    w: &Weight,
    opts: &PowerIteration,
) -> Result<NormEstimate> {
    if !(opts.tolerance > 0.0) {
        return Err(DyadicError::domain("power iteration tolerance must be positive"));
    }
    if opts.seeds.is_empty() {
        return Err(DyadicError::domain("power iteration needs at least one seed"));
    }
    let t = WeightedParaproduct::new(b, w)?;
    let mut best: Option<NormEstimate> = None;
    for &seed in &opts.seeds {
        let est = power_iterate(&t, seed, opts)?;
        if best.is_none_or(|b| est.norm > b.norm) {
            best = Some(est);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// The three sums of the pairing decomposition:
///
/// - `sum1 = sum_I m_I(f w^-1/2) b_I <g w^1/2, h_I>`
/// - `sum2 = sum_I m_I(f w^-1/2) b_I |I|^-1/2 <g, w^1/2 H_I^w>`
/// - `sum3 = sum_I m_I(f w^-1/2) b_I A_I^w |I|^1/2 m_I(g w^1/2)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingBreakdown {
    pub sum1: f64,
    pub sum2: f64,
    pub sum3: f64,
}

impl PairingBreakdown {
    /// `|sum1 - sum2 - sum3|`.
    pub fn residual(&self) -> f64 {
        (self.sum1 - self.sum2 - self.sum3).abs()
    }
}

pub fn pairing_breakdown(
    b: &StepFunction,
    w: &Weight,
    f: &StepFunction,
    g: &StepFunction,
) -> Result<PairingBreakdown> {
    b.same_depth(w.values())?;
    b.same_depth(f)?;
    b.same_depth(g)?;
    let bs = haar_analyze(b);
    let fw = AveragePyramid::new(&f.mul(&w.inv_sqrt())?);
    let gw = AveragePyramid::new(&g.mul(&w.sqrt())?);
    let pairings = weighted_haar_pairings(w, g)?;

    let (mut sum1, mut sum2, mut sum3) = (0.0, 0.0, 0.0);
    for (i, b_i) in bs.coeffs.iter() {
        let lead = fw.get(i) * b_i;
        let root_len = i.length().sqrt();
        sum1 += lead * gw.haar_coefficient(i);
        sum2 += lead * pairings.get(i) / root_len;
        sum3 += lead * disbalance_unchecked(w, i) * root_len * gw.get(i);
    }
    Ok(PairingBreakdown { sum1, sum2, sum3 })
}

/// `|<pi_b(f w^-1/2), g w^1/2>| / ([w]_A2 ||b||_BMO ||f|| ||g||)`, the
/// constant witnessed by this quadruple. A symbol with zero BMO norm gives
/// the zero operator and ratio 0.
pub fn dual_pairing_bound_ratio(
    b: &StepFunction,
    w: &Weight,
    f: &StepFunction,
    g: &StepFunction,
) -> Result<f64> {
    b.same_depth(w.values())?;
    b.same_depth(f)?;
    b.same_depth(g)?;
    let (nf, ng) = (f.norm(), g.norm());
    if nf == 0.0 || ng == 0.0 {
        return Err(DyadicError::domain("test functions must be nonzero"));
    }
    let bmo = bmo_norm_carleson(b);
    if bmo == 0.0 {
        return Ok(0.0);
    }
    let op = ParaproductOperator::new(b.clone());
    let lhs = op.apply(&f.mul(&w.inv_sqrt())?)?.inner(&g.mul(&w.sqrt())?)?;
    let a2 = a2_characteristic(w).value;
    Ok(lhs.abs() / (a2 * bmo * nf * ng))
}

/// `pi_b f` by accumulating `m_I f b_I h_I` interval by interval on the cells.
pub fn apply_naive(b: &StepFunction, f: &StepFunction) -> Result<StepFunction> {
    b.same_depth(f)?;
    let depth = b.depth();
    let mut out = vec![0.0; 1usize << depth];
    for i in DyadicIndex::all_below(depth) {
        let coefficient = f.average(i)? * b.haar_coefficient(i)?;
        let h = StepFunction::haar(depth, i)?;
        for (o, hv) in out.iter_mut().zip(h.values()) {
            *o += coefficient * hv;
        }
    }
    StepFunction::new(depth, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{gen_bmo_symbol, gen_cascade_weight, SymbolKind};

    fn random_fn(depth: u32, seed: u64) -> StepFunction {
        let mut rng = seeded_rng(seed);
        StepFunction::new(depth, (0..1 << depth).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .unwrap()
    }

    #[test]
    fn constant_symbol_is_zero_operator() {
        let op = ParaproductOperator::new(StepFunction::constant(5, 4.0).unwrap());
        let out = op.apply(&random_fn(5, 1)).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_haar_symbol_is_rank_one() {
        let depth = 6;
        let h = StepFunction::haar(depth, DyadicIndex::ROOT).unwrap();
        let op = ParaproductOperator::new(h.clone());
        let f = random_fn(depth, 2);
        let expected = h.scale(f.integral()).unwrap();
        for (a, b) in op.apply(&f).unwrap().values().iter().zip(expected.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn fast_apply_matches_naive() {
        for depth in [1, 4, 6, 8] {
            let b = random_fn(depth, 10 + depth as u64);
            let f = random_fn(depth, 20 + depth as u64);
            let fast = ParaproductOperator::new(b.clone()).apply(&f).unwrap();
            let slow = apply_naive(&b, &f).unwrap();
            let scale = slow.norm().max(1e-300);
            let diff = fast.zip_with(&slow, |a, b| a - b).unwrap().norm();
            assert!(diff <= 1e-12 * scale, "depth {depth}: {diff}");
        }
    }

    #[test]
    fn adjoint_consistency() {
        let depth = 7;
        let op = ParaproductOperator::new(random_fn(depth, 3));
        let f = random_fn(depth, 4);
        let g = random_fn(depth, 5);
        let lhs = op.apply(&f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&op.apply_adjoint(&g).unwrap()).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs());
    }

    #[test]
    fn depth_mismatch_is_an_error() {
        let op = ParaproductOperator::new(random_fn(4, 1));
        assert!(matches!(
            op.apply(&random_fn(5, 1)),
            Err(DyadicError::DepthMismatch { .. })
        ));
        let w = Weight::constant(4, 1.0).unwrap();
        assert!(pairing_breakdown(&random_fn(4, 1), &w, &random_fn(5, 1), &random_fn(4, 2)).is_err());
    }

    #[test]
    fn norm_of_zero_operator() {
        let b = StepFunction::constant(6, 1.0).unwrap();
        let w = gen_cascade_weight(6, 0.5, 1).unwrap();
        let est = weighted_operator_norm(&b, &w, &PowerIteration::default()).unwrap();
        assert_eq!(est.norm, 0.0);
    }

    #[test]
    fn norm_of_rank_one_operator() {
        let b = StepFunction::haar(8, DyadicIndex::ROOT).unwrap();
        let w = Weight::constant(8, 1.0).unwrap();
        let est = weighted_operator_norm(&b, &w, &PowerIteration::default()).unwrap();
        assert!((est.norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn norm_is_invariant_under_weight_scaling() {
        let b = gen_bmo_symbol(SymbolKind::RandomNormalized, 7, 3).unwrap();
        let w = gen_cascade_weight(7, 0.6, 8).unwrap();
        let opts = PowerIteration::default();
        let a = weighted_operator_norm(&b, &w, &opts).unwrap().norm;
        let c = weighted_operator_norm(&b, &w.scaled(37.5).unwrap(), &opts).unwrap().norm;
        assert!((a - c).abs() <= 1e-8 * a);
    }

    #[test]
    fn convergence_failure_is_reported() {
        let b = gen_bmo_symbol(SymbolKind::RandomNormalized, 7, 3).unwrap();
        let w = gen_cascade_weight(7, 0.6, 8).unwrap();
        let opts = PowerIteration {
            tolerance: 1e-15,
            max_iterations: 2,
            ..PowerIteration::default()
        };
        match weighted_operator_norm(&b, &w, &opts) {
            Err(DyadicError::Convergence {
                iterations,
                last_estimate,
                last_iterate,
            }) => {
                assert_eq!(iterations, 2);
                assert!(last_estimate > 0.0);
                assert_eq!(last_iterate.len(), 128);
            }
            other => panic!("expected a convergence error, got {other:?}"),
        }
    }

    #[test]
    fn flat_weight_breakdown_has_no_disbalance_part() {
        let depth = 8;
        let w = Weight::constant(depth, 2.5).unwrap();
        let p = pairing_breakdown(&random_fn(depth, 1), &w, &random_fn(depth, 2), &random_fn(depth, 3))
            .unwrap();
        assert_eq!(p.sum3, 0.0);
        assert!((p.sum1 - p.sum2).abs() <= 1e-12 * p.sum1.abs());
    }

    #[test]
    fn constant_symbol_breakdown_vanishes() {
        let depth = 6;
        let w = gen_cascade_weight(depth, 0.4, 2).unwrap();
        let b = StepFunction::constant(depth, -3.0).unwrap();
        let p = pairing_breakdown(&b, &w, &random_fn(depth, 1), &random_fn(depth, 2)).unwrap();
        assert_eq!((p.sum1, p.sum2, p.sum3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn breakdown_identity_on_random_data() {
        let depth = 8;
        let w = gen_cascade_weight(depth, 0.9, 5).unwrap();
        let b = random_fn(depth, 6);
        let f = random_fn(depth, 7);
        let g = random_fn(depth, 8);
        let p = pairing_breakdown(&b, &w, &f, &g).unwrap();
        assert!(p.residual() <= 1e-10 * p.sum1.abs());
        // sum1 is also the pairing of pi_b(f w^-1/2) against g w^1/2
        let op = ParaproductOperator::new(b);
        let direct = op.apply(&f.mul(&w.inv_sqrt()).unwrap()).unwrap().inner(&g.mul(&w.sqrt()).unwrap()).unwrap();
        assert!((direct - p.sum1).abs() <= 1e-10 * direct.abs());
    }

    #[test]
    fn dual_ratio_examples() {
        let depth = 6;
        let w = Weight::constant(depth, 1.0).unwrap();
        let one = StepFunction::constant(depth, 1.0).unwrap();
        let b = StepFunction::haar(depth, DyadicIndex::ROOT).unwrap();
        assert_eq!(dual_pairing_bound_ratio(&b, &w, &one, &one).unwrap(), 0.0);
        let flat = StepFunction::constant(depth, 2.0).unwrap();
        assert_eq!(dual_pairing_bound_ratio(&flat, &w, &random_fn(depth, 1), &random_fn(depth, 2)).unwrap(), 0.0);
        let zero = StepFunction::constant(depth, 0.0).unwrap();
        assert!(matches!(
            dual_pairing_bound_ratio(&b, &w, &zero, &one),
            Err(DyadicError::Domain(_))
        ));
    }
}
