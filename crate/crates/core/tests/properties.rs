use dyadic_core::bellman::{carleson_lemma, cubic, BellmanPoint2, BellmanPoint3};
use dyadic_core::grid::AveragePyramid;
use dyadic_core::lab::{CheckId, CheckInputs, InequalityLab};
use dyadic_core::paraproduct::{apply_naive, ParaproductOperator, WeightedParaproduct};
use dyadic_core::weighted_haar::{bessel_sum, weighted_haar_norm_sq};
use dyadic_core::weights::{
    a2_characteristic, bmo_norm_carleson, bmo_norm_oscillation, carleson_constant, gen_bmo_symbol,
    gen_cascade_weight, squared_coefficients,
};
use dyadic_core::{haar_analyze, haar_synthesize, DyadicIndex, StepFunction, SymbolKind, Weight};
use proptest::prelude::*;

fn step(depth: u32) -> impl Strategy<Value = StepFunction> {
    prop::collection::vec(-10.0..10.0f64, 1usize << depth)
        .prop_map(move |v| StepFunction::new(depth, v).unwrap())
}

fn step_any_depth(lo: u32, hi: u32) -> impl Strategy<Value = StepFunction> {
    (lo..=hi).prop_flat_map(step)
}

fn cascade(lo: u32, hi: u32) -> impl Strategy<Value = Weight> {
    (lo..=hi, 0.0..0.95f64, any::<u64>()).prop_map(|(d, delta, seed)| gen_cascade_weight(d, delta, seed).unwrap())
}

fn symbol(depth: u32) -> impl Strategy<Value = StepFunction> {
    prop_oneof![
        Just(SymbolKind::SingleHaar),
        Just(SymbolKind::DyadicLog),
        Just(SymbolKind::RandomNormalized),
    ]
    .prop_flat_map(move |k| any::<u64>().prop_map(move |s| gen_bmo_symbol(k, depth, s).unwrap()))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_scale_consistency_is_exact(f in step_any_depth(1, 10)) {
        let p = AveragePyramid::new(&f);
        for i in DyadicIndex::all_below(f.depth()) {
            prop_assert_eq!(p.get(i), 0.5 * (p.get(i.left_child()) + p.get(i.right_child())));
        }
    }

    #[test]
    fn haar_round_trip_and_parseval(f in step_any_depth(1, 12)) {
        let s = haar_analyze(&f);
        let back = haar_synthesize(&s);
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * 10.0 * (1.0 + f64::from(f.depth())));
        }
        let energy = s.mean * s.mean + s.coeffs.sum_of_squares();
        prop_assert!((energy - f.norm_sq()).abs() <= 1e-10 * f.norm_sq().max(1e-300));
    }

    #[test]
    fn haar_coefficients_are_linear(
        (f, g) in (2u32..=8).prop_flat_map(|d| (step(d), step(d))),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let combo = f.zip_with(&g, |x, y| a * x + b * y).unwrap();
        let (sf, sg, sc) = (haar_analyze(&f), haar_analyze(&g), haar_analyze(&combo));
        for (i, c) in sc.coeffs.iter() {
            let expected = a * sf.coeffs.get(i) + b * sg.coeffs.get(i);
            prop_assert!((c - expected).abs() <= 1e-12 * (1.0 + expected.abs()) * 10.0);
        }
    }

    #[test]
    fn a2_is_at_least_one_and_symmetric(w in cascade(1, 10)) {
        for i in DyadicIndex::all_below(w.depth() + 1) {
            prop_assert!(w.mean(i) * w.inv_mean(i) >= 1.0 - 1e-12);
        }
        let a = a2_characteristic(&w).value;
        let b = a2_characteristic(&w.inverse()).value;
        prop_assert!(rel(a, b) <= 1e-12);
    }

    #[test]
    fn bmo_forms_agree(b in (4u32..=10).prop_flat_map(symbol)) {
        let c = bmo_norm_carleson(&b);
        prop_assert!(rel(c, bmo_norm_oscillation(&b)) <= 1e-10);
        let q = carleson_constant(&squared_coefficients(&haar_analyze(&b))).unwrap();
        prop_assert!(rel(q, c * c) <= 1e-12);
    }

    #[test]
    fn bmo_forms_agree_on_raw_functions(f in step_any_depth(2, 9)) {
        prop_assert!(rel(bmo_norm_carleson(&f), bmo_norm_oscillation(&f)) <= 1e-10);
    }

    #[test]
    fn weighted_haar_norms_and_bessel(w in cascade(2, 8), seed in any::<u64>()) {
        for i in DyadicIndex::all_below(w.depth()) {
            let n = weighted_haar_norm_sq(&w, i).unwrap();
            prop_assert!(n > 0.0);
            prop_assert!(n <= i.length() * w.mean(i) * (1.0 + 1e-12));
        }
        let g = gen_bmo_symbol(SymbolKind::RandomNormalized, w.depth(), seed)
            .unwrap()
            .map(|v| v + 0.3)
            .unwrap();
        prop_assert!(bessel_sum(&w, &g).unwrap() <= g.norm_sq() * (1.0 + 1e-12));
    }

    #[test]
    fn unweighted_bessel_equality_iff_mean_zero(f in step_any_depth(1, 9)) {
        let flat = Weight::constant(f.depth(), 1.0).unwrap();
        let mean = f.integral();
        let s = bessel_sum(&flat, &f).unwrap();
        prop_assert!((s + mean * mean - f.norm_sq()).abs() <= 1e-10 * f.norm_sq().max(1.0));
        let centred = f.map(|v| v - mean).unwrap();
        prop_assert!(rel(bessel_sum(&flat, &centred).unwrap(), centred.norm_sq()) <= 1e-10);
    }

    #[test]
    fn fast_apply_matches_naive((b, f) in (1u32..=8).prop_flat_map(|d| (step(d), step(d)))) {
        let fast = ParaproductOperator::new(b.clone()).apply(&f).unwrap();
        let naive = apply_naive(&b, &f).unwrap();
        let scale = naive.norm().max(1e-300);
        let diff = fast.zip_with(&naive, |x, y| x - y).unwrap().norm();
        prop_assert!(diff <= 1e-12 * scale * 10.0);
    }

    #[test]
    fn adjoint_consistency(
        w in cascade(1, 9),
        seed in any::<u64>(),
    ) {
        let d = w.depth();
        let b = gen_bmo_symbol(SymbolKind::RandomNormalized, d, seed).unwrap();
        let f = gen_bmo_symbol(SymbolKind::RandomNormalized, d, seed ^ 1).unwrap().map(|v| v + 1.0).unwrap();
        let g = gen_bmo_symbol(SymbolKind::RandomNormalized, d, seed ^ 2).unwrap().map(|v| v - 0.5).unwrap();
        for weight in [Weight::constant(d, 1.0).unwrap(), w] {
            let t = WeightedParaproduct::new(&b, &weight).unwrap();
            let lhs = t.apply(&f).unwrap().inner(&g).unwrap();
            let rhs = f.inner(&t.apply_adjoint(&g).unwrap()).unwrap();
            let scale = t.apply(&f).unwrap().norm() * g.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-300));
        }
    }

    #[test]
    fn checks_reroot_exactly(w in cascade(3, 8), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let d = w.depth();
        let b = gen_bmo_symbol(SymbolKind::RandomNormalized, d, seed).unwrap();
        let lam = squared_coefficients(&haar_analyze(&b));
        let roots: Vec<DyadicIndex> = DyadicIndex::all_below(d).collect();
        let j = roots[pick.index(roots.len())];
        let (wr, br, lr) = (w.restrict(j).unwrap(), b.restrict(j).unwrap(), lam.restrict(j).unwrap());
        let lab = InequalityLab::default();
        let full = CheckInputs::weight(&w).with_symbol(&b).with_carleson(&lam);
        let local = CheckInputs::weight(&wr).with_symbol(&br).with_carleson(&lr);
        for id in CheckId::ALL {
            let a = lab.check(id, &full, j).unwrap();
            let r = lab.check(id, &local, DyadicIndex::ROOT).unwrap();
            prop_assert!(rel(a.lhs, r.lhs) <= 1e-10 || (a.lhs - r.lhs).abs() <= 1e-14, "{} lhs {} vs {}", id, a.lhs, r.lhs);
            prop_assert!(rel(a.rhs, r.rhs) <= 1e-10, "{} rhs {} vs {}", id, a.rhs, r.rhs);
            prop_assert_eq!(a.pass, r.pass);
        }
    }

    #[test]
    fn theorem_checks_never_fail(w in cascade(2, 10), seed in any::<u64>()) {
        let lab = InequalityLab::default();
        let b = gen_bmo_symbol(SymbolKind::RandomNormalized, w.depth(), seed).unwrap();
        let lam = squared_coefficients(&haar_analyze(&b));
        let inputs = CheckInputs::weight(&w).with_symbol(&b).with_carleson(&lam);
        for id in CheckId::ALL {
            let p = lab.profile(id, &inputs).unwrap();
            prop_assert_eq!(p.failures(), 0, "{} worst {:?}", id, p.worst());
        }
    }

    #[test]
    fn carleson_b_hits_one_at_argmax(b in (2u32..=9).prop_flat_map(symbol)) {
        let sup = dyadic_core::weights::bmo_carleson_sup(&b);
        let r = InequalityLab::default().carleson_b(&b, sup.argmax).unwrap();
        prop_assert!((r.ratio - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn cubic_midpoint_closed_form(
        lu in -20.0..20.0f64, lv in -20.0..20.0f64, mu in -20.0..20.0f64, mv in -20.0..20.0f64,
    ) {
        let (u1, v1, u2, v2) = (lu.exp2(), lv.exp2(), mu.exp2(), mv.exp2());
        prop_assume!(u1 * v1 >= 1.0 && u2 * v2 >= 1.0);
        let (a, b) = (BellmanPoint2::new(u1, v1).unwrap(), BellmanPoint2::new(u2, v2).unwrap());
        let (x, gap) = cubic::midpoint_gap(&a, &b).unwrap();
        let exact = cubic::midpoint_gap_closed_form(u1, u2);
        prop_assert!((gap - exact).abs() <= 1e-12 * 0.5 * (1.0 / u1 + 1.0 / u2));
        let du = u1 - u2;
        prop_assert!(exact >= 0.25 * du * du / (x.u * x.u * x.u) * (1.0 - 1e-12));
    }

    #[test]
    fn carleson_lemma_midpoint_slack(
        lu in -20.0..20.0f64, lv in -20.0..20.0f64, mu in -20.0..20.0f64, mv in -20.0..20.0f64,
        l1 in 0.0..=1.0f64, l2 in 0.0..=1.0f64, t in 0.0..=1.0f64,
    ) {
        let (u1, v1, u2, v2) = (lu.exp2(), lv.exp2(), mu.exp2(), mv.exp2());
        prop_assume!(u1 * v1 >= 1.0 && u2 * v2 >= 1.0);
        let a = BellmanPoint3::new(u1, v1, l1).unwrap();
        let b = BellmanPoint3::new(u2, v2, l2).unwrap();
        let alpha = t * (1.0 - 0.5 * (l1 + l2));
        let (x, gap) = carleson_lemma::midpoint_gap(&a, &b, alpha).unwrap();
        let unit = 1.0 / (x.v * (1.0 + x.l));
        prop_assert!(gap - alpha / (4.0 * x.v) >= -1e-12 * unit);
    }
}
