use num_complex::Complex64;

use super::*;
use crate::bumps::{decompose_symbol, ShiftSpec};
use crate::gen::random_bandlimited;
use crate::grid::GridFunction;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_tuple(sizes: &[usize], cutoff: usize, count: usize, seed: u64) -> Vec<GridFunction> {
    (0..count)
        .map(|j| random_bandlimited(sizes, 1.0, cutoff, seed * 101 + j as u64, false).unwrap())
        .collect()
}

fn accurate_pv() -> PvQuadrature {
    PvQuadrature::new(
        2f64.powi(-20),
        16.0,
        PvLayout::Hybrid { log_count: 64, split: 0.5, linear_panels: 64, per_panel: 8 },
        32,
    )
    .unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn constants_give_zero() {
    let one2 = GridFunction::constant(vec![8, 8], 1.0, c(1.0)).unwrap();
    let one1 = GridFunction::constant(vec![16], 1.0, c(1.0)).unwrap();
    let pv = PvQuadrature::default_for(1.0);
    let f2 = vec![one2.clone(), one2.clone(), one2];
    let f1 = vec![one1.clone(), one1.clone(), one1];
    assert!(lambda_direct(&f2, &pv).unwrap().value.norm() < 1e-12);
    assert!(simplex_direct(&f2, &pv).unwrap().value.norm() < 1e-12);
    assert!(commutator_form(&f1, &pv).unwrap().value.norm() < 1e-12);
}

#[test]
fn unit_symbol_gives_product_integral() {
    let f = random_tuple(&[8, 8], 3, 3, 1);
    let dense = lambda_m_dense(&|_: &[f64]| c(1.0), &f, &DenseBudget::default_for(2)).unwrap();
    let prod = f[0].mul(&f[1]).unwrap().mul(&f[2]).unwrap().integral();
    assert!(rel(dense.value, prod) < 1e-12);
}

#[test]
fn dense_is_linear_in_f0() {
    let mut f = random_tuple(&[8, 8], 3, 3, 2);
    let a = lambda_m_dense(&MuSymbol, &f, &DenseBudget::default_for(2)).unwrap().value;
    f[0] = f[0].scale(c(2.0));
    let b = lambda_m_dense(&MuSymbol, &f, &DenseBudget::default_for(2)).unwrap().value;
    assert!(rel(b, 2.0 * a) < 1e-12);
}

#[test]
fn dense_budget_fails_fast() {
    let f = random_tuple(&[64, 64], 3, 3, 3);
    assert!(matches!(
        lambda_m_dense(&MuSymbol, &f, &DenseBudget::default_for(2)),
        Err(crate::Error::Budget(_))
    ));
}

#[test]
fn tensor_matches_dense_for_decomposition() {
    for (n, seed) in [(2usize, 4u64), (3, 5)] {
        let sizes = vec![8; n];
        let f = random_tuple(&sizes, 3, n + 1, seed);
        let shift = ShiftSpec { u: 0.3, v: -1.7, alpha_tail: vec![0.4; n - 2] };
        let pieces: Vec<_> = decompose_symbol(n, 2)
            .unwrap()
            .into_iter()
            .map(|p| p.with_shifts(&shift).unwrap())
            .collect();
        let tensor = lambda_m_tensor(&pieces, &f, None, None).unwrap().value;
        let dense = lambda_m_dense(&PieceSum(pieces), &f, &DenseBudget::default_for(n)).unwrap().value;
        assert!(rel(tensor, dense) < 1e-8, "n = {n}: {tensor} vs {dense}");
    }
}

#[test]
fn psi_piece_kills_constant_input() {
    let pieces = decompose_symbol(2, 2).unwrap();
    let psi_first = pieces.iter().find(|p| p.main_axis() == 0).unwrap().clone();
    let mut f = random_tuple(&[16, 16], 4, 3, 6);
    f[1] = GridFunction::constant(vec![16, 16], 1.0, c(1.0)).unwrap();
    let v = lambda_m_tensor(&[psi_first], &f, None, None).unwrap().value;
    assert!(v.norm() < 1e-12);
}

#[test]
fn tensor_rejects_unresolvable_scales() {
    let pieces = decompose_symbol(2, 2).unwrap();
    let f = random_tuple(&[8, 8], 3, 3, 7);
    assert!(matches!(
        lambda_m_tensor(&pieces, &f, None, Some((-40, 40))),
        Err(crate::Error::ScaleRange(_))
    ));
}

#[test]
fn commutator_is_i_pi_times_spectral() {
    let f = random_tuple(&[64], 6, 3, 8);
    let d = commutator_form(&f, &accurate_pv()).unwrap().value;
    let s = commutator_spectral(&MuSymbol, &f, &DenseBudget::default_for(2)).unwrap().value;
    let kappa = d / s;
    assert!((kappa - Complex64::new(0.0, std::f64::consts::PI)).norm() < 0.05 * std::f64::consts::PI, "{kappa}");
}

#[test]
fn simplex_is_i_pi_times_sign_of_sum() {
    let f = random_tuple(&[32, 32], 4, 3, 9);
    let d = simplex_direct(&f, &accurate_pv()).unwrap().value;
    let sgn = |xi: &[f64]| c((xi[0] + xi[1]).signum() * if xi[0] + xi[1] == 0.0 { 0.0 } else { 1.0 });
    let s = lambda_m_dense(&sgn, &f, &DenseBudget::default_for(2)).unwrap().value;
    let kappa = d / s;
    assert!((kappa - Complex64::new(0.0, std::f64::consts::PI)).norm() < 0.05 * std::f64::consts::PI, "{kappa}");
}

#[test]
fn periodic_rule_is_exact_for_the_simplex() {
    let f = random_tuple(&[16, 16], 4, 3, 11);
    let pv = PvQuadrature::new(1e-3, 0.5, PvLayout::Periodic { panels: 8, per_panel: 16 }, 1).unwrap();
    let r = simplex_direct(&f, &pv).unwrap();
    let sgn = |xi: &[f64]| c(if xi[0] + xi[1] == 0.0 { 0.0 } else { (xi[0] + xi[1]).signum() });
    let s = lambda_m_dense(&sgn, &f, &DenseBudget::default_for(2)).unwrap().value;
    let want = s * Complex64::new(0.0, std::f64::consts::PI);
    assert!((r.value - want).norm() < 1e-9 * want.norm(), "{} vs {want}", r.value);
    // Averaging over α breaks the common period.
    assert!(lambda_direct(&f, &pv).is_err());
    let short = PvQuadrature::new(1e-3, 0.3, PvLayout::Periodic { panels: 8, per_panel: 16 }, 1).unwrap();
    assert!(simplex_direct(&f, &short).is_err());
}

#[test]
fn direct_odd_integrand_vanishes() {
    // F_1 even in x_1, F_2 odd in x_2, F_0 even in both: the t-integrand is even, so the PV vanishes.
    let sizes = vec![16, 16];
    let tau = 2.0 * std::f64::consts::PI;
    let f0 = GridFunction::from_fn(sizes.clone(), 1.0, |x| c((tau * x[0]).cos() * (tau * x[1]).cos())).unwrap();
    let f1 = GridFunction::from_fn(sizes.clone(), 1.0, |x| c((tau * x[0]).cos())).unwrap();
    let f2 = GridFunction::from_fn(sizes, 1.0, |x| c((tau * x[1]).cos())).unwrap();
    let v = lambda_direct(&[f0, f1, f2], &PvQuadrature::default_for(1.0)).unwrap().value;
    assert!(v.norm() < 1e-10, "{v}");
}

#[test]
fn simplex_stable_under_node_doubling() {
    let f = random_tuple(&[16, 16], 3, 3, 10);
    let pv = accurate_pv();
    let r = simplex_direct(&f, &pv).unwrap();
    assert!(r.error_estimate < 0.01 * r.value.norm());
}

#[test]
fn exponent_tuple_validation() {
    assert!(matches!(ExponentTuple::new(vec![4.0; 3]), Err(crate::Error::Holder(_))));
    assert!(ExponentTuple::new(vec![3.0, 3.0, 3.0]).is_ok());
    assert!(ExponentTuple::new(vec![1.0, f64::INFINITY, f64::INFINITY]).is_ok());
    assert!(ExponentTuple::new(vec![0.5, f64::INFINITY]).is_err());
    let e: ExponentTuple = serde_json::from_str(r#"[1, "inf", "inf"]"#).unwrap();
    assert_eq!(serde_json::to_string(&e).unwrap(), r#"[1.0,"inf","inf"]"#);
    assert!(serde_json::from_str::<ExponentTuple>(r#"[1, "big", "inf"]"#).is_err());
}

#[test]
fn probe_ratio_is_scale_invariant() {
    let spec = ProbeSpec {
        evaluator: ProbeEvaluator::Dense,
        n: 2,
        size: 16,
        period: 1.0,
        cutoff: 4,
        pv: None,
    };
    let exps = ExponentTuple::new(vec![3.0, 3.0, 3.0]).unwrap();
    let stats = empirical_constant(&spec, &exps, 4, 11).unwrap();
    assert!(stats.ratios.iter().all(|&r| r <= stats.max));
    let mut f = spec.trial_inputs(2, 11).unwrap();
    let before = spec.ratio(&f, &exps).unwrap();
    assert!((before - stats.ratios[2]).abs() < 1e-14 * before);
    f[1] = f[1].scale(c(10.0));
    let after = spec.ratio(&f, &exps).unwrap();
    assert!((after - before).abs() < 1e-10 * before);
}

/// Closed form for `n = 2, j0 = 2` with `T = 2N`.
fn counterexample_oracle(big_n: f64, eps: f64) -> f64 {
    let n = big_n;
    n * (n / eps).ln() - (n - eps) / 2.0 + n / 2.0 - n * n / (2.0 * (2.0 * n - 1.0))
        + 0.5 * n * n * (2.0 * n * (1.0 / (2.0 * n - 1.0) - 1.0 / (2.0 * n)) - (2.0 * n / (2.0 * n - 1.0)).ln())
        - n * ((1.0 / eps).ln() - (1.0 - eps))
}

#[test]
fn counterexample_matches_closed_form() {
    for big_n in [8u64, 16, 64] {
        let data = CounterexampleData::new(2, 2, big_n, None).unwrap();
        let pv = data.default_pv();
        let v = counterexample(&data, &pv).unwrap();
        let o = counterexample_oracle(big_n as f64, pv.eps);
        assert!((v.value.re - o).abs() < 1e-9 * o, "N = {big_n}: {} vs {o}", v.value.re);
        assert!(v.value.im == 0.0);
    }
}

#[test]
fn counterexample_growth_ratio() {
    let rows = counterexample_growth(2, 2, &[8, 16]).unwrap();
    let r = rows[1].value / rows[0].value;
    let expect = 8.0 / 3.0;
    assert!((r - expect).abs() < 0.15 * expect, "{r}");
}
