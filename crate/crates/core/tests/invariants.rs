use proptest::prelude::*;
use simplex_lab::bumps::{decompose_symbol, partition_sum};
use simplex_lab::dyadic::{cs_split, lambda_dyadic, martingale_avg, martingale_diff, DyadicFunction};
use simplex_lab::forms::{counterexample_rhs, CounterexampleData, ExponentTuple};
use simplex_lab::symbol::{bad_set_distance, mu_closed};
use simplex_lab::{lp_norm, Complex64, GridFunction};

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n).prop_filter("away from the bad set", |v| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        norm > 1e-3 && bad_set_distance(v) > 1e-9 * norm
    })
}

fn dims() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=5).prop_flat_map(point)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mu_is_odd_homogeneous_and_bounded(xi in dims(), log_scale in -6.0..6.0f64) {
        let m = mu_closed(&xi).unwrap();
        prop_assert!(m.abs() <= 1.0 + 1e-14);
        let lambda = log_scale.exp2();
        let scaled: Vec<f64> = xi.iter().map(|x| x * lambda).collect();
        prop_assert!((mu_closed(&scaled).unwrap() - m).abs() < 1e-12);
        let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
        prop_assert!((mu_closed(&neg).unwrap() + m).abs() < 1e-12);
    }

    #[test]
    fn mu_ignores_order_of_leading_coordinates(xi in dims()) {
        let n = xi.len();
        let mut rev = xi.clone();
        rev[..n - 1].reverse();
        prop_assert!((mu_closed(&rev).unwrap() - mu_closed(&xi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pieces_sum_to_one(xi in (2usize..=4).prop_flat_map(point), l0 in 1u32..=4) {
        let pieces = decompose_symbol(xi.len(), l0).unwrap();
        prop_assert!((partition_sum(&pieces, &xi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn martingale_differences_are_orthogonal(values in prop::collection::vec(-1.0..1.0f64, 32)) {
        let f = DyadicFunction::new(5, 1, values).unwrap();
        let mut energy = martingale_avg(&f, 0).unwrap().l2_norm_squared();
        for k in 0..5 {
            energy += martingale_diff(&f, k).unwrap().l2_norm_squared();
        }
        prop_assert!((energy - f.l2_norm_squared()).abs() < 1e-12 * (1.0 + energy));
    }

    #[test]
    fn dyadic_form_obeys_cauchy_schwarz(seed in any::<u64>()) {
        let f = [0, 1, 2, 3].map(|j| DyadicFunction::random(3, 3, 0.0, 1.0, seed.wrapping_add(j)).unwrap());
        let lambda = lambda_dyadic(&f).unwrap();
        let split = cs_split(&f).unwrap();
        prop_assert!(lambda.abs() <= split.bound() * (1.0 + 1e-12));
    }

    #[test]
    fn translation_preserves_energy(values in prop::collection::vec(-1.0..1.0f64, 16), s in -3.0..3.0f64) {
        let f = GridFunction::new(vec![16], 1.0, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect()).unwrap();
        let g = f.translate(0, s).unwrap();
        prop_assert!((lp_norm(&g, 2.0).unwrap() - lp_norm(&f, 2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn normalized_exponents_are_holder(raw in prop::collection::vec(0.05..1.0f64, 2..6)) {
        let total: f64 = raw.iter().sum();
        let exps: Vec<f64> = raw.iter().map(|r| total / r).collect();
        prop_assert!(ExponentTuple::new(exps.clone()).is_ok());
        let mut bad = exps;
        bad[0] *= 2.0;
        prop_assert!(ExponentTuple::new(bad).is_err());
    }

    #[test]
    fn counterexample_rhs_is_a_power_of_n(log_n in 1u32..9, n in 2usize..=3) {
        let big_n = 1u64 << log_n;
        let data = CounterexampleData::new(n, n, big_n, None).unwrap();
        let mut exps = vec![1.0];
        exps.extend(std::iter::repeat_n(f64::INFINITY, n));
        let rhs = counterexample_rhs(&data, &ExponentTuple::new(exps).unwrap()).unwrap();
        prop_assert_eq!(rhs, (big_n as f64).powi(n as i32 - 1));
    }
}
