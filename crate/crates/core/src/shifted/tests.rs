use super::*;
use crate::bumps::{chi, Profile};

const M: usize = 1024;
const L: f64 = 1024.0;

fn noise(seed: u64) -> GridFunction {
    random_bandlimited(&[M], L, M / 4 - 1, seed, true).unwrap()
}

fn constant(c: f64) -> GridFunction {
    GridFunction::constant(vec![M], L, Complex64::new(c, 0.0)).unwrap()
}

#[test]
fn constants_are_fixed_by_the_maximal_function() {
    for u in [0.0, 4.0, 64.0] {
        let out = shifted_maximal(&constant(1.0), &ShiftedOpSpec::maximal(u, M, L).unwrap()).unwrap();
        assert!(out.values().iter().all(|v| (v.re - 1.0).abs() < 1e-12 && v.im == 0.0));
    }
}

#[test]
fn square_function_kills_constants() {
    for u in [0.0, 16.0] {
        let out = shifted_square(&constant(2.5), &ShiftedOpSpec::square(u, M, L).unwrap()).unwrap();
        assert!(out.values().iter().all(|v| v.norm() < 1e-12));
    }
}

#[test]
fn profile_kind_is_enforced() {
    let f = noise(1);
    let max_with_psi = ShiftedOpSpec::new(build_psi(), 0.0, -6, -2).unwrap();
    assert!(matches!(shifted_maximal(&f, &max_with_psi), Err(Error::ProfileKind { .. })));
    let square_with_phi = ShiftedOpSpec::new(build_chi(), 0.0, -6, -2).unwrap();
    assert!(matches!(shifted_square(&f, &square_with_phi), Err(Error::ProfileKind { .. })));
}

#[test]
fn aliasing_scales_are_rejected() {
    let (a, b) = resolvable_scales(M, L);
    assert_eq!((a, b), (-8, -2));
    let spec = ShiftedOpSpec::new(build_chi(), 0.0, a - 1, b).unwrap();
    assert!(matches!(shifted_maximal(&noise(2), &spec), Err(Error::ScaleRange(_))));
}

#[test]
fn maximal_dominates_finest_scale_and_is_homogeneous() {
    let f = two_bump(M, L, 0.0, -6, -3, 3).unwrap();
    let spec = ShiftedOpSpec::maximal(0.0, M, L).unwrap();
    let out = shifted_maximal(&f, &spec).unwrap();
    let finest = convolve_axis(&f, &build_chi(), spec.k_max, 0, 0.0).unwrap();
    for (a, b) in out.values().iter().zip(finest.values()) {
        assert!(a.re >= b.norm() - 1e-15);
    }
    let doubled = shifted_maximal(&f.scale(Complex64::new(2.0, 0.0)), &spec).unwrap();
    for (a, b) in doubled.values().iter().zip(out.values()) {
        assert_eq!(a.re, 2.0 * b.re);
    }
}

#[test]
fn square_sup_of_squared_profile_is_at_most_one() {
    let psi = build_psi();
    let mut sup: f64 = 0.0;
    for i in 1..20000 {
        let eta = 1e-3 * i as f64;
        let s: f64 = (-30..30).map(|k| psi.eval((-(k as f64)).exp2() * eta).powi(2)).sum();
        sup = sup.max(s);
    }
    assert!(sup <= 1.0 + 1e-15 && sup > 0.5, "{sup}");
    assert!(matches!(psi.profile, Profile::Annulus { .. }));
    assert!((chi(0.0) - 1.0).abs() < 1e-15);
}

#[test]
fn plancherel_bound_for_square_function() {
    let spec = ShiftedOpSpec::square(0.0, M, L).unwrap();
    for seed in 0..8 {
        let f = noise(seed);
        let out = shifted_square(&f, &spec).unwrap();
        assert!(lp_norm(&out, 2.0).unwrap() <= lp_norm(&f, 2.0).unwrap() * (1.0 + 1e-12));
    }
}

#[test]
fn enlarging_scale_range_is_monotone() {
    let f = noise(4);
    let narrow = ShiftedOpSpec::new(build_psi(), 8.0, -6, -4).unwrap();
    let wide = ShiftedOpSpec::new(build_psi(), 8.0, -8, -2).unwrap();
    let (a, b) = (shifted_square(&f, &narrow).unwrap(), shifted_square(&f, &wide).unwrap());
    assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.re <= y.re + 1e-14));
    let narrow = ShiftedOpSpec { profile: build_chi(), ..narrow };
    let wide = ShiftedOpSpec { profile: build_chi(), ..wide };
    let (a, b) = (shifted_maximal(&f, &narrow).unwrap(), shifted_maximal(&f, &wide).unwrap());
    assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.re <= y.re));
}

#[test]
fn operators_commute_with_translation() {
    let f = noise(5);
    let s = 37.0 * L / M as f64;
    for kind in [ShiftedKind::Max, ShiftedKind::Square] {
        let spec = NormTableSpec {
            kind,
            u: vec![16.0],
            p: 2.0,
            trials: 1,
            seed: 0,
            size: M,
            period: L,
            scales: None,
        };
        let a = spec.apply(&f.translate(0, s).unwrap(), 16.0).unwrap();
        let b = spec.apply(&f, 16.0).unwrap().translate(0, s).unwrap();
        let err = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{kind:?}: {err}");
    }
}

#[test]
fn norm_table_rows() {
    let mut spec = NormTableSpec {
        kind: ShiftedKind::Max,
        u: vec![0.0, 4.0],
        p: 2.0,
        trials: 2,
        seed: 9,
        size: M,
        period: L,
        scales: None,
    };
    let small = shifted_norm_table(&spec).unwrap();
    assert_eq!(small[0].u, 0.0);
    assert!(small[0].ratio.is_finite());
    spec.trials = 6;
    let large = shifted_norm_table(&spec).unwrap();
    for (a, b) in small.iter().zip(&large) {
        assert!(b.norm >= a.norm);
    }
    spec.p = 1.0;
    assert!(shifted_norm_table(&spec).is_err());
}
