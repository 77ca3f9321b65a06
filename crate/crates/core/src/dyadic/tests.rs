use super::*;

fn iv(scale: u32, index: u64) -> DyadicInterval {
    DyadicInterval::new(scale, index).unwrap()
}

fn half_indicator(levels: u32) -> DyadicFunction {
    DyadicFunction::from_fn(levels, 1, |x| if x[0] < 0.5 { 1.0 } else { 0.0 }).unwrap()
}

#[test]
fn haar_coefficient_examples() {
    assert!((haar_coeff(&half_indicator(5), iv(0, 0)).unwrap() - 0.5).abs() < 1e-15);
    let c = DyadicFunction::constant(5, 1, 3.7).unwrap();
    for k in 0..5 {
        for i in 0..1 << k {
            assert!(haar_coeff(&c, iv(k, i)).unwrap().abs() < 1e-14);
        }
    }
    assert!(haar_coeff(&c, iv(5, 0)).is_err());
}

#[test]
fn averages_and_differences() {
    let f = DyadicFunction::random(6, 1, -1.0, 1.0, 3).unwrap();
    let e0 = martingale_avg(&f, 0).unwrap();
    assert!(e0.values().iter().all(|v| (v - f.integral()).abs() < 1e-14));
    let d0 = martingale_diff(&half_indicator(6), 0).unwrap();
    let psi = haar_function(6, iv(0, 0)).unwrap();
    for (a, b) in d0.values().iter().zip(psi.values()) {
        assert!((a - 0.5 * b).abs() < 1e-15);
    }
    assert!(martingale_avg(&f, 6).is_err());
    assert!(martingale_diff(&f, 6).is_err());
}

#[test]
fn t_d_annihilates_z_constants_and_is_linear() {
    let f1 = DyadicFunction::random(3, 3, 0.0, 1.0, 1).unwrap();
    let f2 = DyadicFunction::random(3, 3, 0.0, 1.0, 2).unwrap();
    let flat = DyadicFunction::from_fn(3, 3, |x| x[0] + 2.0 * x[1]).unwrap();
    let t = t_d(&f1, &f2, &flat, ScaleRange::Finite(0, 3)).unwrap();
    assert!(t.values().iter().all(|v| v.abs() < 1e-14));

    let g = DyadicFunction::random(3, 3, -1.0, 1.0, 4).unwrap();
    let h = DyadicFunction::random(3, 3, -1.0, 1.0, 5).unwrap();
    let lhs = t_d(&f1, &f2, &g.lin_comb(2.0, &h, -3.0).unwrap(), ScaleRange::Full).unwrap();
    let rhs = t_d(&f1, &f2, &g, ScaleRange::Full)
        .unwrap()
        .lin_comb(2.0, &t_d(&f1, &f2, &h, ScaleRange::Full).unwrap(), -3.0)
        .unwrap();
    for (a, b) in lhs.values().iter().zip(rhs.values()) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn zero_inputs() {
    let z = DyadicFunction::constant(3, 3, 0.0).unwrap();
    let r = DyadicFunction::random(3, 3, 0.0, 1.0, 9).unwrap();
    assert_eq!(lambda_dyadic(&[z.clone(), r.clone(), r.clone(), r.clone()]).unwrap(), 0.0);
    let fs = [r.clone(), r.clone(), r.clone(), z];
    assert_eq!(cs_split(&fs).unwrap().b, 0.0);
    assert_eq!(lambda_dyadic(&fs).unwrap(), 0.0);
}

#[test]
fn lambda_matches_telescoping_hand_computation() {
    // F_1 = F_2 = 1 and F_0 = F_3 = ψ_{[0,1)} in z: only Δ_0 survives, so Λ_d = ‖ψ‖² = 1.
    let psi = DyadicFunction::from_fn(3, 3, |x| if x[2] < 0.5 { 1.0 } else { -1.0 }).unwrap();
    let one = DyadicFunction::constant(3, 3, 1.0).unwrap();
    let v = lambda_dyadic(&[psi.clone(), one.clone(), one, psi]).unwrap();
    assert!((v - 1.0).abs() < 1e-14);
}

#[test]
fn cs_split_rejects_negative_inputs() {
    let r = DyadicFunction::random(2, 3, -1.0, 1.0, 1).unwrap();
    assert!(cs_split(&[r.clone(), r.clone(), r.clone(), r]).is_err());
}

/// Independent brute force of the first factor by expanding every cube.
fn brute_a(f: &[DyadicFunction; 4]) -> f64 {
    let levels = f[0].levels();
    let n = 1usize << levels;
    let h = 1.0 / n as f64;
    let val = |g: &DyadicFunction, x: usize, y: usize, z: usize| g.values()[(x * n + y) * n + z];
    let mut total = 0.0;
    // Scales k < 0 up to a deep cutoff, then k = 0..K.
    for k in -40i32..levels as i32 {
        let width = (-(k as f64)).exp2();
        let psi_amp = width.powf(-0.5);
        let phi_amp = width.powf(-0.5);
        let cells = if k >= 0 { n >> k } else { n };
        let count = if k >= 0 { 1usize << k } else { 1 };
        for i1 in 0..count {
            for i2 in 0..count {
                for i3 in 0..count {
                    let mut sum = 0.0;
                    for x in i1 * cells..(i1 + 1) * cells {
                        for xp in i1 * cells..(i1 + 1) * cells {
                            for y in i2 * cells..(i2 + 1) * cells {
                                for yp in i2 * cells..(i2 + 1) * cells {
                                    let mut p = 0.0;
                                    for z in i3 * cells..(i3 + 1) * cells {
                                        let left = if k >= 0 { z < i3 * cells + cells / 2 } else { true };
                                        let s = if left { psi_amp } else { -psi_amp };
                                        p += val(&f[0], x, y, z) * val(&f[1], xp, y, z) * val(&f[2], x, yp, z) * s * h;
                                    }
                                    sum += p * p * phi_amp.powi(4) * h.powi(4);
                                }
                            }
                        }
                    }
                    total += sum;
                }
            }
        }
    }
    total
}

#[test]
fn first_factor_matches_brute_force() {
    let fs = [
        DyadicFunction::random(2, 3, 0.0, 1.0, 21).unwrap(),
        DyadicFunction::random(2, 3, 0.0, 1.0, 22).unwrap(),
        DyadicFunction::random(2, 3, 0.0, 1.0, 23).unwrap(),
        DyadicFunction::random(2, 3, 0.0, 1.0, 24).unwrap(),
    ];
    let a = cs_split(&fs).unwrap().a;
    let b = brute_a(&fs);
    assert!((a - b).abs() < 1e-12 * b, "{a} vs {b}");
}

/// Lattice sum of `Λ_d` with the coarse scales truncated at `k = -40`.
#[test]
fn lambda_tail_matches_truncated_sum() {
    let fs = [
        DyadicFunction::random(2, 3, 0.0, 1.0, 31).unwrap(),
        DyadicFunction::random(2, 3, 0.0, 1.0, 32).unwrap(),
        DyadicFunction::random(2, 3, 0.0, 1.0, 33).unwrap(),
        DyadicFunction::random(2, 3, 0.0, 1.0, 34).unwrap(),
    ];
    let fine = t_d(&fs[1], &fs[2], &fs[3], ScaleRange::Finite(0, 2)).unwrap().inner(&fs[0]).unwrap();
    let mut coarse = 0.0;
    let n = 4usize;
    let val = |g: &DyadicFunction, x: usize, y: usize, z: usize| g.values()[(x * n + y) * n + z];
    for m in 1..=40 {
        let w = (-(m as f64)).exp2();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let e1: f64 = (0..n).map(|xp| val(&fs[1], xp, y, z)).sum::<f64>() / n as f64 * w;
                    let e2: f64 = (0..n).map(|yp| val(&fs[2], x, yp, z)).sum::<f64>() / n as f64 * w;
                    let d3: f64 = (0..n).map(|zp| val(&fs[3], x, y, zp)).sum::<f64>() / n as f64 * w;
                    coarse += val(&fs[0], x, y, z) * e1 * e2 * d3 / (n * n * n) as f64;
                }
            }
        }
    }
    let full = lambda_dyadic(&fs).unwrap();
    assert!((full - fine - coarse).abs() < 1e-13, "{full} vs {}", fine + coarse);
}

#[test]
fn identities_hold() {
    for c in check_identities(5, 3, 7).unwrap() {
        assert!(c.pass, "{} error {:e}", c.name, c.max_error);
    }
}
