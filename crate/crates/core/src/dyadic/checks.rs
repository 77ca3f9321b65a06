//! Randomized checks of the exact dyadic identities.

use serde::Serialize;

use super::*;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(name: &'static str, max_error: f64, tolerance: f64) -> Self {
        Self { name, max_error, tolerance, pass: max_error <= tolerance }
    }
}

const EQUALITY_TRIALS: usize = 4;

fn max_abs_diff(a: &DyadicFunction, b: &DyadicFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn all_intervals(levels: u32) -> Vec<DyadicInterval> {
    (0..levels)
        .flat_map(|k| (0..1u64 << k).map(move |i| DyadicInterval { scale: k, index: i }))
        .collect()
}

/// Runs every identity on `trials` random inputs with `levels` dyadic levels.
pub fn check_identities(levels: u32, trials: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    if levels == 0 || trials == 0 {
        return Err(Error::InvalidArgument("need at least one level and one trial".into()));
    }
    let l3 = levels;
    let mut out = Vec::new();

    let psis: Vec<DyadicFunction> =
        all_intervals(levels).into_iter().map(|i| haar_function(levels, i)).collect::<Result<_>>()?;
    let mut ortho = 0.0f64;
    for (a, p) in psis.iter().enumerate() {
        for (b, q) in psis.iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            ortho = ortho.max((p.inner(q)? - want).abs());
        }
    }
    out.push(IdentityCheck::new("haar orthonormality", ortho, 1e-12));

    let (mut parseval, mut tower, mut tele, mut repro) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut td_tele, mut b_norm, mut cs, mut cs_eq, mut split) = (0.0f64, 0.0f64, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for t in 0..trials {
        let s = seed.wrapping_add(1000 * t as u64);
        let f = DyadicFunction::random(levels, 1, -1.0, 1.0, s)?;
        let mean = f.integral();
        let g = f.lin_comb(1.0, &DyadicFunction::constant(levels, 1, mean)?, -1.0)?;
        let energy: f64 = (0..levels).map(|k| martingale_diff(&g, k).map(|d| d.l2_norm_squared())).sum::<Result<f64>>()?;
        parseval = parseval.max((energy - g.l2_norm_squared()).abs() / g.l2_norm_squared());

        for k in 0..=levels {
            for m in 0..=levels {
                let lhs = f.avg_axis(0, k)?.avg_axis(0, m)?;
                tower = tower.max(max_abs_diff(&lhs, &f.avg_axis(0, k.min(m))?));
            }
        }
        for a in 0..=levels {
            for b in a..=levels {
                let mut sum = DyadicFunction::constant(levels, 1, 0.0)?;
                for k in a..b {
                    sum = sum.lin_comb(1.0, &martingale_diff(&f, k)?, 1.0)?;
                }
                let rhs = f.avg_axis(0, b)?.lin_comb(1.0, &f.avg_axis(0, a)?, -1.0)?;
                tele = tele.max(max_abs_diff(&sum, &rhs));
            }
        }
        for k in 0..levels {
            let mut sum = DyadicFunction::constant(levels, 1, 0.0)?;
            for i in 0..1u64 << k {
                let iv = DyadicInterval { scale: k, index: i };
                sum = sum.lin_comb(1.0, &haar_function(levels, iv)?, haar_coeff(&f, iv)?)?;
            }
            repro = repro.max(max_abs_diff(&sum, &martingale_diff(&f, k)?));
        }

        let f3 = DyadicFunction::random(l3, 3, 0.0, 1.0, s + 1)?;
        let one = DyadicFunction::constant(l3, 3, 1.0)?;
        let td = t_d(&one, &one, &f3, ScaleRange::Finite(0, l3))?;
        let want = f3.lin_comb(1.0, &f3.avg_axis(2, 0)?, -1.0)?;
        td_tele = td_tele.max(max_abs_diff(&td, &want));

        let fs: [DyadicFunction; 4] = [
            DyadicFunction::random(l3, 3, 0.0, 1.0, s + 2)?,
            DyadicFunction::random(l3, 3, 0.0, 1.0, s + 3)?,
            DyadicFunction::random(l3, 3, 0.0, 1.0, s + 4)?,
            f3.clone(),
        ];
        let split_ab = cs_split(&fs)?;
        b_norm = b_norm.max((split_ab.b - f3.l2_norm_squared()).abs() / f3.l2_norm_squared());
        let lam = lambda_dyadic(&fs)?;
        cs = cs.max((lam.abs() - split_ab.bound()) / split_ab.bound());

        if t < EQUALITY_TRIALS {
            let eq = [f3.clone(), one.clone(), one.clone(), f3.clone()];
            // On ℤ the coarse cubes see F_1 = 1 only inside the unit cube, so equality is checked for k ≥ 0.
            let fine = ScaleRange::Finite(0, l3);
            let eq_split = cs_split_range(&eq, fine)?;
            cs_eq = cs_eq.max((lambda_dyadic_range(&eq, fine)? - eq_split.bound()).abs() / eq_split.bound());
        }

        // Sixteen evaluations per trial, so a coarser grid.
        let ls = l3.min(4);
        let signed: [DyadicFunction; 4] = [
            DyadicFunction::random(ls, 3, -1.0, 1.0, s + 5)?,
            DyadicFunction::random(ls, 3, -1.0, 1.0, s + 6)?,
            DyadicFunction::random(ls, 3, -1.0, 1.0, s + 7)?,
            DyadicFunction::random(ls, 3, -1.0, 1.0, s + 8)?,
        ];
        let parts: Vec<(DyadicFunction, DyadicFunction)> = signed.iter().map(|g| g.sign_split()).collect();
        let mut recombined = 0.0;
        for mask in 0..16u32 {
            let pick = |j: usize| if mask >> j & 1 == 0 { (&parts[j].0, 1.0) } else { (&parts[j].1, -1.0) };
            let (g0, s0) = pick(0);
            let (g1, s1) = pick(1);
            let (g2, s2) = pick(2);
            let (g3, s3) = pick(3);
            let v = lambda_dyadic(&[g0.clone(), g1.clone(), g2.clone(), g3.clone()])?;
            recombined += s0 * s1 * s2 * s3 * v;
        }
        let direct = lambda_dyadic(&signed)?;
        split = split.max((recombined - direct).abs() / direct.abs().max(1e-300));
    }
    out.push(IdentityCheck::new("haar parseval", parseval, 1e-12));
    out.push(IdentityCheck::new("martingale tower property", tower, 1e-12));
    out.push(IdentityCheck::new("telescoping differences", tele, 1e-12));
    out.push(IdentityCheck::new("reproducing formula", repro, 1e-12));
    out.push(IdentityCheck::new("t_d telescoping", td_tele, 1e-12));
    out.push(IdentityCheck::new("second factor equals l2 norm", b_norm, 1e-10));
    out.push(IdentityCheck::new("cauchy-schwarz bound", cs.max(0.0), 1e-12));
    out.push(IdentityCheck::new("cauchy-schwarz equality", cs_eq, 1e-10));
    out.push(IdentityCheck::new("sign split recombination", split, 1e-10));
    Ok(out)
}
