//! Sector enumeration and threshold-function counting by LP certification.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rayon::prelude::*;
use serde::Serialize;

use super::SectorMap;
use crate::error::{Error, Result};

/// Minimum certified margin for a strict sign pattern in the unit box.
pub const LP_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CertifiedSector {
    pub sector: SectorMap,
    /// A point in `[-1,1]^n` realizing the signs with margin at least [`LP_MARGIN`].
    pub witness: Vec<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorEnumeration {
    pub n: usize,
    pub count: usize,
    pub sectors: Vec<CertifiedSector>,
}

/// Maximizes `t` subject to `s_r·⟨rows_r, z⟩ ≥ t`, `z ∈ [-1,1]^d`, `t ≤ 1`.
fn max_margin(rows: &[Vec<f64>], signs: &[i8]) -> Result<(f64, Vec<f64>)> {
    let d = rows[0].len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let z: Vec<_> = (0..d).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    let t = lp.add_var(1.0, (-1.0, 1.0));
    for (row, &s) in rows.iter().zip(signs) {
        let mut coeffs: Vec<_> = z.iter().zip(row).map(|(&v, &c)| (v, s as f64 * c)).collect();
        coeffs.push((t, -1.0));
        lp.add_constraint(&coeffs, ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
    Ok((sol[t], z.iter().map(|&v| sol[v]).collect()))
}

fn bits(mask: usize, width: usize) -> impl Iterator<Item = f64> {
    (0..width).map(move |j| (mask >> j & 1) as f64)
}

/// All realizable sign maps of the arrangement `ξ_n + α·ξ' = 0`, `α ∈ {0,1}^{n-1}`.
pub fn enumerate_sectors(n: usize) -> Result<SectorEnumeration> {
    if !(2..=5).contains(&n) {
        return Err(Error::InvalidArgument(format!("sector enumeration needs 2 <= n <= 5, got {n}")));
    }
    let m = n - 1;
    let planes = 1usize << m;
    // Row for α: coefficients of (ξ_1..ξ_{n-1}, ξ_n).
    let rows: Vec<Vec<f64>> = (0..planes)
        .map(|mask| bits(mask, m).chain(std::iter::once(1.0)).collect())
        .collect();
    let candidates: Vec<usize> = (0..(1usize << planes)).collect();
    let found: Vec<Option<CertifiedSector>> = candidates
        .par_iter()
        .map(|&code| {
            let signs: Vec<i8> = (0..planes).map(|p| if code >> p & 1 == 1 { 1 } else { -1 }).collect();
            let (margin, witness) = max_margin(&rows, &signs)?;
            if margin < LP_MARGIN || !verify(&rows, &signs, &witness) {
                return Ok(None);
            }
            Ok(Some(CertifiedSector { sector: SectorMap { n, signs }, witness, margin }))
        })
        .collect::<Result<_>>()?;
    let sectors: Vec<_> = found.into_iter().flatten().collect();
    Ok(SectorEnumeration { n, count: sectors.len(), sectors })
}

/// Independent recheck of a witness in plain arithmetic.
fn verify(rows: &[Vec<f64>], signs: &[i8], z: &[f64]) -> bool {
    rows.iter().zip(signs).all(|(row, &s)| {
        let v: f64 = row.iter().zip(z).map(|(a, b)| a * b).sum();
        s as f64 * v >= 0.5 * LP_MARGIN
    })
}

/// Number of boolean functions on `{-1,1}^m` of the form `sgn(a + ⟨x,b⟩)`.
pub fn count_threshold_functions(m: usize) -> Result<u64> {
    if !(1..=4).contains(&m) {
        return Err(Error::InvalidArgument(format!("threshold counting needs 1 <= m <= 4, got {m}")));
    }
    let vertices = 1usize << m;
    // Row for x: coefficients of (a, b_1..b_m).
    let rows: Vec<Vec<f64>> = (0..vertices)
        .map(|mask| {
            std::iter::once(1.0)
                .chain(bits(mask, m).map(|b| 2.0 * b - 1.0))
                .collect()
        })
        .collect();
    let total = 1usize << vertices;
    let hits: Vec<bool> = (0..total)
        .into_par_iter()
        .map(|code| {
            let signs: Vec<i8> =
                (0..vertices).map(|v| if code >> v & 1 == 1 { 1 } else { -1 }).collect();
            let (margin, z) = max_margin(&rows, &signs)?;
            Ok(margin >= LP_MARGIN && verify(&rows, &signs, &z))
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().filter(|&h| h).count() as u64)
}
