//! Frequency-side forms: dense lattice sums and per-scale tensor products.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_common_grid, FormResult};
use crate::bumps::{ShiftSpec, SymbolPiece};
use crate::error::{Error, Result};
use crate::grid::{convolve_axis, signed_frequency, GridFunction};
use crate::symbol::mu_closed;

/// A multiplier on `ℝⁿ`.
pub trait Symbol: Sync {
    fn eval(&self, xi: &[f64]) -> Result<Complex64>;
}

impl<F: Fn(&[f64]) -> Complex64 + Sync> Symbol for F {
    fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        Ok(self(xi))
    }
}

/// `μ_n`, with the value 0 at the origin.
#[derive(Debug, Clone, Copy, Default)]
pub struct MuSymbol;

impl Symbol for MuSymbol {
    fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.iter().all(|&x| x == 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(Complex64::new(mu_closed(xi)?, 0.0))
    }
}

/// Sum of piece symbols.
#[derive(Debug, Clone)]
pub struct PieceSum(pub Vec<SymbolPiece>);

impl Symbol for PieceSum {
    fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if let Some(p) = self.0.iter().find(|p| p.dim() != xi.len()) {
            return Err(Error::Shape(format!("piece of dimension {} at a {}-point", p.dim(), xi.len())));
        }
        Ok(self.0.iter().map(|p| p.symbol(xi)).sum())
    }
}

/// Work cap for the dense lattice sum, counted in multiply-adds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseBudget {
    pub max_ops: u64,
}

impl DenseBudget {
    /// `cap^{2n}` with `cap` = 32, 16, 8 for n = 2, 3, ≥ 4.
    pub fn default_for(n: usize) -> Self {
        let cap: u64 = match n {
            0..=2 => 32,
            3 => 16,
            _ => 8,
        };
        Self { max_ops: cap.saturating_pow(2 * n as u32) }
    }
}

/// `(1/M)`-normalized FFT of `values` along `axis`.
fn partial_transform(f: &GridFunction, axis: usize) -> Vec<Complex64> {
    let sizes = f.sizes();
    let m = sizes[axis];
    let stride: usize = sizes[axis + 1..].iter().product();
    let outer: usize = sizes[..axis].iter().product();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut out = f.values().to_vec();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let norm = 1.0 / m as f64;
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * m * stride + inner;
            for (i, b) in buf.iter_mut().enumerate() {
                *b = out[base + i * stride];
            }
            fft.process(&mut buf);
            for (i, b) in buf.iter().enumerate() {
                out[base + i * stride] = b * norm;
            }
        }
    }
    out
}

/// `∫ F_0(x) Σ_k m(k/L) Π_j A_j(x; k_j) e^{2πi k_j x_{a_j}/L} dx`, where `A_j` is the
/// transform of `F_j` along axis `a_j`.
fn dense_sum(
    m: &dyn Symbol,
    f: &[GridFunction],
    axis_of: &[usize],
    budget: &DenseBudget,
) -> Result<Complex64> {
    let n = axis_of.len();
    let sizes = f[0].sizes().to_vec();
    let period = f[0].period();
    let points: usize = sizes.iter().product();
    let lat: Vec<usize> = axis_of.iter().map(|&a| sizes[a]).collect();
    let lattice: usize = lat.iter().product();
    let ops = (points as u64).saturating_mul(lattice as u64);
    if ops > budget.max_ops {
        return Err(Error::Budget(format!(
            "dense sum needs {ops} operations, budget is {}",
            budget.max_ops
        )));
    }
    // Symbol table in row-major order over (k_1, …, k_n).
    let mut table = Vec::with_capacity(lattice);
    let mut idx = vec![0usize; n];
    for _ in 0..lattice {
        let xi: Vec<f64> = idx
            .iter()
            .zip(&lat)
            .map(|(&i, &mj)| signed_frequency(i, mj) as f64 / period)
            .collect();
        table.push(m.eval(&xi)?);
        for q in (0..n).rev() {
            idx[q] += 1;
            if idx[q] < lat[q] {
                break;
            }
            idx[q] = 0;
        }
    }
    let coeffs: Vec<Vec<Complex64>> =
        f[1..].iter().zip(axis_of).map(|(g, &a)| partial_transform(g, a)).collect();
    let strides: Vec<usize> = (0..sizes.len()).map(|a| sizes[a + 1..].iter().product()).collect();
    let cell = f[0].cell_volume();

    let terms: Vec<Complex64> = (0..points)
        .into_par_iter()
        .map(|flat| {
            let f0 = f[0].values()[flat];
            if f0 == Complex64::new(0.0, 0.0) {
                return f0;
            }
            let b: Vec<Vec<Complex64>> = (0..n)
                .map(|j| {
                    let a = axis_of[j];
                    let mj = sizes[a];
                    let xa = (flat / strides[a]) % mj;
                    let base = flat - xa * strides[a];
                    let x = xa as f64 * period / mj as f64;
                    (0..mj)
                        .map(|i| {
                            let k = signed_frequency(i, mj) as f64;
                            coeffs[j][base + i * strides[a]]
                                * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k * x / period)
                        })
                        .collect()
                })
                .collect();
            // Contract the last index first.
            let mut cur = table.clone();
            for j in (0..n).rev() {
                let mj = lat[j];
                let rows = cur.len() / mj;
                cur = (0..rows)
                    .map(|r| cur[r * mj..(r + 1) * mj].iter().zip(&b[j]).map(|(c, v)| c * v).sum())
                    .collect();
            }
            f0 * cur[0]
        })
        .collect();
    Ok(terms.iter().sum::<Complex64>() * cell)
}

/// `Λ_m(F_0, …, F_n)` by the dense diagonal-multiplier sum.
pub fn lambda_m_dense(m: &dyn Symbol, f: &[GridFunction], budget: &DenseBudget) -> Result<FormResult> {
    let n = f.len().saturating_sub(1);
    if n < 1 {
        return Err(Error::InvalidArgument("need F_0..F_n with n >= 1".into()));
    }
    check_common_grid(f, Some(n))?;
    let axis_of: Vec<usize> = (0..n).collect();
    let value = dense_sum(m, f, &axis_of, budget)?;
    Ok(FormResult {
        value,
        error_estimate: 0.0,
        metadata: json!({
            "evaluator": "lambda-m-dense",
            "sizes": f[0].sizes(),
            "period": f[0].period(),
            "note": "exact lattice sum",
        }),
    })
}

/// One-dimensional frequency-side form: symbol on `(τ_1, …, τ_n)`, all acting on one variable.
pub fn commutator_spectral(m: &dyn Symbol, f: &[GridFunction], budget: &DenseBudget) -> Result<FormResult> {
    let n = f.len().saturating_sub(1);
    if n < 1 {
        return Err(Error::InvalidArgument("need f_0..f_n with n >= 1".into()));
    }
    check_common_grid(f, Some(1))?;
    let value = dense_sum(m, f, &vec![0; n], budget)?;
    Ok(FormResult {
        value,
        error_estimate: 0.0,
        metadata: json!({
            "evaluator": "commutator-spectral",
            "sizes": f[0].sizes(),
            "period": f[0].period(),
        }),
    })
}

/// Scales `k` at which any lattice frequency of the main axis can be hit.
fn grid_scale_range(piece: &SymbolPiece, f: &GridFunction) -> (i32, i32) {
    let a = piece.main_axis();
    let m = f.sizes()[a] as f64;
    let l = f.period();
    piece.scale_range(1.0 / l, m / (2.0 * l))
}

/// `Σ_k ∫ F_0 Π_j (F_j *_j kernel)` over the pieces, each at its own shifts.
///
/// `shifts`, when given, replaces the shifts stored in every piece. `scales`
/// restricts the summation; it must stay inside the scales the grid can resolve.
pub fn lambda_m_tensor(
    pieces: &[SymbolPiece],
    f: &[GridFunction],
    shifts: Option<&ShiftSpec>,
    scales: Option<(i32, i32)>,
) -> Result<FormResult> {
    let n = f.len().saturating_sub(1);
    if n < 1 {
        return Err(Error::InvalidArgument("need F_0..F_n with n >= 1".into()));
    }
    check_common_grid(f, Some(n))?;
    if let Some(p) = pieces.iter().find(|p| p.dim() != n) {
        return Err(Error::Shape(format!("piece of dimension {} for n = {n}", p.dim())));
    }
    let shifted: Vec<SymbolPiece>;
    let pieces = match shifts {
        Some(s) => {
            shifted = pieces.iter().map(|p| p.clone().with_shifts(s)).collect::<Result<_>>()?;
            &shifted[..]
        }
        None => pieces,
    };
    let mut tasks = Vec::new();
    for (pi, piece) in pieces.iter().enumerate() {
        let (lo, hi) = grid_scale_range(piece, &f[0]);
        let (k0, k1) = match scales {
            None => (lo, hi),
            Some((a, b)) => {
                if a > b || a < lo || b > hi {
                    return Err(Error::ScaleRange(format!(
                        "scales [{a}, {b}] outside the resolvable range [{lo}, {hi}]"
                    )));
                }
                (a, b)
            }
        };
        tasks.extend((k0..=k1).map(|k| (pi, k)));
    }
    let terms: Vec<Complex64> = tasks
        .par_iter()
        .map(|&(pi, k)| -> Result<Complex64> {
            let piece = &pieces[pi];
            let mut prod = f[0].clone();
            for j in 0..n {
                let g = convolve_axis(&f[j + 1], &piece.profiles[j], piece.axis_scale(j, k), j, piece.shifts[j])?;
                prod = prod.mul(&g)?;
            }
            Ok(prod.integral())
        })
        .collect::<Result<_>>()?;
    Ok(FormResult {
        value: terms.iter().sum(),
        error_estimate: 0.0,
        metadata: json!({
            "evaluator": "lambda-m-tensor",
            "sizes": f[0].sizes(),
            "period": f[0].period(),
            "pieces": pieces.len(),
            "terms": tasks.len(),
        }),
    })
}
