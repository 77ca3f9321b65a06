//! Haar model on the unit cube: martingale averages and differences, `T_d`, `Λ_d`
//! and its two Cauchy–Schwarz factors.
//!
//! Functions are piecewise constant on `2^K` cells per axis of `[0,1)^d`, extended
//! by zero. Scales `k < 0` see the whole cube inside the left half of
//! `[0, 2^{-k})`; their contribution is summed in closed form.

mod checks;

pub use checks::{check_identities, IdentityCheck};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// `Σ_{m≥1} 2^{-3m}`.
const COARSE_TAIL: f64 = 1.0 / 7.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicInterval {
    pub scale: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub fn new(scale: u32, index: u64) -> Result<Self> {
        if scale >= 63 || index >= 1u64 << scale {
            return Err(Error::InvalidArgument(format!("no dyadic interval at scale {scale}, index {index}")));
        }
        Ok(Self { scale, index })
    }

    pub fn len(&self) -> f64 {
        (-(self.scale as f64)).exp2()
    }

    pub fn left(&self) -> DyadicInterval {
        Self { scale: self.scale + 1, index: 2 * self.index }
    }

    pub fn right(&self) -> DyadicInterval {
        Self { scale: self.scale + 1, index: 2 * self.index + 1 }
    }

    /// `[a, b)` in units of cells at level `levels`.
    fn cells(&self, levels: u32) -> (usize, usize) {
        let w = 1usize << (levels - self.scale);
        let a = self.index as usize * w;
        (a, a + w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicFunction {
    levels: u32,
    dim: usize,
    values: Vec<f64>,
}

impl DyadicFunction {
    pub fn new(levels: u32, dim: usize, values: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Shape(format!("dimension {dim} not in 1..=3")));
        }
        if levels == 0 || levels as usize * dim > 30 {
            return Err(Error::Shape(format!("{levels} levels in {dim} dimensions")));
        }
        let total = 1usize << (levels as usize * dim);
        if values.len() != total {
            return Err(Error::Shape(format!("expected {total} values, got {}", values.len())));
        }
        Ok(Self { levels, dim, values })
    }

    pub fn constant(levels: u32, dim: usize, c: f64) -> Result<Self> {
        let total = 1usize << (levels as usize * dim).min(31);
        Self::new(levels, dim, vec![c; total])
    }

    /// Samples `f` at cell centers.
    pub fn from_fn<F: FnMut(&[f64]) -> f64>(levels: u32, dim: usize, mut f: F) -> Result<Self> {
        let n = 1usize << levels;
        let total = 1usize << (levels as usize * dim).min(31);
        let h = 1.0 / n as f64;
        let mut x = vec![0.0; dim];
        let values = (0..total)
            .map(|flat| {
                let mut rem = flat;
                for a in (0..dim).rev() {
                    x[a] = ((rem % n) as f64 + 0.5) * h;
                    rem /= n;
                }
                f(&x)
            })
            .collect();
        Self::new(levels, dim, values)
    }

    /// Uniform values in `[lo, hi)`.
    pub fn random(levels: u32, dim: usize, lo: f64, hi: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = 1usize << (levels as usize * dim).min(31);
        Self::new(levels, dim, (0..total).map(|_| rng.gen_range(lo..hi)).collect())
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn side(&self) -> usize {
        1 << self.levels
    }

    fn cell_volume(&self) -> f64 {
        (-((self.levels as usize * self.dim) as f64)).exp2()
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.levels != other.levels || self.dim != other.dim {
            return Err(Error::Shape("dyadic functions on different grids".into()));
        }
        Ok(())
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.cell_volume())
    }

    pub fn l2_norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.cell_volume()
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { values, ..self.clone() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * y).collect();
        Ok(Self { values, ..self.clone() })
    }

    /// `max(±f, 0)`.
    pub fn sign_split(&self) -> (Self, Self) {
        let pos = self.values.iter().map(|v| v.max(0.0)).collect();
        let neg = self.values.iter().map(|v| (-v).max(0.0)).collect();
        (Self { values: pos, ..self.clone() }, Self { values: neg, ..self.clone() })
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        Ok(())
    }

    fn check_scale(&self, k: u32, inclusive: bool) -> Result<()> {
        let ok = if inclusive { k <= self.levels } else { k < self.levels };
        if !ok {
            return Err(Error::InvalidArgument(format!("scale {k} out of range for {} levels", self.levels)));
        }
        Ok(())
    }

    /// `𝔼_k` along `axis`; `k = K` is the identity.
    pub fn avg_axis(&self, axis: usize, k: u32) -> Result<Self> {
        self.check_axis(axis)?;
        self.check_scale(k, true)?;
        let n = self.side();
        let block = 1usize << (self.levels - k);
        let stride = n.pow((self.dim - 1 - axis) as u32);
        let mut out = self.values.clone();
        let outer = self.values.len() / (n * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * n * stride + inner;
                for b in (0..n).step_by(block) {
                    let mean = (b..b + block).map(|i| self.values[base + i * stride]).sum::<f64>() / block as f64;
                    for i in b..b + block {
                        out[base + i * stride] = mean;
                    }
                }
            }
        }
        Ok(Self { values: out, ..self.clone() })
    }

    /// `Δ_k = 𝔼_{k+1} − 𝔼_k` along `axis`.
    pub fn diff_axis(&self, axis: usize, k: u32) -> Result<Self> {
        self.check_scale(k, false)?;
        self.avg_axis(axis, k + 1)?.lin_comb(1.0, &self.avg_axis(axis, k)?, -1.0)
    }

    /// `∫ f` along `axis` over `[0,1)`, kept as a function constant in that variable.
    fn axis_integral(&self, axis: usize) -> Result<Self> {
        self.avg_axis(axis, 0)
    }
}

fn check_1d(f: &DyadicFunction) -> Result<()> {
    if f.dim != 1 {
        return Err(Error::Shape(format!("expected a 1-d dyadic function, got dimension {}", f.dim)));
    }
    Ok(())
}

/// `ψ_I = |I|^{-1/2}(1_{I_L} − 1_{I_R})` on `levels` cells.
pub fn haar_function(levels: u32, interval: DyadicInterval) -> Result<DyadicFunction> {
    if interval.scale >= levels {
        return Err(Error::InvalidArgument(format!("interval scale {} needs more than {levels} levels", interval.scale)));
    }
    let mut values = vec![0.0; 1 << levels];
    let amp = interval.len().powf(-0.5);
    let (a, m) = interval.left().cells(levels);
    let (_, b) = interval.right().cells(levels);
    values[a..m].iter_mut().for_each(|v| *v = amp);
    values[m..b].iter_mut().for_each(|v| *v = -amp);
    DyadicFunction::new(levels, 1, values)
}

/// `⟨f, ψ_I⟩` by exact cell sums.
pub fn haar_coeff(f: &DyadicFunction, interval: DyadicInterval) -> Result<f64> {
    check_1d(f)?;
    f.inner(&haar_function(f.levels, interval)?)
}

pub fn martingale_avg(f: &DyadicFunction, k: u32) -> Result<DyadicFunction> {
    check_1d(f)?;
    f.check_scale(k, false)?;
    f.avg_axis(0, k)
}

pub fn martingale_diff(f: &DyadicFunction, k: u32) -> Result<DyadicFunction> {
    check_1d(f)?;
    f.diff_axis(0, k)
}

/// Scales summed in `T_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScaleRange {
    /// `a ≤ k < b`, both within `[0, K]`.
    Finite(u32, u32),
    /// Every `k ∈ ℤ`: `k < 0` in closed form, `k ≥ K` vanishes.
    Full,
}

fn check_3d(f: &[&DyadicFunction]) -> Result<()> {
    for g in f {
        if g.dim != 3 {
            return Err(Error::Shape(format!("expected 3-d dyadic functions, got dimension {}", g.dim)));
        }
        g.same_grid(f[0])?;
    }
    Ok(())
}

/// `Σ_k (𝔼¹_k F_1)(𝔼²_k F_2)(Δ³_k F_3)` on the unit cube.
pub fn t_d(
    f1: &DyadicFunction,
    f2: &DyadicFunction,
    f3: &DyadicFunction,
    range: ScaleRange,
) -> Result<DyadicFunction> {
    check_3d(&[f1, f2, f3])?;
    let levels = f1.levels;
    let (a, b) = match range {
        ScaleRange::Finite(a, b) => {
            if a > b || b > levels {
                return Err(Error::InvalidArgument(format!("scale range [{a}, {b}) outside [0, {levels}]")));
            }
            (a, b)
        }
        ScaleRange::Full => (0, levels),
    };
    let mut acc = vec![0.0; f1.values.len()];
    for k in a..b {
        let e1 = f1.avg_axis(0, k)?;
        let e2 = f2.avg_axis(1, k)?;
        let d3 = f3.diff_axis(2, k)?;
        for (i, s) in acc.iter_mut().enumerate() {
            *s += e1.values[i] * e2.values[i] * d3.values[i];
        }
    }
    if range == ScaleRange::Full {
        let (i1, i2, i3) = (f1.axis_integral(0)?, f2.axis_integral(1)?, f3.axis_integral(2)?);
        for (i, s) in acc.iter_mut().enumerate() {
            *s += COARSE_TAIL * i1.values[i] * i2.values[i] * i3.values[i];
        }
    }
    DyadicFunction::new(levels, 3, acc)
}

/// `Λ_d = ⟨T_d(F_1, F_2, F_3), F_0⟩` over all scales.
pub fn lambda_dyadic(f: &[DyadicFunction; 4]) -> Result<f64> {
    lambda_dyadic_range(f, ScaleRange::Full)
}

pub fn lambda_dyadic_range(f: &[DyadicFunction; 4], range: ScaleRange) -> Result<f64> {
    t_d(&f[1], &f[2], &f[3], range)?.inner(&f[0])
}

/// The squared Cauchy–Schwarz factors of `Λ_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CsSplit {
    pub a: f64,
    pub b: f64,
}

impl CsSplit {
    pub fn bound(&self) -> f64 {
        (self.a * self.b).sqrt()
    }
}

/// Index of cell `(x, y, z)` in a side-`n` cube.
fn at(n: usize, x: usize, y: usize, z: usize) -> usize {
    (x * n + y) * n + z
}

/// `Σ_Q Σ_{x,x'∈I_1} Σ_{y,y'∈I_2} (Σ_{z∈I_3} s(z) F_0(x,y,z) F_1(x',y,z) F_2(x,y',z))²`
/// over cubes of side `block` cells, with `s` the Haar sign on `I_3` or `+1`.
///
/// The `x'` and `y'` sums are taken first as Gram matrices in `(z, z')`.
fn first_factor_scale(f: &[DyadicFunction; 4], block: usize, haar: bool) -> f64 {
    let n = f[0].side();
    let (f0, f1, f2) = (&f[0].values, &f[1].values, &f[2].values);
    let per_axis = n / block;
    let sign = |z: usize| if !haar || z % block < block / 2 { 1.0 } else { -1.0 };
    let cubes: Vec<(usize, usize, usize)> = (0..per_axis)
        .flat_map(|i| (0..per_axis).flat_map(move |j| (0..per_axis).map(move |l| (i, j, l))))
        .collect();
    let terms: Vec<f64> = cubes
        .par_iter()
        .map(|&(i1, i2, i3)| {
            let (x0, y0, z0) = (i1 * block, i2 * block, i3 * block);
            let bb = block * block;
            // g1[y][z][z'] = Σ_{x'} F_1(x',y,z) F_1(x',y,z'), g2[x][z][z'] likewise in y'; upper triangles only.
            let mut g1 = vec![0.0; block * bb];
            let mut g2 = vec![0.0; block * bb];
            for t in 0..block {
                for r in 0..block {
                    let c1 = &f1[at(n, x0 + r, y0 + t, z0)..at(n, x0 + r, y0 + t, z0) + block];
                    let c2 = &f2[at(n, x0 + t, y0 + r, z0)..at(n, x0 + t, y0 + r, z0) + block];
                    for za in 0..block {
                        let (a1, a2) = (c1[za], c2[za]);
                        let row1 = &mut g1[t * bb + za * block..t * bb + za * block + block];
                        for zb in za..block {
                            row1[zb] += a1 * c1[zb];
                        }
                        let row2 = &mut g2[t * bb + za * block..t * bb + za * block + block];
                        for zb in za..block {
                            row2[zb] += a2 * c2[zb];
                        }
                    }
                }
            }
            let mut total = 0.0;
            for x in 0..block {
                for y in 0..block {
                    let w: Vec<f64> = (0..block).map(|z| sign(z0 + z) * f0[at(n, x0 + x, y0 + y, z0 + z)]).collect();
                    for za in 0..block {
                        if w[za] == 0.0 {
                            continue;
                        }
                        let row1 = &g1[y * bb + za * block..y * bb + (za + 1) * block];
                        let row2 = &g2[x * bb + za * block..x * bb + (za + 1) * block];
                        let off: f64 = (za + 1..block).map(|zb| w[zb] * row1[zb] * row2[zb]).sum();
                        total += w[za] * (w[za] * row1[za] * row2[za] + 2.0 * off);
                    }
                }
            }
            total
        })
        .collect();
    terms.iter().sum()
}

/// Cube sums of the two factors, all scales included.
pub fn cs_split(f: &[DyadicFunction; 4]) -> Result<CsSplit> {
    cs_split_range(f, ScaleRange::Full)
}

/// Cube sums of the two factors over the cubes of the given scales.
pub fn cs_split_range(f: &[DyadicFunction; 4], range: ScaleRange) -> Result<CsSplit> {
    check_3d(&[&f[0], &f[1], &f[2], &f[3]])?;
    let (k_lo, k_hi) = match range {
        ScaleRange::Finite(a, b) if a <= b && b <= f[0].levels => (a, b),
        ScaleRange::Finite(a, b) => {
            return Err(Error::InvalidArgument(format!("scale range [{a}, {b}) outside [0, {}]", f[0].levels)))
        }
        ScaleRange::Full => (0, f[0].levels),
    };
    let full = range == ScaleRange::Full;
    if f.iter().any(|g| g.values.iter().any(|&v| v < 0.0)) {
        return Err(Error::InvalidArgument("Cauchy–Schwarz split needs nonnegative inputs".into()));
    }
    let levels = f[0].levels;
    let n = f[0].side();
    let h = 1.0 / n as f64;
    let mut a: f64 = (k_lo..k_hi)
        .map(|k| (3.0 * k as f64).exp2() * first_factor_scale(f, 1 << (levels - k), true))
        .sum();
    if full {
        // k < 0: the cube sits in the left half of [0, 2^m)³, weight Σ 2^{-3m}.
        a += COARSE_TAIL * first_factor_scale(f, n, false);
    }
    a *= h.powi(6);

    let f3 = &f[3];
    let mut b = 0.0;
    for k in k_lo..k_hi {
        b += f3.diff_axis(2, k)?.l2_norm_squared();
    }
    if full {
        b += f3.axis_integral(2)?.l2_norm_squared();
    }
    Ok(CsSplit { a, b })
}

#[cfg(test)]
mod tests;
