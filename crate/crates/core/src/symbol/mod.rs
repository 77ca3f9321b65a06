//! The multiplier μ_n: integral and closed-form evaluation, its singular
//! hyperplanes, sectors and the smooth-symbol probe.

mod dd;
mod sectors;
mod smooth;

pub use sectors::{count_threshold_functions, enumerate_sectors, SectorEnumeration, LP_MARGIN};
pub use smooth::{check_standard_symbol, OrderStat, Region, SmoothConfig, SymbolReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use dd::Dd;

/// Default Monte Carlo seed.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Relative size below which a leading coordinate is treated as zero.
const REDUCTION_THRESHOLD: f64 = 1e-8;

/// A point `ξ ∈ ℝⁿ`, `n ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPoint {
    coords: Vec<f64>,
}

impl FrequencyPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument("a frequency point needs n >= 2".into()));
        }
        Ok(Self { coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `η = α_2ξ_2 + … + α_{n-1}ξ_{n-1} + ξ_n` for `α_tail = (α_2..α_{n-1})`.
    pub fn slice_eta(&self, alpha_tail: &[f64]) -> f64 {
        slice_eta(&self.coords, alpha_tail)
    }
}

impl AsRef<[f64]> for FrequencyPoint {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

fn slice_eta(xi: &[f64], alpha_tail: &[f64]) -> f64 {
    let n = xi.len();
    assert_eq!(alpha_tail.len(), n - 2, "tail has n-2 entries");
    xi[n - 1] + alpha_tail.iter().zip(&xi[1..n - 1]).map(|(a, x)| a * x).sum::<f64>()
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_point(xi: &[f64]) -> Result<()> {
    if xi.len() < 2 {
        return Err(Error::InvalidArgument("a frequency point needs n >= 2".into()));
    }
    if xi.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coordinate".into()));
    }
    if xi.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroPoint);
    }
    Ok(())
}

/// `μ_n(ξ)` from the closed piecewise-rational formula.
pub fn mu_closed(xi: &[f64]) -> Result<f64> {
    check_point(xi)?;
    Ok(mu_closed_unchecked(xi))
}

pub(crate) fn mu_closed_unchecked(xi: &[f64]) -> f64 {
    let n = xi.len();
    let cutoff = REDUCTION_THRESHOLD * norm(xi);
    if xi[..n - 1].iter().any(|x| x.abs() < cutoff) {
        let mut reduced: Vec<f64> =
            xi[..n - 1].iter().copied().filter(|x| x.abs() >= cutoff).collect();
        reduced.push(xi[n - 1]);
        if reduced.len() == 1 {
            return sign(xi[n - 1]);
        }
        return closed_formula(&reduced, None);
    }
    closed_formula(xi, None)
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `c_n/(ξ_1…ξ_{n-1}) Σ_α (−1)^{|α|} s_α t_α^{n-1}` with `t_α = ξ_n + α·ξ`.
///
/// `s_α = sgn(t_α)` unless frozen signs are supplied.
fn closed_formula(xi: &[f64], frozen: Option<&[i8]>) -> f64 {
    let n = xi.len();
    let m = n - 1;
    let mut sum = Dd::ZERO;
    for mask in 0..(1usize << m) {
        let mut t = Dd::from(xi[m]);
        for (j, &x) in xi[..m].iter().enumerate() {
            if mask >> j & 1 == 1 {
                t = t.add(Dd::from(x));
            }
        }
        let s = match frozen {
            Some(signs) => signs[mask] as f64,
            None => t.signum(),
        };
        if s == 0.0 {
            continue;
        }
        let mut term = t.powi((n - 1) as u32);
        if s < 0.0 {
            term = term.neg();
        }
        if mask.count_ones() % 2 == 1 {
            term = term.neg();
        }
        sum = sum.add(term);
    }
    let mut denom = Dd::from(1.0);
    for &x in &xi[..m] {
        denom = denom.mul(Dd::from(x));
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    denom = denom.mul(Dd::from(fact));
    let value = sum.div(denom).to_f64();
    if n.is_multiple_of(2) {
        -value
    } else {
        value
    }
}

/// Closed formula with the absolute-value signs frozen to a sector's sign map.
pub fn mu_sector_rational(xi: &[f64], signs: &[i8]) -> Result<f64> {
    check_point(xi)?;
    if signs.len() != 1 << (xi.len() - 1) {
        return Err(Error::Shape("sign map has the wrong length".into()));
    }
    if xi[..xi.len() - 1].contains(&0.0) {
        return Err(Error::InvalidArgument("frozen formula needs nonzero ξ_1..ξ_{n-1}".into()));
    }
    Ok(closed_formula(xi, Some(signs)))
}

/// α-quadrature used by [`mu_quadrature`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum AlphaQuadrature {
    /// Tensor Gauss–Legendre; low accuracy because the integrand jumps.
    GaussLegendre { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for AlphaQuadrature {
    fn default() -> Self {
        AlphaQuadrature::MonteCarlo { samples: 1_000_000, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuEstimate {
    pub value: f64,
    /// Standard error; only Monte Carlo provides one.
    pub stderr: Option<f64>,
    pub low_accuracy: bool,
}

/// Average of `sgn(α·ξ' + ξ_n)` over `α ∈ [0,1]^{n-1}`.
pub fn mu_quadrature(xi: &[f64], rule: AlphaQuadrature) -> Result<MuEstimate> {
    check_point(xi)?;
    let n = xi.len();
    let m = n - 1;
    match rule {
        AlphaQuadrature::GaussLegendre { nodes } => {
            if nodes == 0 {
                return Err(Error::InvalidArgument("need at least one node".into()));
            }
            let gl = GaussLegendre::cached(nodes);
            let pts: Vec<(f64, f64)> = gl.on(0.0, 1.0).collect();
            let mut idx = vec![0usize; m];
            let mut acc = 0.0;
            loop {
                let mut w = 1.0;
                let mut t = xi[m];
                for (j, &i) in idx.iter().enumerate() {
                    w *= pts[i].1;
                    t += pts[i].0 * xi[j];
                }
                acc += w * sign(t);
                let mut j = 0;
                while j < m {
                    idx[j] += 1;
                    if idx[j] < nodes {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == m {
                    break;
                }
            }
            Ok(MuEstimate { value: acc, stderr: None, low_accuracy: true })
        }
        AlphaQuadrature::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidArgument("need at least two samples".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..samples {
                let mut t = xi[m];
                for &x in &xi[..m] {
                    t += rng.gen::<f64>() * x;
                }
                let s = sign(t);
                sum += s;
                sum_sq += s * s;
            }
            let k = samples as f64;
            let mean = sum / k;
            let var = ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0);
            Ok(MuEstimate { value: mean, stderr: Some((var / k).sqrt()), low_accuracy: false })
        }
    }
}

/// Batch Monte Carlo with per-point seeds derived from `seed`, deterministic under parallelism.
pub fn mu_quadrature_batch(points: &[Vec<f64>], samples: usize, seed: u64) -> Result<Vec<MuEstimate>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let s = seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            mu_quadrature(p, AlphaQuadrature::MonteCarlo { samples, seed: s })
        })
        .collect()
}

/// `μ_n(ξ) = ∫ μ_2(ξ_1, η_α) dα` over the tail variables.
///
/// Each tail variable is integrated with `nodes`-point Gauss–Legendre on every
/// segment between the values where some vertex of the remaining cube meets a
/// kink of `μ_2(ξ_1, ·)` at `0` or `−ξ_1`.
pub fn mu_slice(xi: &[f64], nodes: usize) -> Result<f64> {
    check_point(xi)?;
    let n = xi.len();
    if n == 2 {
        return mu_closed(xi);
    }
    if xi[0] == 0.0 {
        return Err(Error::InvalidArgument("slice formula needs ξ_1 ≠ 0".into()));
    }
    if nodes == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    let gl = GaussLegendre::cached(nodes);
    let tail: Vec<f64> = xi[1..n - 1].to_vec();
    Ok(slice_level(xi[0], &tail, xi[n - 1], &gl))
}

fn mu2(x1: f64, eta: f64) -> f64 {
    closed_formula(&[x1, eta], None)
}

/// `∫_{[0,1]^d} μ_2(x1, base + α·c) dα`.
fn slice_level(x1: f64, c: &[f64], base: f64, gl: &GaussLegendre) -> f64 {
    let Some((&cj, rest)) = c.split_first() else {
        return mu2(x1, base);
    };
    if cj == 0.0 {
        return slice_level(x1, rest, base, gl);
    }
    let mut breaks = vec![0.0, 1.0];
    for mask in 0..(1usize << rest.len()) {
        let vertex: f64 = rest
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v)
            .sum();
        for kink in [0.0, -x1] {
            let a = (kink - base - vertex) / cj;
            if a > 0.0 && a < 1.0 {
                breaks.push(a);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        for (a, wt) in gl.on(w[0], w[1]) {
            acc += wt * slice_level(x1, rest, base + a * cj, gl);
        }
    }
    acc
}

/// Distance from `ξ` to the nearest plane `ξ_n + α·ξ' = 0`, `α ∈ {0,1}^{n-1}`.
pub fn bad_set_distance(xi: &[f64]) -> f64 {
    let n = xi.len();
    let m = n - 1;
    let mut best = f64::INFINITY;
    for mask in 0..(1usize << m) {
        let mut t = xi[m];
        for (j, &x) in xi[..m].iter().enumerate() {
            if mask >> j & 1 == 1 {
                t += x;
            }
        }
        let d = t.abs() / ((mask.count_ones() + 1) as f64).sqrt();
        best = best.min(d);
    }
    best
}

/// A sign map on `{0,1}^{n-1}`, indexed by bitmask (bit `j` ↔ `α_{j+1}`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorMap {
    pub n: usize,
    pub signs: Vec<i8>,
}

impl SectorMap {
    pub fn sign(&self, alpha: &[u8]) -> i8 {
        let mask = alpha
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &a)| acc | ((a as usize & 1) << j));
        self.signs[mask]
    }

    pub fn negate(&self) -> SectorMap {
        SectorMap { n: self.n, signs: self.signs.iter().map(|s| -s).collect() }
    }
}

/// Sign map of the sector containing `ξ`.
pub fn sector_map(xi: &[f64]) -> Result<SectorMap> {
    check_point(xi)?;
    let d = bad_set_distance(xi);
    if d <= 1e-12 * norm(xi) {
        return Err(Error::OnBadSet(d));
    }
    let m = xi.len() - 1;
    let signs = (0..(1usize << m))
        .map(|mask| {
            let t: f64 = xi[m]
                + (0..m).filter(|j| mask >> j & 1 == 1).map(|j| xi[j]).sum::<f64>();
            if t > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(SectorMap { n: xi.len(), signs })
}

/// Uniform random point on the unit sphere in `ℝⁿ`.
pub fn random_unit_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let r = norm(&v);
        if r > 1e-6 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
