//! Shifted maximal and square functions on the circle.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bumps::{build_chi, build_psi, BumpSpec};
use crate::error::{Error, Result};
use crate::fit::{log_log_fit, LineFit};
use crate::gen::random_bandlimited;
use crate::grid::{convolve_axis, lp_norm, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftedKind {
    Max,
    Square,
}

/// Profile, shift `u` and scales `k_min..=k_max` of a shifted operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedOpSpec {
    pub profile: BumpSpec,
    pub u: f64,
    pub k_min: i32,
    pub k_max: i32,
}

/// Scales whose kernels are resolved without aliasing: `4/L ≤ 2^k ≤ M/(4L)`.
pub fn resolvable_scales(size: usize, period: f64) -> (i32, i32) {
    ((4.0 / period).log2().ceil() as i32, (size as f64 / (4.0 * period)).log2().floor() as i32)
}

impl ShiftedOpSpec {
    pub fn new(profile: BumpSpec, u: f64, k_min: i32, k_max: i32) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::ScaleRange(format!("empty scale range [{k_min}, {k_max}]")));
        }
        if !u.is_finite() {
            return Err(Error::InvalidArgument("shift must be finite".into()));
        }
        Ok(Self { profile, u, k_min, k_max })
    }

    /// Maximal operator with `φ = χ` over every resolvable scale.
    pub fn maximal(u: f64, size: usize, period: f64) -> Result<Self> {
        let (a, b) = resolvable_scales(size, period);
        Self::new(build_chi(), u, a, b)
    }

    /// Square function with the telescoping `ψ` over every resolvable scale.
    pub fn square(u: f64, size: usize, period: f64) -> Result<Self> {
        let (a, b) = resolvable_scales(size, period);
        Self::new(build_psi(), u, a, b)
    }

    fn pieces(&self, f: &GridFunction) -> Result<Vec<GridFunction>> {
        if f.dim() != 1 {
            return Err(Error::Shape("shifted operators act on 1-d functions".into()));
        }
        let (a, b) = resolvable_scales(f.sizes()[0], f.period());
        if self.k_min < a || self.k_max > b {
            return Err(Error::ScaleRange(format!(
                "scales [{}, {}] outside the resolvable range [{a}, {b}]",
                self.k_min, self.k_max
            )));
        }
        (self.k_min..=self.k_max)
            .into_par_iter()
            .map(|k| convolve_axis(f, &self.profile, k, 0, self.u))
            .collect()
    }
}

fn real(f: &GridFunction, values: Vec<f64>) -> Result<GridFunction> {
    GridFunction::new(f.sizes().to_vec(), f.period(), values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// `sup_k |f ∗ φ̌_k^{(u)}|` over the scale range.
pub fn shifted_maximal(f: &GridFunction, spec: &ShiftedOpSpec) -> Result<GridFunction> {
    if spec.profile.is_psi() {
        return Err(Error::ProfileKind { expected: "φ-type" });
    }
    let pieces = spec.pieces(f)?;
    let mut out = vec![0.0f64; f.values().len()];
    for p in &pieces {
        for (o, v) in out.iter_mut().zip(p.values()) {
            *o = o.max(v.norm());
        }
    }
    real(f, out)
}

/// `(Σ_k |f ∗ ψ̌_k^{(u)}|²)^{1/2}` over the scale range.
pub fn shifted_square(f: &GridFunction, spec: &ShiftedOpSpec) -> Result<GridFunction> {
    if !spec.profile.is_psi() {
        return Err(Error::ProfileKind { expected: "ψ-type" });
    }
    let pieces = spec.pieces(f)?;
    let mut out = vec![0.0f64; f.values().len()];
    for p in &pieces {
        for (o, v) in out.iter_mut().zip(p.values()) {
            *o += v.norm_sqr();
        }
    }
    real(f, out.into_iter().map(f64::sqrt).collect())
}

/// Two Gaussian bumps `2^{-k}u` apart at a random scale `k`.
pub fn two_bump(size: usize, period: f64, u: f64, k_min: i32, k_max: i32, seed: u64) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(k_min..=k_max);
    let width = (-(k as f64)).exp2();
    let sigma = (0.5 * width).max(4.0 * period / size as f64);
    let x0 = rng.gen_range(0.0..period);
    let x1 = x0 + width * u;
    let bump = |x: f64, c: f64| {
        let d = (x - c).rem_euclid(period);
        let d = d.min(period - d);
        (-0.5 * (d / sigma).powi(2)).exp()
    };
    GridFunction::from_fn(vec![size], period, |x| Complex64::new(bump(x[0], x0) + bump(x[0], x1), 0.0))
}

/// Grid, exponent and sampling for a norm table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormTableSpec {
    pub kind: ShiftedKind,
    pub u: Vec<f64>,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub size: usize,
    pub period: f64,
    /// Defaults to the resolvable scales.
    #[serde(default)]
    pub scales: Option<(i32, i32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    pub u: f64,
    pub norm: f64,
    pub ratio: f64,
}

impl NormTableSpec {
    fn scales(&self) -> (i32, i32) {
        self.scales.unwrap_or_else(|| resolvable_scales(self.size, self.period))
    }

    fn op(&self, u: f64) -> Result<ShiftedOpSpec> {
        let (a, b) = self.scales();
        let profile = match self.kind {
            ShiftedKind::Max => build_chi(),
            ShiftedKind::Square => build_psi(),
        };
        ShiftedOpSpec::new(profile, u, a, b)
    }

    /// Even trials are band-limited noise with cutoff `M/4`, odd trials two bumps `2^{-k}u` apart.
    pub fn trial_input(&self, u: f64, trial: usize) -> Result<GridFunction> {
        let seed = self.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial as u64 + 1));
        if trial.is_multiple_of(2) {
            random_bandlimited(&[self.size], self.period, self.size / 4 - 1, seed, true)
        } else {
            let (a, b) = self.scales();
            two_bump(self.size, self.period, u, a, b, seed)
        }
    }

    pub fn apply(&self, f: &GridFunction, u: f64) -> Result<GridFunction> {
        let op = self.op(u)?;
        match self.kind {
            ShiftedKind::Max => shifted_maximal(f, &op),
            ShiftedKind::Square => shifted_square(f, &op),
        }
    }

    /// `‖op(f)‖_p / ‖f‖_p` for one trial.
    pub fn trial_ratio(&self, u: f64, trial: usize) -> Result<f64> {
        let f = self.trial_input(u, trial)?;
        Ok(lp_norm(&self.apply(&f, u)?, self.p)? / lp_norm(&f, self.p)?)
    }
}

/// For each `u`, the largest observed `‖op f‖_p/‖f‖_p` and its ratio to `log(2+|u|)`.
pub fn shifted_norm_table(spec: &NormTableSpec) -> Result<Vec<NormRow>> {
    if !(spec.p > 1.0 && spec.p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p must lie in (1, ∞), got {}", spec.p)));
    }
    if spec.trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    spec.u
        .iter()
        .map(|&u| {
            let ratios: Vec<f64> =
                (0..spec.trials).into_par_iter().map(|t| spec.trial_ratio(u, t)).collect::<Result<_>>()?;
            let norm = ratios.iter().copied().fold(0.0, f64::max);
            Ok(NormRow { u, norm, ratio: norm / (2.0 + u.abs()).ln() })
        })
        .collect()
}

/// Growth of a norm table against `c·log(2+|u|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSummary {
    /// Log-log fit of norm against `|u|` over the rows with `u > 0`.
    pub exponent: LineFit,
    /// `c` fixed by the row with the smallest positive `|u|`.
    pub c: f64,
    /// Largest `norm / (c·log(2+|u|)) − 1` over the rows with `u > 0`.
    pub max_excess: f64,
}

pub fn growth_summary(rows: &[NormRow]) -> Result<GrowthSummary> {
    let pos: Vec<&NormRow> = rows.iter().filter(|r| r.u.abs() > 0.0).collect();
    if pos.len() < 2 {
        return Err(Error::InvalidArgument("need two rows with u ≠ 0".into()));
    }
    let x: Vec<f64> = pos.iter().map(|r| r.u.abs()).collect();
    let y: Vec<f64> = pos.iter().map(|r| r.norm).collect();
    let anchor = pos.iter().min_by(|a, b| a.u.abs().total_cmp(&b.u.abs())).unwrap();
    let c = anchor.ratio;
    let max_excess = pos.iter().map(|r| r.ratio / c - 1.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(GrowthSummary { exponent: log_log_fit(&x, &y), c, max_excess })
}

#[cfg(test)]
mod tests;
