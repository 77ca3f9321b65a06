//! Ratios `|Λ| / Π‖F_j‖_{p_j}` on random band-limited inputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    commutator_form, lambda_direct, lambda_m_dense, simplex_direct, DenseBudget, ExponentTuple,
    MuSymbol, PvQuadrature,
};
use crate::error::{Error, Result};
use crate::gen::random_bandlimited;
use crate::grid::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeEvaluator {
    Direct,
    Simplex,
    Dense,
    Commutator,
}

/// Which form to probe and on what data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub evaluator: ProbeEvaluator,
    pub n: usize,
    pub size: usize,
    pub period: f64,
    pub cutoff: usize,
    #[serde(default)]
    pub pv: Option<PvQuadrature>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeStats {
    pub ratios: Vec<f64>,
    pub max: f64,
    pub argmax: usize,
    pub mean: f64,
    pub median: f64,
}

const TRIAL_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

impl ProbeSpec {
    fn dim(&self) -> usize {
        match self.evaluator {
            ProbeEvaluator::Commutator => 1,
            _ => self.n,
        }
    }

    /// Inputs for one trial; function `j` uses seed `seed + (trial(n+1) + j)·stride`.
    pub fn trial_inputs(&self, trial: usize, seed: u64) -> Result<Vec<GridFunction>> {
        let sizes = vec![self.size; self.dim()];
        (0..=self.n)
            .map(|j| {
                let k = (trial * (self.n + 1) + j) as u64;
                random_bandlimited(&sizes, self.period, self.cutoff, seed.wrapping_add(k.wrapping_mul(TRIAL_STRIDE)), false)
            })
            .collect()
    }

    pub fn evaluate(&self, f: &[GridFunction]) -> Result<num_complex::Complex64> {
        let pv = self.pv.clone().unwrap_or_else(|| PvQuadrature::default_for(self.period));
        let r = match self.evaluator {
            ProbeEvaluator::Direct => lambda_direct(f, &pv)?,
            ProbeEvaluator::Simplex => simplex_direct(f, &pv)?,
            ProbeEvaluator::Commutator => commutator_form(f, &pv)?,
            ProbeEvaluator::Dense => lambda_m_dense(&MuSymbol, f, &DenseBudget::default_for(self.n))?,
        };
        Ok(r.value)
    }

    /// `|Λ(F)| / Π‖F_j‖_{p_j}`.
    pub fn ratio(&self, f: &[GridFunction], exps: &ExponentTuple) -> Result<f64> {
        let rhs = exps.rhs(f)?;
        if rhs == 0.0 {
            return Err(Error::InvalidArgument("zero input function".into()));
        }
        Ok(self.evaluate(f)?.norm() / rhs)
    }
}

/// Distribution of the ratio over `trials` seeded random tuples.
pub fn empirical_constant(
    spec: &ProbeSpec,
    exps: &ExponentTuple,
    trials: usize,
    seed: u64,
) -> Result<ProbeStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if exps.exponents().len() != spec.n + 1 {
        return Err(Error::Shape(format!("need {} exponents", spec.n + 1)));
    }
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| spec.ratio(&spec.trial_inputs(t, seed)?, exps))
        .collect::<Result<_>>()?;
    let (argmax, max) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    let mean = ratios.iter().sum::<f64>() / trials as f64;
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if trials % 2 == 1 {
        sorted[trials / 2]
    } else {
        0.5 * (sorted[trials / 2 - 1] + sorted[trials / 2])
    };
    Ok(ProbeStats { ratios, max, argmax, mean, median })
}
