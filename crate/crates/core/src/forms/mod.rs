//! Time-side and frequency-side multilinear forms.

mod counter;
mod direct;
mod probe;
mod pv;
mod spectral;

pub use counter::{
    counterexample, counterexample_growth, counterexample_rhs, CounterexampleData, GrowthRow, Interval,
    SeparableFunction,
};
pub use direct::{commutator_form, lambda_direct, simplex_direct};
pub use probe::{empirical_constant, ProbeEvaluator, ProbeSpec, ProbeStats};
pub use pv::{PvLayout, PvQuadrature};
pub use spectral::{
    commutator_spectral, lambda_m_dense, lambda_m_tensor, DenseBudget, MuSymbol, PieceSum, Symbol,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, GridFunction};

/// Value of a form with a resolution-doubling error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub metadata: serde_json::Value,
}

/// Exponents `p_0..p_n` in `[1, ∞]` with `Σ 1/p_j = 1`.
/// In JSON, `∞` is written as the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<JsonExponent>", into = "Vec<JsonExponent>")]
pub struct ExponentTuple(Vec<f64>);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonExponent {
    Finite(f64),
    Named(String),
}

impl ExponentTuple {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::InvalidArgument("need at least two exponents".into()));
        }
        if p.iter().any(|&x| x.is_nan() || x < 1.0) {
            return Err(Error::InvalidArgument("exponents must lie in [1, ∞]".into()));
        }
        let s: f64 = p.iter().map(|x| 1.0 / x).sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Holder(s));
        }
        Ok(Self(p))
    }

    pub fn exponents(&self) -> &[f64] {
        &self.0
    }

    /// `Π ‖F_j‖_{p_j}`.
    pub fn rhs(&self, f: &[GridFunction]) -> Result<f64> {
        if f.len() != self.0.len() {
            return Err(Error::Shape("one exponent per function".into()));
        }
        f.iter().zip(&self.0).map(|(g, &p)| lp_norm(g, p)).product()
    }
}

impl TryFrom<Vec<JsonExponent>> for ExponentTuple {
    type Error = Error;
    fn try_from(p: Vec<JsonExponent>) -> Result<Self> {
        let p = p
            .into_iter()
            .map(|e| match e {
                JsonExponent::Finite(x) => Ok(x),
                JsonExponent::Named(s) if matches!(s.as_str(), "inf" | "infinity") => Ok(f64::INFINITY),
                JsonExponent::Named(s) => Err(Error::InvalidArgument(format!("unknown exponent {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(p)
    }
}

impl From<ExponentTuple> for Vec<JsonExponent> {
    fn from(e: ExponentTuple) -> Self {
        e.0.into_iter()
            .map(|x| if x.is_infinite() { JsonExponent::Named("inf".into()) } else { JsonExponent::Finite(x) })
            .collect()
    }
}

pub(crate) fn check_common_grid(f: &[GridFunction], dim: Option<usize>) -> Result<()> {
    let Some(first) = f.first() else {
        return Err(Error::Shape("no input functions".into()));
    };
    if f.iter().any(|g| !g.same_grid(first)) {
        return Err(Error::Shape("inputs live on different grids".into()));
    }
    if let Some(d) = dim {
        if first.dim() != d {
            return Err(Error::Shape(format!("expected {d}-dimensional inputs, got {}", first.dim())));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
