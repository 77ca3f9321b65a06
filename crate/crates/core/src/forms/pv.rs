//! Principal-value discretization of `∫ … dt/t` by paired `±t` nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite, GaussLegendre};

/// Layout of the positive half of the `t`-nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "kebab-case")]
pub enum PvLayout {
    /// One Gauss–Legendre rule in `ln t` on `[ε, T]`.
    Log { count: usize },
    /// Equal panels in `ln t`, each with its own rule.
    LogComposite { panels: usize, per_panel: usize },
    /// Gauss–Legendre in `ln t` on `[ε, split]`, then linear panels on `[split, T]`.
    Hybrid { log_count: usize, split: f64, linear_panels: usize, per_panel: usize },
    /// Linear panels on `(0, T]` against `(π/2T)·cot(πt/2T)`, which is `Σ_k 1/(t + 2kT)`.
    /// Exact in the tail when the integrand has period `2T`; `ε` is unused.
    Periodic { panels: usize, per_panel: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvQuadrature {
    pub eps: f64,
    pub t_max: f64,
    pub layout: PvLayout,
    /// Gauss–Legendre nodes per α-axis on `[0, 1]`.
    pub alpha_nodes: usize,
}

impl PvQuadrature {
    pub fn new(eps: f64, t_max: f64, layout: PvLayout, alpha_nodes: usize) -> Result<Self> {
        let pv = Self { eps, t_max, layout, alpha_nodes };
        pv.validate()?;
        Ok(pv)
    }

    /// `ε = 2^{-10}L`, `T = L/2`, 64 log-spaced nodes, 16 α-nodes.
    pub fn default_for(period: f64) -> Self {
        Self {
            eps: period / 1024.0,
            t_max: period / 2.0,
            layout: PvLayout::Log { count: 64 },
            alpha_nodes: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < self.t_max && self.t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "PV rule needs 0 < ε < T, got ε = {}, T = {}",
                self.eps, self.t_max
            )));
        }
        let empty = match &self.layout {
            PvLayout::Log { count } => *count == 0,
            PvLayout::LogComposite { panels, per_panel } => *panels == 0 || *per_panel == 0,
            PvLayout::Hybrid { log_count, split, linear_panels, per_panel } => {
                if !(*split > self.eps && *split < self.t_max) {
                    return Err(Error::InvalidArgument("hybrid split must lie in (ε, T)".into()));
                }
                *log_count == 0 || *linear_panels == 0 || *per_panel == 0
            }
            PvLayout::Periodic { panels, per_panel } => *panels == 0 || *per_panel == 0,
        };
        if empty {
            return Err(Error::InvalidArgument("empty PV node set".into()));
        }
        if self.alpha_nodes == 0 {
            return Err(Error::InvalidArgument("α-rule needs at least one node".into()));
        }
        Ok(())
    }

    /// Positive nodes with weights for the measure `dt/t`.
    pub fn t_nodes(&self) -> Vec<(f64, f64)> {
        let (la, lb) = (self.eps.ln(), self.t_max.ln());
        let log_nodes = |a: f64, b: f64, rule: &GaussLegendre| -> Vec<(f64, f64)> {
            rule.on(a, b).map(|(s, w)| (s.exp(), w)).collect()
        };
        match &self.layout {
            PvLayout::Log { count } => log_nodes(la, lb, &GaussLegendre::cached(*count)),
            PvLayout::LogComposite { panels, per_panel } => composite(la, lb, *panels, *per_panel)
                .into_iter()
                .map(|(s, w)| (s.exp(), w))
                .collect(),
            PvLayout::Hybrid { log_count, split, linear_panels, per_panel } => {
                let mut v = log_nodes(la, split.ln(), &GaussLegendre::cached(*log_count));
                v.extend(
                    composite(*split, self.t_max, *linear_panels, *per_panel)
                        .into_iter()
                        .map(|(t, w)| (t, w / t)),
                );
                v
            }
            PvLayout::Periodic { panels, per_panel } => {
                let c = std::f64::consts::PI / (2.0 * self.t_max);
                composite(0.0, self.t_max, *panels, *per_panel)
                    .into_iter()
                    .map(|(t, w)| (t, w * c / (c * t).tan()))
                    .collect()
            }
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.layout, PvLayout::Periodic { .. })
    }

    /// Nodes and weights of the α-rule on `[0, 1]`.
    pub fn alpha_rule(&self) -> Vec<(f64, f64)> {
        GaussLegendre::cached(self.alpha_nodes).on(0.0, 1.0).collect()
    }

    /// The same rule with every node count doubled.
    pub fn refined(&self) -> Self {
        let layout = match &self.layout {
            PvLayout::Log { count } => PvLayout::Log { count: 2 * count },
            PvLayout::LogComposite { panels, per_panel } => {
                PvLayout::LogComposite { panels: 2 * panels, per_panel: *per_panel }
            }
            PvLayout::Hybrid { log_count, split, linear_panels, per_panel } => PvLayout::Hybrid {
                log_count: 2 * log_count,
                split: *split,
                linear_panels: 2 * linear_panels,
                per_panel: *per_panel,
            },
            PvLayout::Periodic { panels, per_panel } => {
                PvLayout::Periodic { panels: 2 * panels, per_panel: *per_panel }
            }
        };
        Self { layout, alpha_nodes: 2 * self.alpha_nodes, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_dt_over_t() {
        let pv = PvQuadrature::new(1e-3, 8.0, PvLayout::Log { count: 32 }, 4).unwrap();
        let total: f64 = pv.t_nodes().iter().map(|n| n.1).sum();
        assert!((total - (8.0f64 / 1e-3).ln()).abs() < 1e-12);
        let hybrid = PvQuadrature::new(
            1e-3,
            8.0,
            PvLayout::Hybrid { log_count: 32, split: 0.5, linear_panels: 8, per_panel: 8 },
            4,
        )
        .unwrap();
        let total: f64 = hybrid.t_nodes().iter().map(|n| n.1).sum();
        assert!((total - (8.0f64 / 1e-3).ln()).abs() < 1e-9);
        assert!(hybrid.t_nodes().iter().all(|n| n.0 > 0.0 && n.1 > 0.0));
    }

    #[test]
    fn periodic_kernel_matches_lattice_sum() {
        // PV ∫_ℝ sin(2πt)/t dt = π, and the odd part pairs ±t.
        let pv = PvQuadrature::new(1e-3, 0.5, PvLayout::Periodic { panels: 4, per_panel: 8 }, 1).unwrap();
        let v: f64 = pv.t_nodes().iter().map(|&(t, w)| w * 2.0 * (2.0 * std::f64::consts::PI * t).sin()).sum();
        assert!((v - std::f64::consts::PI).abs() < 1e-12, "{v}");
    }

    #[test]
    fn rejects_degenerate_rules() {
        assert!(PvQuadrature::new(1.0, 0.5, PvLayout::Log { count: 4 }, 4).is_err());
        assert!(PvQuadrature::new(0.1, 0.5, PvLayout::Log { count: 0 }, 4).is_err());
        assert!(PvQuadrature::new(0.1, 0.5, PvLayout::Log { count: 4 }, 0).is_err());
    }
}
