//! Finite-difference probe of the Mikhlin-type bounds `|∂^a m(ξ)| ≤ c_a |ξ|^{-|a|}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{norm, random_unit_point, DEFAULT_SEED};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// Log-uniform radii in `[r_min, r_max]`, uniform directions.
    Annulus { n: usize, r_min: f64, r_max: f64, samples: usize, seed: u64 },
    Points { points: Vec<Vec<f64>> },
}

impl Region {
    pub fn annulus(n: usize, r_min: f64, r_max: f64, samples: usize) -> Self {
        Region::Annulus { n, r_min, r_max, samples, seed: DEFAULT_SEED }
    }

    fn points(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            Region::Annulus { n, r_min, r_max, samples, seed } => {
                if !(*r_min > 0.0 && r_max >= r_min) {
                    return Err(Error::InvalidArgument(
                        "annulus must satisfy 0 < r_min <= r_max".into(),
                    ));
                }
                if *n == 0 {
                    return Err(Error::InvalidArgument("dimension must be positive".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*samples)
                    .map(|_| {
                        let r = r_min * (r_max / r_min).powf(rng.gen::<f64>());
                        random_unit_point(&mut rng, *n).into_iter().map(|x| r * x).collect()
                    })
                    .collect())
            }
            Region::Points { points } => {
                if points.iter().any(|p| norm(p) == 0.0) {
                    return Err(Error::InvalidArgument("region touches the origin".into()));
                }
                Ok(points.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothConfig {
    pub max_order: usize,
    /// Blowup cap on `|∂^a m|·|ξ|^{|a|}`.
    pub cap: f64,
    /// Initial step relative to `|ξ|`.
    pub step: f64,
    /// Number of step halvings.
    pub refinements: usize,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        Self { max_order: 2, cap: 1e4, step: 1e-3, refinements: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStat {
    pub order: usize,
    /// Sup of the scaled finest-step difference quotients.
    pub sup: f64,
    pub worst_point: Vec<f64>,
    /// Some quotient grew by more than 4x over the refinement sequence.
    pub diverging: bool,
    /// The quotient jumps across the point and the jump does not shrink with the offset.
    pub discontinuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolReport {
    pub orders: Vec<OrderStat>,
    pub pass: bool,
    pub worst_point: Option<Vec<f64>>,
    pub reason: Option<String>,
}

/// Central difference quotient for the multi-index given as a list of axes.
fn quotient<F: Fn(&[f64]) -> f64>(m: &F, xi: &[f64], axes: &[usize], h: f64) -> f64 {
    match axes {
        [] => m(xi),
        [i] => {
            let mut p = xi.to_vec();
            p[*i] += h;
            let a = m(&p);
            p[*i] -= 2.0 * h;
            (a - m(&p)) / (2.0 * h)
        }
        [i, j] if i == j => {
            let mut p = xi.to_vec();
            p[*i] += h;
            let a = m(&p);
            p[*i] -= 2.0 * h;
            let b = m(&p);
            (a - 2.0 * m(xi) + b) / (h * h)
        }
        [i, j] => {
            let eval = |si: f64, sj: f64| {
                let mut p = xi.to_vec();
                p[*i] += si * h;
                p[*j] += sj * h;
                m(&p)
            };
            (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h * h)
        }
        _ => unreachable!("orders above two are rejected"),
    }
}

fn multi_indices(n: usize, order: usize) -> Vec<Vec<usize>> {
    match order {
        0 => vec![vec![]],
        1 => (0..n).map(|i| vec![i]).collect(),
        _ => (0..n).flat_map(|i| (i..n).map(move |j| vec![i, j])).collect(),
    }
}

const JUMP_FLOOR: f64 = 1e-3;
const GROWTH_FLOOR: f64 = 1e-6;

/// Samples difference quotients of `m` up to `max_order` over the region.
pub fn check_standard_symbol<F>(m: F, region: &Region, cfg: &SmoothConfig) -> Result<SymbolReport>
where
    F: Fn(&[f64]) -> f64,
{
    if cfg.max_order > 2 {
        return Err(Error::InvalidArgument("finite differences support max_order <= 2".into()));
    }
    if !(cfg.step > 0.0 && cfg.step < 0.1) {
        return Err(Error::InvalidArgument("relative step must lie in (0, 0.1)".into()));
    }
    let points = region.points()?;
    let mut orders: Vec<OrderStat> = (0..=cfg.max_order)
        .map(|order| OrderStat {
            order,
            sup: 0.0,
            worst_point: vec![],
            diverging: false,
            discontinuous: false,
        })
        .collect();
    for xi in &points {
        let r = norm(xi);
        for stat in orders.iter_mut() {
            let o = stat.order;
            let scale = r.powi(o as i32);
            for axes in multi_indices(xi.len(), o) {
                let h0 = cfg.step * r;
                let d0 = quotient(&m, xi, &axes, h0).abs() * scale;
                let hr = h0 * 0.5f64.powi(cfg.refinements as i32);
                let dr = quotient(&m, xi, &axes, hr).abs() * scale;
                if !dr.is_finite() || dr > stat.sup || stat.worst_point.is_empty() {
                    stat.sup = if dr.is_finite() { dr } else { f64::INFINITY };
                    stat.worst_point = xi.clone();
                }
                if o > 0 && dr > 4.0 * d0 && dr > GROWTH_FLOOR {
                    stat.diverging = true;
                }
                if o == cfg.max_order && o > 0 {
                    for k in 0..xi.len() {
                        let jump = |delta: f64, h: f64| {
                            let mut p = xi.to_vec();
                            p[k] += delta;
                            let a = quotient(&m, &p, &axes, h);
                            p[k] -= 2.0 * delta;
                            (a - quotient(&m, &p, &axes, h)).abs() * scale
                        };
                        let j0 = jump(4.0 * h0, h0);
                        let jr = jump(4.0 * hr, hr);
                        if jr > 0.5 * j0 && jr > JUMP_FLOOR {
                            stat.discontinuous = true;
                        }
                    }
                }
            }
        }
    }
    let mut reason = None;
    let mut worst = None;
    for stat in &orders {
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN counts as a blowup
        let why = if !(stat.sup <= cfg.cap) {
            Some(format!("order {} exceeds cap {}", stat.order, cfg.cap))
        } else if stat.diverging {
            Some(format!("order {} quotients diverge under refinement", stat.order))
        } else if stat.discontinuous {
            Some(format!("order {} quotients jump across a wall", stat.order))
        } else {
            None
        };
        if why.is_some() && reason.is_none() {
            reason = why;
            worst = Some(stat.worst_point.clone());
        }
    }
    if worst.is_none() {
        worst = orders
            .iter()
            .max_by(|a, b| a.sup.total_cmp(&b.sup))
            .map(|s| s.worst_point.clone());
    }
    Ok(SymbolReport { pass: reason.is_none(), orders, worst_point: worst, reason })
}
