//! Indicator data on which the form grows like `N^{n-1} log N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ExponentTuple, FormResult, PvQuadrature};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0.0
    }

    fn meet(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Product of interval indicators, one interval per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableFunction(pub Vec<Interval>);

impl SeparableFunction {
    pub fn lp_norm(&self, p: f64) -> f64 {
        let vol: f64 = self.0.iter().map(Interval::len).product();
        if vol == 0.0 {
            0.0
        } else if p.is_infinite() {
            1.0
        } else {
            vol.powf(1.0 / p)
        }
    }

    /// Samples at the nodes `x_i = iL/M`, read periodically in `[-L/2, L/2)`.
    pub fn sample(&self, sizes: &[usize], period: f64) -> Result<GridFunction> {
        if sizes.len() != self.0.len() {
            return Err(Error::Shape("one size per axis".into()));
        }
        GridFunction::from_fn(sizes.to_vec(), period, |x| {
            let inside = x.iter().zip(&self.0).all(|(&xa, iv)| {
                let y = if xa >= period / 2.0 { xa - period } else { xa };
                iv.contains(y) || iv.lo == y
            });
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
    }
}

/// The endpoint data for given `n`, `j0` (1-based) and `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleData {
    pub n: usize,
    pub j0: usize,
    pub big_n: u64,
    pub period: f64,
    pub functions: Vec<SeparableFunction>,
}

impl CounterexampleData {
    /// `period` defaults to `4N`; the half-line is cut to `(0, 2N)`.
    pub fn new(n: usize, j0: usize, big_n: u64, period: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("need n >= 2".into()));
        }
        if !(1..=n).contains(&j0) {
            return Err(Error::InvalidArgument(format!("j0 = {j0} outside 1..={n}")));
        }
        if big_n < 2 || !big_n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("N = {big_n} is not a power of two")));
        }
        let nn = big_n as f64;
        let period = period.unwrap_or(4.0 * nn);
        if period < 4.0 * nn {
            return Err(Error::InvalidArgument(format!(
                "period {period} cannot hold supports of size N = {big_n}; need at least {}",
                4.0 * nn
            )));
        }
        let a0 = j0 - 1;
        let unit = Interval::new(0.0, 1.0);
        let mut functions = Vec::with_capacity(n + 1);
        functions.push(SeparableFunction(
            (0..n).map(|a| if a == a0 { unit } else { Interval::new(0.0, nn) }).collect(),
        ));
        for j in 1..=n {
            let f = if j == j0 {
                (0..n)
                    .map(|a| if a == a0 { Interval::new(0.0, 2.0 * nn) } else { Interval::new(f64::NEG_INFINITY, f64::INFINITY) })
                    .collect()
            } else {
                (0..n).map(|a| if a == a0 { unit } else { Interval::new(-nn, nn) }).collect()
            };
            functions.push(SeparableFunction(f));
        }
        Ok(Self { n, j0, big_n, period, functions })
    }

    /// The PV rule used by default: `ε = 2^{-10}`, `T = 2N`.
    pub fn default_pv(&self) -> PvQuadrature {
        PvQuadrature {
            eps: 1.0 / 1024.0,
            t_max: 2.0 * self.big_n as f64,
            layout: super::PvLayout::LogComposite { panels: 64, per_panel: 16 },
            alpha_nodes: 1,
        }
    }

    /// Samples of every function on the torus, for the grid evaluators.
    pub fn grid_functions(&self, m: usize) -> Result<Vec<GridFunction>> {
        let sizes = vec![m; self.n];
        self.functions.iter().map(|f| f.sample(&sizes, self.period)).collect()
    }
}

/// `Π_j ‖F_j‖_{p_j}` computed from the interval lengths.
pub fn counterexample_rhs(data: &CounterexampleData, exps: &ExponentTuple) -> Result<f64> {
    let p = exps.exponents();
    if p.len() != data.n + 1 {
        return Err(Error::Shape(format!("need {} exponents", data.n + 1)));
    }
    Ok(data.functions.iter().zip(p).map(|(f, &q)| f.lp_norm(q)).product())
}

/// `s ↦ |J ∩ (I − s)|`, piecewise linear.
struct Overlap {
    fixed: Interval,
    moving: Interval,
}

impl Overlap {
    fn at(&self, s: f64) -> f64 {
        self.fixed.meet(&Interval::new(self.moving.lo - s, self.moving.hi - s)).len()
    }

    fn kinks(&self) -> Vec<f64> {
        let (j, i) = (self.fixed, self.moving);
        [i.lo - j.lo, i.lo - j.hi, i.hi - j.lo, i.hi - j.hi]
            .into_iter()
            .filter(|x| x.is_finite())
            .collect()
    }

    /// `(1/t) ∫_0^t g(s) ds`, exact by trapezoids between kinks.
    fn mean(&self, t: f64) -> f64 {
        let (a, b) = if t > 0.0 { (0.0, t) } else { (t, 0.0) };
        let mut pts: Vec<f64> = self.kinks().into_iter().filter(|&k| k > a && k < b).collect();
        pts.push(a);
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        let integral: f64 = pts.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (self.at(w[0]) + self.at(w[1]))).sum();
        integral / (b - a)
    }
}

/// `h(t) = ∫ dα ∫ dx F_0 Π_j F_j(x + tα_j e_j)` for separable indicators.
///
/// Axis `a` carries only the translate of `F_{a+1}`, so the α-integral factors
/// into per-axis means.
struct Integrand {
    axes: Vec<Overlap>,
}

impl Integrand {
    fn new(f: &[SeparableFunction]) -> Self {
        let n = f.len() - 1;
        let axes = (0..n)
            .map(|a| {
                let mut fixed = f[0].0[a];
                for (j, g) in f.iter().enumerate().skip(1) {
                    if j != a + 1 {
                        fixed = fixed.meet(&g.0[a]);
                    }
                }
                Overlap { fixed, moving: f[a + 1].0[a] }
            })
            .collect();
        Self { axes }
    }

    fn at(&self, t: f64) -> f64 {
        let n = self.axes.len();
        let mut v = self.axes[n - 1].at(t);
        for ax in &self.axes[..n - 1] {
            if v == 0.0 {
                break;
            }
            v *= ax.mean(t);
        }
        v
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.axes.iter().flat_map(|a| a.kinks()).map(f64::abs).filter(|&x| x > 0.0).collect()
    }
}

/// `∫_ε^T (h(t) − h(−t)) dt/t` with Gauss–Legendre in `ln t` on panels split at kinks.
fn pv_integral(h: &Integrand, eps: f64, t_max: f64, panels: usize, per_panel: usize) -> f64 {
    let (la, lb) = (eps.ln(), t_max.ln());
    let mut cuts: Vec<f64> = (0..=panels).map(|i| la + (lb - la) * i as f64 / panels as f64).collect();
    cuts.extend(h.breakpoints().into_iter().filter(|&x| x > eps && x < t_max).map(f64::ln));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let rule = GaussLegendre::cached(per_panel);
    cuts.windows(2)
        .map(|w| {
            rule.on(w[0], w[1])
                .map(|(s, wt)| {
                    let t = s.exp();
                    wt * (h.at(t) - h.at(-t))
                })
                .sum::<f64>()
        })
        .sum()
}

/// Value of the form on the endpoint data, evaluated exactly in `x` and `α`.
pub fn counterexample(data: &CounterexampleData, pv: &PvQuadrature) -> Result<FormResult> {
    pv.validate()?;
    let h = Integrand::new(&data.functions);
    // The data is not periodic, so only the panel counts of the rule are used.
    let (panels, per) = match pv.layout {
        super::PvLayout::LogComposite { panels, per_panel } => (panels, per_panel),
        super::PvLayout::Log { count } => (1, count),
        super::PvLayout::Hybrid { linear_panels, per_panel, .. } => (linear_panels, per_panel),
        super::PvLayout::Periodic { .. } => {
            return Err(Error::InvalidArgument("endpoint data is not periodic in t".into()))
        }
    };
    let coarse = pv_integral(&h, pv.eps, pv.t_max, panels, per);
    let fine = pv_integral(&h, pv.eps, pv.t_max, 2 * panels, 2 * per);
    let nn = data.big_n as f64;
    Ok(FormResult {
        value: Complex64::new(fine, 0.0),
        error_estimate: (fine - coarse).abs(),
        metadata: json!({
            "evaluator": "counterexample",
            "n": data.n,
            "j0": data.j0,
            "N": data.big_n,
            "period": data.period,
            "eps": pv.eps,
            "t_max": pv.t_max,
            "reference": nn.powi(data.n as i32 - 1) * nn.ln(),
        }),
    })
}

/// One row of a growth study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    #[serde(rename = "N")]
    pub big_n: u64,
    pub value: f64,
    pub reference: f64,
    pub ratio: f64,
}

/// Values for each `N`, with `N^{n-1} log N` and the ratio.
pub fn counterexample_growth(n: usize, j0: usize, sizes: &[u64]) -> Result<Vec<GrowthRow>> {
    sizes
        .iter()
        .map(|&big_n| {
            let data = CounterexampleData::new(n, j0, big_n, None)?;
            let value = counterexample(&data, &data.default_pv())?.value.re;
            let nn = big_n as f64;
            let reference = nn.powi(n as i32 - 1) * nn.ln();
            Ok(GrowthRow { big_n, value, reference, ratio: value / reference })
        })
        .collect()
}
