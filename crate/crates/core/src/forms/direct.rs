//! Nested quadrature for `p.v.∫∫∫ F_0(x) Π_j F_j(x + tα_j e_j) dx dα dt/t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde_json::json;

use super::{check_common_grid, FormResult, PvQuadrature};
use crate::error::{Error, Result};
use crate::grid::{signed_frequency, GridFunction};

/// Spectral translates of one function along one axis.
struct Shifter {
    sizes: Vec<usize>,
    axis: usize,
    period: f64,
    /// Raw forward FFT along `axis`.
    spectrum: Vec<Complex64>,
}

fn lines(sizes: &[usize], axis: usize) -> (usize, usize, usize) {
    let m = sizes[axis];
    let stride: usize = sizes[axis + 1..].iter().product();
    let outer: usize = sizes[..axis].iter().product();
    (m, stride, outer)
}

fn fft_lines(values: &mut [Complex64], sizes: &[usize], axis: usize, inverse: bool) {
    let (m, stride, outer) = lines(sizes, axis);
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * m * stride + inner;
            for (i, b) in buf.iter_mut().enumerate() {
                *b = values[base + i * stride];
            }
            fft.process(&mut buf);
            for (i, b) in buf.iter().enumerate() {
                values[base + i * stride] = *b;
            }
        }
    }
}

impl Shifter {
    fn new(f: &GridFunction, axis: usize) -> Self {
        let mut spectrum = f.values().to_vec();
        fft_lines(&mut spectrum, f.sizes(), axis, false);
        Self { sizes: f.sizes().to_vec(), axis, period: f.period(), spectrum }
    }

    /// Samples of `F(x + s e_axis)`.
    fn shifted(&self, s: f64) -> Vec<Complex64> {
        let (m, stride, _) = lines(&self.sizes, self.axis);
        let phase: Vec<Complex64> = (0..m)
            .map(|i| {
                let k = signed_frequency(i, m) as f64;
                Complex64::from_polar(1.0 / m as f64, 2.0 * PI * k * s / self.period)
            })
            .collect();
        let mut out: Vec<Complex64> = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(flat, v)| v * phase[(flat / stride) % m])
            .collect();
        fft_lines(&mut out, &self.sizes, self.axis, true);
        out
    }
}

/// `∫_0^1 e^{iθα} dα`.
fn alpha_mean(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        let t2 = theta * theta;
        return Complex64::new(1.0 - t2 / 6.0, theta / 2.0 - theta * t2 / 24.0);
    }
    (Complex64::from_polar(1.0, theta) - 1.0) / Complex64::new(0.0, theta)
}

/// How the translates act: `F_j` moves along `axis_of[j-1]`.
struct Layout {
    axis_of: Vec<usize>,
}

/// `G(t) = ∫ over α-rule ∫ F_0 Π F_j(x + tα_j e)`, for every signed node.
fn evaluate(
    f: &[GridFunction],
    layout: &Layout,
    t_nodes: &[(f64, f64)],
    alpha: &[(f64, f64)],
    frozen_alpha: bool,
) -> Complex64 {
    let n = f.len() - 1;
    let sizes = f[0].sizes().to_vec();
    let period = f[0].period();
    let cell = f[0].cell_volume();
    let shifters: Vec<Shifter> =
        (1..=n).map(|j| Shifter::new(&f[j], layout.axis_of[j - 1])).collect();
    let a1 = layout.axis_of[0];
    let (m1, stride1, _) = lines(&sizes, a1);
    let tail = n.saturating_sub(2);
    let alpha_one = [(1.0, 1.0)];
    let alpha: &[(f64, f64)] = if frozen_alpha { &alpha_one } else { alpha };

    let g = |t: f64| -> Complex64 {
        let last = shifters[n - 1].shifted(t);
        let base: Vec<Complex64> = f[0].values().iter().zip(&last).map(|(a, b)| a * b).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = vec![0usize; tail];
        loop {
            let mut w_tail = 1.0;
            let mut b = base.clone();
            for (q, &i) in idx.iter().enumerate() {
                let (a, w) = alpha[i];
                w_tail *= w;
                let s = shifters[q + 1].shifted(t * a);
                for (x, y) in b.iter_mut().zip(&s) {
                    *x *= y;
                }
            }
            // Correlate with F_1 along its axis: Σ_x b(x) F_1(x + s e) for all α_1 at once.
            fft_lines(&mut b, &sizes, a1, false);
            let mut c = vec![Complex64::new(0.0, 0.0); m1];
            for (flat, fv) in shifters[0].spectrum.iter().enumerate() {
                let i = (flat / stride1) % m1;
                let neg = (m1 - i) % m1;
                let partner = flat + neg * stride1 - i * stride1;
                c[i] += fv * b[partner];
            }
            // α_1 is averaged over [0, 1] in closed form, mode by mode.
            let mut v = Complex64::new(0.0, 0.0);
            for (i, ci) in c.iter().enumerate() {
                let theta = 2.0 * PI * signed_frequency(i, m1) as f64 * t / period;
                v += ci * if frozen_alpha { Complex64::from_polar(1.0, theta) } else { alpha_mean(theta) };
            }
            acc += v * w_tail;
            let mut q = 0;
            while q < tail {
                idx[q] += 1;
                if idx[q] < alpha.len() {
                    break;
                }
                idx[q] = 0;
                q += 1;
            }
            if q == tail {
                break;
            }
        }
        acc * (cell / m1 as f64)
    };

    let terms: Vec<Complex64> = t_nodes
        .par_iter()
        .map(|&(t, w)| (g(t) - g(-t)) * w)
        .collect();
    terms.iter().sum()
}

fn run(
    f: &[GridFunction],
    pv: &PvQuadrature,
    layout: Layout,
    frozen: bool,
    name: &str,
) -> Result<FormResult> {
    pv.validate()?;
    if pv.is_periodic() {
        let periods = 2.0 * pv.t_max / f[0].period();
        if (periods - periods.round()).abs() > 1e-12 || periods < 0.5 {
            return Err(Error::InvalidArgument("periodic PV rule needs 2T to be a multiple of L".into()));
        }
        // Averaging over α breaks the common period in t.
        if !frozen {
            return Err(Error::InvalidArgument("periodic PV rule needs every α frozen at 1".into()));
        }
    }
    let coarse = evaluate(f, &layout, &pv.t_nodes(), &pv.alpha_rule(), frozen);
    let fine_pv = pv.refined();
    let fine = evaluate(f, &layout, &fine_pv.t_nodes(), &fine_pv.alpha_rule(), frozen);
    Ok(FormResult {
        value: fine,
        error_estimate: (fine - coarse).norm(),
        metadata: json!({
            "evaluator": name,
            "sizes": f[0].sizes(),
            "period": f[0].period(),
            "pv": fine_pv,
            "alpha": if frozen { "frozen at 1" } else { "gauss-legendre" },
        }),
    })
}

fn check_inputs(f: &[GridFunction], dim: usize) -> Result<()> {
    if f.len() < 3 {
        return Err(Error::InvalidArgument("need F_0..F_n with n >= 2".into()));
    }
    check_common_grid(f, Some(dim))
}

/// `Λ⁽ⁿ⁾(F_0..F_n)` with `F_j` translated along axis `j` at speed `α_j` (`α_n = 1`).
///
/// The error estimate compares the rule against its refinement; the cutoff at `T`
/// contributes a further `O(L/T)` that it does not see.
pub fn lambda_direct(f: &[GridFunction], pv: &PvQuadrature) -> Result<FormResult> {
    let n = f.len().saturating_sub(1);
    check_inputs(f, n)?;
    run(f, pv, Layout { axis_of: (0..n).collect() }, false, "lambda-direct")
}

/// The simplex form: [`lambda_direct`] with every `α_j = 1`.
pub fn simplex_direct(f: &[GridFunction], pv: &PvQuadrature) -> Result<FormResult> {
    let n = f.len().saturating_sub(1);
    check_inputs(f, n)?;
    run(f, pv, Layout { axis_of: (0..n).collect() }, true, "simplex-direct")
}

/// One-dimensional version: every translate acts on the single variable.
pub fn commutator_form(f: &[GridFunction], pv: &PvQuadrature) -> Result<FormResult> {
    check_inputs(f, 1)?;
    let n = f.len() - 1;
    run(f, pv, Layout { axis_of: vec![0; n] }, false, "commutator")
}
