//! Inverse Fourier transforms of the model symbols `ρ` and `m_ℓ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_psi, psi_sign_split, BumpSpec, Profile};
use crate::error::{Error, Result};
use crate::fit::{log_log_fit, LineFit};
use crate::quadrature::{composite, GaussLegendre};

const NODES: usize = 16;

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// `ρ(ξ_1, η) = μ_2(ξ_1, η) ψ̃(ξ_1) φ̃(η)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoSpec {
    pub psi_tilde: BumpSpec,
    pub phi_tilde: BumpSpec,
    /// Panels per oscillation; doubled once for the error estimate.
    pub resolution: usize,
}

impl Default for RhoSpec {
    fn default() -> Self {
        let (plus, _) = psi_sign_split(&build_psi()).expect("ψ is ψ-type");
        Self {
            psi_tilde: plus,
            phi_tilde: BumpSpec::phi_type(Profile::Cutoff { log2_scale: 0 }),
            resolution: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoValue {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Cumulative integrals `∫_{-b}^s φ̃(η)e^{2πiηv}dη` and the same with an extra `η`.
struct Primitive<'a> {
    phi: &'a BumpSpec,
    v: f64,
    lo: f64,
    h: f64,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    rule: std::sync::Arc<GaussLegendre>,
}

impl<'a> Primitive<'a> {
    fn new(phi: &'a BumpSpec, v: f64, lo: f64, hi: f64, res: usize) -> Self {
        let panels = res * ((hi - lo) * (v.abs() + 4.0)).ceil() as usize * 2;
        let h = (hi - lo) / panels as f64;
        let rule = GaussLegendre::cached(NODES);
        let mut a = vec![Complex64::new(0.0, 0.0)];
        let mut b = vec![Complex64::new(0.0, 0.0)];
        for p in 0..panels {
            let s = lo + h * p as f64;
            let (da, db) = Self::panel(phi, v, &rule, s, s + h);
            a.push(a[p] + da);
            b.push(b[p] + db);
        }
        Self { phi, v, lo, h, a, b, rule }
    }

    fn panel(phi: &BumpSpec, v: f64, rule: &GaussLegendre, s0: f64, s1: f64) -> (Complex64, Complex64) {
        let mut da = Complex64::new(0.0, 0.0);
        let mut db = Complex64::new(0.0, 0.0);
        for (x, w) in rule.on(s0, s1) {
            let f = cis(2.0 * PI * v * x) * (w * phi.eval(x));
            da += f;
            db += f * x;
        }
        (da, db)
    }

    fn at(&self, s: f64) -> (Complex64, Complex64) {
        let last = self.a.len() - 1;
        let p = (((s - self.lo) / self.h).floor().max(0.0) as usize).min(last - 1);
        let t = self.lo + self.h * p as f64;
        let (da, db) = Self::panel(self.phi, self.v, &self.rule, t, s);
        (self.a[p] + da, self.b[p] + db)
    }
}

/// `∫ μ_2(ξ_1, η) φ̃(η) e^{2πiηv} dη`, exact in the piecewise-affine `μ_2`.
fn inner(prim: &Primitive, lo: f64, hi: f64, x1: f64) -> Complex64 {
    let mut breaks = vec![lo, hi];
    for kink in [0.0, -x1] {
        if kink > lo && kink < hi {
            breaks.push(kink);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut acc = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let sa = (x1 + mid).signum();
        let sb = mid.signum();
        let (a0, b0) = prim.at(w[0]);
        let (a1, b1) = prim.at(w[1]);
        acc += (a1 - a0) * sa + (b1 - b0) * ((sa - sb) / x1);
    }
    acc
}

fn rho_at(u: f64, v: f64, spec: &RhoSpec, res: usize) -> Result<Complex64> {
    let phi_support = spec.phi_tilde.support();
    let &[(lo, hi)] = phi_support.as_slice() else {
        return Err(Error::ProfileKind { expected: "compactly supported φ-type" });
    };
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::ProfileKind { expected: "compactly supported φ-type" });
    }
    let prim = Primitive::new(&spec.phi_tilde, v, lo, hi, res);
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in spec.psi_tilde.support() {
        // The kink at η = −ξ_1 makes the inner integral oscillate in ξ_1 at rate v.
        let panels = res * ((b - a) * (u.abs() + v.abs() + 4.0)).ceil() as usize * 2;
        for (x1, w) in composite(a, b, panels, NODES) {
            let p = spec.psi_tilde.eval(x1);
            if p == 0.0 {
                continue;
            }
            acc += cis(2.0 * PI * u * x1) * inner(&prim, lo, hi, x1) * (w * p);
        }
    }
    Ok(acc)
}

/// `ρ̌(u, v) = ∫ e^{2πi(ξ_1u + ηv)} ρ(ξ_1, η) d(ξ_1, η)`.
pub fn rho_check(u: f64, v: f64, spec: &RhoSpec) -> Result<RhoValue> {
    if !spec.psi_tilde.is_psi() {
        return Err(Error::ProfileKind { expected: "ψ-type" });
    }
    if spec.resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let coarse = rho_at(u, v, spec, spec.resolution)?;
    let fine = rho_at(u, v, spec, 2 * spec.resolution)?;
    Ok(RhoValue { value: fine, error_estimate: (fine - coarse).norm() })
}

/// `Σ |ρ̌(u,v)| Δ²` over the lattice `ΔZ² ∩ [-r, r]²`.
pub fn rho_lattice_sum(r: f64, delta: f64, spec: &RhoSpec) -> Result<f64> {
    if !(delta > 0.0 && r > 0.0) {
        return Err(Error::InvalidArgument("lattice needs r > 0 and Δ > 0".into()));
    }
    let phi_support = spec.phi_tilde.support();
    let &[(lo, hi)] = phi_support.as_slice() else {
        return Err(Error::ProfileKind { expected: "compactly supported φ-type" });
    };
    let steps = (r / delta).round() as i64;
    let res = spec.resolution;
    // Outer nodes fine enough for every lattice point.
    let nodes: Vec<(f64, f64)> = spec
        .psi_tilde
        .support()
        .into_iter()
        .flat_map(|(a, b)| {
            let panels = res * ((b - a) * (2.0 * r + 4.0)).ceil() as usize * 2;
            composite(a, b, panels, NODES)
        })
        .map(|(x, w)| (x, w * spec.psi_tilde.eval(x)))
        .filter(|&(_, w)| w != 0.0)
        .collect();
    let rows: Vec<f64> = (-steps..=steps)
        .into_par_iter()
        .map(|iv| {
            let v = iv as f64 * delta;
            let prim = Primitive::new(&spec.phi_tilde, v, lo, hi, res);
            let mut z: Vec<Complex64> = Vec::with_capacity(nodes.len());
            let mut step: Vec<Complex64> = Vec::with_capacity(nodes.len());
            for &(x1, w) in &nodes {
                z.push(inner(&prim, lo, hi, x1) * w * cis(-2.0 * PI * r * x1));
                step.push(cis(2.0 * PI * delta * x1));
            }
            let mut row = 0.0;
            for _ in -steps..=steps {
                row += z.iter().sum::<Complex64>().norm();
                for (a, s) in z.iter_mut().zip(&step) {
                    *a *= s;
                }
            }
            row
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * delta * delta)
}

/// Parameters of the rough model symbol `m_ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MEllSpec {
    pub l0: u32,
    pub psi_tilde: BumpSpec,
    pub phi_tilde: BumpSpec,
    pub resolution: usize,
}

impl Default for MEllSpec {
    fn default() -> Self {
        let (plus, _) = psi_sign_split(&build_psi()).expect("ψ is ψ-type");
        Self {
            l0: 4,
            psi_tilde: plus,
            // One on [-4, 4].
            phi_tilde: BumpSpec::phi_type(Profile::Cutoff { log2_scale: -2 }),
            resolution: 2,
        }
    }
}

/// `∫_{-∞}^0 e^{2πivη} φ̃(η) η dη`.
pub fn m_ell_v_factor(v: f64, spec: &MEllSpec) -> Result<Complex64> {
    let lo = spec
        .phi_tilde
        .support()
        .first()
        .map(|s| s.0)
        .filter(|x| x.is_finite())
        .ok_or(Error::ProfileKind { expected: "compactly supported φ-type" })?;
    let panels = spec.resolution * ((-lo) * (v.abs() + 4.0)).ceil() as usize * 2;
    Ok(composite(lo, 0.0, panels, NODES)
        .into_iter()
        .map(|(x, w)| cis(2.0 * PI * v * x) * (w * x * spec.phi_tilde.eval(x)))
        .sum())
}

/// `∫ e^{2πiuξ} ψ̃(ξ) ξ^{-1} dξ`.
pub fn m_ell_u_factor(u: f64, spec: &MEllSpec) -> Result<Complex64> {
    if !spec.psi_tilde.is_psi() {
        return Err(Error::ProfileKind { expected: "ψ-type" });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in spec.psi_tilde.support() {
        let panels = spec.resolution * ((b - a) * (u.abs() + 4.0)).ceil() as usize * 2;
        for (x, w) in composite(a, b, panels, NODES) {
            acc += cis(2.0 * PI * u * x) * (w * spec.psi_tilde.eval(x) / x);
        }
    }
    Ok(acc)
}

/// `m̌_ℓ(u, v) = 2^{-ℓ+1} · V(v) · U(u)`.
pub fn m_ell_check(l: u32, u: f64, v: f64, spec: &MEllSpec) -> Result<Complex64> {
    if l <= spec.l0 {
        return Err(Error::InvalidArgument(format!("ℓ = {l} must exceed ℓ0 = {}", spec.l0)));
    }
    let pre = (1.0 - l as f64).exp2();
    Ok(m_ell_v_factor(v, spec)? * m_ell_u_factor(u, spec)? * pre)
}

/// Sampled magnitudes with a log-log fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub points: Vec<(f64, f64)>,
    pub fit: LineFit,
}

impl DecayFit {
    pub fn from_samples(points: Vec<(f64, f64)>) -> Self {
        let (x, y): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        let fit = log_log_fit(&x, &y);
        Self { points, fit }
    }
}

/// `count` log-spaced values from `a` to `b` inclusive.
pub fn log_spaced(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| a * (b / a).powf(i as f64 / (count - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::mu_closed;

    /// Plain tensor quadrature with per-row kinks, sharing no code with `inner`.
    fn rho_brute(u: f64, v: f64, spec: &RhoSpec) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x1, w1) in composite(0.5, 2.0, 60, 20) {
            let p = spec.psi_tilde.eval(x1);
            let breaks = [-2.0, -x1, 0.0, 2.0];
            let mut row = Complex64::new(0.0, 0.0);
            for seg in breaks.windows(2) {
                for (eta, w2) in composite(seg[0], seg[1], 40, 20) {
                    let m = mu_closed(&[x1, eta]).unwrap();
                    row += cis(2.0 * PI * eta * v) * (w2 * m * spec.phi_tilde.eval(eta));
                }
            }
            acc += cis(2.0 * PI * u * x1) * row * (w1 * p);
        }
        acc
    }

    #[test]
    fn rho_matches_brute_quadrature() {
        let spec = RhoSpec::default();
        for (u, v) in [(0.0, 0.0), (1.5, -2.0), (-3.0, 4.0)] {
            let a = rho_check(u, v, &spec).unwrap();
            let b = rho_brute(u, v, &spec);
            assert!((a.value - b).norm() < 1e-9, "({u},{v}): {} vs {b}", a.value);
            assert!(a.error_estimate < 1e-8);
        }
    }

    #[test]
    fn rho_conjugate_symmetry() {
        let spec = RhoSpec::default();
        let a = rho_check(2.5, 7.0, &spec).unwrap().value;
        let b = rho_check(-2.5, -7.0, &spec).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn rho_large_v_asymptotics() {
        // Only the kink at η = 0 survives: |ρ̌(0,v)| ≈ 2∫ψ̃(ξ)/ξ dξ / (2πv)².
        let spec = RhoSpec::default();
        let rule = GaussLegendre::new(200);
        let mass = rule.integrate(0.5, 2.0, |x| 2.0 * spec.psi_tilde.eval(x) / x);
        let v = 96.0;
        let got = rho_check(0.0, v, &spec).unwrap().value.norm();
        let expected = mass / (2.0 * PI * v).powi(2);
        assert!((got - expected).abs() < 1e-3 * expected, "{got} vs {expected}");
    }

    #[test]
    fn m_ell_factors() {
        let spec = MEllSpec::default();
        // Flat φ̃ near 0 leaves exactly one boundary term: V(v) = 1/(2πv)².
        for v in [64.0, 128.0] {
            let got = m_ell_v_factor(v, &spec).unwrap();
            let expected = 1.0 / (2.0 * PI * v).powi(2);
            assert!((got - expected).norm() < 1e-6 * expected, "v={v}");
        }
        let a = m_ell_check(6, 3.0, 10.0, &spec).unwrap();
        let b = m_ell_check(5, 3.0, 10.0, &spec).unwrap();
        assert_eq!(a.norm() / b.norm(), 0.5);
        assert!(m_ell_check(4, 1.0, 1.0, &spec).is_err());
    }
}
