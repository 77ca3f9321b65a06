//! Smooth cutoffs, ψ/φ-type profiles, the frequency-space partition into pieces
//! and the two decay probes.

mod decay;
mod decomp;

pub use decay::{
    log_spaced, m_ell_check, m_ell_u_factor, m_ell_v_factor, rho_check, rho_lattice_sum, DecayFit,
    MEllSpec, RhoSpec, RhoValue,
};
pub use decomp::{
    decompose_symbol, partition_sum, Case2Certificate, PieceKind, ShiftSpec, SymbolPiece,
};

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

const PANELS: usize = 512;
const PANEL_NODES: usize = 12;

/// `exp(-1/(1-t²))` on `(-1, 1)`.
fn mollifier(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

struct CumulativeTable {
    /// `cum[p] = ∫_{-1}^{t_p} mollifier`, `t_p = -1 + 2p/PANELS`.
    cum: Vec<f64>,
    total: f64,
}

fn table() -> &'static CumulativeTable {
    static TABLE: OnceLock<CumulativeTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let rule = GaussLegendre::new(PANEL_NODES);
        let h = 2.0 / PANELS as f64;
        let mut cum = Vec::with_capacity(PANELS + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for p in 0..PANELS {
            let a = -1.0 + h * p as f64;
            acc += rule.integrate(a, a + h, mollifier);
            cum.push(acc);
        }
        CumulativeTable { total: acc, cum }
    })
}

/// Normalized primitive of the mollifier: 0 at `-1`, 1 at `1`.
fn smooth_step(t: f64) -> f64 {
    if t <= -1.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    // Integrate from the nearer end so both tails stay accurate.
    if t > 0.0 {
        return 1.0 - smooth_step(-t);
    }
    let tab = table();
    let h = 2.0 / PANELS as f64;
    let p = (((t + 1.0) / h) as usize).min(PANELS - 1);
    let a = -1.0 + h * p as f64;
    let part = GaussLegendre::cached(PANEL_NODES).integrate(a, t, mollifier);
    (tab.cum[p] + part) / tab.total
}

/// The smooth cutoff χ: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, monotone in `|η|`.
pub fn chi(eta: f64) -> f64 {
    let a = eta.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        1.0 - smooth_step(2.0 * a - 3.0)
    }
}

/// Concrete 1-d profiles built from χ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Profile {
    /// `χ(2^s η)`.
    Cutoff { log2_scale: i32 },
    /// `χ(2^a η) − χ(2^b η)` with `a < b`.
    Annulus { inner: i32, outer: i32 },
    /// The base profile restricted to one half-line.
    HalfLine { base: Box<Profile>, positive: bool },
    /// Identically one.
    One,
}

impl Profile {
    pub fn eval(&self, eta: f64) -> f64 {
        match self {
            Profile::Cutoff { log2_scale } => chi((*log2_scale as f64).exp2() * eta),
            Profile::Annulus { inner, outer } => {
                chi((*inner as f64).exp2() * eta) - chi((*outer as f64).exp2() * eta)
            }
            Profile::HalfLine { base, positive } => {
                if (*positive && eta > 0.0) || (!*positive && eta < 0.0) {
                    base.eval(eta)
                } else {
                    0.0
                }
            }
            Profile::One => 1.0,
        }
    }

    /// Closed intervals outside of which the profile vanishes.
    pub fn support(&self) -> Vec<(f64, f64)> {
        match self {
            Profile::Cutoff { log2_scale } => {
                let r = (1.0 - *log2_scale as f64).exp2();
                vec![(-r, r)]
            }
            Profile::Annulus { inner, outer } => {
                let lo = (-*outer as f64).exp2();
                let hi = (1.0 - *inner as f64).exp2();
                vec![(-hi, -lo), (lo, hi)]
            }
            Profile::HalfLine { base, positive } => base
                .support()
                .into_iter()
                .filter_map(|(a, b)| {
                    let (a, b) = if *positive { (a.max(0.0), b) } else { (a, b.min(0.0)) };
                    (a < b).then_some((a, b))
                })
                .collect(),
            Profile::One => vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    /// Smallest `|η|` in the support.
    pub fn inner_radius(&self) -> f64 {
        self.support()
            .iter()
            .map(|&(a, b)| if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|η|` in the support.
    pub fn outer_radius(&self) -> f64 {
        self.support()
            .iter()
            .map(|&(a, b)| a.abs().max(b.abs()))
            .fold(0.0, f64::max)
    }
}

/// Partition-of-unity role of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpKind {
    /// Supported away from the origin.
    Psi,
    /// Low-pass, compactly supported or constant.
    Phi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub kind: BumpKind,
    pub profile: Profile,
}

impl BumpSpec {
    /// Wraps a profile as ψ-type, checking that its support avoids the origin.
    pub fn psi_type(profile: Profile) -> Result<Self> {
        if profile.inner_radius() <= 0.0 {
            return Err(Error::ProfileKind { expected: "ψ-type (support away from 0)" });
        }
        Ok(Self { kind: BumpKind::Psi, profile })
    }

    pub fn phi_type(profile: Profile) -> Self {
        Self { kind: BumpKind::Phi, profile }
    }

    pub fn eval(&self, eta: f64) -> f64 {
        self.profile.eval(eta)
    }

    pub fn support(&self) -> Vec<(f64, f64)> {
        self.profile.support()
    }

    pub fn is_psi(&self) -> bool {
        self.kind == BumpKind::Psi
    }
}

/// `ψ(η) = χ(η) − χ(2η)`, supported in `1/2 ≤ |η| ≤ 2`.
pub fn build_psi() -> BumpSpec {
    BumpSpec { kind: BumpKind::Psi, profile: Profile::Annulus { inner: 0, outer: 1 } }
}

/// `χ` itself.
pub fn build_chi() -> BumpSpec {
    BumpSpec::phi_type(Profile::Cutoff { log2_scale: 0 })
}

/// `φ(η) = χ(2^{-ℓ0}η)`: one on `|η| ≤ 2^{ℓ0}`.
pub fn build_phi(l0: u32) -> Result<BumpSpec> {
    check_l0(l0)?;
    Ok(BumpSpec::phi_type(Profile::Cutoff { log2_scale: -(l0 as i32) }))
}

/// `χ(2^{ℓ0}η)`: supported in `|η| ≤ 2^{1-ℓ0}`.
pub fn build_phi_small(l0: u32) -> Result<BumpSpec> {
    check_l0(l0)?;
    Ok(BumpSpec::phi_type(Profile::Cutoff { log2_scale: l0 as i32 }))
}

fn check_l0(l0: u32) -> Result<()> {
    if l0 == 0 || l0 > 60 {
        return Err(Error::InvalidArgument(format!("ℓ0 must lie in 1..=60, got {l0}")));
    }
    Ok(())
}

/// Splits a ψ-type profile into its positive and negative half-line parts.
pub fn psi_sign_split(psi: &BumpSpec) -> Result<(BumpSpec, BumpSpec)> {
    if !psi.is_psi() {
        return Err(Error::ProfileKind { expected: "ψ-type" });
    }
    let half = |positive| BumpSpec {
        kind: BumpKind::Psi,
        profile: Profile::HalfLine { base: Box::new(psi.profile.clone()), positive },
    };
    Ok((half(true), half(false)))
}

/// `ψ(2^{-k}η)` summed over `k ∈ [a, b]`, evaluated term by term.
pub fn psi_partial_sum(eta: f64, a: i32, b: i32) -> f64 {
    let psi = build_psi();
    (a..=b).map(|k| psi.eval((-k as f64).exp2() * eta)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_plateau_and_support() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(-1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(chi(-7.0), 0.0);
        assert!((chi(1.5) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn chi_is_monotone_and_smooth_at_the_ends() {
        let mut last = 1.0;
        for i in 0..=2000 {
            let x = 1.0 + i as f64 / 2000.0;
            let c = chi(x);
            assert!(c <= last + 1e-15, "not monotone at {x}");
            last = c;
        }
        assert!(chi(1.0 + 1e-3) > 1.0 - 1e-12);
        assert!(chi(2.0 - 1e-3) < 1e-12);
    }

    #[test]
    fn smooth_step_matches_direct_quadrature() {
        let rule = GaussLegendre::new(200);
        let total = rule.integrate(-1.0, 1.0, mollifier);
        for t in [-0.9, -0.3, 0.0, 0.25, 0.8] {
            let direct = rule.integrate(-1.0, t, mollifier) / total;
            assert!((smooth_step(t) - direct).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn psi_examples() {
        let psi = build_psi();
        let s: f64 = (-20..=20).map(|k| psi.eval((-(k as f64)).exp2() * 0.37)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(psi.eval(0.4), 0.0);
        assert_eq!(psi.eval(3.0), 0.0);
        assert!((psi.eval(1.0) + psi.eval(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(psi.support(), vec![(-2.0, -0.5), (0.5, 2.0)]);
    }

    #[test]
    fn phi_examples() {
        let l0 = 4;
        let phi = build_phi(l0).unwrap();
        assert_eq!(phi.eval(0.0), 1.0);
        assert_eq!(phi.eval(16.0), 1.0);
        assert_eq!(phi.eval(64.0), 0.0);
        let s = psi_partial_sum(1.0, -60, l0 as i32);
        assert!((s - 1.0).abs() < 1e-12);
        let small = build_phi_small(l0).unwrap();
        assert_eq!(small.support(), vec![(-0.125, 0.125)]);
        assert!(build_phi(0).is_err());
    }

    #[test]
    fn telescoping_partial_sums() {
        for &eta in &[0.013, 0.37, 1.0, 5.5, -3.2, 700.0] {
            for (a, b) in [(-3, 2), (0, 0), (-10, 10), (2, 6)] {
                let lhs = psi_partial_sum(eta, a, b);
                let rhs = chi((-b as f64).exp2() * eta) - chi((1.0 - a as f64).exp2() * eta);
                assert!((lhs - rhs).abs() < 1e-12, "eta={eta} a={a} b={b}");
            }
        }
    }

    #[test]
    fn sign_split() {
        let psi = build_psi();
        let (p, m) = psi_sign_split(&psi).unwrap();
        assert_eq!(p.eval(1.0), psi.eval(1.0));
        assert_eq!(p.eval(-1.0), 0.0);
        for i in 0..100 {
            let x = -2.5 + 5.0 * i as f64 / 99.0;
            assert_eq!(p.eval(x) + m.eval(x) - psi.eval(x), 0.0);
            assert_eq!(m.eval(x), p.eval(-x));
        }
        assert!(psi_sign_split(&build_chi()).is_err());
        assert_eq!(p.support(), vec![(0.5, 2.0)]);
    }
}
