//! Splitting `1 = Σ_pieces` on `ℝⁿ∖{0}` by which scale dominates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_psi, BumpKind, BumpSpec, Profile};
use crate::error::{Error, Result};
use crate::symbol::{bad_set_distance, DEFAULT_SEED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PieceKind {
    /// One dominant axis, all others at least `ℓ0` scales below.
    /// `case` is 2 when the dominant axis is the last one, 3 otherwise.
    PsiPhi { case: u8 },
    /// Dominant axis plus a second axis within `ℓ0` scales.
    PsiPsi,
}

/// Sampled lower bound on the distance from the support to the bad set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Case2Certificate {
    pub samples: usize,
    pub min_distance: f64,
}

/// Scale-relative translations `(u, v, α_2..α_{n-1})` applied as
/// `u` on axis 1, `α_j v` on axis `j`, `v` on axis `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ShiftSpec {
    pub u: f64,
    pub v: f64,
    pub alpha_tail: Vec<f64>,
}

impl ShiftSpec {
    pub fn per_axis(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 || self.alpha_tail.len() != n - 2 {
            return Err(Error::Shape(format!(
                "shift tail has {} entries, expected {}",
                self.alpha_tail.len(),
                n.saturating_sub(2)
            )));
        }
        let mut s = vec![self.u];
        s.extend(self.alpha_tail.iter().map(|a| a * self.v));
        s.push(self.v);
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolPiece {
    pub kind: PieceKind,
    /// 0-based; the first entry carries the scale `k`.
    pub psi_axes: Vec<usize>,
    pub profiles: Vec<BumpSpec>,
    /// Extra scale offset applied to the non-dominant axes.
    pub scale_offset: i32,
    pub shifts: Vec<f64>,
    pub certificate: Option<Case2Certificate>,
}

impl SymbolPiece {
    pub fn dim(&self) -> usize {
        self.profiles.len()
    }

    pub fn main_axis(&self) -> usize {
        self.psi_axes[0]
    }

    pub fn with_shifts(mut self, shifts: &ShiftSpec) -> Result<Self> {
        self.shifts = shifts.per_axis(self.dim())?;
        Ok(self)
    }

    /// Scale of the profile on `axis` when the piece sits at scale `k`.
    pub fn axis_scale(&self, axis: usize, k: i32) -> i32 {
        if axis == self.main_axis() {
            k
        } else {
            k - self.scale_offset
        }
    }

    /// Scales `k` at which the main-axis profile can be nonzero for `|ξ_main| ∈ [lo, hi]`.
    pub fn scale_range(&self, lo: f64, hi: f64) -> (i32, i32) {
        let p = &self.profiles[self.main_axis()].profile;
        let a = p.inner_radius();
        let b = p.outer_radius();
        ((lo / b).log2().floor() as i32 - 1, (hi / a).log2().ceil() as i32 + 1)
    }

    /// `Σ_k Π_j p_j(2^{-k}ξ_j) e^{-2πi 2^{-k} s_j ξ_j}`.
    pub fn symbol(&self, xi: &[f64]) -> Complex64 {
        let x = xi[self.main_axis()].abs();
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (k0, k1) = self.scale_range(x, x);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in k0..=k1 {
            let mut term = Complex64::new(1.0, 0.0);
            for (axis, spec) in self.profiles.iter().enumerate() {
                let s = (-self.axis_scale(axis, k) as f64).exp2() * xi[axis];
                let p = spec.eval(s);
                if p == 0.0 {
                    term = Complex64::new(0.0, 0.0);
                    break;
                }
                term *= Complex64::from_polar(p, -2.0 * PI * self.shifts[axis] * s);
            }
            acc += term;
        }
        acc
    }

    /// Draws support points at scale 0 and records the smallest bad-set distance.
    pub fn certify(&self, samples: usize, seed: u64) -> Case2Certificate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let supports: Vec<Vec<(f64, f64)>> = self.profiles.iter().map(|p| p.support()).collect();
        let mut min_distance = f64::INFINITY;
        let mut taken = 0;
        while taken < samples {
            let xi: Vec<f64> = supports
                .iter()
                .map(|ivs| {
                    let (a, b) = ivs[rng.gen_range(0..ivs.len())];
                    a + (b - a) * rng.gen::<f64>()
                })
                .collect();
            let weight: f64 = self.profiles.iter().zip(&xi).map(|(p, &x)| p.eval(x)).product();
            if weight == 0.0 {
                continue;
            }
            taken += 1;
            min_distance = min_distance.min(bad_set_distance(&xi));
        }
        Case2Certificate { samples, min_distance }
    }
}

const CERTIFICATE_SAMPLES: usize = 4096;

/// Pieces whose symbols sum to one on `ℝⁿ∖{0}`.
///
/// Term `j` covers frequencies whose largest scale sits on axis `j` (ties go
/// to the smaller index). Within it, either every other axis is at least `ℓ0`
/// scales lower (ψ-φ), or `j1` is the first axis within `ℓ0` scales (ψ-ψ).
/// For `n = 2` the two ψ-ψ terms cover the same band and are merged.
pub fn decompose_symbol(n: usize, l0: u32) -> Result<Vec<SymbolPiece>> {
    if n < 2 {
        return Err(Error::InvalidArgument("decomposition needs n >= 2".into()));
    }
    if l0 == 0 {
        return Err(Error::InvalidArgument("ℓ0 must be at least 1".into()));
    }
    let l0 = l0 as i32;
    let psi = build_psi();
    let cutoff = |s: i32| BumpSpec::phi_type(Profile::Cutoff { log2_scale: s });
    let window = |inner: i32, outer: i32| BumpSpec {
        kind: BumpKind::Psi,
        profile: Profile::Annulus { inner, outer },
    };
    let mut pieces = Vec::new();
    for j in 0..n {
        let mut profiles: Vec<BumpSpec> = (0..n).map(|_| cutoff(l0)).collect();
        profiles[j] = psi.clone();
        let case = if j == n - 1 { 2 } else { 3 };
        let mut piece = SymbolPiece {
            kind: PieceKind::PsiPhi { case },
            psi_axes: vec![j],
            profiles,
            scale_offset: 0,
            shifts: vec![0.0; n],
            certificate: None,
        };
        if case == 2 {
            piece.certificate = Some(piece.certify(CERTIFICATE_SAMPLES, DEFAULT_SEED));
        }
        pieces.push(piece);
    }
    if n == 2 {
        pieces.push(SymbolPiece {
            kind: PieceKind::PsiPsi,
            psi_axes: vec![0, 1],
            profiles: vec![psi.clone(), window(-(l0 - 1), l0)],
            scale_offset: 0,
            shifts: vec![0.0; 2],
            certificate: None,
        });
        return Ok(pieces);
    }
    let below = |i: usize, j: usize| i32::from(i < j);
    for j in 0..n {
        for j1 in (0..n).filter(|&i| i != j) {
            let inner = below(j1, j);
            if inner >= l0 {
                continue;
            }
            let profiles = (0..n)
                .map(|i| {
                    if i == j {
                        psi.clone()
                    } else if i == j1 {
                        window(inner, l0)
                    } else if i < j1 {
                        cutoff(l0)
                    } else {
                        cutoff(below(i, j))
                    }
                })
                .collect();
            pieces.push(SymbolPiece {
                kind: PieceKind::PsiPsi,
                psi_axes: vec![j, j1],
                profiles,
                scale_offset: 0,
                shifts: vec![0.0; n],
                certificate: None,
            });
        }
    }
    Ok(pieces)
}

/// Sum of the piece symbols (real part; imaginary part vanishes without shifts).
pub fn partition_sum(pieces: &[SymbolPiece], xi: &[f64]) -> f64 {
    pieces.iter().map(|p| p.symbol(xi).re).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::random_unit_point;

    #[test]
    fn piece_counts() {
        assert_eq!(decompose_symbol(2, 4).unwrap().len(), 3);
        assert_eq!(decompose_symbol(3, 4).unwrap().len(), 9);
        assert_eq!(decompose_symbol(4, 4).unwrap().len(), 16);
        // With ℓ0 = 1 the windows below the dominant axis are empty.
        assert_eq!(decompose_symbol(3, 1).unwrap().len(), 6);
        let pieces = decompose_symbol(2, 4).unwrap();
        let psi_psi = pieces.iter().filter(|p| p.kind == PieceKind::PsiPsi).count();
        assert_eq!(psi_psi, 1);
    }

    #[test]
    fn partition_of_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4 {
            for l0 in [1, 2, 4] {
                let pieces = decompose_symbol(n, l0).unwrap();
                for _ in 0..300 {
                    let r = 1.0 + 3.0 * rng.gen::<f64>();
                    let xi: Vec<f64> = random_unit_point(&mut rng, n).iter().map(|x| r * x).collect();
                    let s = partition_sum(&pieces, &xi);
                    assert!((s - 1.0).abs() < 1e-10, "n={n} l0={l0} xi={xi:?} sum={s}");
                }
            }
        }
    }

    #[test]
    fn partition_on_axes_and_diagonals() {
        let pieces = decompose_symbol(3, 4).unwrap();
        for xi in [[1.0, 0.0, 0.0], [0.0, 0.0, -3.0], [1.0, 1.0, 1.0], [2.0, -2.0, 0.01]] {
            assert!((partition_sum(&pieces, &xi) - 1.0).abs() < 1e-12, "{xi:?}");
        }
    }

    #[test]
    fn case2_certificates() {
        for n in 2..=4 {
            let pieces = decompose_symbol(n, 4).unwrap();
            let case2: Vec<_> =
                pieces.iter().filter(|p| p.kind == PieceKind::PsiPhi { case: 2 }).collect();
            assert_eq!(case2.len(), 1);
            let cert = case2[0].certificate.unwrap();
            // Oracle: |ξ_n| ≥ 1/2 and the others sum to at most (n-1)·2^{-3}.
            let floor = (0.5 - (n - 1) as f64 * 0.125) / (n as f64).sqrt();
            assert!(cert.min_distance >= floor, "n={n}: {}", cert.min_distance);
        }
    }

    #[test]
    fn shifts_never_increase_modulus() {
        let pieces = decompose_symbol(3, 4).unwrap();
        let shift = ShiftSpec { u: 0.7, v: -1.3, alpha_tail: vec![0.25] };
        let xi = [0.9, -1.4, 0.3];
        for p in &pieces {
            let a = p.symbol(&xi);
            let b = p.clone().with_shifts(&shift).unwrap().symbol(&xi);
            // Every scale term is nonnegative without shifts, so phases can only cancel.
            assert!(a.im.abs() < 1e-15);
            assert!(b.norm() <= a.re + 1e-12);
        }
        assert!(pieces[0].clone().with_shifts(&ShiftSpec::default()).is_err());
    }
}
