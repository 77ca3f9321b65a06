//! Seeded test data.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{idft, signed_frequency, GridFunction};
use crate::symbol::gaussian;

/// Random trigonometric polynomial with Gaussian coefficients on `|k_j| ≤ cutoff`.
///
/// Real output keeps the spectrum Hermitian.
pub fn random_bandlimited(
    sizes: &[usize],
    period: f64,
    cutoff: usize,
    seed: u64,
    real: bool,
) -> Result<GridFunction> {
    if sizes.iter().any(|&m| 2 * cutoff >= m) {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} is not below half of every axis size {sizes:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = GridFunction::zeros(sizes.to_vec(), period)?;
    let all: Vec<usize> = (0..sizes.len()).collect();
    let mut spec = crate::grid::dft(&zero, &all)?;
    let n = sizes.len();
    let total: usize = sizes.iter().product();
    let amp = period.powi(n as i32);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); total];
    for (flat, c) in coeffs.iter_mut().enumerate() {
        let mut rem = flat;
        let mut inside = true;
        for j in (0..n).rev() {
            let k = signed_frequency(rem % sizes[j], sizes[j]);
            rem /= sizes[j];
            inside &= k.unsigned_abs() as usize <= cutoff;
        }
        if inside {
            *c = Complex64::new(gaussian(&mut rng), gaussian(&mut rng)) * amp;
        }
    }
    spec.set_values(coeffs)?;
    let f = idft(&spec);
    if real {
        Ok(f.map(|v| Complex64::new(v.re, 0.0)))
    } else {
        Ok(f)
    }
}
