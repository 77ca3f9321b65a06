//! Periodic grid functions, partial Fourier transforms, per-axis multipliers and norms.
//!
//! Axes are 0-based in the Rust API. The forward transform uses the kernel
//! `e^{-2πi x·ξ/L}` scaled by `L/M` per transformed axis, so spectral sums
//! approximate continuum integrals.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::bumps::BumpSpec;
use crate::error::{Error, Result};

/// Complex samples of an `L`-periodic function on a power-of-two grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    sizes: Vec<usize>,
    period: f64,
    values: Vec<Complex64>,
}

/// Partial or full spectrum of a [`GridFunction`].
///
/// Transformed axes are stored in FFT order; use [`SpectralFunction::at`] with
/// signed frequencies in `[-M/2, M/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    sizes: Vec<usize>,
    period: f64,
    axes: Vec<bool>,
    values: Vec<Complex64>,
}

fn check_shape(sizes: &[usize], period: f64) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::Shape("grid needs at least one axis".into()));
    }
    if let Some(m) = sizes.iter().find(|m| !m.is_power_of_two()) {
        return Err(Error::Shape(format!("axis size {m} is not a power of two")));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::Shape(format!("period must be positive, got {period}")));
    }
    Ok(())
}

/// Signed frequency stored at FFT index `i` on an axis of length `m`.
pub fn signed_frequency(i: usize, m: usize) -> i64 {
    if i < m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for j in (0..sizes.len().saturating_sub(1)).rev() {
        s[j] = s[j + 1] * sizes[j + 1];
    }
    s
}

/// Runs `f(line, line_index)` on every 1-d line along `axis`.
fn for_each_line<F>(values: &mut [Complex64], sizes: &[usize], axis: usize, mut f: F)
where
    F: FnMut(&mut [Complex64], usize),
{
    let m = sizes[axis];
    let stride: usize = sizes[axis + 1..].iter().product();
    let outer: usize = sizes[..axis].iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let mut line = 0;
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * m * stride + inner;
            for (i, b) in buf.iter_mut().enumerate() {
                *b = values[base + i * stride];
            }
            f(&mut buf, line);
            for (i, b) in buf.iter().enumerate() {
                values[base + i * stride] = *b;
            }
            line += 1;
        }
    }
}

fn fft_axis(values: &mut [Complex64], sizes: &[usize], axis: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(sizes[axis], direction);
    for_each_line(values, sizes, axis, |line, _| fft.process(line));
}

impl GridFunction {
    pub fn new(sizes: Vec<usize>, period: f64, values: Vec<Complex64>) -> Result<Self> {
        check_shape(&sizes, period)?;
        let total: usize = sizes.iter().product();
        if values.len() != total {
            return Err(Error::Shape(format!(
                "expected {total} values, got {}",
                values.len()
            )));
        }
        Ok(Self { sizes, period, values })
    }

    pub fn zeros(sizes: Vec<usize>, period: f64) -> Result<Self> {
        let total = sizes.iter().product();
        Self::new(sizes, period, vec![Complex64::new(0.0, 0.0); total])
    }

    pub fn constant(sizes: Vec<usize>, period: f64, c: Complex64) -> Result<Self> {
        let total = sizes.iter().product();
        Self::new(sizes, period, vec![c; total])
    }

    /// Samples `f` at the grid points `x_j = i_j·L/M_j`.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(
        sizes: Vec<usize>,
        period: f64,
        mut f: F,
    ) -> Result<Self> {
        check_shape(&sizes, period)?;
        let total: usize = sizes.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut x = vec![0.0; sizes.len()];
        for flat in 0..total {
            let mut rem = flat;
            for j in (0..sizes.len()).rev() {
                x[j] = (rem % sizes[j]) as f64 * period / sizes[j] as f64;
                rem /= sizes[j];
            }
            values.push(f(&x));
        }
        Self::new(sizes, period, values)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.sizes
            .iter()
            .map(|&m| self.period / m as f64)
            .product()
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.sizes == other.sizes && self.period == other.period
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim() });
        }
        Ok(())
    }

    /// Pointwise map.
    pub fn map<F: FnMut(Complex64) -> Complex64>(&self, f: F) -> GridFunction {
        GridFunction {
            sizes: self.sizes.clone(),
            period: self.period,
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        self.map(|v| v * c)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return Err(Error::Shape("pointwise product of different grids".into()));
        }
        Ok(GridFunction {
            sizes: self.sizes.clone(),
            period: self.period,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return Err(Error::Shape("linear combination of different grids".into()));
        }
        Ok(GridFunction {
            sizes: self.sizes.clone(),
            period: self.period,
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
        })
    }

    /// Riemann-sum integral over one period cell.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.cell_volume()
    }

    /// `∫ self · other` (no conjugation).
    pub fn pairing(&self, other: &GridFunction) -> Result<Complex64> {
        if !self.same_grid(other) {
            return Err(Error::Shape("pairing of different grids".into()));
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.cell_volume())
    }

    /// Multiplies the axis-`axis` spectrum by `mult(ξ)`, `ξ = m/L` the physical frequency.
    pub fn multiply_axis<F: Fn(f64) -> Complex64>(&self, axis: usize, mult: F) -> Result<GridFunction> {
        self.check_axis(axis)?;
        let m = self.sizes[axis];
        let table: Vec<Complex64> = (0..m)
            .map(|i| mult(signed_frequency(i, m) as f64 / self.period))
            .collect();
        let mut values = self.values.clone();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let norm = 1.0 / m as f64;
        for_each_line(&mut values, &self.sizes, axis, |line, _| {
            fwd.process(line);
            for (v, t) in line.iter_mut().zip(&table) {
                *v *= t * norm;
            }
            inv.process(line);
        });
        Ok(GridFunction { sizes: self.sizes.clone(), period: self.period, values })
    }

    /// Periodic translate `x ↦ F(x + s·e_axis)` by spectral phase.
    pub fn translate(&self, axis: usize, s: f64) -> Result<GridFunction> {
        self.multiply_axis(axis, |xi| Complex64::from_polar(1.0, 2.0 * PI * xi * s))
    }

    /// Trigonometric interpolant evaluated at an arbitrary point.
    pub fn evaluate_at(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim() {
            return Err(Error::Shape("point dimension differs from grid".into()));
        }
        let spec = dft(self, &(0..self.dim()).collect::<Vec<_>>())?;
        let mut acc = Complex64::new(0.0, 0.0);
        let st = strides(&self.sizes);
        for (flat, v) in spec.values.iter().enumerate() {
            let mut phase = 0.0;
            for j in 0..self.dim() {
                let i = (flat / st[j]) % self.sizes[j];
                phase += signed_frequency(i, self.sizes[j]) as f64 * x[j] / self.period;
            }
            acc += v * Complex64::from_polar(1.0, 2.0 * PI * phase);
        }
        Ok(acc / self.period.powi(self.dim() as i32))
    }

    /// Writes the `SXLB` binary format.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"SXLB")?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.dim() as u32).to_le_bytes())?;
        for &m in &self.sizes {
            w.write_all(&(m as u32).to_le_bytes())?;
        }
        w.write_all(&self.period.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<GridFunction> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"SXLB" {
            return Err(Error::Format("bad magic bytes".into()));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let dim = read_u32(&mut r)? as usize;
        if dim == 0 || dim > 16 {
            return Err(Error::Format(format!("implausible dimension {dim}")));
        }
        let mut sizes = Vec::with_capacity(dim);
        for _ in 0..dim {
            sizes.push(read_u32(&mut r)? as usize);
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let period = f64::from_le_bytes(b8);
        check_shape(&sizes, period).map_err(|e| Error::Format(e.to_string()))?;
        let total: usize = sizes.iter().product();
        let mut values = Vec::with_capacity(total);
        for _ in 0..total {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            values.push(Complex64::new(re, f64::from_le_bytes(b8)));
        }
        GridFunction::new(sizes, period, values)
    }
}

pub const FORMAT_VERSION: u32 = 1;

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

impl SpectralFunction {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn transformed_axes(&self) -> Vec<usize> {
        (0..self.sizes.len()).filter(|&j| self.axes[j]).collect()
    }

    /// Raw storage, FFT order on transformed axes.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Replaces the raw storage (FFT order on transformed axes).
    pub fn set_values(&mut self, values: Vec<Complex64>) -> Result<()> {
        if values.len() != self.values.len() {
            return Err(Error::Shape("spectral value count mismatch".into()));
        }
        self.values = values;
        Ok(())
    }

    /// Value at signed frequency (transformed axes) or grid index (others).
    pub fn at(&self, idx: &[i64]) -> Complex64 {
        let st = strides(&self.sizes);
        let flat: usize = idx
            .iter()
            .enumerate()
            .map(|(j, &k)| k.rem_euclid(self.sizes[j] as i64) as usize * st[j])
            .sum();
        self.values[flat]
    }

    /// `Σ|F̂|² / L^n`, the spatial `‖F‖₂²` by Plancherel when all axes are transformed.
    pub fn l2_norm_squared(&self) -> f64 {
        let t = self.axes.iter().filter(|&&a| a).count() as i32;
        let cell: f64 = self
            .sizes
            .iter()
            .zip(&self.axes)
            .filter(|(_, &a)| !a)
            .map(|(&m, _)| self.period / m as f64)
            .product();
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell / self.period.powi(t)
    }
}

/// Forward transform on the listed axes.
pub fn dft(f: &GridFunction, axes: &[usize]) -> Result<SpectralFunction> {
    let mut mask = vec![false; f.dim()];
    for &a in axes {
        f.check_axis(a)?;
        mask[a] = true;
    }
    let mut values = f.values.clone();
    let mut scale = 1.0;
    for (a, &on) in mask.iter().enumerate() {
        if on {
            fft_axis(&mut values, &f.sizes, a, FftDirection::Forward);
            scale *= f.period / f.sizes[a] as f64;
        }
    }
    for v in &mut values {
        *v *= scale;
    }
    Ok(SpectralFunction { sizes: f.sizes.clone(), period: f.period, axes: mask, values })
}

/// Inverse of [`dft`] on the axes it transformed.
pub fn idft(s: &SpectralFunction) -> GridFunction {
    let mut values = s.values.clone();
    let mut scale = 1.0;
    for (a, &on) in s.axes.iter().enumerate() {
        if on {
            fft_axis(&mut values, &s.sizes, a, FftDirection::Inverse);
            scale /= s.period;
        }
    }
    for v in &mut values {
        *v *= scale;
    }
    GridFunction { sizes: s.sizes.clone(), period: s.period, values }
}

/// Multiplies the axis spectrum by `profile(2^{-k}ξ)·e^{-2πi·2^{-k}uξ}`.
pub fn convolve_axis(
    f: &GridFunction,
    profile: &BumpSpec,
    k: i32,
    axis: usize,
    u: f64,
) -> Result<GridFunction> {
    let dil = (-k as f64).exp2();
    f.multiply_axis(axis, |xi| {
        let s = dil * xi;
        let p = profile.eval(s);
        if p == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(p, -2.0 * PI * u * s)
        }
    })
}

/// Riemann-sum `L^p` norm; `p = f64::INFINITY` gives the max norm.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let s: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    Ok((s * f.cell_volume()).powf(1.0 / p))
}
