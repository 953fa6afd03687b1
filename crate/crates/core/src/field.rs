use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridSpec;

/// Complex samples on a [`GridSpec`] together with their Fourier coefficients.
///
/// The transform is `f^(xi) = (2 pi)^{-1/2} \int e^{-i xi x} f(x) dx`, discretized
/// by the rectangle rule on the periodic box. The Nyquist coefficient is always
/// zero and the stored values are the inverse transform of the stored spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
    spectrum: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); grid.n()];
        Self { grid, values: zero.clone(), spectrum: zero }
    }

    /// Builds a field from samples; the Nyquist component is projected out.
    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        let spectrum = forward(&grid, &values);
        Ok(Self::from_spectrum_unchecked(grid, spectrum))
    }

    pub fn from_spectrum(grid: GridSpec, mut spectrum: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, spectrum.len())?;
        spectrum[0] = Complex64::new(0.0, 0.0);
        Ok(Self::from_spectrum_unchecked(grid, spectrum))
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.xs().into_iter().map(f).collect();
        Self::from_values(grid, values).expect("length matches grid")
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_spectrum_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let spectrum = grid.xis().into_iter().map(f).collect();
        Self::from_spectrum(grid, spectrum).expect("length matches grid")
    }

    fn from_spectrum_unchecked(grid: GridSpec, spectrum: Vec<Complex64>) -> Self {
        let values = inverse(&grid, &spectrum);
        Self { grid, values, spectrum }
    }

    /// Trusted constructor for callers that already hold a consistent pair.
    pub(crate) fn from_parts(grid: GridSpec, values: Vec<Complex64>, spectrum: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        debug_assert_eq!(spectrum.len(), grid.n());
        Self { grid, values, spectrum }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Spectral coefficient at signed lattice index `j`, zero off the lattice.
    pub fn coefficient(&self, j: i64) -> Complex64 {
        self.grid.position(j).map_or(Complex64::new(0.0, 0.0), |m| self.spectrum[m])
    }

    /// `(\sum |u(x_n)|^2 dx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    /// `(\sum |u^(xi_j)|^2 dxi)^{1/2}`.
    pub fn spectral_l2_norm(&self) -> f64 {
        (self.spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dxi()).sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            spectrum: self.spectrum.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            spectrum: self.spectrum.iter().zip(&other.spectrum).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Applies a Fourier multiplier `m(xi)`.
    pub fn map_spectrum(&self, m: impl Fn(f64) -> Complex64) -> Self {
        let spectrum = self.spectrum.iter().enumerate().map(|(i, v)| v * m(self.grid.xi(i))).collect();
        Self::from_spectrum_unchecked(self.grid, spectrum)
    }

    /// Applies a pointwise factor `g(x)` in physical space.
    pub fn map_values(&self, g: impl Fn(f64) -> Complex64) -> Self {
        let values = self.values.iter().enumerate().map(|(i, v)| v * g(self.grid.x(i))).collect();
        Self::from_values(self.grid, values).expect("length matches grid")
    }

    /// `(\int_{I_k} |u^|^2 dxi)^{1/2}` by the lattice midpoint rule.
    pub fn band_l2(&self, k: i64) -> Result<f64> {
        self.grid.check_band(k)?;
        Ok(self.band_l2_unchecked(k))
    }

    pub(crate) fn band_l2_unchecked(&self, k: i64) -> f64 {
        let mass: f64 = self.spectrum[self.grid.band_range(k)].iter().map(|v| v.norm_sqr()).sum();
        (mass * self.grid.dxi()).sqrt()
    }

    /// Band masses for every resolved `k`, ordered from `-k_max` to `k_max`.
    pub fn band_profile(&self) -> Vec<f64> {
        self.grid.resolved_bands().map(|k| self.band_l2_unchecked(k)).collect()
    }

    /// Spectral mass outside the resolved band window, relative to the total.
    pub fn omitted_mass_fraction(&self) -> f64 {
        let total: f64 = self.spectrum.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge = self.grid.k_max() as f64 + 0.5;
        let outside: f64 = self
            .spectrum
            .iter()
            .enumerate()
            .filter(|(m, _)| {
                let xi = self.grid.xi(*m);
                xi >= edge || xi < -edge
            })
            .map(|(_, v)| v.norm_sqr())
            .sum();
        outside / total
    }

    /// Largest imaginary part in physical space.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

fn check_len(grid: &GridSpec, got: usize) -> Result<()> {
    if got != grid.n() {
        return Err(Error::Length { expected: grid.n(), got });
    }
    Ok(())
}

/// Spectrum of `values`, centered order, Nyquist zeroed.
pub fn forward_transform(f: &Field) -> Vec<Complex64> {
    forward(f.grid(), f.values())
}

/// Samples whose spectrum is `spectrum` (centered order).
pub fn inverse_transform(grid: &GridSpec, spectrum: &[Complex64]) -> Vec<Complex64> {
    inverse(grid, spectrum)
}

pub(crate) fn forward(grid: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let (fwd, _) = fft::plans(n);
    let mut buf = values.to_vec();
    fwd.process(&mut buf);
    let c = grid.dx() / (2.0 * PI).sqrt();
    // x_0 = -L contributes e^{i xi_j L} = (-1)^j, and N/2 is even.
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        let v = buf[(m + n / 2) % n] * c;
        *slot = if m % 2 == 0 { v } else { -v };
    }
    out
}

pub(crate) fn inverse(grid: &GridSpec, spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let (_, inv) = fft::plans(n);
    let c = grid.dxi() / (2.0 * PI).sqrt();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (m, v) in spectrum.iter().enumerate().skip(1) {
        let v = v * c;
        buf[(m + n / 2) % n] = if m % 2 == 0 { v } else { -v };
    }
    inv.process(&mut buf);
    buf
}
