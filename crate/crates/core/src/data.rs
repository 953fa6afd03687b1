//! Initial data families used by tests and experiments.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::field::Field;
use crate::grid::GridSpec;
use crate::norms::bracket;

/// `amplitude * exp(-x^2 / (2 width^2)) * exp(i k0 x)`.
pub fn gaussian(grid: GridSpec, width: f64, amplitude: f64, k0: f64) -> Field {
    Field::from_fn(grid, |x| Complex64::from_polar(amplitude * (-x * x / (2.0 * width * width)).exp(), k0 * x))
}

/// `sech(x)`.
pub fn sech(grid: GridSpec) -> Field {
    Field::from_real_fn(grid, |x| 1.0 / x.cosh())
}

/// Spectrum equal to 1 on lattice frequencies in `[a, b)` and 0 elsewhere.
pub fn spectral_indicator(grid: GridSpec, a: f64, b: f64) -> Field {
    Field::from_spectrum_fn(grid, |xi| Complex64::new(if xi >= a && xi < b { 1.0 } else { 0.0 }, 0.0))
}

/// Indicator of the unit band `I_k`.
pub fn band_indicator(grid: GridSpec, k: i64) -> Field {
    spectral_indicator(grid, k as f64 - 0.5, k as f64 + 0.5)
}

/// Width of the spectral bumps in [`random_band`].
pub const RANDOM_BAND_WIDTH: f64 = 0.25;

/// Sum of Gaussian spectral bumps centred at the integers `|k| <= bands`, with
/// complex normal coefficients damped by `<k>^{-1}`, rescaled to unit `L^2`
/// norm and multiplied by `amplitude`.
pub fn random_band(grid: GridSpec, seed: u64, bands: i64, amplitude: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, Complex64)> = (-bands..=bands)
        .map(|k| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let k = k as f64;
            (k, Complex64::new(re, im) / bracket(k))
        })
        .collect();
    let w2 = 2.0 * RANDOM_BAND_WIDTH * RANDOM_BAND_WIDTH;
    let f = Field::from_spectrum_fn(grid, |xi| coeffs.iter().map(|(k, c)| c * (-(xi - k) * (xi - k) / w2).exp()).sum());
    let norm = f.l2_norm();
    if norm == 0.0 {
        f
    } else {
        f.scaled(Complex64::new(amplitude / norm, 0.0))
    }
}
