use num_complex::Complex64;

use crate::conserved::{check_kappa, quadratic_weighted_mass};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::{bracket, ModulationParams};

/// Flow whose Galilei boost is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoostFlow {
    Mkdv,
    Nls,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoostSpec {
    pub k: f64,
    pub t: f64,
    pub equation: BoostFlow,
}

/// Translation `u(x - s)`, realized as the multiplier `e^{-i xi s}`.
pub fn translate(u: &Field, s: f64) -> Field {
    if s == 0.0 {
        return u.clone();
    }
    u.map_spectrum(|xi| Complex64::from_polar(1.0, -xi * s))
}

/// Galilei boost at time `t`:
///
/// * mKdV: `u^k(x) = e^{-ikx + 2ik^3 t} u(x - 3k^2 t)`
/// * NLS: `u^k(x) = e^{-ikx - ik^2 t} u(x + 2kt)`
///
/// For `k` on the frequency lattice the spectrum is shifted exactly by `k`.
pub fn galilei_boost(u: &Field, b: BoostSpec) -> Field {
    if b.k == 0.0 {
        return u.clone();
    }
    let (shift, phase) = match b.equation {
        BoostFlow::Mkdv => (3.0 * b.k * b.k * b.t, 2.0 * b.k.powi(3) * b.t),
        BoostFlow::Nls => (-2.0 * b.k * b.t, -b.k * b.k * b.t),
    };
    translate(u, shift).map_values(|x| Complex64::from_polar(1.0, phase - b.k * x))
}

/// `24 kappa^3 \int |u^|^2 / ((4 kappa^2 + (xi - k)^2)(16 kappa^2 + (xi - k)^2)) dxi`.
pub fn boosted_beta2(u: &Field, k: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let k2 = kappa * kappa;
    Ok(quadratic_weighted_mass(u, |xi| {
        let e = xi - k;
        24.0 * k2 * kappa / ((4.0 * k2 + e * e) * (16.0 * k2 + e * e))
    }))
}

/// `f_lambda(x) = lambda^{-1} f(x / lambda)` on the box `[-lambda L, lambda L)`.
///
/// The new lattice is the old one divided by `lambda`, so `f_lambda^(xi) = f^(lambda xi)`
/// holds exactly with an unchanged coefficient array.
pub fn scale_field(f: &Field, lambda: f64) -> Result<Field> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Scale(lambda));
    }
    let grid = f.grid().rescaled(lambda)?;
    let values = f.values().iter().map(|v| v / lambda).collect();
    Ok(Field::from_parts(grid, values, f.spectrum().to_vec()))
}

/// `<lambda>^{-min(1/2, 1/p)} <1/lambda>^{s + max(1/2, 1/p)}`.
pub fn scaling_bound_factor(lambda: f64, mp: ModulationParams) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Scale(lambda));
    }
    mp.validate()?;
    let q = 1.0 / mp.p;
    Ok(bracket(lambda).powf(-q.min(0.5)) * bracket(1.0 / lambda).powf(mp.s + q.max(0.5)))
}

/// Exponent `c(s, p)` of the a priori bound: `ps + p/2 - 1` for `p >= 2`,
/// `2s + 2/p - 1` for `p <= 2`.
pub fn apriori_exponent(mp: ModulationParams) -> Result<f64> {
    mp.validate()?;
    if !mp.main_range() {
        return Err(Error::OutOfRange(format!(
            "a priori exponent needs s < 3/2 - 1/p, got p = {}, s = {}",
            mp.p, mp.s
        )));
    }
    Ok(if mp.p >= 2.0 { mp.p * mp.s + mp.p / 2.0 - 1.0 } else { 2.0 * mp.s + 2.0 / mp.p - 1.0 })
}
