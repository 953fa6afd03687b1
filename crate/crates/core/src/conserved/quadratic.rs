use crate::error::Result;
use crate::field::Field;
use crate::norms::bracket;

use super::{check_kappa, SpectralParameter};

/// `\int w(xi) |f^(xi)|^2 dxi` by the lattice midpoint rule.
pub(crate) fn weighted_mass(f: &Field, w: impl Fn(f64) -> f64) -> f64 {
    let g = f.grid();
    f.spectrum().iter().enumerate().map(|(m, v)| w(g.xi(m)) * v.norm_sqr()).sum::<f64>() * g.dxi()
}

/// `2 kappa \int |f^|^2 / (4 kappa^2 + xi^2) dxi`.
pub fn alpha2(f: &Field, kp: SpectralParameter) -> Result<f64> {
    check_kappa(kp.kappa)?;
    let k = kp.kappa;
    Ok(weighted_mass(f, |xi| 2.0 * k / (4.0 * k * k + xi * xi)))
}

/// `24 kappa^3 \int |f^|^2 / ((4 kappa^2 + xi^2)(16 kappa^2 + xi^2)) dxi`.
pub fn beta2(f: &Field, kp: SpectralParameter) -> Result<f64> {
    check_kappa(kp.kappa)?;
    let k = kp.kappa;
    let k2 = k * k;
    Ok(weighted_mass(f, |xi| 24.0 * k2 * k / ((4.0 * k2 + xi * xi) * (16.0 * k2 + xi * xi))))
}

/// `(\int log<xi - k> / <xi - k> |f^|^2 dxi)^ell`.
pub fn tail_bound(f: &Field, k: f64, ell: u32) -> f64 {
    let inner = weighted_mass(f, |xi| {
        let b = bracket(xi - k);
        b.ln() / b
    });
    inner.powi(ell as i32)
}
