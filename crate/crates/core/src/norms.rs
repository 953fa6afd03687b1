use crate::equicont::WeightSequence;
use crate::error::{Error, Result};
use crate::field::Field;

/// Exponents `(p, s)` of the modulation space `M^{s,2}_p`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationParams {
    pub p: f64,
    pub s: f64,
}

impl ModulationParams {
    pub fn new(p: f64, s: f64) -> Result<Self> {
        let mp = Self { p, s };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite() && self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::ModulationParams { p: self.p, s: self.s });
        }
        Ok(())
    }

    /// `s < 3/2 - 1/p`, the range of the a priori bounds.
    pub fn main_range(&self) -> bool {
        self.s < 1.5 - 1.0 / self.p
    }

    /// `s < 2 - 1/p`, the range of the norm equivalence.
    pub fn equiv_range(&self) -> bool {
        self.s < 2.0 - 1.0 / self.p
    }
}

/// `<x> = (4 + x^2)^{1/2}`.
pub fn bracket(x: f64) -> f64 {
    (4.0 + x * x).sqrt()
}

/// `(\sum_k a_k^p)^{1/p}`.
pub(crate) fn lp_sum(terms: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p == 1.0 {
        return terms.sum();
    }
    if p == 2.0 {
        return terms.map(|a| a * a).sum::<f64>().sqrt();
    }
    terms.map(|a| a.powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `|| c_k <k>^s ||P_k f||_{L^2} ||_{l^p}` over the resolved band window,
/// with `c_k = 1` when no weights are given.
pub fn modulation_norm(f: &Field, mp: ModulationParams, w: Option<&WeightSequence>) -> Result<f64> {
    mp.validate()?;
    let k_max = f.grid().k_max();
    if let Some(w) = w {
        if w.k_max() < k_max {
            return Err(Error::WeightsTooShort { have: w.k_max(), need: k_max });
        }
    }
    let profile = f.band_profile();
    let terms = f.grid().resolved_bands().zip(profile).map(|(k, b)| {
        let c = w.map_or(1.0, |w| w.get(k));
        c * bracket(k as f64).powf(mp.s) * b
    });
    Ok(lp_sum(terms, mp.p))
}

/// `(\int <xi>^{2 sigma} |f^|^2 dxi)^{1/2}` over the whole lattice.
pub fn sobolev_norm(f: &Field, sigma: f64) -> f64 {
    let g = f.grid();
    let sum: f64 =
        f.spectrum().iter().enumerate().map(|(m, v)| bracket(g.xi(m)).powf(2.0 * sigma) * v.norm_sqr()).sum();
    (sum * g.dxi()).sqrt()
}

/// Margin kept below the endpoint of the embedding condition for `p > 2`.
pub const EMBEDDING_MARGIN: f64 = 0.01;

/// Sobolev exponent `sigma` with `M^{s,2}_p` continuously embedded in `H^sigma`.
///
/// For `p > 2` the margin shrinks to `(s + 1/p) / 2` when that is smaller, so
/// that `sigma > -1/2` holds for every `(p, s)`.
pub fn admissible_sigma(mp: ModulationParams) -> f64 {
    if mp.p <= 2.0 {
        mp.s
    } else {
        let slack = mp.s + 1.0 / mp.p;
        mp.s - 0.5 + 1.0 / mp.p - EMBEDDING_MARGIN.min(0.5 * slack)
    }
}

/// `\int log(4 + xi^2/kappa^2) |f^|^2 / sqrt(4 kappa^2 + xi^2) dxi`.
pub fn hs_functional(f: &Field, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Kappa(kappa));
    }
    let g = f.grid();
    let k2 = kappa * kappa;
    let sum: f64 = f
        .spectrum()
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let xi = g.xi(m);
            (4.0 + xi * xi / k2).ln() / (4.0 * k2 + xi * xi).sqrt() * v.norm_sqr()
        })
        .sum();
    Ok(sum * g.dxi())
}

/// `|| <k>^s ||P_k f|| ||_{l^p(|k| >= k_from)}` inside the resolved window.
pub fn modulation_tail(f: &Field, mp: ModulationParams, k_from: i64) -> f64 {
    let profile = f.band_profile();
    let terms = f
        .grid()
        .resolved_bands()
        .zip(profile)
        .filter(|(k, _)| k.abs() >= k_from)
        .map(|(k, b)| bracket(k as f64).powf(mp.s) * b);
    lp_sum(terms, mp.p)
}
