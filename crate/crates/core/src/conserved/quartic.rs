use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::Field;

use super::{check_kappa, SpectralParameter};

/// Spectral mass allowed beyond `ALIAS_CUTOFF * xi_max`, relative to the total.
pub const ALIAS_THRESHOLD: f64 = 1e-10;
pub const ALIAS_CUTOFF: f64 = 0.8;

fn check_aliasing(f: &Field) -> Result<()> {
    let g = f.grid();
    let cutoff = ALIAS_CUTOFF * g.xi_max();
    let mut total = 0.0;
    let mut outer = 0.0;
    for (m, v) in f.spectrum().iter().enumerate() {
        let w = v.norm_sqr();
        total += w;
        if g.xi(m).abs() > cutoff {
            outer += w;
        }
    }
    if total > 0.0 && outer > ALIAS_THRESHOLD * total {
        return Err(Error::Aliasing { mass: outer / total, cutoff, threshold: ALIAS_THRESHOLD });
    }
    Ok(())
}

/// The quartic lattice form
///
/// `Re \sum W(xi1, xi2, xi4) conj(f^1 f^3) f^2 f^4 / (D1 D2 D4) dxi^3 / (2 pi)`
///
/// with `W = 2 kappa (xi1 xi2 + xi1 xi4 + xi2 xi4) - 8 kappa^3`, `D = 4 kappa^2 + xi^2`
/// and `xi4 = xi1 - xi2 + xi3`, summed over lattice triples with `xi4` on the lattice.
///
/// Since `j1 + j3 = j2 + j4`, each monomial of `W` turns the sum into
/// `\sum_n conj(P[n]) Q[n]` for linear convolutions `P`, `Q` of weighted spectra.
pub fn quartic_form(f: &Field, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let g = f.grid();
    let n = g.n();
    let k2 = kappa * kappa;
    let u = f.spectrum();
    let mut gw = vec![Complex64::new(0.0, 0.0); n];
    let mut hw = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..n {
        let xi = g.xi(m);
        let d = 4.0 * k2 + xi * xi;
        gw[m] = u[m] / d;
        hw[m] = u[m] * (xi / d);
    }
    let fu = padded_fft(u);
    let fg = padded_fft(&gw);
    let fh = padded_fft(&hw);
    let c_hu = convolve(&fh, &fu);
    let c_hg = convolve(&fh, &fg);
    let c_gu = convolve(&fg, &fu);
    let c_hh = convolve(&fh, &fh);
    let c_gg = convolve(&fg, &fg);
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..2 * n {
        // xi1 xi2 and xi1 xi4 contribute equally after relabelling j2 <-> j4.
        s += (c_hu[i].conj() * c_hg[i] * 2.0 + c_gu[i].conj() * c_hh[i]) * (2.0 * kappa)
            - c_gu[i].conj() * c_gg[i] * (8.0 * k2 * kappa);
    }
    Ok(s.re * g.dxi().powi(3) / (2.0 * PI))
}

fn padded_fft(a: &[Complex64]) -> Vec<Complex64> {
    let len = 2 * a.len();
    let (fwd, _) = fft::plans(len);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    buf[..a.len()].copy_from_slice(a);
    fwd.process(&mut buf);
    buf
}

fn convolve(fa: &[Complex64], fb: &[Complex64]) -> Vec<Complex64> {
    let len = fa.len();
    let (_, inv) = fft::plans(len);
    let mut buf: Vec<Complex64> = fa.iter().zip(fb).map(|(a, b)| a * b).collect();
    inv.process(&mut buf);
    let scale = 1.0 / len as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Quartic term `alpha_4 = +/- quartic_form`, upper sign defocusing. This sign is
/// the one that reproduces the `j = 2` trace term `(-/+1) Re tr(A^2) / 2`.
pub fn alpha4(f: &Field, kp: SpectralParameter) -> Result<f64> {
    check_aliasing(f)?;
    Ok(kp.sign.value() * quartic_form(f, kp.kappa)?)
}

/// `alpha4(kappa) - alpha4(2 kappa) / 2`.
pub fn beta4(f: &Field, kp: SpectralParameter) -> Result<f64> {
    Ok(alpha4(f, kp)? - 0.5 * alpha4(f, kp.doubled())?)
}

/// Relabellings of the quartic integrand used to check its symmetries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuarticPermutation {
    Identity,
    /// `xi1 <-> xi3` in the weight.
    Swap13,
    /// `xi2 <-> xi4` in the weight.
    Swap24,
    /// `(xi1, xi3) <-> (xi2, xi4)` in the weight.
    SwapPairs,
}

/// Brute-force triple sum; `O(N^3)`, intended for `N <= 128`.
pub fn alpha4_direct(f: &Field, kp: SpectralParameter) -> Result<f64> {
    alpha4_direct_permuted(f, kp, QuarticPermutation::Identity)
}

pub fn alpha4_direct_permuted(f: &Field, kp: SpectralParameter, perm: QuarticPermutation) -> Result<f64> {
    check_kappa(kp.kappa)?;
    check_aliasing(f)?;
    let g = f.grid();
    let n = g.n() as i64;
    let kappa = kp.kappa;
    let k2 = kappa * kappa;
    let u = f.spectrum();
    let xi: Vec<f64> = g.xis();
    let weight = |a: f64, b: f64, c: f64| {
        (2.0 * kappa * (a * b + a * c + b * c) - 8.0 * k2 * kappa)
            / ((4.0 * k2 + a * a) * (4.0 * k2 + b * b) * (4.0 * k2 + c * c))
    };
    let mut s = Complex64::new(0.0, 0.0);
    for m1 in 0..n {
        for m2 in 0..n {
            for m3 in 0..n {
                let m4 = m1 - m2 + m3;
                if !(0..n).contains(&m4) {
                    continue;
                }
                let [a, b, c, d] = [m1, m2, m3, m4].map(|m| m as usize);
                let w = match perm {
                    QuarticPermutation::Identity => weight(xi[a], xi[b], xi[d]),
                    QuarticPermutation::Swap13 => weight(xi[c], xi[b], xi[d]),
                    QuarticPermutation::Swap24 => weight(xi[a], xi[d], xi[b]),
                    QuarticPermutation::SwapPairs => weight(xi[b], xi[a], xi[c]),
                };
                s += (u[a] * u[c]).conj() * u[b] * u[d] * w;
            }
        }
    }
    Ok(kp.sign.value() * s.re * g.dxi().powi(3) / (2.0 * PI))
}
