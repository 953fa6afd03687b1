//! Complex digamma, used for closed-form lattice sums of resolvent products.

use num_complex::Complex64;

/// `psi(z) = Gamma'(z) / Gamma(z)` for `z` off the non-positive integers.
///
/// Recurrence `psi(z) = psi(z + 1) - 1/z` moves the argument to `Re z >= 20`,
/// where the asymptotic Bernoulli series is accurate to double precision.
pub fn digamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < 20.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let w = z.inv();
    let w2 = w * w;
    // B_{2n} / (2n) for n = 1..7.
    const COEFFS: [f64; 7] =
        [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0];
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = w2;
    for c in COEFFS {
        series += pow * c;
        pow *= w2;
    }
    acc + z.ln() - w * 0.5 - series
}
