use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::special::digamma;

use super::quartic::quartic_form;
use super::{check_kappa, Sign, SpectralParameter};

/// Layout of the truncated operator lattice.
///
/// The operator acts on `n_op` frequencies `xi_b = b h`, `b = -n_op/2 .. n_op/2 - 1`,
/// with `h = stride * dxi`; `f^` is sampled at every `stride`-th field frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub n_op: usize,
    pub stride: usize,
    /// Largest `n_op` accepted; dense `O(n_op^3)` work beyond it is refused.
    pub cap: usize,
}

impl OperatorSpec {
    pub const DEFAULT_SIZE: usize = 256;
    pub const DEFAULT_CAP: usize = 512;

    /// `n_op` points spanning the whole field lattice.
    pub fn with_size(grid: &GridSpec, n_op: usize) -> Self {
        let n_op = n_op.min(grid.n());
        Self { n_op, stride: (grid.n() / n_op.max(1)).max(1), cap: Self::DEFAULT_CAP }
    }

    pub fn for_grid(grid: &GridSpec) -> Self {
        Self::with_size(grid, Self::DEFAULT_SIZE)
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.n_op > self.cap {
            return Err(Error::OperatorTooLarge { n_op: self.n_op, cap: self.cap });
        }
        if self.n_op < 2 || !self.n_op.is_multiple_of(2) || self.n_op > grid.n() {
            return Err(Error::OperatorLayout(format!(
                "n_op = {} must be even, at least 2 and at most N = {}",
                self.n_op,
                grid.n()
            )));
        }
        if self.stride == 0 {
            return Err(Error::OperatorLayout("stride must be positive".into()));
        }
        Ok(())
    }
}

/// Dense matrix of `A = (kappa - d)^{-1/2} f (kappa + d)^{-1} conj(f) (kappa - d)^{-1/2}`
/// on a truncated frequency lattice.
///
/// Window truncation loses `O(X^{1-2j})` of the `j`-th trace term, `X` being the
/// window half-width. The two leading losses are restored in closed form: the
/// `j = 1` term through lattice digamma sums and the `j = 2` term by swapping the
/// window value for the quartic form, which carries no free frequency.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    kp: SpectralParameter,
    h: f64,
    a: DMatrix<Complex64>,
    gamma_hs2: f64,
    exterior: Complex64,
    quartic_correction: f64,
}

/// Iterations of the power method behind [`OperatorMatrix::spectral_radius`].
const POWER_WARMUP: usize = 100;
const POWER_STEPS: usize = 200;

pub fn build_operator(f: &Field, kp: SpectralParameter, spec: OperatorSpec) -> Result<OperatorMatrix> {
    check_kappa(kp.kappa)?;
    let grid = f.grid();
    spec.validate(grid)?;
    let n = spec.n_op;
    let h = spec.stride as f64 * grid.dxi();
    let kappa = kp.kappa;
    let half = (n / 2) as i64;
    let xi: Vec<f64> = (0..n).map(|a| (a as i64 - half) as f64 * h).collect();
    let sample = |d: i64| f.coefficient(d * spec.stride as i64);

    // Toeplitz entries M_ab = h / sqrt(2 pi) f^((a - b) h), indexed by a - b + n - 1.
    let scale = h / (2.0 * PI).sqrt();
    let toeplitz: Vec<Complex64> = (0..2 * n - 1).map(|i| sample(i as i64 - (n as i64 - 1)) * scale).collect();
    let m = DMatrix::from_fn(n, n, |a, b| toeplitz[a + n - 1 - b]);

    let r: Vec<Complex64> = xi.iter().map(|&x| Complex64::new(kappa, x).inv()).collect();
    let p: Vec<Complex64> = xi.iter().map(|&x| Complex64::new(kappa, -x).sqrt().inv()).collect();

    let mut mr = m.clone();
    for (c, rc) in r.iter().enumerate() {
        mr.column_mut(c).iter_mut().for_each(|v| *v *= rc);
    }
    let mut a = mr * m.adjoint();
    for j in 0..n {
        for i in 0..n {
            a[(i, j)] *= p[i] * p[j];
        }
    }

    let rho: Vec<f64> = xi.iter().map(|&x| (kappa * kappa + x * x).sqrt()).collect();
    let mut gamma_hs2 = 0.0;
    for b in 0..n {
        for a_ in 0..n {
            gamma_hs2 += toeplitz[a_ + n - 1 - b].norm_sqr() / (rho[a_] * rho[b]);
        }
    }

    let d_max = (grid.n() as i64 / 2 - 1) / spec.stride as i64;
    let mut exterior = Complex64::new(0.0, 0.0);
    for d in -d_max..=d_max {
        let w = sample(d).norm_sqr();
        if w == 0.0 {
            continue;
        }
        exterior += exterior_pair_sum(kappa, h, d, -half, half - 1) * (w * h * h / (2.0 * PI));
    }

    // tr(A^2) = sum_ab A_ab A_ba; the series coefficient of j = 2 is -sign / 2.
    let mut tr2 = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            tr2 += a[(i, j)] * a[(j, i)];
        }
    }
    let sigma = kp.sign.value();
    let window_quartic = -sigma * 0.5 * tr2.re;
    let quartic_correction = sigma * quartic_form(f, kappa)? - window_quartic;

    Ok(OperatorMatrix { kp, h, a, gamma_hs2, exterior, quartic_correction })
}

/// `\sum_b 1 / ((kappa + i b h)(kappa - i (b + d) h))` over integers `b` for which
/// `b` or `b + d` falls outside `[w0, w1]`, in closed form through digamma.
fn exterior_pair_sum(kappa: f64, h: f64, d: i64, w0: i64, w1: i64) -> Complex64 {
    let lo = w0.max(w0 - d);
    let hi = w1.min(w1 - d).max(lo - 1);
    let df = d as f64;
    let s = Complex64::new(2.0 * kappa, -df * h);
    let i_over_h = Complex64::new(0.0, 1.0 / h);
    let q = Complex64::new(0.0, kappa / h);
    // b >= hi + 1: partial fractions with poles at b = -alpha and b = -beta.
    let b0 = (hi + 1) as f64;
    let right = -i_over_h * (digamma(q + (b0 + df)) - digamma(-q + b0));
    // b = -c with c >= 1 - lo.
    let c0 = (1 - lo) as f64;
    let left = i_over_h * (digamma(-q + (c0 - df)) - digamma(q + c0));
    (right + left) / s
}

impl OperatorMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn parameter(&self) -> SpectralParameter {
        self.kp
    }

    pub fn window_trace(&self) -> Complex64 {
        self.a.trace()
    }

    /// Exact `j = 1` contribution of lattice frequencies outside the window.
    pub fn exterior_trace(&self) -> Complex64 {
        self.exterior
    }

    /// Closed-form quartic term minus its window value.
    pub fn quartic_correction(&self) -> f64 {
        self.quartic_correction
    }

    /// `tr(A)` on the infinite lattice.
    pub fn trace(&self) -> Complex64 {
        self.window_trace() + self.exterior
    }

    /// `||Gamma||^2_HS` for the factor `Gamma = (kappa - d)^{-1/2} f (kappa + d)^{-1/2}`;
    /// `A` is `Gamma` composed with a factor of the same HS norm.
    pub fn hs_norm_sq(&self) -> f64 {
        self.gamma_hs2
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.norm()
    }

    /// Power-method estimate of the spectral radius of the window matrix.
    pub fn spectral_radius(&self) -> f64 {
        let n = self.size();
        let mut v = nalgebra::DVector::from_fn(n, |i, _| Complex64::from_polar(1.0 + (i % 7) as f64, 0.37 * i as f64));
        v.unscale_mut(v.norm());
        let mut log_growth = 0.0;
        for step in 0..POWER_WARMUP + POWER_STEPS {
            let w = &self.a * &v;
            let norm = w.norm();
            if norm == 0.0 || !norm.is_finite() {
                return if norm == 0.0 { 0.0 } else { f64::INFINITY };
            }
            if step >= POWER_WARMUP {
                log_growth += norm.ln();
            }
            v = w.unscale(norm);
        }
        (log_growth / POWER_STEPS as f64).exp()
    }

    fn check_convergence(&self) -> Result<()> {
        if self.frobenius_norm() < 1.0 {
            return Ok(());
        }
        let radius = self.spectral_radius();
        if radius >= 1.0 {
            return Err(Error::Diverged { kappa: self.kp.kappa, radius });
        }
        Ok(())
    }

    /// `Re log det(I + A)` (defocusing) or `-Re log det(I - A)` (focusing) on the
    /// window, plus the `j = 1` and `j = 2` truncation corrections.
    pub fn log_det_alpha(&self) -> Result<f64> {
        self.check_convergence()?;
        let n = self.size();
        let sigma = self.kp.sign.value();
        let shifted = DMatrix::<Complex64>::identity(n, n) + self.a.scale(sigma);
        let lu = shifted.lu();
        let u = lu.u();
        let mut log_abs = 0.0;
        for i in 0..n {
            let d = u[(i, i)].norm();
            if d == 0.0 || !d.is_finite() {
                return Err(Error::Diverged { kappa: self.kp.kappa, radius: self.spectral_radius() });
            }
            log_abs += d.ln();
        }
        Ok(sigma * log_abs + self.exterior.re + self.quartic_correction)
    }

    /// `tr(A^j)` of the window matrix for `j = 1..=j_max`.
    pub fn trace_powers(&self, j_max: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(j_max);
        if j_max == 0 {
            return out;
        }
        let mut pow = self.a.clone();
        out.push(pow.trace());
        for _ in 1..j_max {
            pow = &pow * &self.a;
            out.push(pow.trace());
        }
        out
    }

    /// Partial sums `Re \sum_{j <= J} c_j tr(A^j) / j` for `J = 1..=j_max`, with
    /// `c_j = (-1)^{j-1}` (defocusing) or `1` (focusing) and the truncation
    /// corrections folded into `j = 1` and `j = 2`.
    pub fn trace_series(&self, j_max: usize) -> Vec<f64> {
        let mut acc = self.exterior.re;
        self.trace_powers(j_max)
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let j = i + 1;
                let c = match self.kp.sign {
                    Sign::Defocusing if j % 2 == 0 => -1.0,
                    _ => 1.0,
                };
                acc += c * t.re / j as f64;
                if j == 2 {
                    acc += self.quartic_correction;
                }
                acc
            })
            .collect()
    }

    /// Eigenvalues of the window matrix through a complex Schur form.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        nalgebra::Schur::new(self.a.clone()).eigenvalues().map_or_else(Vec::new, |v| v.iter().copied().collect())
    }

    /// Smallest eigenvalue of `(A + A*) / 2`.
    pub fn hermitian_part_min_eigenvalue(&self) -> f64 {
        let herm = (&self.a + self.a.adjoint()).scale(0.5);
        nalgebra::SymmetricEigen::new(herm).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Full `alpha(kappa; f)` from the log-determinant on the default operator layout.
pub fn alpha_full(f: &Field, kp: SpectralParameter) -> Result<f64> {
    alpha_full_with(f, kp, OperatorSpec::for_grid(f.grid()))
}

pub fn alpha_full_with(f: &Field, kp: SpectralParameter, spec: OperatorSpec) -> Result<f64> {
    build_operator(f, kp, spec)?.log_det_alpha()
}

/// `alpha(kappa) - alpha(2 kappa) / 2`.
pub fn beta_full(f: &Field, kp: SpectralParameter) -> Result<f64> {
    beta_full_with(f, kp, OperatorSpec::for_grid(f.grid()))
}

pub fn beta_full_with(f: &Field, kp: SpectralParameter, spec: OperatorSpec) -> Result<f64> {
    Ok(alpha_full_with(f, kp, spec)? - 0.5 * alpha_full_with(f, kp.doubled(), spec)?)
}
