use std::sync::Arc;

use num_complex::Complex64;
use rustfft::Fft;

use crate::conserved::Sign;
use crate::error::{Error, Result};
use crate::fft;
use crate::field::Field;
use crate::grid::GridSpec;

/// Evolution equation; `MkdvNls { k }` is the equation solved by the mKdV boost `u^k`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `i u_t + u_xx = +/- 2 |u|^2 u`
    Nls,
    /// `u_t + u_xxx = +/- 6 |u|^2 u_x`
    Mkdv,
    /// `u_t + u_xxx + 3ik u_xx - 3k^2 u_x = +/- 6 |u|^2 u_x +/- 6ik |u|^2 u`
    MkdvNls { k: f64 },
}

impl Equation {
    /// Phase rate `omega` of the linear flow, `u^(t) = e^{i omega(xi) t} u^(0)`.
    pub fn dispersion(self, xi: f64) -> f64 {
        match self {
            Equation::Nls => -xi * xi,
            Equation::Mkdv => xi * xi * xi,
            Equation::MkdvNls { k } => xi * xi * xi + 3.0 * k * xi * xi,
        }
    }

    pub fn name(self) -> String {
        match self {
            Equation::Nls => "nls".into(),
            Equation::Mkdv => "mkdv".into(),
            Equation::MkdvNls { k } => format!("mkdv_nls({k})"),
        }
    }
}

/// Strang splitting parameters. Positive `dt`, nonnegative horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowSpec {
    pub equation: Equation,
    pub sign: Sign,
    pub dt: f64,
    pub horizon: f64,
}

impl FlowSpec {
    pub fn new(equation: Equation, sign: Sign, dt: f64, horizon: f64) -> Result<Self> {
        let fs = Self { equation, sign, dt, horizon };
        fs.validate()?;
        Ok(fs)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::TimeStep(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::TimeStep(format!("horizon must be nonnegative, got {}", self.horizon)));
        }
        Ok(())
    }

    /// Number of steps of size `dt` to reach `t`.
    pub fn steps_to(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }
}

/// `e^{i omega(xi) t}` applied to the spectrum.
pub fn linear_propagator(u: &Field, t: f64, eq: Equation) -> Field {
    if t == 0.0 {
        return u.clone();
    }
    u.map_spectrum(|xi| Complex64::from_polar(1.0, eq.dispersion(xi) * t))
}

/// Amplitude treated as numerical blow-up.
pub const BLOW_UP_AMPLITUDE: f64 = 1e8;

/// Split-step integrator working on DFT coefficients in natural FFT order.
pub struct Stepper {
    grid: GridSpec,
    equation: Equation,
    sign: f64,
    xi: Vec<f64>,
    keep: Vec<bool>,
    v: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    half_step: Option<(f64, Vec<Complex64>)>,
    t: f64,
}

impl Stepper {
    pub fn new(u0: &Field, equation: Equation, sign: Sign) -> Self {
        let grid = *u0.grid();
        let n = grid.n();
        let (fwd, inv) = fft::plans(n);
        let xi: Vec<f64> = (0..n)
            .map(|q| {
                let j = if q < n / 2 { q as i64 } else { q as i64 - n as i64 };
                j as f64 * grid.dxi()
            })
            .collect();
        // 2/3 rule: nonlinear increments keep |j| < N/3 only.
        let keep = (0..n)
            .map(|q| {
                let j = if q < n / 2 { q as i64 } else { q as i64 - n as i64 };
                3 * j.unsigned_abs() < n as u64
            })
            .collect();
        let mut v = u0.values().to_vec();
        fwd.process(&mut v);
        Self { grid, equation, sign: sign.value(), xi, keep, v, fwd, inv, half_step: None, t: 0.0 }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn field(&self) -> Field {
        Field::from_values(self.grid, self.physical(&self.v)).expect("length matches grid")
    }

    fn physical(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut u = v.to_vec();
        self.inv.process(&mut u);
        let scale = 1.0 / self.grid.n() as f64;
        u.iter_mut().for_each(|z| *z *= scale);
        u
    }

    fn spectral(&self, mut u: Vec<Complex64>) -> Vec<Complex64> {
        self.fwd.process(&mut u);
        u
    }

    fn apply_linear_half(&mut self, dt: f64) {
        let stale = self.half_step.as_ref().is_none_or(|(h, _)| *h != dt);
        if stale {
            let mult =
                self.xi.iter().map(|&x| Complex64::from_polar(1.0, self.equation.dispersion(x) * 0.5 * dt)).collect();
            self.half_step = Some((dt, mult));
        }
        let (_, mult) = self.half_step.as_ref().expect("set above");
        self.v.iter_mut().zip(mult).for_each(|(a, m)| *a *= m);
    }

    /// Dealiased `+/- 6 |u|^2 (u_x + ik u)` in spectral form.
    fn transport_rhs(&self, v: &[Complex64], k: f64) -> Vec<Complex64> {
        let u = self.physical(v);
        let dv: Vec<Complex64> = v.iter().zip(&self.xi).map(|(a, &x)| a * Complex64::new(0.0, x)).collect();
        let ux = self.physical(&dv);
        let c = 6.0 * self.sign;
        let prod: Vec<Complex64> =
            u.iter().zip(&ux).map(|(a, b)| (b + a * Complex64::new(0.0, k)) * (a.norm_sqr() * c)).collect();
        let mut out = self.spectral(prod);
        out.iter_mut().zip(&self.keep).for_each(|(a, &keep)| {
            if !keep {
                *a = Complex64::new(0.0, 0.0);
            }
        });
        out
    }

    fn nonlinear(&mut self, dt: f64) {
        match self.equation {
            Equation::Nls => {
                let u = self.physical(&self.v);
                let rotated: Vec<Complex64> =
                    u.iter().map(|a| a * Complex64::from_polar(1.0, -2.0 * self.sign * a.norm_sqr() * dt)).collect();
                let w = self.spectral(rotated);
                for ((a, b), &keep) in self.v.iter_mut().zip(w).zip(&self.keep) {
                    if keep {
                        *a = b;
                    }
                }
            }
            Equation::Mkdv | Equation::MkdvNls { .. } => {
                let k = match self.equation {
                    Equation::MkdvNls { k } => k,
                    _ => 0.0,
                };
                let v0 = self.v.clone();
                let axpy =
                    |s: f64, d: &[Complex64]| -> Vec<Complex64> { v0.iter().zip(d).map(|(a, b)| a + b * s).collect() };
                let k1 = self.transport_rhs(&v0, k);
                let k2 = self.transport_rhs(&axpy(0.5 * dt, &k1), k);
                let k3 = self.transport_rhs(&axpy(0.5 * dt, &k2), k);
                let k4 = self.transport_rhs(&axpy(dt, &k3), k);
                for i in 0..self.v.len() {
                    self.v[i] = v0[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
                }
            }
        }
    }

    /// One Strang step of signed size `dt`.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        let last_good = self.t;
        self.apply_linear_half(dt);
        self.nonlinear(dt);
        self.apply_linear_half(dt);
        let limit = BLOW_UP_AMPLITUDE * self.grid.n() as f64;
        if self.v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() > limit) {
            return Err(Error::BlowUp { t: last_good });
        }
        self.t += dt;
        Ok(())
    }
}

/// One Strang step of size `fs.dt`.
pub fn step(u: &Field, fs: &FlowSpec) -> Result<Field> {
    fs.validate()?;
    let mut s = Stepper::new(u, fs.equation, fs.sign);
    s.advance(fs.dt)?;
    Ok(s.field())
}

/// Snapshots of a solution at requested times.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<Field>,
}

/// Evaluates `observer` at each requested time (rounded to the step lattice).
pub fn evolve_with<T>(
    u0: &Field,
    fs: &FlowSpec,
    times: &[f64],
    mut observer: impl FnMut(f64, &Field) -> T,
) -> Result<Vec<T>> {
    fs.validate()?;
    let mut prev = -1.0;
    for &t in times {
        if !(t >= 0.0 && t <= fs.horizon * (1.0 + 1e-12) + 1e-15) || t <= prev {
            return Err(Error::TimeStep(format!("observer times must increase within [0, {}], got {t}", fs.horizon)));
        }
        prev = t;
    }
    let mut stepper = Stepper::new(u0, fs.equation, fs.sign);
    let mut done = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let target = fs.steps_to(t);
        while done < target {
            stepper.advance(fs.dt)?;
            done += 1;
        }
        let snapshot = if done == 0 { u0.clone() } else { stepper.field() };
        out.push(observer(t, &snapshot));
    }
    Ok(out)
}

/// Snapshots at `times`; with no times given, at `0` and the horizon.
pub fn evolve(u0: &Field, fs: &FlowSpec, times: &[f64]) -> Result<Trajectory> {
    let default = [0.0, fs.horizon];
    let times: &[f64] = if times.is_empty() {
        if fs.horizon == 0.0 {
            &default[..1]
        } else {
            &default
        }
    } else {
        times
    };
    let snapshots = evolve_with(u0, fs, times, |_, f| f.clone())?;
    Ok(Trajectory { times: times.to_vec(), snapshots })
}

/// `n + 1` equally spaced times on `[0, horizon]`.
pub fn uniform_times(horizon: f64, n: usize) -> Vec<f64> {
    if n == 0 || horizon == 0.0 {
        return vec![0.0];
    }
    (0..=n).map(|i| horizon * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use std::f64::consts::PI;

    fn reference() -> GridSpec {
        GridSpec::new(1024, 32.0 * PI).unwrap()
    }

    fn l2_distance(a: &Field, b: &Field) -> f64 {
        a.sub(b).unwrap().l2_norm()
    }

    #[test]
    fn zero_time_and_zero_field() {
        let g = reference();
        let u = data::gaussian(g, 1.0, 0.3, 0.0);
        assert_eq!(linear_propagator(&u, 0.0, Equation::Mkdv), u);
        let fs = FlowSpec::new(Equation::Mkdv, Sign::Focusing, 1e-3, 0.0).unwrap();
        let z = step(&Field::zeros(g), &fs).unwrap();
        assert!(z.values().iter().all(|v| v.norm() == 0.0));
        let traj = evolve(&u, &fs, &[]).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.snapshots[0], u);
    }

    #[test]
    fn linear_tone_phase() {
        let g = GridSpec::new(64, 4.0 * PI).unwrap();
        let u = Field::from_fn(g, |x| Complex64::from_polar(1.0, x));
        let v = linear_propagator(&u, PI, Equation::Mkdv);
        let m = g.position(4).unwrap();
        assert!((v.spectrum()[m] + u.spectrum()[m]).norm() < 1e-12);
    }

    #[test]
    fn linear_flow_is_unitary() {
        let u = data::random_band(reference(), 4, 5, 0.7);
        for eq in [Equation::Nls, Equation::Mkdv, Equation::MkdvNls { k: 2.0 }] {
            let v = linear_propagator(&u, 0.83, eq);
            assert!((v.l2_norm() - u.l2_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn nls_soliton() {
        let g = reference();
        let fs = FlowSpec::new(Equation::Nls, Sign::Focusing, 1e-3, 1.0).unwrap();
        let out = evolve(&data::sech(g), &fs, &[1.0]).unwrap();
        let exact = Field::from_fn(g, |x| Complex64::from_polar(1.0 / x.cosh(), 1.0));
        let err = l2_distance(&out.snapshots[0], &exact);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn mkdv_soliton() {
        let g = reference();
        let fs = FlowSpec::new(Equation::Mkdv, Sign::Focusing, 1e-3, 1.0).unwrap();
        let out = evolve(&data::sech(g), &fs, &[1.0]).unwrap();
        let exact = Field::from_real_fn(g, |x| 1.0 / (x - 1.0).cosh());
        let err = l2_distance(&out.snapshots[0], &exact);
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn mass_is_conserved() {
        let g = reference();
        let u = data::gaussian(g, 1.0, 0.5, 0.0);
        for eq in [Equation::Nls, Equation::Mkdv, Equation::MkdvNls { k: 1.0 }] {
            for sign in [Sign::Defocusing, Sign::Focusing] {
                let fs = FlowSpec::new(eq, sign, 1e-3, 1.0).unwrap();
                let out = evolve(&u, &fs, &[1.0]).unwrap();
                let drift = (out.snapshots[0].l2_norm() / u.l2_norm() - 1.0).abs();
                assert!(drift < 1e-8, "{eq:?} {sign:?}: {drift}");
            }
        }
    }

    #[test]
    fn time_reversible() {
        let g = reference();
        let u = data::gaussian(g, 1.0, 0.4, 1.0);
        for eq in [Equation::Nls, Equation::Mkdv] {
            let mut s = Stepper::new(&u, eq, Sign::Defocusing);
            for _ in 0..500 {
                s.advance(1e-3).unwrap();
            }
            for _ in 0..500 {
                s.advance(-1e-3).unwrap();
            }
            assert!(l2_distance(&s.field(), &u) < 1e-6);
        }
    }

    #[test]
    fn real_data_stays_real_under_mkdv() {
        let u = data::gaussian(reference(), 1.0, 0.5, 0.0);
        let fs = FlowSpec::new(Equation::Mkdv, Sign::Defocusing, 1e-3, 0.5).unwrap();
        let out = evolve(&u, &fs, &[0.5]).unwrap();
        assert!(out.snapshots[0].max_imag() < 1e-9);
    }

    #[test]
    fn blow_up_is_detected() {
        let g = reference();
        let u = data::gaussian(g, 0.5, 1e3, 0.0);
        let fs = FlowSpec::new(Equation::Mkdv, Sign::Focusing, 1e-2, 1.0).unwrap();
        assert!(matches!(evolve(&u, &fs, &[1.0]), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FlowSpec::new(Equation::Nls, Sign::Focusing, 0.0, 1.0).is_err());
        assert!(FlowSpec::new(Equation::Nls, Sign::Focusing, 1e-3, -1.0).is_err());
        let fs = FlowSpec::new(Equation::Nls, Sign::Focusing, 1e-3, 1.0).unwrap();
        assert!(evolve(&Field::zeros(reference()), &fs, &[0.5, 0.2]).is_err());
        assert!(evolve(&Field::zeros(reference()), &fs, &[2.0]).is_err());
    }
}
