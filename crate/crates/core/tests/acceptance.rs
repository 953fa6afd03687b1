//! Acceptance suite: one line per criterion, tolerances pinned below.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use modspace::harness::{
    run_apriori, run_conservation, run_galilei_consistency, run_norm_equivalence, run_scaling, run_weights, DataFamily,
    ExperimentConfig, Length, Report,
};
use modspace::*;

/// L^2 soliton error at the reference resolution.
const SOLITON_ERROR: f64 = 1e-5;
/// Accepted temporal order under `dt` halving.
const ORDER: (f64, f64) = (1.8, 2.2);
const SOLITON_RUNTIME_S: f64 = 60.0;
const DRIFT: f64 = 1e-5;
const DRIFT_RATIO: (f64, f64) = (3.0, 5.0);
const CONSERVATION_OPERATOR: usize = 512;
const ARCTAN: f64 = 1e-9;
const BETA2_DIFFERENCE: f64 = 1e-10;
const QUARTIC_DIRECT: f64 = 1e-9;
const TRACE_ALPHA2: f64 = 1e-8;
/// Sextic constant of the series remainder and its allowed spread across amplitudes.
const SERIES_CONSTANT: f64 = 1.0;
const SERIES_SPREAD: f64 = 2.0;
const GEOMETRIC_SLACK: f64 = 1e-6;
const HS_BRACKET: f64 = 10.0;
const EQUIVALENCE: f64 = 10.0;
/// Relative variation of the equivalence ratio over `t` in `[0, 1]` at amplitude 0.1.
const EQUIVALENCE_TIME: f64 = 0.01;
const AKSUP: f64 = 2.0;
const SCALING: f64 = 10.0;
const GALILEI_MKDV: f64 = 1e-5;
const GALILEI_NLS: f64 = 1e-6;
const APRIORI: f64 = 10.0;
const MASS: f64 = 1e-8;
const SUITE_RUNTIME_S: f64 = 1800.0;
/// Tested `(p, s)` pairs.
const PARAMS: [(f64, f64); 4] = [(1.0, 0.0), (2.0, 0.0), (2.0, 0.5), (4.0, 1.0)];

struct Line {
    passed: bool,
    text: String,
}

type Criterion = (usize, &'static str, fn() -> Vec<Line>);

struct Outcome {
    id: usize,
    name: &'static str,
    lines: Vec<Line>,
    seconds: f64,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }
}

fn at_most(label: &str, measured: f64, tol: f64) -> Line {
    Line { passed: measured <= tol, text: format!("{label} = {measured:.3e} (<= {tol:.1e})") }
}

fn within(label: &str, measured: f64, (lo, hi): (f64, f64)) -> Line {
    Line { passed: (lo..=hi).contains(&measured), text: format!("{label} = {measured:.3} (in [{lo}, {hi}])") }
}

fn note(text: String) -> Line {
    Line { passed: true, text }
}

fn failed(label: &str, e: impl std::fmt::Display) -> Line {
    Line { passed: false, text: format!("{label}: error {e}") }
}

fn report_lines(prefix: &str, r: &Report) -> Vec<Line> {
    r.checks
        .iter()
        .map(|c| Line {
            passed: c.pass,
            text: format!("{prefix}{} = {:.3e} (threshold {:.1e})", c.criterion, c.measured, c.threshold),
        })
        .collect()
}

fn reference() -> GridSpec {
    GridSpec::new(1024, 32.0 * PI).unwrap()
}

fn base_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n = 1024;
    cfg.grid.l = Length(32.0 * PI);
    cfg.params = PARAMS.iter().map(|&(p, s)| ModulationParams { p, s }).collect();
    cfg
}

fn soliton_error(eq: Equation, dt: f64) -> Result<f64> {
    let g = reference();
    let fs = FlowSpec::new(eq, Sign::Focusing, dt, 1.0)?;
    let times = flows::uniform_times(1.0, 10);
    let traj = evolve(&data::sech(g), &fs, &times)?;
    let mut worst: f64 = 0.0;
    for (t, u) in traj.times.iter().zip(&traj.snapshots) {
        let exact = match eq {
            Equation::Nls => Field::from_fn(g, |x| Complex64::from_polar(1.0 / x.cosh(), *t)),
            _ => Field::from_real_fn(g, |x| 1.0 / (x - t).cosh()),
        };
        worst = worst.max(u.sub(&exact)?.l2_norm());
    }
    Ok(worst)
}

fn solitons() -> Vec<Line> {
    let mut lines = Vec::new();
    for (name, eq) in [("nls", Equation::Nls), ("mkdv", Equation::Mkdv)] {
        let start = Instant::now();
        let fine = soliton_error(eq, 1e-3);
        let seconds = start.elapsed().as_secs_f64();
        match (fine, soliton_error(eq, 2e-3)) {
            (Ok(fine), Ok(coarse)) => {
                lines.push(at_most(&format!("{name} error at dt=1e-3"), fine, SOLITON_ERROR));
                lines.push(within(&format!("{name} order from dt=2e-3"), (coarse / fine).log2(), ORDER));
                lines.push(at_most(&format!("{name} runtime s"), seconds, SOLITON_RUNTIME_S));
            }
            (Err(e), _) | (_, Err(e)) => lines.push(failed(name, e)),
        }
    }
    lines
}

fn conservation() -> Vec<Line> {
    let mut lines = Vec::new();
    for eq in [Equation::Mkdv, Equation::Nls] {
        for sign in [Sign::Defocusing, Sign::Focusing] {
            let mut cfg = base_config();
            cfg.flow.equation = eq;
            cfg.flow.sign = sign;
            cfg.flow.dt = 1e-3;
            cfg.data = DataFamily::Gaussian { width: 1.0, amplitude: 0.3, k0: 0.0 };
            cfg.kappas = vec![0.5, 1.0, 2.0];
            // Stride 2 samples f^ finely enough that the operator sees the
            // whole dispersed solution rather than a periodized copy.
            cfg.operator_size = Some(CONSERVATION_OPERATOR);
            let label = format!("{} {}", eq.name(), sign.name());
            match run_conservation(&cfg) {
                Ok(r) => {
                    lines.push(at_most(&format!("{label} drift"), r.max_drift, DRIFT));
                    lines.push(within(&format!("{label} drift ratio under halving"), r.drift_ratio(), DRIFT_RATIO));
                    lines.push(at_most(&format!("{label} spectral radius"), r.max_spectral_radius, 1.0));
                }
                Err(e) => lines.push(failed(&label, e)),
            }
        }
    }
    lines
}

fn closed_forms() -> Result<Vec<Line>> {
    let mut lines = Vec::new();

    // Trapezoid weights on [0, 1]: alpha2(1/2) = arctan(1) with a fine lattice.
    let g = GridSpec::new(65536, 16384.0 * PI)?;
    let h = g.dxi();
    let top = (1.0 / h).round();
    let f = Field::from_spectrum_fn(g, |xi| {
        let j = (xi / h).round();
        let v = if j == 0.0 || j == top {
            0.5f64.sqrt()
        } else if j > 0.0 && j < top {
            1.0
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    });
    let kp = SpectralParameter::new(0.5, Sign::Defocusing)?;
    lines.push(at_most("alpha2 vs arctan", (alpha2(&f, kp)? - (1.0f64).atan()).abs(), ARCTAN));

    let g = reference();
    let mut worst_beta: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for seed in 0..10 {
        let f = data::random_band(g, seed, 4, 0.3);
        for kappa in [0.5, 1.0, 2.0, 4.0] {
            let kp = SpectralParameter::new(kappa, Sign::Defocusing)?;
            let d = beta2(&f, kp)? - (alpha2(&f, kp)? - 0.5 * alpha2(&f, kp.doubled())?);
            worst_beta = worst_beta.max(d.abs() / beta2(&f, kp)?);
            let op = build_operator(&f, kp, OperatorSpec::for_grid(&g))?;
            let a2 = alpha2(&f, kp)?;
            worst_trace = worst_trace.max((op.trace().re - a2).abs() / a2);
        }
    }
    lines.push(at_most("beta2 vs alpha2 difference (relative)", worst_beta, BETA2_DIFFERENCE));
    lines.push(at_most("trace(A) vs alpha2 (relative)", worst_trace, TRACE_ALPHA2));

    let g = GridSpec::new(64, 4.0 * PI)?;
    let mut worst_quartic: f64 = 0.0;
    for seed in 0..4 {
        let f = data::random_band(g, seed, 2, 0.5);
        for kappa in [0.5, 2.0] {
            let kp = SpectralParameter::new(kappa, Sign::Defocusing)?;
            let direct = alpha4_direct(&f, kp)?;
            worst_quartic = worst_quartic.max((alpha4(&f, kp)? - direct).abs() / direct.abs());
        }
    }
    lines.push(at_most("alpha4 fft vs direct sum (relative)", worst_quartic, QUARTIC_DIRECT));
    Ok(lines)
}

fn series() -> Result<Vec<Line>> {
    let g = reference();
    let mut lines = Vec::new();
    for sign in [Sign::Defocusing, Sign::Focusing] {
        let kp = SpectralParameter::new(0.5, sign)?;
        let mut constants = Vec::new();
        for eps in [0.1, 0.03, 0.01] {
            let f = data::gaussian(g, 1.0, eps, 0.0);
            let rest = alpha_full(&f, kp)? - alpha2(&f, kp)? - alpha4(&f, kp)?;
            constants.push(rest.abs() / hs_functional(&f, kp.kappa)?.powi(3));
        }
        let c = constants.iter().cloned().fold(0.0, f64::max);
        let lo = constants.iter().cloned().fold(f64::INFINITY, f64::min);
        lines.push(at_most(&format!("{} sextic constant", sign.name()), c, SERIES_CONSTANT));
        lines.push(at_most(&format!("{} constant spread over eps", sign.name()), c / lo, SERIES_SPREAD));

        let f = data::gaussian(g, 1.0, 0.3, 0.0);
        let op = build_operator(&f, kp, OperatorSpec::for_grid(&g))?;
        let full = op.log_det_alpha()?;
        let partial = op.trace_series(10);
        let errors: Vec<f64> = partial.iter().map(|s| (full - s).abs()).collect();
        let floor = 1e-14 * full.abs();
        let ratio = errors.windows(2).filter(|w| w[0] > floor && w[1] > floor).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        let hs2 = op.hs_norm_sq();
        lines.push(at_most(&format!("{} series error ratio", sign.name()), ratio, hs2 + GEOMETRIC_SLACK));
    }
    Ok(lines)
}

fn hs_comparability() -> Result<Vec<Line>> {
    let g = reference();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for seed in 0..50 {
        let f = data::random_band(g, 1000 + seed, 4, 0.3);
        for kappa in [0.5, 1.0, 2.0, 4.0] {
            let kp = SpectralParameter::new(kappa, Sign::Defocusing)?;
            let op = build_operator(&f, kp, OperatorSpec::for_grid(&g))?;
            let r = op.hs_norm_sq() / hs_functional(&f, kappa)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok(vec![
        at_most("HS bracket constant", hi.max(1.0 / lo), HS_BRACKET),
        note(format!("ratio range [{lo:.3}, {hi:.3}]")),
    ])
}

fn norm_equivalence() -> Vec<Line> {
    let mut lines = Vec::new();
    let families = [
        ("gaussian 0.3", DataFamily::Gaussian { width: 1.0, amplitude: 0.3, k0: 0.0 }),
        ("random 0.3", DataFamily::RandomBand { bands: 4, amplitude: 0.3, count: 3 }),
        ("gaussian 0.1", DataFamily::Gaussian { width: 1.0, amplitude: 0.1, k0: 0.0 }),
    ];
    for (name, data) in families {
        let mut cfg = base_config();
        cfg.data = data;
        let k_max = reference().k_max();
        cfg.boosts = (-k_max..=k_max).collect();
        match run_norm_equivalence(&cfg) {
            Ok(r) => {
                let measured = |c: &str| r.find(c).map_or(f64::NAN, |c| c.measured);
                lines.push(at_most(
                    &format!("{name} two-sided constant"),
                    measured("equivalence_constant"),
                    EQUIVALENCE,
                ));
                lines.push(at_most(&format!("{name} boost truncation"), measured("boost_truncation"), 0.0));
                let variation = measured("ratio_variation_in_time");
                if data.amplitude() <= 0.1 {
                    lines.push(at_most(&format!("{name} variation in t"), variation, EQUIVALENCE_TIME));
                } else {
                    lines.push(note(format!("{name} variation in t = {variation:.3e} (reported)")));
                }
            }
            Err(e) => lines.push(failed(name, e)),
        }
    }
    lines
}

fn weights() -> Vec<Line> {
    let mut lines = Vec::new();
    let families = [
        ("random", DataFamily::RandomBand { bands: 4, amplitude: 0.3, count: 3 }),
        ("gaussian", DataFamily::Gaussian { width: 0.5, amplitude: 0.3, k0: 2.0 }),
        ("soliton", DataFamily::Soliton { amplitude: 0.5 }),
    ];
    for (name, data) in families {
        let mut cfg = base_config();
        cfg.data = data;
        cfg.tolerances.aksup = AKSUP;
        match run_weights(&cfg) {
            Ok(r) => lines.extend(report_lines(&format!("{name} "), &r)),
            Err(e) => lines.push(failed(name, e)),
        }
    }
    lines
}

fn scaling() -> Vec<Line> {
    let mut cfg = base_config();
    cfg.tolerances.scaling = SCALING;
    match run_scaling(&cfg) {
        Ok(r) => report_lines("", &r),
        Err(e) => vec![failed("scaling", e)],
    }
}

fn galilei() -> Vec<Line> {
    let mut lines = Vec::new();
    for (eq, tol) in [(Equation::Mkdv, GALILEI_MKDV), (Equation::Nls, GALILEI_NLS)] {
        for sign in [Sign::Defocusing, Sign::Focusing] {
            let mut cfg = base_config();
            cfg.flow.equation = eq;
            cfg.flow.sign = sign;
            cfg.flow.horizon = 0.5;
            cfg.galilei_boosts = vec![0, 1];
            cfg.data = DataFamily::Gaussian { width: 1.0, amplitude: 0.3, k0: 0.0 };
            cfg.tolerances.galilei_mkdv = GALILEI_MKDV;
            cfg.tolerances.galilei_nls = GALILEI_NLS;
            let label = format!("{} {}", eq.name(), sign.name());
            match run_galilei_consistency(&cfg) {
                Ok(r) => {
                    let d = r.find("two_path_distance").map_or(f64::NAN, |c| c.measured);
                    lines.push(at_most(&format!("{label} distance"), d, tol));
                    lines.extend(report_lines(&format!("{label} "), &r).into_iter().skip(1));
                }
                Err(e) => lines.push(failed(&label, e)),
            }
        }
    }
    lines
}

fn apriori() -> Vec<Line> {
    let mut lines = Vec::new();
    let runs = [
        ("mkdv gaussian", Equation::Mkdv, Sign::Defocusing, DataFamily::default()),
        ("nls gaussian", Equation::Nls, Sign::Focusing, DataFamily::default()),
        (
            "mkdv random family",
            Equation::Mkdv,
            Sign::Focusing,
            DataFamily::RandomBand { bands: 4, amplitude: 0.3, count: 3 },
        ),
    ];
    for (name, eq, sign, data) in runs {
        let mut cfg = base_config();
        cfg.flow.equation = eq;
        cfg.flow.sign = sign;
        cfg.data = data;
        cfg.amplitudes = vec![0.1, 0.2, 0.4];
        cfg.tolerances.apriori = APRIORI;
        cfg.tolerances.mass = MASS;
        match run_apriori(&cfg) {
            Ok(r) => lines.extend(report_lines(&format!("{name} "), &r)),
            Err(e) => lines.push(failed(name, e)),
        }
    }
    lines
}

fn lines_or_error(r: Result<Vec<Line>>) -> Vec<Line> {
    r.unwrap_or_else(|e| vec![failed("evaluation", e)])
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "soliton regressions", solitons),
        (2, "conservation of alpha and beta", conservation),
        (3, "closed-form cross-checks", || lines_or_error(closed_forms())),
        (4, "series structure", || lines_or_error(series())),
        (5, "HS comparability", || lines_or_error(hs_comparability())),
        (6, "norm equivalence", norm_equivalence),
        (7, "weight construction", weights),
        (8, "scaling and embedding", scaling),
        (9, "Galilei consistency", galilei),
        (10, "a priori bound", apriori),
    ];
    let start = Instant::now();
    let outcomes: Vec<Outcome> = criteria
        .into_iter()
        .map(|(id, name, f)| {
            let t = Instant::now();
            let lines = f();
            Outcome { id, name, lines, seconds: t.elapsed().as_secs_f64() }
        })
        .collect();
    let total = start.elapsed().as_secs_f64();

    let mut all = true;
    for o in &outcomes {
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}  {} ({:.1} s)", o.id, o.name, o.seconds);
        for l in &o.lines {
            println!("    [{}] {}", if l.passed { "ok" } else { "x" }, l.text);
        }
        all &= o.passed();
    }
    let runtime_ok = total <= SUITE_RUNTIME_S;
    println!("suite runtime {total:.1} s (<= {SUITE_RUNTIME_S} s): {runtime_ok}");
    if all && runtime_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
