use std::f64::consts::PI;

use modspace::harness::{
    load_config, run_conservation, run_tail_inequalities, write_report, DataFamily, Experiment, ExperimentConfig,
};
use modspace::*;

#[test]
fn config_file_to_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "grid": {"n": 256, "l": "8pi"}, "flow": {"dt": 0.01, "horizon": 0.2, "snapshots": 4},
            "kappas": [0.5, 2.0], "seed": 5}"#,
    )
    .unwrap();
    let cfg = load_config(&path).unwrap();
    let report = Experiment::Conserve.run(&cfg).unwrap();
    let (csv, json) = write_report(&report, dir.path()).unwrap();

    let mut rd = csv::Reader::from_path(csv).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[3], "alpha_full");
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5 * 2);
    // Values survive the text round trip bit for bit.
    let typed = run_conservation(&cfg).unwrap();
    for (rec, row) in rows.iter().zip(&typed.rows) {
        assert_eq!(rec[3].parse::<f64>().unwrap().to_bits(), row.alpha_full.to_bits());
    }
    let checks: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert!(checks.as_array().unwrap().iter().all(|c| c["pass"].as_bool().is_some()));
}

#[test]
fn beta_is_conserved_along_the_mixed_flow() {
    let g = GridSpec::new(1024, 32.0 * PI).unwrap();
    let u0 = galilei_boost(&data::gaussian(g, 1.0, 0.3, 0.0), BoostSpec { k: 1.0, t: 0.0, equation: BoostFlow::Mkdv });
    let fs = FlowSpec::new(Equation::MkdvNls { k: 1.0 }, Sign::Defocusing, 2e-3, 0.5).unwrap();
    let kp = SpectralParameter::new(1.0, Sign::Defocusing).unwrap();
    let spec = OperatorSpec::with_size(&g, 512);
    let values =
        flows::evolve_with(&u0, &fs, &[0.0, 0.25, 0.5], |_, u| conserved::beta_full_with(u, kp, spec).unwrap())
            .unwrap();
    for v in &values[1..] {
        assert!(((v - values[0]) / values[0]).abs() < 1e-6, "{v} vs {}", values[0]);
    }
}

#[test]
fn boosted_tails_scale_homogeneously() {
    let mut cfg = ExperimentConfig::default();
    cfg.flow.dt = 1e-2;
    cfg.flow.horizon = 0.5;
    cfg.flow.snapshots = 1;
    cfg.amplitudes = vec![0.1, 0.2];
    // Boosts beyond 4 push the spectrum into the aliasing guard band at N = 1024.
    cfg.boosts = (-4..=4).collect();
    cfg.data = DataFamily::Gaussian { width: 1.0, amplitude: 0.1, k0: 0.0 };
    let r = run_tail_inequalities(&cfg).unwrap();
    for c in &r.checks {
        println!("{} = {:.3e}", c.criterion, c.measured);
    }
    assert!(r.passed(), "{:?}", r.checks);
}

#[test]
fn soliton_keeps_its_conserved_quantities() {
    let g = GridSpec::new(1024, 32.0 * PI).unwrap();
    let u0 = data::sech(g).scaled(Complex64::new(0.3, 0.0));
    let fs = FlowSpec::new(Equation::Nls, Sign::Focusing, 1e-3, 1.0).unwrap();
    let kp = SpectralParameter::new(1.0, Sign::Focusing).unwrap();
    let a = flows::evolve_with(&u0, &fs, &[0.0, 1.0], |_, u| alpha_full(u, kp).unwrap()).unwrap();
    assert!(((a[1] - a[0]) / a[0]).abs() < 1e-8);
}
