//! Runs the ten acceptance criteria and prints one PASS/FAIL line each.
//! Every tolerance is written out here rather than taken from the experiment defaults.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use serde_json::{json, Value};
use simplex_lab::experiment::{run_experiment, ExperimentConfig, ExperimentName, ExperimentReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn config(name: ExperimentName, params: Value) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(name);
    cfg.params = params;
    cfg
}

fn run(cfg: &ExperimentConfig) -> (ExperimentReport, f64) {
    let out = run_experiment(cfg).unwrap_or_else(|e| panic!("{:?} failed to run: {e}", cfg.experiment));
    (out.report, out.wall_seconds)
}

fn summarize(report: &ExperimentReport, wall: f64, limit: Option<f64>) -> Outcome {
    let mut failed: Vec<String> = report.failed().map(|c| format!("{} = {:.4e} (want {})", c.name, c.value, c.bound)).collect();
    if let Some(limit) = limit {
        if wall >= limit {
            failed.push(format!("runtime {wall:.1} s (want < {limit} s)"));
        }
    }
    let detail = if failed.is_empty() {
        format!("{} checks, {wall:.1} s", report.checks.len())
    } else {
        failed.join("; ")
    };
    Outcome { pass: failed.is_empty(), detail }
}

fn criteria() -> Vec<(u8, &'static str, ExperimentConfig, Option<f64>)> {
    vec![
        (
            1,
            "mu cross-validation",
            config(
                ExperimentName::SymbolCrossval,
                json!({
                    "dims": [2, 3, 4], "points": 200, "min_distance": 0.1, "mc_samples": 1_000_000,
                    "gl_nodes": 256, "stderr_multiple": 4.0, "coverage": 0.95, "slice_tolerance": 1e-6
                }),
            ),
            Some(120.0),
        ),
        (
            2,
            "exact symbol symmetries",
            config(ExperimentName::SymbolSymmetries, json!({ "dims": [2, 3, 4], "points": 1000, "tolerance": 1e-13 })),
            None,
        ),
        (3, "sector and threshold counts", config(ExperimentName::Sectors, json!({ "dims": [2, 3, 4] })), Some(300.0)),
        (
            4,
            "partition of unity",
            config(
                ExperimentName::Partition,
                json!({ "dims": [2, 3], "points": 10_000, "r_min": 1.0, "r_max": 4.0, "l0": 4, "tolerance": 1e-10 }),
            ),
            None,
        ),
        (
            5,
            "decay lemmas",
            config(
                ExperimentName::Decay,
                json!({
                    "v_range": [8.0, 128.0], "u_range": [8.0, 128.0], "samples": 9, "ell": 5,
                    "rho_slope_max": -1.75, "mell_v_slope_max": -1.75, "mell_u_slope_max": -4.0,
                    "lattice_deltas": [], "lattice_radius": 8.0, "lattice_change_max": 0.05
                }),
            ),
            Some(60.0),
        ),
        (
            6,
            "time/frequency consistency",
            config(
                ExperimentName::TimeFrequency,
                json!({
                    "size": 32, "period": 1.0, "cutoff": 4, "tuples": 20,
                    "pv": {
                        "eps": 2f64.powi(-20), "t_max": 16.0, "alpha_nodes": 32,
                        "layout": { "layout": "hybrid", "log_count": 64, "split": 0.5, "linear_panels": 64, "per_panel": 8 }
                    },
                    "spread_max": 0.05, "modulus_tolerance": 0.10,
                    "tensor_size": 8, "tensor_dims": [2, 3], "tensor_l0": 2, "tensor_tolerance": 1e-8
                }),
            ),
            None,
        ),
        (
            7,
            "endpoint counterexample",
            config(
                ExperimentName::Counterexample,
                json!({
                    "n": 2, "j0": 2, "sizes": [16, 32, 64, 128, 256],
                    "spread_max": 0.10, "slope_tolerance": 0.05, "r_squared_min": 0.99
                }),
            ),
            Some(300.0),
        ),
        (8, "dyadic identities", config(ExperimentName::DyadicIdentities, json!({ "levels": 6, "trials": 100 })), None),
        (
            9,
            "shifted operators",
            config(
                ExperimentName::Shifted,
                json!({
                    "u": [0.0, 4.0, 16.0, 64.0, 256.0], "p": 2.0, "trials": 16, "size": 65536, "period": 65536.0,
                    "scales": [-6, -2], "exponent_max": 0.1, "excess_max": 0.25
                }),
            ),
            None,
        ),
    ]
}

/// The dyadic tolerances live in the library; hold them to these values.
fn dyadic_pins() -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("haar orthonormality", 1e-12),
        ("haar parseval", 1e-12),
        ("martingale tower property", 1e-12),
        ("telescoping differences", 1e-12),
        ("reproducing formula", 1e-12),
        ("t_d telescoping", 1e-12),
        ("second factor equals l2 norm", 1e-10),
        ("cauchy-schwarz bound", 0.0),
        ("cauchy-schwarz equality", 1e-10),
        ("sign split recombination", 1e-10),
    ])
}

fn check_pins(report: &ExperimentReport) -> Vec<String> {
    let pins = dyadic_pins();
    let mut bad = Vec::new();
    for (name, tol) in &pins {
        match report.checks.iter().find(|c| c.name == *name) {
            Some(c) if c.value <= *tol => {}
            Some(c) => bad.push(format!("{name} = {:.3e} (pinned {tol:e})", c.value)),
            None => bad.push(format!("{name} missing")),
        }
    }
    bad
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut all_pass = true;
    let mut reports = Vec::new();
    for (id, title, cfg, limit) in criteria() {
        let (report, wall) = run(&cfg);
        let mut outcome = summarize(&report, wall, limit);
        if cfg.experiment == ExperimentName::DyadicIdentities {
            let bad = check_pins(&report);
            if !bad.is_empty() {
                outcome.pass = false;
                outcome.detail = bad.join("; ");
            }
        }
        all_pass &= outcome.pass;
        println!("criterion {id:>2} {}  {title}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
        reports.push((cfg, report.to_json().expect("report serializes")));
    }

    // Criterion 10: rerun everything, including the lattice proxy left out above, and compare bytes.
    let mut mismatched = Vec::new();
    let lattice = config(ExperimentName::Decay, json!({}));
    let first = run(&lattice).0.to_json().expect("report serializes");
    reports.push((lattice, first));
    let probe = config(ExperimentName::Probe, json!({}));
    let first = run(&probe).0.to_json().expect("report serializes");
    reports.push((probe, first));
    for (cfg, first) in &reports {
        let dir = tempfile::tempdir().expect("temp dir");
        let mut again = cfg.clone();
        again.output_dir = Some(dir.path().to_path_buf());
        run(&again);
        let written = std::fs::read_to_string(dir.path().join("report.json")).expect("report written");
        if written != *first {
            mismatched.push(cfg.experiment.as_str());
        }
    }
    let pass = mismatched.is_empty();
    all_pass &= pass;
    let detail = if pass {
        format!("{} reruns byte-identical", reports.len())
    } else {
        format!("reports differ: {}", mismatched.join(", "))
    };
    println!("criterion 10 {}  reproducibility: {detail}", if pass { "PASS" } else { "FAIL" });
    println!("total {:.1} s", start.elapsed().as_secs_f64());
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
