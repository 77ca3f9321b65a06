use serde_json::json;

use super::*;

fn run(name: ExperimentName, params: serde_json::Value) -> ExperimentReport {
    let mut cfg = ExperimentConfig::new(name);
    cfg.params = params;
    run_experiment(&cfg).unwrap().report
}

#[test]
fn names_round_trip() {
    for name in ExperimentName::ALL {
        let text = serde_json::to_string(&name).unwrap();
        assert_eq!(text, format!("\"{}\"", name.as_str()));
        assert_eq!(serde_json::from_str::<ExperimentName>(&text).unwrap(), name);
    }
    assert_eq!(ExperimentName::Probe.criterion(), None);
}

#[test]
fn config_rejects_unknown_fields() {
    assert!(ExperimentConfig::from_json(r#"{"experiment": "sectors", "bogus": 1}"#).is_err());
    assert!(ExperimentConfig::from_json(r#"{"experiment": "sectors", "params": {"dimz": [2]}}"#).is_err());
    let cfg = ExperimentConfig::from_json(r#"{"experiment": "sectors"}"#).unwrap();
    assert!(cfg.deterministic);
    assert_eq!(cfg.seed, crate::symbol::DEFAULT_SEED);
}

#[test]
fn missing_config_file_names_path() {
    let err = ExperimentConfig::load(Path::new("/nonexistent/cfg.json")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/cfg.json"));
}

#[test]
fn sectors_report() {
    let r = run(ExperimentName::Sectors, json!({"dims": [3, 4]}));
    assert!(r.all_passed(), "{:?}", r.failed().collect::<Vec<_>>());
    assert_eq!(r.tables[0].rows[0][1], 14.0);
    assert_eq!(r.tables[0].rows[1][1], 104.0);
    // n = 2 has four sectors against a bound of two.
    let r = run(ExperimentName::Sectors, json!({"dims": [2]}));
    assert!(r.hard_failure());
}

#[test]
fn small_runs_pass() {
    let cases = [
        (ExperimentName::SymbolSymmetries, json!({"points": 50})),
        (ExperimentName::Partition, json!({"points": 200})),
        (ExperimentName::DyadicIdentities, json!({"levels": 3, "trials": 2})),
        (ExperimentName::Probe, json!({})),
        (ExperimentName::SymbolCrossval, json!({"dims": [3], "points": 5, "mc_samples": 200000})),
    ];
    for (name, params) in cases {
        let r = run(name, params);
        assert!(r.all_passed(), "{name:?}: {:?}", r.failed().collect::<Vec<_>>());
    }
}

#[test]
fn rhs_identity_holds_in_counterexample() {
    let r = run(ExperimentName::Counterexample, json!({"sizes": [16, 32, 64]}));
    let rhs = r.checks.iter().find(|c| c.kind == CheckKind::Identity).unwrap();
    assert!(rhs.passed());
    assert_eq!(r.tables[0].rows.len(), 3);
}

#[test]
fn reports_are_reproducible_and_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentName::DyadicIdentities);
    cfg.params = json!({"levels": 3, "trials": 2});
    let a = run_experiment(&cfg).unwrap().report.to_json().unwrap();
    cfg.output_dir = Some(dir.path().to_path_buf());
    run_experiment(&cfg).unwrap();
    let written = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(a, written);
    assert!(dir.path().join("timing.json").exists());
}

#[test]
fn tables_write_csv() {
    let mut t = Table::new("t", &["a", "b"]);
    t.push(vec![1.0, 2.5]);
    let mut out = Vec::new();
    t.write_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "a,b\n1,2.5\n");
}
