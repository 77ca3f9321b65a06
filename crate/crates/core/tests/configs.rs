use std::collections::BTreeSet;
use std::path::PathBuf;

use simplex_lab::experiment::{ExperimentConfig, ExperimentName};

fn config_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn shipped() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(config_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") && path.file_name().unwrap() != "schema.json" {
            out.push(ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display())));
        }
    }
    out
}

#[test]
fn shipped_configs_cover_every_criterion() {
    let configs = shipped();
    let names: BTreeSet<_> = configs.iter().map(|c| c.experiment.as_str()).collect();
    assert_eq!(names.len(), ExperimentName::ALL.len());
    let criteria: BTreeSet<u8> = configs.iter().filter_map(|c| c.experiment.criterion()).collect();
    assert_eq!(criteria, (1..=9).collect());
}

#[test]
fn schema_lists_the_same_fields_as_the_configs() {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(config_dir().join("schema.json")).unwrap()).unwrap();
    for cfg in shipped() {
        let name = cfg.experiment.as_str();
        let props = schema["$defs"][name]["properties"].as_object().unwrap_or_else(|| panic!("{name} missing"));
        let in_schema: BTreeSet<_> = props.keys().cloned().collect();
        let in_config: BTreeSet<_> = cfg.params.as_object().unwrap().keys().cloned().collect();
        assert_eq!(in_schema, in_config, "{name}");
    }
}
