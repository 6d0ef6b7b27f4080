//! Every bundled scenario passes every command it configures, and the
//! published schema matches the config types.

use std::path::{Path, PathBuf};

use nambu_lab::{config, Command, Options};

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn scenarios() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn commands_of(cfg: &config::ScenarioConfig) -> Vec<Command> {
    let mut c = Vec::new();
    let blocks = [
        (cfg.simulate.is_some(), Command::Simulate),
        (cfg.check_dynamics.is_some(), Command::CheckDynamics),
        (cfg.check_liouville.is_some(), Command::CheckLiouville),
        (cfg.check_symmetry.is_some(), Command::CheckSymmetry),
        (cfg.invariant.is_some(), Command::Invariant),
        (cfg.momentum.is_some(), Command::Momentum),
        (cfg.action.is_some(), Command::Action),
        (cfg.convergence.is_some(), Command::Convergence),
    ];
    for (present, cmd) in blocks {
        if present {
            c.push(cmd);
        }
    }
    c
}

#[test]
fn bundled_scenarios_pass() {
    let files = scenarios();
    assert!(files.len() >= 8, "{} scenarios", files.len());
    let tmp = tempfile::tempdir().unwrap();
    let mut covered = std::collections::BTreeSet::new();
    for f in &files {
        let cfg = config::parse(&std::fs::read_to_string(f).unwrap()).unwrap();
        let cmds = commands_of(&cfg);
        assert!(!cmds.is_empty(), "{} configures no command", f.display());
        for cmd in cmds {
            let out = tmp.path().join(format!("{}-{}", cfg.name, cmd.name()));
            let o = nambu_lab::run(&Options { command: cmd, config: f.clone(), out: out.clone(), seed: None, tol: None });
            let failed: Vec<_> = o.body.checks.iter().filter(|c| !c.passed).collect();
            assert_eq!(o.exit_code, 0, "{} {}: {:?} {:?}", f.display(), cmd.name(), o.body.error, failed);
            assert!(!o.body.checks.is_empty(), "{} {} asserts nothing", f.display(), cmd.name());
            assert!(out.join("report.json").is_file());
            covered.insert(cmd.name());
        }
    }
    assert_eq!(covered.len(), 8, "commands covered: {covered:?}");
}

#[test]
fn published_schema_is_current() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/scenario.schema.json");
    let current = serde_json::to_string_pretty(&config::schema()).unwrap() + "\n";
    if std::env::var_os("NAMBU_LAB_BLESS").is_some() {
        std::fs::write(&path, &current).unwrap();
    }
    let published = std::fs::read_to_string(&path).unwrap_or_default();
    assert!(published == current, "schema out of date; rerun with NAMBU_LAB_BLESS=1");
}

#[test]
fn schema_rejects_unknown_keys_everywhere() {
    let s = serde_json::to_value(config::schema()).unwrap();
    assert_eq!(s["additionalProperties"], false);
    for (name, def) in s["definitions"].as_object().unwrap() {
        if def.get("properties").is_some() {
            assert_eq!(def["additionalProperties"], false, "{name}");
        }
    }
}
