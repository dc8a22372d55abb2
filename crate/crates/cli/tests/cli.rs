use adele_trace::commands::Cli;
use adele_trace::config::{self, ExperimentConfig};
use adele_trace::experiment::OPERATIONS;
use adele_trace::suites;
use clap::{CommandFactory, Parser};
use std::collections::BTreeSet;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adele-trace"))
}

/// Leaf subcommands as `group-leaf` (or just `leaf` at top level).
fn leaves(cmd: &clap::Command, prefix: &str, out: &mut Vec<String>) {
    for sub in cmd.get_subcommands() {
        let name = if prefix.is_empty() { sub.get_name().to_string() } else { format!("{prefix}-{}", sub.get_name()) };
        if sub.has_subcommands() {
            leaves(sub, &name, out);
        } else {
            out.push(name);
        }
    }
}

#[test]
fn every_library_operation_has_exactly_one_subcommand() {
    let mut found = Vec::new();
    leaves(&Cli::command(), "", &mut found);
    let mut ops: Vec<&str> = Vec::new();
    for leaf in &found {
        match leaf.as_str() {
            "run" => ops.push("cli_harness::run"),
            "suite" => ops.push("cli_harness::suite"),
            other => {
                let (_, op) =
                    OPERATIONS.iter().find(|(n, _)| *n == other).unwrap_or_else(|| panic!("subcommand `{other}` maps to no operation"));
                ops.push(op);
            }
        }
    }
    let distinct: BTreeSet<&str> = ops.iter().copied().collect();
    assert_eq!(distinct.len(), ops.len(), "an operation is reachable twice: {ops:?}");
    assert_eq!(ops.len(), 34);
    for (_, op) in OPERATIONS {
        assert!(distinct.contains(op), "{op} is unreachable");
    }
    Cli::command().debug_assert();
}

#[test]
fn leaf_names_match_config_names() {
    let cli = Cli::try_parse_from(["adele-trace", "trace", "padic", "--p", "2", "--h", "units", "--n", "4"]).unwrap();
    match cli.invocation() {
        adele_trace::commands::Invocation::Single(c) => assert_eq!(c.experiment.name(), "trace-padic"),
        _ => panic!("expected a single experiment"),
    }
}

#[test]
fn configs_round_trip_bit_identically() {
    for name in suites::SUITES {
        for (label, c) in suites::members(name).unwrap() {
            let text = c.to_toml().unwrap();
            let back = ExperimentConfig::from_toml(&text).unwrap();
            assert_eq!(back, c, "{name}/{label}");
            assert_eq!(back.to_toml().unwrap(), text, "{name}/{label}");
            assert_eq!(back.sha256().unwrap(), c.sha256().unwrap());
        }
    }
    let handwritten = "tolerance = 1e-9\nseed = 3\n\n[output]\njson = \"out.json\"\n\n[experiment]\ncommand = \"stats-semiclassical\"\ne = 100.0\nlambda = 5.0\ngrid = 64\n";
    let c = ExperimentConfig::from_toml(handwritten).unwrap();
    assert_eq!(c.seed, 3);
    assert_eq!(ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
}

#[test]
fn malformed_configs_are_rejected_with_the_key() {
    let unknown = "[experiment]\ncommand = \"trace-padic\"\np = 2\nh = \"units\"\nn = [4]\nbogus = 1\n";
    let err = ExperimentConfig::from_toml(unknown).unwrap_err().to_string();
    assert!(err.contains("bogus"), "{err}");
    let top = "tolerance = 1e-8\nextra = true\n[experiment]\ncommand = \"zeta-zeros\"\ne_max = 20.0\n";
    assert!(ExperimentConfig::from_toml(top).unwrap_err().to_string().contains("extra"));
    let bad_value = "[experiment]\ncommand = \"trace-padic\"\np = 2\nh = \"shell\"\nn = [4]\n";
    assert!(ExperimentConfig::from_toml(bad_value).is_err());
    let bad_command = "[experiment]\ncommand = \"no-such-thing\"\n";
    assert!(ExperimentConfig::from_toml(bad_command).is_err());
    assert!(ExperimentConfig::from_toml("not toml at all").is_err());
}

#[test]
fn padic_trace_config_is_exact() {
    let c =
        ExperimentConfig::from_toml("tolerance = 0.0\n[experiment]\ncommand = \"trace-padic\"\np = 2\nh = \"units\"\nn = [4]\n").unwrap();
    let r = config::run(&c).unwrap();
    assert!(r.pass);
    let residual = &r.payload[0]["residual"]["Exact"];
    assert_eq!(residual["symbolic"], "0");
    assert_eq!(residual["value"], 0.0);
    assert_eq!(r.payload[0]["computed"]["Exact"]["symbolic"], "9*log(2)");
}

#[test]
fn explicit_formula_config_passes() {
    let text = "tolerance = 1e-7\n[experiment]\ncommand = \"explicit-compare\"\nh = \"gaussian-log(0,1)\"\ne_max = 200.0\n";
    let r = config::run(&ExperimentConfig::from_toml(text).unwrap()).unwrap();
    assert!(r.pass);
    assert!(r.payload["discrepancy"].as_f64().unwrap() < 1e-6);
}

#[test]
fn payloads_are_deterministic() {
    for name in ["stats", "adelic", "trace-ladder"] {
        for (label, c) in suites::members(name).unwrap() {
            let a = config::run(&c).unwrap();
            let b = config::run(&c).unwrap();
            assert_eq!(a.payload_json().unwrap(), b.payload_json().unwrap(), "{name}/{label}");
            assert_eq!(a.config_sha256, b.config_sha256);
        }
    }
}

#[test]
fn seed_changes_only_the_monte_carlo_estimate() {
    let text = |seed: u64| format!("seed = {seed}\n[experiment]\ncommand = \"stats-semiclassical\"\ne = 100.0\nlambda = 5.0\ngrid = 256\n");
    let a = config::run(&ExperimentConfig::from_toml(&text(1)).unwrap()).unwrap();
    let b = config::run(&ExperimentConfig::from_toml(&text(2)).unwrap()).unwrap();
    assert_eq!(a.payload["area"], b.payload["area"]);
    assert_ne!(a.payload["monte_carlo"], b.payload["monte_carlo"]);
}

#[test]
fn pv_constants_suite() {
    let report = suites::run_suite("pv-constants").unwrap();
    assert_eq!(report.members.len(), 4);
    assert!(report.pass(), "{:?}", report.failures());
    assert!(suites::run_suite("no-such-suite").is_err());
}

#[test]
fn binary_writes_outputs_and_sets_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("ladder.json");
    let csv = dir.path().join("ladder.csv");
    let status = bin().args(["suite", "trace-ladder", "--json"]).arg(&json).arg("--csv").arg(&csv).output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("member,N,computed,predicted,residual,exact\n"));
    assert!(dir.path().join("ladder-2.csv").exists());
    let records: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(records.as_array().unwrap().len(), 8);

    let saved = dir.path().join("saved.toml");
    let out = bin().args(["zeta", "count", "--e", "100", "--save-config"]).arg(&saved).output().unwrap();
    assert!(out.status.success());
    let first: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(first["payload"][0]["n_exact"], 29);
    let rerun = bin().arg("run").arg(&saved).output().unwrap();
    let second: serde_json::Value = serde_json::from_slice(&rerun.stdout).unwrap();
    assert_eq!(first["payload"], second["payload"]);
    assert_eq!(first["config_sha256"], second["config_sha256"]);

    let fail = bin().args(["pv", "real", "--expect", "1.7"]).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[experiment]\ncommand = \"zeta-zeros\"\ne_max = 20.0\nfoo = 1\n").unwrap();
    let err = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains("foo"));
    assert_eq!(bin().args(["suite", "nope"]).output().unwrap().status.code(), Some(2));
}
