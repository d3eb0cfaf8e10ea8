//! End-to-end checks of the `asep` binary and of `cli::run`.

use std::path::PathBuf;
use std::process::Command;

use asep::cli::{run, sha256_hex, Cli, RunManifest, EXIT_OK, EXIT_USAGE};
use asep::params::make_params;
use asep::sim::{ctmc_oracle, OracleConfig};
use clap::Parser;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_asep"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("asep-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run_args(args: &[&str]) -> asep::cli::Run {
    let argv: Vec<String> = std::iter::once("asep").chain(args.iter().copied()).map(String::from).collect();
    run(&Cli::try_parse_from(&argv).unwrap(), &argv).unwrap()
}

#[test]
fn exact_csv_layout_and_value() {
    let out = bin().args(["exact", "--p", "0.3", "--m", "2", "--x", "0", "--t", "1", "--wall-time"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,x,t,t_phys,prob,err_est");
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&f[..4], &["2", "0", "3.9999999999999997e-1", "1.0000000000000000e0"]);
    let prob: f64 = f[4].parse().unwrap();
    let o = ctmc_oracle(&make_params(0.3).unwrap(), 2, 0, 1.0, &OracleConfig::default()).unwrap();
    assert!((prob - o.prob).abs() <= o.truncation_bound + 1e-9, "{prob} vs {o:?}");
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 4] = [
        &["exact", "--p", "0.6", "--m", "1", "--x", "0", "--t", "1"],
        &["exact", "--p", "0.3", "--m", "1", "--t", "1"],
        &["exact", "--bogus"],
        &["limit", "f2", "--s", "20"],
    ];
    for args in cases {
        let out = bin().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(EXIT_USAGE), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let d = scratch("badcfg");
    let cfg = d.join("c.json");
    std::fs::write(&cfg, r#"{"p": 0.3, "m": 1, "x": 0, "t": 1, "colour": "red"}"#).unwrap();
    let out = bin().args(["exact", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn flags_override_config_file() {
    let d = scratch("precedence");
    let cfg = d.join("c.json");
    std::fs::write(&cfg, r#"{"p": 0.3, "m": 2, "x": 0, "t": 0.5}"#).unwrap();
    let r = run_args(&["exact", "--config", cfg.to_str().unwrap(), "--x", "-1"]);
    assert_eq!(r.settings.x, Some(-1));
    assert_eq!(r.settings.m, Some(2));
    assert_eq!(r.settings.p, Some(0.3));
    assert_eq!(r.settings.bits, Some(53));
    assert!(r.rendered.lines().nth(1).unwrap().starts_with("2,-1,"));
}

#[test]
fn compare_in_the_vanishing_region_is_all_ones() {
    let r = run_args(&["compare", "--p", "0.3", "--m", "2", "--x", "2", "--t", "1", "--trials", "100"]);
    assert_eq!(r.exit_code(), EXIT_OK);
    let mut rows = r.rendered.lines();
    assert_eq!(rows.next().unwrap(), "a,b,value_a,value_b,diff,scale,z,agree");
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[2].parse::<f64>().unwrap(), 1.0, "{row}");
        assert_eq!(f[3].parse::<f64>().unwrap(), 1.0, "{row}");
        assert_eq!(f[7], "true");
    }
}

#[test]
fn out_writes_data_and_manifest() {
    let d = scratch("out");
    let r = run_args(&["simulate", "--p", "0.2", "--m", "1", "--x", "0", "--t", "1", "--trials", "500", "--serial", "--out", d.to_str().unwrap()]);
    let (data, side) = r.files.clone().unwrap();
    assert_eq!(data.file_name().unwrap(), "simulate.csv");
    assert_eq!(side.file_name().unwrap(), "simulate.manifest.json");
    let bytes = std::fs::read(&data).unwrap();
    let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&side).unwrap()).unwrap();
    assert_eq!(m.output_sha256, sha256_hex(&bytes));
    assert_eq!(m.output_file.as_deref(), Some("simulate.csv"));
    assert_eq!(m.seed, Some(asep::cli::settings::DEFAULT_SEED));
    assert_eq!(m.config["trials"], 500);
    assert_eq!(m.command, "simulate");
}

#[test]
fn tabulate_names_file_after_law() {
    let d = scratch("tab");
    let r = run_args(&["tabulate", "--law", "f2", "--grid", "-2:0:1", "--out", d.to_str().unwrap()]);
    let (data, _) = r.files.unwrap();
    assert_eq!(data.file_name().unwrap(), "tabulate_f2.csv");
    let text = std::fs::read_to_string(data).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("s,value,err_est\n"));
}

#[test]
fn json_format_parses() {
    let r = run_args(&["--format", "json", "limit", "f2", "--s", "0"]);
    let v: serde_json::Value = serde_json::from_str(&r.rendered).unwrap();
    assert!(v.is_object() || v.is_array());
    assert!(r.rendered.contains("0.9"));
}
