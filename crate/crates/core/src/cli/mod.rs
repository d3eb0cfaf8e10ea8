//! Command-line front end. The `asep` binary is a thin wrapper over
//! [`main_with_args`]; [`run`] is the same path without process exit codes.

pub mod args;
pub mod output;
pub mod settings;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

pub use args::{Cli, Command, Format, LawArg};
pub use output::{config_hash, fmt_float, sha256_hex, Cell, RunManifest, Table, CSV_SCHEMA_VERSION};
pub use settings::{parse_grid, parse_sweep, Settings};

use crate::error::{param_err, AsepError, Result};
use crate::exactdist::{prob_gt, prob_leq, verify_identities, NumericsConfig};
use crate::limitdist::{crossover_cdf, f2_cdf, theorem1_tail, LimitConfig};
use crate::params::{make_params, AsepParams};
use crate::precision::high_precision_mode;
use crate::sim::{ctmc_oracle, empirical_scaled_cdf, estimate_prob, OracleConfig, SimConfig};
use settings::{need, DEFAULT_JUMP_CAP, DEFAULT_SEED, DEFAULT_TRIALS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BACKEND: i32 = 3;

/// Default parameter sets of `verify`.
pub const VERIFY_P: [f64; 3] = [0.1, 0.3, 0.45];
/// Largest physical time at which `compare` attaches the oracle.
pub const COMPARE_ORACLE_MAX_T: f64 = 2.5;
const DEFAULT_S_GRID: &str = "-2,-1,0,1,2";

pub fn exit_code(e: &AsepError) -> i32 {
    match e {
        AsepError::Parameter(_) => EXIT_USAGE,
        _ => EXIT_BACKEND,
    }
}

/// What a command produced, before rendering.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub table: Table,
    pub json: Value,
    /// False when backends disagree or identity checks fail.
    pub agree: bool,
    pub seed: Option<u64>,
    pub node_counts: Value,
    pub warnings: Vec<String>,
}

impl CommandOutput {
    fn new(table: Table, json: Value) -> Self {
        CommandOutput { table, json, agree: true, seed: None, node_counts: Value::Null, warnings: vec![] }
    }
}

/// A finished invocation.
#[derive(Clone, Debug)]
pub struct Run {
    pub command: &'static str,
    pub settings: Settings,
    pub output: CommandOutput,
    pub rendered: String,
    pub manifest: RunManifest,
    /// Data file and manifest, when `--out` was given (always for `tabulate`).
    pub files: Option<(PathBuf, PathBuf)>,
}

impl Run {
    pub fn exit_code(&self) -> i32 {
        if self.output.agree {
            EXIT_OK
        } else {
            EXIT_DISAGREE
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Exact(_) => "exact",
        Command::Simulate(_) => "simulate",
        Command::Oracle(_) => "oracle",
        Command::Compare(_) => "compare",
        Command::Verify(_) => "verify",
        Command::Limit(_) => "limit",
        Command::Tabulate(_) => "tabulate",
        Command::ScaledCdf(_) => "scaled-cdf",
    }
}

/// Execute `cli`, writing files when asked. `argv` is recorded in the manifest.
pub fn run(cli: &Cli, argv: &[String]) -> Result<Run> {
    let start = Instant::now();
    let mut s = Settings::resolve(cli)?;
    let command = command_name(&cli.command);
    let output = match &cli.command {
        Command::Exact(_) => cmd_exact(&mut s)?,
        Command::Simulate(_) => cmd_simulate(&mut s)?,
        Command::Oracle(_) => cmd_oracle(&mut s)?,
        Command::Compare(_) => cmd_compare(&mut s)?,
        Command::Verify(_) => cmd_verify(&mut s)?,
        Command::Limit(a) => cmd_limit(a.law, &mut s, false)?,
        Command::Tabulate(a) => cmd_limit(a.law, &mut s, true)?,
        Command::ScaledCdf(_) => cmd_scaled_cdf(&mut s)?,
    };
    let format = s.format();
    s.format = Some(format);
    s.bits.get_or_insert(53);
    let rendered = match format {
        Format::Csv => output.table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&output.json)? + "\n",
    };
    let out_dir = match (&cli.out, &cli.command) {
        (Some(d), _) => Some(d.clone()),
        (None, Command::Tabulate(_)) => Some(PathBuf::from(".")),
        _ => None,
    };
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let data_name = match &cli.command {
        Command::Tabulate(a) => format!("{}_{}.{ext}", command, law_name(a.law)),
        Command::Limit(a) => format!("{}_{}.{ext}", command, law_name(a.law)),
        _ => format!("{command}.{ext}"),
    };
    let config = serde_json::to_value(&s)?;
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        csv_schema_version: CSV_SCHEMA_VERSION,
        command: command.to_string(),
        command_line: argv.to_vec(),
        config_hash: config_hash(command, &config),
        config,
        seed: output.seed,
        precision_bits: s.bits(),
        node_counts: output.node_counts.clone(),
        output_file: out_dir.as_ref().map(|_| data_name.clone()),
        output_sha256: sha256_hex(rendered.as_bytes()),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let files = match out_dir {
        Some(dir) => Some(write_files(&dir, &data_name, &rendered, &manifest)?),
        None => None,
    };
    Ok(Run { command, settings: s, output, rendered, manifest, files })
}

fn write_files(dir: &Path, name: &str, rendered: &str, manifest: &RunManifest) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let data = dir.join(name);
    let stem = name.rsplit_once('.').map_or(name, |(a, _)| a);
    let side = dir.join(format!("{stem}.manifest.json"));
    std::fs::write(&data, rendered)?;
    std::fs::write(&side, serde_json::to_string_pretty(manifest)? + "\n")?;
    Ok((data, side))
}

/// Parse `args`, run, print or write results, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli, &argv) {
        Ok(r) => {
            for w in &r.output.warnings {
                eprintln!("warning: {w}");
            }
            match &r.files {
                Some((data, side)) => eprintln!("wrote {} and {}", data.display(), side.display()),
                None => print!("{}", r.rendered),
            }
            r.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn law_name(l: LawArg) -> &'static str {
    match l {
        LawArg::Thm1 => "thm1",
        LawArg::Crossover => "crossover",
        LawArg::F2 => "f2",
    }
}

struct Times {
    t: f64,
    t_phys: f64,
}

/// Formula and physical time from `t` and the `wall_time` switch.
fn times(params: &AsepParams, s: &mut Settings) -> Result<Times> {
    let t = need(&s.t, "t")?;
    if !(t > 0.0 && t.is_finite()) {
        return param_err(format!("t must be positive, got {t}"));
    }
    if *s.wall_time.get_or_insert(false) {
        Ok(Times { t: params.formula_time(t), t_phys: t })
    } else {
        Ok(Times { t, t_phys: params.physical_time(t)? })
    }
}

fn numerics(s: &mut Settings) -> Result<NumericsConfig> {
    let bits = *s.bits.get_or_insert(53);
    let mut cfg = NumericsConfig::default().with_precision(high_precision_mode(bits)?);
    cfg.n_eta = *s.nodes.get_or_insert(cfg.n_eta);
    cfg.validate()?;
    Ok(cfg)
}

fn sim_config(s: &mut Settings) -> Result<SimConfig> {
    let trials = *s.trials.get_or_insert(DEFAULT_TRIALS);
    if trials == 0 {
        return param_err("trials must be positive");
    }
    Ok(SimConfig {
        n_particles: s.n_particles,
        trials,
        seed: *s.seed.get_or_insert(DEFAULT_SEED),
        parallel: !*s.serial.get_or_insert(false),
        threads: s.threads,
    })
}

fn point(s: &Settings) -> Result<(AsepParams, u32, i64)> {
    let params = make_params(need(&s.p, "p")?)?;
    Ok((params, need(&s.m, "m")?, need(&s.x, "x")?))
}

fn cmd_exact(s: &mut Settings) -> Result<CommandOutput> {
    let (params, m, x) = point(s)?;
    let tm = times(&params, s)?;
    let cfg = numerics(s)?;
    let d = prob_leq(&params, m, x, tm.t, &cfg)?;
    let mut table = Table::new(&["m", "x", "t", "t_phys", "prob", "err_est"]);
    table.push(vec![m.into(), x.into(), tm.t.into(), tm.t_phys.into(), d.prob.into(), d.err_est.into()]);
    let json = json!({
        "m": m, "x": x, "t": tm.t, "t_phys": tm.t_phys, "prob": d.prob, "err_est": d.err_est,
        "raw": d.raw, "imag": d.imag, "n_eta": d.n_eta, "n_lambda": d.n_lambda, "bits": d.bits,
    });
    let mut out = CommandOutput::new(table, json);
    out.node_counts = json!({ "n_eta": d.n_eta, "n_lambda": d.n_lambda });
    Ok(out)
}

fn cmd_simulate(s: &mut Settings) -> Result<CommandOutput> {
    let (params, m, x) = point(s)?;
    let tm = times(&params, s)?;
    let cfg = sim_config(s)?;
    let e = estimate_prob(&params, m, x, tm.t_phys, &cfg)?;
    let mut table = Table::new(&["m", "x", "t", "t_phys", "p_hat", "stderr", "trials", "hits"]);
    table.push(vec![
        m.into(),
        x.into(),
        tm.t.into(),
        tm.t_phys.into(),
        e.p_hat.into(),
        e.stderr.into(),
        e.trials.into(),
        e.hits.into(),
    ]);
    let json = json!({
        "m": m, "x": x, "t": tm.t, "t_phys": tm.t_phys, "p_hat": e.p_hat, "stderr": e.stderr,
        "trials": e.trials, "hits": e.hits, "seed": cfg.seed, "n_particles": cfg.n_particles,
        "truncation_warning": e.truncation_warning,
    });
    let mut out = CommandOutput::new(table, json);
    out.seed = Some(cfg.seed);
    out.warnings.extend(e.truncation_warning);
    Ok(out)
}

fn oracle_config(s: &mut Settings) -> OracleConfig {
    OracleConfig { jump_cap: *s.jump_cap.get_or_insert(DEFAULT_JUMP_CAP), ..Default::default() }
}

fn cmd_oracle(s: &mut Settings) -> Result<CommandOutput> {
    let (params, m, x) = point(s)?;
    let tm = times(&params, s)?;
    let cfg = oracle_config(s);
    let o = ctmc_oracle(&params, m, x, tm.t_phys, &cfg)?;
    let mut table = Table::new(&["m", "x", "t", "t_phys", "prob", "truncation_bound", "jump_cap", "rate"]);
    table.push(vec![
        m.into(),
        x.into(),
        tm.t.into(),
        tm.t_phys.into(),
        o.prob.into(),
        o.truncation_bound.into(),
        o.jump_cap.into(),
        o.rate.into(),
    ]);
    let json = json!({
        "m": m, "x": x, "t": tm.t, "t_phys": tm.t_phys, "prob": o.prob,
        "truncation_bound": o.truncation_bound, "jump_cap": o.jump_cap, "rate": o.rate, "states": o.states,
    });
    Ok(CommandOutput::new(table, json))
}

/// One pairwise comparison in `compare`.
struct Pair {
    a: &'static str,
    b: &'static str,
    va: f64,
    vb: f64,
    scale: f64,
    agree: bool,
}

fn cmd_compare(s: &mut Settings) -> Result<CommandOutput> {
    let (params, m, x) = point(s)?;
    let tm = times(&params, s)?;
    let ncfg = numerics(s)?;
    let scfg = sim_config(s)?;
    let ocfg = oracle_config(s);
    let exact = prob_leq(&params, m, x, tm.t, &ncfg).map_err(|e| attribute("exact", e))?;
    let mc = estimate_prob(&params, m, x, tm.t_phys, &scfg).map_err(|e| attribute("simulate", e))?;
    let mut notes = vec![];
    let oracle = if tm.t_phys <= COMPARE_ORACLE_MAX_T {
        match ctmc_oracle(&params, m, x, tm.t_phys, &ocfg) {
            Ok(o) => Some(o),
            Err(AsepError::StateSpace(n)) => {
                notes.push(format!("oracle skipped: state space passed {n}"));
                None
            }
            Err(e) => return Err(attribute("oracle", e)),
        }
    } else {
        notes.push(format!("oracle skipped: physical time {} above {COMPARE_ORACLE_MAX_T}", tm.t_phys));
        None
    };
    let se = mc.stderr.max(1.0 / mc.trials as f64);
    let mut pairs = vec![Pair {
        a: "exact",
        b: "monte_carlo",
        va: exact.prob,
        vb: mc.p_hat,
        scale: se,
        agree: (exact.prob - mc.p_hat).abs() <= 3.0 * se + exact.err_est,
    }];
    if let Some(o) = &oracle {
        let tol = o.truncation_bound + exact.err_est;
        pairs.push(Pair {
            a: "exact",
            b: "oracle",
            va: exact.prob,
            vb: o.prob,
            scale: tol,
            agree: (exact.prob - o.prob).abs() <= tol + 1e-8,
        });
        pairs.push(Pair {
            a: "monte_carlo",
            b: "oracle",
            va: mc.p_hat,
            vb: o.prob,
            scale: se,
            agree: (mc.p_hat - o.prob).abs() <= 3.0 * se + o.truncation_bound,
        });
    }
    let mut table = Table::new(&["a", "b", "value_a", "value_b", "diff", "scale", "z", "agree"]);
    for p in &pairs {
        let d = p.vb - p.va;
        let z = if p.scale > 0.0 { d / p.scale } else { 0.0 };
        table.push(vec![p.a.into(), p.b.into(), p.va.into(), p.vb.into(), d.into(), p.scale.into(), z.into(), p.agree.into()]);
    }
    let json = json!({
        "m": m, "x": x, "t": tm.t, "t_phys": tm.t_phys,
        "exact": { "prob": exact.prob, "err_est": exact.err_est },
        "monte_carlo": { "p_hat": mc.p_hat, "stderr": mc.stderr, "trials": mc.trials, "seed": scfg.seed },
        "oracle": oracle.map(|o| json!({ "prob": o.prob, "truncation_bound": o.truncation_bound })),
        "pairs": pairs.iter().map(|p| json!({
            "a": p.a, "b": p.b, "diff": p.vb - p.va, "scale": p.scale, "agree": p.agree,
        })).collect::<Vec<_>>(),
        "notes": notes,
    });
    let mut out = CommandOutput::new(table, json);
    out.agree = pairs.iter().all(|p| p.agree);
    out.seed = Some(scfg.seed);
    out.node_counts = json!({ "n_eta": exact.n_eta, "n_lambda": exact.n_lambda });
    out.warnings.extend(mc.truncation_warning);
    Ok(out)
}

fn attribute(backend: &str, e: AsepError) -> AsepError {
    match e {
        AsepError::Parameter(m) => AsepError::Parameter(format!("{backend}: {m}")),
        AsepError::Numerical(m) => AsepError::Numerical(format!("{backend}: {m}")),
        other => other,
    }
}

fn cmd_verify(s: &mut Settings) -> Result<CommandOutput> {
    let ps = s.p_values.get_or_insert_with(|| VERIFY_P.to_vec()).clone();
    let cfg = numerics(s)?;
    let mut table = Table::new(&["p", "check", "error", "tol", "passed"]);
    let mut reports = vec![];
    for p in ps {
        let rep = verify_identities(&make_params(p)?, &cfg);
        for c in &rep.checks {
            table.push(vec![p.into(), c.name.as_str().into(), c.error.into(), c.tol.into(), c.passed.into()]);
        }
        reports.push(rep);
    }
    let agree = reports.iter().all(|r| r.all_passed());
    let mut out = CommandOutput::new(table, json!({ "all_passed": agree, "reports": reports }));
    out.agree = agree;
    out.node_counts = json!({ "n_eta": cfg.n_eta });
    Ok(out)
}

fn cmd_limit(law: LawArg, s: &mut Settings, files: bool) -> Result<CommandOutput> {
    let grid = match s.grid.as_ref().or(s.sweep.as_ref()) {
        Some(g) => Some(parse_sweep(g)?),
        None if files => return param_err("tabulate needs --grid start:stop:step"),
        None => None,
    };
    let lcfg = LimitConfig::default();
    match law {
        LawArg::Thm1 => {
            let (params, m, x) = point(s)?;
            let ts = match grid {
                Some(g) => g,
                None => vec![need(&s.t, "t")?],
            };
            let with_exact = *s.with_exact.get_or_insert(false);
            let ncfg = if with_exact { Some(numerics(s)?) } else { None };
            let mut table = if with_exact {
                Table::new(&["t", "value", "exact", "ratio"])
            } else {
                Table::new(&["t", "value"])
            };
            let mut rows = vec![];
            for &t in &ts {
                let v = theorem1_tail(&params, m, x, t)?.value;
                match &ncfg {
                    Some(c) => {
                        let e = prob_gt(&params, m, x, t, c)?.value;
                        let ratio = if v > 0.0 { e / v } else { f64::NAN };
                        table.push(vec![t.into(), v.into(), e.into(), ratio.into()]);
                        rows.push(json!({ "t": t, "value": v, "exact": e, "ratio": ratio }));
                    }
                    None => {
                        table.push(vec![t.into(), v.into()]);
                        rows.push(json!({ "t": t, "value": v }));
                    }
                }
            }
            let json = json!({ "law": "thm1", "p": params.p, "m": m, "x": x, "rows": rows });
            Ok(CommandOutput::new(table, json))
        }
        LawArg::Crossover | LawArg::F2 => {
            let ss = match grid {
                Some(g) => g,
                None => vec![need(&s.s, "s")?],
            };
            let (tag, params_used, f): (&str, Value, Box<dyn Fn(f64) -> Result<_>>) = if law == LawArg::F2 {
                ("f2", json!({ "n": lcfg.n, "airy_trunc": lcfg.airy_trunc }), Box::new(move |x| f2_cdf(x, &lcfg)))
            } else {
                let params = make_params(need(&s.p, "p")?)?;
                let m = need(&s.m, "m")?;
                (
                    "crossover",
                    json!({ "p": params.p, "m": m, "n": lcfg.n, "gauss_lengths": lcfg.gauss_lengths }),
                    Box::new(move |x| crossover_cdf(&params, m, x, &lcfg)),
                )
            };
            let mut table = Table::new(&["s", "value", "err_est"]);
            let mut rows = vec![];
            for &x in &ss {
                let v = f(x)?;
                table.push(vec![x.into(), v.value.into(), v.err_est.into()]);
                rows.push(json!({ "s": x, "value": v.value, "err_est": v.err_est }));
            }
            let mut out = CommandOutput::new(table, json!({ "law": tag, "params": params_used.clone(), "rows": rows }));
            out.node_counts = json!({ "n": lcfg.n });
            Ok(out)
        }
    }
}

fn cmd_scaled_cdf(s: &mut Settings) -> Result<CommandOutput> {
    let params = make_params(need(&s.p, "p")?)?;
    let sigma = need(&s.sigma, "sigma")?;
    let tm = times(&params, s)?;
    let grid = parse_grid(s.s_grid.get_or_insert_with(|| DEFAULT_S_GRID.to_string()))?;
    let cfg = sim_config(s)?;
    let table_in = empirical_scaled_cdf(&params, sigma, tm.t_phys, &grid, &cfg)?;
    let lcfg = LimitConfig::default();
    let mut table = Table::new(&["s", "value", "err_est", "f2"]);
    let mut rows = vec![];
    for ((&sp, &v), &e) in table_in.s_grid.iter().zip(&table_in.values).zip(&table_in.err_est) {
        let f = f2_cdf(sp, &lcfg)?.value;
        table.push(vec![sp.into(), v.into(), e.into(), f.into()]);
        rows.push(json!({ "s": sp, "value": v, "err_est": e, "f2": f }));
    }
    let json = json!({ "t": tm.t, "t_phys": tm.t_phys, "params_used": table_in.params_used, "rows": rows });
    let mut out = CommandOutput::new(table, json);
    out.seed = Some(cfg.seed);
    Ok(out)
}
