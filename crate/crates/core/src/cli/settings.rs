use std::path::Path;

use serde::{Deserialize, Serialize};

use super::args::{Cli, Command, Format, LawPointArgs, McArgs, PointArgs};
use crate::error::{param_err, AsepError, Result};

/// Every knob the commands read. Flags override a JSON config file, which
/// overrides the built-in defaults; the filled-in copy goes into the manifest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_particles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub serial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jump_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub with_exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_JUMP_CAP: usize = 60;

macro_rules! overlay {
    ($dst:expr, $src:expr; $($f:ident),*) => {
        $( if let Some(v) = $src.$f.clone() { $dst.$f = Some(v); } )*
    };
}

fn flag(dst: &mut Option<bool>, on: bool) {
    if on {
        *dst = Some(true);
    }
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| AsepError::Parameter(format!("config {}: {e}", path.display())))
    }

    fn point(&mut self, a: &PointArgs) {
        overlay!(self, a; p, m, x, t);
        flag(&mut self.wall_time, a.wall_time);
    }

    fn mc(&mut self, a: &McArgs) {
        overlay!(self, a; trials, seed, n_particles);
        flag(&mut self.serial, a.serial);
    }

    fn law(&mut self, a: &LawPointArgs) {
        overlay!(self, a; p, m, x, t, s, sweep);
        flag(&mut self.with_exact, a.with_exact);
    }

    /// Apply the flags of `cli` on top of `self`.
    pub fn overlay_cli(&mut self, cli: &Cli) {
        overlay!(self, cli; format, bits, threads);
        match &cli.command {
            Command::Exact(a) => {
                self.point(&a.point);
                overlay!(self, a; nodes);
            }
            Command::Simulate(a) => {
                self.point(&a.point);
                self.mc(&a.mc);
            }
            Command::Oracle(a) => {
                self.point(&a.point);
                overlay!(self, a; jump_cap);
            }
            Command::Compare(a) => {
                self.point(&a.point);
                self.mc(&a.mc);
                overlay!(self, a; jump_cap, nodes);
            }
            Command::Verify(a) => {
                if !a.p.is_empty() {
                    self.p_values = Some(a.p.clone());
                }
                overlay!(self, a; nodes);
            }
            Command::Limit(a) => self.law(&a.point),
            Command::Tabulate(a) => {
                self.law(&a.point);
                overlay!(self, a; grid);
            }
            Command::ScaledCdf(a) => {
                overlay!(self, a; p, sigma, t, s_grid);
                flag(&mut self.wall_time, a.wall_time);
                self.mc(&a.mc);
            }
        }
    }

    /// Config file (if any) overlaid by flags.
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let mut s = match &cli.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        s.overlay_cli(cli);
        Ok(s)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn bits(&self) -> u32 {
        self.bits.unwrap_or(53)
    }
}

pub fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    match v {
        Some(v) => Ok(v.clone()),
        None => param_err(format!("missing --{name} (flag or config key \"{name}\")")),
    }
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| AsepError::Parameter(format!("sweep {spec:?}: {e}")))?;
    let [a, b, h] = nums[..] else {
        return param_err(format!("sweep {spec:?} is not start:stop:step"));
    };
    if !(h > 0.0 && b >= a && a.is_finite() && b.is_finite()) {
        return param_err(format!("sweep {spec:?} needs step > 0 and stop >= start"));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return param_err(format!("sweep {spec:?} has too many points"));
    }
    Ok((0..=n).map(|k| a + k as f64 * h).collect())
}

/// A sweep, or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    if spec.contains(':') {
        return parse_sweep(spec);
    }
    let v: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| AsepError::Parameter(format!("grid {spec:?}: {e}")))?;
    if v.is_empty() || v.iter().any(|s| !s.is_finite()) {
        return param_err(format!("grid {spec:?} is empty or not finite"));
    }
    Ok(v)
}
