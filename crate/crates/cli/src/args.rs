use std::fmt;

use clap::{Args, ValueEnum};
use osc2d::oscillator::classify_ratio;
use osc2d::series::linear_grid;
use osc2d::trace::{SmoothingSpec, DEFAULT_DAMPING_EPS, DEFAULT_DIVISOR_FLOOR};
use osc2d::{FrequencyClass, OscillatorConfig};
use serde_json::{json, Map, Value};

/// Bad flags or flag combinations; the process exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

fn parse_ratio(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').ok_or("expected K1:K2")?;
    let k1 = a.trim().parse().map_err(|e| format!("bad k1: {e}"))?;
    let k2 = b.trim().parse().map_err(|e| format!("bad k2: {e}"))?;
    Ok((k1, k2))
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err("expected START:STOP:COUNT".into());
    };
    let spec = GridSpec {
        start: start
            .trim()
            .parse()
            .map_err(|e| format!("bad start: {e}"))?,
        stop: stop.trim().parse().map_err(|e| format!("bad stop: {e}"))?,
        count: count
            .trim()
            .parse()
            .map_err(|e| format!("bad count: {e}"))?,
    };
    if spec.count < 2 || !(spec.start < spec.stop) {
        return Err("grid needs START < STOP and COUNT ≥ 2".into());
    }
    Ok(spec)
}

pub fn parse_state(s: &str) -> Result<[f64; 4], String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad component {v:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected q1,p1,q2,p2, got {} values", v.len()))
}

#[derive(Debug, Clone, Args)]
pub struct OscillatorArgs {
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega2: Option<f64>,
    /// Winding numbers with k1·ω1 = k2·ω2 = ω.
    #[arg(long, value_parser = parse_ratio, value_name = "K1:K2", conflicts_with_all = ["omega1", "omega2", "incommensurate"])]
    pub ratio: Option<(u32, u32)>,
    /// Common frequency ω for --ratio, or the frequency of an isotropic oscillator.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Treat --omega1/--omega2 as incommensurate.
    #[arg(long, requires_all = ["omega1", "omega2"])]
    pub incommensurate: bool,
}

impl OscillatorArgs {
    fn specified(&self) -> bool {
        self.omega1.is_some()
            || self.omega2.is_some()
            || self.ratio.is_some()
            || self.omega.is_some()
    }

    pub fn resolve(&self) -> anyhow::Result<OscillatorConfig> {
        let config = match (self.ratio, self.omega1, self.omega2) {
            (Some((k1, k2)), _, _) => {
                OscillatorConfig::commensurate(k1, k2, self.omega.unwrap_or(1.0))
            }
            (None, Some(w1), Some(w2)) if self.incommensurate => {
                OscillatorConfig::incommensurate(w1, w2)
            }
            (None, Some(w1), Some(w2)) if w1 == w2 => OscillatorConfig::isotropic(w1),
            (None, Some(w1), Some(w2)) => {
                let hint = match classify_ratio(w1, w2, 1e-9, 1000) {
                    Ok(FrequencyClass::Commensurate { k1, k2, omega }) => {
                        format!("; these look like --ratio {k1}:{k2} --omega {omega}")
                    }
                    _ => String::new(),
                };
                return usage(format!(
                    "--omega1 and --omega2 differ: pass --ratio K1:K2 with --omega, or --incommensurate{hint}"
                ));
            }
            (None, Some(_), None) | (None, None, Some(_)) => {
                return usage("--omega1 and --omega2 must be given together");
            }
            (None, None, None) => OscillatorConfig::isotropic(self.omega.unwrap_or(1.0)),
        };
        let config = config
            .and_then(|c| c.with_mass(self.mass))
            .and_then(|c| c.with_hbar(self.hbar));
        match config {
            Ok(c) => Ok(c),
            Err(e) => usage(e.to_string()),
        }
    }

    /// As [`OscillatorArgs::resolve`], with `default` when no frequency flag is given.
    pub fn resolve_or(&self, default: (u32, u32)) -> anyhow::Result<OscillatorConfig> {
        if self.specified() {
            self.resolve()
        } else {
            Self {
                ratio: Some(default),
                ..self.clone()
            }
            .resolve()
        }
    }
}

pub fn config_meta(config: &OscillatorConfig) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("regime".into(), json!(config.class().name()));
    meta.insert("mass".into(), json!(config.mass()));
    meta.insert("hbar".into(), json!(config.hbar()));
    meta.insert("omega1".into(), json!(config.omega1()));
    meta.insert("omega2".into(), json!(config.omega2()));
    if let FrequencyClass::Commensurate { k1, k2, omega } = config.class() {
        meta.insert("k1".into(), json!(k1));
        meta.insert("k2".into(), json!(k2));
        meta.insert("omega".into(), json!(omega));
    }
    meta
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    /// Energy grid START:STOP:COUNT [default: 0.05ħω:10ħω:2000].
    #[arg(long, value_parser = parse_grid, value_name = "START:STOP:COUNT", allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Gaussian width [default: 0.02ħω].
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DAMPING_EPS)]
    pub damping_eps: f64,
    #[arg(long, default_value_t = DEFAULT_DIVISOR_FLOOR)]
    pub divisor_floor: f64,
}

impl DensityArgs {
    pub fn grid(&self, config: &OscillatorConfig) -> anyhow::Result<Vec<f64>> {
        let unit = config.energy_unit();
        let spec = self.grid.unwrap_or(GridSpec {
            start: 0.05 * unit,
            stop: 10.0 * unit,
            count: 2000,
        });
        if !(spec.start > 0.0) {
            return usage(format!("grid start must be positive, got {}", spec.start));
        }
        match linear_grid(spec.start, spec.stop, spec.count) {
            Ok(g) => Ok(g),
            Err(e) => usage(e.to_string()),
        }
    }

    pub fn smoothing(&self, config: &OscillatorConfig) -> anyhow::Result<SmoothingSpec> {
        let width = self.sigma.unwrap_or(0.02 * config.energy_unit());
        match SmoothingSpec::new(width)
            .and_then(|s| s.with_damping_eps(self.damping_eps))
            .and_then(|s| s.with_divisor_floor(self.divisor_floor))
        {
            Ok(s) => Ok(s),
            Err(e) => usage(e.to_string()),
        }
    }
}

pub fn density_meta(grid: &[f64], smoothing: &SmoothingSpec) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("grid_start".into(), json!(grid[0]));
    meta.insert("grid_stop".into(), json!(grid[grid.len() - 1]));
    meta.insert("grid_count".into(), json!(grid.len()));
    meta.insert("sigma".into(), json!(smoothing.width()));
    meta.insert("damping_eps".into(), json!(smoothing.damping_eps()));
    meta.insert("divisor_floor".into(), json!(smoothing.divisor_floor()));
    meta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}
