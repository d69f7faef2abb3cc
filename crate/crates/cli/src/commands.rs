use std::f64::consts::TAU;
use std::path::PathBuf;

use anyhow::bail;
use clap::{Args, ValueEnum};
use serde_json::{json, Map, Value};

use osc2d::dynamics::{
    action_angle, bloch_point, conserved_j, folded_state, segment_decomposition,
    trajectory_analytic, PhaseState,
};
use osc2d::oscillator::exact_levels;
use osc2d::series::Contribution;
use osc2d::symmetry::Irrep;
use osc2d::trace::{maslov_commensurate_reduced, SemiclassicalDos};
use osc2d::verify::{compare, smoothed_exact_dos_for, smoothed_reduced_exact_dos, suite};
use osc2d::{FrequencyClass, OscillatorConfig};

use crate::args::{
    config_meta, density_meta, parse_state, usage, DensityArgs, Format, OscillatorArgs, OutputArgs,
};
use crate::output::{emit, emit_to, Cell, Table};

fn meta_for(command: &str, config: &OscillatorConfig) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("command".into(), json!(command));
    meta.extend(config_meta(config));
    meta
}

fn float_columns(table: &mut Table, grid: &[f64], columns: &[Vec<f64>]) {
    for (i, &e) in grid.iter().enumerate() {
        let mut row = vec![Cell::Float(e)];
        row.extend(columns.iter().map(|c| Cell::Float(c[i])));
        table.push(row);
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    /// Largest energy to list.
    #[arg(long, allow_hyphen_values = true)]
    pub emax: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn spectrum(args: &SpectrumArgs) -> anyhow::Result<()> {
    let config = args.oscillator.resolve()?;
    let mut meta = meta_for("spectrum", &config);
    meta.insert("emax".into(), json!(args.emax));
    let mut table = Table::new(
        meta,
        &["energy", "degeneracy", "lambda1", "lambda2", "members"],
    );
    for level in exact_levels(&config, args.emax) {
        let (l1, l2) = match level.irrep {
            Some(irrep) => (
                Cell::Int(irrep.lambda1.into()),
                Cell::Int(irrep.lambda2.into()),
            ),
            None => (Cell::Empty, Cell::Empty),
        };
        let members = level
            .members
            .iter()
            .map(|(a, b)| format!("{a}:{b}"))
            .collect::<Vec<_>>()
            .join(" ");
        table.push(vec![
            Cell::Float(level.energy),
            Cell::Int(level.degeneracy as i64),
            l1,
            l2,
            Cell::Text(members),
        ]);
    }
    emit(&table, args.output.format, args.output.out.as_deref())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DosMode {
    Exact,
    Semiclassical,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Term {
    Classical,
    Family,
    Isolated,
}

#[derive(Debug, Args)]
pub struct DosArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long, value_enum, default_value_t = DosMode::Both)]
    pub mode: DosMode,
    /// Semiclassical component columns to emit.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Term::Classical, Term::Family, Term::Isolated])]
    pub terms: Vec<Term>,
    /// Tolerance reported for the exact/semiclassical comparison.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn component_for(term: Term, config: &OscillatorConfig) -> Vec<Contribution> {
    match (term, config.class()) {
        (Term::Classical, _) => vec![Contribution::Classical],
        (Term::Family, FrequencyClass::Isotropic) => vec![Contribution::IsotropicFamily],
        (Term::Family, FrequencyClass::Commensurate { .. }) => vec![Contribution::LissajousFamily],
        (Term::Family, FrequencyClass::Incommensurate) => vec![],
        (Term::Isolated, FrequencyClass::Isotropic) => vec![],
        (Term::Isolated, FrequencyClass::Commensurate { .. }) => {
            vec![
                Contribution::IsolatedOrbits(1),
                Contribution::IsolatedOrbits(2),
            ]
        }
        (Term::Isolated, FrequencyClass::Incommensurate) => {
            vec![
                Contribution::NormalModeOrbits(1),
                Contribution::NormalModeOrbits(2),
            ]
        }
    }
}

pub fn dos(args: &DosArgs) -> anyhow::Result<()> {
    let config = args.oscillator.resolve()?;
    let grid = args.density.grid(&config)?;
    let smoothing = args.density.smoothing(&config)?;
    let mut meta = meta_for("dos", &config);
    meta.extend(density_meta(&grid, &smoothing));
    meta.insert(
        "mode".into(),
        json!(format!("{:?}", args.mode).to_lowercase()),
    );

    let mut names = vec!["energy".to_string()];
    let mut columns = Vec::new();
    let exact = if args.mode != DosMode::Semiclassical {
        let series = smoothed_exact_dos_for(&config, &grid, smoothing.width())?;
        names.push("exact_smoothed".into());
        columns.push(series.values().to_vec());
        Some(series)
    } else {
        None
    };
    if args.mode != DosMode::Exact {
        let model = SemiclassicalDos::for_config(&config, &smoothing)?;
        let mut seen = Vec::new();
        for &term in &args.terms {
            let parts = component_for(term, &config);
            if parts.is_empty() || seen.contains(&term) {
                continue;
            }
            seen.push(term);
            let values = grid
                .iter()
                .map(|&e| {
                    parts
                        .iter()
                        .filter_map(|&c| model.evaluate_component(c, e))
                        .sum()
                })
                .collect();
            names.push(format!("{term:?}").to_lowercase());
            columns.push(values);
        }
        let total = model.series(&grid)?;
        meta.insert("contributions".into(), json!(model.contributions()));
        names.push("total_sc".into());
        columns.push(total.values().to_vec());
        if let Some(exact) = &exact {
            let report = compare(&total, exact, args.tol)?;
            let scale = total.max_value().max(exact.max_value());
            names.push("rel_discrepancy".into());
            columns.push(
                total
                    .values()
                    .iter()
                    .zip(exact.values())
                    .map(|(a, b)| (a - b).abs() / scale)
                    .collect(),
            );
            meta.insert("comparison".into(), serde_json::to_value(&report)?);
        }
    }
    let mut table = Table::with_columns(meta, names);
    float_columns(&mut table, &grid, &columns);
    emit(&table, args.output.format, args.output.out.as_deref())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct ReducedDosArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub lambda1: u32,
    #[arg(long)]
    pub lambda2: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn require_commensurate(
    config: &OscillatorConfig,
) -> anyhow::Result<osc2d::symmetry::CyclicProductGroup> {
    match config.class() {
        FrequencyClass::Commensurate { .. } => Ok(config.group().expect("commensurate")),
        other => usage(format!(
            "this command needs a commensurate oscillator (--ratio K1:K2), got {}",
            other.name()
        )),
    }
}

pub fn reduced_dos(args: &ReducedDosArgs) -> anyhow::Result<()> {
    let config = args.oscillator.resolve()?;
    let group = require_commensurate(&config)?;
    let irrep = match Irrep::new(args.lambda1, args.lambda2, &group) {
        Ok(i) => i,
        Err(e) => return usage(e.to_string()),
    };
    let grid = args.density.grid(&config)?;
    let smoothing = args.density.smoothing(&config)?;
    let model = SemiclassicalDos::reduced(&config, irrep, &smoothing)?;
    let exact = smoothed_reduced_exact_dos(&config, irrep, &grid, smoothing.width())?;

    let mut meta = meta_for("reduced-dos", &config);
    meta.extend(density_meta(&grid, &smoothing));
    meta.insert("lambda1".into(), json!(irrep.lambda1));
    meta.insert("lambda2".into(), json!(irrep.lambda2));
    meta.insert(
        "zeta".into(),
        json!(osc2d::symmetry::zeta(irrep, &group)?.to_string()),
    );

    let classical: Vec<f64> = grid
        .iter()
        .map(|&e| {
            model
                .evaluate_component(Contribution::ReducedClassical(irrep), e)
                .unwrap_or(0.0)
        })
        .collect();
    let family: Vec<f64> = grid
        .iter()
        .map(|&e| {
            model
                .evaluate_component(Contribution::ReducedFamily(irrep), e)
                .unwrap_or(0.0)
        })
        .collect();
    let total = model.series(&grid)?;
    let mut table = Table::new(
        meta,
        &[
            "energy",
            "classical_reduced",
            "family_reduced",
            "total_sc_reduced",
            "exact_reduced_smoothed",
        ],
    );
    float_columns(
        &mut table,
        &grid,
        &[
            classical,
            family,
            total.values().to_vec(),
            exact.values().to_vec(),
        ],
    );
    emit(&table, args.output.format, args.output.out.as_deref())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct Figure3Args {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Directory receiving figure3_a, figure3_b and figure3_c.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

pub fn figure3(args: &Figure3Args) -> anyhow::Result<()> {
    let config = args.oscillator.resolve_or((3, 2))?;
    let group = require_commensurate(&config)?;
    let grid = args.density.grid(&config)?;
    let smoothing = args.density.smoothing(&config)?;
    let mut shared = meta_for("figure3", &config);
    shared.extend(density_meta(&grid, &smoothing));
    let ext = match args.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    std::fs::create_dir_all(&args.out_dir)?;

    // panel a: classical + family, one series per symmetry sector
    let mut names = vec!["energy".to_string()];
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut sum = vec![0.0; grid.len()];
    for irrep in group.irreps() {
        let series = SemiclassicalDos::reduced(&config, irrep, &smoothing)?.series(&grid)?;
        for (s, v) in sum.iter_mut().zip(series.values()) {
            *s += v;
        }
        names.push(format!("irrep_{}_{}", irrep.lambda1, irrep.lambda2));
        columns.push(series.values().to_vec());
    }
    names.push("sum".into());
    columns.push(sum);
    let mut meta = shared.clone();
    meta.insert("panel".into(), json!("a"));
    let mut panel_a = Table::with_columns(meta, names);
    float_columns(&mut panel_a, &grid, &columns);

    // panel b: isolated orbits
    let model = SemiclassicalDos::for_config(&config, &smoothing)?;
    let iso1 = model.component_series(Contribution::IsolatedOrbits(1), &grid)?;
    let iso2 = model.component_series(Contribution::IsolatedOrbits(2), &grid)?;
    let both: Vec<f64> = iso1
        .values()
        .iter()
        .zip(iso2.values())
        .map(|(a, b)| a + b)
        .collect();
    let mut meta = shared.clone();
    meta.insert("panel".into(), json!("b"));
    let mut panel_b = Table::new(
        meta,
        &["energy", "isolated_1", "isolated_2", "isolated_total"],
    );
    float_columns(
        &mut panel_b,
        &grid,
        &[iso1.values().to_vec(), iso2.values().to_vec(), both],
    );

    // panel c: total against the exact spectrum
    let total = model.series(&grid)?;
    let exact = smoothed_exact_dos_for(&config, &grid, smoothing.width())?;
    let report = compare(&total, &exact, args.tol)?;
    let mut meta = shared;
    meta.insert("panel".into(), json!("c"));
    meta.insert("comparison".into(), serde_json::to_value(&report)?);
    let mut panel_c = Table::new(meta, &["energy", "total_sc", "exact_smoothed"]);
    float_columns(
        &mut panel_c,
        &grid,
        &[total.values().to_vec(), exact.values().to_vec()],
    );

    for (name, table) in [("a", &panel_a), ("b", &panel_b), ("c", &panel_c)] {
        let path = args.out_dir.join(format!("figure3_{name}.{ext}"));
        emit(table, args.format, Some(&path))?;
    }
    if !report.pass {
        bail!(
            "panel c differs from the smoothed exact density by {:.3e} of peak scale (tolerance {:e})",
            report.max_rel_error,
            args.tol
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    /// Initial state q1,p1,q2,p2.
    #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
    pub init: [f64; 4],
    /// Final time [default: one full period, or 10 periods of mode 1 if incommensurate].
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    /// Add the torus-cell label of each sample.
    #[arg(long)]
    pub segments: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn angle(mode: (f64, f64), m: f64, k: u32, omega: f64) -> f64 {
    action_angle(mode, m, k, omega)
        .map(|(_, t)| t)
        .unwrap_or(0.0)
}

pub fn trajectory(args: &TrajectoryArgs) -> anyhow::Result<()> {
    let config = args.oscillator.resolve()?;
    if args.samples < 2 {
        return usage("--samples must be at least 2");
    }
    let init = PhaseState::from_array(args.init);
    if !init.is_finite() {
        return usage("--init must be finite");
    }
    let t_max = match (args.t_max, config.winding()) {
        (Some(t), _) => t,
        (None, Some((k1, k2))) => TAU * f64::from(k1 * k2) / config.omega_ref(),
        (None, None) => 10.0 * TAU / config.omega1(),
    };
    if !(t_max > 0.0 && t_max.is_finite()) {
        return usage(format!("--t-max must be positive, got {t_max}"));
    }
    let segments = if args.segments {
        if config.winding().is_none() {
            return usage("--segments needs a commensurate or isotropic oscillator");
        }
        Some(segment_decomposition(&config, init)?)
    } else {
        None
    };

    let mut meta = meta_for("trajectory", &config);
    meta.insert("init".into(), json!(args.init));
    meta.insert("t_max".into(), json!(t_max));
    meta.insert("samples".into(), json!(args.samples));
    if let Some(s) = &segments {
        meta.insert("segments".into(), json!(s.len()));
    }
    let mut names = vec!["t", "q1", "p1", "q2", "p2", "theta1", "theta2"];
    if segments.is_some() {
        names.extend(["cell_lambda1", "cell_lambda2"]);
    }
    let mut table = Table::new(meta, &names);

    let times: Vec<f64> = (0..args.samples)
        .map(|i| t_max * i as f64 / (args.samples - 1) as f64)
        .collect();
    let (k1, k2) = config.winding().unwrap_or((1, 1));
    let (w1, w2) = (
        f64::from(k1) * config.omega1(),
        f64::from(k2) * config.omega2(),
    );
    let m = config.mass();
    let slice = TAU / config.omega_ref();
    for (&t, s) in times.iter().zip(trajectory_analytic(&config, init, &times)) {
        let mut row = vec![
            Cell::Float(t),
            Cell::Float(s.q1),
            Cell::Float(s.p1),
            Cell::Float(s.q2),
            Cell::Float(s.p2),
            Cell::Float(angle(s.mode1(), m, k1, w1)),
            Cell::Float(angle(s.mode2(), m, k2, w2)),
        ];
        if let Some(segs) = &segments {
            let j = ((t / slice).floor() as usize) % segs.len();
            row.push(Cell::Int(segs[j].cell.0.into()));
            row.push(Cell::Int(segs[j].cell.1.into()));
        }
        table.push(row);
    }
    emit(&table, args.output.format, args.output.out.as_deref())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct BlochArgs {
    #[command(flatten)]
    pub oscillator: OscillatorArgs,
    /// State q1,p1,q2,p2.
    #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
    pub init: [f64; 4],
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn bloch(args: &BlochArgs) -> anyhow::Result<()> {
    let config = args.oscillator.resolve()?;
    if config.winding().is_none() {
        return usage("bloch needs an isotropic or commensurate oscillator");
    }
    let state = PhaseState::from_array(args.init);
    // commensurate states are mapped onto the isotropic oscillator first
    let folded = folded_state(&config, &state)?;
    let (m, omega) = (config.mass(), config.omega_ref());
    let point = bloch_point(&folded, m, omega)?;
    let j = conserved_j(&folded, m, omega);
    let mut meta = meta_for("bloch", &config);
    meta.insert("init".into(), json!(args.init));
    let mut table = Table::new(meta, &["x", "y", "z", "j1", "j2", "j3", "energy"]);
    table.push(vec![
        Cell::Float(point[0]),
        Cell::Float(point[1]),
        Cell::Float(point[2]),
        Cell::Float(j.j1),
        Cell::Float(j.j2),
        Cell::Float(j.j3),
        Cell::Float(state.energy(&config)),
    ]);
    emit(&table, args.output.format, args.output.out.as_deref())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Dos,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mutation {
    /// Flips the sign of the constant in the reduced Maslov index.
    MaslovSign,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, value_enum, hide = true)]
    pub mutate: Option<Mutation>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn maslov_sign_mutant(r: u64, k1: u32, k2: u32) -> osc2d::phase::Rational {
    maslov_commensurate_reduced(r, k1, k2) + 2
}

/// Returns whether every check passed.
pub fn verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    if !(args.tol > 0.0) {
        return usage("--tol must be positive");
    }
    let options = suite::SuiteOptions {
        tolerance: args.tol,
        reduced_maslov: match args.mutate {
            Some(Mutation::MaslovSign) => maslov_sign_mutant,
            None => maslov_commensurate_reduced,
        },
    };
    let start = std::time::Instant::now();
    let checks = match args.suite {
        Suite::Identities => suite::identities(&options),
        Suite::Dos => suite::dos(&options),
        Suite::All => suite::all(&options),
    };
    let passed = checks.iter().all(|c| c.passed);
    let report = json!({
        "meta": {
            "command": "verify",
            "suite": format!("{:?}", args.suite).to_lowercase(),
            "tolerance": args.tol,
        },
        "passed": passed,
        "checks": checks,
    });
    emit_to(args.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })?;
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!("FAILED {}: {}", c.name, c.detail);
    }
    eprintln!(
        "{} of {} checks passed in {:.2?}",
        checks.iter().filter(|c| c.passed).count(),
        checks.len(),
        start.elapsed()
    );
    Ok(passed)
}
