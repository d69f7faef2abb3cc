//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use osc2d::dynamics::{
    conserved_j, folded_state, integrate_numeric, segment_decomposition, stability_factor,
    trajectory_analytic, JVector, PhaseState,
};
use osc2d::oscillator::{exact_levels, partition_function_closed};
use osc2d::series::linear_grid;
use osc2d::symmetry::{self, character_inner_product, character_sum_selection, CyclicProductGroup};
use osc2d::trace::{
    delta_rho_family, delta_rho_reduced, maslov_commensurate_reduced, maslov_isotropic,
    SemiclassicalDos, SmoothingSpec,
};
use osc2d::verify::{
    compare, mid_gap_energies, smoothed_exact_dos_for, smoothed_reduced_exact_dos, staircase,
};
use osc2d::{OscillatorConfig, Result};

const GOLDEN: f64 = 1.618_033_988_749_895;
const DENSITY_TOL: f64 = 1e-5;
const STAIRCASE_TOL: f64 = 1e-4;
const TIME_LIMIT: Duration = Duration::from_secs(10);

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn density_window(config: &OscillatorConfig, w: f64, lo: f64, hi: f64) -> Result<(bool, String)> {
    let start = Instant::now();
    let grid = linear_grid(lo, hi, 8000)?;
    let sc = SemiclassicalDos::for_config(config, &SmoothingSpec::new(w)?)?.series(&grid)?;
    let exact = smoothed_exact_dos_for(config, &grid, w)?;
    let report = compare(&sc, &exact, DENSITY_TOL)?;
    let elapsed = start.elapsed();
    Ok((
        report.pass && elapsed < TIME_LIMIT,
        format!(
            "max error {:.2e} of peak scale at E = {:.4}, {:.2?}",
            report.max_rel_error, report.worst_energy, elapsed
        ),
    ))
}

fn criterion_1() -> Outcome {
    let (ok, detail) = density_window(
        &OscillatorConfig::commensurate(3, 2, 1.0)?,
        0.02,
        0.05,
        10.0,
    )?;
    Ok((ok, format!("3:2 on [0.05, 10], w = 0.02: {detail}")))
}

fn criterion_2() -> Outcome {
    let (a, da) = density_window(&OscillatorConfig::isotropic(1.0)?, 0.05, 0.5, 20.0)?;
    let (b, db) = density_window(
        &OscillatorConfig::incommensurate(1.0, GOLDEN)?,
        0.05,
        0.5,
        15.0,
    )?;
    Ok((a && b, format!("isotropic: {da}; golden: {db}")))
}

/// Exact count against the integrated broadened series at every mid-gap
/// point. Half of the smallest gap is at least eight widths.
fn criterion_3() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, config) in [
        ("3:2", OscillatorConfig::commensurate(3, 2, 1.0)?),
        ("isotropic", OscillatorConfig::isotropic(1.0)?),
        ("golden", OscillatorConfig::incommensurate(1.0, GOLDEN)?),
    ] {
        let levels = exact_levels(&config, 11.0);
        let energies: Vec<f64> = levels.iter().map(|l| l.energy).collect();
        let gap = std::iter::once(0.0)
            .chain(energies.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(f64::INFINITY, f64::min);
        let model = SemiclassicalDos::for_config(&config, &SmoothingSpec::new(gap / 16.0)?)?;
        let mut worst = 0.0f64;
        let points = mid_gap_energies(&levels, 10.0);
        for &e in &points {
            let count: u64 = levels
                .iter()
                .filter(|l| l.energy <= e)
                .map(|l| l.degeneracy)
                .sum();
            assert_eq!(count, staircase(&levels, e));
            worst = worst.max((model.integrated(e) - count as f64).abs());
        }
        ok &= worst <= STAIRCASE_TOL && !points.is_empty();
        details.push(format!("{name} {} points max {:.1e}", points.len(), worst));
    }
    Ok((ok, details.join("; ")))
}

fn criterion_4() -> Outcome {
    let w = 0.02;
    let config = OscillatorConfig::commensurate(3, 2, 1.0)?;
    let model = SemiclassicalDos::for_config(&config, &SmoothingSpec::new(w)?)?;
    let grid = linear_grid(0.01, 1.0, 99_001)?;
    let total = model.series(&grid)?;
    let v = total.values();
    let floor = 1e-3 * total.max_value();
    let first = (1..v.len() - 1)
        .find(|&i| v[i] > floor && v[i] >= v[i - 1] && v[i] >= v[i + 1])
        .map(|i| grid[i]);
    let Some(first) = first else {
        return Ok((false, "no peak found".into()));
    };
    let peak = model.evaluate(5.0 / 12.0);
    let suppression = [1.0 / 12.0, 0.25]
        .iter()
        .map(|&e| model.evaluate(e).abs() / peak)
        .fold(0.0, f64::max);
    Ok((
        (first - 5.0 / 12.0).abs() <= w / 10.0 && suppression < 1e-6,
        format!(
            "first peak at E = {first:.5} (5/12 = {:.5}), |ρ|/peak at 1/12, 1/4 ≤ {suppression:.1e}",
            5.0 / 12.0
        ),
    ))
}

fn criterion_5() -> Outcome {
    let w = 0.02;
    let config = OscillatorConfig::commensurate(3, 2, 1.0)?;
    let smoothing = SmoothingSpec::new(w)?;
    let grid = linear_grid(0.05, 8.0, 8000)?;
    let mut ok = true;
    let mut details = Vec::new();
    for irrep in config.group().unwrap().irreps() {
        let sc = SemiclassicalDos::reduced(&config, irrep, &smoothing)?.series(&grid)?;
        let exact = smoothed_reduced_exact_dos(&config, irrep, &grid, w)?;
        let r = compare(&sc, &exact, DENSITY_TOL)?;
        ok &= r.pass;
        details.push(format!(
            "({},{}) {:.1e}",
            irrep.lambda1, irrep.lambda2, r.max_rel_error
        ));
    }
    Ok((
        ok,
        format!("max error of peak scale per irrep: {}", details.join(", ")),
    ))
}

fn det_minus_identity(omega: f64, m: f64, t: f64) -> f64 {
    let (s, c) = (omega * t).sin_cos();
    let (a, b, cc, d) = (c, s / (m * omega), -m * omega * s, c);
    (a - 1.0) * (d - 1.0) - b * cc
}

fn bracket(f: &dyn Fn(&PhaseState) -> f64, g: &dyn Fn(&PhaseState) -> f64, s: &PhaseState) -> f64 {
    let h = 1e-4;
    let grad = |f: &dyn Fn(&PhaseState) -> f64| {
        let x = s.as_array();
        let mut out = [0.0; 4];
        for i in 0..4 {
            let (mut up, mut down) = (x, x);
            up[i] += h;
            down[i] -= h;
            out[i] =
                (f(&PhaseState::from_array(up)) - f(&PhaseState::from_array(down))) / (2.0 * h);
        }
        out
    };
    let (df, dg) = (grad(f), grad(g));
    df[0] * dg[1] - df[1] * dg[0] + df[2] * dg[3] - df[3] * dg[2]
}

fn casimir_residual(states: &[PhaseState]) -> f64 {
    states
        .iter()
        .map(|s| {
            let e = 0.5 * (s.p1 * s.p1 + s.q1 * s.q1 + s.p2 * s.p2 + s.q2 * s.q2);
            (conserved_j(s, 1.0, 1.0).norm_sqr() - (e / 2.0).powi(2)).abs()
        })
        .fold(0.0, f64::max)
}

/// Broadened closed-form family sum written out term by term.
fn family_oracle(k1: u32, k2: u32, e: f64, w: f64) -> f64 {
    let order = f64::from(k1 * k2);
    let c1 = 2.0 * order;
    (1..)
        .map(|k| {
            let alpha = TAU * k as f64 * order;
            let damping = (-0.5 * (alpha * w).powi(2)).exp();
            let sign = if (k * (k1 + k2)).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            (
                damping,
                sign * damping
                    * (c1 * e * (alpha * e).cos() - c1 * alpha * w * w * (alpha * e).sin()),
            )
        })
        .take_while(|(d, _)| *d > 1e-18)
        .map(|(_, v)| v)
        .sum()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut failures = Vec::new();

    let mut stab = 0.0f64;
    for _ in 0..1000 {
        let (other, orbit, r) = (
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(1..20u64),
        );
        let numeric = det_minus_identity(other, 1.0, r as f64 * TAU / orbit)
            .abs()
            .sqrt();
        stab = stab.max((stability_factor(other, orbit, r) - numeric).abs());
    }
    if stab > 1e-10 {
        failures.push(format!("stability {stab:.1e}"));
    }

    let mut pb = 0.0f64;
    let j = |i: usize| move |s: &PhaseState| conserved_j(s, 1.0, 1.0).as_array()[i];
    let h1 = |s: &PhaseState| 0.5 * (s.p1 * s.p1 + s.q1 * s.q1);
    let h2 = |s: &PhaseState| 0.5 * (s.p2 * s.p2 + s.q2 * s.q2);
    for _ in 0..100 {
        let s = PhaseState::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let jv = conserved_j(&s, 1.0, 1.0).as_array();
        for i in 0..3 {
            pb = pb.max((bracket(&j(i), &j((i + 1) % 3), &s) - jv[(i + 2) % 3]).abs());
        }
        pb = pb.max((bracket(&h1, &j(0), &s) - jv[1]).abs());
        pb = pb.max((bracket(&h2, &j(0), &s) + jv[1]).abs());
    }
    if pb > 1e-7 {
        failures.push(format!("poisson {pb:.1e}"));
    }

    let iso = OscillatorConfig::isotropic(1.0)?;
    let init = PhaseState::new(0.8, -0.3, 0.2, 0.9);
    let times: Vec<f64> = (0..=2000).map(|i| i as f64 * TAU / 1000.0).collect();
    let cas_a = casimir_residual(&trajectory_analytic(&iso, init, &times));
    let cas_l = casimir_residual(&integrate_numeric(&iso, init, TAU / 1e4, 20_000)?);
    if cas_a > 1e-10 || cas_l > 1e-8 {
        failures.push(format!("casimir {cas_a:.1e}/{cas_l:.1e}"));
    }

    for (k1, k2) in [(3, 2), (5, 4), (5, 3), (7, 2)] {
        let g = CyclicProductGroup::new(k1, k2)?;
        let irreps: Vec<_> = g.irreps().collect();
        for a in &irreps {
            for b in &irreps {
                let mut sum = Complex64::new(0.0, 0.0);
                for s in 0..g.order() as i64 {
                    sum += symmetry::character(*a, &g, s)? * symmetry::character(*b, &g, s)?.conj();
                }
                let expected = i64::from(a == b);
                if character_inner_product(*a, *b, &g)? != expected
                    || (sum / g.order() as f64 - expected as f64).norm() > 1e-12
                {
                    failures.push(format!("orthogonality {a:?} {b:?}"));
                }
            }
        }
        for r in 1..=120i64 {
            let mut brute = Complex64::new(0.0, 0.0);
            for a in &irreps {
                brute += symmetry::character(*a, &g, -r)?;
            }
            let expected = if r % g.order() as i64 == 0 {
                g.order() as i64
            } else {
                0
            };
            if character_sum_selection(r, &g) != expected
                || (brute.re - expected as f64).abs() > 1e-9
            {
                failures.push(format!("selection k=({k1},{k2}) r={r}"));
            }
        }
    }

    let mut irrep_sum = 0.0f64;
    for (k1, k2) in [(3, 2), (5, 4)] {
        let c = OscillatorConfig::commensurate(k1, k2, 1.0)?;
        for _ in 0..50 {
            let e = rng.gen_range(0.05..10.0);
            let s = SmoothingSpec::new(rng.gen_range(0.01..0.2))?;
            let mut sum = 0.0;
            for irrep in c.group().unwrap().irreps() {
                sum += delta_rho_reduced(&c, irrep, e, &s)?;
            }
            let oracle = family_oracle(k1, k2, e, s.width());
            let closed = delta_rho_family(&c, e, &s)?;
            let scale = 1.0 + oracle.abs();
            irrep_sum = irrep_sum
                .max((sum - oracle).abs() / scale)
                .max((closed - oracle).abs() / scale);
        }
    }
    if irrep_sum > 1e-10 {
        failures.push(format!("irrep sum {irrep_sum:.1e}"));
    }

    for r in 1..=10_000u64 {
        if maslov_commensurate_reduced(r, 1, 1) != (4 * r as i64 - 1).into()
            || maslov_isotropic(r) != 4 * r as i64 - 1
        {
            failures.push(format!("maslov r={r}"));
            break;
        }
    }

    let mut part = 0.0f64;
    for (w1, w2) in [(1.0, 1.0), (1.0 / 3.0, 0.5), (1.0, GOLDEN)] {
        let config = if w1 == w2 {
            OscillatorConfig::isotropic(w1)?
        } else if w2 == GOLDEN {
            OscillatorConfig::incommensurate(w1, w2)?
        } else {
            OscillatorConfig::commensurate(3, 2, 1.0)?
        };
        for beta in [0.5, 1.0, 2.0, 3.0] {
            let mut z = 0.0;
            for n1 in 0..2000 {
                for n2 in 0..2000 {
                    z += (-beta * (w1 * (n1 as f64 + 0.5) + w2 * (n2 as f64 + 0.5))).exp();
                }
            }
            let closed = partition_function_closed(&config, beta)?;
            part = part.max((z - closed).abs() / closed);
        }
    }
    if part > 1e-10 {
        failures.push(format!("partition {part:.1e}"));
    }

    Ok((
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "stability {stab:.1e}, poisson {pb:.1e}, casimir {cas_a:.1e}/{cas_l:.1e}, irrep sum {irrep_sum:.1e}, partition {part:.1e}"
            )
        } else {
            failures.join("; ")
        },
    ))
}

fn criterion_7() -> Outcome {
    let w = 0.05;
    let model = SemiclassicalDos::one_dimensional(1.0, 1.0, &SmoothingSpec::new(w)?);
    let grid = linear_grid(0.0, 10.0, 20_001)?;
    let h = grid[1] - grid[0];
    let mut weight_err = 0.0f64;
    for n in 0..9 {
        let centre = n as f64 + 0.5;
        // trapezoid over one full cell around the peak
        let weight: f64 = grid
            .iter()
            .filter(|&&e| e > centre - 0.5 + 1e-9 && e < centre + 0.5 - 1e-9)
            .map(|&e| model.evaluate(e) * h)
            .sum();
        weight_err = weight_err.max((weight - 1.0).abs());
        let height = model.evaluate(centre) * w * (2.0 * PI).sqrt();
        weight_err = weight_err.max((height - 1.0).abs());
    }
    let gap = (1..10)
        .map(|n| model.evaluate(n as f64).abs())
        .fold(0.0, f64::max);
    Ok((
        weight_err < 1e-6 && gap < 1e-6,
        format!("peak weight error {weight_err:.1e}, mid-gap max {gap:.1e}"),
    ))
}

fn j_diff(a: JVector, b: JVector) -> f64 {
    (a.j1 - b.j1)
        .abs()
        .max((a.j2 - b.j2).abs())
        .max((a.j3 - b.j3).abs())
}

fn criterion_8() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (k1, k2) in [(3u32, 2u32), (5, 4)] {
        let config = OscillatorConfig::commensurate(k1, k2, 1.0)?;
        let init = PhaseState::new(0.7, 0.4, -0.5, 0.9);
        let segments = segment_decomposition(&config, init)?;
        let period = TAU;
        let mut closure = 0.0f64;
        let mut drift = 0.0f64;
        for seg in &segments {
            let times: Vec<f64> = (0..=40)
                .map(|i| seg.t_start + (seg.t_end - seg.t_start) * i as f64 / 40.0)
                .collect();
            let folded: Vec<PhaseState> = trajectory_analytic(&config, init, &times)
                .iter()
                .map(|s| folded_state(&config, s))
                .collect::<Result<_>>()?;
            let j0 = conserved_j(&folded[0], 1.0, 1.0);
            for f in &folded {
                drift = drift.max(j_diff(conserved_j(f, 1.0, 1.0), j0));
            }
            let later = trajectory_analytic(&config, init, &[seg.t_start + period])[0];
            let back = folded_state(&config, &later)?;
            closure = closure.max(
                back.as_array()
                    .iter()
                    .zip(folded[0].as_array())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            );
        }
        let count_ok = segments.len() as u32 == k1 * k2;
        ok &= count_ok && closure <= 1e-8 && drift <= 1e-8;
        details.push(format!(
            "({k1},{k2}) {} segments, closure {closure:.1e}, J drift {drift:.1e}",
            segments.len()
        ));
    }
    Ok((ok, details.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 commensurate 3:2 density exact", criterion_1),
        (
            "2 isotropic and incommensurate densities exact",
            criterion_2,
        ),
        ("3 staircase at mid-gap energies", criterion_3),
        ("4 ground state at 5/12 and peak cancellation", criterion_4),
        ("5 reduced spectra per irrep", criterion_5),
        ("6 identity suite", criterion_6),
        ("7 one-dimensional comb", criterion_7),
        ("8 folding and segments", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let (pass, detail) = match run() {
            Ok(outcome) => outcome,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
