//! Exact reference densities and the metrics used to compare them with the
//! periodic-orbit sums.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{exact_levels, Level, OscillatorConfig};
use crate::series::{check_grid, DosSeries, Provenance};
use crate::symmetry::Irrep;
use crate::trace::{SemiclassicalDos, SmoothingSpec};

/// Gaussians are summed out to this many widths; beyond it they vanish in f64.
const GAUSSIAN_WINDOW: f64 = 40.0;

pub fn gaussian(x: f64, w: f64) -> f64 {
    (-0.5 * (x / w).powi(2)).exp() / (w * TAU.sqrt())
}

fn smoothed_levels(levels: &[Level], energy: f64, w: f64) -> f64 {
    let lo = levels.partition_point(|l| l.energy < energy - GAUSSIAN_WINDOW * w);
    levels[lo..]
        .iter()
        .take_while(|l| l.energy <= energy + GAUSSIAN_WINDOW * w)
        .map(|l| l.degeneracy as f64 * gaussian(energy - l.energy, w))
        .sum()
}

/// `Σₙ gₙ·G(E − Eₙ; w)` on `grid`. `levels` must be sorted by energy.
pub fn smoothed_exact_dos(levels: &[Level], grid: &[f64], w: f64) -> Result<DosSeries> {
    smoothed_with_provenance(levels, grid, w, Provenance::Exact)
}

fn smoothed_with_provenance(
    levels: &[Level],
    grid: &[f64],
    w: f64,
    provenance: Provenance,
) -> Result<DosSeries> {
    if !(w > 0.0) {
        return Err(Error::Domain(format!(
            "smoothing width must be positive, got {w}"
        )));
    }
    check_grid(grid)?;
    let values = grid
        .par_iter()
        .map(|&e| smoothed_levels(levels, e, w))
        .collect();
    DosSeries::new(grid.to_vec(), values, w, provenance)
}

/// Enumerates every level that can reach `grid` and smooths it.
pub fn smoothed_exact_dos_for(
    config: &OscillatorConfig,
    grid: &[f64],
    w: f64,
) -> Result<DosSeries> {
    let top = grid.last().copied().unwrap_or(0.0) + GAUSSIAN_WINDOW * w;
    smoothed_exact_dos(&exact_levels(config, top), grid, w)
}

/// Levels of one symmetry sector, `ħω(n + ζ + (k₁+k₂)/2k₁k₂)` with
/// degeneracy `n + 1`.
pub fn reduced_exact_levels(
    config: &OscillatorConfig,
    irrep: Irrep,
    e_max: f64,
) -> Result<Vec<Level>> {
    let (group, _) = config.commensurate_group()?;
    if !group.contains(irrep) {
        return Err(Error::IrrepOutOfRange {
            lambda1: irrep.lambda1,
            lambda2: irrep.lambda2,
            k1: group.k1(),
            k2: group.k2(),
        });
    }
    Ok(exact_levels(config, e_max)
        .into_iter()
        .filter(|l| l.irrep == Some(irrep))
        .collect())
}

pub fn smoothed_reduced_exact_dos(
    config: &OscillatorConfig,
    irrep: Irrep,
    grid: &[f64],
    w: f64,
) -> Result<DosSeries> {
    let top = grid.last().copied().unwrap_or(0.0) + GAUSSIAN_WINDOW * w;
    let levels = reduced_exact_levels(config, irrep, top)?;
    smoothed_with_provenance(&levels, grid, w, Provenance::ReducedExact { irrep })
}

/// `N(E) = Σ_{Eₙ ≤ E} gₙ`.
pub fn staircase(levels: &[Level], energy: f64) -> u64 {
    levels
        .iter()
        .take_while(|l| l.energy <= energy)
        .map(|l| l.degeneracy)
        .sum()
}

/// `∫₀^E` of the broadened periodic-orbit density.
pub fn staircase_semiclassical(
    config: &OscillatorConfig,
    energy: f64,
    smoothing: &SmoothingSpec,
) -> Result<f64> {
    Ok(SemiclassicalDos::for_config(config, smoothing)?.integrated(energy))
}

/// Midpoints between zero and the ground state and between consecutive
/// levels, up to `e_max`.
pub fn mid_gap_energies(levels: &[Level], e_max: f64) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(levels.iter().map(|l| l.energy))
        .collect::<Vec<_>>()
        .windows(2)
        .map(|p| 0.5 * (p[0] + p[1]))
        .filter(|&e| e <= e_max)
        .collect()
}

fn smallest_gap(levels: &[Level]) -> Option<f64> {
    std::iter::once(0.0)
        .chain(levels.iter().map(|l| l.energy))
        .collect::<Vec<_>>()
        .windows(2)
        .map(|p| p[1] - p[0])
        .min_by(f64::total_cmp)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaircaseReport {
    pub points: usize,
    pub width: f64,
    /// Largest `|N_sc(E) − N(E)|` over the mid-gap points.
    pub max_deviation: f64,
    pub worst_energy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares the integrated semiclassical density with the exact count at
/// every mid-gap energy up to `e_max`. The width is a sixteenth of the
/// smallest gap, so every test point sits eight widths from a level.
pub fn staircase_comparison(
    config: &OscillatorConfig,
    e_max: f64,
    tolerance: f64,
) -> Result<StaircaseReport> {
    let levels = exact_levels(config, e_max + 1.0);
    let gap = smallest_gap(&levels).ok_or_else(|| Error::Domain("no levels below e_max".into()))?;
    let width = gap / 16.0;
    let model = SemiclassicalDos::for_config(config, &SmoothingSpec::new(width)?)?;
    let points = mid_gap_energies(&levels, e_max);
    let deviations: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&e| {
            (
                e,
                (model.integrated(e) - staircase(&levels, e) as f64).abs(),
            )
        })
        .collect();
    let (worst_energy, max_deviation) = deviations
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0.0, 0.0));
    Ok(StaircaseReport {
        points: points.len(),
        width,
        max_deviation,
        worst_energy,
        tolerance,
        pass: max_deviation <= tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub max_abs_error: f64,
    /// `max_abs_error` divided by the larger of the two series maxima.
    pub max_rel_error: f64,
    pub worst_energy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn compare(a: &DosSeries, b: &DosSeries, tolerance: f64) -> Result<ComparisonReport> {
    if a.energies() != b.energies() {
        return Err(Error::SeriesMismatch("energy grids differ".into()));
    }
    if a.width() != b.width() {
        return Err(Error::SeriesMismatch(format!(
            "smoothing widths differ: {} vs {}",
            a.width(),
            b.width()
        )));
    }
    let (worst_energy, max_abs_error) = a
        .iter()
        .zip(b.values())
        .map(|((e, x), y)| (e, (x - y).abs()))
        .fold(
            (a.energies().first().copied().unwrap_or(0.0), 0.0),
            |acc, p| {
                if p.1 > acc.1 {
                    p
                } else {
                    acc
                }
            },
        );
    let scale = a.max_value().max(b.max_value());
    let max_rel_error = if scale > 0.0 {
        max_abs_error / scale
    } else {
        max_abs_error
    };
    Ok(ComparisonReport {
        max_abs_error,
        max_rel_error,
        worst_energy,
        tolerance,
        pass: max_rel_error <= tolerance,
    })
}

/// Runnable invariant checks, reported rather than asserted.
pub mod suite {
    use std::f64::consts::{PI, TAU};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use serde::Serialize;

    use super::*;
    use crate::dynamics::{
        conserved_j, integrate_numeric, isotropic_energy, mode_energy, poisson_bracket_numeric,
        stability_factor, stability_factor_numeric, trajectory_analytic, PhaseState,
    };
    use crate::oscillator::{partition_function_closed, partition_function_from_levels};
    use crate::phase::Rational;
    use crate::series::linear_grid;
    use crate::symmetry::{character_inner_product, character_sum_selection, CyclicProductGroup};
    use crate::trace::{
        family_terms, maslov_commensurate_reduced, maslov_isotropic, reduced_terms_with,
        smoothed_sum,
    };

    const GOLDEN: f64 = 1.618_033_988_749_895;

    #[derive(Debug, Clone, PartialEq, Serialize)]
    pub struct CheckResult {
        pub name: String,
        pub passed: bool,
        pub detail: String,
    }

    impl CheckResult {
        fn new(name: &str, passed: bool, detail: String) -> Self {
            Self {
                name: name.to_string(),
                passed,
                detail,
            }
        }

        fn from_result(name: &str, result: Result<(bool, String)>) -> Self {
            match result {
                Ok((passed, detail)) => Self::new(name, passed, detail),
                Err(e) => Self::new(name, false, format!("error: {e}")),
            }
        }
    }

    #[derive(Debug, Clone, Copy)]
    pub struct SuiteOptions {
        /// Relative tolerance for density comparisons.
        pub tolerance: f64,
        /// Maslov index of reduced segments, replaceable for mutation testing.
        pub reduced_maslov: fn(u64, u32, u32) -> Rational,
    }

    impl Default for SuiteOptions {
        fn default() -> Self {
            Self {
                tolerance: 1e-5,
                reduced_maslov: maslov_commensurate_reduced,
            }
        }
    }

    pub fn identities(options: &SuiteOptions) -> Vec<CheckResult> {
        vec![
            stability_check(),
            poisson_algebra_check(),
            casimir_check(),
            character_check(),
            selection_rule_check(),
            irrep_sum_check(options.reduced_maslov),
            isotropic_maslov_check(options.reduced_maslov),
            partition_check(),
        ]
    }

    pub fn dos(options: &SuiteOptions) -> Vec<CheckResult> {
        let tol = options.tolerance;
        let mut out = vec![
            density_check(
                "dos commensurate 3:2",
                OscillatorConfig::commensurate(3, 2, 1.0),
                0.02,
                (0.05, 10.0),
                tol,
            ),
            density_check(
                "dos isotropic",
                OscillatorConfig::isotropic(1.0),
                0.05,
                (0.5, 20.0),
                tol,
            ),
            density_check(
                "dos incommensurate golden",
                OscillatorConfig::incommensurate(1.0, GOLDEN),
                0.05,
                (0.5, 15.0),
                tol,
            ),
        ];
        for (name, config) in [
            (
                "staircase commensurate 3:2",
                OscillatorConfig::commensurate(3, 2, 1.0),
            ),
            ("staircase isotropic", OscillatorConfig::isotropic(1.0)),
            (
                "staircase incommensurate golden",
                OscillatorConfig::incommensurate(1.0, GOLDEN),
            ),
        ] {
            out.push(CheckResult::from_result(
                name,
                config
                    .and_then(|c| staircase_comparison(&c, 10.0, 1e-4))
                    .map(|r| {
                        (
                            r.pass,
                            format!(
                                "{} points, max deviation {:.3e} at E = {:.6}",
                                r.points, r.max_deviation, r.worst_energy
                            ),
                        )
                    }),
            ));
        }
        out.push(cancellation_check());
        out.push(one_dimensional_check());
        out
    }

    pub fn all(options: &SuiteOptions) -> Vec<CheckResult> {
        let mut out = identities(options);
        out.extend(dos(options));
        out
    }

    fn density_check(
        name: &str,
        config: Result<OscillatorConfig>,
        w: f64,
        (lo, hi): (f64, f64),
        tol: f64,
    ) -> CheckResult {
        CheckResult::from_result(
            name,
            (|| {
                let config = config?;
                let grid = linear_grid(lo, hi, 4000)?;
                let sc = SemiclassicalDos::for_config(&config, &SmoothingSpec::new(w)?)?
                    .series(&grid)?;
                let exact = smoothed_exact_dos_for(&config, &grid, w)?;
                let r = compare(&sc, &exact, tol)?;
                Ok((
                    r.pass,
                    format!(
                        "max relative error {:.3e} at E = {:.6}",
                        r.max_rel_error, r.worst_energy
                    ),
                ))
            })(),
        )
    }

    fn random_state(rng: &mut ChaCha8Rng) -> PhaseState {
        PhaseState::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    fn stability_check() -> CheckResult {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let other = rng.gen_range(0.1..5.0);
            let orbit = rng.gen_range(0.1..5.0);
            let r = rng.gen_range(1..20u64);
            worst = worst.max(
                (stability_factor(other, orbit, r) - stability_factor_numeric(other, orbit, r))
                    .abs(),
            );
        }
        CheckResult::new(
            "stability factor closed form",
            worst <= 1e-10,
            format!("max deviation {worst:.3e}"),
        )
    }

    fn poisson_algebra_check() -> CheckResult {
        let (m, omega) = (1.0, 1.0);
        let j = |i: usize| move |s: &PhaseState| conserved_j(s, m, omega).as_array()[i];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let s = random_state(&mut rng);
            let h = 1e-4;
            let target = conserved_j(&s, m, omega).as_array();
            for i in 0..3 {
                let bracket = poisson_bracket_numeric(j(i), j((i + 1) % 3), &s, h);
                worst = worst.max((bracket - target[(i + 2) % 3]).abs());
            }
            let h1 = move |s: &PhaseState| mode_energy(s.mode1(), m, omega);
            let h2 = move |s: &PhaseState| mode_energy(s.mode2(), m, omega);
            worst = worst.max((poisson_bracket_numeric(h1, j(0), &s, h) - omega * target[1]).abs());
            worst = worst.max((poisson_bracket_numeric(h2, j(0), &s, h) + omega * target[1]).abs());
        }
        CheckResult::new(
            "poisson algebra",
            worst <= 1e-7,
            format!("max deviation {worst:.3e}"),
        )
    }

    fn casimir_residual(states: &[PhaseState], m: f64, omega: f64) -> f64 {
        states
            .iter()
            .map(|s| {
                let e = isotropic_energy(s, m, omega);
                (conserved_j(s, m, omega).norm_sqr() - (e / (2.0 * omega)).powi(2)).abs()
            })
            .fold(0.0, f64::max)
    }

    fn casimir_check() -> CheckResult {
        CheckResult::from_result(
            "casimir",
            (|| {
                let config = OscillatorConfig::isotropic(1.0)?;
                let init = PhaseState::new(0.8, -0.3, 0.2, 0.9);
                let times: Vec<f64> = (0..=1000).map(|i| i as f64 * TAU / 1000.0).collect();
                let analytic =
                    casimir_residual(&trajectory_analytic(&config, init, &times), 1.0, 1.0);
                let leapfrog = casimir_residual(
                    &integrate_numeric(&config, init, TAU / 1e4, 10_000)?,
                    1.0,
                    1.0,
                );
                Ok((
                    analytic <= 1e-10 && leapfrog <= 1e-8,
                    format!("analytic {analytic:.3e}, leapfrog {leapfrog:.3e}"),
                ))
            })(),
        )
    }

    fn character_check() -> CheckResult {
        CheckResult::from_result(
            "character orthogonality",
            (|| {
                for (k1, k2) in [(3, 2), (5, 4), (5, 3), (2, 1)] {
                    let g = CyclicProductGroup::new(k1, k2)?;
                    for a in g.irreps() {
                        for b in g.irreps() {
                            let expected = i64::from(a == b);
                            if character_inner_product(a, b, &g)? != expected {
                                return Ok((false, format!("k = ({k1},{k2}), {a:?} vs {b:?}")));
                            }
                        }
                    }
                }
                Ok((true, "exact for k = (3,2), (5,4), (5,3), (2,1)".into()))
            })(),
        )
    }

    fn selection_rule_check() -> CheckResult {
        CheckResult::from_result(
            "selection rule",
            (|| {
                for (k1, k2) in [(3, 2), (5, 4), (5, 3), (2, 1)] {
                    let g = CyclicProductGroup::new(k1, k2)?;
                    let order = g.order() as i64;
                    for r in 1..=100i64 {
                        let expected = if r % order == 0 { order } else { 0 };
                        if character_sum_selection(r, &g) != expected {
                            return Ok((false, format!("k = ({k1},{k2}), r = {r}")));
                        }
                    }
                }
                Ok((true, "exact for r ≤ 100".into()))
            })(),
        )
    }

    fn irrep_sum_check(maslov: fn(u64, u32, u32) -> Rational) -> CheckResult {
        CheckResult::from_result(
            "irrep-sum identity",
            (|| {
                let mut rng = ChaCha8Rng::seed_from_u64(3);
                let mut worst = 0.0f64;
                for (k1, k2) in [(3, 2), (5, 4)] {
                    let g = CyclicProductGroup::new(k1, k2)?;
                    for _ in 0..50 {
                        let e = rng.gen_range(0.05..10.0);
                        let s = SmoothingSpec::new(rng.gen_range(0.01..0.2))?;
                        let mut sum = 0.0;
                        for irrep in g.irreps() {
                            sum += smoothed_sum(
                                &reduced_terms_with(&g, irrep, 1.0, 1.0, &s, maslov)?,
                                e,
                                s.width(),
                            );
                        }
                        let closed = smoothed_sum(&family_terms(&g, 1.0, 1.0, &s), e, s.width());
                        worst = worst.max((sum - closed).abs() / (1.0 + closed.abs()));
                    }
                }
                Ok((worst <= 1e-10, format!("max deviation {worst:.3e}")))
            })(),
        )
    }

    fn isotropic_maslov_check(maslov: fn(u64, u32, u32) -> Rational) -> CheckResult {
        let bad =
            (1..=1000u64).find(|&r| maslov(r, 1, 1) != Rational::from_integer(maslov_isotropic(r)));
        CheckResult::new(
            "reduced maslov isotropic limit",
            bad.is_none(),
            match bad {
                None => "exact for r ≤ 1000".into(),
                Some(r) => format!("mismatch at r = {r}"),
            },
        )
    }

    fn partition_check() -> CheckResult {
        CheckResult::from_result(
            "partition function",
            (|| {
                let mut worst = 0.0f64;
                for config in [
                    OscillatorConfig::isotropic(1.0)?,
                    OscillatorConfig::commensurate(3, 2, 1.0)?,
                    OscillatorConfig::incommensurate(1.0, GOLDEN)?,
                ] {
                    let levels = exact_levels(&config, 80.0);
                    for beta in [0.5, 1.0, 2.0, 3.0] {
                        let z = partition_function_closed(&config, beta)?;
                        let sum = partition_function_from_levels(&levels, beta);
                        worst = worst.max((sum - z).abs() / z);
                    }
                }
                Ok((
                    worst <= 1e-10,
                    format!("max relative deviation {worst:.3e}"),
                ))
            })(),
        )
    }

    fn cancellation_check() -> CheckResult {
        CheckResult::from_result(
            "ground state and cancellation",
            (|| {
                let config = OscillatorConfig::commensurate(3, 2, 1.0)?;
                let model = SemiclassicalDos::for_config(&config, &SmoothingSpec::new(0.02)?)?;
                let peak = model.evaluate(5.0 / 12.0);
                let worst = [1.0 / 12.0, 0.25]
                    .iter()
                    .map(|&e| model.evaluate(e).abs() / peak)
                    .fold(0.0, f64::max);
                Ok((
                    worst < 1e-6,
                    format!("ratio to ground-state peak {worst:.3e}"),
                ))
            })(),
        )
    }

    fn one_dimensional_check() -> CheckResult {
        CheckResult::from_result(
            "one-dimensional comb",
            (|| {
                let w = 0.05;
                let model = SemiclassicalDos::one_dimensional(1.0, 1.0, &SmoothingSpec::new(w)?);
                let peak = 1.0 / (w * (2.0 * PI).sqrt());
                let mut peak_err = 0.0f64;
                let mut gap = 0.0f64;
                for n in 0..10 {
                    peak_err = peak_err.max((model.evaluate(n as f64 + 0.5) / peak - 1.0).abs());
                    gap = gap.max(model.evaluate(n as f64 + 1.0).abs());
                }
                Ok((
                    peak_err < 1e-6 && gap < 1e-6,
                    format!("peak weight error {peak_err:.3e}, mid-gap {gap:.3e}"),
                ))
            })(),
        )
    }
}
