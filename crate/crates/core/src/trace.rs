//! Periodic-orbit sums for the oscillating part of the density of states.
//!
//! Every regime is assembled from the same building block, a harmonic
//! `(c₀ + c₁E)·cos(αE + 2πφ)` attached to the `r`-th repetition of an orbit
//! (or orbit family). Its convolution with a normalised Gaussian of width
//! `w` is known in closed form,
//!
//! ```text
//! e^{−α²w²/2} · [(c₀ + c₁E)·cos(αE + 2πφ) − c₁αw²·sin(αE + 2πφ)],
//! ```
//!
//! so broadened sums are exact up to the truncation threshold
//! `e^{−α²w²/2} < damping_eps`. Phases `φ` are kept as exact fractions of a
//! turn.

use std::f64::consts::{PI, TAU};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{FrequencyClass, OscillatorConfig};
use crate::phase::{Phase, Rational};
use crate::series::{Contribution, DosSeries, Provenance};
use crate::symmetry::{self, CyclicProductGroup, Irrep};

pub const DEFAULT_DAMPING_EPS: f64 = 1e-12;
pub const DEFAULT_DIVISOR_FLOOR: f64 = 1e-8;

/// Volume of the family of isotropic orbits: the surface of the unit sphere.
pub const BLOCH_SPHERE_VOLUME: f64 = 4.0 * PI;

/// Maslov correction when a normal-mode orbit becomes a member of a family.
pub const SYMMETRY_MASLOV_SHIFT: i64 = -2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingSpec {
    width: f64,
    damping_eps: f64,
    divisor_floor: f64,
}

impl SmoothingSpec {
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Domain(format!(
                "smoothing width must be positive, got {width}"
            )));
        }
        Ok(Self {
            width,
            damping_eps: DEFAULT_DAMPING_EPS,
            divisor_floor: DEFAULT_DIVISOR_FLOOR,
        })
    }

    pub fn with_damping_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!(
                "damping_eps must lie in (0, 1), got {eps}"
            )));
        }
        self.damping_eps = eps;
        Ok(self)
    }

    pub fn with_divisor_floor(mut self, floor: f64) -> Result<Self> {
        if !(floor >= 0.0) {
            return Err(Error::Domain(format!(
                "divisor_floor must be non-negative, got {floor}"
            )));
        }
        self.divisor_floor = floor;
        Ok(self)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn damping_eps(&self) -> f64 {
        self.damping_eps
    }

    pub fn divisor_floor(&self) -> f64 {
        self.divisor_floor
    }

    /// `exp(−α²w²/2)`.
    pub fn damping(&self, alpha: f64) -> f64 {
        (-0.5 * (alpha * self.width).powi(2)).exp()
    }

    fn keeps(&self, alpha: f64) -> bool {
        self.damping(alpha) >= self.damping_eps
    }
}

/// One harmonic `(constant + slope·E)·cos(αE + 2π·phase)` of a trace formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceTerm {
    /// Repetition index of the orbit.
    pub r: u64,
    pub constant: f64,
    pub slope: f64,
    /// `α/2π`: full turns of the cosine per unit energy.
    pub turns_per_energy: f64,
    pub phase: Phase,
}

impl TraceTerm {
    pub fn alpha(&self) -> f64 {
        TAU * self.turns_per_energy
    }

    pub fn amplitude(&self, energy: f64) -> f64 {
        self.constant + self.slope * energy
    }

    /// Unbroadened value.
    pub fn value(&self, energy: f64) -> f64 {
        self.amplitude(energy) * self.phase.cos_shifted(self.turns_per_energy * energy)
    }

    /// Value after convolution with a Gaussian of width `w`.
    pub fn smoothed(&self, energy: f64, w: f64) -> f64 {
        let alpha = self.alpha();
        let damping = (-0.5 * (alpha * w).powi(2)).exp();
        let x = self.turns_per_energy * energy;
        damping
            * (self.amplitude(energy) * self.phase.cos_shifted(x)
                - self.slope * alpha * w * w * self.phase.sin_shifted(x))
    }

    /// `∫₀^E` of [`TraceTerm::smoothed`].
    pub fn smoothed_integral(&self, energy: f64, w: f64) -> f64 {
        let alpha = self.alpha();
        let damping = (-0.5 * (alpha * w).powi(2)).exp();
        let antiderivative = |e: f64| {
            let x = self.turns_per_energy * e;
            let (c, s) = (self.phase.cos_shifted(x), self.phase.sin_shifted(x));
            self.amplitude(e) * s / alpha
                + self.slope * c / (alpha * alpha)
                + self.slope * w * w * c
        };
        damping * (antiderivative(energy) - antiderivative(0.0))
    }
}

/// Smooth (non-oscillating) part `constant + slope·E`; Gaussian smoothing
/// leaves it unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalTerm {
    pub constant: f64,
    pub slope: f64,
}

impl ClassicalTerm {
    pub fn value(&self, energy: f64) -> f64 {
        self.constant + self.slope * energy
    }

    pub fn integral(&self, energy: f64) -> f64 {
        self.constant * energy + 0.5 * self.slope * energy * energy
    }
}

pub fn smoothed_sum(terms: &[TraceTerm], energy: f64, w: f64) -> f64 {
    terms.iter().map(|t| t.smoothed(energy, w)).sum()
}

/// Repetitions `r = 1, 2, …` until the damping of `α(r)` drops below the
/// threshold; `alpha` must be increasing in `r`.
fn repetitions<'a>(
    smoothing: &'a SmoothingSpec,
    alpha: impl Fn(u64) -> f64 + 'a,
) -> impl Iterator<Item = u64> + 'a {
    (1u64..).take_while(move |&r| smoothing.keeps(alpha(r)))
}

// ---------------------------------------------------------------------------
// Maslov indices

/// `σ_{r} = 2r + 1 + 2⌊r·ω_other/ω_orbit⌋` for a normal-mode orbit.
pub fn maslov_incommensurate(r: u64, omega_orbit: f64, omega_other: f64) -> i64 {
    let r = r as i64;
    2 * r + 1 + 2 * (r as f64 * omega_other / omega_orbit).floor() as i64
}

/// `σ_r = 4r − 1`: the normal-mode index at equal frequencies plus the
/// symmetry shift.
pub fn maslov_isotropic(r: u64) -> i64 {
    let r = r as i64;
    2 * r + 1 + 2 * r + SYMMETRY_MASLOV_SHIFT
}

/// `σ̃_r = 2r(k₁+k₂)/(k₁k₂) − 1` for an orbit segment of the reduced dynamics.
pub fn maslov_commensurate_reduced(r: u64, k1: u32, k2: u32) -> Rational {
    let (k1, k2) = (i64::from(k1), i64::from(k2));
    Ratio::new(2 * r as i64 * (k1 + k2), k1 * k2) - 1
}

/// `−(σ + 1)/4` turns, the phase a Maslov index `σ` adds to a family term.
fn family_maslov_phase(sigma: Rational) -> Phase {
    -Phase::from((sigma + 1) / 4)
}

// ---------------------------------------------------------------------------
// Incommensurate oscillator: isolated normal-mode orbits

/// Harmonics of the `r`-fold repeated normal mode with frequency `omega_orbit`.
pub fn normal_mode_terms(
    omega_orbit: f64,
    omega_other: f64,
    hbar: f64,
    mode: u8,
    smoothing: &SmoothingSpec,
) -> Result<Vec<TraceTerm>> {
    let period = TAU / omega_orbit;
    let turns = 1.0 / (hbar * omega_orbit);
    repetitions(smoothing, move |r| TAU * r as f64 * turns)
        .map(|r| {
            let divisor = (PI * r as f64 * omega_other / omega_orbit).sin().abs();
            if divisor < smoothing.divisor_floor() {
                return Err(Error::SmallDivisor {
                    mode,
                    r,
                    value: divisor,
                    floor: smoothing.divisor_floor(),
                });
            }
            let sigma = maslov_incommensurate(r, omega_orbit, omega_other);
            Ok(TraceTerm {
                r,
                constant: period / (PI * hbar) / (2.0 * divisor),
                slope: 0.0,
                turns_per_energy: r as f64 * turns,
                phase: -Phase::new(sigma, 4),
            })
        })
        .collect()
}

fn require(config: &OscillatorConfig, expected: &'static str) -> Result<()> {
    if config.class().name() == expected {
        Ok(())
    } else {
        Err(Error::WrongRegime {
            expected,
            found: config.class().name(),
        })
    }
}

/// `δρ₁ + δρ₂` of the incommensurate oscillator, broadened. Zero for `E ≤ 0`.
pub fn delta_rho_incommensurate(
    config: &OscillatorConfig,
    energy: f64,
    smoothing: &SmoothingSpec,
) -> Result<f64> {
    require(config, "incommensurate")?;
    let model = SemiclassicalDos::for_config(config, smoothing)?;
    Ok(model.oscillating(energy))
}

// ---------------------------------------------------------------------------
// Isotropic oscillator: one SU(2) family

pub fn family_period(omega: f64) -> f64 {
    TAU / omega
}

/// `|J| = E/2ω`.
pub fn j_magnitude(energy: f64, omega: f64) -> f64 {
    energy / (2.0 * omega)
}

/// Prefactor `T·V·|J| / (2(πħ)²)` of a two-parameter orbit family.
pub fn family_amplitude(period: f64, volume: f64, j_magnitude: f64, hbar: f64) -> f64 {
    period * volume * j_magnitude / (2.0 * (PI * hbar).powi(2))
}

/// Harmonics of the isotropic family, built from its period, volume, `|J|`
/// and Maslov index.
pub fn isotropic_terms(omega: f64, hbar: f64, smoothing: &SmoothingSpec) -> Vec<TraceTerm> {
    // |J| is linear in E, so the family prefactor is a pure slope
    let slope = family_amplitude(
        family_period(omega),
        BLOCH_SPHERE_VOLUME,
        j_magnitude(1.0, omega),
        hbar,
    );
    let turns = 1.0 / (hbar * omega);
    repetitions(smoothing, move |r| TAU * r as f64 * turns)
        .map(|r| TraceTerm {
            r,
            constant: 0.0,
            slope,
            turns_per_energy: r as f64 * turns,
            phase: family_maslov_phase(Ratio::from_integer(maslov_isotropic(r))),
        })
        .collect()
}

pub fn delta_rho_isotropic(
    config: &OscillatorConfig,
    energy: f64,
    smoothing: &SmoothingSpec,
) -> Result<f64> {
    require(config, "isotropic")?;
    if energy <= 0.0 {
        return Ok(0.0);
    }
    let terms = isotropic_terms(config.omega_ref(), config.hbar(), smoothing);
    Ok(smoothed_sum(&terms, energy, smoothing.width()))
}

// ---------------------------------------------------------------------------
// Commensurate oscillator

/// Isolated repetitions of the orbit along axis `mode` (1 or 2); the
/// repetitions that close into a Lissajous curve are skipped.
pub fn isolated_terms(
    group: &CyclicProductGroup,
    omega: f64,
    hbar: f64,
    mode: u8,
    smoothing: &SmoothingSpec,
) -> Vec<TraceTerm> {
    let (k_own, k_other) = if mode == 1 {
        (group.k1(), group.k2())
    } else {
        (group.k2(), group.k1())
    };
    let (k_own, k_other) = (i64::from(k_own), i64::from(k_other));
    let unit = hbar * omega;
    let turns = k_own as f64 / unit;
    repetitions(smoothing, move |r| TAU * r as f64 * turns)
        .filter_map(|r| {
            // sin(π r k_own/k_other) with the angle reduced exactly mod 2π
            let numer = (r as i64 * k_own).rem_euclid(2 * k_other);
            if numer % k_other == 0 {
                return None;
            }
            let divisor = (PI * numer as f64 / k_other as f64).sin();
            let parity = if r % 2 == 0 { 1.0 } else { -1.0 };
            Some(TraceTerm {
                r,
                constant: parity * k_own as f64 / unit / divisor,
                slope: 0.0,
                turns_per_energy: r as f64 * turns,
                // sin x = cos(x − π/2)
                phase: Phase::new(-1, 4),
            })
        })
        .collect()
}

/// Reduced family harmonics of one symmetry sector.
pub fn reduced_terms(
    group: &CyclicProductGroup,
    irrep: Irrep,
    omega: f64,
    hbar: f64,
    smoothing: &SmoothingSpec,
) -> Result<Vec<TraceTerm>> {
    reduced_terms_with(
        group,
        irrep,
        omega,
        hbar,
        smoothing,
        maslov_commensurate_reduced,
    )
}

/// As [`reduced_terms`] with the segment Maslov index supplied by the caller.
pub fn reduced_terms_with<M>(
    group: &CyclicProductGroup,
    irrep: Irrep,
    omega: f64,
    hbar: f64,
    smoothing: &SmoothingSpec,
    maslov: M,
) -> Result<Vec<TraceTerm>>
where
    M: Fn(u64, u32, u32) -> Rational,
{
    let zeta = Phase::from(symmetry::zeta(irrep, group)?);
    let unit = hbar * omega;
    let turns = 1.0 / unit;
    Ok(repetitions(smoothing, move |r| TAU * r as f64 * turns)
        .map(|r| TraceTerm {
            r,
            constant: 0.0,
            slope: 2.0 / (unit * unit),
            turns_per_energy: r as f64 * turns,
            phase: -(zeta * r as i64) + family_maslov_phase(maslov(r, group.k1(), group.k2())),
        })
        .collect())
}

/// Full Lissajous curves, `r = k·k₁k₂`, in closed form.
pub fn family_terms(
    group: &CyclicProductGroup,
    omega: f64,
    hbar: f64,
    smoothing: &SmoothingSpec,
) -> Vec<TraceTerm> {
    let order = group.order();
    let unit = hbar * omega;
    let turns = order as f64 / unit;
    let sign_step = i64::from(group.k1() + group.k2());
    repetitions(smoothing, move |k| TAU * k as f64 * turns)
        .map(|k| TraceTerm {
            r: k * order,
            constant: 0.0,
            slope: 2.0 * order as f64 / (unit * unit),
            turns_per_energy: k as f64 * turns,
            // (−1)^{k(k₁+k₂)}
            phase: Phase::new(k as i64 * sign_step, 2),
        })
        .collect()
}

pub fn delta_rho_isolated(
    config: &OscillatorConfig,
    energy: f64,
    smoothing: &SmoothingSpec,
) -> Result<f64> {
    let (group, omega) = config.commensurate_group()?;
    if energy <= 0.0 {
        return Ok(0.0);
    }
    let w = smoothing.width();
    Ok((1..=2)
        .map(|mode| {
            smoothed_sum(
                &isolated_terms(&group, omega, config.hbar(), mode, smoothing),
                energy,
                w,
            )
        })
        .sum())
}

pub fn delta_rho_reduced(
    config: &OscillatorConfig,
    irrep: Irrep,
    energy: f64,
    smoothing: &SmoothingSpec,
) -> Result<f64> {
    let (group, omega) = config.commensurate_group()?;
    let terms = reduced_terms(&group, irrep, omega, config.hbar(), smoothing)?;
    if energy <= 0.0 {
        return Ok(0.0);
    }
    Ok(smoothed_sum(&terms, energy, smoothing.width()))
}

pub fn delta_rho_family(
    config: &OscillatorConfig,
    energy: f64,
    smoothing: &SmoothingSpec,
) -> Result<f64> {
    let (group, omega) = config.commensurate_group()?;
    if energy <= 0.0 {
        return Ok(0.0);
    }
    let terms = family_terms(&group, omega, config.hbar(), smoothing);
    Ok(smoothed_sum(&terms, energy, smoothing.width()))
}

// ---------------------------------------------------------------------------
// One-dimensional oscillator

pub fn one_dimensional_terms(omega: f64, hbar: f64, smoothing: &SmoothingSpec) -> Vec<TraceTerm> {
    let unit = hbar * omega;
    repetitions(smoothing, move |r| TAU * r as f64 / unit)
        .map(|r| TraceTerm {
            r,
            constant: 2.0 / unit,
            slope: 0.0,
            turns_per_energy: r as f64 / unit,
            phase: Phase::new(-(r as i64), 2),
        })
        .collect()
}

/// Oscillating part of the one-dimensional density of states, broadened.
/// The smooth part is `1/ħω`.
pub fn delta_rho_1d(omega: f64, hbar: f64, energy: f64, smoothing: &SmoothingSpec) -> f64 {
    if energy <= 0.0 {
        return 0.0;
    }
    smoothed_sum(
        &one_dimensional_terms(omega, hbar, smoothing),
        energy,
        smoothing.width(),
    )
}

// ---------------------------------------------------------------------------
// Assembled densities

/// A smooth term plus named groups of broadened harmonics.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalDos {
    classical: (Contribution, ClassicalTerm),
    components: Vec<(Contribution, Vec<TraceTerm>)>,
    smoothing: SmoothingSpec,
}

impl SemiclassicalDos {
    /// `ρ̄ + δρ` with the terms appropriate to the frequency class.
    pub fn for_config(config: &OscillatorConfig, smoothing: &SmoothingSpec) -> Result<Self> {
        let hbar = config.hbar();
        let classical = ClassicalTerm {
            constant: 0.0,
            slope: 1.0 / (hbar * hbar * config.omega1() * config.omega2()),
        };
        let components = match config.class() {
            FrequencyClass::Isotropic => vec![(
                Contribution::IsotropicFamily,
                isotropic_terms(config.omega_ref(), hbar, smoothing),
            )],
            FrequencyClass::Commensurate { omega, .. } => {
                let group = config.group().expect("commensurate");
                vec![
                    (
                        Contribution::LissajousFamily,
                        family_terms(&group, omega, hbar, smoothing),
                    ),
                    (
                        Contribution::IsolatedOrbits(1),
                        isolated_terms(&group, omega, hbar, 1, smoothing),
                    ),
                    (
                        Contribution::IsolatedOrbits(2),
                        isolated_terms(&group, omega, hbar, 2, smoothing),
                    ),
                ]
            }
            FrequencyClass::Incommensurate => {
                let (w1, w2) = (config.omega1(), config.omega2());
                vec![
                    (
                        Contribution::NormalModeOrbits(1),
                        normal_mode_terms(w1, w2, hbar, 1, smoothing)?,
                    ),
                    (
                        Contribution::NormalModeOrbits(2),
                        normal_mode_terms(w2, w1, hbar, 2, smoothing)?,
                    ),
                ]
            }
        };
        Ok(Self {
            classical: (Contribution::Classical, classical),
            components,
            smoothing: *smoothing,
        })
    }

    /// `ρ̄/k₁k₂ + δρ_Γ^{(λ₁,λ₂)}` for one symmetry sector.
    pub fn reduced(
        config: &OscillatorConfig,
        irrep: Irrep,
        smoothing: &SmoothingSpec,
    ) -> Result<Self> {
        let (group, omega) = config.commensurate_group()?;
        let hbar = config.hbar();
        let classical = ClassicalTerm {
            constant: 0.0,
            slope: 1.0 / (hbar * hbar * config.omega1() * config.omega2() * group.order() as f64),
        };
        Ok(Self {
            classical: (Contribution::ReducedClassical(irrep), classical),
            components: vec![(
                Contribution::ReducedFamily(irrep),
                reduced_terms(&group, irrep, omega, hbar, smoothing)?,
            )],
            smoothing: *smoothing,
        })
    }

    /// `1/ħω + δρ` of a single one-dimensional oscillator.
    pub fn one_dimensional(omega: f64, hbar: f64, smoothing: &SmoothingSpec) -> Self {
        Self {
            classical: (
                Contribution::Classical,
                ClassicalTerm {
                    constant: 1.0 / (hbar * omega),
                    slope: 0.0,
                },
            ),
            components: vec![(
                Contribution::OneDimensional,
                one_dimensional_terms(omega, hbar, smoothing),
            )],
            smoothing: *smoothing,
        }
    }

    pub fn smoothing(&self) -> &SmoothingSpec {
        &self.smoothing
    }

    pub fn classical(&self) -> ClassicalTerm {
        self.classical.1
    }

    pub fn contributions(&self) -> Vec<Contribution> {
        std::iter::once(self.classical.0)
            .chain(self.components.iter().map(|(c, _)| *c))
            .collect()
    }

    pub fn terms(&self, contribution: Contribution) -> Option<&[TraceTerm]> {
        self.components
            .iter()
            .find(|(c, _)| *c == contribution)
            .map(|(_, t)| t.as_slice())
    }

    /// Broadened oscillating part; zero for `E ≤ 0`.
    pub fn oscillating(&self, energy: f64) -> f64 {
        if energy <= 0.0 {
            return 0.0;
        }
        let w = self.smoothing.width();
        self.components
            .iter()
            .map(|(_, t)| smoothed_sum(t, energy, w))
            .sum()
    }

    /// Broadened total; zero for `E ≤ 0`, where the trace formulas do not apply.
    pub fn evaluate(&self, energy: f64) -> f64 {
        if energy <= 0.0 {
            return 0.0;
        }
        self.classical.1.value(energy) + self.oscillating(energy)
    }

    /// Broadened value of a single contribution, `None` if absent.
    pub fn evaluate_component(&self, contribution: Contribution, energy: f64) -> Option<f64> {
        if contribution == self.classical.0 {
            return Some(if energy > 0.0 {
                self.classical.1.value(energy)
            } else {
                0.0
            });
        }
        let terms = self.terms(contribution)?;
        Some(if energy > 0.0 {
            smoothed_sum(terms, energy, self.smoothing.width())
        } else {
            0.0
        })
    }

    /// `∫₀^E` of the broadened total.
    pub fn integrated(&self, energy: f64) -> f64 {
        if energy <= 0.0 {
            return 0.0;
        }
        let w = self.smoothing.width();
        self.classical.1.integral(energy)
            + self
                .components
                .iter()
                .flat_map(|(_, t)| t.iter())
                .map(|t| t.smoothed_integral(energy, w))
                .sum::<f64>()
    }

    pub fn series(&self, grid: &[f64]) -> Result<DosSeries> {
        let values: Vec<f64> = grid.par_iter().map(|&e| self.evaluate(e)).collect();
        DosSeries::new(
            grid.to_vec(),
            values,
            self.smoothing.width(),
            self.provenance(self.contributions()),
        )
    }

    pub fn component_series(&self, contribution: Contribution, grid: &[f64]) -> Result<DosSeries> {
        if !self.contributions().contains(&contribution) {
            return Err(Error::Domain(format!(
                "{contribution:?} is not part of this density"
            )));
        }
        let values: Vec<f64> = grid
            .par_iter()
            .map(|&e| self.evaluate_component(contribution, e).unwrap_or(0.0))
            .collect();
        DosSeries::new(
            grid.to_vec(),
            values,
            self.smoothing.width(),
            self.provenance(vec![contribution]),
        )
    }

    fn provenance(&self, contributions: Vec<Contribution>) -> Provenance {
        Provenance::Semiclassical {
            contributions,
            damping_eps: self.smoothing.damping_eps(),
        }
    }
}

/// Broadened semiclassical density on `grid` for any frequency class.
pub fn total_dos(
    config: &OscillatorConfig,
    grid: &[f64],
    smoothing: &SmoothingSpec,
) -> Result<DosSeries> {
    SemiclassicalDos::for_config(config, smoothing)?.series(grid)
}
