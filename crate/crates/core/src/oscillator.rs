//! Physical parameters, frequency-ratio classification and exact spectra.
//!
//! Energies are computed internally in units of `ħ·ω_ref`, where `ω_ref` is
//! the common frequency `ω = k₁ω₁ = k₂ω₂` for isotropic and commensurate
//! oscillators and `ω₁` for incommensurate ones. In the commensurate case the
//! spectrum is handled as exact fractions with denominator `2k₁k₂`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase::Rational;
use crate::symmetry::{CyclicProductGroup, Irrep};

/// Energies closer than this (in units of `ħ·ω_ref`) belong to one level.
pub const LEVEL_MERGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrequencyClass {
    Isotropic,
    /// `k₁ω₁ = k₂ω₂ = ω` with coprime `k₁, k₂`, not both one.
    Commensurate {
        k1: u32,
        k2: u32,
        omega: f64,
    },
    Incommensurate,
}

impl FrequencyClass {
    pub fn name(&self) -> &'static str {
        match self {
            FrequencyClass::Isotropic => "isotropic",
            FrequencyClass::Commensurate { .. } => "commensurate",
            FrequencyClass::Incommensurate => "incommensurate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatorConfig {
    mass: f64,
    omega1: f64,
    omega2: f64,
    hbar: f64,
    class: FrequencyClass,
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl OscillatorConfig {
    pub fn isotropic(omega: f64) -> Result<Self> {
        let omega = positive("omega", omega)?;
        Ok(Self {
            mass: 1.0,
            omega1: omega,
            omega2: omega,
            hbar: 1.0,
            class: FrequencyClass::Isotropic,
        })
    }

    /// Frequencies `ω₁ = ω/k₁`, `ω₂ = ω/k₂`. `(1, 1)` yields an isotropic config.
    pub fn commensurate(k1: u32, k2: u32, omega: f64) -> Result<Self> {
        CyclicProductGroup::new(k1, k2)?;
        let omega = positive("omega", omega)?;
        if k1 == 1 && k2 == 1 {
            return Self::isotropic(omega);
        }
        Ok(Self {
            mass: 1.0,
            omega1: omega / f64::from(k1),
            omega2: omega / f64::from(k2),
            hbar: 1.0,
            class: FrequencyClass::Commensurate { k1, k2, omega },
        })
    }

    /// The ratio is taken to be irrational; callers that are unsure should
    /// run [`classify_ratio`] first.
    pub fn incommensurate(omega1: f64, omega2: f64) -> Result<Self> {
        let omega1 = positive("omega1", omega1)?;
        let omega2 = positive("omega2", omega2)?;
        if omega1 == omega2 {
            return Err(Error::Domain(
                "equal frequencies describe an isotropic oscillator".into(),
            ));
        }
        Ok(Self {
            mass: 1.0,
            omega1,
            omega2,
            hbar: 1.0,
            class: FrequencyClass::Incommensurate,
        })
    }

    /// Builds the config matching a classification result.
    pub fn from_class(class: FrequencyClass, omega1: f64, omega2: f64) -> Result<Self> {
        match class {
            FrequencyClass::Isotropic => Self::isotropic(omega1),
            FrequencyClass::Commensurate { k1, k2, omega } => Self::commensurate(k1, k2, omega),
            FrequencyClass::Incommensurate => Self::incommensurate(omega1, omega2),
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        self.mass = positive("mass", mass)?;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = positive("hbar", hbar)?;
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn class(&self) -> FrequencyClass {
        self.class
    }

    /// `ω` for isotropic and commensurate configs, `ω₁` otherwise.
    pub fn omega_ref(&self) -> f64 {
        match self.class {
            FrequencyClass::Commensurate { omega, .. } => omega,
            _ => self.omega1,
        }
    }

    /// `ħ·ω_ref`, the unit of the dimensionless energies used internally.
    pub fn energy_unit(&self) -> f64 {
        self.hbar * self.omega_ref()
    }

    /// `(k₁, k₂)` with `(1, 1)` for isotropic configs.
    pub fn winding(&self) -> Option<(u32, u32)> {
        match self.class {
            FrequencyClass::Isotropic => Some((1, 1)),
            FrequencyClass::Commensurate { k1, k2, .. } => Some((k1, k2)),
            FrequencyClass::Incommensurate => None,
        }
    }

    pub fn group(&self) -> Option<CyclicProductGroup> {
        self.winding()
            .map(|(k1, k2)| CyclicProductGroup::new(k1, k2).expect("validated at construction"))
    }

    pub(crate) fn commensurate_group(&self) -> Result<(CyclicProductGroup, f64)> {
        match self.class {
            FrequencyClass::Commensurate { k1, k2, omega } => {
                Ok((CyclicProductGroup::new(k1, k2)?, omega))
            }
            other => Err(Error::WrongRegime {
                expected: "commensurate",
                found: other.name(),
            }),
        }
    }
}

/// One exact eigenenergy with its degeneracy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub energy: f64,
    pub degeneracy: u64,
    /// Quantum numbers `(ν₁, ν₂)` of the degenerate states.
    pub members: Vec<(u64, u64)>,
    /// Shared irrep label, commensurate oscillators only.
    pub irrep: Option<Irrep>,
}

/// `νᵢ = nᵢkᵢ + λᵢ` with `0 ≤ λᵢ < kᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decomposition {
    pub n1: u64,
    pub lambda1: u32,
    pub n2: u64,
    pub lambda2: u32,
}

pub fn decompose_quantum_numbers(nu1: u64, nu2: u64, k1: u32, k2: u32) -> Decomposition {
    let (n1, l1) = nu1.div_rem(&u64::from(k1));
    let (n2, l2) = nu2.div_rem(&u64::from(k2));
    Decomposition {
        n1,
        lambda1: l1 as u32,
        n2,
        lambda2: l2 as u32,
    }
}

/// `E_{ν₁ν₂}/ħω` for `k₁ω₁ = k₂ω₂ = ω`, as an exact fraction.
pub fn level_energy_units(nu1: u64, nu2: u64, k1: u32, k2: u32) -> Rational {
    let (k1, k2) = (i64::from(k1), i64::from(k2));
    Ratio::new(
        2 * k2 * nu1 as i64 + 2 * k1 * nu2 as i64 + k1 + k2,
        2 * k1 * k2,
    )
}

/// `n₁ + n₂ + λ₁/k₁ + λ₂/k₂ + (k₁+k₂)/2k₁k₂` as an exact fraction.
pub fn commensurate_energy_units(
    n1: u64,
    n2: u64,
    lambda1: u32,
    lambda2: u32,
    k1: u32,
    k2: u32,
) -> Result<Rational> {
    if lambda1 >= k1 || lambda2 >= k2 {
        return Err(Error::IrrepOutOfRange {
            lambda1,
            lambda2,
            k1,
            k2,
        });
    }
    let (k1, k2) = (i64::from(k1), i64::from(k2));
    Ok(Ratio::from_integer((n1 + n2) as i64)
        + Ratio::new(i64::from(lambda1), k1)
        + Ratio::new(i64::from(lambda2), k2)
        + Ratio::new(k1 + k2, 2 * k1 * k2))
}

pub fn commensurate_energy(
    n1: u64,
    n2: u64,
    lambda1: u32,
    lambda2: u32,
    config: &OscillatorConfig,
) -> Result<f64> {
    let (group, _) = config.commensurate_group()?;
    let u = commensurate_energy_units(n1, n2, lambda1, lambda2, group.k1(), group.k2())?;
    Ok(config.energy_unit() * ratio_to_f64(u))
}

pub(crate) fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// All levels with `E ≤ e_max`, ascending.
pub fn exact_levels(config: &OscillatorConfig, e_max: f64) -> Vec<Level> {
    if !(e_max > 0.0) {
        return Vec::new();
    }
    let unit = config.energy_unit();
    let u_max = e_max / unit;
    match config.class() {
        FrequencyClass::Isotropic => {
            let top = (u_max * (1.0 + f64::EPSILON)).floor() as u64;
            (1..=top)
                .map(|u| Level {
                    energy: unit * u as f64,
                    degeneracy: u,
                    members: (0..u).map(|nu1| (nu1, u - 1 - nu1)).collect(),
                    irrep: None,
                })
                .collect()
        }
        FrequencyClass::Commensurate { k1, k2, .. } => commensurate_levels(k1, k2, unit, u_max),
        FrequencyClass::Incommensurate => {
            incommensurate_levels(config.omega2() / config.omega1(), unit, u_max)
        }
    }
}

fn commensurate_levels(k1: u32, k2: u32, unit: f64, u_max: f64) -> Vec<Level> {
    let denom = 2 * u64::from(k1) * u64::from(k2);
    let key_max = (u_max * denom as f64 * (1.0 + f64::EPSILON)).floor() as u64;
    let (a, b, offset) = (2 * u64::from(k2), 2 * u64::from(k1), u64::from(k1 + k2));
    let mut by_key: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
    let mut nu1 = 0;
    while a * nu1 + offset <= key_max {
        let mut nu2 = 0;
        while a * nu1 + b * nu2 + offset <= key_max {
            by_key
                .entry(a * nu1 + b * nu2 + offset)
                .or_default()
                .push((nu1, nu2));
            nu2 += 1;
        }
        nu1 += 1;
    }
    by_key
        .into_iter()
        .map(|(key, members)| {
            let (nu1, nu2) = members[0];
            let d = decompose_quantum_numbers(nu1, nu2, k1, k2);
            Level {
                energy: unit * key as f64 / denom as f64,
                degeneracy: members.len() as u64,
                members,
                irrep: Some(Irrep {
                    lambda1: d.lambda1,
                    lambda2: d.lambda2,
                }),
            }
        })
        .collect()
}

fn incommensurate_levels(ratio: f64, unit: f64, u_max: f64) -> Vec<Level> {
    let mut states = Vec::new();
    let mut nu1 = 0u64;
    while nu1 as f64 + 0.5 + 0.5 * ratio <= u_max + LEVEL_MERGE_TOLERANCE {
        let mut nu2 = 0u64;
        loop {
            let u = nu1 as f64 + 0.5 + ratio * (nu2 as f64 + 0.5);
            if u > u_max + LEVEL_MERGE_TOLERANCE {
                break;
            }
            states.push((u, nu1, nu2));
            nu2 += 1;
        }
        nu1 += 1;
    }
    states.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut levels: Vec<(f64, Vec<(u64, u64)>)> = Vec::new();
    for (u, nu1, nu2) in states {
        match levels.last_mut() {
            Some((u0, members)) if u - *u0 <= LEVEL_MERGE_TOLERANCE => members.push((nu1, nu2)),
            _ => levels.push((u, vec![(nu1, nu2)])),
        }
    }
    levels
        .into_iter()
        .filter(|(u, _)| *u <= u_max)
        .map(|(u, members)| Level {
            energy: unit * u,
            degeneracy: members.len() as u64,
            members,
            irrep: None,
        })
        .collect()
}

/// Best rational approximations `p/q` of `x > 0`, in order of increasing `q`.
pub fn convergents(x: f64, max_terms: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let (mut h_prev, mut h) = (1u64, 0u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut rest = x;
    for _ in 0..max_terms {
        let a = rest.floor();
        if !(a.is_finite()) || a > 1e15 {
            break;
        }
        let a = a as u64;
        let (Some(hn), Some(kn)) = (
            a.checked_mul(h_prev).and_then(|v| v.checked_add(h)),
            a.checked_mul(k_prev).and_then(|v| v.checked_add(k)),
        ) else {
            break;
        };
        h = h_prev;
        h_prev = hn;
        k = k_prev;
        k_prev = kn;
        out.push((hn, kn));
        let frac = rest - rest.floor();
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    out
}

/// Sorts a frequency pair into isotropic, commensurate or incommensurate.
///
/// With `x = ω₁/ω₂ = k₂/k₁` the first continued-fraction convergent `p/q`
/// of `x` with `q ≤ max_denominator` and `|x − p/q| ≤ tol` gives
/// `k₁ = q`, `k₂ = p`.
pub fn classify_ratio(
    omega1: f64,
    omega2: f64,
    tol: f64,
    max_denominator: u64,
) -> Result<FrequencyClass> {
    positive("omega1", omega1)?;
    positive("omega2", omega2)?;
    positive("tol", tol)?;
    if max_denominator == 0 {
        return Err(Error::Domain("max_denominator must be at least 1".into()));
    }
    let x = omega1 / omega2;
    if (x - 1.0).abs() <= tol {
        return Ok(FrequencyClass::Isotropic);
    }
    for (p, q) in convergents(x, 64) {
        if q > max_denominator {
            break;
        }
        if p == 0 {
            continue;
        }
        if (x - p as f64 / q as f64).abs() <= tol {
            return match (u32::try_from(q), u32::try_from(p)) {
                (Ok(k1), Ok(k2)) => Ok(FrequencyClass::Commensurate {
                    k1,
                    k2,
                    omega: f64::from(k1) * omega1,
                }),
                _ => Ok(FrequencyClass::Incommensurate),
            };
        }
    }
    Ok(FrequencyClass::Incommensurate)
}

/// `ρ̄(E) = E/(ħ²ω₁ω₂)` for `E > 0`, zero otherwise.
pub fn classical_dos(config: &OscillatorConfig, energy: f64) -> f64 {
    if energy > 0.0 {
        energy / (config.hbar * config.hbar * config.omega1 * config.omega2)
    } else {
        0.0
    }
}

/// `Z(β) = 1 / (4 sinh(ħβω₁/2) sinh(ħβω₂/2))`.
pub fn partition_function_closed(config: &OscillatorConfig, beta: f64) -> Result<f64> {
    positive("beta", beta)?;
    let half = 0.5 * config.hbar * beta;
    Ok(1.0 / (4.0 * (half * config.omega1).sinh() * (half * config.omega2).sinh()))
}

/// `Σ gₙ exp(−βEₙ)` over the given levels.
///
/// Truncating the spectrum at `E_max` leaves a remainder bounded by
/// [`partition_remainder_bound`].
pub fn partition_function_from_levels(levels: &[Level], beta: f64) -> f64 {
    levels
        .iter()
        .map(|l| l.degeneracy as f64 * (-beta * l.energy).exp())
        .sum()
}

/// `g_max·exp(−βE_max)/(1 − exp(−βΔ))`: a geometric tail estimate for the
/// levels omitted above `E_max`, with `Δ` the smallest spacing to assume for
/// them and `g_max` the largest degeneracy to assume for them.
pub fn partition_remainder_bound(g_max: f64, e_max: f64, beta: f64, spacing: f64) -> f64 {
    g_max * (-beta * e_max).exp() / (1.0 - (-beta * spacing).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_ratio(1.0, 1.0, 1e-9, 1000).unwrap(),
            FrequencyClass::Isotropic
        );
        assert_eq!(
            classify_ratio(2.0, 3.0, 1e-9, 1000).unwrap(),
            FrequencyClass::Commensurate {
                k1: 3,
                k2: 2,
                omega: 6.0
            }
        );
        assert_eq!(
            classify_ratio(1.0, 1.6180339887, 1e-9, 50).unwrap(),
            FrequencyClass::Incommensurate
        );
        assert!(classify_ratio(0.0, 1.0, 1e-9, 10).is_err());
        assert!(classify_ratio(1.0, 1.0, 1e-9, 0).is_err());
    }

    #[test]
    fn golden_convergents_are_fibonacci_ratios() {
        // oracle: convergents of φ are F(n+1)/F(n)
        let cs = convergents(GOLDEN, 12);
        let fib = [1u64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233];
        for (i, &(p, q)) in cs.iter().enumerate() {
            assert_eq!((p, q), (fib[i + 1], fib[i]));
        }
        // best denominator ≤ 50 is 55/34, off by ~3.9e-4
        let &(p, q) = cs.iter().rfind(|c| c.1 <= 50).unwrap();
        assert_eq!((p, q), (55, 34));
        assert!((GOLDEN - 55.0 / 34.0).abs() > 3e-4);
    }

    #[test]
    fn classify_recovers_small_ratios() {
        let c = classify_ratio(5.0 / 7.0, 1.0, 1e-12, 100).unwrap();
        assert!(matches!(
            c,
            FrequencyClass::Commensurate { k1: 7, k2: 5, .. }
        ));
        let c = classify_ratio(4.0, 1.0, 1e-12, 100).unwrap();
        assert!(matches!(
            c,
            FrequencyClass::Commensurate { k1: 1, k2: 4, .. }
        ));
    }

    #[test]
    fn commensurate_constructor_invariants() {
        let c = OscillatorConfig::commensurate(3, 2, 1.0).unwrap();
        assert_eq!(3.0 * c.omega1(), 1.0);
        assert_eq!(2.0 * c.omega2(), 1.0);
        assert_eq!(
            OscillatorConfig::commensurate(1, 1, 2.0).unwrap().class(),
            FrequencyClass::Isotropic
        );
        assert!(matches!(
            OscillatorConfig::commensurate(4, 2, 1.0),
            Err(Error::NotCoprime { .. })
        ));
        assert!(OscillatorConfig::isotropic(-1.0).is_err());
        assert!(OscillatorConfig::isotropic(1.0)
            .unwrap()
            .with_hbar(0.0)
            .is_err());
    }

    #[test]
    fn isotropic_levels() {
        let c = OscillatorConfig::isotropic(1.0).unwrap();
        let levels = exact_levels(&c, 3.5);
        let summary: Vec<_> = levels.iter().map(|l| (l.energy, l.degeneracy)).collect();
        assert_eq!(summary, vec![(1.0, 1), (2.0, 2), (3.0, 3)]);
        assert!(exact_levels(&c, 0.0).is_empty());
        assert!(exact_levels(&c, -1.0).is_empty());
    }

    #[test]
    fn commensurate_levels_examples() {
        let c = OscillatorConfig::commensurate(3, 2, 1.0).unwrap();
        let levels = exact_levels(&c, 3.0);
        assert_eq!(levels[0].energy, 5.0 / 12.0);
        assert_eq!(levels[0].degeneracy, 1);
        assert_eq!(levels[0].irrep, Some(Irrep::TRIVIAL));
        let l = levels
            .iter()
            .find(|l| (l.energy - 17.0 / 12.0).abs() < 1e-12)
            .unwrap();
        assert_eq!(l.degeneracy, 2);
        let mut members = l.members.clone();
        members.sort();
        assert_eq!(members, vec![(0, 2), (3, 0)]);
    }

    #[test]
    fn degeneracy_matches_lattice_point_count() {
        // oracle: direct count of lattice points below e_max
        for (k1, k2) in [(3u32, 2u32), (5, 4), (2, 1)] {
            let c = OscillatorConfig::commensurate(k1, k2, 1.0).unwrap();
            let e_max = 12.0;
            let total: u64 = exact_levels(&c, e_max).iter().map(|l| l.degeneracy).sum();
            let mut count = 0;
            for nu1 in 0..200u64 {
                for nu2 in 0..200u64 {
                    let e = (nu1 as f64 + 0.5) / f64::from(k1) + (nu2 as f64 + 0.5) / f64::from(k2);
                    if e <= e_max + 1e-12 {
                        count += 1;
                    }
                }
            }
            assert_eq!(total, count);
        }
        let c = OscillatorConfig::incommensurate(1.0, GOLDEN).unwrap();
        let total: u64 = exact_levels(&c, 15.0).iter().map(|l| l.degeneracy).sum();
        let mut count = 0;
        for nu1 in 0..40u64 {
            for nu2 in 0..40u64 {
                if nu1 as f64 + 0.5 + GOLDEN * (nu2 as f64 + 0.5) <= 15.0 {
                    count += 1;
                }
            }
        }
        assert_eq!(total, count);
    }

    #[test]
    fn merged_levels_share_one_irrep() {
        for (k1, k2) in [(3u32, 2u32), (5, 4)] {
            let c = OscillatorConfig::commensurate(k1, k2, 1.0).unwrap();
            for level in exact_levels(&c, 30.0) {
                let label = level.irrep.unwrap();
                assert_eq!(level.degeneracy as usize, level.members.len());
                for &(nu1, nu2) in &level.members {
                    let d = decompose_quantum_numbers(nu1, nu2, k1, k2);
                    assert_eq!((d.lambda1, d.lambda2), (label.lambda1, label.lambda2));
                    let e = ratio_to_f64(level_energy_units(nu1, nu2, k1, k2));
                    assert!((e - level.energy).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_quantum_numbers(7, 3, 3, 2);
        assert_eq!((d.n1, d.lambda1, d.n2, d.lambda2), (2, 1, 1, 1));
        let d = decompose_quantum_numbers(0, 0, 4, 7);
        assert_eq!((d.n1, d.lambda1, d.n2, d.lambda2), (0, 0, 0, 0));
        let d = decompose_quantum_numbers(5, 4, 5, 4);
        assert_eq!((d.n1, d.lambda1, d.n2, d.lambda2), (1, 0, 1, 0));
    }

    #[test]
    fn commensurate_energy_examples() {
        let c = OscillatorConfig::commensurate(3, 2, 1.0).unwrap();
        assert_eq!(commensurate_energy(0, 0, 0, 0, &c).unwrap(), 5.0 / 12.0);
        assert_eq!(commensurate_energy(1, 0, 0, 0, &c).unwrap(), 17.0 / 12.0);
        assert_eq!(commensurate_energy(0, 0, 2, 1, &c).unwrap(), 19.0 / 12.0);
        assert!(commensurate_energy(0, 0, 3, 0, &c).is_err());
        let iso = OscillatorConfig::isotropic(1.0).unwrap();
        assert!(matches!(
            commensurate_energy(0, 0, 0, 0, &iso),
            Err(Error::WrongRegime { .. })
        ));
    }

    #[test]
    fn classical_dos_examples() {
        let iso = OscillatorConfig::isotropic(1.0).unwrap();
        assert_eq!(classical_dos(&iso, 2.0), 2.0);
        assert_eq!(classical_dos(&iso, 0.0), 0.0);
        assert_eq!(classical_dos(&iso, -3.0), 0.0);
        let c = OscillatorConfig::commensurate(3, 2, 1.0).unwrap();
        assert!((classical_dos(&c, 1.0) - 6.0).abs() < 1e-12);
    }

    /// Boltzmann sum over an explicit lattice, independent of `exact_levels`.
    fn boltzmann_oracle(w1: f64, w2: f64, beta: f64) -> f64 {
        let mut z = 0.0;
        for nu1 in 0..200 {
            for nu2 in 0..200 {
                z += (-beta * (w1 * (nu1 as f64 + 0.5) + w2 * (nu2 as f64 + 0.5))).exp();
            }
        }
        z
    }

    #[test]
    fn partition_function_closed_examples() {
        let iso = OscillatorConfig::isotropic(1.0).unwrap();
        let z = partition_function_closed(&iso, 1.0).unwrap();
        assert!((z - boltzmann_oracle(1.0, 1.0, 1.0)).abs() < 1e-12);
        assert!((z - 0.920_673_594_2).abs() < 1e-9);

        let gold = OscillatorConfig::incommensurate(1.0, GOLDEN).unwrap();
        let z = partition_function_closed(&gold, 1.0).unwrap();
        assert!((z - boltzmann_oracle(1.0, GOLDEN, 1.0)).abs() < 1e-12);
        assert!((z - 0.532_945_655_1).abs() < 1e-9);

        // low temperature: ground state dominates
        let beta = 40.0;
        let z = partition_function_closed(&iso, beta).unwrap();
        assert!((z / (-beta).exp() - 1.0).abs() < 1e-12);

        assert!(partition_function_closed(&iso, 0.0).is_err());
        assert!(partition_function_closed(&iso, -1.0).is_err());
    }

    #[test]
    fn partition_function_from_levels_examples() {
        let single = vec![Level {
            energy: 1.0,
            degeneracy: 1,
            members: vec![(0, 0)],
            irrep: None,
        }];
        assert_eq!(
            partition_function_from_levels(&single, 1.0),
            (-1.0f64).exp()
        );
        assert_eq!(partition_function_from_levels(&[], 1.0), 0.0);

        let iso = OscillatorConfig::isotropic(1.0).unwrap();
        let levels = exact_levels(&iso, 60.0);
        let z = partition_function_from_levels(&levels, 1.0);
        let closed = partition_function_closed(&iso, 1.0).unwrap();
        assert!((z - closed).abs() < 1e-12);

        for beta in [0.3, 1.0, 2.5] {
            let z1 = partition_function_from_levels(&levels, beta);
            let z2 = partition_function_from_levels(&levels, 2.0 * beta);
            assert!(z2 <= z1 * z1);
        }
    }

    #[test]
    fn truncated_sum_converges_within_remainder_bound() {
        let iso = OscillatorConfig::isotropic(1.0).unwrap();
        let beta = 0.5;
        let closed = partition_function_closed(&iso, beta).unwrap();
        for e_max in [10.0, 20.0, 40.0] {
            let z = partition_function_from_levels(&exact_levels(&iso, e_max), beta);
            // omitted levels E = N > e_max carry degeneracy N; Σ_{N≥n0} N q^N in closed form
            let n0 = e_max.floor() + 1.0;
            let q = (-beta).exp();
            let tail = q.powf(n0) * (n0 / (1.0 - q) + q / (1.0 - q).powi(2));
            assert!(closed - z >= 0.0);
            assert!(closed - z <= tail * (1.0 + 1e-9));
        }
        let bound = partition_remainder_bound(1.0, 10.0, 1.0, 1.0);
        assert!((bound - (-10.0f64).exp() / (1.0 - (-1.0f64).exp())).abs() < 1e-18);
    }
}
