//! Classical motion of the two uncoupled modes.
//!
//! Everything here is closed form except [`integrate_numeric`], which is a
//! plain velocity-Verlet integrator kept as an independent check on the
//! analytic propagation.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{FrequencyClass, OscillatorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PhaseState {
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    pub p2: f64,
}

impl PhaseState {
    pub const ORIGIN: PhaseState = PhaseState {
        q1: 0.0,
        p1: 0.0,
        q2: 0.0,
        p2: 0.0,
    };

    pub fn new(q1: f64, p1: f64, q2: f64, p2: f64) -> Self {
        Self { q1, p1, q2, p2 }
    }

    pub fn from_modes((q1, p1): (f64, f64), (q2, p2): (f64, f64)) -> Self {
        Self { q1, p1, q2, p2 }
    }

    pub fn mode1(&self) -> (f64, f64) {
        (self.q1, self.p1)
    }

    pub fn mode2(&self) -> (f64, f64) {
        (self.q2, self.p2)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.q1, self.p1, self.q2, self.p2]
    }

    pub fn from_array([q1, p1, q2, p2]: [f64; 4]) -> Self {
        Self { q1, p1, q2, p2 }
    }

    pub fn norm(&self) -> f64 {
        self.as_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|x| x.is_finite())
    }

    pub fn energy(&self, config: &OscillatorConfig) -> f64 {
        mode_energy(self.mode1(), config.mass(), config.omega1())
            + mode_energy(self.mode2(), config.mass(), config.omega2())
    }
}

/// `p²/2m + mω²q²/2` for one mode.
pub fn mode_energy((q, p): (f64, f64), m: f64, omega: f64) -> f64 {
    0.5 * p * p / m + 0.5 * m * omega * omega * q * q
}

/// Linear propagator of a single mode over a time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrizant2x2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Matrizant2x2 {
    pub const IDENTITY: Matrizant2x2 = Matrizant2x2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `det(X − 1)`.
    pub fn det_minus_identity(&self) -> f64 {
        (self.a - 1.0) * (self.d - 1.0) - self.b * self.c
    }

    pub fn apply(&self, (q, p): (f64, f64)) -> (f64, f64) {
        (self.a * q + self.b * p, self.c * q + self.d * p)
    }
}

pub fn matrizant(omega: f64, m: f64, t: f64) -> Matrizant2x2 {
    let (s, c) = (omega * t).sin_cos();
    Matrizant2x2 {
        a: c,
        b: s / (m * omega),
        c: -m * omega * s,
        d: c,
    }
}

/// `2|sin(π r ω_other/ω_orbit)|`, the transverse stability factor of the
/// `r`-th repetition of the normal-mode orbit with frequency `ω_orbit`.
/// Zero marks an orbit that belongs to a family.
pub fn stability_factor(omega_other: f64, omega_orbit: f64, r: u64) -> f64 {
    2.0 * (PI * r as f64 * omega_other / omega_orbit).sin().abs()
}

/// `√|det(X_other(r·2π/ω_orbit) − 1)|` from the propagator entries.
pub fn stability_factor_numeric(omega_other: f64, omega_orbit: f64, r: u64) -> f64 {
    let period = TAU / omega_orbit;
    matrizant(omega_other, 1.0, r as f64 * period)
        .det_minus_identity()
        .abs()
        .sqrt()
}

pub fn trajectory_analytic(
    config: &OscillatorConfig,
    init: PhaseState,
    t_grid: &[f64],
) -> Vec<PhaseState> {
    let m = config.mass();
    t_grid
        .iter()
        .map(|&t| {
            PhaseState::from_modes(
                matrizant(config.omega1(), m, t).apply(init.mode1()),
                matrizant(config.omega2(), m, t).apply(init.mode2()),
            )
        })
        .collect()
}

/// Shortest normal-mode period divided by 1000.
pub fn default_time_step(config: &OscillatorConfig) -> f64 {
    TAU / config.omega1().max(config.omega2()) / 1000.0
}

/// Velocity-Verlet integration of Hamilton's equations; returns
/// `steps + 1` states including `init`.
pub fn integrate_numeric(
    config: &OscillatorConfig,
    init: PhaseState,
    dt: f64,
    steps: usize,
) -> Result<Vec<PhaseState>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if steps == 0 {
        return Err(Error::Domain("at least one step is required".into()));
    }
    let m = config.mass();
    let k1 = m * config.omega1() * config.omega1();
    let k2 = m * config.omega2() * config.omega2();
    let mut s = init;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s);
    for _ in 0..steps {
        s.p1 -= 0.5 * dt * k1 * s.q1;
        s.p2 -= 0.5 * dt * k2 * s.q2;
        s.q1 += dt * s.p1 / m;
        s.q2 += dt * s.p2 / m;
        s.p1 -= 0.5 * dt * k1 * s.q1;
        s.p2 -= 0.5 * dt * k2 * s.q2;
        out.push(s);
    }
    Ok(out)
}

/// The three SU(2) generators of an isotropic oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct JVector {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
}

impl JVector {
    pub fn norm_sqr(&self) -> f64 {
        self.j1 * self.j1 + self.j2 * self.j2 + self.j3 * self.j3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.j1, self.j2, self.j3]
    }
}

pub fn conserved_j(state: &PhaseState, m: f64, omega: f64) -> JVector {
    let PhaseState { q1, p1, q2, p2 } = *state;
    JVector {
        j1: (p1 * p2 / m + m * omega * omega * q1 * q2) / (2.0 * omega),
        j2: 0.5 * (q1 * p2 - q2 * p1),
        j3: (mode_energy((q1, p1), m, omega) - mode_energy((q2, p2), m, omega)) / (2.0 * omega),
    }
}

/// Energy of the state if both modes had frequency `omega`.
pub fn isotropic_energy(state: &PhaseState, m: f64, omega: f64) -> f64 {
    mode_energy(state.mode1(), m, omega) + mode_energy(state.mode2(), m, omega)
}

/// `h = 1e-5·(1 + |state|)`.
pub fn default_bracket_step(state: &PhaseState) -> f64 {
    1e-5 * (1.0 + state.norm())
}

fn gradient<F: Fn(&PhaseState) -> f64>(f: &F, state: &PhaseState, h: f64) -> [f64; 4] {
    let x = state.as_array();
    let mut grad = [0.0; 4];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut up = x;
        let mut down = x;
        up[i] += h;
        down[i] -= h;
        *g = (f(&PhaseState::from_array(up)) - f(&PhaseState::from_array(down))) / (2.0 * h);
    }
    grad
}

/// Central-difference estimate of `{f, g} = Σᵢ ∂f/∂qᵢ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂qᵢ`.
pub fn poisson_bracket_numeric<F, G>(f: F, g: G, state: &PhaseState, h: f64) -> f64
where
    F: Fn(&PhaseState) -> f64,
    G: Fn(&PhaseState) -> f64,
{
    // layout is [q1, p1, q2, p2]
    let df = gradient(&f, state, h);
    let dg = gradient(&g, state, h);
    df[0] * dg[1] - df[1] * dg[0] + df[2] * dg[3] - df[3] * dg[2]
}

/// Action and angle of both modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionAngle {
    pub w1: f64,
    pub w2: f64,
    pub theta1: f64,
    pub theta2: f64,
}

/// Action `W = 2πE/ωᵢ` and angle of one mode with `ωᵢ = ω/k`.
///
/// The angle is the full-branch arctangent of `(mωq, kp)`, reduced to
/// `[0, 2π)`; it advances uniformly at rate `ωᵢ`.
pub fn action_angle((q, p): (f64, f64), m: f64, k: u32, omega: f64) -> Result<(f64, f64)> {
    let k = f64::from(k);
    let omega_i = omega / k;
    let energy = mode_energy((q, p), m, omega_i);
    if !(energy > 0.0) {
        return Err(Error::ZeroAction);
    }
    let theta = (m * omega * q).atan2(k * p).rem_euclid(TAU);
    Ok((TAU * energy / omega_i, theta))
}

pub fn action_angles(config: &OscillatorConfig, state: &PhaseState) -> Result<ActionAngle> {
    let (k1, k2) = config.winding().unwrap_or((1, 1));
    let m = config.mass();
    let (w1, theta1) = action_angle(state.mode1(), m, k1, f64::from(k1) * config.omega1())?;
    let (w2, theta2) = action_angle(state.mode2(), m, k2, f64::from(k2) * config.omega2())?;
    Ok(ActionAngle {
        w1,
        w2,
        theta1,
        theta2,
    })
}

/// `(W/k, kϑ mod 2π)`.
pub fn fold(w: f64, theta: f64, k: u32) -> (f64, f64) {
    let k = f64::from(k);
    (w / k, (k * theta).rem_euclid(TAU))
}

/// Image of a commensurate (or isotropic) state in the folded, isotropic
/// oscillator of frequency `ω`. A mode with zero action stays at its origin.
pub fn folded_state(config: &OscillatorConfig, state: &PhaseState) -> Result<PhaseState> {
    let (k1, k2) = config.winding().ok_or(Error::WrongRegime {
        expected: "commensurate",
        found: "incommensurate",
    })?;
    let m = config.mass();
    let omega = config.omega_ref();
    let fold_mode = |mode: (f64, f64), k: u32| -> (f64, f64) {
        match action_angle(mode, m, k, omega) {
            Ok((w, theta)) => {
                let (w_f, theta_f) = fold(w, theta, k);
                // folded mode is an oscillator of frequency ω with action w_f
                let energy = omega * w_f / TAU;
                let (s, c) = theta_f.sin_cos();
                (
                    (2.0 * energy / (m * omega * omega)).sqrt() * s,
                    (2.0 * m * energy).sqrt() * c,
                )
            }
            Err(_) => (0.0, 0.0),
        }
    };
    Ok(PhaseState::from_modes(
        fold_mode(state.mode1(), k1),
        fold_mode(state.mode2(), k2),
    ))
}

/// Point `(2ω/E)·J` on the unit sphere for a state of an isotropic (or
/// folded) oscillator of frequency `omega`.
pub fn bloch_point(state: &PhaseState, m: f64, omega: f64) -> Result<[f64; 3]> {
    let energy = isotropic_energy(state, m, omega);
    if !(energy > 0.0) {
        return Err(Error::Domain("Bloch point undefined at zero energy".into()));
    }
    let j = conserved_j(state, m, omega);
    let scale = 2.0 * omega / energy;
    Ok([scale * j.j1, scale * j.j2, scale * j.j3])
}

/// One time slice of a Lissajous orbit and the elementary torus cell it
/// starts in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub index: u64,
    pub t_start: f64,
    pub t_end: f64,
    pub cell: (u32, u32),
}

/// Splits one period `2πk₁k₂/ω` into `k₁k₂` slices of length `2π/ω`.
///
/// Slice `j` is labelled with `(⌊k₁ϑ₁/2π⌋, ⌊k₂ϑ₂/2π⌋)` at its start time.
/// Each slice advances `ϑᵢ` by exactly `2π/kᵢ`, so the label of slice `j` is
/// the initial label shifted by `(j, j)`; it is computed that way to avoid
/// rounding at cell borders. A mode with zero action is assigned angle 0.
pub fn segment_decomposition(config: &OscillatorConfig, init: PhaseState) -> Result<Vec<Segment>> {
    let (k1, k2) = match config.class() {
        FrequencyClass::Incommensurate => {
            return Err(Error::WrongRegime {
                expected: "commensurate",
                found: "incommensurate",
            })
        }
        _ => config.winding().expect("commensurate or isotropic"),
    };
    if !(init.energy(config) > 0.0) || !init.is_finite() {
        return Err(Error::Domain(
            "segments need a finite state with positive energy".into(),
        ));
    }
    let start = initial_cell(config, &init, k1, k2);
    let slice = TAU / config.omega_ref();
    let count = u64::from(k1) * u64::from(k2);
    Ok((0..count)
        .map(|j| Segment {
            index: j,
            t_start: j as f64 * slice,
            t_end: (j + 1) as f64 * slice,
            cell: shift_cell(start, j, k1, k2),
        })
        .collect())
}

/// Cell label of the slice containing time `t` (periodic in the orbit period).
pub fn cell_at_time(config: &OscillatorConfig, init: PhaseState, t: f64) -> Result<(u32, u32)> {
    let segments = segment_decomposition(config, init)?;
    let slice = TAU / config.omega_ref();
    let j = (t / slice).floor().rem_euclid(segments.len() as f64) as usize;
    Ok(segments[j.min(segments.len() - 1)].cell)
}

fn initial_cell(config: &OscillatorConfig, init: &PhaseState, k1: u32, k2: u32) -> (u32, u32) {
    let m = config.mass();
    let omega = config.omega_ref();
    let label = |mode: (f64, f64), k: u32| -> u32 {
        let theta = action_angle(mode, m, k, omega)
            .map(|(_, t)| t)
            .unwrap_or(0.0);
        ((theta * f64::from(k) / TAU).floor() as u32).min(k - 1)
    };
    (label(init.mode1(), k1), label(init.mode2(), k2))
}

fn shift_cell((l1, l2): (u32, u32), j: u64, k1: u32, k2: u32) -> (u32, u32) {
    (
        ((u64::from(l1) + j) % u64::from(k1)) as u32,
        ((u64::from(l2) + j) % u64::from(k2)) as u32,
    )
}
