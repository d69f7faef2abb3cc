use serde::Serialize;

use crate::error::{Error, Result};
use crate::symmetry::Irrep;

/// One additive piece of a semiclassical density of states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Contribution {
    /// Thomas–Fermi term `E/ħ²ω₁ω₂` (or `1/ħω` in one dimension).
    Classical,
    /// Classical term of one symmetry sector, `ρ̄/k₁k₂`.
    ReducedClassical(Irrep),
    /// Repetitions of the normal-mode orbit along axis `mode`.
    NormalModeOrbits(u8),
    /// The SU(2) family of the isotropic oscillator.
    IsotropicFamily,
    /// Full Lissajous curves, summed over all symmetry sectors.
    LissajousFamily,
    /// Reduced Lissajous segments in one symmetry sector.
    ReducedFamily(Irrep),
    /// Isolated normal-mode orbits of a commensurate oscillator.
    IsolatedOrbits(u8),
    /// Repetitions of the one-dimensional oscillator orbit.
    OneDimensional,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    ReducedExact {
        irrep: Irrep,
    },
    Semiclassical {
        contributions: Vec<Contribution>,
        damping_eps: f64,
    },
}

/// Gaussian-broadened density on an ascending energy grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DosSeries {
    energies: Vec<f64>,
    values: Vec<f64>,
    width: f64,
    provenance: Provenance,
}

impl DosSeries {
    pub fn new(
        energies: Vec<f64>,
        values: Vec<f64>,
        width: f64,
        provenance: Provenance,
    ) -> Result<Self> {
        if energies.len() != values.len() {
            return Err(Error::SeriesMismatch(format!(
                "{} energies but {} values",
                energies.len(),
                values.len()
            )));
        }
        check_grid(&energies)?;
        if !(width > 0.0) {
            return Err(Error::Domain(format!(
                "smoothing width must be positive, got {width}"
            )));
        }
        Ok(Self {
            energies,
            values,
            width,
            provenance,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.energies
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }
}

pub(crate) fn check_grid(energies: &[f64]) -> Result<()> {
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::Domain(
            "energy grid contains non-finite values".into(),
        ));
    }
    if energies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "energy grid must be strictly ascending".into(),
        ));
    }
    Ok(())
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(start < stop) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Domain(format!(
            "grid needs start < stop and at least two points, got {start}:{stop}:{count}"
        )));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        let g = linear_grid(0.0, 1.0, 5).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(linear_grid(1.0, 1.0, 5).is_err());
        assert!(linear_grid(0.0, 1.0, 1).is_err());
        let bad = DosSeries::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.1, Provenance::Exact);
        assert!(bad.is_err());
        let bad = DosSeries::new(vec![0.0, 1.0], vec![1.0], 0.1, Provenance::Exact);
        assert!(matches!(bad, Err(Error::SeriesMismatch(_))));
        assert!(DosSeries::new(vec![0.0, 1.0], vec![1.0, 2.0], 0.0, Provenance::Exact).is_err());
    }
}
