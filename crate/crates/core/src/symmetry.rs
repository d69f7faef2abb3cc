//! The cyclic product group `C = C₁ × C₂` generated by rotating each mode's
//! angle by `2π/kᵢ`, its one-dimensional irreps, and the character sums that
//! enter the symmetry-reduced trace formulas.
//!
//! Characters are evaluated through [`Phase`], so every statement that is
//! exact in the group (orthogonality, the divisibility selection rule) is
//! exact here too.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase::{Phase, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicProductGroup {
    k1: u32,
    k2: u32,
}

impl CyclicProductGroup {
    pub fn new(k1: u32, k2: u32) -> Result<Self> {
        if k1 == 0 || k2 == 0 {
            return Err(Error::Domain(format!(
                "group orders must be positive, got ({k1}, {k2})"
            )));
        }
        if k1.gcd(&k2) != 1 {
            return Err(Error::NotCoprime { k1, k2 });
        }
        Ok(Self { k1, k2 })
    }

    pub fn k1(&self) -> u32 {
        self.k1
    }

    pub fn k2(&self) -> u32 {
        self.k2
    }

    pub fn order(&self) -> u64 {
        u64::from(self.k1) * u64::from(self.k2)
    }

    /// All irreps, `λ₁` major.
    pub fn irreps(&self) -> impl Iterator<Item = Irrep> + '_ {
        (0..self.k1).flat_map(move |l1| {
            (0..self.k2).map(move |l2| Irrep {
                lambda1: l1,
                lambda2: l2,
            })
        })
    }

    pub fn contains(&self, irrep: Irrep) -> bool {
        irrep.lambda1 < self.k1 && irrep.lambda2 < self.k2
    }

    fn check(&self, irrep: Irrep) -> Result<()> {
        if self.contains(irrep) {
            Ok(())
        } else {
            Err(Error::IrrepOutOfRange {
                lambda1: irrep.lambda1,
                lambda2: irrep.lambda2,
                k1: self.k1,
                k2: self.k2,
            })
        }
    }
}

/// Irrep label `(λ₁, λ₂)`. All irreps of an abelian group are one-dimensional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Irrep {
    pub lambda1: u32,
    pub lambda2: u32,
}

impl Irrep {
    pub const TRIVIAL: Irrep = Irrep {
        lambda1: 0,
        lambda2: 0,
    };

    pub fn new(lambda1: u32, lambda2: u32, group: &CyclicProductGroup) -> Result<Self> {
        let irrep = Irrep { lambda1, lambda2 };
        group.check(irrep)?;
        Ok(irrep)
    }

    pub fn dimension(&self) -> u32 {
        1
    }
}

/// `ζ = λ₁/k₁ + λ₂/k₂`, not reduced mod 1.
pub fn zeta(irrep: Irrep, group: &CyclicProductGroup) -> Result<Rational> {
    group.check(irrep)?;
    Ok(Ratio::new(i64::from(irrep.lambda1), i64::from(group.k1))
        + Ratio::new(i64::from(irrep.lambda2), i64::from(group.k2)))
}

/// Phase of the character of `c_g^s`, i.e. `s·ζ mod 1`.
pub fn character_phase(irrep: Irrep, group: &CyclicProductGroup, s: i64) -> Result<Phase> {
    Ok(Phase::from(zeta(irrep, group)?) * s)
}

/// Character `X(c_g^s) = exp(2πi·s·ζ)`.
pub fn character(irrep: Irrep, group: &CyclicProductGroup, s: i64) -> Result<Complex64> {
    Ok(character_phase(irrep, group, s)?.unit_complex())
}

/// Scalar coefficient of `U(c_g^s)` in the projector onto `irrep`:
/// `(d/|C|)·conj(X(c_g^s))` with `d = 1`.
pub fn projection_weight(irrep: Irrep, group: &CyclicProductGroup, s: i64) -> Result<Complex64> {
    let chi = character(irrep, group, s)?;
    Ok(chi.conj() * (f64::from(irrep.dimension()) / group.order() as f64))
}

/// `Σ_irreps exp(−2πi·r·ζ)`: `k₁k₂` when `k₁k₂ | r`, otherwise `0`.
///
/// The double sum factorises into one geometric sum of `kᵢ`-th roots of
/// unity per mode; each is `kᵢ` when the step phase `r/kᵢ` is an integer and
/// vanishes otherwise.
pub fn character_sum_selection(r: i64, group: &CyclicProductGroup) -> i64 {
    let mode_sum = |k: u32| {
        let k = i64::from(k);
        if Phase::new(r, k).is_zero() {
            k
        } else {
            0
        }
    };
    mode_sum(group.k1) * mode_sum(group.k2)
}

/// `(1/|C|)·Σ_s X_a(c_g^s)·conj(X_b(c_g^s))` evaluated exactly.
pub fn character_inner_product(a: Irrep, b: Irrep, group: &CyclicProductGroup) -> Result<i64> {
    let diff = Phase::from(zeta(a, group)? - zeta(b, group)?);
    // the sum over a full period of c_g is |C| when the phase step vanishes, else 0
    Ok(if diff.is_zero() { 1 } else { 0 })
}
