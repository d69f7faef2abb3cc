use thiserror::Error;

/// Errors raised by the spectral and dynamical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation requires a {expected} oscillator, got {found}")]
    WrongRegime {
        expected: &'static str,
        found: &'static str,
    },

    #[error("k1 = {k1} and k2 = {k2} are not coprime")]
    NotCoprime { k1: u32, k2: u32 },

    #[error("irrep ({lambda1}, {lambda2}) out of range for k = ({k1}, {k2})")]
    IrrepOutOfRange {
        lambda1: u32,
        lambda2: u32,
        k1: u32,
        k2: u32,
    },

    #[error(
        "small divisor in normal-mode {mode} series at repetition r = {r}: \
         |sin| = {value:e} below floor {floor:e}"
    )]
    SmallDivisor {
        mode: u8,
        r: u64,
        value: f64,
        floor: f64,
    },

    #[error("angle undefined for a mode with zero action")]
    ZeroAction,

    #[error("series mismatch: {0}")]
    SeriesMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
