//! One error type for the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Field too close to the 3D resonance pole B0 for a(B) to mean anything.
    #[error("field {b_gauss} G is within {epsilon_gauss} G of the resonance pole")]
    ResonancePole { b_gauss: f64, epsilon_gauss: f64 },

    /// |a| below the guard epsilon; a_1d would divide by ~0.
    #[error("3D scattering length {a_m} m is below the zero guard {epsilon_m} m")]
    ZeroScatteringLength { a_m: f64, epsilon_m: f64 },

    /// |a_1d| below the floor: the sweep runs into the confinement-induced
    /// resonance where the contact coupling diverges.
    #[error("1D scattering length magnitude {a1d_m} m under the divergence floor {floor_m} m")]
    DivergentCoupling { a1d_m: f64, floor_m: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid spacing {spacing_m} m too coarse; need <= {required_m} m to resolve the state")]
    GridTooCoarse { spacing_m: f64, required_m: f64 },

    #[error(
        "grid half-width {half_width_m} m too small; need >= {required_m} m to contain the state"
    )]
    GridTooSmall { half_width_m: f64, required_m: f64 },

    #[error("sweep schedule rejected: {0}")]
    Schedule(String),

    /// Probability piling up near the box edge: the domain is too small for
    /// this evolution time.
    #[error("boundary leak {leak:.3e} exceeds tolerance {tolerance:.3e} at t = {time_s} s")]
    BoundaryLeak { time_s: f64, leak: f64, tolerance: f64 },

    #[error("wavefunction time {psi_time_s} s does not match packet time {packet_time_s} s")]
    TimeMismatch { psi_time_s: f64, packet_time_s: f64 },

    /// No anti-correlated signal to normalize against.
    #[error("opposite-side probability {opposite_pn:.3e} too small to form kappa")]
    DegenerateQuadrants { opposite_pn: f64 },

    #[error("relaxation did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("unknown mode label '{0}'")]
    UnknownMode(String),

    #[error("mode map is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("state is not normalized (sum of squares = {norm})")]
    NotNormalized { norm: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("tridiagonal solve hit a near-zero pivot at row {row}")]
    SingularPivot { row: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }
}
