use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("overdamped oscillator: Ω² = {omega_sq:e} ≤ γ²/4 = {quarter_gamma_sq:e}")]
    Overdamped { omega_sq: f64, quarter_gamma_sq: f64 },

    #[error("invalid parameter `{name}` = {value:e}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("frequency {nu:e} rad/s lies outside the tabulated range [{lo:e}, {hi:e}]")]
    Extrapolation { nu: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {subdivisions} subdivisions")]
    Quadrature { value: f64, error: f64, subdivisions: usize },

    #[error("integral does not exist: {0}")]
    Divergent(&'static str),

    #[error("polynomial is degenerate: leading coefficient {0:e}")]
    DegeneratePolynomial(f64),

    #[error("eigenvalue iteration failed to converge")]
    EigenNoConvergence,

    #[error("singular linear system")]
    Singular,

    #[error("matrix is not Hurwitz (max Re λ = {max_re:e})")]
    NotHurwitz { max_re: f64 },

    #[error("roots do not pair as {{ν, -conj(ν)}} (mismatch {mismatch:e})")]
    DegeneratePairing { mismatch: f64 },

    #[error("no exact resonant branch applies: {0}")]
    BranchCondition(&'static str),

    #[error("approximate poles outside validity region: {quantity} = {value:e} ≥ {threshold:e}")]
    Validity { quantity: &'static str, value: f64, threshold: f64 },

    #[error("squared effective frequency is negative: {name} = {value:e}")]
    NegativeSquaredFrequency { name: &'static str, value: f64 },

    #[error("operation requires a flat occupation spectrum")]
    StructuredSpectrum,

    #[error("operating point is unstable")]
    Unstable,
}
