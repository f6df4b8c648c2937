//! Error types shared across the library.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum PqepError {
    /// Matrix dimensions do not conform for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An eigenvalue has no partner under the flavor's pairing map.
    #[error(
        "pairing violation: eigenvalue {re}{im:+}i has no partner 1/lambda^* within tolerance"
    )]
    PairingViolation { re: f64, im: f64 },
    /// Multiplicities of +1/-1 break the flavor's parity rule.
    #[error("parity violation: {0}")]
    ParityViolation(String),
    /// A zero (or near-zero) eigenvalue was prescribed; A would be singular.
    #[error("zero eigenvalue in spectrum (|lambda| = {0:.3e})")]
    ZeroEigenvalue(f64),
    /// A defective Jordan structure was requested where only simple spectra are supported.
    #[error("unsupported defective structure: {0}")]
    UnsupportedDefective(String),
    /// The 2n x 2n assembly used to define Gamma is numerically singular.
    #[error("singular assembly: {0}")]
    SingularAssembly(String),
    /// The supplied (X, J) is not a standard pair of the polynomial.
    #[error("not a standard pair: residual {residual:.3e} exceeds {limit:.3e}")]
    NotAStandardPair { residual: f64, limit: f64 },
    /// The supplied (X1, Lambda1) are not eigenpairs of the polynomial.
    #[error("not eigenpairs: residual {residual:.3e} exceeds {limit:.3e}")]
    NotEigenpairs { residual: f64, limit: f64 },
    /// J (or Lambda) is singular.
    #[error("singular spectral matrix")]
    SingularJ,
    /// Simple modulus-one eigenvalues requested where the flavor admits none.
    #[error("unimodular eigenvalue unsupported here: {0}")]
    UnimodularUnsupported(String),
    /// A block's inertia/structure is incompatible with the canonical skew form.
    #[error("not congruent to the canonical form: {0}")]
    NotCongruent(String),
    /// X J Gamma X^* is numerically singular; no coefficients can be recovered.
    #[error("singular core: {0}")]
    SingularCore(String),
    /// ||X Gamma X^*|| is not negligible.
    #[error("condition violation: ||X Gamma X^*|| = {0:.3e} exceeds {1:.3e}")]
    ConditionViolation(f64, f64),
    /// Semi-simple normalization was asked for a defective structure.
    #[error("defective input: {0}")]
    DefectiveInput(String),
    /// An SVD block of Gamma has a vanishing singular value.
    #[error("singular block in Gamma: sigma_min = {0:.3e}")]
    SingularBlock(f64),
    /// A prescribed QIEP eigenvalue has modulus one.
    #[error("modulus-one eigenvalue {re}{im:+}i prescribed to the inverse problem")]
    UnimodularInSpectrum { re: f64, im: f64 },
    /// Every random draw produced an ill-conditioned core.
    #[error("retries exhausted after {0} draws")]
    RetriesExhausted(usize),
    /// The prescribed spectrum does not have even size 2n.
    #[error("spectrum size {0} is odd")]
    SpectrumSizeOdd(usize),
    /// Replacement categories cannot be matched by any congruence.
    #[error("category mismatch: {0}")]
    CategoryMismatch(String),
    /// The matrix inside the update inverse is singular.
    #[error("singular update: {0}")]
    SingularUpdate(String),
    /// An embedding request violates its invariants.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    /// A is singular where nonsingularity is a standing assumption.
    #[error("coefficient matrix A is singular (sigma_min/sigma_max = {0:.3e})")]
    SingularA(f64),
    /// The QR eigensolver failed to converge.
    #[error("eigensolver failed to converge on a {0}x{0} matrix")]
    ConvergenceFailure(usize),
    /// A matrix has NaN/Inf entries, or real-flavored data has imaginary parts.
    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),
    /// The structural identity Q^* = eps Q fails beyond tolerance.
    #[error("structure violation: {0}")]
    StructureViolation(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, PqepError>;
