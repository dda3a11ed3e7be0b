use thiserror::Error;

/// Errors shared by all modules.
///
/// Variants are named after the precondition they report rather than the
/// module that raises them; several are raised from more than one place.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The morphism has no infinite iterative fixed point at its start
    /// letter: the image of the start letter does not begin with the letter,
    /// or expansion stalls because every remaining letter eventually erases.
    #[error("morphism is not prolongable at its start letter: {0}")]
    NotProlongable(String),

    /// A target letter occurs too rarely in the inspected prefix for the
    /// requested statistic.
    #[error("letter `{target}` occurs only {found} time(s) within the horizon (need {needed})")]
    InsufficientOccurrences {
        target: String,
        found: usize,
        needed: usize,
    },

    /// All eigenvalues are zero, so there is no dominant eigenvalue.
    #[error("matrix is nilpotent; no dominant eigenvalue")]
    NilpotentMatrix,

    /// An operation requiring primitivity was called on a non-primitive
    /// matrix.
    #[error("matrix is not primitive")]
    NotPrimitive,

    /// An operation requiring an invertible matrix was called on a singular
    /// one.
    #[error("matrix is singular (determinant zero)")]
    SingularMatrix,

    /// A DFAO was requested from a morphism whose images do not all have the
    /// same length.
    #[error("morphism is not uniform: {0}")]
    NotUniform(String),

    /// The requested horizon cannot support the analysis.
    #[error("horizon {got} is too small (need at least {needed})")]
    HorizonTooSmall { needed: u64, got: u64 },

    /// A gap/occurrence test needs more occurrences of the symbol.
    #[error("symbol `{symbol}` occurs {found} time(s) within the horizon (need {needed})")]
    TooFewOccurrences {
        symbol: String,
        found: u64,
        needed: u64,
    },

    /// The ratio test was applied to a symbol whose empirical frequency is
    /// not small enough to stand in for frequency zero.
    #[error("empirical frequency {freq} of `{symbol}` is not below {threshold}")]
    FrequencyNotSmall {
        symbol: String,
        freq: f64,
        threshold: f64,
    },

    /// A polynomial with rational coefficients did not take integer values on
    /// the tested range.
    #[error("polynomial is not integer-valued at n = {at}")]
    NotIntegerValued { at: i64 },

    /// Unknown generator name in a sequence spec.
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    /// A parameter was syntactically valid but out of the supported range.
    #[error("invalid parameter: {0}")]
    ParameterInvalid(String),

    /// An operation needed more of a fixed (non-extensible) prefix than is
    /// available.
    #[error("prefix holds {got} symbols but {needed} are required")]
    PrefixTooShort { needed: u64, got: u64 },

    /// A theorem's standing hypothesis is violated by the input.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// The coboundary lattice analysis only covers height one; the observed
    /// return-word gcd is larger.
    #[error("height {0} > 1: the height-one lattice argument does not apply")]
    HeightNotOne(u64),

    /// New length-`ell` blocks were still being discovered at the end of the
    /// scan, so the block alphabet cannot be trusted.
    #[error("block alphabet for length {ell} is unstable within the scanned prefix")]
    BlockAlphabetUnstable { ell: usize },

    /// An alphabet (or block alphabet) exceeded the 255-symbol ceiling.
    #[error("alphabet too large: {0} symbols (maximum 255)")]
    AlphabetTooLarge(usize),

    /// A morphism/sequence spec file failed to parse.
    #[error("parse error on line {line}: {msg}")]
    SpecParse { line: usize, msg: String },

    /// Exact factorization exceeded its combinatorial budget.
    #[error("factorization budget exceeded for degree-{degree} polynomial")]
    FactorizationLimit { degree: usize },
}
