use thiserror::Error;

/// Everything that can go wrong while building or evolving states.
#[derive(Debug, Error)]
pub enum Error {
    #[error("factor `{0}` has zero dimension")]
    ZeroDimension(String),
    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("factor lists of the two operands differ")]
    FactorMismatch,
    #[error("keep list must be a nonempty subset given in the original factor order")]
    BadKeepList,
    #[error("state norm {norm} deviates from 1 by more than {tol}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("cannot normalize a state with vanishing norm")]
    ZeroNorm,
    #[error("matrix deviates from Hermitian symmetry by {0:e}")]
    NotHermitian(f64),
    #[error("matrix deviates from unitarity by {0:e}")]
    NotUnitary(f64),
    #[error("operator trace {0} deviates from 1")]
    BadTrace(f64),
    #[error("operator has eigenvalue {0:e} below the positivity floor")]
    NotPositive(f64),
    #[error("time must be nonnegative and finite, got {0}")]
    BadTime(f64),
    #[error("decay rate must be positive and finite, got {0}")]
    BadDecayRate(f64),
    #[error("Fock cutoff {cutoff} truncates a coherent state with |alpha| = {modulus}; need cutoff >= {required}")]
    CutoffTooSmall {
        cutoff: usize,
        required: usize,
        modulus: f64,
    },
    #[error("level `{level}` does not exist in atom `{atom}`")]
    UnknownLevel { atom: String, level: String },
    #[error("atom `{0}` has no third level to erase into")]
    NoEraseLevel(String),
    #[error("erase level of atom `{atom}` already holds population {population:e}")]
    EraseLevelPopulated { atom: String, population: f64 },
    #[error("state has no amplitude on the erasable levels of atom `{0}`")]
    NothingToErase(String),
    #[error("cat-state projectors are degenerate for |alpha|^2 = {0:e}")]
    DegenerateCat(f64),
    #[error("coefficient vector must have between {min} and {max} entries, got {got}")]
    BadCoefficientCount { min: usize, max: usize, got: usize },
    #[error("expectation value has imaginary part {0:e}")]
    NotReal(f64),
    #[error("levels list must hold {min}..={max} unique names, got {got}")]
    BadLevelList { min: usize, max: usize, got: usize },
    #[error("operation needs exactly one Fock factor in scope, found {0}")]
    AmbiguousFockFactor(usize),
    #[error("{0}")]
    Unsupported(String),
}
