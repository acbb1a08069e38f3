use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level must be a positive integer, got {0}")]
    InvalidLevel(i64),
    #[error("weight must be a half-integer, got 2k = {0}")]
    InvalidWeight(i64),
    #[error("{c} is not an exact divisor of {level}")]
    NotExactDivisor { level: i64, c: i64 },
    #[error("{d} does not divide {level}")]
    NotDivisor { level: i64, d: i64 },
    #[error("{0} must be a positive integer")]
    NotPositive(&'static str),
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("prime {p} divides 2N = {modulus}")]
    PrimeDividesLevel { p: i64, modulus: i64 },
    #[error("residue {gamma} is outside [0, {modulus})")]
    ResidueOutOfRange { gamma: i64, modulus: i64 },
    #[error("coefficient at (n={n}, gamma={gamma}) violates the support rule")]
    Support { n: i64, gamma: i64 },
    #[error("coefficients at (n={n}, gamma={gamma}) and its negative violate the symmetry rule")]
    Symmetry { n: i64, gamma: i64 },
    #[error("non-holomorphic coefficient at positive index n={0}")]
    NonholoIndex(i64),
    #[error("insufficient truncation: need {needed}, have {have}")]
    Truncation { needed: i64, have: i64 },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(i64, i64),
    #[error("incompatible expansions: {0}")]
    Incompatible(&'static str),
    #[error("not in span of M_{{1/2,rho_N}} up to truncation")]
    NotInSpan,
    #[error("basis is linearly dependent on the pivot slots")]
    DependentBasis,
    #[error("Weyl vector requires external input for non-holomorphic f")]
    NonHolomorphic,
    #[error("expected a weight 1/2 expansion for rho_N")]
    NotWeightHalfRho,
    #[error("cusp divisor is not Fricke-invariant: ord({c}) != ord({partner})")]
    NotFrickeInvariant { c: i64, partner: i64 },
    #[error("matching matrix is singular at level {0}")]
    SingularMatching(i64),
    #[error("index (n={n}, gamma={gamma}) is not a Heegner index for level {level}")]
    HeegnerIndex { level: i64, n: i64, gamma: i64 },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
