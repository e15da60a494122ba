use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("elements belong to different towers ({0} vs {1})")]
    TowerMismatch(String, String),
    #[error("element is not a unit")]
    NonUnit,
    #[error("element is zero at working precision")]
    ZeroElement,
    #[error("requested {requested} digits but working precision is {available}")]
    PrecisionExceeded { requested: usize, available: usize },
    #[error("polynomial {0} is reducible over the residue field")]
    Reducible(String),
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("no Galois action available: {0}")]
    MissingGaloisAction(String),
    #[error("extension is not at most {0}-ramified (largest upper break {1})")]
    NotAtMostRamified(usize, String),
    #[error("residue fields differ: {0}")]
    ResidueMismatch(String),
    #[error("fields are not {level}-close: {reason}")]
    NotClose { level: usize, reason: String },
    #[error("transfer failed: {0}")]
    TransferFailed(String),
    #[error("unsupported construction: {0}")]
    Unsupported(String),
    #[error("enumeration of {what} exceeds the bound {bound}")]
    EnumerationLimit { what: String, bound: usize },
    #[error("maps do not form a group action: {0}")]
    NotGroupAction(String),
    #[error("map is not Galois-equivariant: {0}")]
    NotEquivariant(String),
    #[error("torus is not weakly induced; the minimal congruent filtration needs Neron-model machinery")]
    NotWeaklyInduced,
    #[error("level condition r << l violated: {0}")]
    LevelCondition(String),
    #[error("level arithmetic violated: {0}")]
    LevelMismatch(String),
    #[error("homomorphism is not well defined: {0}")]
    IllDefined(String),
    #[error("element is not Galois-fixed")]
    NotFixed,
    #[error("{0}")]
    Undetermined(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown name {0}")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;
