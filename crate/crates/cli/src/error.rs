use afftool_core::Error as CoreError;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("n = {n} exceeds AFFTOOL_MAX_DIM = {max}")]
    TooLarge { n: usize, max: usize },

    #[error("{0}")]
    Schema(String),
}

impl CliError {
    /// 2 schema, 3 precondition, 4 evaluation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::TooLarge { .. } | CliError::Schema(_) => 2,
            CliError::Core(e) => match e {
                CoreError::DimensionMismatch(_)
                | CoreError::NotUnimodular(_)
                | CoreError::InvalidInput(_)
                | CoreError::SymbolConflict(_) => 2,
                CoreError::UnresolvedSymbol(_) => 4,
                CoreError::DegreeTooLarge { .. }
                | CoreError::CyclotomicIndexOutOfRange(_)
                | CoreError::Precondition(_)
                | CoreError::NotAFactor
                | CoreError::ClusteringAmbiguity(_)
                | CoreError::JacobiFailure(..)
                | CoreError::NotNilpotent
                | CoreError::SearchLimit(_) => 3,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "schema",
            3 => "precondition",
            _ => "evaluation",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut err = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Core(CoreError::JacobiFailure(i, j, k)) = self {
            err["triple"] = json!([i, j, k]);
        }
        if let CliError::Core(CoreError::UnresolvedSymbol(s)) = self {
            err["symbol"] = json!(s);
        }
        json!({ "error": err })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
