use thiserror::Error;

use crate::automaton::Violation;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid automaton: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("symbol `{0}` is used with two different ranks")]
    RankConflict(String),
    #[error("alphabets differ")]
    AlphabetMismatch,
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("relation has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("relation is not {0}")]
    NotA(&'static str),
    #[error("prune spec needs exactly one strict side")]
    Strictness,
}

#[derive(Debug, Error)]
pub enum SaturationError {
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("saturation would add more than {budget} transitions")]
    Budget { budget: usize },
}

#[derive(Debug, Error)]
pub enum ComplementError {
    #[error("determinization exceeded {budget} {what}")]
    Budget { what: &'static str, budget: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Crate-wide error used by pipelines and the command line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Parse(#[from] crate::io::ParseError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Saturation(#[from] SaturationError),
    #[error(transparent)]
    Complement(#[from] ComplementError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

impl Error {
    /// Exit status used by the command line tool: 2 for bad input, 3 for an
    /// exhausted budget, 4 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Model(_) | Error::Io(_) => 2,
            Error::Saturation(SaturationError::Budget { .. })
            | Error::Complement(ComplementError::Budget { .. }) => 3,
            _ => 4,
        }
    }
}
