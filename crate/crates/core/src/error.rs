use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("invalid parameter `{name}`: {msg}")]
    Param { name: &'static str, msg: String },

    #[error("unknown word {lemma}/{pos}")]
    UnknownWord { lemma: String, pos: String },

    #[error("no candidate sense of {lemma}/{pos} has a vector")]
    NoVectors { lemma: String, pos: String },

    #[error("only one class present in training labels")]
    SingleClass,

    #[error("misaligned evaluation sets: {0}")]
    Misaligned(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn param(name: &'static str, msg: impl Into<String>) -> Self {
        Error::Param { name, msg: msg.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
