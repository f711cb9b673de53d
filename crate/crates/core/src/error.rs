use thiserror::Error;

use crate::syntax::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("signature violation under {sig}: {msg} in `{subterm}`")]
    Signature {
        sig: Signature,
        msg: String,
        subterm: String,
    },

    #[error("engine error: {0}")]
    Engine(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("formula has free variables: {0:?}")]
    FreeVariables(Vec<String>),

    #[error("no witness exists: {0}")]
    NoWitness(String),

    #[error("assumptions do not decide atom `{0}`")]
    Undecided(String),

    #[error("pattern has {paths} paths, above the limit of {limit}")]
    PathExplosion { paths: u128, limit: u128 },

    #[error("window {window} has competing recurring extensions: {}", .competitors.join(", "))]
    AmbiguousExtension { window: String, competitors: Vec<String> },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
