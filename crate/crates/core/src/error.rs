// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use crate::bits::{BitVec, Tick};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A point `(i, j, mu, lambda)` where `dPhi_i/dmu_j` evaluates to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyWitness {
    pub i: usize,
    pub j: usize,
    pub mu: BitVec,
    pub lambda: BitVec,
}

impl std::fmt::Display for DependencyWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Phi_{} depends on mu_{} at mu={} lambda={}",
            self.i, self.j, self.mu, self.lambda
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("bit width {0} is out of range (at most 64 bits)")]
    WidthOutOfRange(usize),
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("horizon mismatch: {left} vs {right}")]
    HorizonMismatch { left: Tick, right: Tick },
    #[error("tick {tick} lies beyond the horizon {horizon}")]
    HorizonExceeded { tick: Tick, horizon: Tick },
    #[error("event ticks must be strictly increasing: {prev} then {next}")]
    EventOrder { prev: Tick, next: Tick },
    #[error("coordinate {index} is out of range 1..={width}")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("invalid coordinate selection: {0}")]
    BadSelection(String),
    #[error("block must be a nonempty proper subset of 1..={0}")]
    TrivialBlock(usize),
    #[error("n + m = {bits} exceeds the exhaustive-scan limit of {limit} bits")]
    SizeLimit { bits: usize, limit: usize },
    #[error("truth table has {found} rows, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("block is not separated: {0}")]
    NotSeparated(DependencyWitness),
    #[error("schedule is not prefix-progressive: coordinate {coordinate} fires {fired} times")]
    NotProgressive { coordinate: usize, fired: usize },
    #[error("delay must be a positive number of ticks, got {0}")]
    NonPositiveDelay(i64),
    #[error("computation function domain violation: {0}")]
    DomainViolation(String),
    #[error("systems share no admissible input")]
    EmptyIntersection,
    #[error("decomposition invariant broken: {0}")]
    Inconsistent(String),

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: undeclared variable `{name}`")]
    UndeclaredVariable { line: usize, name: String },
    #[error("line {line}: variable `{name}` defined more than once")]
    DuplicateDefinition { line: usize, name: String },
    #[error("no definition for state variable `{0}`")]
    MissingDefinition(String),
    #[error("line {line}: malformed row: {message}")]
    MalformedRow { line: usize, message: String },
    #[error("line {line}: duplicate row for mu={mu} lambda={lambda}")]
    DuplicateRow {
        line: usize,
        mu: String,
        lambda: String,
    },
    #[error("missing row for mu={mu} lambda={lambda}")]
    MissingRow { mu: String, lambda: String },
    #[error("line {line}: malformed header: {message}")]
    MalformedHeader { line: usize, message: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
