use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("input has {got} bits but the program reads {expected} variables")]
    Arity { expected: usize, got: usize },
    #[error("arity {n} exceeds the truth-table limit of {limit} variables")]
    TooLarge { n: usize, limit: usize },
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error("invalid assignment text: {0}")]
    BadAssignment(String),
    #[error("serialization: {0}")]
    Serde(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("k = {k} and w = {w}: both must be at least 2")]
    TooSmall { k: usize, w: usize },
    #[error(
        "2kw(2w + ceil(log k) + ceil(log 2w)) = {bound} is not strictly below n = {n}; smallest valid n is {suggest}"
    )]
    Inequality { bound: usize, n: usize, suggest: usize },
    #[error("2kw = {blocks} does not divide n = {n}; nearest valid n is {suggest}")]
    Divisibility { blocks: usize, n: usize, suggest: usize },
    #[error("relaxed layout needs at least one value variable per block (n = {n}, {blocks} blocks, {addr_bits} address bits)")]
    NoValueBits { n: usize, blocks: usize, addr_bits: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("arity {n} exceeds the {what} limit of {limit}")]
    Arity { what: &'static str, n: usize, limit: usize },
    #[error("truth table length {0} is not a power of two")]
    TableLength(usize),
    #[error("invalid truth table text: {0}")]
    BadTable(String),
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("invalid restriction: {0}")]
    BadRestriction(String),
    #[error("not a k-OBDD: {0}")]
    NotKobdd(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error(transparent)]
    Program(#[from] ProgramError),
}
