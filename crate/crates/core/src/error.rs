use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph has no nodes")]
    Empty,
    #[error("self-loop at node {0}")]
    SelfLoop(String),
    #[error("duplicate edge {0} -- {1}")]
    DuplicateEdge(String, String),
    #[error("duplicate node {0}")]
    DuplicateNode(String),
    #[error("graph is disconnected: node {0} is unreachable from the first node")]
    Disconnected(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("no identifier for node {0}")]
    MissingId(String),
    #[error("label of node {0} is not a bit string")]
    NonBinaryLabel(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate sender identifier {0:?}")]
    DuplicateSenderId(String),
    #[error("no transition for state {state} reading ({r}, {i}, {s})")]
    UndefinedTransition { state: String, r: char, i: char, s: char },
    #[error("head moved left of the leftmost cell on the {0} tape")]
    HeadUnderflow(&'static str),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("machine is already paused or stopped")]
    NotRunning,
    #[error("identifiers are not {0}-locally unique")]
    NotLocallyUnique(usize),
    #[error("round limit {0} exceeded")]
    RoundLimitExceeded(usize),
    #[error("step limit {limit} exceeded at node {node} in round {round}")]
    StepLimitExceeded { node: String, round: usize, limit: usize },

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable {var} used with arity {found}, expected {expected}")]
    ArityMismatch { var: String, expected: usize, found: usize },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("search space too large for {var}: arity {arity} over {domain} elements")]
    SearchSpaceTooLarge { var: String, domain: usize, arity: usize },
    #[error("not classifiable: {0}")]
    NotClassifiable(String),

    #[error("search budget exceeded (2^{0:.1} certificate assignments)")]
    BudgetExceeded(f64),

    #[error("bad boolean formula {0:?}: {1}")]
    BooleanParse(String, String),
    #[error("label of node {0} is not in 3-CNF")]
    Not3Cnf(String),
    #[error("sentence is not in Sigma(1)")]
    NotSigma1,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("tiling system has {ts} bits but picture has {picture}")]
    BitWidthMismatch { ts: usize, picture: usize },
    #[error("only 0-bit pictures can be encoded")]
    NonZeroBits,
    #[error("invalid picture: {0}")]
    InvalidPicture(String),
}
