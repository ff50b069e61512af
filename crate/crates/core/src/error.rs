use std::io;

/// Crate-wide error type.
///
/// Errors cover misuse of the public API (bad instances, ranks out of range,
/// malformed inputs) and I/O failures from the experiment harness. Internal
/// contract violations (index arithmetic inside an algorithm, a policy asked
/// to decide a far pair) are bugs, not recoverable conditions, and panic
/// instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("instance must contain at least one value")]
    EmptyInstance,

    #[error("instance value at index {0} is not finite")]
    NonFiniteValue(usize),

    #[error("instance has {0} items, which exceeds the u32 index space used by transcripts")]
    InstanceTooLarge(usize),

    #[error("item index {index} out of range for instance of {n} items")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("batched rounds require an oracle configured with batch_mode")]
    BatchModeDisabled,

    #[error("a batched round must contain at least one comparison")]
    EmptyBatch,

    #[error("sequence is not a permutation of the {n} expected items")]
    NotAPermutation { n: usize },

    #[error("rank {rank} out of range 1..={n}")]
    RankOutOfRange { rank: usize, n: usize },

    #[error("slices must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("band [{y}, {y} + 1) is not empty: value {value} at index {index} lies inside it")]
    BandNotEmpty { y: f64, value: f64, index: usize },

    #[error("brute-force check supports at most {max} items, got {n}")]
    BruteForceTooLarge { n: usize, max: usize },

    #[error("exhaustive zero-one validation supports at most {max} wires, got {n}")]
    BinaryCheckTooWide { n: usize, max: usize },

    #[error("sorting network gates must span at least 2 positions (arity {0} requested)")]
    ArityTooSmall(usize),

    #[error("network of width {net} cannot run on {items} items")]
    WidthMismatch { net: usize, items: usize },

    #[error("round budget must be at least 1")]
    ZeroRoundBudget,

    #[error("selection from an empty item set")]
    EmptySelection,

    #[error("malformed network text at line {line}: {detail}")]
    NetworkParse { line: usize, detail: String },

    #[error("unknown {what} '{got}'; expected one of: {valid}")]
    UnknownName {
        what: &'static str,
        got: String,
        valid: &'static str,
    },

    #[error("invalid {what}: {detail}")]
    InvalidArgument { what: &'static str, detail: String },

    #[error("scaling fit needs at least 3 distinct sizes, got {0}")]
    TooFewSizes(usize),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
