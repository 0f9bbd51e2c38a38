use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller-supplied data violated a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A fixed-width field was asked to hold a value it cannot represent.
    #[error("value {value} does not fit in a {width}-bit field")]
    FieldOverflow { value: u64, width: u32 },

    /// A bit stream ended in the middle of a codeword or payload.
    #[error("bit stream truncated")]
    Truncated,

    /// A symbol with zero frequency reached the arithmetic coder.  This is
    /// always an encoder-side model bug, never silently coded.
    #[error("symbol {0} has zero frequency in the coding table")]
    ZeroFrequency(usize),

    /// Container does not start with the expected magic bytes.
    #[error("bad container magic")]
    BadMagic,

    /// Container version not understood by this build.
    #[error("unsupported container version {0}")]
    BadVersion(u8),

    /// Container parsed but its fields are mutually inconsistent.
    #[error("corrupt container: {0}")]
    Corrupt(String),

    /// A quantization grid spec produced no usable intervals or spacings.
    #[error("grid construction failed: {0}")]
    GridConstruction(String),

    /// The parameter vector cannot be placed monotonically on the grid
    /// (more positive components than the grid can carry below mass 1).
    #[error("parameters cannot be quantized monotonically onto this grid")]
    QuantizeInfeasible,

    /// A brute-force enumeration would exceed its stated budget.
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    /// I/O failure, propagated.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
