use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum GfError {
    /// Input outside an operation's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration would exceed the configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// An exact identity that must hold by construction failed —
    /// indicates an implementation bug, surfaced loudly.
    #[error("identity violated: {0}")]
    Identity(String),

    /// A scan produced no usable output (empty tree, empty block set, ...).
    #[error("degenerate result: {0}")]
    Degenerate(String),

    /// Every requested frequency block sits above the aliasing bound.
    #[error("aliasing: {0}")]
    Aliased(String),

    /// Operation not defined for the given system.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Mis-shaped composite input (block arity, grid ordering, ...).
    #[error("structural error: {0}")]
    Structure(String),
}

pub type Result<T> = std::result::Result<T, GfError>;
