//! Instance files, reports and command dispatch for the `plopen` binary.

pub mod commands;
pub mod format;
pub mod report;

/// Process exit codes. Each report carries exactly one of these.
pub mod exit {
    /// Success: valid, open, certified, constant degree.
    pub const OK: i32 = 0;
    /// A negative verdict: not open, rejected, degree changed along a homotopy.
    pub const NEGATIVE: i32 = 1;
    /// The instance parses but violates the complex, map or ball requirements.
    pub const INVALID: i32 = 2;
    /// Unreadable or malformed input, including bad command arguments.
    pub const MALFORMED: i32 = 3;
    /// The exact openness conditions disagree with each other.
    pub const DISAGREEMENT: i32 = 4;
    /// Degree undefined: the query point lies on the image of the boundary.
    pub const DEGREE_UNDEFINED: i32 = 5;
    /// A computation gave up, such as no regular value nearby or an
    /// exhausted generator.
    pub const FAILURE: i32 = 6;
}
