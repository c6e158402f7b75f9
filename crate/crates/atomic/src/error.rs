use thiserror::Error;

/// Errors produced while parsing and cross-validating the input files.
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}, col {col}: malformed token `{token}`")]
    MalformedToken {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("line {line}: expected {expected} section(s), found {got}")]
    SectionCountMismatch {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: memristor {device} used more than once in this step")]
    DuplicateDeviceInStep { line: usize, device: usize },
    #[error("memristor index {device} out of range (only {count} declared)")]
    IndexOutOfRange { device: usize, count: usize },
    #[error("algorithm file contains no steps")]
    EmptyProgram,
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("missing key: {0}")]
    MissingKey(String),
    #[error("output `{output}`: expected bit vector of length {expected}, got {got}")]
    BadOutputVectorLength {
        output: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown topology name `{0}`")]
    UnknownTopologyName(String),
    #[error("{role} references undeclared memristor `{name}`")]
    RoleReferencesUndeclaredMemristor { role: &'static str, name: String },
    #[error("unknown output name `{0}`")]
    UnknownOutputName(String),
    #[error("config declares {config} steps but the algorithm has {program}")]
    StepCountMismatch { config: usize, program: usize },
    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),
    #[error("electrical precondition violated: {0}")]
    ElectricalPreconditionViolated(String),
    #[error("switch `{0}` is required by the algorithm but not declared")]
    UndeclaredSwitch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors produced by the transient simulator.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("numerical blowup: non-finite value at t = {time} s ({context})")]
    NumericalBlowup { time: f64, context: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
