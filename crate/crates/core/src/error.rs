use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Renders a shape as `(2, 1, 3)` for error messages.
pub(crate) fn shape_str(shape: &[usize]) -> String {
    let parts: Vec<String> = shape.iter().map(|d| d.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn suggestion_str(suggestion: &Option<String>) -> String {
    match suggestion {
        Some(s) => format!("; did you mean `{s}`?"),
        None => String::new(),
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Two arrays that must share a shape do not.
    #[error("shape mismatch: expected {}, got {}", shape_str(.expected), shape_str(.actual))]
    ShapeMismatch {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    /// A shape is unusable on its own, e.g. a zero extent.
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// Float data contains NaN or an infinity.
    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    /// Mask data contains something other than 0 or 1.
    #[error("mask value at flat index {index} is {value}, expected 0 or 1")]
    InvalidMaskValue { index: usize, value: u8 },

    /// A generator parameter is outside its domain, or not a parameter of
    /// the generator at all.
    #[error("invalid parameter `{name}` for generator `{kind}`: {reason}")]
    InvalidParam {
        kind: String,
        name: String,
        reason: String,
    },

    /// A required generator parameter was not supplied.
    #[error("missing required parameter `{name}` for generator `{kind}`")]
    MissingParam { kind: String, name: String },

    /// Lookup of a generator kind that is not registered.
    #[error("unknown generator `{kind}`{}", suggestion_str(.suggestion))]
    UnknownGenerator {
        kind: String,
        suggestion: Option<String>,
    },

    /// Attempt to register a generator under a name that is taken.
    #[error("generator `{0}` is already registered")]
    DuplicateGenerator(String),

    /// A generator returned the wrong length or non-finite values.
    #[error("generator `{kind}` broke its contract: {reason}")]
    GeneratorContract { kind: String, reason: String },

    /// Builder misuse or an inconsistent build description.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Signals or features were added before any class scope was opened.
    #[error("no class scope: call for_class before add_signal or add_feature")]
    NoClassScope,

    /// A channel index at or beyond n_dims.
    #[error("channel {channel} out of range for {n_dims} dims")]
    ChannelOutOfRange { channel: usize, n_dims: usize },

    /// A feature window that cannot be placed as requested.
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),

    /// The config text is not well-formed YAML.
    #[error("config parse error: {0}")]
    Parse(String),

    /// The config is well-formed YAML but violates the schema.
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    /// A config value with the right type but an out-of-domain value.
    #[error("invalid value at {path}: {message}")]
    Value { path: String, message: String },

    /// Request for a metric name that does not exist.
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    /// Degenerate sample hit while degenerate exclusion is switched off.
    #[error("sample {sample} is degenerate for `{metric}`: {reason}")]
    DegenerateSample {
        metric: String,
        sample: usize,
        reason: String,
    },

    /// Every sample in the batch was degenerate for the metric.
    #[error("all {n_samples} samples are degenerate for `{metric}`")]
    AllSamplesDegenerate { metric: String, n_samples: usize },

    /// Filesystem failure, tagged with the path involved.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A file that the operation requires is absent.
    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    /// A file exists but its bytes are not what the format requires.
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    /// Component tensors were requested but the dataset carries none.
    #[error("dataset has no component tensors")]
    MissingComponents,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
