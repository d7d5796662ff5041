use thiserror::Error;

use crate::lts::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model failed validation:\n{0}")]
    InvalidModel(ValidationReport),

    #[error("{0}")]
    Parse(String),

    #[error("step sequence is not a path of the model: {0}")]
    NotAPath(String),

    #[error("test suite is empty")]
    EmptySuite,

    #[error("test case `{0}` is invalid: {1}")]
    BadTestCase(String, String),

    #[error("loop bound must be at least 1, got {0}")]
    BadLoopBound(u32),

    #[error(
        "unknown technique `{0}`; valid identifiers: Opt, Ran, ARPJac, ARPMan, \
         ARPSim1, ARPSim2, FW, Stoop, PC, SDh, SDe, SDm, ST, SA"
    )]
    UnknownTechnique(String),

    #[error("technique {0} requires {1}")]
    MissingInput(&'static str, &'static str),

    #[error("fault report references unknown test id `{0}`")]
    UnknownTestId(String),

    #[error("fault report is empty")]
    EmptyFaultReport,

    #[error("no fault in the report is revealed by any test in the order")]
    NoRevealableFault,

    #[error("suite has no essential test case")]
    NoEssentialTest,

    #[error("metrics are missing for test `{0}`")]
    MissingMetrics(String),

    #[error("sample for {0} contains a NaN value")]
    NanSample(&'static str),

    #[error("order is not usable: {0}")]
    BadOrder(String),

    #[error("sample is empty: {0}")]
    EmptySample(&'static str),

    #[error("kruskal-wallis needs at least two non-empty groups: {0}")]
    BadGroups(String),

    #[error("distance universe is missing step `{0}`")]
    UniverseMissingStep(String),

    #[error("invalid synthesis config: {0}")]
    BadSynthConfig(String),

    #[error("synthesis infeasible after {attempts} attempts: {reason}")]
    Infeasible { attempts: u32, reason: String },

    #[error("invalid experiment config: {0}")]
    BadConfig(String),

    #[error("cannot {op} `{path}`: {source}")]
    File {
        op: &'static str,
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// `std::fs::read_to_string` with the path in the error message.
pub(crate) fn read_to_string(path: impl AsRef<std::path::Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|source| Error::File {
        op: "read",
        path: path.display().to_string(),
        source,
    })
}

/// `std::fs::write` with the path in the error message.
pub(crate) fn write(
    path: impl AsRef<std::path::Path>,
    contents: impl AsRef<[u8]>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, contents).map_err(|source| Error::File {
        op: "write",
        path: path.display().to_string(),
        source,
    })
}
