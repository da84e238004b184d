//! Problem files: a partition plus exactly one channel source.
//!
//! ```json
//! {
//!   "partition": {"m0": 2, "m1": 1, "m2": 1},
//!   "channel": {"dim": 4, "kraus": [...]},
//!   "options": {"relative_eps": 1e-12, "use_minimal": true}
//! }
//! ```
//!
//! `channel` may be replaced by `dilation`. Errors are split by stage:
//! malformed JSON, wrong shape of the document, and invariant violations.

use std::fs;
use std::path::Path;

use qcontrol::channel::dilation_to_kraus;
use qcontrol::json::{ChannelJson, DilationJson};
use qcontrol::{DilationModel, KrausChannel, SubspacePartition, TolerancePolicy};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPartition {
    m0: usize,
    m1: usize,
    m2: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    pub relative_eps: Option<f64>,
    pub absolute_floor: Option<f64>,
    pub use_minimal: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    partition: RawPartition,
    channel: Option<ChannelJson>,
    dilation: Option<DilationJson>,
    #[serde(default)]
    options: ProblemOptions,
}

#[derive(Debug, Clone)]
pub enum ChannelSource {
    Kraus(KrausChannel),
    Dilation(DilationModel),
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub partition: SubspacePartition,
    pub source: ChannelSource,
    /// Tolerances from the file's `options`, or the defaults.
    pub tolerance: TolerancePolicy,
    pub use_minimal: Option<bool>,
}

impl ProblemFile {
    /// The Kraus channel of the problem, extracting it from the dilation if
    /// needed.
    pub fn channel(&self) -> Result<KrausChannel, CliError> {
        match &self.source {
            ChannelSource::Kraus(c) => Ok(c.clone()),
            ChannelSource::Dilation(m) => {
                dilation_to_kraus(m).map_err(|e| CliError::Numerical(e.to_string()))
            }
        }
    }

    pub fn dilation(&self) -> Option<&DilationModel> {
        match &self.source {
            ChannelSource::Dilation(m) => Some(m),
            ChannelSource::Kraus(_) => None,
        }
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let raw: RawProblem =
        serde_json::from_value(value).map_err(|e| CliError::Schema(e.to_string()))?;

    let validation = |e: qcontrol::Error| CliError::Validation(e.to_string());
    let partition =
        SubspacePartition::new(raw.partition.m0, raw.partition.m1, raw.partition.m2)
            .map_err(validation)?;

    let source = match (raw.channel, raw.dilation) {
        (Some(c), None) => ChannelSource::Kraus(c.to_channel().map_err(validation)?),
        (None, Some(d)) => ChannelSource::Dilation(d.to_model().map_err(validation)?),
        (Some(_), Some(_)) => {
            return Err(CliError::Schema(
                "exactly one of `channel` or `dilation` is allowed".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Schema(
                "missing channel source: expected `channel` or `dilation`".into(),
            ))
        }
    };
    let dim = match &source {
        ChannelSource::Kraus(c) => c.dim(),
        ChannelSource::Dilation(m) => m.system_dim(),
    };
    if dim != partition.m() {
        return Err(CliError::Validation(format!(
            "partition has M = {} but the channel acts on dimension {dim}",
            partition.m()
        )));
    }

    let defaults = TolerancePolicy::default();
    let tolerance = TolerancePolicy::new(
        raw.options.relative_eps.unwrap_or(defaults.relative_eps()),
        raw.options.absolute_floor.unwrap_or(defaults.absolute_floor()),
    )
    .map_err(validation)?;

    Ok(ProblemFile {
        partition,
        source,
        tolerance,
        use_minimal: raw.options.use_minimal,
    })
}

/// Reads and fully validates a problem file.
pub fn load_problem(path: &Path) -> Result<ProblemFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_problem(&text)
}
