use std::path::PathBuf;

use clap::ValueEnum;
use hereditary_core::properties::PropertyDescriptor;
use hereditary_core::Family;
use serde::{Deserialize, Serialize};

use crate::numbers::{de_count, de_levels, de_pattern, de_real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SseeAudit,
    Extremal,
    Volume,
    Trend,
    Graphon,
    Containers,
    StanleyWilf,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SseeAudit => "ssee-audit",
            Command::Extremal => "extremal",
            Command::Volume => "volume",
            Command::Trend => "trend",
            Command::Graphon => "graphon",
            Command::Containers => "containers",
            Command::StanleyWilf => "stanley-wilf",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One experiment, from flags or from a config file entry. Fields that a
/// subcommand does not use are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<PropertyDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Source level `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "de_levels")]
    pub levels: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_k: Option<u32>,
    /// Palette size for graphs and graphons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "de_count")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "de_count")]
    pub budget: Option<u64>,
    /// `mc` or `grid-bracket` for volume; `grid`, `analytic` or
    /// `monotonicity` for extremal; `exact` or `local-search` for cuts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Graphon operation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "de_real")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "de_count")]
    pub probes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "de_pattern")]
    pub pattern: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graphon: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colour_property: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colour: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<bool>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            run_id: None,
            property: None,
            family: None,
            n: None,
            source: None,
            levels: None,
            grid_k: None,
            k: None,
            samples: None,
            seed: None,
            workers: None,
            budget: None,
            mode: None,
            op: None,
            epsilon: None,
            probes: None,
            pattern: None,
            graphon: None,
            other: None,
            template: None,
            colour_property: None,
            colour: None,
            output: None,
            format: None,
            timing: None,
        }
    }
}
