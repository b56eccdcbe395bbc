//! Declarative sweep configuration (TOML). Every field has a default, and
//! command-line flags override file values, so a checked-in config plus the
//! recorded seed reproduces a run byte for byte.

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub expansion: Option<ExpansionConfig>,
    #[serde(default)]
    pub bounds: Option<BoundsConfig>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Invalid(format!("cannot read config {}: {e}", p.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Invalid(format!("bad config {}: {e}", p.display())))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionConfig {
    pub gamma: Option<f64>,
    pub doublings: Option<u32>,
    #[serde(default)]
    pub cells: Vec<ExpansionCell>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionCell {
    pub n: u64,
    pub weights: Vec<String>,
    pub k: Vec<u64>,
    pub base_population: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub b: Option<f64>,
    pub gamma: Option<f64>,
    pub nodes: Option<usize>,
    pub epsilon: Option<f64>,
    pub max_points: Option<usize>,
    /// Normal families to bound against: subsets of ["q", "qbar", "qstar"].
    pub families: Option<Vec<String>>,
    /// Failure targets for the deficiency sweep; N = smallest lattice value
    /// at or above n^3 unless `deficiency_populations` pins them.
    pub deficiency_n: Option<Vec<u64>>,
    pub deficiency_populations: Option<Vec<u64>>,
    pub deficiency_weights: Option<Vec<Vec<String>>>,
    /// Grid for the normalized Hellinger-shape check.
    pub shape_n: Option<Vec<u64>>,
    pub shape_weights: Option<Vec<Vec<String>>>,
    /// Small-population series for the concentration-tail comparison.
    pub concentration_populations: Option<Vec<u64>>,
    pub concentration_n: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub metrics: Vec<String>,
    /// Law pairs, e.g. [["mih", "nm"], ["mih", "normal-q"]].
    pub pairs: Vec<(String, String)>,
    pub n: Vec<u64>,
    pub populations: Vec<u64>,
    pub weights: Vec<Vec<String>>,
    pub epsilon: Option<f64>,
    pub nodes: Option<usize>,
    pub max_points: Option<usize>,
}
