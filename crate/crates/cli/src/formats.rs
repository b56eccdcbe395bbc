//! Serialized document shapes: law tables, distance reports and their CSV
//! flavors.
//!
//! Floats are emitted in shortest round-trip form (both by `serde_json` and
//! by the `Display` formatting used in CSV), so every document parses back
//! to bit-identical values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use mih_core::metrics::DistanceReport;
use mih_core::moments::MomentSummary;
use mih_core::{CountVector, DiscreteLaw, ModelParams, Population};

use crate::CliError;

/// Parameter triple as serialized alongside every law and report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ParamsDoc {
    /// Population size or the string "infinite".
    pub population: String,
    pub n: u64,
    /// Exact fractions, e.g. "3/10".
    pub weights: Vec<String>,
    pub q: String,
}

impl ParamsDoc {
    pub fn from_params(params: &ModelParams) -> Self {
        ParamsDoc {
            population: match params.population() {
                Population::Finite(n) => n.to_string(),
                Population::Infinite => "infinite".to_string(),
            },
            n: params.failure_target(),
            weights: params.weights().iter().map(|w| w.to_string()).collect(),
            q: params.failure_weight().to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LawEntry {
    pub k: Vec<u64>,
    pub logp: f64,
}

/// The law document: `{params, entries, tail_mass}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LawDocument {
    pub params: ParamsDoc,
    pub entries: Vec<LawEntry>,
    pub tail_mass: f64,
}

impl LawDocument {
    pub fn new(params: &ModelParams, law: &DiscreteLaw) -> Self {
        LawDocument {
            params: ParamsDoc::from_params(params),
            entries: law
                .iter()
                .map(|(k, logp)| LawEntry {
                    k: k.as_slice().to_vec(),
                    logp,
                })
                .collect(),
            tail_mass: law.tail_mass(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("law document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("bad law JSON: {e}")))
    }

    /// CSV flavor: `#`-prefixed metadata lines, a header, one row per
    /// support point.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# population={}\n", self.params.population));
        out.push_str(&format!("# n={}\n", self.params.n));
        out.push_str(&format!("# weights={}\n", self.params.weights.join("|")));
        out.push_str(&format!("# q={}\n", self.params.q));
        out.push_str(&format!("# tail_mass={}\n", self.tail_mass));
        let dim = self.entries.first().map_or(0, |e| e.k.len());
        let mut header: Vec<String> = (0..dim).map(|i| format!("k{i}")).collect();
        header.push("logp".to_string());
        out.push_str(&header.join(","));
        out.push('\n');
        for e in &self.entries {
            let mut row: Vec<String> = e.k.iter().map(|v| v.to_string()).collect();
            row.push(format!("{}", e.logp));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut meta: BTreeMap<String, String> = BTreeMap::new();
        let mut entries = Vec::new();
        let mut header_seen = false;
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((key, value)) = rest.trim().split_once('=') {
                    meta.insert(key.trim().to_string(), value.trim().to_string());
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !header_seen {
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 2 {
                return Err(CliError::Invalid(format!("bad law CSV row: {line:?}")));
            }
            let (ks, logp) = fields.split_at(fields.len() - 1);
            let k = ks
                .iter()
                .map(|s| s.parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Invalid(format!("bad count in CSV: {e}")))?;
            let logp = logp[0]
                .parse::<f64>()
                .map_err(|e| CliError::Invalid(format!("bad logp in CSV: {e}")))?;
            entries.push(LawEntry { k, logp });
        }
        let get = |key: &str| {
            meta.get(key)
                .cloned()
                .ok_or_else(|| CliError::Invalid(format!("law CSV missing # {key}= line")))
        };
        Ok(LawDocument {
            params: ParamsDoc {
                population: get("population")?,
                n: get("n")?
                    .parse()
                    .map_err(|_| CliError::Invalid("bad n".into()))?,
                weights: get("weights")?.split('|').map(str::to_string).collect(),
                q: get("q")?,
            },
            entries,
            tail_mass: get("tail_mass")?
                .parse()
                .map_err(|_| CliError::Invalid("bad tail_mass".into()))?,
        })
    }

    /// Rebuilds the in-memory law table.
    pub fn to_law(&self) -> Result<DiscreteLaw, CliError> {
        let dim = self.entries.first().map_or(0, |e| e.k.len());
        let mut map = std::collections::BTreeMap::new();
        for e in &self.entries {
            map.insert(CountVector::new(e.k.clone()), e.logp);
        }
        DiscreteLaw::from_log_masses(dim, map, self.tail_mass).map_err(CliError::from)
    }
}

/// A distance report plus context, as serialized.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceDoc {
    pub metric: String,
    pub method: String,
    pub value: f64,
    pub error_estimate: f64,
    pub truncation_tail: f64,
    pub quadrature_nodes: usize,
    pub params: ParamsDoc,
    pub pair: (String, String),
    pub seed: u64,
}

impl DistanceDoc {
    pub fn new(
        report: &DistanceReport,
        params: &ModelParams,
        pair: (&str, &str),
        seed: u64,
    ) -> Self {
        DistanceDoc {
            metric: report.metric.name().to_string(),
            method: report.method.name().to_string(),
            value: report.value,
            error_estimate: report.error_estimate,
            truncation_tail: report.truncation_tail,
            quadrature_nodes: report.quadrature_nodes,
            params: ParamsDoc::from_params(params),
            pair: (pair.0.to_string(), pair.1.to_string()),
            seed,
        }
    }

    pub fn csv_header() -> &'static str {
        "metric,method,a,b,population,n,weights,value,error_estimate,truncation_tail,quadrature_nodes,seed"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.metric,
            self.method,
            self.pair.0,
            self.pair.1,
            self.params.population,
            self.params.n,
            self.params.weights.join("|"),
            self.value,
            self.error_estimate,
            self.truncation_tail,
            self.quadrature_nodes,
            self.seed
        )
    }
}

/// Moment summary as serialized by `sample --summary`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentsDoc {
    pub mean: Vec<f64>,
    pub covariance: Vec<f64>,
    pub method: String,
}

impl MomentsDoc {
    pub fn new(m: &MomentSummary) -> Self {
        MomentsDoc {
            mean: m.mean.clone(),
            covariance: m.covariance.clone(),
            method: match m.method {
                mih_core::moments::MomentMethod::ExactEnumeration => "exact-enumeration",
                mih_core::moments::MomentMethod::MonteCarlo => "monte-carlo",
            }
            .to_string(),
        }
    }
}
