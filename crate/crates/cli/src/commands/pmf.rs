//! `mih pmf`: single log-mass queries and full-law enumeration.

use clap::Args;
use serde::Serialize;

use mih_core::mih::{enumerate_mih_support, mih_log_pmf};
use mih_core::nm::{nm_log_pmf, truncate_nm_support};
use mih_core::{CountVector, LogMass};

use crate::descriptor::{build_params, parse_counts};
use crate::formats::{LawDocument, ParamsDoc};
use crate::output::emit;
use crate::{Cli, CliError, CliResult, Format};

#[derive(Args)]
pub struct PmfArgs {
    /// Distribution: "mih" (finite population) or "nm" (infinite limit).
    pub dist: String,

    /// Population size, or "inf" for the infinite sentinel.
    #[arg(short = 'N', long, default_value = "inf")]
    pub population: String,

    /// Failure target.
    #[arg(short, long)]
    pub n: u64,

    /// Comma-separated category weights, e.g. "3/10,1/5".
    #[arg(short, long)]
    pub p: String,

    /// Count vector to evaluate, e.g. "1,2".
    #[arg(short, long, conflicts_with = "enumerate")]
    pub k: Option<String>,

    /// Enumerate the full (or truncated) law instead.
    #[arg(long)]
    pub enumerate: bool,

    /// Tail bound for the truncated infinite-support law.
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,

    /// Enumeration cap (support points).
    #[arg(long, default_value_t = 1_000_000)]
    pub max_points: usize,
}

#[derive(Serialize)]
struct MassDoc {
    params: ParamsDoc,
    k: Vec<u64>,
    /// Absent for zero-probability points.
    #[serde(skip_serializing_if = "Option::is_none")]
    logp: Option<f64>,
    mass: f64,
    in_support: bool,
}

pub fn run(cli: &Cli, args: &PmfArgs) -> CliResult {
    let params = build_params(&args.population, args.n, &args.p)?;
    match (&args.k, args.enumerate) {
        (Some(kspec), false) => {
            let k = CountVector::new(parse_counts(kspec)?);
            let (logp, in_support) = match args.dist.as_str() {
                "mih" => match mih_log_pmf(&params, &k)? {
                    LogMass::Finite(l) => (Some(l), true),
                    LogMass::Zero => (None, false),
                },
                "nm" => (Some(nm_log_pmf(&params, &k)?), true),
                other => return Err(CliError::Invalid(format!("unknown distribution {other:?}"))),
            };
            let doc = MassDoc {
                params: ParamsDoc::from_params(&params),
                k: k.as_slice().to_vec(),
                logp,
                mass: logp.map_or(0.0, f64::exp),
                in_support,
            };
            match cli.format {
                Format::Json => emit(cli, &serde_json::to_string_pretty(&doc).unwrap()),
                Format::Csv => {
                    let mut text = String::from("k,logp,mass,in_support\n");
                    text.push_str(&format!(
                        "{},{},{},{}\n",
                        doc.k
                            .iter()
                            .map(u64::to_string)
                            .collect::<Vec<_>>()
                            .join("|"),
                        doc.logp.map_or(String::new(), |l| format!("{l}")),
                        doc.mass,
                        doc.in_support
                    ));
                    emit(cli, &text)
                }
            }
        }
        (None, true) => {
            let law = match args.dist.as_str() {
                "mih" => enumerate_mih_support(&params, args.max_points)?,
                "nm" => truncate_nm_support(&params, args.epsilon, args.max_points)?,
                other => return Err(CliError::Invalid(format!("unknown distribution {other:?}"))),
            };
            let doc = LawDocument::new(&params, &law);
            match cli.format {
                Format::Json => emit(cli, &doc.to_json()),
                Format::Csv => emit(cli, &doc.to_csv()),
            }
        }
        _ => Err(CliError::Invalid(
            "pmf needs either -k <counts> or --enumerate".to_string(),
        )),
    }
}
