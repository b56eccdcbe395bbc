//! `mih sweep`: generic distance sweeps over a declarative parameter grid.
//!
//! Each grid point is the cross product of populations, failure targets and
//! weight configurations from the config; every requested (pair, metric)
//! emits one row. Points that violate the lattice or a model precondition
//! are skipped with a logged reason.

use clap::Args;
use serde::Serialize;

use mih_core::kernels::normal_family_spec;
use mih_core::metrics::{
    hellinger_discrete, hellinger_jittered_vs_normal, kl_discrete, kolmogorov_discrete_vs_normal,
    tv_discrete, tv_jittered_vs_normal, tv_sqrt_jittered_vs_normal, DistanceReport, JitteredLaw,
};
use mih_core::mih::enumerate_mih_support;
use mih_core::nm::truncate_nm_support;
use mih_core::quadrature::QuadratureSpec;
use mih_core::ModelParams;

use crate::config::{FileConfig, SweepSection};
use crate::descriptor::{parse_weights, LawKind};
use crate::formats::DistanceDoc;
use crate::output::emit;
use crate::{Cli, CliError, CliResult, Format};

#[derive(Args)]
pub struct SweepArgs {
    /// Quadrature nodes per axis per cell.
    #[arg(long)]
    pub nodes: Option<usize>,

    /// Tail bound for truncating the infinite-support law.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Serialize)]
struct SweepReport {
    seed: u64,
    rows: Vec<DistanceDoc>,
    skipped: Vec<String>,
}

fn default_section() -> SweepSection {
    SweepSection {
        metrics: vec!["hellinger".into(), "tv".into()],
        pairs: vec![("mih".into(), "nm".into())],
        n: vec![1, 2],
        populations: vec![16, 32, 64],
        weights: vec![vec!["1/2".into()]],
        epsilon: None,
        nodes: None,
        max_points: None,
    }
}

pub fn run(cli: &Cli, args: &SweepArgs) -> CliResult {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = cli.resolved_seed(&file);
    let section = file.sweep.unwrap_or_else(default_section);
    let epsilon = args.epsilon.or(section.epsilon).unwrap_or(1e-12);
    let nodes = args.nodes.or(section.nodes).unwrap_or(16);
    let max_points = section.max_points.unwrap_or(1_000_000);
    let quad = QuadratureSpec::with_nodes(nodes);

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for weights_spec in &section.weights {
        for &n in &section.n {
            for &population in &section.populations {
                let weights = match parse_weights(&weights_spec.join(","), false) {
                    Ok(w) => w,
                    Err(CliError::Invalid(e)) | Err(CliError::CheckFailed(e)) => {
                        return Err(CliError::Invalid(e))
                    }
                };
                let params = match ModelParams::finite(population, n, &weights) {
                    Ok(p) => p,
                    Err(e) => {
                        let reason = format!("N={population} n={n}: {e}");
                        eprintln!("skipped: {reason}");
                        skipped.push(reason);
                        continue;
                    }
                };
                for (a_name, b_name) in &section.pairs {
                    for metric in &section.metrics {
                        match sweep_cell(
                            &params, a_name, b_name, metric, epsilon, max_points, &quad,
                        ) {
                            Ok(report) => rows.push(DistanceDoc::new(
                                &report,
                                &params,
                                (a_name, b_name),
                                seed,
                            )),
                            Err(CliError::Invalid(reason)) | Err(CliError::CheckFailed(reason)) => {
                                let reason = format!(
                                    "N={population} n={n} {a_name}/{b_name} {metric}: {reason}"
                                );
                                eprintln!("skipped: {reason}");
                                skipped.push(reason);
                            }
                        }
                    }
                }
            }
        }
    }

    let report = SweepReport {
        seed,
        rows,
        skipped,
    };
    match cli.format {
        Format::Json => emit(cli, &serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            let mut text = format!("# seed={}\n{}\n", report.seed, DistanceDoc::csv_header());
            for row in &report.rows {
                text.push_str(&row.csv_row());
                text.push('\n');
            }
            emit(cli, &text)
        }
    }
}

fn sweep_cell(
    params: &ModelParams,
    a_name: &str,
    b_name: &str,
    metric: &str,
    epsilon: f64,
    max_points: usize,
    quad: &QuadratureSpec,
) -> Result<DistanceReport, CliError> {
    let a = LawKind::parse(a_name)?;
    let b = LawKind::parse(b_name)?;
    let law = |kind: LawKind| -> Result<_, CliError> {
        match kind {
            LawKind::Mih => enumerate_mih_support(params, max_points).map_err(CliError::from),
            LawKind::Nm => {
                let nm = ModelParams::infinite(params.failure_target(), params.weights())?;
                truncate_nm_support(&nm, epsilon, max_points).map_err(CliError::from)
            }
            _ => Err(CliError::Invalid("not a discrete law".into())),
        }
    };
    match (a.is_normal(), b.is_normal()) {
        (false, false) => {
            let la = law(a)?;
            let lb = law(b)?;
            match metric {
                "hellinger" => hellinger_discrete(&la, &lb).map_err(CliError::from),
                "tv" => tv_discrete(&la, &lb).map_err(CliError::from),
                "kl" => kl_discrete(&la, &lb).map_err(CliError::from),
                other => Err(CliError::Invalid(format!(
                    "metric {other:?} needs a normal side"
                ))),
            }
        }
        (false, true) | (true, false) => {
            let (disc, norm) = if a.is_normal() { (b, a) } else { (a, b) };
            let l = law(disc)?;
            let g = normal_family_spec(params, norm.family().unwrap())?;
            match metric {
                "hellinger" => hellinger_jittered_vs_normal(&JitteredLaw::new(l), &g, quad)
                    .map_err(CliError::from),
                "tv" => {
                    if norm == LawKind::NormalQstar {
                        tv_sqrt_jittered_vs_normal(&JitteredLaw::new(l), &g, quad)
                            .map_err(CliError::from)
                    } else {
                        tv_jittered_vs_normal(&JitteredLaw::new(l), &g, quad)
                            .map_err(CliError::from)
                    }
                }
                "kolmogorov" => kolmogorov_discrete_vs_normal(&l, &g).map_err(CliError::from),
                other => Err(CliError::Invalid(format!("unknown metric {other:?}"))),
            }
        }
        (true, true) => Err(CliError::Invalid(
            "normal-normal pairs are out of scope".into(),
        )),
    }
}
