//! `mih expansion-check`: residual sweeps for the local log-ratio expansion
//! with fitted decay rates.
//!
//! Each grid cell fixes `(n, p, k)` and doubles the population from a base
//! value; the order-1 and order-2 residual magnitudes must decay with
//! log-log slopes in [-2.3, -1.7] and [-3.4, -2.6] respectively. Cells
//! whose count falls outside the validity region are skipped with a logged
//! reason and do not affect the exit code.

use clap::Args;
use serde::Serialize;

use mih_core::expansion::{
    exact_log_ratio, expansion_terms, in_region, ExpansionTerms, RegionSpec,
};
use mih_core::fitting::log_log_slope;
use mih_core::{CountVector, ModelParams, Ratio};

use crate::config::{ExpansionCell, FileConfig};
use crate::descriptor::parse_weights;
use crate::output::emit;
use crate::{Cli, CliError, CliResult, Format};

#[derive(Args)]
pub struct ExpansionArgs {
    /// Region threshold gamma.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Number of population doublings per cell.
    #[arg(long)]
    pub doublings: Option<u32>,
}

pub const ORDER1_SLOPE_RANGE: (f64, f64) = (-2.3, -1.7);
pub const ORDER2_SLOPE_RANGE: (f64, f64) = (-3.4, -2.6);

/// The fixed default grid: univariate and bivariate cells over three
/// failure targets each.
fn default_cells() -> Vec<ExpansionCell> {
    let uni = |n: u64, k: Vec<u64>| ExpansionCell {
        n,
        weights: vec!["1/2".to_string()],
        k,
        base_population: 64,
    };
    let bi = |n: u64, k: Vec<u64>| ExpansionCell {
        n,
        weights: vec!["1/3".to_string(), "1/3".to_string()],
        k,
        base_population: 96,
    };
    vec![
        uni(1, vec![2]),
        uni(2, vec![2]),
        uni(4, vec![3]),
        bi(1, vec![1, 2]),
        bi(2, vec![2, 1]),
        bi(4, vec![2, 2]),
    ]
}

#[derive(Serialize)]
struct ResidualRow {
    population: u64,
    n: u64,
    d: usize,
    weights: Vec<String>,
    k: Vec<u64>,
    gamma: f64,
    order: usize,
    exact: f64,
    approx: f64,
    residual: f64,
    remainder_scale: f64,
}

#[derive(Serialize)]
struct SlopeSummary {
    n: u64,
    weights: Vec<String>,
    k: Vec<u64>,
    order: usize,
    slope: f64,
    range: (f64, f64),
    /// Largest |residual| / remainder_scale over the sweep: the empirical
    /// constant of the remainder bracket, reported rather than assumed.
    fitted_remainder_constant: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ExpansionReport {
    seed: u64,
    gamma: f64,
    doublings: u32,
    rows: Vec<ResidualRow>,
    slopes: Vec<SlopeSummary>,
    skipped: Vec<String>,
    pass: bool,
}

pub fn run(cli: &Cli, args: &ExpansionArgs) -> CliResult {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = cli.resolved_seed(&file);
    let section = file.expansion;
    let gamma = args
        .gamma
        .or(section.as_ref().and_then(|s| s.gamma))
        .unwrap_or(0.75);
    let doublings = args
        .doublings
        .or(section.as_ref().and_then(|s| s.doublings))
        .unwrap_or(6);
    let cells = match section {
        Some(s) if !s.cells.is_empty() => s.cells,
        _ => default_cells(),
    };
    if doublings < 5 {
        return Err(CliError::Invalid(
            "rate fits need at least 5 population doublings".to_string(),
        ));
    }
    let region = RegionSpec::new(gamma)?;

    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    let mut skipped = Vec::new();
    let mut all_pass = true;
    for cell in &cells {
        let weights: Vec<Ratio> = parse_weights(&cell.weights.join(","), false)?;
        let k = CountVector::new(cell.k.clone());
        let mut sweep: Vec<(f64, ExpansionTerms, f64)> = Vec::new();
        for j in 0..doublings {
            let population = cell.base_population << j;
            let params = match ModelParams::finite(population, cell.n, &weights) {
                Ok(p) => p,
                Err(e) => {
                    let reason = format!("cell n={} k={:?} N={population}: {e}", cell.n, cell.k);
                    eprintln!("skipped: {reason}");
                    skipped.push(reason);
                    continue;
                }
            };
            if !in_region(&params, &k, &region)? {
                let reason = format!(
                    "cell n={} k={:?} N={population}: outside region gamma={gamma}",
                    cell.n, cell.k
                );
                eprintln!("skipped: {reason}");
                skipped.push(reason);
                continue;
            }
            let exact = exact_log_ratio(&params, &k)?;
            let terms = expansion_terms(&params, &k, &region)?;
            sweep.push((population as f64, terms, exact));
            for order in [0usize, 1, 2] {
                let approx = terms.partial_sum(order).map_err(CliError::from)?;
                rows.push(ResidualRow {
                    population,
                    n: cell.n,
                    d: weights.len(),
                    weights: cell.weights.clone(),
                    k: cell.k.clone(),
                    gamma,
                    order,
                    exact,
                    approx,
                    residual: exact - approx,
                    remainder_scale: terms.remainder_scale,
                });
            }
        }
        if sweep.len() < 2 {
            continue;
        }
        for (order, range) in [(1usize, ORDER1_SLOPE_RANGE), (2, ORDER2_SLOPE_RANGE)] {
            let pts: Vec<(f64, f64)> = sweep
                .iter()
                .map(|(pop, terms, exact)| {
                    ((*pop), (exact - terms.partial_sum(order).unwrap()).abs())
                })
                .collect();
            let fitted_remainder_constant = sweep
                .iter()
                .map(|(_, terms, exact)| {
                    (exact - terms.partial_sum(2).unwrap()).abs() / terms.remainder_scale
                })
                .fold(0.0, f64::max);
            match log_log_slope(&pts) {
                Some(fit) => {
                    let pass = fit.slope >= range.0 && fit.slope <= range.1;
                    all_pass &= pass;
                    slopes.push(SlopeSummary {
                        n: cell.n,
                        weights: cell.weights.clone(),
                        k: cell.k.clone(),
                        order,
                        slope: fit.slope,
                        range,
                        fitted_remainder_constant,
                        pass,
                    });
                }
                None => {
                    // Residuals identically zero: the expansion is exact
                    // here (e.g. k = 0 with a single failure), which cannot
                    // fail a decay check.
                    slopes.push(SlopeSummary {
                        n: cell.n,
                        weights: cell.weights.clone(),
                        k: cell.k.clone(),
                        order,
                        slope: f64::NEG_INFINITY,
                        range,
                        fitted_remainder_constant,
                        pass: true,
                    });
                }
            }
        }
    }

    let report = ExpansionReport {
        seed,
        gamma,
        doublings,
        rows,
        slopes,
        skipped,
        pass: all_pass,
    };
    match cli.format {
        Format::Json => emit(cli, &serde_json::to_string_pretty(&report).unwrap())?,
        Format::Csv => emit(cli, &render_csv(&report))?,
    }
    if all_pass {
        Ok(())
    } else {
        let failing: Vec<String> = report
            .slopes
            .iter()
            .filter(|s| !s.pass)
            .map(|s| {
                format!(
                    "n={} k={:?} order={} slope={:.4}",
                    s.n, s.k, s.order, s.slope
                )
            })
            .collect();
        Err(CliError::CheckFailed(format!(
            "slope checks failed: {}",
            failing.join("; ")
        )))
    }
}

fn render_csv(report: &ExpansionReport) -> String {
    let dmax = report.rows.iter().map(|r| r.d).max().unwrap_or(1);
    let mut text = format!("# seed={}\n# gamma={}\n", report.seed, report.gamma);
    let mut header = vec!["N".to_string(), "n".to_string(), "d".to_string()];
    header.extend((0..dmax).map(|i| format!("p{i}")));
    header.extend((0..dmax).map(|i| format!("k{i}")));
    header.extend(
        [
            "gamma",
            "order",
            "exact",
            "approx",
            "residual",
            "remainder_scale",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    text.push_str(&header.join(","));
    text.push('\n');
    for r in &report.rows {
        let mut row = vec![r.population.to_string(), r.n.to_string(), r.d.to_string()];
        for i in 0..dmax {
            row.push(r.weights.get(i).cloned().unwrap_or_default());
        }
        for i in 0..dmax {
            row.push(r.k.get(i).map(|v| v.to_string()).unwrap_or_default());
        }
        row.push(format!("{}", r.gamma));
        row.push(r.order.to_string());
        row.push(format!("{}", r.exact));
        row.push(format!("{}", r.approx));
        row.push(format!("{}", r.residual));
        row.push(format!("{}", r.remainder_scale));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    for s in &report.slopes {
        text.push_str(&format!(
            "# slope n={} k={:?} order={} slope={} pass={}\n",
            s.n, s.k, s.order, s.slope, s.pass
        ));
    }
    text
}
