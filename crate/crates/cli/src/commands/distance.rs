//! `mih distance`: one distance between two laws over a shared parameter
//! set.
//!
//! Discrete pairs (mih/nm) use exact closed sums. Comparisons against a
//! normal family go through the jitter kernel (Hellinger, total variation)
//! or the rounding kernel (`--rounded` total variation), matching the
//! transports the deficiency bounds are built from.

use clap::Args;

use mih_core::kernels::normal_family_spec;
use mih_core::metrics::{
    hellinger_discrete, hellinger_jittered_vs_normal, kl_discrete, kolmogorov_discrete_vs_normal,
    tv_discrete, tv_discrete_vs_rounded_normal, tv_jittered_vs_normal, tv_sqrt_jittered_vs_normal,
    DistanceReport, JitteredLaw,
};
use mih_core::mih::enumerate_mih_support;
use mih_core::nm::truncate_nm_support;
use mih_core::quadrature::QuadratureSpec;
use mih_core::{DiscreteLaw, ModelParams};

use crate::descriptor::{build_params, LawKind};
use crate::formats::DistanceDoc;
use crate::output::emit;
use crate::{Cli, CliError, CliResult, Format};

#[derive(Args)]
pub struct DistanceArgs {
    /// Metric: hellinger, tv, kl or kolmogorov.
    #[arg(long)]
    pub metric: String,

    /// First law: mih, nm, normal-q, normal-qbar or normal-qstar.
    #[arg(long)]
    pub a: String,

    /// Second law.
    #[arg(long)]
    pub b: String,

    /// Population size, or "inf".
    #[arg(short = 'N', long, default_value = "inf")]
    pub population: String,

    /// Failure target.
    #[arg(short, long)]
    pub n: u64,

    /// Comma-separated category weights.
    #[arg(short, long)]
    pub p: String,

    /// Tail bound for truncating the infinite-support law.
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,

    /// Quadrature nodes per axis per cell.
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,

    /// For tv against a normal family: compare through the rounding kernel
    /// instead of the jitter kernel.
    #[arg(long)]
    pub rounded: bool,

    /// Enumeration cap.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_points: usize,
}

fn law_for(
    kind: LawKind,
    params: &ModelParams,
    args: &DistanceArgs,
) -> Result<DiscreteLaw, CliError> {
    match kind {
        LawKind::Mih => enumerate_mih_support(params, args.max_points).map_err(CliError::from),
        LawKind::Nm => {
            truncate_nm_support(params, args.epsilon, args.max_points).map_err(CliError::from)
        }
        _ => Err(CliError::Invalid(
            "normal families have no discrete law".to_string(),
        )),
    }
}

pub fn run(cli: &Cli, args: &DistanceArgs) -> CliResult {
    let file = crate::config::FileConfig::load(cli.config.as_deref())?;
    let seed = cli.resolved_seed(&file);
    let params = build_params(&args.population, args.n, &args.p)?;
    let a = LawKind::parse(&args.a)?;
    let b = LawKind::parse(&args.b)?;
    let quad = QuadratureSpec::with_nodes(args.nodes);

    let report: DistanceReport = match (a.is_normal(), b.is_normal()) {
        (false, false) => {
            let law_a = law_for(a, &params, args)?;
            let law_b = law_for(b, &params, args)?;
            match args.metric.as_str() {
                "hellinger" => hellinger_discrete(&law_a, &law_b)?,
                "tv" => tv_discrete(&law_a, &law_b)?,
                "kl" => kl_discrete(&law_a, &law_b)?,
                "kolmogorov" => {
                    return Err(CliError::Invalid(
                        "kolmogorov compares a law against a normal family; pass --b normal-q, normal-qbar or normal-qstar".to_string(),
                    ))
                }
                other => return Err(CliError::Invalid(format!("unknown metric {other:?}"))),
            }
        }
        (false, true) | (true, false) => {
            // Normalize so the discrete law is on the left; all supported
            // metrics here are symmetric in their arguments.
            let (disc_kind, normal_kind) = if a.is_normal() { (b, a) } else { (a, b) };
            let law = law_for(disc_kind, &params, args)?;
            let g = normal_family_spec(&params, normal_kind.family().unwrap())?;
            match args.metric.as_str() {
                "hellinger" => hellinger_jittered_vs_normal(&JitteredLaw::new(law), &g, &quad)?,
                "tv" => {
                    if args.rounded {
                        tv_discrete_vs_rounded_normal(&law, &g, &quad)?
                    } else if normal_kind == LawKind::NormalQstar {
                        tv_sqrt_jittered_vs_normal(&JitteredLaw::new(law), &g, &quad)?
                    } else {
                        tv_jittered_vs_normal(&JitteredLaw::new(law), &g, &quad)?
                    }
                }
                "kolmogorov" => kolmogorov_discrete_vs_normal(&law, &g)?,
                "kl" => {
                    return Err(CliError::Invalid(
                        "kl is only defined here between discrete laws".to_string(),
                    ))
                }
                other => return Err(CliError::Invalid(format!("unknown metric {other:?}"))),
            }
        }
        (true, true) => {
            return Err(CliError::Invalid(
                "distances between two normal families are out of scope".to_string(),
            ))
        }
    };

    let doc = DistanceDoc::new(&report, &params, (&args.a, &args.b), seed);
    match cli.format {
        Format::Json => emit(cli, &serde_json::to_string_pretty(&doc).unwrap()),
        Format::Csv => emit(
            cli,
            &format!("{}\n{}\n", DistanceDoc::csv_header(), doc.csv_row()),
        ),
    }
}
