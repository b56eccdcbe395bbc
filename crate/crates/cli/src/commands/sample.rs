//! `mih sample`: reproducible draws from either sampler.

use clap::Args;
use serde::Serialize;

use mih_core::mih::sample_mih;
use mih_core::moments::moments_from_samples;
use mih_core::nm::sample_nm;
use mih_core::{CountVector, CounterRng};

use crate::descriptor::build_params;
use crate::formats::{MomentsDoc, ParamsDoc};
use crate::output::emit;
use crate::{Cli, CliError, CliResult, Format};

#[derive(Args)]
pub struct SampleArgs {
    /// Distribution: "mih" or "nm".
    pub dist: String,

    /// Population size, or "inf" for the infinite sentinel.
    #[arg(short = 'N', long, default_value = "inf")]
    pub population: String,

    /// Failure target.
    #[arg(short, long)]
    pub n: u64,

    /// Comma-separated category weights.
    #[arg(short, long)]
    pub p: String,

    /// Number of draws.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,

    /// Append an empirical mean/covariance summary.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Serialize)]
struct SampleDoc {
    params: ParamsDoc,
    seed: u64,
    draws: Vec<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<MomentsDoc>,
}

pub fn run(cli: &Cli, args: &SampleArgs) -> CliResult {
    let file = crate::config::FileConfig::load(cli.config.as_deref())?;
    let seed = cli.resolved_seed(&file);
    let params = build_params(&args.population, args.n, &args.p)?;
    let mut rng = CounterRng::new(seed);
    let sample: Vec<CountVector> = (0..args.draws)
        .map(|_| match args.dist.as_str() {
            "mih" => sample_mih(&params, &mut rng).map_err(CliError::from),
            "nm" => sample_nm(&params, &mut rng).map_err(CliError::from),
            other => Err(CliError::Invalid(format!("unknown distribution {other:?}"))),
        })
        .collect::<Result<_, _>>()?;
    let summary = if args.summary {
        moments_from_samples(&sample).map(|m| MomentsDoc::new(&m))
    } else {
        None
    };
    let doc = SampleDoc {
        params: ParamsDoc::from_params(&params),
        seed,
        draws: sample.iter().map(|k| k.as_slice().to_vec()).collect(),
        summary,
    };
    match cli.format {
        Format::Json => emit(cli, &serde_json::to_string_pretty(&doc).unwrap()),
        Format::Csv => {
            let mut text = format!("# seed={}\n", seed);
            let dim = params_dim(&doc);
            let header: Vec<String> = (0..dim).map(|i| format!("k{i}")).collect();
            text.push_str(&header.join(","));
            text.push('\n');
            for d in &doc.draws {
                text.push_str(&d.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
                text.push('\n');
            }
            if let Some(s) = &doc.summary {
                text.push_str(&format!(
                    "# mean={}\n# covariance={}\n",
                    join_floats(&s.mean),
                    join_floats(&s.covariance)
                ));
            }
            emit(cli, &text)
        }
    }
}

fn params_dim(doc: &SampleDoc) -> usize {
    doc.params.weights.len()
}

fn join_floats(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join("|")
}
