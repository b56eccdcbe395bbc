//! `mih bounds-report`: the consolidated verification sweep.
//!
//! Four sections share one report:
//!
//! * `hellinger-shape`: the exact Hellinger distance between the
//!   finite-population law and its truncated infinite-population limit,
//!   normalized by the `d n^2 / (N q^2)` envelope; the normalized values
//!   must stay within a factor of ten of each other over the grid.
//! * `deficiency`: constructive transport bounds against the three normal
//!   families in both directions; the fitted constant `value * sqrt(n) / d`
//!   must be stable within a factor of three along each n-sweep, and the
//!   rounding-direction bound can never exceed the jitter-direction bound
//!   by more than the combined error estimates.
//! * `hellinger` rows: the jittered-law-to-normal Hellinger reference
//!   values emitted alongside the total-variation bounds.
//! * `concentration`: exact tail probabilities against the closed-form
//!   envelope, with the smallest population where domination holds
//!   recorded in the summary.
//!
//! Grid points that violate the lattice, the parameter-set gate or the
//! `N >= n^3 / d` precondition are skipped with a logged reason.

use clap::Args;
use serde::Serialize;

use mih_core::fitting::stability_ratio;
use mih_core::kernels::{
    concentration_bound_rhs, concentration_tail, deficiency_upper_bound_pq,
    deficiency_upper_bound_qp, BoundDirection, ExperimentFamily, FamilyKind,
};
use mih_core::metrics::hellinger_discrete;
use mih_core::mih::enumerate_mih_support;
use mih_core::nm::truncate_nm_support;
use mih_core::quadrature::QuadratureSpec;
use mih_core::{ModelParams, Ratio};

use crate::config::{BoundsConfig, FileConfig};
use crate::descriptor::{lattice_round_up, parse_weights};
use crate::output::emit;
use crate::{Cli, CliError, CliResult, Format};

#[derive(Args)]
pub struct BoundsArgs {
    /// Lower bound b for every category weight and q.
    #[arg(long)]
    pub b: Option<f64>,

    /// Concentration-region threshold gamma.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Quadrature nodes per axis per cell.
    #[arg(long)]
    pub nodes: Option<usize>,

    /// Tail bound for the truncated infinite-support law.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

pub const STABILITY_LIMIT: f64 = 3.0;
pub const SHAPE_RATIO_LIMIT: f64 = 10.0;

struct Resolved {
    b: f64,
    gamma: f64,
    nodes: usize,
    epsilon: f64,
    max_points: usize,
    families: Vec<FamilyKind>,
    deficiency_n: Vec<u64>,
    deficiency_populations: Option<Vec<u64>>,
    deficiency_weights: Vec<Vec<String>>,
    shape_n: Vec<u64>,
    shape_weights: Vec<Vec<String>>,
    concentration_populations: Vec<u64>,
    concentration_n: u64,
}

fn resolve(args: &BoundsArgs, file: Option<BoundsConfig>) -> Result<Resolved, CliError> {
    let f = file.unwrap_or(BoundsConfig {
        b: None,
        gamma: None,
        nodes: None,
        epsilon: None,
        max_points: None,
        families: None,
        deficiency_n: None,
        deficiency_populations: None,
        deficiency_weights: None,
        shape_n: None,
        shape_weights: None,
        concentration_populations: None,
        concentration_n: None,
    });
    let families = match f.families {
        None => vec![
            FamilyKind::NormalQ,
            FamilyKind::NormalQbar,
            FamilyKind::NormalQstar,
        ],
        Some(names) => names
            .iter()
            .map(|s| match s.as_str() {
                "q" => Ok(FamilyKind::NormalQ),
                "qbar" => Ok(FamilyKind::NormalQbar),
                "qstar" => Ok(FamilyKind::NormalQstar),
                other => Err(CliError::Invalid(format!("unknown family {other:?}"))),
            })
            .collect::<Result<_, _>>()?,
    };
    Ok(Resolved {
        b: args.b.or(f.b).unwrap_or(0.2),
        gamma: args.gamma.or(f.gamma).unwrap_or(0.75),
        nodes: args.nodes.or(f.nodes).unwrap_or(16),
        epsilon: args.epsilon.or(f.epsilon).unwrap_or(1e-12),
        max_points: f.max_points.unwrap_or(2_000_000),
        families,
        deficiency_n: f.deficiency_n.unwrap_or_else(|| vec![16, 36, 64, 100]),
        deficiency_populations: f.deficiency_populations,
        deficiency_weights: f
            .deficiency_weights
            .unwrap_or_else(|| vec![vec!["1/5".into()], vec!["2/5".into()]]),
        shape_n: f.shape_n.unwrap_or_else(|| vec![6, 8, 10]),
        shape_weights: f.shape_weights.unwrap_or_else(|| {
            vec![
                vec!["1/5".into()],
                vec!["2/5".into()],
                vec!["3/10".into()],
                vec!["1/5".into(), "1/5".into()],
                vec!["3/10".into(), "1/5".into()],
            ]
        }),
        concentration_populations: f
            .concentration_populations
            .unwrap_or_else(|| vec![20, 40, 80, 160, 320, 640]),
        concentration_n: f.concentration_n.unwrap_or(4),
    })
}

#[derive(Clone, Serialize)]
struct Row {
    section: String,
    family: String,
    direction: String,
    metric: String,
    method: String,
    b: f64,
    d: usize,
    n: u64,
    population: u64,
    weights: Vec<String>,
    gamma: f64,
    value: f64,
    error_estimate: f64,
    /// The rate shape the value is normalized by (d/sqrt(n) for deficiency
    /// rows, d n^2/(N q^2) for shape rows; 0 when not applicable).
    shape: f64,
    /// value / shape, the fitted-constant sample.
    normalized: f64,
    /// Companion quantity (the closed-form envelope for concentration rows).
    extra: f64,
}

#[derive(Serialize)]
struct Checks {
    data_processing_ok: bool,
    data_processing_failures: Vec<String>,
    stability: Vec<StabilityCheck>,
    stability_ok: bool,
    shape_ratio: f64,
    shape_ratio_ok: bool,
    concentration_threshold: Option<u64>,
    concentration_ok: bool,
}

#[derive(Serialize)]
struct StabilityCheck {
    family: String,
    weights: Vec<String>,
    constants: Vec<f64>,
    ratio: f64,
    pass: bool,
}

#[derive(Serialize)]
struct BoundsReport {
    seed: u64,
    b: f64,
    gamma: f64,
    nodes: usize,
    epsilon: f64,
    rows: Vec<Row>,
    skipped: Vec<String>,
    checks: Checks,
    pass: bool,
}

struct DeficiencyTask {
    weights: Vec<String>,
    n: u64,
    population: u64,
}

struct DeficiencyOutcome {
    rows: Vec<Row>,
    dp_failures: Vec<String>,
    /// (family, weights, fitted constant) samples for the stability check.
    constants: Vec<(String, Vec<String>, f64)>,
}

pub fn run(cli: &Cli, args: &BoundsArgs) -> CliResult {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = cli.resolved_seed(&file);
    let jobs = cli.resolved_jobs(&file);
    let cfg = resolve(args, file.bounds)?;
    let quad = QuadratureSpec::with_nodes(cfg.nodes);

    let mut skipped = Vec::new();
    let mut rows = Vec::new();

    // --- Hellinger shape section (sequential: cheap) ---
    let mut shape_values = Vec::new();
    for weights_spec in &cfg.shape_weights {
        let weights = parse_weights(&weights_spec.join(","), false)?;
        for &n in &cfg.shape_n {
            match shape_point(&cfg, weights_spec, &weights, n) {
                Ok((row, shape_value)) => {
                    shape_values.push(shape_value);
                    rows.push(row);
                }
                Err(reason) => {
                    eprintln!("skipped: {reason}");
                    skipped.push(reason);
                }
            }
        }
    }

    // --- Deficiency section (parallel over grid points) ---
    let mut tasks = Vec::new();
    for weights_spec in &cfg.deficiency_weights {
        let weights = parse_weights(&weights_spec.join(","), false)?;
        for (i, &n) in cfg.deficiency_n.iter().enumerate() {
            let population = match &cfg.deficiency_populations {
                Some(list) => match list.get(i) {
                    Some(&p) => p,
                    None => {
                        let reason = format!("deficiency n={n}: no pinned population at index {i}");
                        eprintln!("skipped: {reason}");
                        skipped.push(reason);
                        continue;
                    }
                },
                None => lattice_round_up(n * n * n, &weights),
            };
            let d = weights.len() as u64;
            if population * d < n * n * n {
                let reason = format!("deficiency n={n} N={population}: violates N >= n^3/d");
                eprintln!("skipped: {reason}");
                skipped.push(reason);
                continue;
            }
            tasks.push(DeficiencyTask {
                weights: weights_spec.clone(),
                n,
                population,
            });
        }
    }
    let outcomes = run_deficiency_tasks(&cfg, &quad, &tasks, jobs);
    let mut dp_failures = Vec::new();
    let mut constants: Vec<(String, Vec<String>, f64)> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(mut o) => {
                rows.append(&mut o.rows);
                dp_failures.append(&mut o.dp_failures);
                constants.append(&mut o.constants);
            }
            Err(reason) => {
                eprintln!("skipped: {reason}");
                skipped.push(reason);
            }
        }
    }

    // --- Concentration section ---
    let conc_weights = cfg
        .shape_weights
        .first()
        .cloned()
        .unwrap_or_else(|| vec!["1/5".into()]);
    let weights = parse_weights(&conc_weights.join(","), false)?;
    let mut conc_points: Vec<(u64, f64, f64)> = Vec::new();
    for &target in &cfg.concentration_populations {
        let population = lattice_round_up(target, &weights);
        match concentration_point(&cfg, &weights, population) {
            Ok((exact, rhs)) => {
                conc_points.push((population, exact, rhs));
                rows.push(Row {
                    section: "concentration".into(),
                    family: String::new(),
                    direction: String::new(),
                    metric: "tail".into(),
                    method: "closed-sum".into(),
                    b: cfg.b,
                    d: weights.len(),
                    n: cfg.concentration_n,
                    population,
                    weights: conc_weights.clone(),
                    gamma: cfg.gamma,
                    value: exact,
                    error_estimate: 1e-12,
                    shape: 0.0,
                    normalized: 0.0,
                    extra: rhs,
                });
            }
            Err(reason) => {
                eprintln!("skipped: {reason}");
                skipped.push(reason);
            }
        }
    }

    // --- Checks ---
    let mut stability = Vec::new();
    let mut stability_ok = true;
    for family in &cfg.families {
        for weights_spec in &cfg.deficiency_weights {
            let cs: Vec<f64> = constants
                .iter()
                .filter(|(f, w, _)| f == family_name(*family) && w == weights_spec)
                .map(|(_, _, c)| *c)
                .collect();
            if cs.len() < 2 {
                continue;
            }
            let ratio = stability_ratio(&cs).unwrap_or(f64::INFINITY);
            let pass = ratio <= STABILITY_LIMIT;
            stability_ok &= pass;
            stability.push(StabilityCheck {
                family: family_name(*family).to_string(),
                weights: weights_spec.clone(),
                constants: cs,
                ratio,
                pass,
            });
        }
    }
    let shape_ratio = stability_ratio(&shape_values).unwrap_or(f64::INFINITY);
    let shape_ratio_ok = shape_values.is_empty() || shape_ratio <= SHAPE_RATIO_LIMIT;
    // Smallest population from which domination holds through the rest of
    // the series.
    let mut concentration_threshold = None;
    conc_points.sort_by_key(|&(p, _, _)| p);
    for i in 0..conc_points.len() {
        if conc_points[i..].iter().all(|&(_, exact, rhs)| exact <= rhs) {
            concentration_threshold = Some(conc_points[i].0);
            break;
        }
    }
    let concentration_ok = conc_points.is_empty() || concentration_threshold.is_some();
    let data_processing_ok = dp_failures.is_empty();
    let pass = data_processing_ok && stability_ok && shape_ratio_ok && concentration_ok;

    let report = BoundsReport {
        seed,
        b: cfg.b,
        gamma: cfg.gamma,
        nodes: cfg.nodes,
        epsilon: cfg.epsilon,
        rows,
        skipped,
        checks: Checks {
            data_processing_ok,
            data_processing_failures: dp_failures,
            stability,
            stability_ok,
            shape_ratio,
            shape_ratio_ok,
            concentration_threshold,
            concentration_ok,
        },
        pass,
    };
    match cli.format {
        Format::Json => emit(cli, &serde_json::to_string_pretty(&report).unwrap())?,
        Format::Csv => emit(cli, &render_csv(&report))?,
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(describe_failures(&report)))
    }
}

fn family_name(kind: FamilyKind) -> &'static str {
    kind.name()
}

fn shape_point(
    cfg: &Resolved,
    weights_spec: &[String],
    weights: &[Ratio],
    n: u64,
) -> Result<(Row, f64), String> {
    let population = lattice_round_up(n * n * n, weights);
    let d = weights.len();
    let params = ModelParams::finite(population, n, weights)
        .map_err(|e| format!("shape n={n} N={population}: {e}"))?;
    let nm_params = ModelParams::infinite(n, weights).expect("weights validated");
    check_theta_b(cfg.b, &params).map_err(|e| format!("shape n={n} N={population}: {e}"))?;
    let mih = enumerate_mih_support(&params, cfg.max_points)
        .map_err(|e| format!("shape n={n} N={population}: {e}"))?;
    let nm = truncate_nm_support(&nm_params, cfg.epsilon, cfg.max_points)
        .map_err(|e| format!("shape n={n}: {e}"))?;
    let h = hellinger_discrete(&mih, &nm).map_err(|e| format!("shape n={n}: {e}"))?;
    let q = params.failure_weight_f64();
    let envelope = d as f64 * (n * n) as f64 / (population as f64 * q * q);
    let normalized = h.value * h.value / envelope;
    let row = Row {
        section: "hellinger-shape".into(),
        family: "nm".into(),
        direction: String::new(),
        metric: "hellinger".into(),
        method: "closed-sum".into(),
        b: cfg.b,
        d,
        n,
        population,
        weights: weights_spec.to_vec(),
        gamma: cfg.gamma,
        value: h.value,
        error_estimate: h.error_estimate,
        shape: envelope,
        normalized,
        extra: 0.0,
    };
    Ok((row, normalized))
}

fn check_theta_b(b: f64, params: &ModelParams) -> Result<(), mih_core::Error> {
    ExperimentFamily::new(FamilyKind::NormalQ, b)?.validate(params)
}

fn concentration_point(
    cfg: &Resolved,
    weights: &[Ratio],
    population: u64,
) -> Result<(f64, f64), String> {
    let params = ModelParams::finite(population, cfg.concentration_n, weights)
        .map_err(|e| format!("concentration N={population}: {e}"))?;
    let exact = concentration_tail(&params, cfg.gamma, cfg.max_points)
        .map_err(|e| format!("concentration N={population}: {e}"))?;
    let rhs = concentration_bound_rhs(&params)
        .map_err(|e| format!("concentration N={population}: {e}"))?;
    Ok((exact, rhs))
}

fn run_deficiency_tasks(
    cfg: &Resolved,
    quad: &QuadratureSpec,
    tasks: &[DeficiencyTask],
    jobs: usize,
) -> Vec<Result<DeficiencyOutcome, String>> {
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<Option<Result<DeficiencyOutcome, String>>> =
        (0..tasks.len()).map(|_| None).collect();
    let slots: Vec<std::sync::Mutex<Option<Result<DeficiencyOutcome, String>>>> = (0..tasks.len())
        .map(|_| std::sync::Mutex::new(None))
        .collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let outcome = deficiency_point(cfg, quad, &tasks[i]);
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });
    for (i, slot) in slots.into_iter().enumerate() {
        results[i] = slot.into_inner().unwrap();
    }
    results
        .into_iter()
        .map(|r| r.expect("every task completed"))
        .collect()
}

fn deficiency_point(
    cfg: &Resolved,
    quad: &QuadratureSpec,
    task: &DeficiencyTask,
) -> Result<DeficiencyOutcome, String> {
    let weights = parse_weights(&task.weights.join(","), false)
        .map_err(|_| format!("deficiency: bad weights {:?}", task.weights))?;
    let params = ModelParams::finite(task.population, task.n, &weights)
        .map_err(|e| format!("deficiency n={} N={}: {e}", task.n, task.population))?;
    let d = params.dim();
    let mut rows = Vec::new();
    let mut dp_failures = Vec::new();
    let mut constants = Vec::new();
    for &kind in &cfg.families {
        let family = ExperimentFamily::new(kind, cfg.b).map_err(|e| format!("deficiency: {e}"))?;
        let pq = deficiency_upper_bound_pq(&params, &family, quad, cfg.max_points)
            .map_err(|e| format!("deficiency n={} {}: {e}", task.n, kind.name()))?;
        let qp = deficiency_upper_bound_qp(&params, &family, quad, cfg.max_points)
            .map_err(|e| format!("deficiency n={} {}: {e}", task.n, kind.name()))?;
        let shape = pq.theoretical_rhs;
        let c = pq.upper_bound / shape;
        constants.push((kind.name().to_string(), task.weights.clone(), c));
        let budget = pq.components[0].error_estimate + qp.components[0].error_estimate;
        if qp.upper_bound > pq.upper_bound + budget {
            dp_failures.push(format!(
                "n={} N={} {}: q->p bound {} exceeds p->q bound {} plus errors {}",
                task.n,
                task.population,
                kind.name(),
                qp.upper_bound,
                pq.upper_bound,
                budget
            ));
        }
        let mut push = |direction: &BoundDirection, report: &mih_core::metrics::DistanceReport| {
            rows.push(Row {
                section: "deficiency".into(),
                family: kind.name().into(),
                direction: match direction {
                    BoundDirection::PToQ => "p->q".into(),
                    BoundDirection::QToP => "q->p".into(),
                },
                metric: report.metric.name().into(),
                method: report.method.name().into(),
                b: cfg.b,
                d,
                n: task.n,
                population: task.population,
                weights: task.weights.clone(),
                gamma: cfg.gamma,
                value: report.value,
                error_estimate: report.error_estimate,
                shape,
                normalized: report.value / shape,
                extra: 0.0,
            });
        };
        // Defining TV bound plus the Hellinger reference where emitted.
        for component in &pq.components {
            push(&pq.direction, component);
        }
        push(&qp.direction, &qp.components[0]);
    }
    Ok(DeficiencyOutcome {
        rows,
        dp_failures,
        constants,
    })
}

fn render_csv(report: &BoundsReport) -> String {
    let mut text = format!(
        "# seed={}\n# b={}\n# gamma={}\n# nodes={}\n# epsilon={}\n",
        report.seed, report.b, report.gamma, report.nodes, report.epsilon
    );
    text.push_str(
        "section,family,direction,metric,method,b,d,n,N,weights,gamma,value,error_estimate,shape,normalized,extra\n",
    );
    for r in &report.rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.section,
            r.family,
            r.direction,
            r.metric,
            r.method,
            r.b,
            r.d,
            r.n,
            r.population,
            r.weights.join("|"),
            r.gamma,
            r.value,
            r.error_estimate,
            r.shape,
            r.normalized,
            r.extra
        ));
    }
    for s in &report.checks.stability {
        text.push_str(&format!(
            "# stability family={} weights={} ratio={} pass={}\n",
            s.family,
            s.weights.join("|"),
            s.ratio,
            s.pass
        ));
    }
    text.push_str(&format!(
        "# shape_ratio={} pass={}\n",
        report.checks.shape_ratio, report.checks.shape_ratio_ok
    ));
    if let Some(t) = report.checks.concentration_threshold {
        text.push_str(&format!("# concentration_threshold={t}\n"));
    }
    text.push_str(&format!("# pass={}\n", report.pass));
    text
}

fn describe_failures(report: &BoundsReport) -> String {
    let mut parts = Vec::new();
    if !report.checks.data_processing_ok {
        parts.push(format!(
            "data-processing violations: {}",
            report.checks.data_processing_failures.join("; ")
        ));
    }
    if !report.checks.stability_ok {
        let failing: Vec<String> = report
            .checks
            .stability
            .iter()
            .filter(|s| !s.pass)
            .map(|s| format!("{} {} ratio {}", s.family, s.weights.join("|"), s.ratio))
            .collect();
        parts.push(format!("constant stability: {}", failing.join("; ")));
    }
    if !report.checks.shape_ratio_ok {
        parts.push(format!(
            "hellinger shape ratio {}",
            report.checks.shape_ratio
        ));
    }
    if !report.checks.concentration_ok {
        parts.push("concentration envelope never dominates".to_string());
    }
    parts.join("; ")
}
