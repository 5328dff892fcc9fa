//! Configuration-driven command-line front end: build models, run index
//! computations and verification suites, emit reports.
//!
//! Exit codes: 0 on confident results / all suites passing, 2 on
//! indeterminate rank decisions or missing convergence plateaus, 1 on every
//! other error.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eqindex_core::acceptance;
use eqindex_core::error::Error;
use eqindex_core::index::{
    convergence_study, deformed_plane_index, equivariant_index, fredholm_index, gluing_check,
    gluing_suite, homotopy_suite, stability_suite, CaseOutcome, IndexReport, IndexValue, LabelRow,
    RankPolicy, SuiteOutcome,
};
use eqindex_core::linalg::ONE;
use eqindex_core::models::{
    build_circle_model, build_shift_model, build_toeplitz_model, sin_potential, GluedParams,
    IsotypicBlockOperator, PlaneParams, Rescaling, Warp,
};
use eqindex_core::symbols::{
    ellipticity_check, DiffOpCoefficients, DEFAULT_BASE_POINTS, DEFAULT_SPHERE_SAMPLES,
};

use config::{preset, BuiltModel, ConfigFile, ModelConfig};

#[derive(Parser)]
#[command(
    name = "eqindex",
    about = "Fredholm and equivariant indices of finite operator models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured model, compute its index, write a report.
    Run(RunArgs),
    /// Run a named verification suite over its built-in model set
    /// (acceptance, stability, homotopy, gluing, convergence, symbols).
    Suite {
        name: String,
        /// Output format: text or machine (canonical JSON).
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Write the dense model matrix and its label annotations.
    Dump(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in model preset, overriding the config's model section.
    #[arg(long)]
    model: Option<String>,
    /// Override the absolute singular-value floor of the rank policy.
    #[arg(long)]
    tol: Option<f64>,
    /// Weight window "lo:hi" for windowed models.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Override the model's main truncation parameter (grid size or cutoff).
    #[arg(long)]
    resolution: Option<usize>,
    /// Seed recorded in the report and used by randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format: text or machine (canonical JSON).
    #[arg(long)]
    format: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version print and succeed; real usage errors exit 1
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Suite { name, format } => cmd_suite(&name, &format),
        Command::Dump(args) => cmd_dump(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Indeterminate { .. } | Error::NoPlateau(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

struct Resolved {
    model: ModelConfig,
    policy: RankPolicy,
    seed: Option<u64>,
    window: Option<(i64, i64)>,
    resolutions: Option<Vec<usize>>,
    machine: bool,
}

fn resolve(args: &RunArgs) -> Result<Resolved, Error> {
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
            })?;
            Some(ConfigFile::parse(&text)?)
        }
        None => None,
    };
    let model = match (&args.model, &cfg) {
        (Some(name), _) => preset(name)?,
        (None, Some(c)) => c.model.clone(),
        (None, None) => {
            return Err(Error::InvalidParameter(
                "pass --config <file> or --model <preset>".into(),
            ))
        }
    };
    let model = match args.resolution {
        Some(r) => override_resolution(model, r),
        None => model,
    };
    let mut policy = cfg
        .as_ref()
        .map(|c| c.policy.to_policy())
        .unwrap_or_default();
    if let Some(tol) = args.tol {
        policy.absolute_floor = tol;
    }
    let window = match &args.window {
        Some(raw) => Some(parse_window(raw)?),
        None => cfg.as_ref().and_then(|c| c.run.window),
    };
    let format = args
        .format
        .clone()
        .or_else(|| cfg.as_ref().and_then(|c| c.run.format.clone()))
        .unwrap_or_else(|| "text".to_string());
    let machine = match format.as_str() {
        "machine" => true,
        "text" => false,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown format '{other}' (expected text or machine)"
            )))
        }
    };
    Ok(Resolved {
        model,
        policy,
        seed: args.seed.or_else(|| cfg.as_ref().and_then(|c| c.run.seed)),
        window,
        resolutions: cfg.as_ref().and_then(|c| c.run.resolutions.clone()),
        machine,
    })
}

fn parse_window(raw: &str) -> Result<(i64, i64), Error> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "window '{raw}' is not of the form lo:hi"
        )));
    }
    let lo: i64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad window bound '{}'", parts[0])))?;
    let hi: i64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad window bound '{}'", parts[1])))?;
    if lo > hi {
        return Err(Error::InvalidParameter(format!(
            "window bounds out of order: {lo}:{hi}"
        )));
    }
    Ok((lo, hi))
}

fn override_resolution(model: ModelConfig, r: usize) -> ModelConfig {
    match model {
        ModelConfig::Shift { .. } => ModelConfig::Shift { n: r },
        ModelConfig::ShiftZ2 { .. } => ModelConfig::ShiftZ2 { n: r },
        ModelConfig::Toeplitz { coefficients, .. } => ModelConfig::Toeplitz { coefficients, n: r },
        ModelConfig::CircleFirstOrder { potential, .. } => ModelConfig::CircleFirstOrder {
            potential,
            cutoff: r,
        },
        ModelConfig::DerhamCircle { deformed, .. } => ModelConfig::DerhamCircle {
            cutoff: r,
            deformed,
        },
        ModelConfig::Product { base, .. } => ModelConfig::Product { cutoff: r, base },
        ModelConfig::PlaneWeight {
            radius,
            rescaling,
            weight,
            ..
        } => ModelConfig::PlaneWeight {
            n_r: r,
            radius,
            rescaling,
            weight,
        },
        ModelConfig::PlaneGlued {
            radius,
            rescaling,
            warp,
            split_radius,
            ..
        } => ModelConfig::PlaneGlued {
            n_r: r,
            radius,
            rescaling,
            warp,
            split_radius,
        },
        other @ ModelConfig::CustomOperator { .. } => other,
    }
}

fn emit(report: &IndexReport, machine: bool) {
    if machine {
        println!("{}", report.to_machine_json());
    } else {
        print!("{}", report.to_text());
    }
}

fn cmd_run(args: RunArgs) -> Result<u8, Error> {
    let resolved = resolve(&args)?;
    match resolved.model.build()? {
        BuiltModel::Operator(model) => run_operator(&model, &resolved),
        BuiltModel::PlaneWindow(params) => run_plane_window(&params, &resolved),
        BuiltModel::Glued(params) => run_glued(&params, &resolved),
        BuiltModel::Symbol(op) => run_symbol(&op, &resolved),
    }
}

fn run_operator(model: &IsotypicBlockOperator, resolved: &Resolved) -> Result<u8, Error> {
    let mut report = IndexReport::new(resolved.policy).with_model(model.metadata().clone());
    if let Some(seed) = resolved.seed {
        report = report.with_seed(seed);
    }
    match equivariant_index(model, &resolved.policy) {
        Ok(e) => {
            report = report.with_index(e.value.clone());
            for lm in &e.per_label {
                report.labels.push(LabelRow {
                    label: lm.domain_label.to_string(),
                    kernel_multiplicity: lm.kernel.kernel_dim,
                    cokernel_multiplicity: lm.cokernel.kernel_dim,
                    index: lm.kernel.kernel_dim as i64 - lm.cokernel.kernel_dim as i64,
                    kernel_gap: lm.kernel.gap_ratio,
                    cokernel_gap: lm.cokernel.gap_ratio,
                });
            }
        }
        // A lone block whose kernel and cokernel labels never overlap (a
        // single plane weight, say) has no assembled character; report the
        // per-side multiplicities instead of fabricating window entries.
        Err(Error::Model(msg)) if msg.contains("empty label window") => {
            let c = eqindex_core::index::fredholm_index_detailed(model, &resolved.policy)?;
            let (domain_label, _) = &model.domain_labels()[0];
            let (codomain_label, _) = &model.codomain_labels()[0];
            report.labels.push(LabelRow {
                label: format!("{domain_label} -> {codomain_label}"),
                kernel_multiplicity: c.kernel.kernel_dim,
                cokernel_multiplicity: c.cokernel.kernel_dim,
                index: c.index,
                kernel_gap: c.kernel.gap_ratio,
                cokernel_gap: c.cokernel.gap_ratio,
            });
            report.diagnostics.push(
                "single block: kernel labeled by the domain weight, cokernel by the codomain \
                 weight; run with a window for the assembled character"
                    .into(),
            );
        }
        Err(e) => return Err(e),
    }
    emit(&report, resolved.machine);
    Ok(0)
}

fn run_plane_window(params: &PlaneParams, resolved: &Resolved) -> Result<u8, Error> {
    let window = resolved.window.unwrap_or((-8, 8));
    let d = deformed_plane_index(params, window, &resolved.policy)?;
    let meta = eqindex_core::models::build_plane_weight_model(window.0, params)?
        .metadata()
        .clone();
    let mut report = IndexReport::new(resolved.policy)
        .with_model(meta)
        .with_index(IndexValue::Windowed(d.character.clone()));
    if let Some(seed) = resolved.seed {
        report = report.with_seed(seed);
    }
    for e in &d.entries {
        report.labels.push(LabelRow {
            label: format!("m={}", e.weight),
            kernel_multiplicity: e.kernel_multiplicity,
            cokernel_multiplicity: e.cokernel_multiplicity,
            index: e.kernel_multiplicity as i64 - e.cokernel_multiplicity as i64,
            kernel_gap: e.kernel_gap,
            cokernel_gap: e.cokernel_gap,
        });
    }
    report.diagnostics.push(format!(
        "label offset {}; window [{}, {}]",
        d.label_offset, window.0, window.1
    ));
    emit(&report, resolved.machine);
    Ok(0)
}

fn run_glued(params: &GluedParams, resolved: &Resolved) -> Result<u8, Error> {
    let window = resolved.window.unwrap_or((-4, 4));
    // With a resolution ladder configured, certify a plateau first and test
    // additivity at the accepted resolution; otherwise use n_r as given.
    let outcome = match &resolved.resolutions {
        Some(ladder) => gluing_suite(params, window, ladder, &resolved.policy)?,
        None => gluing_check(params, window, &resolved.policy)?,
    };
    let passed = outcome.passed;
    let mut report = IndexReport::new(resolved.policy);
    if let Some(seed) = resolved.seed {
        report = report.with_seed(seed);
    }
    report.suites.push(outcome);
    emit(&report, resolved.machine);
    Ok(if passed { 0 } else { 2 })
}

fn run_symbol(op: &DiffOpCoefficients, resolved: &Resolved) -> Result<u8, Error> {
    let points = sample_box(op.base_dim());
    let e = ellipticity_check(op, &points, DEFAULT_SPHERE_SAMPLES)?;
    let mut report = IndexReport::new(resolved.policy);
    report.diagnostics.push(format!(
        "ellipticity: {} (min singular value {:.3e} over {} samples, threshold {:.0e})",
        if e.elliptic {
            "elliptic"
        } else {
            "not elliptic"
        },
        e.min_singular_value,
        e.samples_checked,
        e.threshold,
    ));
    if let Some((x, xi)) = &e.witness {
        report
            .diagnostics
            .push(format!("minimizing sample: x = {x:?}, xi = {xi:?}"));
    }
    emit(&report, resolved.machine);
    Ok(0)
}

fn sample_box(dim: usize) -> Vec<Vec<f64>> {
    // deterministic grid of about DEFAULT_BASE_POINTS points in [-pi, pi]^dim
    let per_axis = match dim {
        0 | 1 => DEFAULT_BASE_POINTS,
        2 => 8,
        3 => 4,
        _ => 3,
    };
    let mut pts = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in &pts {
            for k in 0..per_axis {
                let mut q = p.clone();
                q.push(
                    -std::f64::consts::PI
                        + (2.0 * std::f64::consts::PI) * (k as f64 + 0.5) / per_axis as f64,
                );
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

fn cmd_suite(name: &str, format: &str) -> Result<u8, Error> {
    let machine = match format {
        "machine" => true,
        "text" => false,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown format '{other}' (expected text or machine)"
            )))
        }
    };
    let policy = RankPolicy::default();
    if name == "acceptance" {
        let outcomes = acceptance::run_all();
        let all = outcomes.iter().all(|o| o.passed);
        if machine {
            let cases: Vec<CaseOutcome> = outcomes
                .iter()
                .map(|o| {
                    CaseOutcome::new(
                        format!("criterion {}: {}", o.id, o.name),
                        o.passed,
                        o.detail.clone(),
                    )
                })
                .collect();
            let mut report = IndexReport::new(policy);
            report
                .suites
                .push(SuiteOutcome::from_cases("acceptance", cases));
            emit(&report, true);
        } else {
            for o in &outcomes {
                println!(
                    "[{}] criterion {:2}: {} — {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.id,
                    o.name,
                    o.detail
                );
            }
        }
        return Ok(if all { 0 } else { 2 });
    }
    if name == "symbols" {
        let o = acceptance::run_one(12).expect("criterion 12");
        println!(
            "[{}] {} — {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
        return Ok(if o.passed { 0 } else { 2 });
    }
    let outcomes: Vec<SuiteOutcome> = match name {
        "stability" => {
            let models = [
                build_shift_model(20)?,
                build_toeplitz_model(&[(1, ONE)], 64)?,
                build_circle_model(&sin_potential(), 32)?,
            ];
            models
                .iter()
                .map(|m| stability_suite(m, 100, 3, 0.4, 0, &policy))
                .collect::<Result<_, _>>()?
        }
        "homotopy" => {
            let circle = |s: f64| {
                let potential: Vec<_> = sin_potential()
                    .into_iter()
                    .map(|(m, c)| (m, c * s))
                    .collect();
                build_circle_model(&potential, 16)
            };
            let toeplitz = |s: f64| build_toeplitz_model(&[(0, ONE * 2.0), (1, ONE * s)], 48);
            vec![
                homotopy_suite("s sin t potential", &circle, 5, &policy)?,
                homotopy_suite("2 + s z symbol", &toeplitz, 5, &policy)?,
            ]
        }
        "gluing" => {
            let params = GluedParams {
                split_radius: 3.0,
                n_r: 400,
                radius: 8.0,
                rescaling: Rescaling::One,
                warp: Warp::InverseLinear,
            };
            vec![gluing_suite(&params, (-4, 4), &[100, 200, 400], &policy)?]
        }
        "convergence" => {
            let shift = convergence_study(&[8, 20, 64], &|n| {
                Ok(IndexValue::Integer(fredholm_index(
                    &build_shift_model(n)?,
                    &policy,
                )?))
            })?;
            let circle = convergence_study(&[16, 32, 64], &|cutoff| {
                let m = build_circle_model(&sin_potential(), cutoff)?;
                Ok(IndexValue::Integer(
                    eqindex_core::index::numeric_kernel(&m.dense(), &policy).kernel_dim as i64,
                ))
            })?;
            let plane = convergence_study(&[100, 200, 400], &|n_r| {
                let p = PlaneParams::new(n_r, 8.0, Rescaling::One);
                Ok(IndexValue::Windowed(
                    deformed_plane_index(&p, (-2, 2), &policy)?.character,
                ))
            })?;
            let case = |name: &str, s: &eqindex_core::index::ConvergenceStudy| {
                CaseOutcome::new(
                    name,
                    true,
                    format!(
                        "accepted {} at resolution {} (ladder {:?})",
                        s.accepted_value, s.accepted_resolution, s.resolutions
                    ),
                )
            };
            vec![SuiteOutcome::from_cases(
                "convergence",
                vec![
                    case("shift index", &shift),
                    case("circle kernel dimension", &circle),
                    case("plane windowed index", &plane),
                ],
            )]
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown suite '{other}' (expected acceptance, stability, homotopy, gluing, \
                 convergence or symbols)"
            )))
        }
    };
    let all = outcomes.iter().all(|o| o.passed);
    let mut report = IndexReport::new(policy);
    report.suites = outcomes;
    emit(&report, machine);
    Ok(if all { 0 } else { 2 })
}

fn cmd_dump(args: RunArgs) -> Result<u8, Error> {
    let resolved = resolve(&args)?;
    let model = match resolved.model.build()? {
        BuiltModel::Operator(m) => m,
        BuiltModel::PlaneWindow(params) => {
            let w = resolved.window.map(|w| w.0).unwrap_or(0);
            eqindex_core::models::build_plane_weight_model(w, &params)?
        }
        BuiltModel::Glued(_) => {
            return Err(Error::InvalidParameter(
                "dump one glued piece at a time via plane_weight with the piece parameters".into(),
            ))
        }
        BuiltModel::Symbol(_) => {
            return Err(Error::InvalidParameter(
                "custom operators have no finite matrix to dump; use run for symbol checks".into(),
            ))
        }
    };
    let dense = model.dense();
    if resolved.machine {
        #[derive(serde::Serialize)]
        struct Dump<'a> {
            metadata: &'a eqindex_core::models::ModelMetadata,
            domain_labels: Vec<(String, usize)>,
            codomain_labels: Vec<(String, usize)>,
            rows: usize,
            cols: usize,
            entries: Vec<Vec<(f64, f64)>>,
        }
        let dump = Dump {
            metadata: model.metadata(),
            domain_labels: model
                .domain_labels()
                .iter()
                .map(|(l, d)| (l.to_string(), *d))
                .collect(),
            codomain_labels: model
                .codomain_labels()
                .iter()
                .map(|(l, d)| (l.to_string(), *d))
                .collect(),
            rows: dense.nrows(),
            cols: dense.ncols(),
            entries: (0..dense.nrows())
                .map(|i| {
                    (0..dense.ncols())
                        .map(|j| (dense[(i, j)].re, dense[(i, j)].im))
                        .collect()
                })
                .collect(),
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&dump).expect("dump serialization")
        );
    } else {
        println!("model: {}", model.metadata().kind);
        let labels = |labels: &[(eqindex_core::group::IrrepLabel, usize)]| -> String {
            labels
                .iter()
                .map(|(l, d)| format!("{l}:{d}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        println!("domain labels: {}", labels(model.domain_labels()));
        println!("codomain labels: {}", labels(model.codomain_labels()));
        println!("{} x {}", dense.nrows(), dense.ncols());
        for i in 0..dense.nrows() {
            let row: Vec<String> = (0..dense.ncols())
                .map(|j| format!("{:+.4}{:+.4}i", dense[(i, j)].re, dense[(i, j)].im))
                .collect();
            println!("{}", row.join(" "));
        }
    }
    Ok(0)
}
