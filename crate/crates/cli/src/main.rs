//! `tvg-twins`: run, verify and generate (Δ,d)-twin detection instances.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tvg_twins::compare::{batch_compare, compare_with_oracle, BatchSpec};
use tvg_twins::oracle;
use tvg_twins::report::ResultDocument;
use tvg_twins::sketch::{calibrated_k, SketchParams};
use tvg_twins::tvg::{generate_random, parse_tel, to_tel, Plant};
use tvg_twins::{run, Execution, Mode, NodeId, ProblemParams, RunConfig, TemporalGraph, TwinWindow};

const DEFAULT_EPSILON: f64 = 0.2;
const DEFAULT_NU: f64 = 0.1;

/// Distributed (Δ,d)-twin detection in periodic time-varying graphs.
#[derive(Parser, Debug)]
#[command(name = "tvg-twins", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate the distributed protocol and print its result document
    Run {
        /// Temporal edge list (.tel)
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compute the ground-truth windows by brute force
    Oracle {
        /// Temporal edge list (.tel)
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Check the protocol against the oracle on one graph or a random batch
    Compare {
        /// Temporal edge list (.tel)
        #[arg(long, required_unless_present = "gen", conflicts_with = "gen")]
        input: Option<PathBuf>,
        /// Random instance shape `n,p,prob`
        #[arg(long, value_name = "N,P,PROB")]
        gen: Option<String>,
        /// Number of random instances
        #[arg(long, default_value_t = 1, requires = "gen")]
        trials: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Write a random periodic graph as .tel
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Window length Δ
    #[arg(long)]
    delta: usize,
    /// Tolerance d
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Sketch accuracy ε
    #[arg(long)]
    epsilon: Option<f64>,
    /// Sketch failure probability ν
    #[arg(long)]
    nu: Option<f64>,
    /// Sketch capacity (default calibrated from ε and ν)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include message statistics
    #[arg(long)]
    stats: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Sketch,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    /// Per-round edge probability
    #[arg(long)]
    prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Planted twin window `u,v,t0,L,dprime`
    #[arg(long, value_name = "U,V,T0,L,DPRIME")]
    plant: Option<String>,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Confirm the planted window with the oracle
    #[arg(long)]
    verify: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Verify(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Verify(_) => ExitCode::from(3),
        }
    }
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { input, params } => cmd_run(&input, &params),
        Command::Oracle { input, params } => cmd_oracle(&input, &params),
        Command::Compare {
            input,
            gen,
            trials,
            params,
        } => cmd_compare(input.as_deref(), gen.as_deref(), trials, &params),
        Command::Gen(args) => cmd_gen(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Verify(msg) => eprintln!("verification failed: {msg}"),
            }
            e.code()
        }
    }
}

fn load(path: &Path) -> Result<TemporalGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_tel(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config_for(args: &ParamArgs, p: usize) -> Result<RunConfig, CliError> {
    let params = ProblemParams::new(args.delta, args.d, p).map_err(usage)?;
    let mut config = match args.mode {
        ModeArg::Exact => {
            if args.epsilon.is_some() || args.nu.is_some() || args.k.is_some() {
                eprintln!("warning: --epsilon, --nu and --k only apply to --mode sketch; ignored");
            }
            RunConfig::exact(params)
        }
        ModeArg::Sketch => {
            let epsilon = args.epsilon.unwrap_or(DEFAULT_EPSILON);
            let nu = args.nu.unwrap_or(DEFAULT_NU);
            let k = match args.k {
                Some(k) => k,
                None if epsilon > 0.0 && epsilon < 1.0 && nu > 0.0 && nu < 1.0 => calibrated_k(epsilon, nu),
                None => 1,
            };
            RunConfig::sketch(params, SketchParams::new(k, epsilon, nu, args.seed).map_err(usage)?)
        }
    };
    config.seed = args.seed;
    config.collect_stats = args.stats;
    Ok(config)
}

fn cmd_run(input: &Path, args: &ParamArgs) -> CliResult {
    let g = load(input)?;
    let config = config_for(args, g.period())?;
    let result = run(&g, &config).map_err(usage)?;
    emit(args.out.as_deref(), &ResultDocument::from_run(&g, &config, &result).to_json())
}

fn cmd_oracle(input: &Path, args: &ParamArgs) -> CliResult {
    let g = load(input)?;
    let config = config_for(args, g.period())?;
    let windows = oracle::all_windows_with(&g, &config.params, Execution::Parallel);
    emit(args.out.as_deref(), &ResultDocument::from_oracle(&g, &config, &windows).to_json())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str, len: usize) -> Result<Vec<T>, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != len {
        return Err(usage(format!("--{what} expects {len} comma-separated values, got `{text}`")));
    }
    parts
        .iter()
        .map(|s| s.parse().map_err(|_| usage(format!("--{what}: cannot parse `{s}`"))))
        .collect()
}

fn parse_gen(text: &str) -> Result<(usize, usize, f64), CliError> {
    let err = || usage(format!("--gen expects `n,p,prob`, got `{text}`"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [n, p, prob] => Ok((
            n.parse().map_err(|_| err())?,
            p.parse().map_err(|_| err())?,
            prob.parse().map_err(|_| err())?,
        )),
        _ => Err(err()),
    }
}

/// What `compare` prints and optionally writes as JSON.
#[derive(Serialize)]
struct Summary<R: Serialize> {
    mode: Mode,
    trials: usize,
    differences: usize,
    decisions: usize,
    decision_mismatches: usize,
    boundary_decisions: usize,
    mismatch_rate: f64,
    report: R,
}

fn cmd_compare(input: Option<&Path>, gen: Option<&str>, trials: usize, args: &ParamArgs) -> CliResult {
    if let Some(path) = input {
        let g = load(path)?;
        let config = config_for(args, g.period())?;
        let report = compare_with_oracle(&g, &config).map_err(usage)?;
        for (node, diff) in &report.differences {
            for w in &diff.missing {
                println!("node {node}: missing {{peer {}, start {}}}", w.peer, w.start);
            }
            for w in &diff.extra {
                println!("node {node}: extra {{peer {}, start {}}}", w.peer, w.start);
            }
        }
        let summary = Summary {
            mode: config.mode,
            trials: 1,
            differences: report.difference_count(),
            decisions: report.decisions,
            decision_mismatches: report.decision_mismatches,
            boundary_decisions: report.boundary_decisions,
            mismatch_rate: report.mismatch_rate(),
            report,
        };
        return conclude(&summary, &config, args);
    }

    let shape = gen.ok_or_else(|| usage("compare needs --input or --gen"))?;
    let (n, p, edge_prob) = parse_gen(shape)?;
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let config = config_for(args, p)?;
    let spec = BatchSpec { n, p, edge_prob, trials };
    let report = batch_compare(&spec, &config).map_err(usage)?;
    let summary = Summary {
        mode: config.mode,
        trials,
        differences: report.total_differences,
        decisions: report.decisions,
        decision_mismatches: report.decision_mismatches,
        boundary_decisions: report.boundary_decisions,
        mismatch_rate: report.mismatch_rate(),
        report,
    };
    conclude(&summary, &config, args)
}

/// Prints the verdict and maps it to an exit status: exact mode tolerates no
/// window difference, sketch mode tolerates a decision mismatch rate up to ν.
fn conclude<R: Serialize>(summary: &Summary<R>, config: &RunConfig, args: &ParamArgs) -> CliResult {
    if let Some(path) = args.out.as_deref() {
        emit(Some(path), &to_json(summary))?;
    }
    println!("{} differences / {} trials", summary.differences, summary.trials);
    let Some(sp) = config.sketch_params.filter(|_| config.mode == Mode::Sketch) else {
        return if summary.differences == 0 {
            Ok(())
        } else {
            Err(CliError::Verify(format!(
                "{} window differences in exact mode",
                summary.differences
            )))
        };
    };
    println!(
        "mismatch rate {:.6} ({}/{} decisions), {} boundary decisions, nu {}",
        summary.mismatch_rate, summary.decision_mismatches, summary.decisions, summary.boundary_decisions, sp.nu
    );
    if summary.mismatch_rate <= sp.nu {
        Ok(())
    } else {
        Err(CliError::Verify(format!(
            "mismatch rate {:.6} exceeds nu = {}",
            summary.mismatch_rate, sp.nu
        )))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s
}

fn cmd_gen(args: &GenArgs) -> CliResult {
    let plant = args
        .plant
        .as_deref()
        .map(|text| {
            let v: Vec<usize> = parse_list(text, "plant", 5)?;
            let id = |x: usize| {
                u32::try_from(x)
                    .map(NodeId)
                    .map_err(|_| usage(format!("--plant: node id {x} too large")))
            };
            Ok::<_, CliError>(Plant {
                u: id(v[0])?,
                v: id(v[1])?,
                start: v[2],
                len: v[3],
                d_prime: v[4],
            })
        })
        .transpose()?;
    let g = generate_random(args.n, args.p, args.prob, plant, args.seed).map_err(usage)?;
    let text = to_tel(&g);
    if args.verify {
        let reparsed = parse_tel(&text).map_err(|e| CliError::Verify(format!("output does not re-parse: {e}")))?;
        if reparsed != g {
            return Err(CliError::Verify("output does not round-trip".into()));
        }
        if let Some(plant) = plant {
            verify_plant(&g, &plant)?;
            eprintln!(
                "verified: nodes {} and {} are {}-twins for {} rounds from t0 = {}",
                plant.u, plant.v, plant.d_prime, plant.len, plant.start
            );
        }
    }
    emit(args.out.as_deref(), &text)
}

fn verify_plant(g: &TemporalGraph, plant: &Plant) -> CliResult {
    let p = g.period();
    for i in 0..plant.len {
        let t = (plant.start + i) % p;
        let prof = oracle::pair_profile(g, plant.u, plant.v, t).map_err(|e| CliError::Verify(e.to_string()))?;
        if prof.n_p == 0 || prof.value != plant.d_prime {
            return Err(CliError::Verify(format!(
                "at t = {t}: {} common neighbours, difference {} (wanted {})",
                prof.n_p, prof.value, plant.d_prime
            )));
        }
    }
    let params = ProblemParams::new(plant.len, plant.d_prime, p).map_err(|e| CliError::Verify(e.to_string()))?;
    let windows = oracle::all_windows_with(g, &params, Execution::Parallel);
    if !windows[&plant.u].contains(&TwinWindow::new(plant.v, plant.start)) {
        return Err(CliError::Verify(format!(
            "oracle does not report window ({}, {}) for node {}",
            plant.v, plant.start, plant.u
        )));
    }
    Ok(())
}
