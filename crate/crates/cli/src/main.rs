//! permtwins: generate permutations, find twin subsequences, verify claimed
//! twins, and run reproducible experiments.
//!
//! Exit codes: 0 success (for `verify`: the pair is valid), 1 a computed or
//! checked property failed, 2 the input could not be parsed.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use permtwins_core::close_twins;
use permtwins_core::experiment::{self, Algo};
use permtwins_core::format;
use permtwins_core::gen;
use permtwins_core::grid;
use permtwins_core::monotone;
use permtwins_core::oracle::{self, OracleBudget};
use permtwins_core::perm::{verify_twins, Permutation, TwinPair};
use permtwins_core::sample;
use permtwins_core::Error;

const SEED_ENV: &str = "PERMTWINS_SEED";

#[derive(Parser)]
#[command(name = "permtwins", version, about = "Twin subsequences in permutations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a permutation from a named family.
    Gen(GenArgs),
    /// Find twins in a permutation with a chosen algorithm.
    Twins(TwinsArgs),
    /// Check a claimed twin pair; prints the first violated invariant.
    Verify(VerifyArgs),
    /// Exhaustive searches and scaling probes.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Run a configured batch of (algorithm, size, seed) cells.
    Experiment(ExperimentArgs),
    /// Sample a random permutation from a point-process model.
    Sample(SampleArgs),
    /// Spot-check the common-subsequence cube law on random triples.
    LemmaCheck(LemmaCheckArgs),
}

#[derive(Args)]
struct GenArgs {
    /// uniform | identity | reverse | block-adversarial | poisson
    #[arg(long)]
    kind: String,
    /// Length, for every kind except poisson.
    #[arg(long)]
    n: Option<u32>,
    /// Intensity, for the poisson kind.
    #[arg(long)]
    lambda: Option<f64>,
    /// RNG seed; defaults to $PERMTWINS_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Block count for block-adversarial; defaults to ceil(sqrt(n)).
    #[arg(long)]
    blocks: Option<u32>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TwinsArgs {
    /// es | thm1 | thm2 | exact
    #[arg(long)]
    algo: String,
    /// Permutation file; stdin when absent or "-".
    #[arg(long)]
    input: Option<PathBuf>,
    /// Matcher for thm2: greedy | max.
    #[arg(long, default_value = "max")]
    matcher: String,
    /// Emit one JSON line per round to stderr (thm1 only).
    #[arg(long)]
    trace: bool,
    /// Skip the per-round trim, keeping whole common subsequences (thm1).
    #[arg(long)]
    no_trim: bool,
    /// Write the occupied grid cells as CSV to this file (thm2 only).
    #[arg(long)]
    dump_grid: Option<PathBuf>,
    /// Node budget per target length for the exact search.
    #[arg(long)]
    node_limit: Option<u64>,
    /// Output file for the twin pair; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Twin-pair file; stdin when absent or "-".
    input: Option<PathBuf>,
    /// Host permutation file, for pairs whose host line is "@".
    #[arg(long)]
    host: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Provably longest twins in one small permutation.
    Exact(OracleExactArgs),
    /// Minimum longest-twin length over all permutations of [1, n].
    Tn(OracleTnArgs),
    /// Twin-length statistics across sizes, with a fitted growth exponent.
    Probe(OracleProbeArgs),
}

#[derive(Args)]
struct OracleExactArgs {
    /// Permutation file; stdin when absent or "-".
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleTnArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Args)]
struct OracleProbeArgs {
    /// Comma-separated sizes, e.g. 6,8,10,12.
    #[arg(long)]
    ns: String,
    #[arg(long, default_value_t = 50)]
    trials: u32,
    /// es | thm1 | thm2 | exact
    #[arg(long, default_value = "exact")]
    algo: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Only "poisson" is available.
    #[arg(long, default_value = "poisson")]
    model: String,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LemmaCheckArgs {
    /// Ground-set size of each sampled permutation.
    #[arg(long)]
    m: u32,
    #[arg(long)]
    trials: u32,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Error>()
                .is_some_and(|err| matches!(err, Error::Parse(_)))
            {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Twins(args) => cmd_twins(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Oracle(OracleCmd::Exact(args)) => cmd_oracle_exact(args),
        Cmd::Oracle(OracleCmd::Tn(args)) => cmd_oracle_tn(args),
        Cmd::Oracle(OracleCmd::Probe(args)) => cmd_oracle_probe(args),
        Cmd::Experiment(args) => cmd_experiment(args),
        Cmd::Sample(args) => cmd_sample(args),
        Cmd::LemmaCheck(args) => cmd_lemma_check(args),
    }
}

/// Explicit flag, then $PERMTWINS_SEED, then 0.
fn resolve_seed(explicit: Option<u64>) -> anyhow::Result<u64> {
    if let Some(seed) = explicit {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV} is not a u64: '{text}'")).into()),
        Err(_) => Ok(0),
    }
}

fn read_input(path: Option<&PathBuf>) -> anyhow::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(fs::read_to_string(p)?),
        _ => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<ExitCode> {
    let seed = resolve_seed(args.seed)?;
    let need_n = || {
        args.n
            .ok_or_else(|| Error::Parse(format!("--n is required for kind {}", args.kind)))
    };
    let spec = match args.kind.as_str() {
        "uniform" => gen::GeneratorSpec::Uniform { n: need_n()?, seed },
        "identity" => gen::GeneratorSpec::Identity { n: need_n()? },
        "reverse" => gen::GeneratorSpec::Reverse { n: need_n()? },
        "block-adversarial" => {
            let n = need_n()?;
            let blocks = args
                .blocks
                .unwrap_or_else(|| permtwins_core::arith::ceil_sqrt(u64::from(n)).max(1) as u32);
            gen::GeneratorSpec::BlockAdversarial { n, blocks }
        }
        "poisson" => gen::GeneratorSpec::Poisson {
            lambda: args
                .lambda
                .ok_or_else(|| Error::Parse("--lambda is required for kind poisson".into()))?,
            seed,
        },
        other => return Err(Error::Parse(format!("unknown kind '{other}'")).into()),
    };
    let p = gen::generate(&spec)?;
    write_output(args.out.as_ref(), &format::write_permutation(&p))?;
    Ok(ExitCode::SUCCESS)
}

fn trace_line(t: &close_twins::RoundTrace) -> String {
    format!(
        "{{\"round\":{},\"i0_len\":{},\"pair\":[{},{}],\"common_len\":{},\"kept_len\":{},\"deleted_count\":{},\"remainder_len\":{}}}",
        t.round_index,
        t.i0_len,
        t.pair.0,
        t.pair.1,
        t.common_len,
        t.kept_len,
        t.deleted_count,
        t.remainder_len
    )
}

fn dump_grid_csv(g: &grid::GridModel) -> String {
    let mut out = String::from("i,j,count\n");
    for (cell, points) in g.cells() {
        out.push_str(&format!("{},{},{}\n", cell.i, cell.j, points.len()));
    }
    out
}

/// Both guarantees a pair can be judged against: one from the ground bound
/// (the value universe), one from the number of entries actually present.
/// They only differ for sparse hosts.
fn guarantees_for(algo: Algo, p: &Permutation) -> (u64, u64) {
    let by = |size: u64| match algo {
        Algo::Baseline => monotone::baseline_guarantee(size),
        Algo::Windowed | Algo::Exact => close_twins::guaranteed_length(size as u32),
        Algo::Grid => grid::guarantee_threshold(size as u32),
    };
    (by(u64::from(p.ground_bound())), by(p.len() as u64))
}

fn cmd_twins(args: TwinsArgs) -> anyhow::Result<ExitCode> {
    let algo = Algo::parse(&args.algo)?;
    let p = format::parse_permutation(&read_input(args.input.as_ref())?)?;
    let mut notes: Vec<String> = Vec::new();
    let pair: TwinPair = match algo {
        Algo::Baseline => monotone::es_baseline_twins(&p),
        Algo::Windowed => {
            let options = close_twins::Options {
                trim_to_target: !args.no_trim,
            };
            let (windowed, traces) = close_twins::close_twins_traced(&p, options)?;
            if args.trace {
                for t in &traces {
                    eprintln!("{}", trace_line(t));
                }
            }
            notes.push(format!("rounds={}", traces.len()));
            let es = monotone::es_baseline_twins(&p);
            if es.len() > windowed.len() {
                notes.push("selected=baseline".into());
                es
            } else {
                notes.push("selected=windowed".into());
                windowed
            }
        }
        Algo::Grid => {
            let matcher = match args.matcher.as_str() {
                "greedy" => grid::Matcher::Greedy,
                "max" => grid::Matcher::Maximum,
                other => return Err(Error::Parse(format!("unknown matcher '{other}'")).into()),
            };
            let g = grid::build_grid(&p);
            if let Some(path) = &args.dump_grid {
                fs::write(path, dump_grid_csv(&g))?;
            }
            notes.push(format!("r={} edges={}", g.r, g.edge_count()));
            let matching = match matcher {
                grid::Matcher::Greedy => grid::greedy_matching(&g),
                grid::Matcher::Maximum => grid::max_matching(&g),
            };
            notes.push(format!("matched={}", matching.len()));
            grid::matching_to_twins(&g, &matching)?
        }
        Algo::Exact => {
            let budget = OracleBudget {
                node_limit: args.node_limit.unwrap_or(OracleBudget::default().node_limit),
                ..OracleBudget::default()
            };
            let out = oracle::exact_twins(&p, &budget)?;
            notes.push(format!("optimal={} nodes={}", out.optimal, out.nodes));
            out.pair
        }
    };
    let valid = verify_twins(&pair)?.is_none();
    let (guarantee_n, guarantee_m) = guarantees_for(algo, &p);
    eprintln!(
        "algo={} n={} m={} length={} guarantee_n={} guarantee_m={} valid={}{}{}",
        algo.token(),
        p.ground_bound(),
        p.len(),
        pair.len(),
        guarantee_n,
        guarantee_m,
        valid,
        if notes.is_empty() { "" } else { " " },
        notes.join(" ")
    );
    write_output(args.out.as_ref(), &format::write_twin_pair(&pair))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    // Anything that fails before verification starts is a parse problem and
    // exits 2; an invalid pair exits 1.
    let loaded = (|| -> anyhow::Result<TwinPair> {
        let host = match &args.host {
            Some(path) => Some(format::parse_permutation(&fs::read_to_string(path)?)?),
            None => None,
        };
        Ok(format::parse_twin_pair(
            &read_input(args.input.as_ref())?,
            host.as_ref(),
        )?)
    })();
    let pair = match loaded {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("cannot load pair: {e:#}");
            return Ok(ExitCode::from(2));
        }
    };
    match verify_twins(&pair) {
        Ok(None) => {
            println!(
                "valid: lengths {}, closeness {:?}",
                pair.len(),
                pair.closeness_bound
            );
            Ok(ExitCode::SUCCESS)
        }
        Ok(Some(violation)) => {
            println!("invalid: {violation}");
            Ok(ExitCode::from(1))
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_oracle_exact(args: OracleExactArgs) -> anyhow::Result<ExitCode> {
    let p = format::parse_permutation(&read_input(args.input.as_ref())?)?;
    let budget = OracleBudget {
        node_limit: args.node_limit.unwrap_or(OracleBudget::default().node_limit),
        ..OracleBudget::default()
    };
    let out = oracle::exact_twins(&p, &budget)?;
    eprintln!(
        "m={} length={} optimal={} nodes={}",
        p.len(),
        out.pair.len(),
        out.optimal,
        out.nodes
    );
    write_output(args.out.as_ref(), &format::write_twin_pair(&out.pair))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle_tn(args: OracleTnArgs) -> anyhow::Result<ExitCode> {
    let budget = OracleBudget {
        node_limit: args.node_limit.unwrap_or(OracleBudget::default().node_limit),
        ..OracleBudget::default()
    };
    let out = oracle::exact_t_of_n(args.n, &budget)?;
    let witness: Vec<String> = out.witness.values().iter().map(u32::to_string).collect();
    println!(
        "t({}) = {} witness = {} representatives = {}",
        args.n,
        out.value,
        witness.join(" "),
        out.examined
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle_probe(args: OracleProbeArgs) -> anyhow::Result<ExitCode> {
    let algo = Algo::parse(&args.algo)?;
    let ns: Vec<u32> = args
        .ns
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad size '{t}' in --ns")))
        })
        .collect::<Result<_, _>>()?;
    let seed = resolve_seed(args.seed)?;
    let budget = OracleBudget {
        node_limit: args.node_limit.unwrap_or(OracleBudget::default().node_limit),
        ..OracleBudget::default()
    };
    let report = oracle::scaling_probe(&ns, args.trials, seed, |p| match algo {
        Algo::Baseline => Ok(monotone::es_baseline_twins(p).len()),
        Algo::Windowed => Ok(close_twins::guaranteed_twins(p)?.len()),
        Algo::Grid => Ok(grid::grid_twins(p, grid::Matcher::Maximum)?.len()),
        Algo::Exact => Ok(oracle::exact_twins(p, &budget)?.pair.len()),
    })?;
    let mut out = String::from("# permtwins probe format v1\n");
    out.push_str(&format!(
        "# algo={} trials={} master_seed={}\n",
        algo.token(),
        args.trials,
        seed
    ));
    out.push_str("n,trials,mean,min,max\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{:.4},{},{}\n",
            row.n, row.trials, row.mean, row.min, row.max
        ));
    }
    if let Some(fit) = report.exponent {
        out.push_str(&format!(
            "# exponent slope={:.4} stderr={:.4}\n",
            fit.slope, fit.stderr
        ));
    }
    write_output(args.out.as_ref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_experiment(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let config = experiment::parse_config(&fs::read_to_string(&args.config)?)?;
    let master_seed = resolve_seed(config.master_seed)?;
    let report = experiment::run_experiment(&config, master_seed)?;
    write_output(args.out.as_ref(), &experiment::render_csv(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(args: SampleArgs) -> anyhow::Result<ExitCode> {
    if args.model != "poisson" {
        return Err(Error::Parse(format!("unknown model '{}'", args.model)).into());
    }
    let seed = resolve_seed(args.seed)?;
    let p = sample::sample_poisson_permutation(args.lambda, seed)?;
    eprintln!("m={}", p.len());
    write_output(args.out.as_ref(), &format::write_permutation(&p))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_lemma_check(args: LemmaCheckArgs) -> anyhow::Result<ExitCode> {
    let seed = resolve_seed(args.seed)?;
    let report = experiment::cube_law_check(args.m, args.trials, seed)?;
    println!(
        "m={} trials={} violations={} min_len={} cube_law={}",
        report.m,
        report.trials,
        report.violations,
        report.min_len,
        if report.violations == 0 { "holds" } else { "violated" }
    );
    Ok(if report.violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
