//! Batch experiment runner with reproducible-by-construction output.
//!
//! A run is a grid of cells (algorithm, size, trial). Each cell derives its
//! seed as `mix([master_seed, algo_id, n, trial])`, so the same cell always
//! sees the same input no matter which other cells run or in what order.
//! Rows are computed in parallel, then sorted on (algo, n, seed); with timing
//! off the rendered CSV is byte-identical across runs and worker counts.

use rayon::prelude::*;

use crate::close_twins;
use crate::error::{Error, Result};
use crate::gen;
use crate::grid;
use crate::monotone;
use crate::oracle::{self, OracleBudget};
use crate::perm::{verify_twins, Permutation, TwinPair};

/// Algorithm selector. Tokens are the stable CLI names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algo {
    Baseline,
    Windowed,
    Grid,
    Exact,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::Baseline, Algo::Windowed, Algo::Grid, Algo::Exact];

    pub fn token(self) -> &'static str {
        match self {
            Algo::Baseline => "es",
            Algo::Windowed => "thm1",
            Algo::Grid => "thm2",
            Algo::Exact => "exact",
        }
    }

    /// Stable id folded into cell seeds. Never renumber.
    pub fn id(self) -> u64 {
        match self {
            Algo::Baseline => 1,
            Algo::Windowed => 2,
            Algo::Grid => 3,
            Algo::Exact => 4,
        }
    }

    pub fn parse(token: &str) -> Result<Algo> {
        Algo::ALL
            .into_iter()
            .find(|a| a.token() == token)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm token '{token}'")))
    }
}

/// Input family for every cell of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Uniform,
    Identity,
    Reverse,
    BlockAdversarial,
    Poisson,
}

impl GeneratorKind {
    pub fn token(self) -> &'static str {
        match self {
            GeneratorKind::Uniform => "uniform",
            GeneratorKind::Identity => "identity",
            GeneratorKind::Reverse => "reverse",
            GeneratorKind::BlockAdversarial => "block-adversarial",
            GeneratorKind::Poisson => "poisson",
        }
    }

    pub fn parse(token: &str) -> Result<GeneratorKind> {
        [
            GeneratorKind::Uniform,
            GeneratorKind::Identity,
            GeneratorKind::Reverse,
            GeneratorKind::BlockAdversarial,
            GeneratorKind::Poisson,
        ]
        .into_iter()
        .find(|g| g.token() == token)
        .ok_or_else(|| Error::Parse(format!("unknown generator '{token}'")))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub algos: Vec<Algo>,
    pub ns: Vec<u64>,
    pub seeds: u32,
    pub master_seed: Option<u64>,
    pub generator: GeneratorKind,
    /// Block count for the block-adversarial family; 0 picks ceil(sqrt(n)).
    pub blocks: u32,
    pub matcher: grid::Matcher,
    pub trim: bool,
    pub timing: bool,
    pub node_limit: u64,
}

/// Strict flat `key = value` parser. Blank lines and `#` comment lines are
/// skipped; unknown or repeated keys are errors.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut algos: Option<Vec<Algo>> = None;
    let mut ns: Option<Vec<u64>> = None;
    let mut seeds: Option<u32> = None;
    let mut master_seed: Option<u64> = None;
    let mut generator: Option<GeneratorKind> = None;
    let mut blocks: Option<u32> = None;
    let mut matcher: Option<grid::Matcher> = None;
    let mut trim: Option<bool> = None;
    let mut timing: Option<bool> = None;
    let mut node_limit: Option<u64> = None;

    fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
        v.parse()
            .map_err(|_| Error::Parse(format!("bad value '{v}' for key '{key}'")))
    }
    fn parse_bool(key: &str, v: &str) -> Result<bool> {
        match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(Error::Parse(format!("bad value '{v}' for key '{key}'"))),
        }
    }

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        macro_rules! set {
            ($slot:ident, $parsed:expr) => {{
                if $slot.is_some() {
                    return Err(Error::Parse(format!("duplicate key '{key}'")));
                }
                $slot = Some($parsed);
            }};
        }
        match key {
            "algos" => set!(
                algos,
                value
                    .split(',')
                    .map(|t| Algo::parse(t.trim()))
                    .collect::<Result<Vec<_>>>()?
            ),
            "ns" => set!(
                ns,
                value
                    .split(',')
                    .map(|t| parse_num::<u64>("ns", t.trim()))
                    .collect::<Result<Vec<_>>>()?
            ),
            "seeds" => set!(seeds, parse_num("seeds", value)?),
            "master_seed" => set!(master_seed, parse_num("master_seed", value)?),
            "generator" => set!(generator, GeneratorKind::parse(value)?),
            "blocks" => set!(blocks, parse_num("blocks", value)?),
            "matcher" => set!(
                matcher,
                match value {
                    "greedy" => grid::Matcher::Greedy,
                    "max" => grid::Matcher::Maximum,
                    _ => return Err(Error::Parse(format!("bad value '{value}' for key 'matcher'"))),
                }
            ),
            "trim" => set!(trim, parse_bool("trim", value)?),
            "timing" => set!(timing, parse_bool("timing", value)?),
            "node_limit" => set!(node_limit, parse_num("node_limit", value)?),
            _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
        }
    }

    let algos = algos.ok_or_else(|| Error::Parse("missing key 'algos'".into()))?;
    let ns = ns.ok_or_else(|| Error::Parse("missing key 'ns'".into()))?;
    let seeds = seeds.ok_or_else(|| Error::Parse("missing key 'seeds'".into()))?;
    if algos.is_empty() || ns.is_empty() || seeds == 0 {
        return Err(Error::Parse(
            "algos, ns, and seeds must all be non-empty".into(),
        ));
    }
    Ok(ExperimentConfig {
        algos,
        ns,
        seeds,
        master_seed,
        generator: generator.unwrap_or(GeneratorKind::Uniform),
        blocks: blocks.unwrap_or(0),
        matcher: matcher.unwrap_or(grid::Matcher::Maximum),
        trim: trim.unwrap_or(true),
        timing: timing.unwrap_or(false),
        node_limit: node_limit.unwrap_or(OracleBudget::default().node_limit),
    })
}

/// One cell's outcome. `n` echoes the requested size (the intensity for the
/// poisson family); `m` is the actual host length.
#[derive(Clone, Debug)]
pub struct ExperimentRecord {
    pub algo: Algo,
    pub n: u64,
    pub m: usize,
    pub seed: u64,
    pub twin_length: usize,
    pub guarantee: u64,
    pub valid: bool,
    pub wall_time_ns: Option<u128>,
    pub extra: String,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub records: Vec<ExperimentRecord>,
    pub master_seed: u64,
    pub config: ExperimentConfig,
}

fn generate_input(config: &ExperimentConfig, n: u64, seed: u64) -> Result<Permutation> {
    let size = |n: u64| -> Result<u32> {
        u32::try_from(n).map_err(|_| Error::Parse(format!("size {n} too large")))
    };
    match config.generator {
        GeneratorKind::Uniform => Ok(gen::uniform(size(n)?, seed)),
        GeneratorKind::Identity => Ok(Permutation::identity(size(n)?)),
        GeneratorKind::Reverse => Ok(Permutation::identity(size(n)?).reversed()),
        GeneratorKind::BlockAdversarial => {
            let n = size(n)?;
            let blocks = if config.blocks == 0 {
                crate::arith::ceil_sqrt(u64::from(n)).max(1) as u32
            } else {
                config.blocks
            };
            gen::block_adversarial(n, blocks)
        }
        GeneratorKind::Poisson => crate::sample::sample_poisson_permutation(n as f64, seed),
    }
}

fn run_algo(
    algo: Algo,
    p: &Permutation,
    config: &ExperimentConfig,
) -> Result<(TwinPair, String)> {
    match algo {
        Algo::Baseline => Ok((monotone::es_baseline_twins(p), String::new())),
        Algo::Windowed => {
            let opts = close_twins::Options {
                trim_to_target: config.trim,
            };
            let pair = close_twins::close_twins_with(p, opts)?;
            let es = monotone::es_baseline_twins(p);
            Ok(if es.len() > pair.len() {
                (es, String::new())
            } else {
                (pair, String::new())
            })
        }
        Algo::Grid => Ok((grid::grid_twins(p, config.matcher)?, String::new())),
        Algo::Exact => {
            let budget = OracleBudget {
                node_limit: config.node_limit,
                ..OracleBudget::default()
            };
            let out = oracle::exact_twins(p, &budget)?;
            Ok((out.pair, format!("optimal={}", out.optimal)))
        }
    }
}

fn guarantee_for(algo: Algo, m: usize) -> u64 {
    match algo {
        Algo::Baseline => monotone::baseline_guarantee(m as u64),
        Algo::Windowed => close_twins::guaranteed_length(m as u32),
        Algo::Grid => grid::guarantee_threshold(m as u32),
        // The exact maximum can never fall below the constructive floor.
        Algo::Exact => close_twins::guaranteed_length(m as u32),
    }
}

fn sanitize(s: &str) -> String {
    s.replace(',', ";").replace('\n', " ")
}

/// Runs the full cell grid. Per-cell failures become `valid = false` rows;
/// only configuration-level problems abort the run.
pub fn run_experiment(config: &ExperimentConfig, master_seed: u64) -> Result<ExperimentReport> {
    let mut cells = Vec::new();
    for &algo in &config.algos {
        for &n in &config.ns {
            for trial in 0..config.seeds {
                cells.push((algo, n, trial));
            }
        }
    }
    let mut records: Vec<ExperimentRecord> = cells
        .into_par_iter()
        .map(|(algo, n, trial)| {
            let seed = gen::mix(&[master_seed, algo.id(), n, u64::from(trial)]);
            let started = std::time::Instant::now();
            let outcome = generate_input(config, n, seed)
                .and_then(|p| run_algo(algo, &p, config).map(|r| (p, r)));
            let wall_time_ns = config.timing.then(|| started.elapsed().as_nanos());
            match outcome {
                Ok((p, (pair, extra))) => {
                    let m = p.len();
                    let violation = verify_twins(&pair);
                    let (valid, extra) = match violation {
                        Ok(None) => (true, extra),
                        Ok(Some(v)) => (false, sanitize(&format!("violation={v}"))),
                        Err(e) => (false, sanitize(&format!("error={e}"))),
                    };
                    ExperimentRecord {
                        algo,
                        n,
                        m,
                        seed,
                        twin_length: pair.len(),
                        guarantee: guarantee_for(algo, m),
                        valid,
                        wall_time_ns,
                        extra,
                    }
                }
                Err(e) => ExperimentRecord {
                    algo,
                    n,
                    m: 0,
                    seed,
                    twin_length: 0,
                    guarantee: 0,
                    valid: false,
                    wall_time_ns,
                    extra: sanitize(&format!("error={e}")),
                },
            }
        })
        .collect();
    records.sort_by(|a, b| {
        (a.algo.token(), a.n, a.seed).cmp(&(b.algo.token(), b.n, b.seed))
    });
    Ok(ExperimentReport {
        records,
        master_seed,
        config: config.clone(),
    })
}

/// Nearest-rank quantile of a sorted slice.
fn quantile(sorted: &[usize], p: f64) -> usize {
    let k = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

/// Renders the report as CSV: versioned header comment, one row per cell,
/// then per-(algo, n) summary comment lines. Timing adds a column whose
/// values vary run to run; everything else is byte-stable.
pub fn render_csv(report: &ExperimentReport) -> String {
    let config = &report.config;
    let mut out = String::new();
    out.push_str("# permtwins experiment format v1\n");
    out.push_str(&format!(
        "# master_seed={} generator={} matcher={} trim={} seeds={}\n",
        report.master_seed,
        config.generator.token(),
        match config.matcher {
            grid::Matcher::Greedy => "greedy",
            grid::Matcher::Maximum => "max",
        },
        config.trim,
        config.seeds,
    ));
    out.push_str("algo,n,m,seed,twin_length,guarantee,valid,extra");
    if config.timing {
        out.push_str(",wall_time_ns");
    }
    out.push('\n');
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}",
            r.algo.token(),
            r.n,
            r.m,
            r.seed,
            r.twin_length,
            r.guarantee,
            r.valid,
            r.extra
        ));
        if config.timing {
            out.push_str(&format!(",{}", r.wall_time_ns.unwrap_or(0)));
        }
        out.push('\n');
    }
    for &algo in &config.algos {
        for &n in &config.ns {
            let group: Vec<&ExperimentRecord> = report
                .records
                .iter()
                .filter(|r| r.algo == algo && r.n == n)
                .collect();
            if group.is_empty() {
                continue;
            }
            let mut lens: Vec<usize> = group.iter().map(|r| r.twin_length).collect();
            lens.sort_unstable();
            let valid = group.iter().filter(|r| r.valid).count();
            let met = group
                .iter()
                .filter(|r| r.valid && r.twin_length as u64 >= r.guarantee)
                .count();
            let mean = lens.iter().sum::<usize>() as f64 / lens.len() as f64;
            out.push_str(&format!(
                "# summary algo={} n={} runs={} min={} q25={} median={} q75={} max={} mean={:.3} valid={}/{} guarantee_met={}/{}\n",
                algo.token(),
                n,
                group.len(),
                lens[0],
                quantile(&lens, 0.25),
                quantile(&lens, 0.5),
                quantile(&lens, 0.75),
                lens[lens.len() - 1],
                mean,
                valid,
                group.len(),
                met,
                group.len(),
            ));
        }
    }
    out
}

/// Cube-law spot check: `trials` random triples of permutations of `[1, m]`,
/// each reduced to its best common pair. Counts how often the selected
/// common subsequence fails `len^3 >= m` (the selector errors on that), and
/// tracks the shortest selection seen.
#[derive(Clone, Copy, Debug)]
pub struct CubeLawReport {
    pub m: u32,
    pub trials: u32,
    pub violations: u32,
    pub min_len: usize,
}

pub fn cube_law_check(m: u32, trials: u32, master_seed: u64) -> Result<CubeLawReport> {
    if m == 0 {
        return Err(Error::Parse("m must be at least 1".into()));
    }
    let outcomes: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = |j: u64| gen::mix(&[master_seed, u64::from(m), u64::from(trial), j]);
            let a = gen::uniform(m, seed(0));
            let b = gen::uniform(m, seed(1));
            let c = gen::uniform(m, seed(2));
            match monotone::best_common_pair([&a, &b, &c]) {
                Ok(sel) => Ok(Some(sel.symbols.len())),
                Err(Error::CubeRootBoundViolated { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let violations = outcomes.iter().filter(|o| o.is_none()).count() as u32;
    let min_len = outcomes
        .iter()
        .filter_map(|o| *o)
        .min()
        .unwrap_or(0);
    Ok(CubeLawReport {
        m,
        trials,
        violations,
        min_len,
    })
}
