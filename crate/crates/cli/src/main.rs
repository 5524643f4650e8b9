use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use circulant_canon::canon::{canonizer, CanonOptions, CanonResult, CANONIZER_NAMES};
use circulant_canon::experiment::{run_experiment, ExperimentSpec};
use circulant_canon::graph::{cayley, ConnectionSet, Digraph};
use circulant_canon::oracle::OracleConfig;
use circulant_canon::refinement::{engine, round_colorings};
use circulant_canon::sampling::{sampler, trial_rng};
use circulant_canon::spectral::{
    has_saturated_spectrum, numeric_eigenvalues, saturation_bound, spectrum,
};
use circulant_canon::walk::{is_walk_saturated, walk_matrix, walk_rank};
use circulant_canon::wl2::{canonical_cayley_representation, is_firm_digraph, wl2_rounds};

const EXIT_GIVE_UP: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

/// Canonization and spectral tools for circulant (di)graphs.
#[derive(Debug, Parser)]
#[command(name = "circanon", version)]
struct Cli {
    /// Base seed for sampling and tie-breaking.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest order handed to the brute-force automorphism oracle.
    #[arg(long, global = true, default_value_t = 12)]
    oracle_bound: usize,
    /// Color refinement engine: `rounds` or `cells`.
    #[arg(long, global = true, default_value = "rounds")]
    engine: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample circulants from one of the random models.
    Gen(GenArgs),
    /// Exact spectrum verdicts, optionally with numeric eigenvalues.
    Spectrum {
        input: String,
        /// Append the floating-point eigenvalues as CSV.
        #[arg(long)]
        numeric: bool,
    },
    /// Walk matrix rank and row verdicts.
    Walk {
        input: String,
        /// Terminal vertices (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "0")]
        terminal: Vec<usize>,
    },
    /// Color refinement rounds.
    Cr {
        input: String,
        /// Vertices to individualize, in order.
        #[arg(long, value_delimiter = ',')]
        individualize: Vec<usize>,
    },
    /// Canonical labeling.
    Canon {
        input: String,
        #[arg(long, default_value = "digraph")]
        mode: String,
    },
    /// 2-WL class counts per round.
    Wl2 { input: String },
    /// Canonical Cayley representation.
    #[command(name = "wl2-rep")]
    Wl2Rep { input: String },
    /// Monte Carlo experiments, written as CSV.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value = "cayley")]
    model: String,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    direction: Direction,
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// `set` lines or `graph` text blocks. The labeled model defaults to graphs.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct Direction {
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    undirected: bool,
}

impl Direction {
    fn is_directed(&self) -> bool {
        !self.undirected
    }
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// simple-spectrum, saturated, 3p-collision or canon-pipeline.
    #[arg(long)]
    name: String,
    /// Orders, e.g. `16,32,64` or `8..12`.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    ns: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value = "cayley")]
    model: String,
    #[command(flatten)]
    direction: Direction,
    #[arg(long, default_value_t = 3.0)]
    bound_constant: f64,
    #[arg(long, default_value_t = 0.1)]
    tolerance: f64,
    #[arg(long, default_value_t = 32)]
    walk_check_every: u64,
    #[arg(long, default_value_t = 1)]
    relabelings: usize,
    /// Record wall-clock times (output is then not reproducible).
    #[arg(long)]
    timings: bool,
}

/// What a subcommand produced, beyond its text.
enum Outcome {
    Ok,
    GiveUp,
    AssertionFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut text = String::new();
    let outcome = match run(&cli, &mut text) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if let Err(e) = emit(cli.out.as_ref(), &text) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_INVALID);
    }
    match outcome {
        Outcome::Ok => ExitCode::SUCCESS,
        Outcome::GiveUp => ExitCode::from(EXIT_GIVE_UP),
        Outcome::AssertionFailed => ExitCode::from(EXIT_ASSERTION),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn run(cli: &Cli, out: &mut String) -> anyhow::Result<Outcome> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let engine = engine(&cli.engine).ok_or_else(|| anyhow!("unknown engine {:?}", cli.engine))?;
    match &cli.command {
        Command::Gen(args) => gen(cli, args, out),
        Command::Spectrum { input, numeric } => {
            let set = load_set(input)?;
            let spec = spectrum(&set);
            line(out, "set", &set);
            line(out, "distinct_count", spec.distinct_count);
            line(out, "simple", spec.distinct_count == set.n());
            if set.is_inverse_closed() {
                line(out, "saturated", has_saturated_spectrum(&set)?);
                line(out, "saturation_bound", saturation_bound(set.n()));
            } else {
                line(out, "saturated", "n/a");
            }
            if *numeric {
                out.push_str("a,re,im\n");
                for (a, z) in numeric_eigenvalues(&set).iter().enumerate() {
                    out.push_str(&format!("{a},{:.12},{:.12}\n", clean(z.re), clean(z.im)));
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Walk { input, terminal } => {
            let (g, set) = load(input)?;
            let w = walk_matrix(&g, terminal)?;
            let distinct = w.distinct_row_count();
            line(out, "n", g.n());
            line(out, "rank", walk_rank(&w));
            line(out, "distinct_rows", distinct);
            line(out, "walk_discrete", distinct == g.n());
            match set.filter(|s| s.is_inverse_closed()) {
                Some(s) => line(out, "walk_saturated", is_walk_saturated(&s)?),
                None => line(out, "walk_saturated", "n/a"),
            }
            Ok(Outcome::Ok)
        }
        Command::Cr {
            input,
            individualize,
        } => {
            let (g, _) = load(input)?;
            let rounds = round_colorings(&g, individualize)?;
            for c in &rounds {
                out.push_str(&format!(
                    "round {}: {} classes\n",
                    c.round(),
                    c.class_count()
                ));
            }
            let last = rounds.last().expect("at least one round");
            line(out, "discrete", last.is_discrete());
            line(out, "partition", last);
            Ok(Outcome::Ok)
        }
        Command::Canon { input, mode } => {
            let (g, _) = load(input)?;
            let c = canonizer(
                mode,
                CanonOptions {
                    seed: cli.seed,
                    engine,
                },
            )
            .ok_or_else(|| {
                anyhow!(
                    "unknown mode {mode:?} (expected one of {})",
                    CANONIZER_NAMES.join(", ")
                )
            })?;
            let result = c.canonize(&g)?;
            Ok(report_canon(out, &result, false))
        }
        Command::Wl2 { input } => {
            let (g, _) = load(input)?;
            let rounds = wl2_rounds(&g);
            for pc in &rounds {
                out.push_str(&format!(
                    "round {}: {} classes\n",
                    pc.round(),
                    pc.class_count()
                ));
            }
            let last = rounds.last().expect("at least one round");
            line(out, "stable_classes", last.class_count());
            Ok(Outcome::Ok)
        }
        Command::Wl2Rep { input } => {
            let (g, _) = load(input)?;
            if g.n() <= cli.oracle_bound {
                let cfg = OracleConfig::with_bound(cli.oracle_bound);
                line(out, "firm", is_firm_digraph(&g, &cfg)?);
            }
            let result = canonical_cayley_representation(&g);
            Ok(report_canon(out, &result, true))
        }
        Command::Experiment(args) => experiment(cli, args, out),
    }
}

fn gen(cli: &Cli, args: &GenArgs, out: &mut String) -> anyhow::Result<Outcome> {
    let model = sampler(&args.model).ok_or_else(|| anyhow!("unknown model {:?}", args.model))?;
    let format = args.format.clone().unwrap_or_else(|| {
        if args.model == "labeled" {
            "graph"
        } else {
            "set"
        }
        .into()
    });
    if format != "set" && format != "graph" {
        bail!("unknown format {format:?}");
    }
    let directed = args.direction.is_directed();
    out.push_str(&format!(
        "# model: {} n: {} {}\n",
        model.name(),
        args.n,
        if directed { "directed" } else { "undirected" }
    ));
    for i in 0..args.count {
        let mut rng = trial_rng(cli.seed, args.n, i);
        let draw = model.sample(args.n, directed, &mut rng)?;
        if format == "set" {
            out.push_str(&format!("{}\n", draw.set));
        } else {
            out.push_str(&draw.graph.to_text());
        }
    }
    Ok(Outcome::Ok)
}

fn experiment(cli: &Cli, args: &ExperimentArgs, out: &mut String) -> anyhow::Result<Outcome> {
    let mut ns = Vec::new();
    for tok in &args.ns {
        match tok.split_once("..") {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
                ns.extend(a..=b);
            }
            None => ns.push(
                tok.trim()
                    .parse()
                    .with_context(|| format!("bad order {tok:?}"))?,
            ),
        }
    }
    let mut spec = ExperimentSpec::new(&args.name, ns, args.trials);
    spec.model = args.model.clone();
    spec.directed = args.direction.is_directed();
    spec.seed = cli.seed;
    spec.bound_constant = args.bound_constant;
    spec.tolerance = args.tolerance;
    spec.walk_check_every = args.walk_check_every;
    spec.relabelings = args.relabelings;
    spec.oracle_bound = cli.oracle_bound;
    spec.timings = args.timings;
    let report = run_experiment(&spec)?;
    out.push_str(&report.to_csv_string()?);
    Ok(if report.passed {
        Outcome::Ok
    } else {
        Outcome::AssertionFailed
    })
}

fn report_canon(out: &mut String, result: &CanonResult, with_set: bool) -> Outcome {
    match result {
        CanonResult::Success { labeling, form } => {
            line(out, "outcome", "success");
            line(out, "labeling", labeling);
            if with_set {
                match form.circulant_connection_set() {
                    Some(s) => line(out, "set", s),
                    None => line(out, "set", "n/a"),
                }
            }
            let bytes = form.row_major_bytes();
            line(out, "digest", hex::encode(&bytes));
            line(out, "sha256", hex::encode(Sha256::digest(&bytes)));
            Outcome::Ok
        }
        CanonResult::GiveUp(reason) => {
            line(out, "outcome", format!("give-up ({})", reason.code()));
            Outcome::GiveUp
        }
    }
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(&format!("{key}: {value}\n"));
}

/// Avoids printing `-0.000000000000`.
fn clean(x: f64) -> f64 {
    if x.abs() < 5e-13 {
        0.0
    } else {
        x
    }
}

fn read_input(input: &str) -> anyhow::Result<String> {
    if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(input).with_context(|| format!("reading {input}"))
    }
}

/// An input is a connection set literal (`"7: 1,2,4"`), a file holding one,
/// a graph text file, or `-` for stdin.
fn load(input: &str) -> anyhow::Result<(Digraph, Option<ConnectionSet>)> {
    if input.contains(':') && !std::path::Path::new(input).exists() {
        let set: ConnectionSet = input.parse()?;
        return Ok((cayley(&set), Some(set)));
    }
    let text = read_input(input)?;
    let body = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| anyhow!("empty input"))?;
    if body.starts_with("n ") {
        let g = Digraph::from_text(&text)?;
        let set = g.circulant_connection_set();
        Ok((g, set))
    } else {
        let set: ConnectionSet = body.parse()?;
        Ok((cayley(&set), Some(set)))
    }
}

fn load_set(input: &str) -> anyhow::Result<ConnectionSet> {
    load(input)?
        .1
        .ok_or_else(|| anyhow!("input is not a literal circulant (rows are not shifts of row 0)"))
}
