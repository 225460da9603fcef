use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tareduce::complement::{equivalent_with, ComplementConfig};
use tareduce::error::Error;
use tareduce::experiment::{
    bench, failed_report, parse_pipeline_list, run_pipeline, Pipeline, PipelineReport, RunConfig,
};
use tareduce::generator::{tabakov_vardi, InitialRule, TvParams};
use tareduce::io::{parse_timbuk_document, serialize_timbuk, write_report_csv, TimbukDocument};
use tareduce::oracle::distinguishing_tree;
use tareduce::reduce::{heavy_with, ReduceConfig};
use tareduce::saturate::{better_than, sat1_with, sat2_with, SatConfig};
use tareduce::simulation::{CacheMode, Schedule, SimConfig};
use tareduce::{RankedAlphabet, TreeAutomaton};

/// Reduce, complement, generate and compare nondeterministic tree automata
/// stored in Timbuk format.
#[derive(Parser)]
#[command(name = "tareduce", version)]
struct Cli {
    /// Upper bound on macro-states explored by complementation
    /// (default: $TAREDUCE_MACRO_BUDGET or 2^20).
    #[arg(long, global = true)]
    macro_budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an automaton and print the result with before/after stats.
    Reduce(ReduceArgs),
    /// Run a complementation pipeline and print its report row.
    Complement(ComplementArgs),
    /// Write a corpus of random Tabakov-Vardi automata.
    Generate(GenerateArgs),
    /// Decide language equivalence; exit status 0 for TRUE, 1 for FALSE.
    Equiv(EquivArgs),
    /// Print state, transition and per-symbol counts.
    Stats { input: PathBuf },
    /// Run pipelines over every `.tim` file of a directory and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Heavy,
    Sat1,
    Sat2,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value = "semiglobal")]
    cache: CacheMode,
    /// Pre-refine the downward game with trees of this depth.
    #[arg(long)]
    prerefine: Option<usize>,
    /// Refine pairs of states in parallel rounds.
    #[arg(long)]
    parallel: bool,
}

impl SimArgs {
    fn config(&self) -> SatConfig {
        SatConfig {
            reduce: ReduceConfig {
                sim: SimConfig {
                    cache: self.cache,
                    prerefine: self.prerefine,
                    schedule: if self.parallel {
                        Schedule::Parallel
                    } else {
                        Schedule::Sequential
                    },
                },
                ..ReduceConfig::default()
            },
            ..SatConfig::default()
        }
    }
}

#[derive(Clone, Copy)]
enum Certify {
    Depth(usize),
    Exact,
}

impl std::str::FromStr for Certify {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exact" {
            return Ok(Certify::Exact);
        }
        s.parse()
            .map(Certify::Depth)
            .map_err(|_| format!("expected a depth or `exact`, found `{s}`"))
    }
}

#[derive(Args)]
struct ReduceArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "heavy")]
    algo: Algo,
    /// Downward lookahead.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    x: u32,
    /// Upward lookahead.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    y: u32,
    #[command(flatten)]
    sim: SimArgs,
    /// Write the reduced automaton here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check the result against the input: `exact`, or a tree depth.
    #[arg(long)]
    certify: Option<Certify>,
}

#[derive(Args)]
struct ComplementArgs {
    input: PathBuf,
    /// Steps joined by `+`, e.g. C, H+C, H+C+H, H+S2+C, H+C+H+S2.
    #[arg(long, default_value = "C")]
    pipeline: Pipeline,
    #[command(flatten)]
    sim: SimArgs,
    /// Write the resulting automaton here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of states.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Number of binary symbols.
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Transitions per binary symbol, relative to `n`.
    #[arg(long, default_value_t = 2.0)]
    td: f64,
    /// Leaf rules per leaf symbol, relative to `n`.
    #[arg(long, default_value_t = 0.5)]
    ad: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// `all`, `one` or `density=<f>`.
    #[arg(long, default_value = "all")]
    initial: InitialRule,
    #[arg(long, default_value_t = 1)]
    leaf_symbols: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EquivArgs {
    a: PathBuf,
    b: PathBuf,
    /// Compare accepted trees up to this depth only.
    #[arg(long, conflicts_with = "exact")]
    depth: Option<usize>,
    /// Decide equivalence exactly (the default).
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Comma separated pipelines.
    #[arg(long, default_value = "C,H+C,H+C+H")]
    pipelines: String,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    sim: SimArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut complement = ComplementConfig::default();
    if let Some(b) = cli.macro_budget {
        complement.macro_budget = b;
    }
    match run(cli.command, complement) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command, complement: ComplementConfig) -> Result<u8, Error> {
    match command {
        Command::Reduce(args) => reduce(args, complement),
        Command::Complement(args) => {
            let doc = load(&args.input)?;
            let cfg = RunConfig {
                sat: args.sim.config(),
                complement: Some(complement),
            };
            let id = corpus_id(&args.input);
            let (report, result) = run_pipeline(&id, &doc.automaton, &args.pipeline, &cfg);
            print!("{}", write_report_csv(&[report]));
            let out = result?;
            if let Some(path) = args.out {
                fs::write(path, serialize_timbuk(&out, &doc.name))?;
            }
            Ok(0)
        }
        Command::Generate(args) => generate(args),
        Command::Equiv(args) => equiv(args, complement),
        Command::Stats { input } => {
            let doc = load(&input)?;
            let st = doc.automaton.stats();
            println!("{st}");
            for (sym, s) in doc.automaton.alphabet().iter() {
                println!("{}:{} {}", s.name, s.rank, st.per_symbol[sym.index()]);
            }
            Ok(0)
        }
        Command::Bench(args) => bench_cmd(args, complement),
    }
}

fn load(path: &Path) -> Result<TimbukDocument, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(parse_timbuk_document(&text)?)
}

fn corpus_id(path: &Path) -> String {
    path.file_stem()
        .unwrap_or(path.as_os_str())
        .to_string_lossy()
        .into_owned()
}

fn reduce(args: ReduceArgs, complement: ComplementConfig) -> Result<u8, Error> {
    let doc = load(&args.input)?;
    let a = &doc.automaton;
    let cfg = args.sim.config();
    let (x, y) = (args.x as usize, args.y as usize);
    let (out, iterations) = match args.algo {
        Algo::Heavy => {
            let o = heavy_with(a, x, y, &cfg.reduce);
            if o.cap_hit {
                log::warn!("iteration cap reached before a fixpoint");
            }
            (o.automaton, o.iterations)
        }
        Algo::Sat1 => {
            let o = sat1_with(a, x, y, &cfg);
            log::info!("saturation loop stopped: {:?}", o.stop);
            (o.automaton, o.iterations)
        }
        Algo::Sat2 => {
            let o = sat2_with(a, x, y, &cfg);
            log::info!("saturation loop stopped: {:?}", o.stop);
            (o.automaton, o.iterations)
        }
    };

    match &args.out {
        Some(path) => fs::write(path, serialize_timbuk(&out, &doc.name))?,
        None => print!("{}", serialize_timbuk(&out, &doc.name)),
    }
    println!("# before: {}", a.stats());
    println!("# after: {}", out.stats());
    println!("# iterations: {iterations}, {:?}", better_than(&out, a));

    if let Some(c) = args.certify {
        let (ok, how) = match c {
            Certify::Depth(d) => (
                distinguishing_tree(a, &out, d).is_none(),
                format!("trees up to depth {d}"),
            ),
            Certify::Exact => (equivalent_with(a, &out, &complement)?, "exact".to_string()),
        };
        if !ok {
            println!("# certify FAIL ({how})");
            return Err(Error::Other(
                "reduced automaton changed the language".into(),
            ));
        }
        println!("# certify PASS ({how})");
    }
    Ok(0)
}

fn generate(args: GenerateArgs) -> Result<u8, Error> {
    if args.n == 0 {
        return Err(Error::Other("--n must be at least 1".into()));
    }
    fs::create_dir_all(&args.out_dir)?;
    let width = args.count.saturating_sub(1).to_string().len().max(3);
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i as u64);
        let p = TvParams {
            n: args.n,
            s: args.s,
            td: args.td,
            ad: args.ad,
            seed,
            initial: args.initial,
            leaf_symbols: args.leaf_symbols,
        };
        let name = format!(
            "tv_n{}_s{}_td{}_ad{}_seed{seed}",
            args.n, args.s, args.td, args.ad
        );
        let path = args.out_dir.join(format!("tv{i:0width$}.tim"));
        fs::write(path, serialize_timbuk(&tabakov_vardi(&p), &name))?;
    }
    Ok(0)
}

/// Both automata over the union of their alphabets.
fn aligned(a: &TreeAutomaton, b: &TreeAutomaton) -> Result<(TreeAutomaton, TreeAutomaton), Error> {
    if a.alphabet() == b.alphabet() {
        return Ok((a.clone(), b.clone()));
    }
    let al: Arc<RankedAlphabet> = Arc::new(a.alphabet().merge(b.alphabet())?);
    Ok((a.over_alphabet(al.clone())?, b.over_alphabet(al)?))
}

fn equiv(args: EquivArgs, complement: ComplementConfig) -> Result<u8, Error> {
    let (a, b) = aligned(&load(&args.a)?.automaton, &load(&args.b)?.automaton)?;
    let same = match args.depth {
        Some(d) => match distinguishing_tree(&a, &b, d) {
            Some(t) => {
                println!("FALSE");
                println!("# distinguished by {}", t.display(a.alphabet()));
                return Ok(1);
            }
            None => true,
        },
        None => equivalent_with(&a, &b, &complement)?,
    };
    println!("{}", if same { "TRUE" } else { "FALSE" });
    Ok(if same { 0 } else { 1 })
}

fn bench_cmd(args: BenchArgs, complement: ComplementConfig) -> Result<u8, Error> {
    let pipelines = parse_pipeline_list(&args.pipelines).map_err(Error::Other)?;
    let mut files: Vec<PathBuf> = fs::read_dir(&args.corpus)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tim"))
        .collect();
    files.sort();

    let mut loaded = Vec::new();
    let mut failed: Vec<(usize, String, String)> = Vec::new();
    for (i, path) in files.iter().enumerate() {
        let id = corpus_id(path);
        match load(path) {
            Ok(doc) => loaded.push((id, doc.automaton)),
            Err(e) => {
                log::warn!("{}: {e}", path.display());
                failed.push((i, id, e.to_string()));
            }
        }
    }

    let cfg = RunConfig {
        sat: args.sim.config(),
        complement: Some(complement),
    };
    let mut ok_rows = bench(&loaded, &pipelines, &cfg, args.jobs).into_iter();
    let mut rows: Vec<PipelineReport> = Vec::with_capacity(files.len() * pipelines.len());
    let mut failed = failed.into_iter().peekable();
    for i in 0..files.len() {
        match failed.peek() {
            Some((j, ..)) if *j == i => {
                let (_, id, e) = failed.next().expect("peeked");
                rows.extend(pipelines.iter().map(|p| failed_report(&id, p, &e)));
            }
            _ => rows.extend(ok_rows.by_ref().take(pipelines.len())),
        }
    }
    fs::write(&args.csv, write_report_csv(&rows))?;
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    eprintln!(
        "{} automata x {} pipelines, {errors} rows with errors",
        files.len(),
        pipelines.len()
    );
    Ok(0)
}
