//! `dso`: build, query, verify and benchmark distance sensitivity oracles.

mod bench;
mod commands;
mod make;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use make::{CliMode, ProviderKind, Recipe};

#[derive(Parser)]
#[command(name = "dso", version, about = "Distance sensitivity oracles for single vertex failures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BuildOpts {
    #[arg(long, value_enum, default_value = "full")]
    mode: CliMode,
    /// First-level path length (default ⌈log₂²n⌉).
    #[arg(long = "L")]
    l: Option<u32>,
    /// Second-level path length (default ⌈(log₂log₂n)²⌉).
    #[arg(long = "Lp")]
    lp: Option<u32>,
    #[arg(long, value_enum, default_value = "bottleneck")]
    provider: ProviderKind,
}

impl BuildOpts {
    fn recipe(self, mode: CliMode) -> Recipe {
        Recipe { mode, l: self.l, lp: self.lp, provider: self.provider }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build an oracle from a DIMACS graph file and save it.
    Build {
        graph: PathBuf,
        #[command(flatten)]
        opts: BuildOpts,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Answer `s t f` triples (1-based) from a file or stdin.
    Query {
        oracle: PathBuf,
        queries: Option<PathBuf>,
        /// Append the replacement path to finite answers.
        #[arg(long)]
        path: bool,
    },
    /// Check every triple against Dijkstra on a generated corpus, or on one graph.
    Verify {
        graph: Option<PathBuf>,
        /// Mode to check; all three when omitted.
        #[arg(long, value_enum)]
        mode: Option<CliMode>,
        #[arg(long = "L")]
        l: Option<u32>,
        #[arg(long = "Lp")]
        lp: Option<u32>,
        #[arg(long, value_enum, default_value = "bottleneck")]
        provider: ProviderKind,
        /// Random graphs per size and density.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', default_value = "20,40,60")]
        sizes: Vec<usize>,
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Scaling table as CSV.
    Bench {
        /// Mode to measure; all three when omitted.
        #[arg(long, value_enum)]
        mode: Option<CliMode>,
        #[arg(long = "L")]
        l: Option<u32>,
        #[arg(long = "Lp")]
        lp: Option<u32>,
        #[arg(long, value_enum, default_value = "bottleneck")]
        provider: ProviderKind,
        #[arg(long, value_enum, default_value = "grid")]
        family: bench::Family,
        /// Graphs per size, averaged.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
        sizes: Vec<usize>,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Entry counts of a saved oracle.
    Stats { oracle: PathBuf },
}

fn threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("DSO_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow::anyhow!("DSO_THREADS must be a positive integer, got {v:?}"))?;
        anyhow::ensure!(n > 0, "DSO_THREADS must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Build { graph, opts, out } => {
            let recipe = opts.recipe(opts.mode);
            recipe.check()?;
            commands::build(&graph, &recipe, &out)?;
        }
        Command::Query { oracle, queries, path } => commands::query(&oracle, queries.as_deref(), path)?,
        Command::Verify { graph, mode, l, lp, provider, seeds, sizes, corrupt } => {
            let modes = mode.map_or(CliMode::ALL.to_vec(), |m| vec![m]);
            let recipes: Vec<Recipe> = modes.into_iter().map(|mode| Recipe { mode, l, lp, provider }).collect();
            for r in &recipes {
                r.check()?;
            }
            let corpus = match graph {
                Some(p) => vec![(p.display().to_string(), commands::read_graph(&p)?)],
                None => verify::corpus(&sizes, seeds),
            };
            if !verify::run(&corpus, &recipes, corrupt)? {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Bench { mode, l, lp, provider, family, seeds, sizes, out } => {
            let modes = mode.map_or(CliMode::ALL.to_vec(), |m| vec![m]);
            let recipes: Vec<Recipe> = modes.into_iter().map(|mode| Recipe { mode, l, lp, provider }).collect();
            for r in &recipes {
                r.check()?;
            }
            bench::run(family, &sizes, seeds, &recipes, out.as_deref())?;
        }
        Command::Stats { oracle } => commands::stats(&oracle)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
