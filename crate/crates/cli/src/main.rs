//! The `netform` binary: flag parsing and dispatch. All real work lives in
//! the library so the acceptance suite can drive it in-process.

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};

use netform_cli::{
    apply_config, cmd_atlas, cmd_classify, cmd_pos, cmd_regions, cmd_run, cmd_sweep, parse_config,
    resolve, CliError, RawSettings, Settings,
};

#[derive(Parser)]
#[command(
    name = "netform",
    version,
    about = "Network-formation laboratory: sweeps, trajectories, stable regions, exhaustive checks, price of stability, classification",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Optional key=value configuration file; explicit flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Node counts, comma separated (a single value for run/atlas/pos).
    #[arg(long)]
    n: Option<String>,
    /// Benefit axis start:end (default 1/20:1).
    #[arg(long, value_name = "A:B")]
    delta_range: Option<String>,
    /// Cost axis start:end (default 1/20:1).
    #[arg(long, value_name = "A:B")]
    cost_range: Option<String>,
    /// Grid step as a decimal or fraction (default 1/20).
    #[arg(long)]
    step: Option<String>,
    /// Initial edge densities, comma separated (default 0,0.35,0.7).
    #[arg(long)]
    densities: Option<String>,
    /// Repetitions per cell (default 100).
    #[arg(long)]
    reps: Option<String>,
    /// Master seed (default 0).
    #[arg(long)]
    seed: Option<String>,
    /// Iteration cap per run (default 1000).
    #[arg(long)]
    max_iters: Option<String>,
    /// Consecutive idle iterations that declare convergence (default 30).
    #[arg(long)]
    idle_terminate: Option<String>,
    /// Perform zero-gain additions instead of passing on them.
    #[arg(long)]
    allow_indifferent_adds: bool,
    /// Worker threads (default: one per available core).
    #[arg(long)]
    workers: Option<String>,
    /// Output directory (default ./out).
    #[arg(long)]
    out: Option<String>,
    /// Single benefit value (run; optional cell dump for atlas).
    #[arg(long)]
    delta: Option<String>,
    /// Single cost value (run; optional cell dump for atlas).
    #[arg(long)]
    cost: Option<String>,
    /// Initial edge density for run (default 0).
    #[arg(long)]
    density: Option<String>,
    /// Use exhaustive enumeration for pos (node counts up to 7).
    #[arg(long)]
    oracle: bool,
}

impl CommonArgs {
    fn into_raw(self) -> (Option<PathBuf>, RawSettings) {
        let raw = RawSettings {
            n: self.n,
            delta: self.delta,
            cost: self.cost,
            density: self.density,
            delta_range: self.delta_range,
            cost_range: self.cost_range,
            step: self.step,
            densities: self.densities,
            reps: self.reps,
            seed: self.seed,
            max_iters: self.max_iters,
            idle_terminate: self.idle_terminate,
            allow_indifferent_adds: if self.allow_indifferent_adds { Some(true) } else { None },
            workers: self.workers,
            oracle: if self.oracle { Some(true) } else { None },
            out: self.out,
        };
        (self.config, raw)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Batch statistics per grid cell, one CSV row each.
    Sweep(CommonArgs),
    /// One seeded trajectory: per-iteration metrics plus the final graph.
    Run(CommonArgs),
    /// Simulated versus analytic stable regions, one file per structure.
    Regions(CommonArgs),
    /// Exhaustive verification report for one small size (n <= 7).
    Atlas(CommonArgs),
    /// Price-of-stability grid.
    Pos(CommonArgs),
    /// Classify an edge-list file (header `n <count>`, one `i j` per edge).
    Classify {
        path: PathBuf,
    },
}

fn settings_from(args: CommonArgs) -> Result<Settings, CliError> {
    let (config, mut raw) = args.into_raw();
    if let Some(path) = config {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        raw = apply_config(raw, &parse_config(&text)?)?;
    }
    resolve(&raw)
}

fn matches_line(c: &netform::Classification) -> String {
    let all: Vec<&str> = c.all_matches.iter().map(|l| l.as_str()).collect();
    format!("matches={}", all.join(","))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => {
            let s = settings_from(args)?;
            let summary = cmd_sweep(&s)?;
            println!("wrote {} rows to {}", summary.rows, summary.csv_path.display());
        }
        Command::Run(args) => {
            let s = settings_from(args)?;
            let o = cmd_run(&s)?;
            println!(
                "converged={} dynamic_equilibrium={} iterations={} acts={}",
                o.converged, o.dynamic_equilibrium, o.iterations_used, o.acts
            );
            println!("class={}", o.classification.primary);
            println!("{}", matches_line(&o.classification));
            println!("wrote trajectory.csv and final_graph.txt to {}", s.out.display());
        }
        Command::Regions(args) => {
            let s = settings_from(args)?;
            let files = cmd_regions(&s)?;
            println!("wrote {} region grids to {}", files.len(), s.out.display());
        }
        Command::Atlas(args) => {
            let s = settings_from(args)?;
            let summary = cmd_atlas(&s)?;
            match summary.cell_dump {
                Some(path) => println!(
                    "claims={} failures={}; wrote claims.csv, summary.txt and {} to {}",
                    summary.claims,
                    summary.failures,
                    path.file_name().unwrap_or_default().to_string_lossy(),
                    s.out.display()
                ),
                None => println!(
                    "claims={} failures={}; wrote claims.csv and summary.txt to {}",
                    summary.claims,
                    summary.failures,
                    s.out.display()
                ),
            }
        }
        Command::Pos(args) => {
            let s = settings_from(args)?;
            let (path, cells) = cmd_pos(&s)?;
            println!("wrote {cells} cells to {}", path.display());
        }
        Command::Classify { path } => {
            let c = cmd_classify(&path)?;
            println!("class={}", c.primary);
            println!("{}", matches_line(&c));
        }
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            process::exit(code);
        }
    };
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}
