use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pdee::experiments::{self, RunOptions};
use pdee::Error;

/// Density evolution experiments for Langevin models driven by fractional
/// and white Gaussian noise.
#[derive(Parser)]
#[command(name = "pdee", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a TOML experiment file.
    Run {
        /// Preset name (see `list`) or path to a TOML file.
        config: String,
        /// Output directory; defaults to the config's, else `out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Monte Carlo path count.
        #[arg(long)]
        paths: Option<usize>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in presets.
    List,
    /// Print the TOML of a preset.
    Describe { preset: String },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidInput(_) | Error::Format(_) => EXIT_CONFIG,
        Error::Io { .. } => 1,
        _ => EXIT_NUMERIC,
    }
}

fn run(config: &str, opts: RunOptions, threads: Option<usize>) -> Result<(), Error> {
    let config = experiments::load(config)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::config("--threads", "must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::config("--threads", e.to_string()))?;
    let outputs = pool.install(|| experiments::run(&config, &opts))?;
    for out in &outputs {
        match out.hurst {
            Some(h) => println!("{} (H = {h}) -> {}", out.name, out.out_dir.display()),
            None => println!("{} -> {}", out.name, out.out_dir.display()),
        }
        for r in &out.records {
            println!(
                "  {:<3} {:>9} steps  mass drift {:.2e}  {:.1?}",
                r.method.label(),
                r.steps,
                r.max_mass_drift,
                r.elapsed
            );
        }
        if let Some(reference) = out.reference {
            println!("  errors against {}:", reference.label());
            println!("  {:<6} {:>8} {:>12} {:>12}", "method", "t", "L2", "Linf");
            for r in &out.reports {
                println!(
                    "  {:<6} {:>8} {:>12.4e} {:>12.4e}",
                    r.method, r.time, r.l2, r.linf
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            paths,
            threads,
        } => run(
            &config,
            RunOptions {
                out_dir: out,
                seed,
                paths,
            },
            threads,
        ),
        Command::List => {
            for p in experiments::list_presets() {
                let aliases = if p.aliases.is_empty() {
                    String::new()
                } else {
                    format!(" (also {})", p.aliases.join(", "))
                };
                println!("{:<22} {}{aliases}", p.name, p.summary());
            }
            Ok(())
        }
        Command::Describe { preset } => experiments::describe(&preset).map(|text| print!("{text}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
