use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use bianchi::VerifyOptions;
use bianchi_cli::commands::parse_primes;
use bianchi_cli::config::default_threads;
use bianchi_cli::{cmd_cf, cmd_dim, cmd_eigsys, cmd_hecke, cmd_p1, cmd_verify, exit_code, Format, Outcome, RunConfig};
use clap::{Args, Parser, Subcommand};

/// Mod-l cohomology of Bianchi groups over Z[i] via modular symbols.
#[derive(Parser)]
#[command(name = "bianchi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for Hecke columns (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for cached Hecke matrices.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SpaceArgs {
    /// Level generator, e.g. 8+17i.
    #[arg(long)]
    level: String,
    #[arg(long)]
    ell: u64,
    /// Weight as "a=(a0,a1) b=(b0,b1)", optionally prefixed by "l=...".
    #[arg(long)]
    weight: Option<String>,
    /// trivial, quadratic, or quadratic:<prime dividing the level>.
    #[arg(long = "char", default_value = "trivial")]
    character: String,
    /// Norm bound for the default prime list.
    #[arg(long, default_value_t = 149)]
    bound: u64,
    /// Search eigenvalues in the degree-k extension of the coefficient field.
    #[arg(long, default_value_t = 1)]
    eig_ext: u32,
}

#[derive(Subcommand)]
enum Command {
    /// List P^1(O/n).
    P1 {
        #[arg(long)]
        level: String,
    },
    /// Continued fraction expansion of alpha/beta.
    Cf { alpha: String, beta: String },
    /// Dimensions of the symbol space and its quotient.
    Dim(SpaceArgs),
    /// Hecke matrices at the given primes (default: all admissible up to --bound).
    Hecke {
        #[command(flatten)]
        space: SpaceArgs,
        primes: Vec<String>,
        /// Check commutativity and independence of the prime generator.
        #[arg(long)]
        selfcheck: bool,
    },
    /// Simultaneous eigensystems of the Hecke operators.
    Eigsys {
        #[command(flatten)]
        space: SpaceArgs,
        primes: Vec<String>,
    },
    /// Compare eigensystems against a representation fixture.
    Verify {
        /// Builtin fixture name (a4-61, d3-8+17i, d3-13+28i, d3-8+35i) or a file.
        fixture: String,
        ell: u64,
        #[arg(default_value_t = 149)]
        bound: u64,
        #[arg(long, default_value_t = 1)]
        eig_ext: u32,
    },
}

fn config(cli: &Cli, s: &SpaceArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(&s.level, s.ell, s.weight.as_deref(), &s.character)?;
    cfg.bound = s.bound;
    cfg.eig_ext = s.eig_ext;
    cfg.cache_dir = cli.cache_dir.clone();
    cfg.threads = cli.threads.unwrap_or_else(default_threads);
    cfg.format = cli.format;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::P1 { level } => cmd_p1(level),
        Command::Cf { alpha, beta } => cmd_cf(alpha, beta),
        Command::Dim(s) => cmd_dim(&config(cli, s)?),
        Command::Hecke { space, primes, selfcheck } => {
            cmd_hecke(&config(cli, space)?, &parse_primes(primes)?, *selfcheck)
        }
        Command::Eigsys { space, primes } => cmd_eigsys(&config(cli, space)?, &parse_primes(primes)?),
        Command::Verify { fixture, ell, bound, eig_ext } => {
            let opts = VerifyOptions {
                bound: *bound,
                threads: cli.threads.unwrap_or_else(default_threads),
                eig_ext: *eig_ext,
            };
            cmd_verify(fixture, *ell, &opts, cli.cache_dir.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.report.render(cli.format));
            ExitCode::from(out.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
