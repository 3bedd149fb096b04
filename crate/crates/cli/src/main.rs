//! `powrep`: batch runs over signed power-sum representations.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::json;

use config::{parse_range, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "powrep",
    version,
    about = "Minimal-length power-sum representations, thresholds and residue certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Bases, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "2,3"
    )]
    pub bases: Vec<u64>,
    /// Coefficients, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-1,1"
    )]
    pub coeffs: Vec<i64>,
    /// Bases {2,3} with coefficients {-1,1}.
    #[arg(long, conflicts_with_all = ["bases", "coeffs"])]
    pub nathanson: bool,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for the randomized factorization; results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal representation of n with terms capped at beta |n|.
    Repr {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        /// Cap factor; defaults to the square of the largest base.
        #[arg(long)]
        beta: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Threshold f(k): the least n needing at least k terms.
    F {
        #[command(flatten)]
        instance: InstanceArgs,
        /// A single k or an inclusive range such as 1..5.
        #[arg(long, value_parser = parse_range)]
        k: (u64, u64),
        #[arg(long)]
        beta: Option<u64>,
        /// Scan limit for n.
        #[arg(long, default_value_t = 1 << 20)]
        nmax: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Carmichael function of m, or of each m in an inclusive range.
    Lambda {
        #[arg(long, value_parser = parse_range)]
        m: (u64, u64),
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Moduli m = prod p over primes with p - 1 | y, ranked by lambda(m).
    SearchM {
        #[arg(long, allow_negative_numbers = true)]
        window_lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        window_hi: f64,
        /// y ranges over squarefree divisors of the primorial up to this prime.
        #[arg(long, default_value_t = 13)]
        primorial_bound: u64,
        /// Also try y = product of primes up to L, for each L.
        #[arg(long, value_delimiter = ',')]
        lcm: Vec<u64>,
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Find a residue class mod m missed by every sum of at most k terms.
    Cert {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        k: usize,
        /// JSON-lines record store from search-m; defaults to a built-in pool.
        #[arg(long)]
        pool: Option<PathBuf>,
        /// Largest modulus tried.
        #[arg(long, default_value_t = 1 << 20)]
        pool_limit: u64,
        /// Write the certificate file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Recheck a certificate file and search its class exhaustively up to nmax.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        nmax: u64,
        #[arg(long, default_value_t = 16)]
        beta: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// What a command produced: text for stdout and whether it succeeded.
pub struct Output {
    pub text: String,
    pub ok: bool,
}

fn usage_error(msg: &str) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::ArgumentConflict, msg)
        .exit()
}

fn run(cli: Cli) -> powrep::Result<Output> {
    match cli.command {
        Command::Repr {
            instance,
            n,
            beta,
            common,
        } => {
            if common.format == Format::Csv {
                usage_error("--format csv is only available for f and lambda");
            }
            let cfg = RunConfig::new("repr", &common)
                .with_instance(&instance)?
                .n(n)
                .beta(beta);
            commands::repr(&cfg, n, beta)
        }
        Command::F {
            instance,
            k,
            beta,
            nmax,
            common,
        } => {
            let cfg = RunConfig::new("f", &common)
                .with_instance(&instance)?
                .k(k)
                .beta(beta)
                .nmax(nmax);
            commands::threshold(&cfg, k, beta, nmax)
        }
        Command::Lambda { m, common } => {
            let cfg = RunConfig::new("lambda", &common).m(m);
            commands::lambda(&cfg, m, common.seed)
        }
        Command::SearchM {
            window_lo,
            window_hi,
            primorial_bound,
            lcm,
            limit,
            common,
        } => {
            if common.format == Format::Csv {
                usage_error("--format csv is only available for f and lambda");
            }
            let cfg = RunConfig::new("search-m", &common).window(window_lo, window_hi);
            commands::search_m(&cfg, window_lo, window_hi, primorial_bound, lcm, limit)
        }
        Command::Cert {
            instance,
            k,
            pool,
            pool_limit,
            out,
            common,
        } => {
            if common.format == Format::Csv {
                usage_error("--format csv is only available for f and lambda");
            }
            let cfg = RunConfig::new("cert", &common)
                .with_instance(&instance)?
                .k((k as u64, k as u64))
                .pool(pool.as_deref());
            commands::cert(&cfg, k, pool.as_deref(), pool_limit, out.as_deref())
        }
        Command::Verify {
            cert,
            nmax,
            beta,
            common,
        } => {
            if common.format == Format::Csv {
                usage_error("--format csv is only available for f and lambda");
            }
            let cfg = RunConfig::new("verify", &common)
                .nmax(nmax)
                .beta(Some(beta));
            commands::verify(&cfg, &cert, nmax, beta)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.text.as_bytes());
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let obj = json!({ "error": e.to_string(), "kind": e.kind() });
            let _ = writeln!(stdout, "{obj}");
            ExitCode::from(1)
        }
    }
}
