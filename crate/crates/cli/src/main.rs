use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dagger_core::mahler::{mahler_to_taylor, taylor_to_mahler, MahlerFamily};
use dagger_core::series::TermRecord;
use dagger_core::verify::{parse_range, parse_sigmas, parse_suites, run, GroupSource, SuiteConfig};
use dagger_core::{Format, Series};

#[derive(Parser)]
#[command(name = "dagger")]
#[command(about = "Exact checks for formal group laws, Gauss norms and distribution algebras")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a report; exits 1 if any check fails
    Verify(VerifyArgs),
    /// Print a group's validated config and summary as JSON
    DescribeGroup {
        /// Builtin tag (heisenberg:3, abelian:3:2) or path to a group config
        #[arg(long, default_value = "heisenberg:3")]
        group: String,
    },
    /// Convert a polynomial between the monomial and binomial (Mahler) bases
    Convert {
        #[arg(long, value_enum)]
        to: Basis,
        /// Number of variables
        #[arg(long)]
        dim: usize,
        /// JSON list of {"index": [...], "coeff": "a/b"}; "-" reads stdin
        #[arg(long, default_value = "-")]
        input: String,
    },
}

#[derive(Parser)]
struct VerifyArgs {
    /// Builtin tag (heisenberg:3, abelian:3:2) or path to a group config
    #[arg(long, default_value = "heisenberg:3")]
    group: String,
    /// Comma-separated suites, or "all"
    #[arg(long, default_value = "all")]
    suites: String,
    /// Neighborhood index range a..b
    #[arg(long = "N", default_value = "1..8")]
    n: String,
    /// Comma-separated exponents σ with s = p^-σ
    #[arg(long, default_value = "1/4,1/2,3/4,1")]
    sigma: String,
    /// Truncation degree
    #[arg(long, default_value_t = 8)]
    cap: u32,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Sampled coordinates are taken mod p^precision
    #[arg(long, default_value_t = 12)]
    precision: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    Mahler,
    Taylor,
}

fn group_source(arg: &str) -> Result<GroupSource, String> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
        Ok(GroupSource::Config {
            label: arg.to_string(),
            text,
        })
    } else {
        Ok(GroupSource::Builtin(arg.to_string()))
    }
}

fn verify(args: VerifyArgs) -> Result<bool, String> {
    let config = SuiteConfig {
        group: group_source(&args.group)?,
        suites: parse_suites(&args.suites).map_err(|e| format!("--suites: {e}"))?,
        n_range: parse_range(&args.n).map_err(|e| format!("--N: {e}"))?,
        sigmas: parse_sigmas(&args.sigma).map_err(|e| format!("--sigma: {e}"))?,
        cap: args.cap,
        trials: args.trials,
        seed: args.seed,
        precision: args.precision,
    };
    let report = run(&config).map_err(|e| e.to_string())?;
    let format = match args.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Text => Format::Text,
    };
    let bytes = report.emit(format);
    match &args.out {
        Some(path) => fs::write(path, &bytes).map_err(|e| format!("{}: {e}", path.display()))?,
        None => io::stdout().write_all(&bytes).map_err(|e| e.to_string())?,
    }
    Ok(!report.has_failures())
}

fn describe(group: &str) -> Result<(), String> {
    let g = group_source(group)?.load().map_err(|e| e.to_string())?;
    let out = serde_json::json!({
        "summary": g.describe(),
        "config": g.to_config(),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json value"));
    Ok(())
}

fn convert(to: Basis, dim: usize, input: &str) -> Result<(), String> {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
        s
    } else {
        fs::read_to_string(input).map_err(|e| format!("{input}: {e}"))?
    };
    let records: Vec<TermRecord> = serde_json::from_str(&text).map_err(|e| format!("{input}: {e}"))?;
    let poly = Series::from_records(dim, &records).map_err(|e| e.to_string())?;
    let out = match to {
        Basis::Mahler => taylor_to_mahler(&poly).map_err(|e| e.to_string())?.to_records(),
        Basis::Taylor => {
            let cap = poly.degree().unwrap_or(0);
            let family = MahlerFamily::from_coeffs(dim, cap, poly.terms().map(|(a, c)| (a.clone(), c.clone())))
                .map_err(|e| e.to_string())?;
            mahler_to_taylor(&family).map_err(|e| e.to_string())?.to_records()
        }
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("records serialize"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => verify(args).map(|clean| if clean { ExitCode::SUCCESS } else { ExitCode::from(1) }),
        Command::DescribeGroup { group } => describe(&group).map(|()| ExitCode::SUCCESS),
        Command::Convert { to, dim, input } => convert(to, dim, &input).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}
