use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use ifns_cli::{parse_horizon, parse_spec, run, summary_table, Format, Overrides};
use ifns_core::ifn::{check_axioms, perturbed};
use ifns_core::sequences::sequence_from_text;
use ifns_core::{standard_pair, NormChoice};

/// Intuitionistic fuzzy norms, weighted means of double sequences and
/// finite-horizon Tauberian checks.
#[derive(Debug, Parser)]
#[command(name = "ifns", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the tasks of an analysis spec.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// `M` or `M,N`; the tail starts at min(M, N)/2.
        #[arg(long)]
        horizon: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check the membership/nonmembership axioms on random samples.
    CheckAxioms {
        /// `standard`, or a deliberately broken pair: `constant-mu`,
        /// `scaled-nu`, `quasi-norm`.
        #[arg(long, default_value = "standard")]
        pair: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// `absolute`, `euclidean` or `supremum` (default: absolute in 1D).
        #[arg(long)]
        norm: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the full JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a sequence expression at one index.
    Eval {
        #[arg(long)]
        expr: String,
        /// `m,n`
        #[arg(long)]
        at: String,
    },
}

fn check_axioms_cmd(pair: &str, dim: usize, norm: Option<&str>, samples: usize, seed: u64, json: bool) -> Result<bool> {
    let norm = match norm {
        Some(n) => n.parse::<NormChoice>()?,
        None if dim == 1 => NormChoice::Absolute,
        None => NormChoice::Euclidean,
    };
    let pair = match pair {
        "standard" => standard_pair(norm, dim)?,
        "constant-mu" => perturbed::constant_membership(dim),
        "scaled-nu" => perturbed::scaled_nonmembership(norm, dim, 2.0),
        "quasi-norm" => perturbed::quasi_norm_pair(dim),
        other => bail!("unknown pair `{other}`; expected standard, constant-mu, scaled-nu or quasi-norm"),
    };
    let report = check_axioms(&pair, samples, seed);
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("pair {} in dimension {dim}, {samples} samples, seed {seed}", report.pair);
        for c in report.axioms.iter().chain(&report.derived) {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            println!("  {:<4} {verdict:<4} {:>7} checked  {}", c.axiom.label(), c.checked, c.statement);
            if let Some(w) = &c.witness {
                println!("         witness: {}", serde_json::to_string(w)?);
            }
        }
    }
    Ok(report.all_pass())
}

fn eval_cmd(expr: &str, at: &str) -> Result<()> {
    let seq = sequence_from_text(expr)?;
    let parse = |s: &str| s.trim().parse::<usize>().with_context(|| format!("invalid index `{s}` in --at {at}"));
    let (m, n) = match at.split_once(',') {
        Some((m, n)) => (parse(m)?, parse(n)?),
        None => bail!("--at takes m,n"),
    };
    let x = seq.eval(m, n)?;
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    if parts.len() == 1 {
        println!("{}", parts[0]);
    } else {
        println!("({})", parts.join(", "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::Run { config, out, horizon, seed, format } => (|| {
            let horizon = horizon.as_deref().map(parse_horizon).transpose()?;
            let spec = parse_spec(&config, &Overrides { horizon, seed, format, out })?;
            let (report, _) = run(&spec)?;
            print!("{}", summary_table(&report));
            Ok(report.summary.consistent)
        })(),
        Command::CheckAxioms { pair, dim, norm, samples, seed, json } => {
            check_axioms_cmd(&pair, dim, norm.as_deref(), samples, seed, json)
        }
        Command::Eval { expr, at } => eval_cmd(&expr, &at).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
