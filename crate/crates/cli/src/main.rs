use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hardyz_core::hardy::{default_c, residual_with_c, z_deriv_main_sum, z_deriv_reference, z_main_sum, z_reference};
use hardyz_core::harness::{
    export_plot_data, run_sweep, verify_suite_with, Baseline, CheckStatus, OutputFormat, RecordCache, SweepConfig,
};
use hardyz_core::numerics::{context_for_target, format_real, parse_real};
use hardyz_core::theta::{theta, theta_jet};
use hardyz_core::BigReal;

#[derive(Parser)]
#[command(
    name = "hardyz",
    version,
    about = "Hardy Z-function derivatives and their approximate functional equation"
)]
struct Cli {
    /// Target absolute error 2^-N for computed values.
    #[arg(long, global = true, default_value_t = 64, allow_negative_numbers = true)]
    precision_exponent: i32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// θ(t), or its derivatives up to --order.
    Theta {
        #[arg(long)]
        t: String,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Z(t) and the main sum of the Riemann–Siegel formula.
    Z {
        #[arg(long)]
        t: String,
    },
    /// Z^(k)(t) and its main sum.
    Zk {
        #[arg(long)]
        t: String,
        #[arg(long)]
        k: u32,
    },
    /// The error term R_k(t) with its normalizations.
    Residual {
        #[arg(long)]
        t: String,
        #[arg(long)]
        k: u32,
        /// Envelope constant, > 1 (default e^(1/2)).
        #[arg(long)]
        c: Option<String>,
    },
    /// Residual records over a grid of t and k.
    Sweep {
        /// Comma-separated values of t.
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<String>,
        #[arg(long)]
        k_min: u32,
        #[arg(long)]
        k_max: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        c: Option<String>,
        /// Also write `<PREFIX>-normalized.dat` and `<PREFIX>-envelope_ratio.dat`.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run a verification suite; exits with status 1 if any check fails.
    Verify {
        /// theta_bounds, stirling, qp, gamma_series, eta_consistency,
        /// lemma3_identity, lemma5_tail, afe_error or paper_experiment
        suite: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Threshold file to use instead of the built-in calibration.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

fn input_bits(target: i32) -> u32 {
    (target.max(0) as u32 + 64).max(128)
}

fn parse_t(s: &str, target: i32) -> Result<BigReal> {
    parse_real(s, input_bits(target)).with_context(|| format!("invalid value `{s}`"))
}

fn parse_c(c: &Option<String>, target: i32) -> Result<BigReal> {
    match c {
        Some(s) => parse_t(s, target),
        None => Ok(default_c(input_bits(target))),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let target = cli.precision_exponent;
    match cli.command {
        Command::Theta { t, order } => {
            let t = parse_t(&t, target)?;
            let ctx = context_for_target(&t, order.unwrap_or(0) as u32, target)?;
            match order {
                None => println!("theta = {}", format_real(&theta(&t, &ctx)?)),
                Some(order) => {
                    let jet = theta_jet(&t, order, &ctx)?;
                    for (nu, v) in jet.values().iter().enumerate() {
                        println!("theta^({nu}) = {}", format_real(v));
                    }
                }
            }
        }
        Command::Z { t } => {
            let t = parse_t(&t, target)?;
            let ctx = context_for_target(&t, 0, target)?;
            let main = z_main_sum(&t, &ctx)?;
            println!("z = {}", format_real(&z_reference(&t, &ctx)?));
            println!("main_sum = {}", format_real(&main.value));
            println!("n_terms = {}", main.n_terms);
        }
        Command::Zk { t, k } => {
            let t = parse_t(&t, target)?;
            let ctx = context_for_target(&t, k, target)?;
            let main = z_deriv_main_sum(&t, k, &ctx)?;
            let reference = z_deriv_reference(&t, k, &ctx)?;
            println!("zk = {}", format_real(&reference.value));
            println!("imag_leak = {}", format_real(&reference.imag_leak));
            println!("main_sum = {}", format_real(&main.value));
            println!("n_terms = {}", main.n_terms);
            println!("working_bits = {}", reference.working_bits);
        }
        Command::Residual { t, k, c } => {
            let t = parse_t(&t, target)?;
            let c = parse_c(&c, target)?;
            let ctx = context_for_target(&t, k, target)?;
            let r = residual_with_c(&t, k, &c, &ctx)?;
            for (name, v) in [
                ("t", &r.t),
                ("main_sum", &r.main_sum),
                ("reference", &r.reference),
                ("residual", &r.residual),
                ("theta_prime", &r.theta_prime),
                ("theta_prime_pow_k", &r.theta_prime_pow_k),
                ("normalized", &r.normalized),
                ("envelope", &r.envelope),
                ("envelope_ratio", &r.envelope_ratio),
                ("imag_leak", &r.imag_leak),
            ] {
                println!("{name} = {}", format_real(v));
            }
            println!("k = {}", r.k);
            println!("n_terms = {}", r.n_terms);
            println!("working_bits = {}", r.working_bits);
            println!("extrapolated = {}", r.extrapolated);
        }
        Command::Sweep {
            t,
            k_min,
            k_max,
            out,
            format,
            jobs,
            c,
            plot,
        } => {
            let ts = t.iter().map(|s| parse_t(s, target)).collect::<Result<Vec<_>>>()?;
            let mut config = SweepConfig::new(ts, k_min, k_max);
            config.c = parse_c(&c, target)?;
            config.target_abs_error_exponent = target;
            config.output_path = Some(out.clone());
            config.format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Jsonl => OutputFormat::Jsonl,
            };
            config.jobs = jobs.unwrap_or(0);
            config.cache = RecordCache::from_env();
            let entries = run_sweep(&config)?;
            let failed = entries.iter().filter(|e| e.error().is_some()).count();
            eprintln!(
                "{} records written to {} ({failed} failed)",
                entries.len(),
                out.display()
            );
            if let Some(prefix) = plot {
                let records: Vec<_> = entries.iter().filter_map(|e| e.record().cloned()).collect();
                if records.is_empty() {
                    bail!("no successful records to plot");
                }
                let (a, b) = export_plot_data(&records, &prefix)?;
                eprintln!("plot data: {} {}", a.display(), b.display());
            }
        }
        Command::Verify { suite, json, baseline } => {
            let baseline = match baseline {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    Baseline::from_toml_str(&text)?
                }
                None => Baseline::shipped(),
            };
            let report = verify_suite_with(suite.parse()?, target, &baseline)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for c in &report.checks {
                    println!("{:<8} {}  measured {}  bound {}", c.status, c.name, c.measured, c.bound);
                }
                let count = |s: CheckStatus| report.checks.iter().filter(|c| c.status == s).count();
                println!(
                    "{}: {} pass, {} fail, {} recorded in {:.1}s",
                    report.suite_name,
                    count(CheckStatus::Pass),
                    count(CheckStatus::Fail),
                    count(CheckStatus::Recorded),
                    report.wall_time_seconds
                );
            }
            if report.has_failure() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
