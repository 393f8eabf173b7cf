use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fano_degree::curves::{curve_config_search, CurveConfig};
use fano_degree::filters::FilterConstants;
use fano_degree::report::{self, Format, RunConfig, Table};
use fano_degree::sieve::Window;
use fano_degree::wps::{reid_tai, QuotientPoint, Stratum, WeightedP3};
use fano_degree::{Basket, Error, Rational};

#[derive(Parser)]
#[command(name = "fano-degree", version, about = "Degree candidates for non-Gorenstein canonical Fano threefolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Md,
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Md => Format::Md,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "md")]
    format: OutputFormat,
    /// Open degree window LO < c1^3 < HI.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    window: Option<Vec<Rational>>,
    /// Show hidden candidates and exclusion reasons.
    #[arg(long)]
    emit_excluded: bool,
    /// Degree bound for canonical weak Fano threefolds.
    #[arg(long, default_value = "324")]
    weak_fano_bound: Rational,
    /// Degree bound for Picard-number-one canonical Fano threefolds.
    #[arg(long, default_value = "72")]
    picard_one_bound: Rational,
    /// Weil index bound for non-Gorenstein terminal Fano threefolds.
    #[arg(long, default_value_t = 19)]
    terminal_index_bound: u64,
    /// Also write one CSV per table into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Error> {
        let window = match self.window.as_deref() {
            Some([lo, hi]) => Window::new(*lo, *hi)?,
            Some(_) => return Err(Error::InvalidInput("--window takes two values".into())),
            None => Window::default(),
        };
        let constants = FilterConstants {
            weak_fano_bound: self.weak_fano_bound,
            picard_one_bound: self.picard_one_bound,
            terminal_index_bound: self.terminal_index_bound,
        };
        constants.validate()?;
        Ok(RunConfig {
            window,
            constants,
            format: self.format.into(),
            emit_excluded: self.emit_excluded,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Candidate tables for q <= 5, q = 6 and q >= 7.
    Tables(RunArgs),
    /// Full classification: appendix tables, survivor table and summary.
    Classify(RunArgs),
    /// Invariants of a weighted projective 3-space.
    Wps {
        #[arg(num_args = 4, required = true)]
        weights: Vec<u64>,
        /// Basket to check against the anticanonical section count, e.g. "(3,1)".
        #[arg(long)]
        basket: Option<Basket>,
    },
    /// Classify the cyclic quotient 1/r(w1,w2,w3).
    ReidTai {
        r: u64,
        #[arg(num_args = 3, required = true, allow_negative_numbers = true)]
        weights: Vec<i64>,
    },
    /// Singular-curve configurations under a weight bound.
    CurveSearch {
        bound: Rational,
        /// Require this number to divide the lcm of the class-group orders.
        #[arg(long)]
        lcm_divisor: Option<u64>,
        /// Drop the empty configuration.
        #[arg(long)]
        nonempty: bool,
    },
    /// Compare every table with the CSV files in a golden directory.
    Diff {
        #[arg(long)]
        golden: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

const MISMATCH: u8 = 1;
const INVALID: u8 = 2;

fn emit(tables: &[Table], args: &RunArgs, config: &RunConfig) -> Result<()> {
    print!("{}", report::render(tables, config.format)?);
    if let Some(dir) = &args.out {
        report::write_csv_files(tables, dir).with_context(|| format!("writing {}", dir.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Tables(args) => {
            let config = args.config()?;
            emit(&report::cmd_tables(&config)?, &args, &config)?;
            Ok(0)
        }
        Command::Classify(args) => {
            let config = args.config()?;
            let (classification, tables) = report::cmd_classify(&config)?;
            if config.format == Format::Json {
                let doc = serde_json::json!({ "tables": tables, "classification": classification });
                println!("{}", serde_json::to_string_pretty(&doc)?);
                if let Some(dir) = &args.out {
                    report::write_csv_files(&tables, dir)?;
                }
            } else {
                emit(&tables, &args, &config)?;
            }
            Ok(0)
        }
        Command::Wps { weights, basket } => {
            let w: [u64; 4] = weights.try_into().map_err(|_| Error::InvalidInput("need four weights".into()))?;
            let space = WeightedP3::new(w)?;
            println!("space: {space}");
            println!("degree: {}", space.anticanonical_degree());
            println!("weil_index: {}", space.weil_index());
            let strata = space.singular_strata();
            if strata.is_empty() {
                println!("strata: smooth");
            }
            for s in &strata {
                let label = match s {
                    Stratum::Point { point, .. } => match reid_tai(point) {
                        Ok(kind) => kind.to_string(),
                        Err(Error::NotSupported(_)) => "NOT-SUPPORTED".to_string(),
                        Err(e) => return Err(e.into()),
                    },
                    Stratum::Curve { .. } => "NOT-SUPPORTED".to_string(),
                };
                println!("stratum: {s} {label}");
            }
            println!("h0(-K): {}", space.h0_monomials(space.weil_index()));
            if let Some(b) = basket {
                let ok = space.basket_consistency(&b);
                println!("basket {b}: consistent={ok}");
                return Ok(if ok { 0 } else { MISMATCH });
            }
            Ok(0)
        }
        Command::ReidTai { r, weights } => {
            let w: [i64; 3] = weights.try_into().map_err(|_| Error::InvalidInput("need three weights".into()))?;
            let point = QuotientPoint::new(r, w)?;
            let ages: Vec<String> = point.age_values().iter().map(Rational::to_string).collect();
            match reid_tai(&point) {
                Ok(kind) => println!("{point}: {kind} (ages {})", ages.join(", ")),
                Err(Error::NotSupported(msg)) => println!("{point}: NOT-SUPPORTED ({msg})"),
                Err(e) => return Err(e.into()),
            }
            Ok(0)
        }
        Command::CurveSearch { bound, lcm_divisor, nonempty } => {
            let configs = curve_config_search(bound, lcm_divisor, nonempty)?;
            for c in &configs {
                println!("{c} weight={}", CurveConfig::weight(c));
            }
            println!("{} configuration(s)", configs.len());
            Ok(0)
        }
        Command::Diff { golden, run } => {
            let config = run.config()?;
            let tables = report::all_tables(&config)?;
            let outcomes = report::cmd_diff(&tables, &golden)?;
            for o in &outcomes {
                let mark = if o.passed { "PASS" } else { "FAIL" };
                println!("{mark} {}: {}", o.table, o.detail);
            }
            Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { MISMATCH })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let invalid = e.downcast_ref::<Error>().is_some_and(|e| {
                matches!(e, Error::InvalidInput(_) | Error::Parse { .. } | Error::Precondition(_))
            });
            ExitCode::from(if invalid { INVALID } else { MISMATCH })
        }
    }
}
