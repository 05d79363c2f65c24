use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use castcalc::harness::{fuzz_campaign, sem_approx, Dir, GenConfig, SemError, ThreeValued};
use castcalc::precision::PrecError;
use castcalc::syntax::line_col;
use castcalc::{
    compile_cast_ann, eval_traced, infer, infer_term_prec, parse, parse_type, print_ann,
    print_term, AnnTerm, Outcome, Type,
};
use clap::{Parser, Subcommand, ValueEnum};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const VIOLATION: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "castcalc",
    version,
    about = "Workbench for a gradually typed cast calculus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirArg {
    Le,
    Ge,
}

#[derive(Subcommand)]
enum Command {
    /// Print the type of a program
    Typecheck { file: PathBuf },
    /// Evaluate a program for at most N steps
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
        /// Also print the reduction trace as JSON
        #[arg(long)]
        trace: bool,
    },
    /// Compile a cast around a program
    Cast {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Search for a precision derivation between two programs
    Prec { less: PathBuf, more: PathBuf },
    /// Check semantic approximation at a step index
    Semapprox {
        less: PathBuf,
        more: PathBuf,
        #[arg(long, value_enum)]
        dir: DirArg,
        #[arg(short = 'k')]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Run a gradual-guarantee campaign
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
        #[arg(long, default_value_t = 12)]
        max_size: usize,
        #[arg(long, default_value_t = 3)]
        edits: usize,
        /// Write the full report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
        /// Add blame edits and unvalidated control pairs
        #[arg(long)]
        adversarial: bool,
    },
}

/// Error that ends a command with a given exit code.
struct Fail(u8, String);

type CmdResult = Result<u8, Fail>;

fn color(word: &str, code: &str) -> String {
    if std::env::var("GG_COLOR").as_deref() == Ok("1") {
        format!("\x1b[{code}m{word}\x1b[0m")
    } else {
        word.to_string()
    }
}

fn load(path: &Path) -> Result<AnnTerm, Fail> {
    let text =
        fs::read_to_string(path).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))
}

fn load_typed(path: &Path) -> Result<(AnnTerm, castcalc::Term, Type), Fail> {
    let ann = load(path)?;
    let text = fs::read_to_string(path).unwrap_or_default();
    match infer(&[], &ann) {
        Ok((term, ty)) => Ok((ann, term, ty)),
        Err(e) => {
            let at = match e.span {
                Some(s) => {
                    let (line, col) = line_col(&text, s.start);
                    format!("{}:{line}:{col}", path.display())
                }
                None => path.display().to_string(),
            };
            Err(Fail(
                NEGATIVE,
                format!("{at}: type error [{}]: {}", e.kind.code(), e.kind),
            ))
        }
    }
}

fn type_arg(text: &str) -> Result<Type, Fail> {
    parse_type(text).map_err(|e| Fail(USAGE, format!("bad type {text:?}: {e}")))
}

fn steps(n: usize) -> String {
    if n == 1 {
        "1 step".to_string()
    } else {
        format!("{n} steps")
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Typecheck { file } => {
            let (_, _, ty) = load_typed(&file)?;
            println!("{ty}");
            Ok(OK)
        }
        Command::Run { file, fuel, trace } => {
            let (_, term, _) = load_typed(&file)?;
            let (outcome, log) =
                eval_traced(&term, fuel).map_err(|e| Fail(NEGATIVE, e.to_string()))?;
            match outcome {
                Outcome::Val { value, steps: n } => {
                    println!("value {} after {}", print_term(&value), steps(n))
                }
                Outcome::Blamed { steps: n } => {
                    println!("{} after {}", color("blame", "31"), steps(n))
                }
                Outcome::Timeout { fuel } => println!("timeout after {}", steps(fuel)),
            }
            if trace {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&log).expect("trace serializes")
                );
            }
            Ok(OK)
        }
        Command::Cast { file, from, to } => {
            let (from, to) = (type_arg(&from)?, type_arg(&to)?);
            let (ann, term, ty) = load_typed(&file)?;
            if !castcalc::typecheck::check(&[], &ann, &from).is_ok() {
                return Err(Fail(NEGATIVE, format!("program has type {ty}, not {from}")));
            }
            debug_assert_eq!(ann.erase(), term);
            let out =
                compile_cast_ann(&from, &to, &ann).map_err(|e| Fail(NEGATIVE, e.to_string()))?;
            println!("{}", print_ann(&out));
            Ok(OK)
        }
        Command::Prec { less, more } => {
            let (_, m, _) = load_typed(&less)?;
            let (_, mp, _) = load_typed(&more)?;
            match infer_term_prec(&[], &m, &mp) {
                Ok(Some((_, d))) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&d.to_json()).expect("derivation serializes")
                    );
                    Ok(OK)
                }
                Ok(None) => {
                    println!("not derivable");
                    Ok(NEGATIVE)
                }
                Err(PrecError::IllTyped(side)) => {
                    Err(Fail(NEGATIVE, format!("{side:?} term is ill-typed")))
                }
            }
        }
        Command::Semapprox {
            less,
            more,
            dir,
            k,
            fuel,
        } => {
            let (_, m, _) = load_typed(&less)?;
            let (_, mp, _) = load_typed(&more)?;
            let dir = match dir {
                DirArg::Le => Dir::Le,
                DirArg::Ge => Dir::Ge,
            };
            match sem_approx(dir, &m, &mp, k, fuel) {
                Ok(ThreeValued::Holds) => {
                    println!("{}", color("Holds", "32"));
                    Ok(OK)
                }
                Ok(ThreeValued::Unknown) => {
                    println!("{}", color("Unknown", "33"));
                    Ok(OK)
                }
                Ok(ThreeValued::Fails) => {
                    println!("{}", color("Fails", "31"));
                    Ok(NEGATIVE)
                }
                Err(e @ SemError::FuelBelowIndex { .. }) => Err(Fail(USAGE, e.to_string())),
                Err(e) => Err(Fail(NEGATIVE, e.to_string())),
            }
        }
        Command::Fuzz {
            seed,
            pairs,
            fuel,
            max_size,
            edits,
            json,
            adversarial,
        } => {
            let cfg = GenConfig {
                seed,
                fuel,
                max_size,
                edits,
                adversarial,
                ..GenConfig::default()
            };
            let report = fuzz_campaign(&cfg, pairs);
            let t = &report.totals;
            println!("pairs: {} ({} skipped)", report.pairs, report.skipped);
            println!("consistent: {}", t.consistent);
            println!("violation: {}", t.violation);
            println!(
                "inconclusive: {} ({:.2}%)",
                t.inconclusive,
                100.0 * report.inconclusive_rate()
            );
            for (why, n) in &report.inconclusive_reasons {
                println!("  {why}: {n}");
            }
            println!("sem_approx failures: {}", report.sem_approx_failures.len());
            for v in &report.violations {
                println!(
                    "{} #{} seed {}: {} vs {}",
                    color("violation", "31"),
                    v.index,
                    v.seed,
                    v.less,
                    v.more
                );
            }
            if let Some(out) = json {
                fs::write(&out, report.to_json())
                    .map_err(|e| Fail(USAGE, format!("{}: {e}", out.display())))?;
            }
            if t.violation > 0 || !report.sem_approx_failures.is_empty() {
                Ok(VIOLATION)
            } else {
                Ok(OK)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
