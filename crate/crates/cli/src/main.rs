//! `maxvar`: evaluate maximal functions, compute variations, run the
//! verification suites and write figure data.
//!
//! Exit codes: 0 success, 1 verified violation, 2 undecided comparison,
//! 3 usage, parse or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use maxvar::builtins::builtin;
use maxvar::continuous::{eval_operator, variation_mf};
use maxvar::discrete::{discrete_m0, discrete_m1, discrete_mf, discrete_var, mf_variation_z, sequence_variation};
use maxvar::exact::{parse_rational, set_precision_budget};
use maxvar::format::{builtin_figure, figure_curves};
use maxvar::verify::{exhaustive_discrete_sweep, run_lemma_suite, run_suite, GeneratorKind, GeneratorParams};
use maxvar::{DiscreteInterval, Error, LatticeFunction, Operator, RealInterval, Rational, StepFunction};

const EXIT_VIOLATION: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "maxvar", version, about = "Exact centred maximal functions and their variation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Mf(x), or a restricted operator, exactly.
    Eval {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value_t = OperatorKind::Mf)]
        operator: OperatorKind,
        /// Threshold for m0 and m1.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
    },
    /// Print the exact variation of f or Mf over an interval.
    Var {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "(-inf,inf)")]
        interval: String,
        #[arg(long, value_enum, default_value_t = Of::Mf)]
        of: Of,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Sweep radius: all indicators on {-N, ..., N}.
        #[arg(long = "N", short = 'N', default_value_t = 6)]
        n: u32,
        /// Also print one JSON line per instance.
        #[arg(long)]
        reports: bool,
    },
    /// Write figure data files.
    Figure {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Also write the small- and large-window operators for this threshold.
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// File prefix for non-builtin functions.
        #[arg(long, default_value = "data_custom")]
        prefix: String,
        /// Write exact values instead of 12-digit decimals.
        #[arg(long)]
        exact: bool,
    },
}

#[derive(Args)]
struct FunctionArgs {
    /// example-1-6, example-1-8 or figure-3.
    #[arg(long, conflicts_with_all = ["file", "lattice"])]
    builtin: Option<String>,
    /// Parameter of example-1-6, in (1, 3).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Step function file.
    #[arg(long, conflicts_with = "lattice")]
    file: Option<PathBuf>,
    /// Lattice function file.
    #[arg(long)]
    lattice: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorKind {
    Mf,
    M0,
    M1,
}

#[derive(Clone, Copy, ValueEnum)]
enum Of {
    F,
    Mf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Continuous,
    SingleHeight,
    Discrete,
    Lemmas,
    Sweep,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Undecided { .. } | Error::PrecisionExhausted { .. } => EXIT_UNDECIDED,
            Error::HypothesisViolated(_) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

enum Function {
    Step(StepFunction, Option<RealInterval>),
    Lattice(LatticeFunction),
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load(args: &FunctionArgs) -> Result<Function, Failure> {
    if let Some(name) = &args.builtin {
        let c = args.c.as_deref().map(parse_rational).transpose()?;
        let (f, iv) = builtin(name, c.as_ref())?;
        return Ok(Function::Step(f, Some(iv)));
    }
    if args.c.is_some() {
        return Err(usage("--c applies to --builtin example-1-6 only"));
    }
    if let Some(path) = &args.file {
        return Ok(Function::Step(read(path)?.parse()?, None));
    }
    if let Some(path) = &args.lattice {
        return Ok(Function::Lattice(read(path)?.parse()?));
    }
    Err(usage("give one of --builtin, --file or --lattice"))
}

fn cmd_eval(function: &FunctionArgs, x: &str, operator: OperatorKind, a: Option<&str>) -> Result<String, Failure> {
    let x = parse_rational(x)?;
    let a = a.map(parse_rational).transpose()?;
    let need_a = || a.clone().ok_or_else(|| usage("--a is required for m0 and m1"));
    let value = match load(function)? {
        Function::Step(f, _) => {
            let op = match operator {
                OperatorKind::Mf => Operator::Full,
                OperatorKind::M0 => Operator::Small(need_a()?),
                OperatorKind::M1 => Operator::Large(need_a()?),
            };
            eval_operator(&f, &x, &op)?
        }
        Function::Lattice(f) => match operator {
            OperatorKind::Mf => discrete_mf(&f, &x)?,
            OperatorKind::M0 => discrete_m0(&f, &x, &need_a()?)?,
            OperatorKind::M1 => discrete_m1(&f, &x, &need_a()?)?,
        },
    };
    Ok(value.to_string())
}

fn cmd_var(function: &FunctionArgs, interval: &str, of: Of) -> Result<String, Failure> {
    match load(function)? {
        Function::Step(f, _) => {
            let iv: RealInterval = interval.parse()?;
            Ok(match of {
                Of::F => f.variation(&iv).to_string(),
                Of::Mf => variation_mf(&f, &iv)?.to_string(),
            })
        }
        Function::Lattice(f) => {
            let iv: DiscreteInterval = interval.parse()?;
            let v: Rational = match (of, &iv.lo, &iv.hi) {
                (Of::F, _, _) => discrete_var(&f, &iv)?,
                (Of::Mf, None, None) => mf_variation_z(&f)?,
                (Of::Mf, Some(lo), Some(hi)) => {
                    let profile = maxvar::discrete::mf_profile(&f, lo, hi)?;
                    let values: Vec<Rational> = profile.into_iter().map(|(_, v)| v).collect();
                    sequence_variation(&values)
                }
                _ => return Err(usage("variation of Mf on a lattice needs a bounded interval or the whole line")),
            };
            Ok(v.to_string())
        }
    }
}

fn cmd_verify(suite: Suite, seed: u64, count: usize, n: u32, reports: bool) -> Result<(String, u8), Failure> {
    let mut out = String::new();
    match suite {
        Suite::Continuous | Suite::SingleHeight | Suite::Discrete => {
            let kind = match suite {
                Suite::Continuous => GeneratorKind::Indicator,
                Suite::SingleHeight => GeneratorKind::SingleHeight,
                _ => GeneratorKind::AdmissibleDiscrete,
            };
            let (results, summary) = run_suite(&kind, &GeneratorParams::default(), count, seed)?;
            if reports {
                for r in results.iter().flatten() {
                    out.push_str(&r.to_json());
                    out.push('\n');
                }
            }
            out.push_str(&summary.to_json());
            let code = if summary.violations > 0 || summary.incoherent > 0 {
                EXIT_VIOLATION
            } else if summary.undecided > 0 {
                EXIT_UNDECIDED
            } else if summary.errors > 0 {
                EXIT_USAGE
            } else {
                0
            };
            Ok((out, code))
        }
        Suite::Lemmas => {
            let summary = run_lemma_suite(count, seed);
            let code = if summary.failures() > 0 { EXIT_VIOLATION } else { 0 };
            Ok((summary.to_json(), code))
        }
        Suite::Sweep => {
            let summary = exhaustive_discrete_sweep(n)?;
            out.push_str(&summary.to_string());
            for w in &summary.witnesses {
                out.push('\n');
                out.push_str(w);
            }
            let code = if summary.violations > 0 || summary.mismatches > 0 {
                EXIT_VIOLATION
            } else {
                0
            };
            Ok((out, code))
        }
    }
}

struct FigureArgs<'a> {
    function: &'a FunctionArgs,
    interval: Option<&'a str>,
    samples: usize,
    threshold: Option<&'a str>,
    out: &'a Path,
    prefix: &'a str,
    exact: bool,
}

fn cmd_figure(args: FigureArgs<'_>) -> Result<String, Failure> {
    let Function::Step(f, default_iv) = load(args.function)? else {
        return Err(usage("figures are drawn for step functions"));
    };
    let iv = match (args.interval, default_iv) {
        (Some(s), _) => s.parse()?,
        (None, Some(iv)) => iv,
        (None, None) => return Err(usage("--interval is required for --file")),
    };
    let (prefix, mut threshold) = match args.function.builtin.as_deref().and_then(builtin_figure) {
        Some((p, t)) => (p.to_string(), t),
        None => (args.prefix.to_string(), None),
    };
    if let Some(t) = args.threshold {
        threshold = Some(parse_rational(t)?);
    }
    let curves = figure_curves(&f, &iv, args.samples, threshold.as_ref(), &prefix)?;
    fs::create_dir_all(args.out).map_err(|e| usage(format!("cannot create {}: {e}", args.out.display())))?;
    let mut written = Vec::new();
    for c in &curves {
        let path = args.out.join(format!("{}.dat", c.name));
        fs::write(&path, c.render(args.exact)).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        written.push(path.display().to_string());
    }
    Ok(written.join("\n"))
}

fn apply_precision_env() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("MAXVAR_PRECISION_BITS") {
        let bits: u32 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("MAXVAR_PRECISION_BITS must be a positive integer, got {v:?}")))?;
        set_precision_budget(bits);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    apply_precision_env()?;
    match &cli.command {
        Command::Eval {
            function,
            x,
            operator,
            a,
        } => cmd_eval(function, x, *operator, a.as_deref()).map(|s| (s, 0)),
        Command::Var { function, interval, of } => cmd_var(function, interval, *of).map(|s| (s, 0)),
        Command::Verify {
            suite,
            seed,
            count,
            n,
            reports,
        } => cmd_verify(*suite, *seed, *count, *n, *reports),
        Command::Figure {
            function,
            interval,
            samples,
            threshold,
            out,
            prefix,
            exact,
        } => cmd_figure(FigureArgs {
            function,
            interval: interval.as_deref(),
            samples: *samples,
            threshold: threshold.as_deref(),
            out,
            prefix,
            exact: *exact,
        })
        .map(|s| (s, 0)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            println!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
