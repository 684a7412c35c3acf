mod metrics;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use posm_core::calculus::right_eval;
use posm_core::crumble::crumble;
use posm_core::harness::gen::{church, tau3_loop};
use posm_core::harness::{run_suite, scaling_experiment, Exec, SuiteConfig};
use posm_core::machines::{
    check_natural_invariants, check_state_invariants, natural_run, run_with, sliced_run,
    trace_line, Machine, NaturalState, SlicedState, TransitionLabel, Violation,
};
use posm_core::{parse_lambda, parse_positive, NameSupply, PositiveTerm};

use metrics::MetricsRecord;

const DEFAULT_BUDGET: usize = 10_000;

#[derive(Parser)]
#[command(
    name = "posm",
    version,
    about = "Positive λ-calculus abstract machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a λ-term into a positive term.
    Crumble {
        /// Input file, or `-` for stdin.
        input: PathBuf,
    },
    /// Evaluate with the right strategy, printing every step.
    Eval {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        max_steps: usize,
        #[command(flatten)]
        syntax: SyntaxFlags,
    },
    /// Run one of the abstract machines.
    Run {
        input: PathBuf,
        #[arg(long, value_enum)]
        machine: MachineKind,
        /// Budget of principal transitions.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        max_steps: usize,
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum)]
        metrics: Option<MetricsFormat>,
        #[arg(long)]
        check_invariants: bool,
        #[command(flatten)]
        syntax: SyntaxFlags,
    },
    /// Run the property suite over a seeded random corpus.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        corpus: usize,
        /// Process the corpus on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Compare the cumulative principal cost of both machines.
    Bench {
        #[arg(long, value_enum, default_value_t = Family::Tau3)]
        family: Family,
        #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256, 512])]
        budgets: Vec<usize>,
        #[arg(long, value_enum)]
        metrics: Option<MetricsFormat>,
    },
}

#[derive(Args)]
struct SyntaxFlags {
    /// Input is a positive term.
    #[arg(long, conflicts_with = "lambda")]
    positive: bool,
    /// Input is an ordinary λ-term, crumbled before use.
    #[arg(long)]
    lambda: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MachineKind {
    Natural,
    Sliced,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricsFormat {
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Tau3,
    Church,
}

/// A diagnostic and the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn property(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
    }
}

fn looks_positive(text: &str) -> bool {
    text.contains('[') && (text.contains("<-") || text.contains('←'))
}

fn load_positive(path: &PathBuf, flags: &SyntaxFlags) -> Result<PositiveTerm, Failure> {
    let text = read_input(path)?;
    let positive = flags.positive || (!flags.lambda && looks_positive(&text));
    if positive {
        parse_positive(&text).map_err(|e| Failure::usage(e.to_string()))
    } else {
        let t = parse_lambda(&text).map_err(|e| Failure::usage(e.to_string()))?;
        Ok(crumble(&t, &mut NameSupply::fresh_for_lambda(&t)))
    }
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string(v).expect("metrics serialize"));
}

fn cmd_crumble(input: &PathBuf) -> Result<(), Failure> {
    let text = read_input(input)?;
    let t = parse_lambda(&text).map_err(|e| Failure::usage(e.to_string()))?;
    println!("{}", crumble(&t, &mut NameSupply::fresh_for_lambda(&t)));
    Ok(())
}

fn cmd_eval(input: &PathBuf, max_steps: usize, flags: &SyntaxFlags) -> Result<(), Failure> {
    let t = load_positive(input, flags)?;
    let trace = right_eval(&t, max_steps);
    println!("{}", trace.initial);
    for (kind, u) in &trace.steps {
        println!("{kind}: {u}");
    }
    if trace.normal {
        println!("normal in {} steps", trace.steps.len());
    } else {
        println!("budget exhausted after {} steps", trace.steps.len());
    }
    Ok(())
}

struct RunOptions {
    budget: usize,
    trace: bool,
    metrics: Option<MetricsFormat>,
    check_invariants: bool,
}

fn run_machine<M: Machine>(
    t: &PositiveTerm,
    opts: &RunOptions,
    check: impl Fn(&M, Option<TransitionLabel>) -> Vec<Violation>,
) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    let mut violations = Vec::new();
    if opts.trace || opts.check_invariants {
        let init = M::init(t, &mut NameSupply::fresh_for(t));
        if opts.trace {
            let _ = writeln!(out, "{}", trace_line(None, &init));
        }
        if opts.check_invariants {
            violations.extend(check(&init, None).into_iter().map(|v| (0, v)));
        }
    }
    let mut step = 0;
    let report = run_with(t, opts.budget, |s: &M, tr| {
        step += 1;
        if opts.trace {
            let _ = writeln!(out, "{}", trace_line(Some(tr.label), s));
        }
        if opts.check_invariants {
            violations.extend(check(s, Some(tr.label)).into_iter().map(|v| (step, v)));
        }
    });
    drop(out);
    match opts.metrics {
        Some(MetricsFormat::Json) => print_json(&MetricsRecord::from_report(&report, true)),
        None if !opts.trace => {
            println!("{}", report.final_state.read_back());
            println!(
                "{} after {} transitions ({} principal)",
                report.status,
                report.counts.total(),
                report.counts.principal()
            );
        }
        None => {}
    }
    if let Some((step, v)) = violations.first() {
        return Err(Failure::property(format!(
            "{} invariant violations, first at state {step}: {v}",
            violations.len()
        )));
    }
    Ok(())
}

fn cmd_check(seed: u64, corpus: usize, sequential: bool) -> Result<(), Failure> {
    let cfg = SuiteConfig {
        seed,
        corpus,
        diamond_terms: corpus.min(SuiteConfig::default().diamond_terms),
        ..SuiteConfig::default()
    };
    let exec = if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let outcomes = run_suite(&cfg, exec);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    if failed > 0 {
        return Err(Failure::property(format!("{failed} checks failed")));
    }
    Ok(())
}

fn cmd_bench(
    family: Family,
    budgets: &[usize],
    metrics: Option<MetricsFormat>,
) -> Result<(), Failure> {
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::usage("budgets must be strictly increasing"));
    }
    let t = match family {
        Family::Tau3 => tau3_loop(),
        Family::Church => {
            let l = church(3, 3);
            crumble(&l, &mut NameSupply::fresh_for_lambda(&l))
        }
    };
    match metrics {
        Some(MetricsFormat::Json) => {
            let records: Vec<MetricsRecord> = budgets
                .iter()
                .flat_map(|&k| {
                    [
                        MetricsRecord::from_report(&natural_run(&t, k), false),
                        MetricsRecord::from_report(&sliced_run(&t, k), false),
                    ]
                })
                .collect();
            print_json(&records);
        }
        None => println!("{}", scaling_experiment(&t, budgets)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Crumble { input } => cmd_crumble(input),
        Command::Eval {
            input,
            max_steps,
            syntax,
        } => cmd_eval(input, *max_steps, syntax),
        Command::Run {
            input,
            machine,
            max_steps,
            trace,
            metrics,
            check_invariants,
            syntax,
        } => load_positive(input, syntax).and_then(|t| {
            let opts = RunOptions {
                budget: *max_steps,
                trace: *trace,
                metrics: *metrics,
                check_invariants: *check_invariants,
            };
            let n = t.size();
            match machine {
                MachineKind::Sliced => run_machine::<SlicedState>(&t, &opts, |s, l| {
                    check_state_invariants(s, n, l == Some(TransitionLabel::E))
                }),
                MachineKind::Natural => {
                    run_machine::<NaturalState>(&t, &opts, |s, _| check_natural_invariants(s))
                }
            }
        }),
        Command::Check {
            seed,
            corpus,
            sequential,
        } => cmd_check(*seed, *corpus, *sequential),
        Command::Bench {
            family,
            budgets,
            metrics,
        } => cmd_bench(*family, budgets, *metrics),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("posm: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
