//! `mhfa` command-line front end.
//!
//! [`run_command`] parses an argument vector, runs one subcommand and
//! returns the exit code with the rendered report (or error message).
//! Exit codes: 0 success, 1 usage or input error, 2 a budget was exceeded.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{One, Pow};

use mhfa_core::automata::{
    accepts, parse_machine, AutomataError, Lasso, MachineError, MultiHeadNfa, Symbol, TransitionId, Verdict,
    DEFAULT_NODE_BUDGET,
};
use mhfa_core::halting::{analyze_head_bounded, analyze_machine, HaltingError, Limits};
use mhfa_core::ips::{
    best_adversarial_certificate, build_verifier, choose_parameters, honest_certificate_with_budget, outcome_distribution,
    parse_certificate, parse_verifier_block, run_verifier, strong_error, Dyadic, HeadClassification, IpsError, Mode,
    Outcome, VerifierSpec,
};
use mhfa_core::ntmsim::{
    default_path, ratio_spread, replay_outcome, scaling_report, simulate, simulate_all, SimError, SimOptions,
};
use mhfa_core::report::{distribution_report, error_report, quoted, safety_report, scaling_table, Report, Style, Value};
use mhfa_core::transforms::{add_counter_heads, add_timer_head, project_head};

#[derive(Parser, Debug)]
#[command(name = "mhfa", about = "Multi-head two-way automata, head safety and constant-coin verifiers")]
struct Cli {
    /// One `key=value` per line.
    #[arg(long, global = true)]
    machine_readable: bool,
    /// Add decimal approximations next to exact rationals.
    #[arg(long, global = true)]
    approx: bool,
    /// Cap on explored configurations or product nodes.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    /// Cap on subsets and one-way states in the halting pipeline.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    subset_budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership and whether every path halts.
    Run {
        machine: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Single-head projection of one head.
    Project {
        machine: PathBuf,
        #[arg(long)]
        head: usize,
    },
    #[command(subcommand)]
    Transform(Transform),
    /// Classify every head as safe or risky.
    Analyze {
        machine: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Pipeline)]
        method: Method,
        /// Longest input tried by the bounded method.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Cap on non-accepting alternating states in the pipeline.
        #[arg(long, default_value_t = 6)]
        afa_cap: usize,
    },
    #[command(subcommand)]
    Verifier(VerifierCommand),
    /// Honest certificate for a member input.
    Prove {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value_t = 5)]
        rounds: usize,
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Certificate maximizing the strong error on one input.
    Attack {
        #[command(flatten)]
        verifier: VerifierArgs,
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Worst strong and weak error over all nonmembers up to a length.
    Error {
        #[command(flatten)]
        verifier: VerifierArgs,
        #[arg(long, default_value_t = 8)]
        maxlen: usize,
        /// Also list every nonmember.
        #[arg(long)]
        rows: bool,
    },
    /// Rounds and risky weight for a target strong error.
    Params {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[command(flatten)]
        heads: HeadArgs,
        /// Measure the resulting verifier's error up to this length.
        #[arg(long)]
        check_maxlen: Option<usize>,
    },
    #[command(subcommand)]
    Ntmsim(NtmCommand),
}

#[derive(Subcommand, Debug)]
enum Transform {
    /// Add a head that times out after about c·(n+2) steps.
    Timer {
        machine: PathBuf,
        #[arg(long, default_value_t = 1)]
        c: usize,
    },
    /// Add counter heads that bound the run length.
    Counters { machine: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Pipeline,
    Bounded,
}

#[derive(Args, Debug)]
struct HeadArgs {
    /// Safe heads (1-based); the rest are risky. Defaults to the pipeline's classification.
    #[arg(long, value_delimiter = ',')]
    safe: Option<Vec<usize>>,
    /// Risky heads (1-based); the rest are safe.
    #[arg(long, value_delimiter = ',')]
    risky: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct VerifierArgs {
    #[arg(long)]
    machine: PathBuf,
    /// Read mode, rounds, weight and classification from a verifier line instead.
    #[arg(long)]
    verifier: Option<PathBuf>,
    #[arg(long, default_value = "GB")]
    mode: String,
    #[arg(long, default_value_t = 5)]
    rounds: usize,
    /// Total probability of selecting a risky head (GB); 1/4 by default, 0 without risky heads.
    #[arg(long)]
    w: Option<String>,
    #[command(flatten)]
    heads: HeadArgs,
    /// Round a non-dyadic SYS up-front rejection probability.
    #[arg(long)]
    allow_sys_approx: bool,
}

#[derive(Subcommand, Debug)]
enum VerifierCommand {
    /// Show the verifier line, coin use and head distribution.
    Build {
        #[command(flatten)]
        verifier: VerifierArgs,
    },
    /// Run the verifier on one coin string.
    Run {
        #[command(flatten)]
        verifier: VerifierArgs,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        cert: PathBuf,
        /// Coin string of 0s and 1s.
        #[arg(long, default_value = "")]
        coins: String,
    },
    /// Exact accept/reject/loop probabilities.
    Distribution {
        #[command(flatten)]
        verifier: VerifierArgs,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    /// First symbol for the first half, second symbol for the rest.
    Halves,
    /// First symbol throughout.
    Constant,
}

#[derive(Subcommand, Debug)]
enum NtmCommand {
    /// Simulate one path on the tracked tape.
    Run {
        machine: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        /// Transition indices (0-based, comma separated); the shortest accepting path by default.
        #[arg(long, value_delimiter = ',')]
        path: Option<Vec<usize>>,
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        /// Simulate every maximal path instead (short inputs only).
        #[arg(long)]
        exhaustive: bool,
    },
    /// Simulator cost across input lengths.
    Scaling {
        machine: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64, 128])]
        lengths: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Family::Halves)]
        family: Family,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn budget(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<MachineError> for CliError {
    fn from(e: MachineError) -> Self {
        match e {
            MachineError::TooLarge { .. } => CliError::budget(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<AutomataError> for CliError {
    fn from(e: AutomataError) -> Self {
        CliError::budget(e.to_string())
    }
}

impl From<HaltingError> for CliError {
    fn from(e: HaltingError) -> Self {
        match e {
            HaltingError::Machine(m) => m.into(),
            HaltingError::Inconsistent { .. } => CliError::usage(e.to_string()),
            _ => CliError::budget(e.to_string()),
        }
    }
}

impl From<IpsError> for CliError {
    fn from(e: IpsError) -> Self {
        match e {
            IpsError::Machine(m) => m.into(),
            IpsError::Automata(a) => a.into(),
            IpsError::Budget { .. } => CliError::budget(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Automata(a) => a.into(),
            SimError::StepBudget { .. } | SimError::PathBudget { .. } => CliError::budget(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

/// Runs one command line (without the program name) and returns the exit
/// code with everything the command prints.
pub fn run_command<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once("mhfa".into()).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let style = Style {
        machine_readable: cli.machine_readable,
        approx: cli.approx,
    };
    match dispatch(&cli) {
        Ok(report) => (0, report.render(&style)),
        Err(e) => (e.code, format!("error: {}\n", e.message)),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<MultiHeadNfa, CliError> {
    parse_machine(&read(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn parse_input(m: &MultiHeadNfa, s: &str) -> Result<Vec<Symbol>, CliError> {
    Ok(m.alphabet().parse_word(s)?)
}

fn limits(cli: &Cli) -> Limits {
    Limits {
        onfa_states: cli.subset_budget,
        subsets: cli.subset_budget,
        nodes: cli.node_budget,
        ..Limits::default()
    }
}

fn lasso_block(m: &MultiHeadNfa, l: &Lasso<mhfa_core::automata::Configuration>, label: &str) -> String {
    let mut s = String::new();
    for c in &l.prefix {
        s.push_str(&format!("{label}prefix {}\n", c.render(m)));
    }
    for c in &l.cycle {
        s.push_str(&format!("{label}cycle {}\n", c.render(m)));
    }
    s
}

fn classification(cli: &Cli, m: &MultiHeadNfa, args: &HeadArgs) -> Result<HeadClassification, CliError> {
    let k = m.heads();
    let complement = |given: &[usize]| (1..=k).filter(|h| !given.contains(h)).collect::<Vec<_>>();
    Ok(match (&args.safe, &args.risky) {
        (None, None) => HeadClassification::from_analyses(&analyze_machine(m, &limits(cli))?),
        (Some(s), None) => HeadClassification::new(k, s.clone(), complement(s))?,
        (None, Some(r)) => HeadClassification::new(k, complement(r), r.clone())?,
        (Some(s), Some(r)) => HeadClassification::new(k, s.clone(), r.clone())?,
    })
}

fn verifier(cli: &Cli, args: &VerifierArgs) -> Result<VerifierSpec, CliError> {
    let m = load_machine(&args.machine)?;
    if let Some(path) = &args.verifier {
        return Ok(parse_verifier_block(&read(path)?, &m)?);
    }
    let mode = Mode::parse(&args.mode).ok_or_else(|| CliError::usage(format!("unknown mode `{}`", args.mode)))?;
    let heads = classification(cli, &m, &args.heads)?;
    let w = match &args.w {
        Some(w) => Dyadic::parse(w)?,
        None if heads.risky().is_empty() || mode != Mode::Gb => Dyadic::ZERO,
        None => Dyadic::new(1, 2).expect("1/4"),
    };
    Ok(build_verifier(&m, heads, mode, args.rounds, w, args.allow_sys_approx)?)
}

fn load_cert(path: &Path, m: &MultiHeadNfa) -> Result<mhfa_core::ips::Certificate, CliError> {
    parse_certificate(&read(path)?, m).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Run { machine, input } => {
            let m = load_machine(machine)?;
            let x = parse_input(&m, input)?;
            let r = accepts(&m, &x, cli.node_budget)?;
            let mut rep = Report::new()
                .item("input", quoted(&m, &x))
                .item("verdict", r.verdict.to_string())
                .item("always_halts", r.always_halts)
                .item("explored", r.explored);
            if let (Verdict::Member, Some(path)) = (r.verdict, &r.accepting_path) {
                let mut text = String::new();
                for (i, s) in path.iter().enumerate() {
                    let t = m.transition(s.transition);
                    text.push_str(&format!("step {} {} via {}\n", i + 1, s.from.render(&m), m.render_transition(t)));
                }
                rep = rep.item("path_length", path.len()).block("path", text);
                if let Some(c) = &r.accepting_config {
                    rep = rep.item("accepting_config", c.render(&m));
                }
            }
            if let Some(l) = &r.loop_witness {
                rep = rep.block("loop", lasso_block(&m, l, "loop "));
            }
            Ok(rep)
        }
        Command::Project { machine, head } => {
            let m = load_machine(machine)?;
            Ok(Report::new().block("machine", project_head(&m, *head)?.to_mhfa()))
        }
        Command::Transform(Transform::Timer { machine, c }) => {
            let m = load_machine(machine)?;
            Ok(Report::new().block("machine", add_timer_head(&m, *c)?.to_mhfa()))
        }
        Command::Transform(Transform::Counters { machine }) => {
            let m = load_machine(machine)?;
            Ok(Report::new().block("machine", add_counter_heads(&m)?.to_mhfa()))
        }
        Command::Analyze {
            machine,
            method,
            max_len,
            afa_cap,
        } => {
            let m = load_machine(machine)?;
            let analyses = match method {
                Method::Pipeline => analyze_machine(
                    &m,
                    &Limits {
                        afa_states: *afa_cap,
                        ..limits(cli)
                    },
                )?,
                Method::Bounded => (1..=m.heads())
                    .map(|i| analyze_head_bounded(&m, i, *max_len, cli.node_budget))
                    .collect::<Result<_, _>>()?,
            };
            let mut rep = safety_report(&m, &analyses);
            for a in &analyses {
                if let Some(l) = &a.witness {
                    rep = rep.block(format!("head {} witness", a.head), lasso_block(&project_head(&m, a.head)?, l, &format!("head {} loop ", a.head)));
                }
            }
            Ok(rep)
        }
        Command::Verifier(VerifierCommand::Build { verifier: args }) => {
            let v = verifier(cli, args)?;
            let rows = v
                .head_distribution()
                .into_iter()
                .enumerate()
                .map(|(i, p)| {
                    let kind = if v.heads.risky().contains(&(i + 1)) { "risky" } else { "safe" };
                    vec![Value::from(i + 1), kind.into(), p.into()]
                })
                .collect();
            Ok(Report::new()
                .block("verifier", v.block())
                .item("heads", v.k())
                .item("coins_per_round", v.coins_per_round())
                .item("upfront_coins", v.upfront_coins())
                .item("coin_budget", v.coin_budget())
                .item("upfront_reject", v.upfront_reject())
                .item("detection_floor", v.detection_floor())
                .table("selection", &["head", "kind", "probability"], rows))
        }
        Command::Verifier(VerifierCommand::Run {
            verifier: args,
            input,
            cert,
            coins,
        }) => {
            let v = verifier(cli, args)?;
            let x = parse_input(&v.machine, input)?;
            let c = load_cert(cert, &v.machine)?;
            let z = coins
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(CliError::usage(format!("bad coin `{ch}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let run = run_verifier(&v, &x, &c, &z)?;
            let outcome = match &run.outcome {
                Outcome::Accept => "accept".to_string(),
                Outcome::Reject { record: Some(r) } => format!("reject at record {r}"),
                Outcome::Reject { record: None } => "reject up front".to_string(),
                Outcome::Loop { round, .. } => format!("loop in round {}", round + 1),
            };
            let heads: Vec<String> = run.heads.iter().map(usize::to_string).collect();
            Ok(Report::new()
                .item("outcome", outcome)
                .item("coins_used", run.coins_used)
                .item("heads_selected", heads.join(",")))
        }
        Command::Verifier(VerifierCommand::Distribution { verifier: args, input, cert }) => {
            let v = verifier(cli, args)?;
            let x = parse_input(&v.machine, input)?;
            let c = load_cert(cert, &v.machine)?;
            let d = outcome_distribution(&v, &x, &c);
            let (weak, strong) = (d.weak(), d.strong());
            Ok(distribution_report(&d).item("weak", weak).item("strong", strong))
        }
        Command::Prove { machine, rounds, input } => {
            let m = load_machine(machine)?;
            let x = parse_input(&m, input)?;
            match honest_certificate_with_budget(&m, &x, *rounds, cli.node_budget)? {
                Some(c) => Ok(Report::new().block("certificate", c.render(&m))),
                None => Err(CliError::usage(format!("{} is not accepted by {}", quoted(&m, &x), m.name()))),
            }
        }
        Command::Attack { verifier: args, input } => {
            let v = verifier(cli, args)?;
            let x = parse_input(&v.machine, input)?;
            let a = best_adversarial_certificate(&v, &x, cli.node_budget)?;
            Ok(Report::new()
                .item("looping", a.looping)
                .item("pass_mass", &a.pass_mass)
                .item("loop_mass", &a.loop_mass)
                .item("product_nodes", a.product_nodes)
                .append(distribution_report(&a.distribution))
                .item("weak", a.weak(&v))
                .item("strong", a.strong())
                .block("certificate", a.certificate.render(&v.machine)))
        }
        Command::Error {
            verifier: args,
            maxlen,
            rows,
        } => {
            let v = verifier(cli, args)?;
            let e = strong_error(&v, *maxlen, cli.node_budget)?;
            let mut rep = Report::new().block("verifier", v.block()).append(error_report(&v.machine, &e));
            if *rows {
                let body = e
                    .rows
                    .iter()
                    .map(|r| vec![quoted(&v.machine, &r.input).into(), (&r.weak).into(), (&r.strong).into(), r.looping.into()])
                    .collect();
                rep = rep.table("nonmembers", &["input", "weak", "strong", "looping"], body);
            }
            Ok(rep)
        }
        Command::Params {
            machine,
            epsilon,
            heads,
            check_maxlen,
        } => {
            let m = load_machine(machine)?;
            let target = Dyadic::parse(epsilon)?;
            let class = classification(cli, &m, heads)?;
            let p = choose_parameters(&class, target)?;
            let v = build_verifier(&m, class, Mode::Gb, p.rounds, p.w, false)?;
            let floor = v.detection_floor();
            let bound = Pow::pow(BigRational::one() - &floor, p.rounds);
            let mut rep = Report::new()
                .item("rounds", p.rounds)
                .item("w", p.w.to_ratio())
                .item("detection_floor", floor)
                .item("accept_bound", bound)
                .block("verifier", v.block());
            if let Some(len) = check_maxlen {
                rep = rep.append(error_report(&m, &strong_error(&v, *len, cli.node_budget)?));
            }
            Ok(rep)
        }
        Command::Ntmsim(NtmCommand::Run {
            machine,
            input,
            path,
            trace,
            max_steps,
            exhaustive,
        }) => {
            let m = load_machine(machine)?;
            let x = parse_input(&m, input)?;
            let opts = SimOptions {
                trace: *trace,
                max_steps: *max_steps,
            };
            if *exhaustive {
                let r = simulate_all(&m, &x, &opts, cli.node_budget)?;
                return Ok(Report::new()
                    .item("paths", r.paths)
                    .item("accepting", r.accepting)
                    .item("max_steps", r.max_steps)
                    .item("mismatches", r.mismatches)
                    .item("violations", r.violations.len()));
            }
            let path: Vec<TransitionId> = match path {
                Some(p) => p.iter().map(|&i| TransitionId(i)).collect(),
                None => default_path(&m, &x, cli.node_budget, *max_steps)?,
            };
            let r = simulate(&m, &x, &path, &opts)?;
            let replayed = replay_outcome(&m, &x, &r.choices).map_or("invalid".to_string(), |o| o.to_string());
            let s = &r.stats;
            let recaches: Vec<String> = s.recaches().iter().map(usize::to_string).collect();
            let mut rep = Report::new()
                .item("outcome", r.outcome.to_string())
                .item("replay", replayed)
                .item("simulated_steps", s.simulated_steps)
                .item("steps", s.steps)
                .fields([("init", s.init), ("read", s.read), ("move", s.moves), ("recache", s.recache)])
                .item("recaches", recaches.join(","))
                .item("window", s.window)
                .item("counter_width", s.counter_width)
                .item("cells_used", s.cells_used)
                .item("violations", r.violations.len());
            for v in &r.violations {
                rep = rep.item("violation", v.clone());
            }
            if let Some(lines) = &r.trace {
                rep = rep.block("trace", lines.iter().map(|l| format!("{l}\n")).collect::<String>());
            }
            Ok(rep)
        }
        Command::Ntmsim(NtmCommand::Scaling {
            machine,
            lengths,
            family,
            max_steps,
        }) => {
            let m = load_machine(machine)?;
            let syms: Vec<Symbol> = m.alphabet().input_symbols().collect();
            let (a, b) = match (family, syms.as_slice()) {
                (_, []) => return Err(CliError::usage("machine has an empty input alphabet")),
                (Family::Constant, [a, ..]) => (*a, *a),
                (Family::Halves, [a]) => (*a, *a),
                (Family::Halves, [a, b, ..]) => (*a, *b),
            };
            let generate = |n: usize| (0..n).map(|i| if i < n / 2 { a } else { b }).collect::<Vec<_>>();
            let opts = SimOptions {
                trace: false,
                max_steps: *max_steps,
            };
            let rows = scaling_report(&m, lengths, generate, &opts)?;
            let mut rep = scaling_table(&rows);
            if let Some(s) = ratio_spread(&rows) {
                rep = rep.item("ratio_spread", s);
            }
            Ok(rep)
        }
    }
}
