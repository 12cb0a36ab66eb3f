//! The `xorproof` command line.
//!
//! Exit codes: 0 success, 1 property failure, 2 parse or input error,
//! 3 capacity or bounds, 4 method not applicable to the input.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::check::{self, CheckOptions, Level};
use crate::error::Error;
use crate::games::{analyze, TransversalGame};
use crate::gf2::BitVector;
use crate::pcp::{self, game_from_instance, planted_witness, witness_to_linear, ThreeLinInstance, Witness};
use crate::protocol::{estimate_value, transcripts, Prover};
use crate::rng::RngState;
use crate::strategies::{
    brute_force_classical_value, eval_deterministic, eval_linear, eval_quantum, parse_tables,
    random_quantum_strategy, DeterministicStrategy, LinearStrategy, QuantumStrategy,
};

#[derive(Debug, Parser)]
#[command(name = "xorproof", version, about = "Transversal XOR games, 3-LIN reductions and protocol simulation")]
pub struct Cli {
    /// Worker threads for parallel scans (0 picks the machine default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral analysis of a game or 3-LIN instance file.
    Analyze { path: PathBuf },
    /// Game value through one of the independent computation paths.
    Value {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Spectral)]
        method: Method,
    },
    /// Monte Carlo run of the share-splitting protocol.
    Simulate(SimulateArgs),
    /// Write a generated 3-LIN instance.
    Gen(GenArgs),
    /// Run the cross-module property suites.
    Check {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        /// Replace the transform with a corrupted one (mutation testing).
        #[arg(long, hide = true)]
        corrupt_fwht: bool,
    },
    /// Score an entangled strategy against the classical value.
    Quantum(QuantumArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `honest`, `linear:<u>,<gamma>` or `tables:<file>`.
    #[arg(long, default_value = "honest")]
    pub strategy: String,
    /// Write one transcript line per round to this file.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long = "type", value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub eqs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["file", "random"]))]
pub struct QuantumArgs {
    pub path: PathBuf,
    /// Strategy in `qstrat v1` format.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Sample a random strategy of this local dimension.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Save the strategy that was evaluated.
    #[arg(long)]
    pub write: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Spectral,
    Brute,
    Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Sat3lin,
    Unsat3lin,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Fast,
    Full,
}

/// A failed command with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => 3,
            Error::Applicability(_) => 4,
            Error::Numerical(_) => 1,
            _ => 2,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(2, e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn num(x: f64) -> String {
    format!("{x:.15}")
}

enum Input {
    Game(TransversalGame),
    Instance { inst: ThreeLinInstance, planted: Option<Witness> },
}

impl Input {
    fn load(path: &Path) -> Result<Input, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(2, format!("{}: {e}", path.display())))?;
        let header = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'));
        let named = |e: Error| {
            let mut c = CliError::from(e);
            c.message = format!("{}: {}", path.display(), c.message);
            c
        };
        match header {
            Some("txg v1") => Ok(Input::Game(TransversalGame::parse(&text).map_err(named)?)),
            Some("3lin v1") => Ok(Input::Instance {
                inst: ThreeLinInstance::parse(&text).map_err(named)?,
                planted: planted_witness(&text),
            }),
            other => Err(CliError::new(
                2,
                format!(
                    "{}: unrecognized header {:?} (expected `txg v1` or `3lin v1`)",
                    path.display(),
                    other.unwrap_or("")
                ),
            )),
        }
    }

    fn game(&self) -> TransversalGame {
        match self {
            Input::Game(g) => g.clone(),
            Input::Instance { inst, .. } => game_from_instance(inst),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Input::Game(_) => "game",
            Input::Instance { .. } => "instance",
        }
    }
}

/// Runs a parsed command, writing its report to `out`.
pub fn run(cli: Cli, out: &mut (dyn Write + Send)) -> CliResult {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::new(1, e.to_string()))?;
    pool.install(|| dispatch(cli.command, out))
}

fn dispatch(command: Command, out: &mut (dyn Write + Send)) -> CliResult {
    match command {
        Command::Analyze { path } => cmd_analyze(&path, out),
        Command::Value { path, method } => cmd_value(&path, method, out),
        Command::Simulate(args) => cmd_simulate(&args, out),
        Command::Gen(args) => cmd_gen(&args, out),
        Command::Check { level, corrupt_fwht } => cmd_check(level, corrupt_fwht, out),
        Command::Quantum(args) => cmd_quantum(&args, out),
    }
}

fn cmd_analyze(path: &Path, out: &mut dyn Write) -> CliResult {
    let input = Input::load(path)?;
    let game = input.game();
    let a = analyze(&game)?;
    writeln!(out, "input {}", input.kind())?;
    writeln!(out, "m {}", game.m())?;
    writeln!(out, "clauses {}", game.clauses().len())?;
    writeln!(out, "value {} u={} gamma={}", num(a.value), a.u_star, u8::from(a.gamma_star))?;
    Ok(())
}

fn cmd_value(path: &Path, method: Method, out: &mut dyn Write) -> CliResult {
    let input = Input::load(path)?;
    let value = match method {
        Method::Spectral => analyze(&input.game())?.value,
        Method::Brute => brute_force_classical_value(&input.game())?.1,
        Method::Witness => match &input {
            Input::Instance { inst, .. } => pcp::best_witness(inst)?.1,
            Input::Game(_) => {
                return Err(CliError::new(
                    4,
                    "method `witness` needs a 3-LIN instance (`3lin v1`); this file is a game",
                ))
            }
        },
    };
    writeln!(out, "value {}", num(value))?;
    Ok(())
}

enum Strategy {
    Linear(LinearStrategy),
    Tables(DeterministicStrategy, DeterministicStrategy),
}

fn parse_strategy(spec: &str, input: &Input, m: usize) -> Result<Strategy, CliError> {
    if spec == "honest" {
        let Input::Instance { inst, planted } = input else {
            return Err(CliError::new(4, "strategy `honest` needs a 3-LIN instance"));
        };
        let w = match planted {
            Some(w) if w.0.len() == m => *w,
            _ => pcp::best_witness(inst)?.0,
        };
        return Ok(Strategy::Linear(witness_to_linear(&w)));
    }
    if let Some(rest) = spec.strip_prefix("linear:") {
        let (u, g) = rest
            .split_once(',')
            .ok_or_else(|| CliError::new(2, format!("expected linear:<u>,<gamma>, got {spec:?}")))?;
        let u: BitVector = u.parse()?;
        if u.len() != m {
            return Err(CliError::new(2, format!("u has length {}, game has m = {m}", u.len())));
        }
        let gamma = match g {
            "0" => false,
            "1" => true,
            _ => return Err(CliError::new(2, format!("gamma must be 0 or 1, got {g:?}"))),
        };
        return Ok(Strategy::Linear(LinearStrategy::new(u, gamma)));
    }
    if let Some(file) = spec.strip_prefix("tables:") {
        let text = std::fs::read_to_string(file).map_err(|e| CliError::new(2, format!("{file}: {e}")))?;
        let (a, b) = parse_tables(&text)?;
        if a.m() != m {
            return Err(CliError::new(2, format!("tables have m = {}, game has m = {m}", a.m())));
        }
        return Ok(Strategy::Tables(a, b));
    }
    Err(CliError::new(2, format!("unknown strategy {spec:?}")))
}

fn simulate_with(
    args: &SimulateArgs,
    game: &TransversalGame,
    alice: &(impl Prover + Sync),
    bob: &(impl Prover + Sync),
    exact: f64,
    out: &mut dyn Write,
) -> CliResult {
    let est = estimate_value(game, alice, bob, args.trials, args.seed)?;
    if let Some(log) = &args.log {
        let mut f = std::io::BufWriter::new(std::fs::File::create(log)?);
        for (n, tr) in transcripts(game, alice, bob, args.trials, args.seed)?.iter().enumerate() {
            writeln!(f, "{}", tr.log_line(n as u64))?;
        }
        f.flush()?;
    }
    let dev = est.estimate - exact;
    let sigma = if dev.abs() <= 1e-12 {
        "0.000".to_string()
    } else if est.stderr == 0.0 {
        "inf".to_string()
    } else {
        format!("{:.3}", dev / est.stderr)
    };
    writeln!(out, "strategy {}", args.strategy)?;
    writeln!(out, "trials {}", args.trials)?;
    writeln!(out, "seed {}", args.seed)?;
    writeln!(out, "accepted {}", est.accepted)?;
    writeln!(out, "estimate {}", num(est.estimate))?;
    writeln!(out, "stderr {}", num(est.stderr))?;
    writeln!(out, "exact {}", num(exact))?;
    writeln!(out, "deviation_sigma {sigma}")?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> CliResult {
    if args.trials == 0 {
        return Err(CliError::new(3, "--trials must be at least 1"));
    }
    let input = Input::load(&args.path)?;
    let game = input.game();
    match parse_strategy(&args.strategy, &input, game.m())? {
        Strategy::Linear(l) => {
            let exact = eval_linear(&game, &l)?;
            simulate_with(args, &game, &l.alice(), &l.bob(), exact, out)
        }
        Strategy::Tables(a, b) => {
            let exact = eval_deterministic(&game, &a, &b)?;
            simulate_with(args, &game, &a, &b, exact, out)
        }
    }
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CliResult {
    if !(pcp::MIN_VARS..=crate::gf2::MAX_LEN).contains(&args.m) {
        return Err(CliError::new(3, format!("--m must be in 3..=24, got {}", args.m)));
    }
    if args.eqs == 0 {
        return Err(CliError::new(3, "--eqs must be at least 1"));
    }
    let mut rng = RngState::from_seed(args.seed);
    let (inst, planted) = match args.kind {
        GenKind::Sat3lin => {
            let (inst, w) = pcp::planted_instance(args.m, args.eqs, &mut rng)?;
            (inst, Some(w))
        }
        GenKind::Unsat3lin => (pcp::contradictory_instance(args.m, args.eqs.div_ceil(2), &mut rng)?, None),
        GenKind::Random => (pcp::random_instance(args.m, args.eqs, &mut rng)?, None),
    };
    std::fs::write(&args.output, inst.to_text(planted.as_ref()))?;
    writeln!(
        out,
        "wrote {} m={} equations={}",
        args.output.display(),
        inst.m(),
        inst.equations().len()
    )?;
    Ok(())
}

fn cmd_check(level: LevelArg, corrupt: bool, out: &mut dyn Write) -> CliResult {
    let level = match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let mut opts = CheckOptions::new(level);
    if corrupt {
        opts.transform = check::corrupted_fwht;
    }
    let outcomes = check::run_checks(&opts);
    let mut failed = Vec::new();
    for o in &outcomes {
        writeln!(out, "{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail)?;
        if !o.passed {
            failed.push(o.name);
        }
    }
    writeln!(out, "summary {}/{} passed", outcomes.len() - failed.len(), outcomes.len())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(1, format!("failed properties: {}", failed.join(", "))))
    }
}

fn cmd_quantum(args: &QuantumArgs, out: &mut dyn Write) -> CliResult {
    let input = Input::load(&args.path)?;
    let game = input.game();
    if game.m() > 10 {
        return Err(CliError::new(3, format!("quantum evaluation is capped at m = 10, got {}", game.m())));
    }
    let strat = match (&args.file, args.random) {
        (Some(f), _) => QuantumStrategy::parse(&std::fs::read_to_string(f)?)?,
        (None, Some(d)) => random_quantum_strategy(d, game.m(), &mut RngState::from_seed(args.seed))
            .map_err(|e| CliError::new(3, e.to_string()))?,
        (None, None) => unreachable!("clap enforces one strategy source"),
    };
    if let Some(w) = &args.write {
        std::fs::write(w, strat.to_text())?;
    }
    let q = eval_quantum(&game, &strat)?;
    let c = analyze(&game)?.value;
    writeln!(out, "d {}", strat.d())?;
    writeln!(out, "quantum {}", num(q))?;
    writeln!(out, "classical {}", num(c))?;
    writeln!(out, "margin {}", num(c - q))?;
    if q > c + 1e-9 {
        return Err(CliError::new(1, "entangled strategy exceeds the classical value"));
    }
    Ok(())
}
