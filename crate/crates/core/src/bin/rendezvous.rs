use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rendezvous::certify::{certify, ClosedFormName};
use rendezvous::families::ParameterAssignment;
use rendezvous::game::Variant;
use rendezvous::oracle::{brute_force_opt, GridStrategySpec, OracleError};
use rendezvous::rational::Rational;
use rendezvous::report::{self, ShowError};
use rendezvous::sweep::{game_value, solve_game, sweep, SweepError, SweepOptions};

#[derive(Parser)]
#[command(name = "rendezvous", version, about = "Exact LP sweeps, certificates and brute-force checks for rendezvous on the line")]
struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal and next-to-optimal sums over the grid v = k/n.
    Sweep(GridArgs),
    /// Sweep, then report the intervals the monotonicity lemma certifies.
    Certify(GridArgs),
    /// Solve every family member at one speed ratio and rank the results.
    Solve(SolveArgs),
    /// Brute-force search over grid strategies, compared with the LP value.
    Oracle(OracleArgs),
    /// Replay one member's LP optimum and dump both strategies.
    ShowStrategy(ShowArgs),
    /// Evaluate closed-form strategies.
    EvalForm(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Args)]
struct Output {
    #[arg(long, default_value = "1")]
    distance: Rational,
    #[arg(long)]
    format: Option<Format>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value = "none")]
    variant: Variant,
    #[arg(long, default_value_t = 1000)]
    grid: u32,
    /// Solve every member at every grid point.
    #[arg(long)]
    no_prune: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value = "none")]
    variant: Variant,
    #[arg(long)]
    v: Rational,
    /// Ranking entries to print.
    #[arg(long, default_value_t = 10)]
    top: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value = "none")]
    variant: Variant,
    #[arg(long)]
    v: Rational,
    /// Grid steps per unit distance.
    #[arg(long, default_value_t = 64)]
    resolution: u32,
    /// Latest meeting time, in units of the distance.
    #[arg(long, default_value = "4")]
    horizon: Rational,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct ShowArgs {
    /// Assignment id; defaults to the optimum of the game at `v`.
    #[arg(long)]
    id: Option<String>,
    #[arg(long, default_value = "none")]
    variant: Variant,
    #[arg(long)]
    v: Rational,
    /// Print the member's linear program to stderr.
    #[arg(long)]
    dump_lp: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct EvalArgs {
    /// Closed form; all of them when omitted.
    #[arg(long)]
    name: Option<ClosedFormName>,
    #[arg(long, conflicts_with = "grid")]
    v: Option<Rational>,
    /// Evaluate at v = k/n, k = 0..=n.
    #[arg(long)]
    grid: Option<u32>,
    #[command(flatten)]
    out: Output,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Config(_) | SweepError::EmptyGrid => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Replay(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ShowError> for Failure {
    fn from(e: ShowError) -> Self {
        match e {
            ShowError::Lp(_) | ShowError::Replay(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("cannot write output: {e}"))
}

impl Output {
    fn check(&self, allowed: &[Format], default: Format) -> Result<Format, Failure> {
        if !self.distance.is_positive() {
            return Err(Failure::Usage(format!("distance {} must be positive", self.distance)));
        }
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return Err(Failure::Usage("output format not supported by this command".into()));
        }
        Ok(f)
    }

    fn writer(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.output {
            Some(p) => Box::new(File::create(p).map_err(io_failure)?),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        self.writer()?.write_all(text.as_bytes()).map_err(io_failure)
    }

    fn emit_json(&self, value: &serde_json::Value) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(value).expect("plain data");
        s.push('\n');
        self.emit(&s)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep(a) => {
            let format = a.out.check(&[Format::Csv, Format::Json], Format::Csv)?;
            let table = sweep(a.variant, a.grid, SweepOptions { prune: !a.no_prune })?;
            match format {
                Format::Json => a.out.emit_json(&report::sweep_json(&table, &a.out.distance)),
                _ => report::write_sweep_csv(a.out.writer()?, &report::sweep_records(&table, &a.out.distance))
                    .map_err(io_failure),
            }
        }
        Command::Certify(a) => {
            let format = a.out.check(&[Format::Text, Format::Json], Format::Text)?;
            let table = sweep(a.variant, a.grid, SweepOptions { prune: !a.no_prune })?;
            let intervals = certify(&table);
            match format {
                Format::Json => a.out.emit_json(&report::certify_json(&table, &a.out.distance, &intervals)),
                _ => a.out.emit(&report::certify_text(&table, &intervals)),
            }
        }
        Command::Solve(a) => {
            let format = a.out.check(&[Format::Text, Format::Json], Format::Text)?;
            let ranking = solve_game(a.variant, &a.v)?;
            match format {
                Format::Json => a.out.emit_json(&report::ranking_json(&ranking, &a.out.distance, a.top)),
                _ => a.out.emit(&report::ranking_text(&ranking, &a.out.distance, a.top)),
            }
        }
        Command::Oracle(a) => {
            let format = a.out.check(&[Format::Text, Format::Json], Format::Text)?;
            let spec = GridStrategySpec { resolution: a.resolution, horizon: a.horizon };
            let result = brute_force_opt(a.variant, &a.v, &spec)?;
            let lp = game_value(a.variant, &a.v)?;
            if result.value < lp {
                return Err(Failure::Internal(format!("grid strategy beats the LP value: {} < {}", result.value, lp)));
            }
            match format {
                Format::Json => a.out.emit_json(&report::oracle_json(&result, &lp, &a.out.distance)),
                _ => a.out.emit(&report::oracle_text(&result, &lp, &a.out.distance)),
            }
        }
        Command::ShowStrategy(a) => {
            a.out.check(&[Format::Json], Format::Json)?;
            let assignment = match &a.id {
                Some(id) => ParameterAssignment::parse_id(id).map_err(|e| Failure::Usage(e.to_string()))?,
                None => {
                    let ranking = solve_game(a.variant, &a.v)?;
                    ranking.opt().ok_or_else(|| Failure::Internal(format!("no valid strategy at v = {}", a.v)))?.assignment
                }
            };
            let (dump, validity, lp) = report::show_strategy(&assignment, &a.v, &a.out.distance)?;
            if a.dump_lp {
                eprintln!("{lp}");
            }
            let mut value = serde_json::to_value(&dump).expect("plain data");
            value["id"] = assignment.id().into();
            value["valid"] = validity.is_valid().into();
            a.out.emit_json(&value)
        }
        Command::EvalForm(a) => {
            let format = a.out.check(&[Format::Csv, Format::Json], Format::Csv)?;
            let names = a.name.map_or_else(|| ClosedFormName::ALL.to_vec(), |n| vec![n]);
            let vs = match (a.v, a.grid) {
                (Some(v), _) => vec![v],
                (None, Some(0)) => return Err(Failure::Usage("grid needs at least one step".into())),
                (None, Some(n)) => (0..=n).map(|k| Rational::ratio(k as i64, n as i64)).collect(),
                (None, None) => return Err(Failure::Usage("give --v or --grid".into())),
            };
            if let Some(bad) = vs.iter().find(|v| v.is_negative() || **v > Rational::one()) {
                return Err(Failure::Usage(format!("v = {bad} outside [0, 1]")));
            }
            let rows = report::eval_rows(&names, &vs, &a.out.distance);
            match format {
                Format::Json => a.out.emit_json(&serde_json::to_value(&rows).expect("plain data")),
                _ => report::write_eval_csv(a.out.writer()?, &rows).map_err(io_failure),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start {n} workers");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(2)
        }
    }
}
