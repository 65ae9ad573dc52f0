use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::CliError;

/// Light-Edge trust center simulator.
#[derive(Debug, Parser)]
#[command(name = "lightedge", version)]
struct Cli {
    /// Directory holding the credential tables, secret and activity log.
    #[arg(long, global = true, default_value = "lightedge-state")]
    state_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enrol a device and store both credential rows.
    Register {
        #[arg(long)]
        uid: String,
        #[arg(long)]
        password: String,
    },
    /// Check a device's password against the trust center table.
    Verify {
        #[arg(long)]
        uid: String,
        #[arg(long)]
        password: String,
    },
    /// Append one activity row for a registered device.
    LogAction {
        #[arg(long)]
        uid: String,
        #[arg(long)]
        sid: String,
        /// PA (positive) or NA (negative).
        #[arg(long)]
        kind: String,
        /// Action time, seconds since the epoch.
        #[arg(long)]
        time: u64,
    },
    /// Print the trust report of a device as CSV.
    Trust {
        #[arg(long)]
        uid: String,
        #[arg(long)]
        now: u64,
        #[arg(long)]
        pos_boundary: u64,
        #[arg(long)]
        neg_boundary: u64,
        /// Fuzzy system description; the built-in Light-Edge system by default.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate the fuzzy trust score for given action counts.
    FuzzyEval {
        #[arg(long, allow_negative_numbers = true)]
        pos: f64,
        #[arg(long, allow_negative_numbers = true)]
        neg: f64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a seeded registration scenario with an adversary on the bus.
    Simulate {
        #[arg(long)]
        devices: usize,
        /// none, eavesdrop, replay or tamper.
        #[arg(long, default_value = "none")]
        adversary: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Message kind the adversary acts on.
        #[arg(long, default_value = "registration")]
        target: String,
        /// Seed of the adversary's own generator; defaults to --seed.
        #[arg(long)]
        adversary_seed: Option<u64>,
        /// Transcript output file; defaults to transcript.csv in the state directory.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Emit a CSV time series of a device's trust degree.
    Trace {
        #[arg(long)]
        uid: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long)]
        step: u64,
        /// Width of the positive window in seconds.
        #[arg(long, default_value_t = 86_400)]
        pos_window: u64,
        /// Width of the negative window in seconds.
        #[arg(long, default_value_t = 604_800)]
        neg_window: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    let state = commands::State::new(cli.state_dir);
    match cli.command {
        Command::Register { uid, password } => state.register(&uid, &password),
        Command::Verify { uid, password } => state.verify(&uid, &password),
        Command::LogAction {
            uid,
            sid,
            kind,
            time,
        } => state.log_action(&uid, &sid, &kind, time),
        Command::Trust {
            uid,
            now,
            pos_boundary,
            neg_boundary,
            config,
        } => state.trust(&uid, now, pos_boundary, neg_boundary, config.as_deref()),
        Command::FuzzyEval { pos, neg, config } => {
            commands::fuzzy_eval(pos, neg, config.as_deref())
        }
        Command::Simulate {
            devices,
            adversary,
            seed,
            target,
            adversary_seed,
            transcript,
        } => state.simulate(
            devices,
            &adversary,
            seed,
            &target,
            adversary_seed,
            transcript,
        ),
        Command::Trace {
            uid,
            from,
            to,
            step,
            pos_window,
            neg_window,
            config,
        } => state.trace(
            &uid,
            from,
            to,
            step,
            pos_window,
            neg_window,
            config.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lightedge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
