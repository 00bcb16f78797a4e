//! Binary entry point: flag parsing and exit-code discipline.
//!
//! Exit 0 on success (help and version included), 1 when the invocation is
//! wrong, 2 when the inputs or the analysis fail.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rbsim_cli::config::RunConfig;
use rbsim_cli::{commands, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "rbsim",
    version,
    about = "Randomized-benchmarking simulator and analysis harness"
)]
struct Cli {
    /// Run configuration file (TOML).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Override the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the config's output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for `run`; 0 means one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand the benchmark plan and write plan.txt.
    Generate,
    /// Execute every sequence of the plan and write records.txt.
    Run {
        /// Plan file to execute (default: <out>/plan.txt).
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Fit the decay and write report.txt, fig_each.dat, and fig_avg.dat.
    Fit {
        /// Records file to analyze (default: <out>/records.txt).
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Fit the decay and print the report without writing files.
    Report {
        /// Records file to analyze (default: <out>/records.txt).
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Run one characterization experiment and write its curve and report.
    Calibrate {
        /// ramsey-refocused | ramsey-unrefocused | spont-ratio | rabi
        /// (default: the config's [calibration] experiment).
        #[arg(long)]
        experiment: Option<String>,
    },
}

fn main() -> ExitCode {
    // Die quietly when the reader closes the pipe (`rbsim ... | head`), the
    // way other line-oriented tools do, instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let config_path = cli
        .config
        .ok_or_else(|| CliError::Usage("missing --config <file>".into()))?;
    let (config, hash) = RunConfig::load(&config_path, cli.seed, cli.out)?;
    match cli.command {
        Command::Generate => {
            let path = commands::cmd_generate(&config, &hash)?;
            println!("wrote {}", path.display());
        }
        Command::Run { plan } => {
            let path = commands::cmd_run(&config, &hash, plan, cli.jobs)?;
            println!("wrote {}", path.display());
        }
        Command::Fit { records } => {
            let (path, analysis) = commands::cmd_fit(&config, &hash, records)?;
            print!("{}", analysis.body);
            println!("wrote {}", path.display());
        }
        Command::Report { records } => {
            let analysis = commands::analyze(&config, &hash, records)?;
            print!("{}", analysis.body);
        }
        Command::Calibrate { experiment } => {
            let (written, body) =
                commands::cmd_calibrate(&config, &hash, experiment.as_deref())?;
            print!("{body}");
            for path in written {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
