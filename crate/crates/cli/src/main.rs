use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use junta_cli::cmd::{self, Output};
use junta_cli::{check_rate, CliError, Constants};

#[derive(Parser, Debug)]
#[command(name = "junta", version, about = "Seeded experiments for learning junta distributions")]
struct Cli {
    /// Constants file (plain or a calibration report). Falls back to
    /// $JUNTA_CONFIG, then to the shipped calibration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the JSON-lines transcript of a reduction here.
    #[arg(long, global = true)]
    transcript: Option<PathBuf>,
    /// Exit with status 3 when the success rate falls below --min-rate.
    #[arg(long, global = true)]
    assert: bool,
    #[arg(long, global = true, default_value_t = 0.9)]
    min_rate: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a planted distribution as a spec file.
    Gen(cmd::gen::GenConfig),
    /// Learn planted juntas and score each trial.
    Learn(cmd::learn::LearnConfig),
    /// Run the tolerant identity tester against a uniform reference.
    Test(cmd::test::TestConfig),
    /// Run one of the parity reductions end to end.
    Reduce {
        #[command(subcommand)]
        which: cmd::reduce::ReduceCommand,
    },
    /// Fit the tester, Fourier and learner constants.
    Calibrate(cmd::calibrate::CalibrateConfig),
    /// Sweep the minimal sample size over a grid.
    Bench(cmd::bench::BenchConfig),
}

fn write(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let consts = Constants::load(cli.config.as_deref())?;
    let out: Output = match &cli.command {
        Command::Gen(c) => cmd::gen::run(c)?,
        Command::Learn(c) => cmd::learn::run(c, &consts)?,
        Command::Test(c) => cmd::test::run(c, &consts)?,
        Command::Reduce { which } => cmd::reduce::run(which, &consts)?,
        Command::Calibrate(c) => cmd::calibrate::run(c, &consts)?,
        Command::Bench(c) => cmd::bench::run(c, &consts)?,
    };
    write(cli.out.as_ref(), &out.text)?;
    if let (Some(path), Some(t)) = (&cli.transcript, &out.transcript) {
        std::fs::write(path, t)?;
    }
    match (cli.assert, out.rate) {
        (true, Some(rate)) => check_rate(rate, cli.min_rate),
        _ => Ok(()),
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
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("junta: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("junta: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
