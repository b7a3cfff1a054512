use clap::Parser;
use hardy_leray::cli::{failure_summary, run, Cli, Failure};
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let name = cli.command.name();
    let output = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            log::error!("{e}");
            let f = Failure { row: String::new(), check: e.to_string(), value: f64::NAN, threshold: f64::NAN };
            eprintln!("{}", failure_summary(name, &[f]));
            return ExitCode::FAILURE;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &output.csv),
        None => {
            print!("{}", output.csv);
            Ok(())
        }
    };
    if let Err(e) = written {
        log::error!("cannot write output: {e}");
        return ExitCode::FAILURE;
    }
    if output.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{}", failure_summary(name, &output.failures));
        ExitCode::FAILURE
    }
}
