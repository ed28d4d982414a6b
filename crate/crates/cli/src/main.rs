mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use output::Outcome;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { output::EXIT_INPUT } else { output::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(output::EXIT_INPUT);
        }
    }
    let outcome = commands::run(&cli.command);
    ExitCode::from(finish(&cli, outcome))
}

fn finish(cli: &Cli, outcome: Outcome) -> u8 {
    print!("{}", outcome.report);
    for line in &outcome.problems {
        eprintln!("{line}");
    }
    if let Some(dir) = &cli.out {
        if let Err(e) = output::write_files(dir, cli.command.name(), &outcome) {
            eprintln!("error: {e}");
            return output::EXIT_INPUT;
        }
    }
    outcome.exit
}
