use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use entrate_cli::cli::Cli;
use entrate_cli::report::RunReport;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not failures
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let outcome = cli.command.run();
    let elapsed_seconds = start.elapsed().as_secs_f64();

    let (report, text) = match outcome {
        Ok(out) => (
            RunReport {
                command: cli.command.name().to_string(),
                args: args[1..].to_vec(),
                input_digest: out.input_digest,
                exit_code: out.exit_code,
                elapsed_seconds,
                result: Some(out.result),
                error: None,
            },
            Some(out.text),
        ),
        Err(e) => {
            eprintln!("error: {e}");
            (
                RunReport {
                    command: cli.command.name().to_string(),
                    args: args[1..].to_vec(),
                    input_digest: String::new(),
                    exit_code: e.exit_code(),
                    elapsed_seconds,
                    result: None,
                    error: Some(e.to_string()),
                },
                None,
            )
        }
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
    } else if let Some(text) = text {
        print!("{text}");
    }
    ExitCode::from(report.exit_code)
}
