use std::io::Write;
use std::process::ExitCode;
use tailclass_cli::{parse_config, render, run, UsageError, EXIT_INTERNAL};

fn main() -> ExitCode {
    let config = match parse_config(std::env::args().skip(1)) {
        Ok(c) => c,
        Err(e @ UsageError::Info(_)) => {
            print!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
        Err(e) => {
            eprint!("{e}");
            if !e.to_string().ends_with('\n') {
                eprintln!();
            }
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = run(&config).and_then(|report| {
        let text = render(&report)?;
        match &config.output_path {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(report.exit_code())
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INTERNAL as u8)
        }
    }
}
