mod args;
mod commands;
mod error;

use clap::{CommandFactory, FromArgMatches};

use crate::args::Cli;
use crate::error::CliError;

fn version() -> String {
    format!("{} (schema {})", linemask::TOOL_VERSION, linemask::SCHEMA_VERSION)
}

/// Prints one JSON object describing the failure on stderr.
fn report(err: &CliError) {
    let mut line = serde_json::json!({
        "error": err.kind(),
        "message": err.to_string(),
        "exit_code": err.exit_code(),
    });
    if let Some(path) = err.path() {
        line["path"] = serde_json::json!(path);
    }
    eprintln!("{line}");
}

fn main() {
    let matches = match Cli::command().version(version()).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let rendered = e.render().to_string();
            report(&CliError::Usage(rendered.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string()));
            let _ = e.print();
            std::process::exit(2);
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches come from the same definition");

    let result = commands::load_config(cli.config.as_deref()).and_then(|cfg| commands::run(cli.command, cfg));
    if let Err(e) = result {
        report(&e);
        std::process::exit(e.exit_code());
    }
}
