use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dessin_forge_cli::{run, Cli, EXIT_INVALID};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli);
    let mut code = out.code;
    if !out.stdout.is_empty() {
        match &cli.output {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &out.stdout) {
                    eprintln!("error: writing {}: {e}", path.display());
                    code = EXIT_INVALID;
                }
            }
            None => {
                let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            }
        }
    }
    if !out.stderr.is_empty() {
        eprintln!("{}", out.stderr);
    }
    ExitCode::from(code as u8)
}
