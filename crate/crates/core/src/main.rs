use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use xorproof::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut buf: Vec<u8> = Vec::new();
    let result = run(cli, &mut buf);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(&buf);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
