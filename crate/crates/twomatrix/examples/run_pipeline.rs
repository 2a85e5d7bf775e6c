//! Runs the four command pipelines in-process on the reference
//! configuration, writing into a directory given as the first argument
//! (default `out/pipeline`).
use std::path::PathBuf;
use twomatrix::cli::{run, Command, Config};

fn main() -> twomatrix::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/pipeline"));
    let cfg = Config { out, ..Config::reference() };
    for command in [Command::Solve, Command::Curve, Command::Kernel, Command::Universality] {
        let outcome = run(command, &cfg)?;
        println!("{command:?}: {:?} (exit {})", outcome.status, outcome.status.exit_code());
        println!("  {}", outcome.message);
        for f in &outcome.files {
            println!("  wrote {}", f.display());
        }
    }
    Ok(())
}
