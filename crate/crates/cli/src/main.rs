//! `ervl` command-line front end.
//!
//! Exit status: 0 when every asserted certificate passes, 1 when one fails,
//! 2 on usage or configuration errors.

mod commands;
mod config;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::{Cli, Command, RunConfig};
use output::Sink;

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = RunConfig::resolve(&cli.opts)?;
    let start = Instant::now();
    let mut sink = Sink::new(&cfg.out)?;
    let outcome = match cli.command {
        Command::VerifyAppendix => commands::verify_appendix(&cfg, &mut sink)?,
        Command::Density => commands::density(&cfg, &mut sink)?,
        Command::Fields => commands::fields(&cfg, &mut sink)?,
        Command::Reversal => commands::reversal(&cfg, &mut sink)?,
        Command::All => commands::all(&cfg, &mut sink)?,
    };
    let passed = outcome.passed();
    for c in outcome.failures() {
        let x = c.x.as_deref().map(|x| format!(" x={x}")).unwrap_or_default();
        eprintln!("FAIL {} n={}{}: {}", c.identity, c.n, x, c.notes.join("; "));
    }
    output::write_sidecar(&cfg.out, cli.command.name(), start.elapsed().as_millis(), passed, sink.written())?;
    println!(
        "{}: {} certificates, {} written to {}",
        if passed { "ok" } else { "FAILED" },
        outcome.certificates.len(),
        sink.written().len(),
        cfg.out.display()
    );
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
