use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use shrinker_lab::cli::{execute, render_table, Cli};
use shrinker_lab::output::{reports_json, write};
use shrinker_lab::{UsageError, EXIT_FAIL, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let outcome = match execute(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<UsageError>().is_some();
            return ExitCode::from(if usage { EXIT_USAGE } else { EXIT_FAIL });
        }
    };
    for r in &outcome.reports {
        eprintln!("{:>9.3}s  {}", r.wall_time.as_secs_f64(), r.id);
    }
    for (path, bytes) in &outcome.artifacts {
        if let Err(e) = write(path, bytes) {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_FAIL);
        }
    }
    let mut stdout = std::io::stdout().lock();
    let printed = if outcome.reports.is_empty() {
        stdout.write_all(outcome.text.as_bytes())
    } else if outcome.json {
        match &outcome.settings {
            Some(s) => reports_json(&outcome.command, s, &outcome.reports).map_or(Ok(()), |b| stdout.write_all(&b)),
            None => Ok(()),
        }
    } else {
        stdout.write_all(render_table(&outcome.reports).as_bytes())
    };
    let _ = printed;
    eprintln!("total {:.3}s", start.elapsed().as_secs_f64());
    if outcome.failed() {
        ExitCode::from(EXIT_FAIL)
    } else {
        ExitCode::SUCCESS
    }
}
