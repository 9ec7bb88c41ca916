mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, JobSpec, DEFAULT_SEED};
use commands::{run, Ctx, Status};

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SUBLORENTZ_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SUBLORENTZ_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn load_job(path: &std::path::Path) -> Result<JobSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid job {}: {e}", path.display()))
}

fn execute(cli: Cli) -> Result<Status, String> {
    configure_threads()?;
    if let Command::Run { job } = &cli.command {
        let job_spec = load_job(job)?;
        let ctx = Ctx {
            output: cli.output.as_deref().or(job_spec.output.as_deref()),
            format: cli.format.or(job_spec.format),
            seed: cli.seed.or(job_spec.seed).unwrap_or(DEFAULT_SEED),
        };
        return run(&job_spec.command, &ctx);
    }
    let ctx = Ctx {
        output: cli.output.as_deref(),
        format: cli.format,
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
    };
    run(&cli.command, &ctx)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
