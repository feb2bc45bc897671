mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match cli.command {
        Command::Replay(replay) => {
            let text = std::fs::read_to_string(&replay.config)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", replay.config.display()))?;
            let mut config: RunConfig = serde_json::from_str(&text)
                .map_err(|e| anyhow::anyhow!("{} is not a run configuration: {e}", replay.config.display()))?;
            if cli.run.threads.is_some() {
                config.run.threads = cli.run.threads;
            }
            config
        }
        command => RunConfig { run: cli.run, command },
    };
    if let Some(path) = &cli.save_config {
        std::fs::write(path, serde_json::to_string_pretty(&config)? + "\n")
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(threads) = config.run.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    commands::execute(&config)
}
