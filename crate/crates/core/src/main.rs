use std::process::ExitCode;

use clap::Parser;

use online_fw::cli::{default_output, resolve, run_seeds, seed_output_path, Cli, Command, FileConfig, RunArgs};
use online_fw::Error;

fn run_command(args: &RunArgs) -> Result<(), Error> {
    let file = args.config.as_deref().map(FileConfig::load).transpose()?;
    let cfg = resolve(args, file)?;
    let base = cfg.out.clone().unwrap_or_else(|| default_output(&cfg));
    let seeds = args.seeds.max(1);
    let mut failed = None;
    for report in run_seeds(&cfg, seeds, args.jobs) {
        match report {
            Ok(report) => {
                let path = if seeds == 1 {
                    base.clone()
                } else {
                    seed_output_path(&base, report.config.seed)
                };
                report.write(&path)?;
                let last = report.ledger.rows().last().map_or(0.0, |r| r.cum_regret);
                println!(
                    "{}: seed {} regret {:.6} ({} gradient queries, {:.2}s)",
                    path.display(),
                    report.config.seed,
                    last,
                    report.grad_queries,
                    report.seconds
                );
            }
            Err(e) => failed = Some(e),
        }
    }
    failed.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run_command(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
