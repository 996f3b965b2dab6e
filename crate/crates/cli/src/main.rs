use clap::Parser;

use bsac_cli::{configure_threads, run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = if cli.command.common().verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = configure_threads().and_then(|()| run(&cli)) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
