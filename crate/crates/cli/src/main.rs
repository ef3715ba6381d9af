use clap::Parser;
use gpp_cli::{error_name, exit_code, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    if let Err(err) = run(cli, &mut stdout.lock()) {
        let name = error_name(&err);
        let message = format!("{err:#}");
        if message.starts_with(name) {
            eprintln!("error: {message}");
        } else {
            eprintln!("error: {name}: {message}");
        }
        std::process::exit(exit_code(&err));
    }
}
