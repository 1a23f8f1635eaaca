use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QCHAIN_LOG", "warn")).init();
    let cli = qchain_cli::Cli::parse();
    if let Err(e) = qchain_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
