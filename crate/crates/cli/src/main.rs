use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BROWSELAB_LOG", "error"))
        .init();
    std::process::exit(browselab_cli::run(browselab_cli::Cli::parse()));
}
