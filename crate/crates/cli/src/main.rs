use clap::Parser;

fn main() {
    let cli = mdp_cli::config::Cli::parse();
    std::process::exit(mdp_cli::run(cli));
}
