use clap::Parser;

fn main() {
    let cli = dtml_cli::cli::Cli::parse();
    let code = dtml_cli::cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
