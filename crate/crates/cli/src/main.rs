use clap::Parser;

fn main() {
    let args = lubrimortar_cli::Args::parse();
    std::process::exit(lubrimortar_cli::run(&args));
}
