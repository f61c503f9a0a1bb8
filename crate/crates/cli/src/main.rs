use std::io::Write;

use clap::Parser;
use zpreal_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    let code = match zpreal_cli::run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    };
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
