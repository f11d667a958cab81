use clap::Parser;

use chaincast_cli::cli::Cli;
use chaincast_cli::commands::run;

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(messages) => {
            for message in messages {
                println!("{message}");
            }
        }
        Err(error) => {
            let doc = error.to_json();
            eprintln!("{}", serde_json::to_string_pretty(&doc).unwrap());
            std::process::exit(error.exit_code());
        }
    }
}
