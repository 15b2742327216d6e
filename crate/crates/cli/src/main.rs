use clap::Parser;
use serde_json::json;

use morlicz_cli::{canonical, cli, commands};

fn main() {
    // Usage errors and --help exit through clap (codes 2 and 0).
    let parsed = cli::Cli::parse();
    if let Err(err) = commands::execute(parsed) {
        let structured = json!({
            "error": { "kind": err.kind_tag(), "message": err.to_string() }
        });
        println!("{}", canonical::to_canonical_string(&structured));
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
