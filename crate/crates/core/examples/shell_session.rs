//! Driving the command interpreter from code, as the `filtc2` binary does.

use clap::Parser;
use filtc2::shell::{run, Cli};

fn main() {
    let sessions: [&[&str]; 5] = [
        &["filtc2", "decompose", "E(1,0) * E(2,1)"],
        &["filtc2", "support", "fund0", "--trace"],
        &["filtc2", "classify", "T + E(0,0)"],
        &["filtc2", "--format", "json-like", "hom", "1", "1(2)"],
        &["filtc2", "atlas", "DATM2", "--closed-count"],
    ];
    for args in sessions {
        let cli = Cli::parse_from(args.iter().copied());
        println!("$ {}", args[1..].join(" "));
        match run(&cli) {
            Ok(report) => println!("{}", report.render(cli.format, cli.trace)),
            Err(e) => println!("error: {e}"),
        }
    }
}
