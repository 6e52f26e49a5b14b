//! `falsilab`: command-line front end to the falsilab library.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// `-phi` is accepted as a spelling of `--phi`.
fn normalize(args: impl IntoIterator<Item = String>) -> Vec<String> {
    args.into_iter()
        .map(|a| match a.strip_prefix("-phi") {
            Some(rest) if rest.is_empty() || rest.starts_with('=') => format!("--phi{rest}"),
            _ => a,
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            output::emit(&cli, &outcome);
            ExitCode::from(if outcome.negative && (cli.fail_on_refuted || outcome.always_fail) { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = e.chain().any(|c| c.downcast_ref::<falsilab::Error>().is_some_and(falsilab::Error::is_budget));
            ExitCode::from(if budget { 3 } else { 2 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_shorthand() {
        let v = normalize(["x", "-phi", "R(x;y)", "-phi=a", "--phi", "-p"].map(String::from));
        assert_eq!(v, ["x", "--phi", "R(x;y)", "--phi=a", "--phi", "-p"]);
    }
}
