use std::io::Write;

use serde_json::{json, Value};

use crate::args::Cli;

/// What a command produced.
pub struct Outcome {
    pub command: &'static str,
    pub result: Value,
    pub text: String,
    /// Refuted, not a Fraïssé class, a failed check, ...
    pub negative: bool,
    /// Exit with 1 on a negative verdict even without `--fail-on-refuted`.
    pub always_fail: bool,
}

impl Outcome {
    pub fn new(command: &'static str, result: Value, text: String) -> Outcome {
        Outcome { command, result, text, negative: false, always_fail: false }
    }

    pub fn negative(mut self, negative: bool) -> Outcome {
        self.negative = negative;
        self
    }
}

/// Write errors (a closed pipe) are ignored.
pub fn emit(cli: &Cli, outcome: &Outcome) {
    let mut out = std::io::stdout().lock();
    let _ = if cli.json {
        let doc = json!({ "command": outcome.command, "seed": cli.seed, "result": outcome.result });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))
    } else if outcome.text.ends_with('\n') {
        write!(out, "{}", outcome.text)
    } else {
        writeln!(out, "{}", outcome.text)
    };
}
