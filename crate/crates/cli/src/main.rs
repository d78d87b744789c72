//! `chtrace` command-line front end. All work happens in `chtrace::io::run`;
//! this binary only parses arguments and moves bytes.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use chtrace::io::{run, Command, Exit, Options, ToleranceOverrides};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chtrace", version, about = "Classify, reconstruct and detect structure in SU(2,1) groups")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that every generator lies in SU(2,1).
    Validate(Common),
    /// Classify each generator and report its invariants.
    Classify(Common),
    /// Sample traces of words and test whether they are real.
    TraceField(Common),
    /// Same test on traces of cubes.
    InvariantField(Common),
    /// Normalize the first two generators from trace data.
    Normalize(Common),
    /// Conjugate the group over its trace field and certify it.
    Realize(Common),
    /// Conjugate a group with real trace field into SO(2,1).
    So21(Common),
    /// Decide R-Fuchsian or C-Fuchsian structure.
    Detect(Common),
    /// Find a loxodromic word, boosting a parabolic if needed.
    FindLox(Common),
    /// Write a built-in example group.
    Corpus {
        /// One of: sl2z, so21_hidden, known_field, single_lox, random_pair, cyclic_elliptic.
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Group file to read; standard input when absent.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Longest word enumerated.
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    eps_form: Option<f64>,
    #[arg(long)]
    eps_class: Option<f64>,
    #[arg(long)]
    eps_field: Option<f64>,
    /// Treat the group as discrete when detecting Fuchsian structure.
    #[arg(long)]
    assume_discrete: bool,
}

fn split(cmd: Cmd) -> (Command, Common, Option<String>) {
    match cmd {
        Cmd::Validate(c) => (Command::Validate, c, None),
        Cmd::Classify(c) => (Command::Classify, c, None),
        Cmd::TraceField(c) => (Command::TraceField, c, None),
        Cmd::InvariantField(c) => (Command::InvariantField, c, None),
        Cmd::Normalize(c) => (Command::Normalize, c, None),
        Cmd::Realize(c) => (Command::Realize, c, None),
        Cmd::So21(c) => (Command::So21, c, None),
        Cmd::Detect(c) => (Command::Detect, c, None),
        Cmd::FindLox(c) => (Command::FindLox, c, None),
        Cmd::Corpus { name, common } => (Command::Corpus, common, Some(name)),
    }
}

fn read_input(path: Option<&PathBuf>) -> std::io::Result<String> {
    match path {
        Some(p) => std::fs::read_to_string(p),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common, corpus_name) = split(cli.command);
    let input = if cmd == Command::Corpus {
        None
    } else {
        match read_input(common.input.as_ref()) {
            Ok(s) => Some(s),
            Err(e) => {
                eprintln!("chtrace: cannot read input: {e}");
                return ExitCode::from(Exit::Usage.code() as u8);
            }
        }
    };
    let opts = Options {
        seed: common.seed,
        max_length: common.max_length,
        tolerances: ToleranceOverrides {
            eps_form: common.eps_form,
            eps_class: common.eps_class,
            eps_field: common.eps_field,
            eps_solve: None,
        },
        assume_discrete: common.assume_discrete,
        corpus_name,
    };
    let outcome = run(cmd, input.as_deref(), &opts);
    let written = match &common.out {
        Some(p) => std::fs::write(p, &outcome.text),
        None => std::io::stdout().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("chtrace: cannot write output: {e}");
        return ExitCode::from(Exit::Usage.code() as u8);
    }
    if let Some(err) = &outcome.error {
        eprintln!("chtrace: {}: {}", err.tag, err.message);
    }
    ExitCode::from(outcome.exit.code() as u8)
}
