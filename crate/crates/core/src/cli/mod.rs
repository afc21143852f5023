//! The `iet-words` command line.
//!
//! Every subcommand is a [`Command`] trait object registered by name in a
//! [`Registry`]; `run` parses flags, loads the spec file when the command
//! needs one, and dispatches.
//!
//! Exit codes: 0 on success, 1 on a domain failure (violations, mismatch,
//! failed self-test), 2 on usage or parse errors.

mod commands;
pub mod spec;

use std::io::Write;
use std::path::PathBuf;

use clap::{CommandFactory, FromArgMatches, Parser};
use thiserror::Error;

pub use commands::{builtin_commands, SelfTest};
pub use spec::{parse_scalar, parse_spec, InstanceSpec};

pub const DEFAULT_LENGTH: usize = 10_000;
pub const DEFAULT_NMAX: usize = 50;
pub const DEFAULT_SEED: u64 = 0x1e7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Parse { .. } | CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Whether a command's check held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure,
}

pub struct Context {
    pub spec: Option<InstanceSpec>,
    pub length: usize,
    pub n_max: usize,
    pub seed: u64,
    pub json: bool,
}

impl Context {
    pub fn spec(&self) -> Result<&InstanceSpec, CliError> {
        self.spec.as_ref().ok_or_else(|| CliError::Usage("this command needs a spec file".into()))
    }
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn needs_spec(&self) -> bool {
        true
    }

    fn run(&self, ctx: &Context, out: &mut dyn Write) -> Result<Outcome, CliError>;
}

#[derive(Default)]
pub struct Registry {
    commands: Vec<Box<dyn Command>>,
}

impl Registry {
    pub fn builtin() -> Self {
        let mut registry = Self::default();
        for command in builtin_commands() {
            registry.register(command);
        }
        registry
    }

    /// Adds a command; a later registration replaces an earlier one with the
    /// same name.
    pub fn register(&mut self, command: Box<dyn Command>) {
        self.commands.retain(|c| c.name() != command.name());
        self.commands.push(command);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.iter().map(|c| c.name()).collect()
    }

    fn help(&self) -> String {
        let mut text = String::from("Commands:\n");
        for c in &self.commands {
            text.push_str(&format!("  {:<12} {}\n", c.name(), c.summary()));
        }
        text
    }
}

#[derive(Debug, Parser)]
#[command(name = "iet-words", about = "Exact symbolic coding of interval exchange and piecewise isometry orbits")]
struct Args {
    /// Command to run
    command: String,
    /// Instance spec (JSON)
    spec: Option<PathBuf>,
    /// Word length; overrides the spec's `length`
    #[arg(long)]
    length: Option<usize>,
    /// Largest factor length for analysis
    #[arg(long, default_value_t = DEFAULT_NMAX)]
    nmax: usize,
    /// Seed for randomized suites
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(registry: &Registry, args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cmd = Args::command().after_help(registry.help());
    let args = match cmd.try_get_matches_from(args).and_then(|m| Args::from_arg_matches(&m)) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(registry, &args, out) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Failure) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(registry: &Registry, args: &Args, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let command = registry.get(&args.command).ok_or_else(|| {
        CliError::Usage(format!("unknown command `{}`; expected one of: {}", args.command, registry.names().join(", ")))
    })?;
    let spec = match (&args.spec, command.needs_spec()) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Some(parse_spec(&text).map_err(|e| match e {
                CliError::Parse { path: p, message } => {
                    CliError::Parse { path: format!("{}#{p}", path.display()), message }
                }
                other => other,
            })?)
        }
        (None, true) => return Err(CliError::Usage(format!("`{}` needs a spec file", command.name()))),
        (None, false) => None,
    };
    let length = args.length.or(spec.as_ref().and_then(|s| s.length)).unwrap_or(DEFAULT_LENGTH);
    if length == 0 {
        return Err(CliError::Usage("--length must be at least 1".into()));
    }
    let ctx = Context { spec, length, n_max: args.nmax, seed: args.seed, json: args.json };
    command.run(&ctx, out)
}
