//! Command line surface: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict (or a validation
//! failure), 2 usage, parse or lookup error, 3 enumeration bound exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bound::BOUND_ENV;
use crate::Result;

pub mod commands;
pub mod report;
pub mod workspace;

pub use report::{error_exit_code, InputRef, Report, Verdict};
pub use workspace::{fixture_document, Document, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Path,
    Isocomma,
}

#[derive(Debug, Parser)]
#[command(
    name = "descente",
    version,
    about = "Descent data, stacks and local fibrations over finite sites"
)]
pub struct Cli {
    /// Workspace documents to load (repeatable)
    #[arg(long = "workspace", short = 'w', value_name = "FILE", global = true)]
    pub workspace: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Enumeration bound; overrides DESCENTE_BOUND
    #[arg(long, value_name = "N", global = true)]
    pub bound: Option<u64>,
    /// Write the constructed entities as a workspace document
    #[arg(long, value_name = "FILE", global = true)]
    pub emit: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate the workspace
    Validate,
    /// Decide a property of a pseudofunctor or map
    Check {
        #[command(subcommand)]
        what: Check,
    },
    /// Build the descent category of a map over covers of an object
    Desc {
        map: String,
        #[arg(long)]
        object: String,
        /// Cover members as arrow ids; give the flag without values for the
        /// empty cover. Default: every basis family of the object.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        cover: Option<Vec<String>>,
    },
    /// Solve the lifting problems from one map to another
    Lift {
        f: String,
        g: String,
        #[arg(long, required_unless_present = "construct", conflicts_with = "construct")]
        search: bool,
        #[arg(long)]
        construct: bool,
        /// Only the square at this position
        #[arg(long)]
        square: Option<usize>,
    },
    /// Factor a map as a local weak equivalence followed by a local fibration
    Factorize {
        map: String,
        #[arg(long, value_enum, default_value_t = Method::Path)]
        method: Method,
    },
    /// The associated stack of a prestack
    Stackify { pseudofunctor: String },
    /// The isocomma object of two maps with a common target
    Isocomma { f: String, g: String },
    /// Hom-categories between the stacks of a corpus, replacing non-stacks
    /// by their stackification
    Hocat {
        #[arg(required = true)]
        pseudofunctors: Vec<String>,
    },
    /// Run the law suites over the built-in fixture corpus
    Laws {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Print the canonical document of a loaded site
    Export { site: String },
    /// Print the built-in fixture document of a reference site
    Fixture { site: String },
}

#[derive(Debug, Subcommand)]
pub enum Check {
    Prestack { pseudofunctor: String },
    Stack { pseudofunctor: String },
    LocalFib { map: String },
    Lwe { map: String },
    Fibrant { pseudofunctor: String },
}

/// What a command produced.
pub enum Output {
    Report(Report),
    Document(Box<Document>),
}

/// Parses `args`, runs the command and returns the exit code. Reports go to
/// `out`; text-mode errors go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    if let Some(b) = cli.bound {
        // read once by the library on first use
        std::env::set_var(BOUND_ENV, b.to_string());
    }
    let started = Instant::now();
    match execute(&cli) {
        Ok(Output::Report(mut r)) => {
            r.elapsed = Some(started.elapsed());
            let text = match cli.format {
                Format::Text => r.to_text(),
                Format::Json => r.to_json(),
            };
            let _ = out.write_all(text.as_bytes());
            r.verdict.exit_code()
        }
        Ok(Output::Document(d)) => {
            let _ = out.write_all(d.to_canonical_string().as_bytes());
            0
        }
        Err(e) => {
            match cli.format {
                Format::Text => {
                    let _ = writeln!(err, "error: {e}");
                }
                Format::Json => {
                    let _ = out.write_all(report::error_json(&e).as_bytes());
                }
            }
            error_exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Laws { suite } => return commands::laws(suite).map(Output::Report),
        Command::Fixture { site } => return fixture_document(site).map(|d| Output::Document(Box::new(d))),
        _ => {}
    }
    if cli.workspace.is_empty() {
        return Err(crate::Error::UnknownEntity("workspace (pass --workspace FILE)".into()));
    }
    let ws = Workspace::load(&cli.workspace)?;
    let (report, emitted) = match &cli.command {
        Command::Validate => (commands::validate(&ws), None),
        Command::Check { what } => (commands::check(&ws, what)?, None),
        Command::Desc { map, object, cover } => (commands::desc(&ws, map, object, cover.as_deref())?, None),
        Command::Lift {
            f,
            g,
            construct,
            square,
            ..
        } => (commands::lift(&ws, f, g, *construct, *square)?, None),
        Command::Factorize { map, method } => commands::factorize(&ws, map, *method, cli.emit.is_some())?,
        Command::Stackify { pseudofunctor } => commands::stackify(&ws, pseudofunctor, cli.emit.is_some())?,
        Command::Isocomma { f, g } => commands::isocomma(&ws, f, g, cli.emit.is_some())?,
        Command::Hocat { pseudofunctors } => (commands::hocat(&ws, pseudofunctors)?, None),
        Command::Export { site } => return ws.document(site).map(|d| Output::Document(Box::new(d))),
        Command::Laws { .. } | Command::Fixture { .. } => unreachable!("handled above"),
    };
    if let (Some(path), Some(doc)) = (&cli.emit, emitted) {
        std::fs::write(path, doc.to_canonical_string())?;
    }
    Ok(Output::Report(report))
}
