//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a `fail` verdict fired, 2 usage or configuration
//! error, 3 input parse errors left no classes.

use std::ffi::OsString;
use std::fs;
use std::io::{self, IsTerminal, Read, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::gen::{generate, GenSpec};
use crate::metrics::{compute_all_with, MetricsOptions};
use crate::model::{export_model, import_model, ClassModel, ModelError};
use crate::parser::{analyze_paths_with, AnalyzeOptions, DEFAULT_SUFFIX};
use crate::report::{parse_rules, render_with, AnalysisReport, ColorMode, Format, ReportOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ckm",
    version,
    about = "Coupling and cohesion metrics for a Java-like source subset"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse sources and report metrics.
    Analyze(AnalyzeArgs),
    /// Emit a seeded synthetic model document.
    Generate(GenerateArgs),
    /// Compute metrics for a model document (`-` reads standard input).
    MetricsFromModel(FromModelArgs),
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Output format: table, json or csv.
    #[arg(long, default_value = "table")]
    pub format: Format,
    /// JSON threshold rules file.
    #[arg(long, value_name = "FILE")]
    pub rules: Option<PathBuf>,
    /// Include the Spearman correlation matrix.
    #[arg(long)]
    pub correlate: bool,
    /// Leave constructors out of LCOM, RFC and method counts.
    #[arg(long)]
    pub no_constructors: bool,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Source files or directories.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[command(flatten)]
    pub report: ReportArgs,
    /// Also write the class model document to FILE.
    #[arg(long, value_name = "FILE")]
    pub export_model: Option<PathBuf>,
    /// Parser worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Source file suffix used when walking directories.
    #[arg(long, default_value = DEFAULT_SUFFIX)]
    pub suffix: String,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub classes: usize,
    #[arg(long, default_value_t = 1)]
    pub packages: usize,
    #[arg(long, default_value_t = 5)]
    pub max_methods: usize,
    #[arg(long, default_value_t = 4)]
    pub max_fields: usize,
    #[arg(long, default_value_t = 0.3)]
    pub inheritance_prob: f64,
    #[arg(long, default_value_t = 0.3)]
    pub call_prob: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sharing: f64,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FromModelArgs {
    /// Model document path, or `-` for standard input.
    pub model: String,
    #[command(flatten)]
    pub report: ReportArgs,
}

/// A failure carrying its exit code; the message goes to standard error.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    /// Whether standard output is a terminal, for `CKM_COLOR=auto`.
    pub stdout_is_terminal: bool,
}

/// Runs against the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let is_terminal = stdout.is_terminal();
    let mut io = Io {
        stdin: &mut io::stdin().lock(),
        stdout: &mut stdout.lock(),
        stderr: &mut io::stderr().lock(),
        stdout_is_terminal: is_terminal,
    };
    run_with(argv, &mut io)
}

pub fn run_with<I, T>(argv: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = io.stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = io.stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => analyze(args, io),
        Command::Generate(args) => generate_cmd(args, io),
        Command::MetricsFromModel(args) => from_model(args, io),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(io.stderr, "ckm: {}", failure.message);
            failure.code
        }
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| Failure::usage(format!("cannot write output: {e}"))),
    }
}

fn emit_report(
    model: &ClassModel,
    files: usize,
    args: &ReportArgs,
    io: &mut Io<'_>,
) -> Result<i32, Failure> {
    let rules = match &args.rules {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::usage(format!("cannot read rules {}: {e}", path.display()))
            })?;
            parse_rules(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
        None => Vec::new(),
    };
    let color = if args.format == Format::Table && args.out.is_none() {
        ColorMode::from_env()
            .map_err(Failure::usage)?
            .enabled(io.stdout_is_terminal)
    } else {
        false
    };
    let options = MetricsOptions {
        include_constructors: !args.no_constructors,
    };
    let rows = compute_all_with(model, options).map_err(|e| Failure::usage(e.to_string()))?;
    let report = AnalysisReport::build(
        model,
        rows,
        &ReportOptions {
            files,
            rules,
            correlate: args.correlate,
        },
    )
    .map_err(|e| Failure::usage(e.to_string()))?;

    for diag in &report.diagnostics {
        let _ = writeln!(io.stderr, "{diag}");
    }
    write_output(
        args.out.as_deref(),
        &render_with(&report, args.format, color),
        io.stdout,
    )?;
    Ok(if report.has_failure() {
        EXIT_FAIL_VERDICT
    } else {
        EXIT_OK
    })
}

fn analyze(args: AnalyzeArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let options = AnalyzeOptions {
        suffix: args.suffix.clone(),
        jobs: usize::from(args.jobs),
    };
    let corpus =
        analyze_paths_with(&args.paths, &options).map_err(|e| Failure::usage(e.to_string()))?;
    let model = corpus.model;
    let has_errors = model.diagnostics().iter().any(|d| d.is_error());
    if has_errors && model.internal_classes().next().is_none() {
        for diag in model.diagnostics() {
            let _ = writeln!(io.stderr, "{diag}");
        }
        return Err(Failure {
            code: EXIT_PARSE,
            message: "no classes could be recovered from the input".into(),
        });
    }
    if let Some(path) = &args.export_model {
        let doc = export_model(&model)
            .map_err(|e| Failure::usage(format!("cannot export model: {e}")))?;
        fs::write(path, doc)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    emit_report(&model, corpus.files.len(), &args.report, io)
}

fn generate_cmd(args: GenerateArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let spec = GenSpec {
        seed: args.seed,
        n_classes: args.classes,
        n_packages: args.packages,
        max_methods: args.max_methods,
        max_fields: args.max_fields,
        inheritance_prob: args.inheritance_prob,
        cross_class_call_prob: args.call_prob,
        attribute_sharing: args.sharing,
    };
    let model = generate(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    let doc = export_model(&model).map_err(|e| Failure::usage(e.to_string()))?;
    write_output(args.out.as_deref(), &doc, io.stdout)?;
    Ok(EXIT_OK)
}

fn from_model(args: FromModelArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let text = if args.model == "-" {
        let mut text = Vec::new();
        io.stdin
            .read_to_end(&mut text)
            .map_err(|e| Failure::usage(format!("cannot read standard input: {e}")))?;
        text
    } else {
        fs::read(&args.model)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.model)))?
    };
    let model = import_model(&text).map_err(|e| Failure {
        code: if matches!(e, ModelError::Parse { .. }) {
            EXIT_PARSE
        } else {
            EXIT_USAGE
        },
        message: format!("{}: {e}", args.model),
    })?;
    emit_report(&model, 0, &args.report, io)
}
