//! Source front end: lexer, parser and name resolution for the Java-like
//! subset, plus directory walking.

pub mod lexer;
pub mod resolve;
pub mod syntax;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;
use walkdir::WalkDir;

use crate::model::{ClassModel, Diagnostic, Location};

pub use lexer::{tokenize, Token, TokenKind, TokenStream};
pub use resolve::build_model;
pub use syntax::{parse_unit, SyntaxUnit};

pub const DEFAULT_SUFFIX: &str = "java";

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("path does not exist: {0}")]
    NotFound(PathBuf),
    #[error("could not start {0} worker thread(s): {1}")]
    Workers(usize, String),
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// File suffix without the dot.
    pub suffix: String,
    /// Worker threads for per-file lexing and parsing.
    pub jobs: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            suffix: DEFAULT_SUFFIX.to_string(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub files: Vec<PathBuf>,
    pub model: ClassModel,
}

/// Lexes and parses one file's text.
pub fn parse_source(source: &str, file: &str) -> SyntaxUnit {
    let stream = tokenize(source, file);
    let mut unit = parse_unit(&stream.tokens);
    let mut diags = stream.diagnostics;
    diags.append(&mut unit.diagnostics);
    unit.diagnostics = diags;
    unit
}

/// Collects source files under `paths` in sorted order. Files named
/// explicitly are taken whatever their suffix.
pub fn collect_sources(paths: &[PathBuf], suffix: &str) -> Result<Vec<PathBuf>, AnalyzeError> {
    let mut files = Vec::new();
    for path in paths {
        if !path.exists() {
            return Err(AnalyzeError::NotFound(path.clone()));
        }
        if path.is_file() {
            files.push(path.clone());
            continue;
        }
        for entry in WalkDir::new(path).sort_by_file_name().into_iter().flatten() {
            if entry.file_type().is_file()
                && entry.path().extension().is_some_and(|ext| ext == suffix)
            {
                files.push(entry.into_path());
            }
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

pub fn analyze_paths(paths: &[PathBuf]) -> Result<ClassModel, AnalyzeError> {
    analyze_paths_with(paths, &AnalyzeOptions::default()).map(|c| c.model)
}

/// Walks `paths`, parses every source file (in parallel when `jobs > 1`) and
/// builds the model. The result does not depend on `jobs`.
pub fn analyze_paths_with(
    paths: &[PathBuf],
    options: &AnalyzeOptions,
) -> Result<Corpus, AnalyzeError> {
    let files = collect_sources(paths, &options.suffix)?;
    if files.is_empty() {
        let warning = Diagnostic::warning(
            Location::new(display_paths(paths), 1, 1),
            format!("no .{} files found", options.suffix),
        );
        return Ok(Corpus {
            files,
            model: ClassModel::empty().with_diagnostics(vec![warning]),
        });
    }

    let jobs = options.jobs.max(1);
    let units: Vec<Result<SyntaxUnit, Diagnostic>> = if jobs == 1 {
        files.iter().map(|f| load_unit(f)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| AnalyzeError::Workers(jobs, e.to_string()))?;
        pool.install(|| files.par_iter().map(|f| load_unit(f)).collect())
    };

    let mut parsed = Vec::new();
    let mut read_errors = Vec::new();
    for unit in units {
        match unit {
            Ok(u) => parsed.push(u),
            Err(d) => read_errors.push(d),
        }
    }
    let model = build_model(&parsed);
    let (classes, mut diags) = model.into_parts();
    diags.extend(read_errors);
    diags.sort();
    Ok(Corpus {
        files,
        model: ClassModel::new(classes, diags),
    })
}

fn load_unit(path: &Path) -> Result<SyntaxUnit, Diagnostic> {
    let name = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| {
        Diagnostic::error(
            Location::new(name.clone(), 1, 1),
            format!("cannot read file: {e}"),
        )
    })?;
    let text = String::from_utf8(bytes).map_err(|_| {
        Diagnostic::error(Location::new(name.clone(), 1, 1), "file is not valid UTF-8")
    })?;
    Ok(parse_source(&text, &name))
}

fn display_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(",")
}
