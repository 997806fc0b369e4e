//! Corpus reports: rows, package rollups, rank correlations, threshold
//! verdicts, and their table, JSON and CSV renderings.

mod rules;
mod stats;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{Metric, MetricsEngine, MetricsError, MetricsRow};
use crate::model::{package_label, ClassModel, Diagnostic, Location};

pub use rules::{
    check_rules, evaluate_thresholds, has_failure, parse_rules, Comparator, RuleSeverity,
    RulesError, ThresholdRule, Verdict,
};
pub use stats::{average_ranks, correlate, spearman, Correlation, CorrelationMatrix, StatsError};

pub const REPORT_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 10] = [
    "class", "ce", "ca", "dit", "cbo", "rfc", "lcom1", "lcom2", "lcom3", "lcom4",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Rules(#[from] RulesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratedFrom {
    pub files: usize,
    pub classes: usize,
    pub packages: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub max: usize,
}

impl Summary {
    /// `None` for an empty sample.
    pub fn of(values: &[usize]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
        };
        Some(Self {
            mean: sorted.iter().sum::<usize>() as f64 / n as f64,
            median,
            max: sorted[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackageRollup {
    pub classes: usize,
    pub ce: usize,
    pub ca: usize,
    pub metrics: BTreeMap<Metric, Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub version: u32,
    pub generated_from: GeneratedFrom,
    pub rows: Vec<MetricsRow>,
    /// Keyed by package name, `(default)` for the unnamed package.
    pub package_rollups: BTreeMap<String, PackageRollup>,
    /// Present only when correlation was requested and at least two rows exist.
    pub correlations: Option<CorrelationMatrix>,
    pub verdicts: Vec<Verdict>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    /// Number of source files behind the model; 0 for imported models.
    pub files: usize,
    pub rules: Vec<ThresholdRule>,
    pub correlate: bool,
}

impl AnalysisReport {
    /// Assembles a report from rows computed over `model`.
    pub fn build(
        model: &ClassModel,
        rows: Vec<MetricsRow>,
        options: &ReportOptions,
    ) -> Result<Self, ReportError> {
        let verdicts = evaluate_thresholds(&rows, &options.rules)?;
        let mut diagnostics = model.diagnostics().to_vec();

        let engine = MetricsEngine::new(model);
        let mut package_rollups = BTreeMap::new();
        for package in model.packages() {
            let members: Vec<&MetricsRow> = rows
                .iter()
                .filter(|r| {
                    model
                        .class(&r.class_fqn)
                        .is_some_and(|c| &c.package == package)
                })
                .collect();
            let (ce, ca) = engine.package_coupling(package)?;
            let metrics = Metric::ALL
                .into_iter()
                .filter_map(|m| {
                    let values: Vec<usize> = members.iter().map(|r| r.get(m)).collect();
                    Summary::of(&values).map(|s| (m, s))
                })
                .collect();
            package_rollups.insert(
                package_label(package).to_string(),
                PackageRollup {
                    classes: members.len(),
                    ce,
                    ca,
                    metrics,
                },
            );
        }

        let correlations = if options.correlate {
            match correlate(&rows) {
                Ok(matrix) => Some(matrix),
                Err(err) => {
                    diagnostics.push(Diagnostic::warning(
                        Location::model(),
                        format!("correlation skipped: {err}"),
                    ));
                    None
                }
            }
        } else {
            None
        };

        Ok(Self {
            version: REPORT_VERSION,
            generated_from: GeneratedFrom {
                files: options.files,
                classes: rows.len(),
                packages: model.packages().len(),
            },
            rows,
            package_rollups,
            correlations,
            verdicts,
            diagnostics,
        })
    }

    pub fn has_failure(&self) -> bool {
        has_failure(&self.verdicts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!(
                "unknown format `{other}` (expected table, json or csv)"
            )),
        }
    }
}

/// `CKM_COLOR` setting for table output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorMode {
    #[default]
    Auto,
    Always,
    Never,
}

impl ColorMode {
    pub const ENV_VAR: &'static str = "CKM_COLOR";

    /// Reads `CKM_COLOR`; unset or empty means auto.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) if !v.is_empty() => v.parse(),
            _ => Ok(ColorMode::Auto),
        }
    }

    pub fn enabled(self, is_terminal: bool) -> bool {
        match self {
            ColorMode::Auto => is_terminal,
            ColorMode::Always => true,
            ColorMode::Never => false,
        }
    }
}

impl FromStr for ColorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(ColorMode::Auto),
            "always" => Ok(ColorMode::Always),
            "never" => Ok(ColorMode::Never),
            other => Err(format!(
                "{}: unknown value `{other}` (expected auto, always or never)",
                Self::ENV_VAR
            )),
        }
    }
}

/// Renders without color.
pub fn render(report: &AnalysisReport, format: Format) -> Vec<u8> {
    render_with(report, format, false)
}

pub fn render_with(report: &AnalysisReport, format: Format, color: bool) -> Vec<u8> {
    match format {
        Format::Json => render_json(report),
        Format::Csv => render_csv(report),
        Format::Table => render_table(report, color).into_bytes(),
    }
}

fn render_json(report: &AnalysisReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
    out.push(b'\n');
    out
}

fn render_csv(report: &AnalysisReport) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("write to memory");
    for row in &report.rows {
        let mut record = vec![row.class_fqn.clone()];
        record.extend(Metric::ALL.iter().map(|m| row.get(*m).to_string()));
        writer.write_record(&record).expect("write to memory");
    }
    writer.into_inner().expect("flush to memory")
}

struct Style {
    color: bool,
}

impl Style {
    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

/// Left-aligns the first column and right-aligns the rest.
fn aligned(out: &mut String, style: &Style, header: &[String], body: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        let mut text = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(text, "{cell:<w$}");
            } else {
                let _ = write!(text, "  {cell:>w$}");
            }
        }
        text
    };
    let _ = writeln!(out, "{}", style.paint("1", &line(header)));
    for row in body {
        let _ = writeln!(out, "{}", line(row));
    }
}

fn render_table(report: &AnalysisReport, color: bool) -> String {
    let style = Style { color };
    let mut out = String::new();

    let header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
    let body: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![row.class_fqn.clone()];
            cells.extend(Metric::ALL.iter().map(|m| row.get(*m).to_string()));
            cells
        })
        .collect();
    aligned(&mut out, &style, &header, &body);
    let g = report.generated_from;
    let _ = writeln!(
        out,
        "\n{} classes, {} packages, {} files",
        g.classes, g.packages, g.files
    );

    if !report.package_rollups.is_empty() {
        out.push('\n');
        let header: Vec<String> = ["package", "classes", "ce", "ca", "mean lcom2", "max lcom2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let body: Vec<Vec<String>> = report
            .package_rollups
            .iter()
            .map(|(name, rollup)| {
                let lcom2 = rollup.metrics.get(&Metric::Lcom2);
                vec![
                    name.clone(),
                    rollup.classes.to_string(),
                    rollup.ce.to_string(),
                    rollup.ca.to_string(),
                    lcom2.map_or("-".into(), |s| format!("{:.2}", s.mean)),
                    lcom2.map_or("-".into(), |s| s.max.to_string()),
                ]
            })
            .collect();
        aligned(&mut out, &style, &header, &body);
    }

    if let Some(matrix) = &report.correlations {
        let _ = writeln!(out, "\nSpearman rank correlation (- = undefined)");
        let mut header = vec![String::new()];
        header.extend(Metric::ALL.iter().map(|m| m.to_string()));
        let body: Vec<Vec<String>> = Metric::ALL
            .iter()
            .map(|a| {
                let mut cells = vec![a.to_string()];
                cells.extend(
                    Metric::ALL
                        .iter()
                        .map(|b| matrix.rho(*a, *b).map_or("-".into(), |r| format!("{r:.2}"))),
                );
                cells
            })
            .collect();
        aligned(&mut out, &style, &header, &body);
    }

    if !report.verdicts.is_empty() {
        out.push('\n');
        for v in &report.verdicts {
            let tag = match v.severity {
                RuleSeverity::Fail => style.paint("31", "FAIL"),
                RuleSeverity::Warn => style.paint("33", "WARN"),
            };
            let _ = writeln!(out, "{tag} {}: {} (actual {})", v.class, v.rule, v.actual);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::compute_all;
    use crate::model::{ClassInfo, ClassKind, FieldInfo, MethodInfo};

    fn sample() -> ClassModel {
        ClassModel::new(
            vec![
                ClassInfo::new("p.A", ClassKind::Class)
                    .with_field(FieldInfo::new("b", "q.B"))
                    .with_field(FieldInfo::new("x", "int"))
                    .with_method(MethodInfo::new("f", vec![], "void").with_uses(["x"]))
                    .with_method(MethodInfo::new("g", vec![], "void")),
                ClassInfo::new("q.B", ClassKind::Class),
                ClassInfo::new("Main", ClassKind::Class).with_field(FieldInfo::new("a", "p.A")),
            ],
            vec![],
        )
    }

    fn report(options: &ReportOptions) -> AnalysisReport {
        let model = sample();
        let rows = compute_all(&model).unwrap();
        AnalysisReport::build(&model, rows, options).unwrap()
    }

    #[test]
    fn empty_report_csv_is_header_only() {
        let model = ClassModel::empty();
        let r = AnalysisReport::build(&model, vec![], &ReportOptions::default()).unwrap();
        assert_eq!(
            render(&r, Format::Csv),
            b"class,ce,ca,dit,cbo,rfc,lcom1,lcom2,lcom3,lcom4\n"
        );
    }

    #[test]
    fn csv_quotes_per_rfc4180() {
        let mut r = report(&ReportOptions::default());
        r.rows[0].class_fqn = "odd,\"name\"".into();
        let text = String::from_utf8(render(&r, Format::Csv)).unwrap();
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("\"odd,\"\"name\"\"\","));
    }

    #[test]
    fn rollups_use_default_label() {
        let r = report(&ReportOptions::default());
        assert_eq!(
            r.package_rollups.keys().collect::<Vec<_>>(),
            ["(default)", "p", "q"]
        );
        let p = &r.package_rollups["p"];
        assert_eq!((p.classes, p.ce, p.ca), (1, 1, 1));
        assert_eq!(p.metrics[&Metric::Lcom1].max, 1);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let r = report(&ReportOptions {
            files: 3,
            correlate: true,
            rules: parse_rules(r#"[{"metric":"ce","op":">=","limit":1,"severity":"warn"}]"#)
                .unwrap(),
        });
        let bytes = render(&r, Format::Json);
        let back: AnalysisReport = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(render(&back, Format::Json), bytes);
        assert_eq!(r.verdicts.len(), 2);
        assert!(!r.has_failure());
        // Undefined cells appear as null.
        assert!(String::from_utf8(bytes).unwrap().contains("\"rho\": null"));
    }

    #[test]
    fn rendering_is_deterministic_and_color_optional() {
        let r = report(&ReportOptions {
            correlate: true,
            ..ReportOptions::default()
        });
        for f in [Format::Table, Format::Json, Format::Csv] {
            assert_eq!(render(&r, f), render(&r, f));
        }
        let plain = String::from_utf8(render(&r, Format::Table)).unwrap();
        assert!(!plain.contains('\x1b'));
        assert!(plain.contains("Spearman"));
        let colored = String::from_utf8(render_with(&r, Format::Table, true)).unwrap();
        assert!(colored.contains("\x1b[1m"));
    }

    #[test]
    fn correlation_with_one_row_is_skipped_with_warning() {
        let model = ClassModel::new(vec![ClassInfo::new("A", ClassKind::Class)], vec![]);
        let rows = compute_all(&model).unwrap();
        let r = AnalysisReport::build(
            &model,
            rows,
            &ReportOptions {
                correlate: true,
                ..ReportOptions::default()
            },
        )
        .unwrap();
        assert!(r.correlations.is_none());
        assert_eq!(r.diagnostics.len(), 1);
    }

    #[test]
    fn summary_median() {
        let s = Summary::of(&[4, 1, 3, 2]).unwrap();
        assert_eq!((s.mean, s.median, s.max), (2.5, 2.5, 4));
        assert_eq!(Summary::of(&[5, 1, 3]).unwrap().median, 3.0);
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn color_mode_parsing() {
        assert_eq!("always".parse::<ColorMode>(), Ok(ColorMode::Always));
        assert!("sometimes".parse::<ColorMode>().is_err());
        assert!(!ColorMode::Auto.enabled(false));
        assert!(ColorMode::Always.enabled(false));
    }
}
