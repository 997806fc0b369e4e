use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{Metric, MetricsRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
        }
    }

    pub fn holds(self, actual: f64, limit: f64) -> bool {
        let ord = actual.partial_cmp(&limit);
        match self {
            Comparator::Gt => ord == Some(Ordering::Greater),
            Comparator::Ge => matches!(ord, Some(Ordering::Greater | Ordering::Equal)),
            Comparator::Lt => ord == Some(Ordering::Less),
            Comparator::Le => matches!(ord, Some(Ordering::Less | Ordering::Equal)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleSeverity {
    Warn,
    Fail,
}

impl fmt::Display for RuleSeverity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleSeverity::Warn => "warn",
            RuleSeverity::Fail => "fail",
        })
    }
}

/// A rule fires for every row where `metric op limit` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdRule {
    pub metric: Metric,
    pub op: Comparator,
    pub limit: f64,
    pub severity: RuleSeverity,
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.metric, self.op.symbol(), self.limit)
    }
}

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("rules file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("rule {index}: limit must be finite")]
    NonFiniteLimit { index: usize },
}

/// Parses a JSON array of rules. Unknown keys and metric names are rejected.
pub fn parse_rules(text: &str) -> Result<Vec<ThresholdRule>, RulesError> {
    let rules: Vec<ThresholdRule> = serde_json::from_str(text)?;
    check_rules(&rules)?;
    Ok(rules)
}

pub fn check_rules(rules: &[ThresholdRule]) -> Result<(), RulesError> {
    match rules.iter().position(|r| !r.limit.is_finite()) {
        Some(index) => Err(RulesError::NonFiniteLimit { index }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub class: String,
    pub rule: String,
    pub actual: usize,
    pub severity: RuleSeverity,
}

/// One verdict per (row, rule) match, rows outermost.
pub fn evaluate_thresholds(
    rows: &[MetricsRow],
    rules: &[ThresholdRule],
) -> Result<Vec<Verdict>, RulesError> {
    check_rules(rules)?;
    let mut verdicts = Vec::new();
    for row in rows {
        for rule in rules {
            let actual = row.get(rule.metric);
            if rule.op.holds(actual as f64, rule.limit) {
                verdicts.push(Verdict {
                    class: row.class_fqn.clone(),
                    rule: rule.to_string(),
                    actual,
                    severity: rule.severity,
                });
            }
        }
    }
    Ok(verdicts)
}

pub fn has_failure(verdicts: &[Verdict]) -> bool {
    verdicts.iter().any(|v| v.severity == RuleSeverity::Fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_row() -> MetricsRow {
        MetricsRow {
            class_fqn: "Example".into(),
            ce: 0,
            ca: 0,
            dit: 0,
            cbo: 0,
            rfc: 3,
            lcom1: 2,
            lcom2: 1,
            lcom3: 2,
            lcom4: 2,
            method_count: 3,
            field_count: 7,
        }
    }

    #[test]
    fn parse_and_evaluate() {
        let rules =
            parse_rules(r#"[{"metric": "lcom2", "op": ">", "limit": 0, "severity": "fail"}]"#)
                .unwrap();
        let verdicts = evaluate_thresholds(&[example_row()], &rules).unwrap();
        assert_eq!(
            verdicts,
            [Verdict {
                class: "Example".into(),
                rule: "lcom2 > 0".into(),
                actual: 1,
                severity: RuleSeverity::Fail,
            }]
        );
        assert!(has_failure(&verdicts));
    }

    #[test]
    fn no_rules_no_verdicts() {
        assert!(evaluate_thresholds(&[example_row()], &[]).unwrap().is_empty());
    }

    #[test]
    fn always_true_rule_hits_every_row() {
        let rule = ThresholdRule {
            metric: Metric::Dit,
            op: Comparator::Ge,
            limit: 0.0,
            severity: RuleSeverity::Warn,
        };
        let rows = vec![example_row(); 4];
        let verdicts = evaluate_thresholds(&rows, &[rule]).unwrap();
        assert_eq!(verdicts.len(), 4);
        assert!(!has_failure(&verdicts));
    }

    #[test]
    fn config_errors() {
        assert!(
            parse_rules(r#"[{"metric": "loc", "op": ">", "limit": 1, "severity": "warn"}]"#)
                .is_err()
        );
        assert!(
            parse_rules(r#"[{"metric": "dit", "op": "!=", "limit": 1, "severity": "warn"}]"#)
                .is_err()
        );
        assert!(parse_rules(
            r#"[{"metric": "dit", "op": ">", "limit": 1, "severity": "warn", "x": 1}]"#
        )
        .is_err());
        assert!(parse_rules(r#"{"metric": "dit"}"#).is_err());
        let bad = ThresholdRule {
            metric: Metric::Dit,
            op: Comparator::Gt,
            limit: f64::NAN,
            severity: RuleSeverity::Warn,
        };
        assert!(evaluate_thresholds(&[], &[bad]).is_err());
    }
}
