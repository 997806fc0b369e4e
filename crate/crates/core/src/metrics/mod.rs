//! Coupling and cohesion metrics over an immutable [`ClassModel`].
//!
//! Every metric is a pure function of the model. [`MetricsEngine`] caches the
//! dependency edge index so that computing all rows stays linear in the edge
//! count; the free functions are convenience wrappers that build an engine
//! per call.

mod cohesion;
mod coupling;
mod inheritance;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ClassInfo, ClassModel, MethodInfo};

pub use cohesion::{components, pair_counts};
pub use coupling::{DependencyEdge, Reason};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("class `{0}` is not in the model")]
    NotFound(String),
    #[error("class `{0}` is an external stub and has no metrics")]
    External(String),
    #[error("package `{0}` is not in the model")]
    UnknownPackage(String),
    #[error("inheritance cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
}

/// The nine reported metrics, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Ce,
    Ca,
    Dit,
    Cbo,
    Rfc,
    Lcom1,
    Lcom2,
    Lcom3,
    Lcom4,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::Ce,
        Metric::Ca,
        Metric::Dit,
        Metric::Cbo,
        Metric::Rfc,
        Metric::Lcom1,
        Metric::Lcom2,
        Metric::Lcom3,
        Metric::Lcom4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ce => "ce",
            Metric::Ca => "ca",
            Metric::Dit => "dit",
            Metric::Cbo => "cbo",
            Metric::Rfc => "rfc",
            Metric::Lcom1 => "lcom1",
            Metric::Lcom2 => "lcom2",
            Metric::Lcom3 => "lcom3",
            Metric::Lcom4 => "lcom4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Metric::Ce => "efferent coupling: distinct classes this class depends on",
            Metric::Ca => "afferent coupling: distinct corpus classes depending on this class",
            Metric::Dit => "depth of inheritance: longest parent chain to a root",
            Metric::Cbo => {
                "coupling between objects: distinct classes whose services or types the methods use"
            }
            Metric::Rfc => "response for a class: own methods plus distinct methods they call",
            Metric::Lcom1 => "method pairs with disjoint attribute sets",
            Metric::Lcom2 => "disjoint pairs minus sharing pairs, floored at zero",
            Metric::Lcom3 => "connected components of the attribute-sharing method graph",
            Metric::Lcom4 => "components of the sharing graph plus intra-class call edges",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsRow {
    #[serde(rename = "class")]
    pub class_fqn: String,
    pub ce: usize,
    pub ca: usize,
    pub dit: usize,
    pub cbo: usize,
    pub rfc: usize,
    pub lcom1: usize,
    pub lcom2: usize,
    pub lcom3: usize,
    pub lcom4: usize,
    pub method_count: usize,
    pub field_count: usize,
}

impl MetricsRow {
    pub fn get(&self, metric: Metric) -> usize {
        match metric {
            Metric::Ce => self.ce,
            Metric::Ca => self.ca,
            Metric::Dit => self.dit,
            Metric::Cbo => self.cbo,
            Metric::Rfc => self.rfc,
            Metric::Lcom1 => self.lcom1,
            Metric::Lcom2 => self.lcom2,
            Metric::Lcom3 => self.lcom3,
            Metric::Lcom4 => self.lcom4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricsOptions {
    /// Whether constructors count as methods for LCOM and RFC.
    pub include_constructors: bool,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        Self {
            include_constructors: true,
        }
    }
}

pub struct MetricsEngine<'m> {
    model: &'m ClassModel,
    options: MetricsOptions,
    /// from -> to -> reasons
    outgoing: BTreeMap<&'m str, BTreeMap<&'m str, BTreeSet<Reason>>>,
    /// to -> set of from
    incoming: BTreeMap<&'m str, BTreeSet<&'m str>>,
}

impl<'m> MetricsEngine<'m> {
    pub fn new(model: &'m ClassModel) -> Self {
        Self::with_options(model, MetricsOptions::default())
    }

    pub fn with_options(model: &'m ClassModel, options: MetricsOptions) -> Self {
        let outgoing = coupling::edge_index(model);
        let mut incoming: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (from, targets) in &outgoing {
            for to in targets.keys() {
                incoming.entry(to).or_default().insert(from);
            }
        }
        Self {
            model,
            options,
            outgoing,
            incoming,
        }
    }

    pub fn model(&self) -> &'m ClassModel {
        self.model
    }

    /// The class, which must exist and not be an external stub.
    fn internal(&self, fqn: &str) -> Result<&'m ClassInfo, MetricsError> {
        match self.model.class(fqn) {
            None => Err(MetricsError::NotFound(fqn.to_string())),
            Some(c) if c.is_external => Err(MetricsError::External(fqn.to_string())),
            Some(c) => Ok(c),
        }
    }

    /// Methods that take part in LCOM and RFC under the current options.
    fn counted_methods(&self, class: &'m ClassInfo) -> Vec<&'m MethodInfo> {
        class
            .methods
            .iter()
            .filter(|m| self.options.include_constructors || !class.is_constructor(m))
            .collect()
    }

    pub fn lcom1(&self, fqn: &str) -> Result<usize, MetricsError> {
        let class = self.internal(fqn)?;
        Ok(pair_counts(&self.counted_methods(class)).0)
    }

    pub fn lcom2(&self, fqn: &str) -> Result<usize, MetricsError> {
        let class = self.internal(fqn)?;
        let (disjoint, sharing) = pair_counts(&self.counted_methods(class));
        Ok(disjoint.saturating_sub(sharing))
    }

    pub fn lcom3(&self, fqn: &str) -> Result<usize, MetricsError> {
        let class = self.internal(fqn)?;
        Ok(components(&class.fqn, &self.counted_methods(class), false))
    }

    pub fn lcom4(&self, fqn: &str) -> Result<usize, MetricsError> {
        let class = self.internal(fqn)?;
        Ok(components(&class.fqn, &self.counted_methods(class), true))
    }

    pub fn row(&self, fqn: &str) -> Result<MetricsRow, MetricsError> {
        let dit = self.depth_of_inheritance(fqn)?;
        self.row_with_dit(fqn, dit)
    }

    fn row_with_dit(&self, fqn: &str, dit: usize) -> Result<MetricsRow, MetricsError> {
        let class = self.internal(fqn)?;
        let methods = self.counted_methods(class);
        let (disjoint, sharing) = pair_counts(&methods);
        Ok(MetricsRow {
            class_fqn: class.fqn.clone(),
            ce: self.efferent_coupling(fqn)?,
            ca: self.afferent_coupling(fqn)?,
            dit,
            cbo: self.coupling_between_objects(fqn)?,
            rfc: self.response_for_class(fqn)?,
            lcom1: disjoint,
            lcom2: disjoint.saturating_sub(sharing),
            lcom3: components(&class.fqn, &methods, false),
            lcom4: components(&class.fqn, &methods, true),
            method_count: methods.len(),
            field_count: class.fields.len(),
        })
    }

    /// One row per non-external class, sorted by FQN.
    pub fn compute_all(&self) -> Result<Vec<MetricsRow>, MetricsError> {
        let depths = self.depth_table()?;
        let classes: Vec<&ClassInfo> = self.model.internal_classes().collect();
        classes
            .par_iter()
            .map(|c| self.row_with_dit(&c.fqn, depths[c.fqn.as_str()]))
            .collect()
    }
}

pub fn compute_all(model: &ClassModel) -> Result<Vec<MetricsRow>, MetricsError> {
    MetricsEngine::new(model).compute_all()
}

pub fn compute_all_with(
    model: &ClassModel,
    options: MetricsOptions,
) -> Result<Vec<MetricsRow>, MetricsError> {
    MetricsEngine::with_options(model, options).compute_all()
}

pub fn dependency_edges(model: &ClassModel) -> Vec<DependencyEdge> {
    MetricsEngine::new(model).dependency_edges()
}

pub fn efferent_coupling(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).efferent_coupling(fqn)
}

pub fn afferent_coupling(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).afferent_coupling(fqn)
}

pub fn package_coupling(model: &ClassModel, package: &str) -> Result<(usize, usize), MetricsError> {
    MetricsEngine::new(model).package_coupling(package)
}

pub fn depth_of_inheritance(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).depth_of_inheritance(fqn)
}

pub fn coupling_between_objects(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).coupling_between_objects(fqn)
}

pub fn response_for_class(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).response_for_class(fqn)
}

pub fn lcom1(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).lcom1(fqn)
}

pub fn lcom2(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).lcom2(fqn)
}

pub fn lcom3(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).lcom3(fqn)
}

pub fn lcom4(model: &ClassModel, fqn: &str) -> Result<usize, MetricsError> {
    MetricsEngine::new(model).lcom4(fqn)
}
