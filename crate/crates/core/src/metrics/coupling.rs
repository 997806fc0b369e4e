use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{is_primitive, ClassModel};

use super::{MetricsEngine, MetricsError};

/// Why one class depends on another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    FieldType,
    ParamType,
    ReturnType,
    Call,
    Parent,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DependencyEdge {
    #[serde(rename = "from")]
    pub from_fqn: String,
    #[serde(rename = "to")]
    pub to_fqn: String,
    pub reasons: BTreeSet<Reason>,
}

/// Edges out of every analyzed class. Self references and primitives never
/// form edges.
pub(super) fn edge_index(model: &ClassModel) -> BTreeMap<&str, BTreeMap<&str, BTreeSet<Reason>>> {
    let mut index: BTreeMap<&str, BTreeMap<&str, BTreeSet<Reason>>> = BTreeMap::new();
    for class in model.internal_classes() {
        let from = class.fqn.as_str();
        let mut targets: BTreeMap<&str, BTreeSet<Reason>> = BTreeMap::new();
        let mut add = |to: &'_ str, reason: Reason| {
            if to != from && !is_primitive(to) {
                // Re-borrow through the model so the key outlives this closure.
                if let Some(target) = model.class(to) {
                    targets
                        .entry(target.fqn.as_str())
                        .or_default()
                        .insert(reason);
                }
            }
        };
        for parent in &class.parents {
            add(parent, Reason::Parent);
        }
        for field in &class.fields {
            add(&field.declared_type, Reason::FieldType);
        }
        for method in &class.methods {
            for param in &method.param_types {
                add(param, Reason::ParamType);
            }
            add(&method.return_type, Reason::ReturnType);
            for call in method.calls.iter().filter(|c| c.resolved) {
                if let Some(target) = &call.target_class {
                    add(target, Reason::Call);
                }
            }
        }
        index.insert(from, targets);
    }
    index
}

impl MetricsEngine<'_> {
    pub fn dependency_edges(&self) -> Vec<DependencyEdge> {
        self.outgoing
            .iter()
            .flat_map(|(from, targets)| {
                targets.iter().map(move |(to, reasons)| DependencyEdge {
                    from_fqn: from.to_string(),
                    to_fqn: to.to_string(),
                    reasons: reasons.clone(),
                })
            })
            .collect()
    }

    /// Distinct classes `fqn` depends on, parents and external stubs included.
    pub fn efferent_coupling(&self, fqn: &str) -> Result<usize, MetricsError> {
        self.internal(fqn)?;
        Ok(self.outgoing.get(fqn).map_or(0, BTreeMap::len))
    }

    /// Distinct analyzed classes that depend on `fqn`.
    pub fn afferent_coupling(&self, fqn: &str) -> Result<usize, MetricsError> {
        self.internal(fqn)?;
        Ok(self.incoming.get(fqn).map_or(0, BTreeSet::len))
    }

    /// (Ce, Ca) of a package: distinct outside classes its members depend on,
    /// and distinct outside classes depending on its members. External stubs
    /// are always outside.
    pub fn package_coupling(&self, package: &str) -> Result<(usize, usize), MetricsError> {
        if !self.model.packages().contains(package) {
            return Err(MetricsError::UnknownPackage(package.to_string()));
        }
        let inside = |fqn: &str| {
            self.model
                .class(fqn)
                .is_some_and(|c| !c.is_external && c.package == package)
        };
        let members: Vec<&str> = self
            .model
            .internal_classes()
            .filter(|c| c.package == package)
            .map(|c| c.fqn.as_str())
            .collect();

        let mut efferent: BTreeSet<&str> = BTreeSet::new();
        let mut afferent: BTreeSet<&str> = BTreeSet::new();
        for member in &members {
            if let Some(targets) = self.outgoing.get(member) {
                efferent.extend(targets.keys().filter(|t| !inside(t)));
            }
            if let Some(sources) = self.incoming.get(member) {
                afferent.extend(sources.iter().filter(|s| !inside(s)));
            }
        }
        Ok((efferent.len(), afferent.len()))
    }

    /// Distinct other classes whose methods this class calls or whose types
    /// appear in its method signatures. Parents count only when used that way.
    pub fn coupling_between_objects(&self, fqn: &str) -> Result<usize, MetricsError> {
        let class = self.internal(fqn)?;
        let mut coupled: BTreeSet<&str> = BTreeSet::new();
        for method in &class.methods {
            coupled.extend(method.param_types.iter().map(String::as_str));
            coupled.insert(&method.return_type);
            coupled.extend(
                method
                    .calls
                    .iter()
                    .filter(|c| c.resolved)
                    .filter_map(|c| c.target_class.as_deref()),
            );
        }
        Ok(coupled
            .into_iter()
            .filter(|t| *t != fqn && !is_primitive(t))
            .count())
    }

    /// Size of the response set: counted methods plus the distinct methods
    /// they call directly. Unresolved calls are left out.
    pub fn response_for_class(&self, fqn: &str) -> Result<usize, MetricsError> {
        let class = self.internal(fqn)?;
        let methods = self.counted_methods(class);
        let mut response: BTreeSet<(&str, &str, usize)> = methods
            .iter()
            .map(|m| (class.fqn.as_str(), m.name.as_str(), m.arity))
            .collect();
        for method in &methods {
            for call in method.calls.iter().filter(|c| c.resolved) {
                if let Some(target) = call.target_class.as_deref() {
                    response.insert((target, call.target_method.as_str(), call.arity));
                }
            }
        }
        Ok(response.len())
    }
}
