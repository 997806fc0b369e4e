//! Language-neutral class model shared by the parser, the generator and the
//! metrics engine.
//!
//! A [`ClassModel`] is immutable once built. Construction canonicalizes the
//! ordering of every collection (classes by FQN, fields by name, methods by
//! name and arity, parents lexicographically) so that two models with the same
//! content compare and serialize identically.

mod document;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use document::{export_model, import_model, ModelError, MODEL_VERSION};
pub use validate::{inheritance_cycles, validate};

/// Primitive type tags. Everything else in a type position is a class FQN.
pub const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

pub fn is_primitive(type_name: &str) -> bool {
    PRIMITIVES.contains(&type_name)
}

/// Display name of the default (unnamed) package.
pub const DEFAULT_PACKAGE_LABEL: &str = "(default)";

pub fn package_label(package: &str) -> &str {
    if package.is_empty() {
        DEFAULT_PACKAGE_LABEL
    } else {
        package
    }
}

/// Splits `a.b.C` into (`a.b`, `C`). Names without a dot live in the default package.
pub fn split_fqn(fqn: &str) -> (&str, &str) {
    match fqn.rfind('.') {
        Some(idx) => (&fqn[..idx], &fqn[idx + 1..]),
        None => ("", fqn),
    }
}

pub fn join_fqn(package: &str, simple: &str) -> String {
    if package.is_empty() {
        simple.to_string()
    } else {
        format!("{package}.{simple}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Class,
    Interface,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldInfo {
    pub name: String,
    #[serde(rename = "type")]
    pub declared_type: String,
}

impl FieldInfo {
    pub fn new(name: impl Into<String>, declared_type: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            declared_type: declared_type.into(),
        }
    }
}

/// A call made from a method body.
///
/// `target_class` is `None` when the receiver could not be typed. A call whose
/// receiver class is known but whose method could not be found keeps the class
/// and is marked `resolved = false`. Calls into external stubs are resolved on
/// the receiver class alone, since stub members are unknown.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallSite {
    #[serde(rename = "class")]
    pub target_class: Option<String>,
    #[serde(rename = "method")]
    pub target_method: String,
    pub arity: usize,
    pub resolved: bool,
}

impl CallSite {
    pub fn resolved(class: impl Into<String>, method: impl Into<String>, arity: usize) -> Self {
        Self {
            target_class: Some(class.into()),
            target_method: method.into(),
            arity,
            resolved: true,
        }
    }

    pub fn unresolved(class: Option<String>, method: impl Into<String>, arity: usize) -> Self {
        Self {
            target_class: class,
            target_method: method.into(),
            arity,
            resolved: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodInfo {
    pub name: String,
    pub arity: usize,
    #[serde(rename = "params")]
    pub param_types: Vec<String>,
    #[serde(rename = "returns")]
    pub return_type: String,
    /// The instance set: own or inherited field names this method reads or writes.
    #[serde(rename = "uses")]
    pub attributes_used: BTreeSet<String>,
    pub calls: BTreeSet<CallSite>,
}

impl MethodInfo {
    pub fn new(
        name: impl Into<String>,
        param_types: Vec<String>,
        return_type: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            arity: param_types.len(),
            param_types,
            return_type: return_type.into(),
            attributes_used: BTreeSet::new(),
            calls: BTreeSet::new(),
        }
    }

    pub fn with_uses<I, S>(mut self, uses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.attributes_used
            .extend(uses.into_iter().map(Into::into));
        self
    }

    pub fn with_call(mut self, call: CallSite) -> Self {
        self.calls.insert(call);
        self
    }

    pub fn identity(&self) -> (&str, usize) {
        (&self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassInfo {
    pub fqn: String,
    pub package: String,
    pub kind: ClassKind,
    #[serde(rename = "external")]
    pub is_external: bool,
    pub parents: Vec<String>,
    pub fields: Vec<FieldInfo>,
    pub methods: Vec<MethodInfo>,
}

impl ClassInfo {
    /// An in-corpus class; the package is derived from the FQN.
    pub fn new(fqn: impl Into<String>, kind: ClassKind) -> Self {
        let fqn = fqn.into();
        let package = split_fqn(&fqn).0.to_string();
        Self {
            fqn,
            package,
            kind,
            is_external: false,
            parents: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
        }
    }

    /// Placeholder for a class referenced by the corpus but not part of it.
    pub fn external(fqn: impl Into<String>) -> Self {
        Self {
            is_external: true,
            ..Self::new(fqn, ClassKind::Class)
        }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parents.push(parent.into());
        self
    }

    pub fn with_field(mut self, field: FieldInfo) -> Self {
        self.fields.push(field);
        self
    }

    pub fn with_method(mut self, method: MethodInfo) -> Self {
        self.methods.push(method);
        self
    }

    pub fn simple_name(&self) -> &str {
        split_fqn(&self.fqn).1
    }

    pub fn field(&self, name: &str) -> Option<&FieldInfo> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn method(&self, name: &str, arity: usize) -> Option<&MethodInfo> {
        self.methods
            .iter()
            .find(|m| m.name == name && m.arity == arity)
    }

    /// Constructors carry the simple name of their class.
    pub fn is_constructor(&self, method: &MethodInfo) -> bool {
        method.name == self.simple_name()
    }

    fn canonicalize(&mut self) {
        self.parents.sort();
        self.parents.dedup();
        self.fields.sort_by(|a, b| a.name.cmp(&b.name));
        self.methods
            .sort_by(|a, b| (a.name.as_str(), a.arity).cmp(&(b.name.as_str(), b.arity)));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => f.write_str("warning"),
            Severity::Error => f.write_str("error"),
        }
    }
}

/// 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl Location {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        Self {
            file: file.into(),
            line: line.max(1),
            column: column.max(1),
        }
    }

    /// Location used for findings about a model that has no source text.
    pub fn model() -> Self {
        Self::new("<model>", 1, 1)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    #[serde(flatten)]
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    pub fn error(location: Location, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            location,
            message: message.into(),
        }
    }

    pub fn warning(location: Location, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            location,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.location, self.severity, self.message)
    }
}

/// The whole-program class graph.
///
/// `packages` and `inheritance_edges` are derived from the classes at
/// construction. Equality is structural over the classes; diagnostics are
/// carried along but do not take part in comparisons.
#[derive(Debug, Clone, Default)]
pub struct ClassModel {
    classes: Vec<ClassInfo>,
    packages: BTreeSet<String>,
    inheritance_edges: BTreeSet<(String, String)>,
    diagnostics: Vec<Diagnostic>,
}

impl PartialEq for ClassModel {
    fn eq(&self, other: &Self) -> bool {
        self.classes == other.classes
    }
}

impl Eq for ClassModel {}

impl ClassModel {
    /// Builds a model, putting every collection into canonical order. No
    /// validation happens here; see [`validate`].
    pub fn new(mut classes: Vec<ClassInfo>, diagnostics: Vec<Diagnostic>) -> Self {
        for class in &mut classes {
            class.canonicalize();
        }
        classes.sort_by(|a, b| a.fqn.cmp(&b.fqn));

        let packages = classes
            .iter()
            .filter(|c| !c.is_external)
            .map(|c| c.package.clone())
            .collect();
        let inheritance_edges = classes
            .iter()
            .flat_map(|c| c.parents.iter().map(move |p| (c.fqn.clone(), p.clone())))
            .collect();

        Self {
            classes,
            packages,
            inheritance_edges,
            diagnostics,
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// All classes, external stubs included, sorted by FQN.
    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    /// Classes that were analyzed (everything except external stubs).
    pub fn internal_classes(&self) -> impl Iterator<Item = &ClassInfo> {
        self.classes.iter().filter(|c| !c.is_external)
    }

    pub fn class(&self, fqn: &str) -> Option<&ClassInfo> {
        self.classes
            .binary_search_by(|c| c.fqn.as_str().cmp(fqn))
            .ok()
            .map(|idx| &self.classes[idx])
    }

    pub fn contains(&self, fqn: &str) -> bool {
        self.class(fqn).is_some()
    }

    /// Packages of the analyzed classes. External stub packages are not listed.
    pub fn packages(&self) -> &BTreeSet<String> {
        &self.packages
    }

    /// (child, parent) pairs.
    pub fn inheritance_edges(&self) -> &BTreeSet<(String, String)> {
        &self.inheritance_edges
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn with_diagnostics(mut self, diagnostics: Vec<Diagnostic>) -> Self {
        self.diagnostics = diagnostics;
        self
    }

    pub fn into_parts(self) -> (Vec<ClassInfo>, Vec<Diagnostic>) {
        (self.classes, self.diagnostics)
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Looks up `(name, arity)` on `fqn` and then on its ancestors, breadth
    /// first. Returns the class that declares it.
    pub fn find_method_owner(&self, fqn: &str, name: &str, arity: usize) -> Option<&ClassInfo> {
        self.ancestry(fqn)
            .into_iter()
            .filter_map(|c| self.class(c))
            .find(|c| c.method(name, arity).is_some())
    }

    /// Nearest class (self first) that declares field `name`.
    pub fn find_field_owner(&self, fqn: &str, name: &str) -> Option<&ClassInfo> {
        self.ancestry(fqn)
            .into_iter()
            .filter_map(|c| self.class(c))
            .find(|c| c.field(name).is_some())
    }

    /// `fqn` followed by its ancestors in breadth-first order, each listed
    /// once. Terminates on cyclic input.
    pub fn ancestry<'a>(&'a self, fqn: &'a str) -> Vec<&'a str> {
        let mut order: Vec<&str> = vec![fqn];
        let mut seen: BTreeSet<&str> = BTreeSet::from([fqn]);
        let mut idx = 0;
        while idx < order.len() {
            if let Some(class) = self.class(order[idx]) {
                for parent in &class.parents {
                    if seen.insert(parent.as_str()) {
                        order.push(parent.as_str());
                    }
                }
            }
            idx += 1;
        }
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_sorts_everything() {
        let model = ClassModel::new(
            vec![
                ClassInfo::new("p.B", ClassKind::Class)
                    .with_field(FieldInfo::new("z", "int"))
                    .with_field(FieldInfo::new("a", "int"))
                    .with_parent("p.A"),
                ClassInfo::new("p.A", ClassKind::Interface),
            ],
            vec![],
        );
        let fqns: Vec<_> = model.classes().iter().map(|c| c.fqn.as_str()).collect();
        assert_eq!(fqns, ["p.A", "p.B"]);
        assert_eq!(model.class("p.B").unwrap().fields[0].name, "a");
        assert!(model
            .inheritance_edges()
            .contains(&("p.B".to_string(), "p.A".to_string())));
        assert_eq!(model.packages().len(), 1);
    }

    #[test]
    fn default_package_split() {
        assert_eq!(split_fqn("Main"), ("", "Main"));
        assert_eq!(split_fqn("a.b.C"), ("a.b", "C"));
        assert_eq!(package_label(""), "(default)");
    }

    #[test]
    fn ancestry_survives_cycles() {
        let model = ClassModel::new(
            vec![
                ClassInfo::new("A", ClassKind::Class).with_parent("B"),
                ClassInfo::new("B", ClassKind::Class).with_parent("A"),
            ],
            vec![],
        );
        assert_eq!(model.ancestry("A"), vec!["A", "B"]);
    }
}
