//! Turns syntax units into a [`ClassModel`].
//!
//! Type names resolve in this order: same file, explicit imports, same
//! package, and finally an external stub. Receivers are typed from declared
//! types only (locals, parameters, fields); there is no flow analysis.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::model::{
    is_primitive, join_fqn, validate, CallSite, ClassInfo, ClassKind, ClassModel, Diagnostic,
    FieldInfo, Location, MethodInfo,
};

use super::syntax::{CtorTarget, Expr, MethodDecl, Stmt, SyntaxUnit, TypeDecl};

/// Resolves and merges syntax units. The result is independent of the order
/// of `units` and always passes [`validate`].
pub fn build_model(units: &[SyntaxUnit]) -> ClassModel {
    let mut units: Vec<&SyntaxUnit> = units.iter().collect();
    units.sort_by(|a, b| (&a.file, &a.package).cmp(&(&b.file, &b.package)));

    let mut diags: Vec<Diagnostic> = units
        .iter()
        .flat_map(|u| u.diagnostics.iter().cloned())
        .collect();

    // First declaration of each FQN wins.
    let mut declared: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (ui, unit) in units.iter().enumerate() {
        for (di, decl) in unit.type_decls.iter().enumerate() {
            let fqn = join_fqn(&unit.package, &decl.name);
            if let Some(&(first_unit, _)) = declared.get(&fqn) {
                diags.push(Diagnostic::error(
                    decl.location.clone(),
                    format!(
                        "duplicate class `{fqn}`; keeping the declaration in {}",
                        units[first_unit].file
                    ),
                ));
            } else {
                declared.insert(fqn, (ui, di));
            }
        }
    }
    let corpus: BTreeSet<String> = declared.keys().cloned().collect();

    let mut skeletons = Vec::new();
    let mut sources: Vec<(&SyntaxUnit, &TypeDecl)> = Vec::new();
    for (fqn, &(ui, di)) in &declared {
        let unit = units[ui];
        let decl = &unit.type_decls[di];
        let scope = TypeScope {
            unit,
            corpus: &corpus,
        };
        skeletons.push(skeleton(fqn, decl, &scope, &mut diags));
        sources.push((unit, decl));
    }

    break_inheritance_cycles(&mut skeletons, &sources, &mut diags);

    let lookup = ClassModel::new(skeletons.clone(), Vec::new());
    for (class, (unit, decl)) in skeletons.iter_mut().zip(&sources) {
        let scope = TypeScope {
            unit,
            corpus: &corpus,
        };
        let mut walker = BodyWalker {
            model: &lookup,
            types: &scope,
            class_fqn: &class.fqn,
            diags: &mut diags,
        };
        let mut seen = BTreeSet::new();
        for method_decl in &decl.methods {
            let arity = method_decl.params.len();
            if !seen.insert((method_decl.name.as_str(), arity)) {
                continue;
            }
            let Some(body) = &method_decl.body else {
                continue;
            };
            let facts = walker.method(method_decl, body);
            let method = class
                .methods
                .iter_mut()
                .find(|m| m.name == method_decl.name && m.arity == arity)
                .expect("skeleton has every first declaration");
            method.attributes_used = facts.uses;
            method.calls = facts.calls;
        }
    }

    let mut referenced = BTreeSet::new();
    for class in &skeletons {
        referenced.extend(class.parents.iter().cloned());
        for field in &class.fields {
            referenced.insert(field.declared_type.clone());
        }
        for method in &class.methods {
            referenced.extend(method.param_types.iter().cloned());
            referenced.insert(method.return_type.clone());
            referenced.extend(method.calls.iter().filter_map(|c| c.target_class.clone()));
        }
    }
    let stubs: Vec<ClassInfo> = referenced
        .into_iter()
        .filter(|t| !is_primitive(t) && !corpus.contains(t))
        .map(ClassInfo::external)
        .collect();
    skeletons.extend(stubs);

    diags.sort();
    diags.dedup();
    let model = ClassModel::new(skeletons, diags);
    debug_assert!(validate(&model).is_empty(), "{:?}", validate(&model));
    model
}

struct TypeScope<'a> {
    unit: &'a SyntaxUnit,
    corpus: &'a BTreeSet<String>,
}

impl TypeScope<'_> {
    fn resolve(&self, name: &str) -> String {
        if is_primitive(name) || name.contains('.') {
            return name.to_string();
        }
        if self.unit.type_decls.iter().any(|d| d.name == name) {
            return join_fqn(&self.unit.package, name);
        }
        if let Some(import) = self.unit.imports.iter().find(|i| i.simple_name() == name) {
            return import.fqn.clone();
        }
        let same_package = join_fqn(&self.unit.package, name);
        if self.corpus.contains(&same_package) {
            return same_package;
        }
        name.to_string()
    }

    /// Like `resolve`, but only answers for names that denote a known class:
    /// in-corpus, imported, or capitalized (treated as an external type).
    fn resolve_type_name(&self, name: &str) -> Option<String> {
        let resolved = self.resolve(name);
        let known = self.corpus.contains(&resolved)
            || self.unit.imports.iter().any(|i| i.simple_name() == name)
            || name.starts_with(char::is_uppercase);
        known.then_some(resolved)
    }
}

fn skeleton(
    fqn: &str,
    decl: &TypeDecl,
    scope: &TypeScope<'_>,
    diags: &mut Vec<Diagnostic>,
) -> ClassInfo {
    let mut class = ClassInfo::new(fqn, decl.kind);
    for parent in decl.extends.iter().chain(&decl.implements) {
        let resolved = scope.resolve(&parent.name);
        if is_primitive(&resolved) {
            diags.push(Diagnostic::error(
                parent.location.clone(),
                format!("cannot inherit from primitive `{resolved}`"),
            ));
        } else if resolved == fqn {
            diags.push(Diagnostic::error(
                parent.location.clone(),
                format!("class `{fqn}` cannot inherit from itself"),
            ));
        } else {
            class.parents.push(resolved);
        }
    }

    for field in &decl.fields {
        if class.field(&field.name).is_some() {
            diags.push(Diagnostic::error(
                field.location.clone(),
                format!("field `{}` already declared in `{fqn}`", field.name),
            ));
            continue;
        }
        class
            .fields
            .push(FieldInfo::new(&field.name, scope.resolve(&field.ty.name)));
    }

    for method in &decl.methods {
        let arity = method.params.len();
        if class.method(&method.name, arity).is_some() {
            diags.push(Diagnostic::error(
                method.location.clone(),
                format!(
                    "`{fqn}.{}` already has an overload with {arity} parameter(s); overloads are told apart by arity only",
                    method.name
                ),
            ));
            continue;
        }
        let params = method
            .params
            .iter()
            .map(|p| scope.resolve(&p.ty.name))
            .collect();
        let returns = method
            .return_type
            .as_ref()
            .map(|t| scope.resolve(&t.name))
            .unwrap_or_else(|| "void".to_string());
        class
            .methods
            .push(MethodInfo::new(&method.name, params, returns));
    }
    class
}

/// Drops the closing edge of each inheritance cycle among corpus classes.
fn break_inheritance_cycles(
    classes: &mut [ClassInfo],
    sources: &[(&SyntaxUnit, &TypeDecl)],
    diags: &mut Vec<Diagnostic>,
) {
    loop {
        let model = ClassModel::new(classes.to_vec(), Vec::new());
        let cycles = crate::model::inheritance_cycles(&model);
        let Some(cycle) = cycles.first() else { return };
        let child = &cycle[cycle.len() - 2];
        let parent = &cycle[cycle.len() - 1];
        let idx = classes
            .iter()
            .position(|c| &c.fqn == child)
            .expect("cycle member exists");
        classes[idx].parents.retain(|p| p != parent);
        diags.push(Diagnostic::error(
            sources[idx].1.location.clone(),
            format!(
                "inheritance cycle {}; ignoring `{child}` -> `{parent}`",
                cycle.join(" -> ")
            ),
        ));
    }
}

#[derive(Default)]
struct MethodFacts {
    uses: BTreeSet<String>,
    calls: BTreeSet<CallSite>,
}

/// Static type of an expression, as far as declared types tell.
#[derive(Debug, Clone)]
enum Typed {
    Value(String),
    /// A class name used as a receiver, as in `Util.helper()`.
    TypeName(String),
    Super,
    Unknown,
}

struct BodyWalker<'a, 'd> {
    model: &'a ClassModel,
    types: &'a TypeScope<'a>,
    class_fqn: &'a str,
    diags: &'d mut Vec<Diagnostic>,
}

struct Frame {
    facts: MethodFacts,
    scopes: Vec<HashMap<String, String>>,
}

impl Frame {
    fn lookup(&self, name: &str) -> Option<&String> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn declare(&mut self, name: &str, ty: String) {
        self.scopes
            .last_mut()
            .expect("method scope")
            .insert(name.to_string(), ty);
    }
}

impl BodyWalker<'_, '_> {
    fn method(&mut self, decl: &MethodDecl, body: &[Stmt]) -> MethodFacts {
        let mut frame = Frame {
            facts: MethodFacts::default(),
            scopes: vec![HashMap::new()],
        };
        for param in &decl.params {
            frame.declare(&param.name, self.types.resolve(&param.ty.name));
        }
        self.block(&mut frame, body);
        frame.facts
    }

    fn block(&mut self, frame: &mut Frame, stmts: &[Stmt]) {
        frame.scopes.push(HashMap::new());
        for stmt in stmts {
            self.stmt(frame, stmt);
        }
        frame.scopes.pop();
    }

    fn stmt(&mut self, frame: &mut Frame, stmt: &Stmt) {
        match stmt {
            Stmt::Local { ty, name, init } => {
                if let Some(init) = init {
                    self.expr(frame, init);
                }
                frame.declare(name, self.types.resolve(&ty.name));
            }
            Stmt::Expr(e) => {
                self.expr(frame, e);
            }
            Stmt::Return(value) => {
                if let Some(v) = value {
                    self.expr(frame, v);
                }
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expr(frame, cond);
                self.nested(frame, then_branch);
                if let Some(e) = else_branch {
                    self.nested(frame, e);
                }
            }
            Stmt::While { cond, body } => {
                self.expr(frame, cond);
                self.nested(frame, body);
            }
            Stmt::Block(stmts) => self.block(frame, stmts),
            Stmt::Empty => {}
        }
    }

    fn nested(&mut self, frame: &mut Frame, stmt: &Stmt) {
        self.block(frame, std::slice::from_ref(stmt));
    }

    fn in_corpus(&self, fqn: &str) -> bool {
        self.model.class(fqn).is_some()
    }

    /// Type of a field visible from `owner` (own or inherited).
    fn field_type(&self, owner: &str, name: &str) -> Option<String> {
        self.model
            .find_field_owner(owner, name)
            .and_then(|c| c.field(name))
            .map(|f| f.declared_type.clone())
    }

    fn own_field(
        &mut self,
        frame: &mut Frame,
        name: &str,
        location: &Location,
        search_self: bool,
    ) -> Typed {
        let found = if search_self {
            self.field_type(self.class_fqn, name)
        } else {
            self.parents_of_self()
                .iter()
                .find_map(|p| self.field_type(p, name))
        };
        match found {
            Some(ty) => {
                frame.facts.uses.insert(name.to_string());
                Typed::Value(ty)
            }
            None => {
                self.diags.push(Diagnostic::warning(
                    location.clone(),
                    format!("`{}` has no field `{name}`", self.class_fqn),
                ));
                Typed::Unknown
            }
        }
    }

    fn parents_of_self(&self) -> Vec<String> {
        self.model
            .class(self.class_fqn)
            .map(|c| c.parents.clone())
            .unwrap_or_default()
    }

    fn expr(&mut self, frame: &mut Frame, expr: &Expr) -> Typed {
        match expr {
            Expr::Literal => Typed::Unknown,
            Expr::This => Typed::Value(self.class_fqn.to_string()),
            Expr::Super => Typed::Super,
            Expr::Name(name, location) => {
                if let Some(ty) = frame.lookup(name) {
                    return Typed::Value(ty.clone());
                }
                if let Some(ty) = self.field_type(self.class_fqn, name) {
                    frame.facts.uses.insert(name.clone());
                    return Typed::Value(ty);
                }
                if let Some(ty) = self.types.resolve_type_name(name) {
                    return Typed::TypeName(ty);
                }
                self.diags.push(Diagnostic::warning(
                    location.clone(),
                    format!("cannot resolve `{name}`"),
                ));
                Typed::Unknown
            }
            Expr::Field {
                target,
                name,
                location,
            } => match target.as_ref() {
                Expr::This => self.own_field(frame, name, location, true),
                Expr::Super => self.own_field(frame, name, location, false),
                other => match self.expr(frame, other) {
                    Typed::Value(ty) | Typed::TypeName(ty) if self.in_corpus(&ty) => self
                        .field_type(&ty, name)
                        .map_or(Typed::Unknown, Typed::Value),
                    _ => Typed::Unknown,
                },
            },
            Expr::Call {
                receiver,
                name,
                args,
                location,
            } => {
                for arg in args {
                    self.expr(frame, arg);
                }
                let arity = args.len();
                match receiver.as_deref() {
                    None | Some(Expr::This) => {
                        let own = self.class_fqn.to_string();
                        self.call_on(frame, &[own.as_str()], name, arity, location)
                    }
                    Some(Expr::Super) => {
                        let parents = self.parents_of_self();
                        let starts: Vec<&str> = parents.iter().map(String::as_str).collect();
                        self.call_on(frame, &starts, name, arity, location)
                    }
                    Some(recv) => {
                        let typed = self.expr(frame, recv);
                        match typed {
                            Typed::Value(ty) | Typed::TypeName(ty) => {
                                if is_primitive(&ty) {
                                    self.diags.push(Diagnostic::warning(
                                        location.clone(),
                                        format!("call `{name}` on primitive type `{ty}`"),
                                    ));
                                    Typed::Unknown
                                } else {
                                    self.call_on(frame, &[ty.as_str()], name, arity, location)
                                }
                            }
                            Typed::Super => unreachable!("super handled above"),
                            Typed::Unknown => {
                                // An untyped link in a call chain ends the chain quietly.
                                if !matches!(recv, Expr::Call { .. }) {
                                    frame
                                        .facts
                                        .calls
                                        .insert(CallSite::unresolved(None, name, arity));
                                    self.diags.push(Diagnostic::warning(
                                        location.clone(),
                                        format!("cannot type the receiver of `{name}`"),
                                    ));
                                }
                                Typed::Unknown
                            }
                        }
                    }
                }
            }
            Expr::CtorCall {
                target,
                args,
                location,
            } => {
                for arg in args {
                    self.expr(frame, arg);
                }
                let class = match target {
                    CtorTarget::This => Some(self.class_fqn.to_string()),
                    CtorTarget::Super => self.super_class(),
                };
                if let Some(class) = class {
                    self.constructor_call(frame, &class, args.len(), location);
                }
                Typed::Unknown
            }
            Expr::New { ty, args } => {
                for arg in args {
                    self.expr(frame, arg);
                }
                let class = self.types.resolve(&ty.name);
                if is_primitive(&class) {
                    return Typed::Unknown;
                }
                self.constructor_call(frame, &class, args.len(), &ty.location);
                Typed::Value(class)
            }
            Expr::NewArray { ty, dims } => {
                for d in dims {
                    self.expr(frame, d);
                }
                Typed::Value(self.types.resolve(&ty.name))
            }
            Expr::Index { target, index } => {
                self.expr(frame, index);
                self.expr(frame, target)
            }
            Expr::Assign { target, value } => {
                self.expr(frame, target);
                self.expr(frame, value);
                Typed::Unknown
            }
            Expr::Unary(e) => {
                self.expr(frame, e);
                Typed::Unknown
            }
            Expr::Binary(a, b) => {
                self.expr(frame, a);
                self.expr(frame, b);
                Typed::Unknown
            }
            Expr::Conditional(c, a, b) => {
                self.expr(frame, c);
                self.expr(frame, a);
                self.expr(frame, b);
                Typed::Unknown
            }
            Expr::InstanceOf(e, _) => {
                self.expr(frame, e);
                Typed::Unknown
            }
        }
    }

    /// The superclass proper: the first parent of kind class, if any.
    fn super_class(&self) -> Option<String> {
        self.parents_of_self().into_iter().find(|p| {
            self.model
                .class(p)
                .is_none_or(|c| c.kind == ClassKind::Class)
        })
    }

    fn constructor_call(
        &mut self,
        frame: &mut Frame,
        class: &str,
        arity: usize,
        location: &Location,
    ) {
        let simple = crate::model::split_fqn(class).1.to_string();
        match self.model.class(class) {
            None => {
                frame
                    .facts
                    .calls
                    .insert(CallSite::resolved(class, simple, arity));
            }
            Some(info) => {
                if info.method(&simple, arity).is_some() {
                    frame
                        .facts
                        .calls
                        .insert(CallSite::resolved(class, simple, arity));
                } else if arity == 0 && !info.methods.iter().any(|m| info.is_constructor(m)) {
                    // implicit default constructor: nothing to record
                } else {
                    frame.facts.calls.insert(CallSite::unresolved(
                        Some(class.to_string()),
                        simple.clone(),
                        arity,
                    ));
                    self.diags.push(Diagnostic::warning(
                        location.clone(),
                        format!("`{class}` has no constructor with {arity} parameter(s)"),
                    ));
                }
            }
        }
    }

    /// Resolves `name/arity` by searching each start class and its ancestors.
    /// Returns the declared return type when it names a corpus class, so that
    /// call chains continue only through in-corpus types.
    fn call_on(
        &mut self,
        frame: &mut Frame,
        starts: &[&str],
        name: &str,
        arity: usize,
        location: &Location,
    ) -> Typed {
        let mut external_ancestor: Option<String> = None;
        for start in starts {
            for fqn in self.model.ancestry(start) {
                match self.model.class(fqn) {
                    Some(class) => {
                        if let Some(method) = class.method(name, arity) {
                            frame
                                .facts
                                .calls
                                .insert(CallSite::resolved(fqn, name, arity));
                            let ret = &method.return_type;
                            return if self.in_corpus(ret) {
                                Typed::Value(ret.clone())
                            } else {
                                Typed::Unknown
                            };
                        }
                    }
                    None => {
                        external_ancestor.get_or_insert_with(|| fqn.to_string());
                    }
                }
            }
        }
        if let Some(ext) = external_ancestor {
            frame
                .facts
                .calls
                .insert(CallSite::resolved(ext, name, arity));
            return Typed::Unknown;
        }
        let receiver = starts.first().map(|s| s.to_string());
        self.diags.push(Diagnostic::warning(
            location.clone(),
            format!(
                "cannot resolve call `{name}` with {arity} argument(s) on `{}`",
                receiver.as_deref().unwrap_or("?")
            ),
        ));
        frame
            .facts
            .calls
            .insert(CallSite::unresolved(receiver, name, arity));
        Typed::Unknown
    }
}
