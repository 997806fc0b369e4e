use std::collections::{BTreeMap, BTreeSet};

use super::{is_primitive, ClassModel, Diagnostic, Location};

/// Checks every model invariant and returns one error diagnostic per
/// violation. An empty result means the model is valid.
pub fn validate(model: &ClassModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut report = |message: String| out.push(Diagnostic::error(Location::model(), message));

    let mut seen_fqns: BTreeMap<&str, usize> = BTreeMap::new();
    for class in model.classes() {
        *seen_fqns.entry(class.fqn.as_str()).or_default() += 1;
    }
    for (fqn, count) in &seen_fqns {
        if *count > 1 {
            report(format!("duplicate class `{fqn}` ({count} declarations)"));
        }
    }

    let known = |fqn: &str| seen_fqns.contains_key(fqn);

    for class in model.classes() {
        let fqn = &class.fqn;
        if fqn.is_empty() {
            report("class with empty fqn".to_string());
            continue;
        }
        let expected_prefix_ok = if class.package.is_empty() {
            !fqn.contains('.')
        } else {
            fqn.strip_prefix(class.package.as_str())
                .and_then(|rest| rest.strip_prefix('.'))
                .is_some_and(|simple| !simple.is_empty() && !simple.contains('.'))
        };
        if !expected_prefix_ok {
            report(format!(
                "class `{fqn}` does not belong to package `{}`",
                class.package
            ));
        }

        if class.is_external && (!class.fields.is_empty() || !class.methods.is_empty()) {
            report(format!("external stub `{fqn}` declares members"));
        }

        for parent in &class.parents {
            if !known(parent) {
                report(format!("class `{fqn}` extends unknown class `{parent}`"));
            }
        }

        let mut field_names = BTreeSet::new();
        for field in &class.fields {
            if !is_identifier(&field.name) {
                report(format!(
                    "class `{fqn}` has a field with invalid name `{}`",
                    field.name
                ));
            }
            if !field_names.insert(field.name.as_str()) {
                report(format!(
                    "class `{fqn}` declares field `{}` twice",
                    field.name
                ));
            }
            check_type(&mut report, fqn, &field.declared_type, &known, "field type");
        }

        let visible_fields: BTreeSet<&str> = model
            .ancestry(fqn)
            .into_iter()
            .filter_map(|c| model.class(c))
            .flat_map(|c| c.fields.iter().map(|f| f.name.as_str()))
            .collect();

        let mut method_ids = BTreeSet::new();
        for method in &class.methods {
            let sig = format!("{fqn}.{}/{}", method.name, method.arity);
            if !is_identifier(&method.name) {
                report(format!("method `{sig}` has an invalid name"));
            }
            if !method_ids.insert(method.identity()) {
                report(format!("method `{sig}` declared twice"));
            }
            if method.arity != method.param_types.len() {
                report(format!(
                    "method `{sig}` lists {} parameter types",
                    method.param_types.len()
                ));
            }
            for param in &method.param_types {
                check_type(&mut report, fqn, param, &known, "parameter type");
            }
            check_type(&mut report, fqn, &method.return_type, &known, "return type");

            for attr in &method.attributes_used {
                if !visible_fields.contains(attr.as_str()) {
                    report(format!("method `{sig}` uses unknown attribute `{attr}`"));
                }
            }

            for call in &method.calls {
                let target = call.target_class.as_deref();
                if let Some(target) = target {
                    if !known(target) {
                        report(format!(
                            "method `{sig}` calls into unknown class `{target}`"
                        ));
                        continue;
                    }
                }
                if call.resolved {
                    match target {
                        None => report(format!(
                            "method `{sig}` has a resolved call to `{}` without a target class",
                            call.target_method
                        )),
                        Some(target) => {
                            if !call_target_exists(model, target, &call.target_method, call.arity) {
                                report(format!(
                                    "method `{sig}` has a resolved call to missing `{target}.{}/{}`",
                                    call.target_method, call.arity
                                ));
                            }
                        }
                    }
                }
            }
        }
    }

    for cycle in inheritance_cycles(model) {
        report(format!("inheritance cycle: {}", cycle.join(" -> ")));
    }

    out
}

/// A resolved target exists if it, or an ancestor, declares the method, or if
/// the search reaches an external stub whose members are unknown.
fn call_target_exists(model: &ClassModel, target: &str, name: &str, arity: usize) -> bool {
    model
        .ancestry(target)
        .into_iter()
        .filter_map(|c| model.class(c))
        .any(|c| c.is_external || c.method(name, arity).is_some())
}

fn check_type(
    report: &mut impl FnMut(String),
    owner: &str,
    type_name: &str,
    known: &impl Fn(&str) -> bool,
    what: &str,
) {
    if type_name.is_empty() {
        report(format!("class `{owner}` has an empty {what}"));
    } else if !is_primitive(type_name) && !known(type_name) {
        report(format!(
            "class `{owner}` references unknown {what} `{type_name}`"
        ));
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' || c == '$' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

/// Finds inheritance cycles by depth-first search. Each back edge yields one
/// cycle, listed from the repeated class round to itself.
pub fn inheritance_cycles(model: &ClassModel) -> Vec<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }

    fn visit<'a>(
        model: &'a ClassModel,
        fqn: &'a str,
        marks: &mut BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
        cycles: &mut Vec<Vec<String>>,
    ) {
        marks.insert(fqn, Mark::Active);
        stack.push(fqn);
        if let Some(class) = model.class(fqn) {
            for parent in &class.parents {
                match marks.get(parent.as_str()) {
                    Some(Mark::Active) => {
                        let start = stack.iter().position(|c| *c == parent).unwrap_or(0);
                        let mut cycle: Vec<String> =
                            stack[start..].iter().map(|c| c.to_string()).collect();
                        cycle.push(parent.clone());
                        cycles.push(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => visit(model, parent, marks, stack, cycles),
                }
            }
        }
        stack.pop();
        marks.insert(fqn, Mark::Done);
    }

    let mut marks = BTreeMap::new();
    let mut cycles = Vec::new();
    for class in model.classes() {
        if !marks.contains_key(class.fqn.as_str()) {
            let mut stack = Vec::new();
            visit(model, &class.fqn, &mut marks, &mut stack, &mut cycles);
        }
    }
    cycles
}
