//! Brute-force reference implementations used as test oracles. They read the
//! model directly and share no code with the metrics engine.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;

use ckm::metrics::MetricsRow;
use ckm::model::{ClassInfo, ClassModel, MethodInfo};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
}

const PRIMS: [&str; 9] = [
    "byte", "short", "int", "long", "float", "double", "boolean", "char", "void",
];

fn is_prim(t: &str) -> bool {
    PRIMS.contains(&t)
}

/// Every type name a class mentions, with repeats.
fn mentions(class: &ClassInfo) -> Vec<&str> {
    let mut out: Vec<&str> = class.parents.iter().map(String::as_str).collect();
    for f in &class.fields {
        out.push(&f.declared_type);
    }
    for m in &class.methods {
        out.extend(m.param_types.iter().map(String::as_str));
        out.push(&m.return_type);
        for c in &m.calls {
            if c.resolved {
                out.push(
                    c.target_class
                        .as_deref()
                        .expect("resolved call has a class"),
                );
            }
        }
    }
    out
}

/// Distinct (from, to) dependency pairs with `from` in the corpus.
pub fn edges(model: &ClassModel) -> BTreeSet<(String, String)> {
    let mut set = BTreeSet::new();
    for class in model.classes().iter().filter(|c| !c.is_external) {
        for t in mentions(class) {
            if t != class.fqn && !is_prim(t) && model.classes().iter().any(|c| c.fqn == t) {
                set.insert((class.fqn.clone(), t.to_string()));
            }
        }
    }
    set
}

pub fn ce(model: &ClassModel, fqn: &str) -> usize {
    edges(model).iter().filter(|(f, _)| f == fqn).count()
}

pub fn ca(model: &ClassModel, fqn: &str) -> usize {
    edges(model).iter().filter(|(_, t)| t == fqn).count()
}

/// Longest parent path, found by enumerating every path.
pub fn dit(model: &ClassModel, fqn: &str) -> usize {
    fn walk(model: &ClassModel, fqn: &str, depth: usize, best: &mut usize) {
        *best = (*best).max(depth);
        let class = model.classes().iter().find(|c| c.fqn == fqn).unwrap();
        for p in &class.parents {
            if let Some(parent) = model.classes().iter().find(|c| &c.fqn == p) {
                if !parent.is_external {
                    walk(model, p, depth + 1, best);
                }
            }
        }
    }
    let mut best = 0;
    walk(model, fqn, 0, &mut best);
    best
}

pub fn cbo(class: &ClassInfo) -> usize {
    let mut set = BTreeSet::new();
    for m in &class.methods {
        for t in m.param_types.iter().chain(std::iter::once(&m.return_type)) {
            set.insert(t.clone());
        }
        for c in m.calls.iter().filter(|c| c.resolved) {
            set.insert(c.target_class.clone().unwrap());
        }
    }
    set.retain(|t| *t != class.fqn && !is_prim(t));
    set.len()
}

fn counted(class: &ClassInfo, include_constructors: bool) -> Vec<&MethodInfo> {
    let simple = class.fqn.rsplit('.').next().unwrap();
    class
        .methods
        .iter()
        .filter(|m| include_constructors || m.name != simple)
        .collect()
}

pub fn rfc(class: &ClassInfo, include_constructors: bool) -> usize {
    let methods = counted(class, include_constructors);
    let mut set: BTreeSet<(String, String, usize)> = methods
        .iter()
        .map(|m| (class.fqn.clone(), m.name.clone(), m.arity))
        .collect();
    for m in &methods {
        for c in m.calls.iter().filter(|c| c.resolved) {
            set.insert((
                c.target_class.clone().unwrap(),
                c.target_method.clone(),
                c.arity,
            ));
        }
    }
    set.len()
}

/// (disjoint, sharing) by enumerating every unordered pair.
pub fn pairs(methods: &[&MethodInfo]) -> (usize, usize) {
    let (mut p, mut q) = (0, 0);
    for i in 0..methods.len() {
        for j in 0..methods.len() {
            if i < j {
                if methods[i]
                    .attributes_used
                    .intersection(&methods[j].attributes_used)
                    .count()
                    == 0
                {
                    p += 1;
                } else {
                    q += 1;
                }
            }
        }
    }
    (p, q)
}

/// Connected components by breadth-first search over an adjacency matrix.
pub fn bfs_components(class: &ClassInfo, methods: &[&MethodInfo], with_calls: bool) -> usize {
    let n = methods.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j
                && !methods[i]
                    .attributes_used
                    .is_disjoint(&methods[j].attributes_used)
            {
                adj[i][j] = true;
            }
            if with_calls {
                let calls_j = methods[i].calls.iter().any(|c| {
                    c.resolved
                        && c.target_class.as_deref() == Some(class.fqn.as_str())
                        && c.target_method == methods[j].name
                        && c.arity == methods[j].arity
                });
                if calls_j && i != j {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if adj[i][j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    count
}

pub fn row(model: &ClassModel, class: &ClassInfo, include_constructors: bool) -> MetricsRow {
    let methods = counted(class, include_constructors);
    let (p, q) = pairs(&methods);
    MetricsRow {
        class_fqn: class.fqn.clone(),
        ce: ce(model, &class.fqn),
        ca: ca(model, &class.fqn),
        dit: dit(model, &class.fqn),
        cbo: cbo(class),
        rfc: rfc(class, include_constructors),
        lcom1: p,
        lcom2: p.saturating_sub(q),
        lcom3: bfs_components(class, &methods, false),
        lcom4: bfs_components(class, &methods, true),
        method_count: methods.len(),
        field_count: class.fields.len(),
    }
}

pub fn rows(model: &ClassModel, include_constructors: bool) -> Vec<MetricsRow> {
    model
        .classes()
        .iter()
        .filter(|c| !c.is_external)
        .map(|c| row(model, c, include_constructors))
        .collect()
}

/// Rank-then-Pearson with the textbook sums formula. Ranks come from counting
/// smaller and equal values.
pub fn textbook_spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    fn ranks(v: &[f64]) -> Vec<f64> {
        v.iter()
            .map(|x| {
                let less = v.iter().filter(|y| *y < x).count() as f64;
                let equal = v.iter().filter(|y| *y == x).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let sx: f64 = rx.iter().sum();
    let sy: f64 = ry.iter().sum();
    let sxx: f64 = rx.iter().map(|a| a * a).sum();
    let syy: f64 = ry.iter().map(|b| b * b).sum();
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| a * b).sum();
    let den = ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    if den == 0.0 {
        None
    } else {
        Some((n * sxy - sx * sy) / den)
    }
}
