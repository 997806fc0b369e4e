//! LCOM family.

use petgraph::unionfind::UnionFind;
use std::collections::HashMap;

use crate::model::MethodInfo;

/// Counts unordered method pairs as (disjoint, sharing) by attribute set.
/// Two empty sets are disjoint.
pub fn pair_counts(methods: &[&MethodInfo]) -> (usize, usize) {
    let mut disjoint = 0;
    let mut sharing = 0;
    for (i, a) in methods.iter().enumerate() {
        for b in &methods[i + 1..] {
            if a.attributes_used.is_disjoint(&b.attributes_used) {
                disjoint += 1;
            } else {
                sharing += 1;
            }
        }
    }
    (disjoint, sharing)
}

/// Connected components of the method graph where an edge joins methods that
/// share an attribute. With `call_edges`, a resolved call from one method to
/// another method of `class_fqn` in `methods` also joins them.
pub fn components(class_fqn: &str, methods: &[&MethodInfo], call_edges: bool) -> usize {
    if methods.is_empty() {
        return 0;
    }
    let mut sets = UnionFind::<usize>::new(methods.len());

    let mut first_user: HashMap<&str, usize> = HashMap::new();
    for (idx, method) in methods.iter().enumerate() {
        for attr in &method.attributes_used {
            match first_user.get(attr.as_str()) {
                Some(&other) => {
                    sets.union(other, idx);
                }
                None => {
                    first_user.insert(attr, idx);
                }
            }
        }
    }

    if call_edges {
        let by_identity: HashMap<(&str, usize), usize> = methods
            .iter()
            .enumerate()
            .map(|(idx, m)| ((m.name.as_str(), m.arity), idx))
            .collect();
        for (idx, method) in methods.iter().enumerate() {
            for call in &method.calls {
                if !call.resolved || call.target_class.as_deref() != Some(class_fqn) {
                    continue;
                }
                if let Some(&callee) = by_identity.get(&(call.target_method.as_str(), call.arity)) {
                    sets.union(idx, callee);
                }
            }
        }
    }

    let mut labels = sets.into_labeling();
    labels.sort_unstable();
    labels.dedup();
    labels.len()
}
