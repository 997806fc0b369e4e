//! Seeded synthetic class models.
//!
//! Output is a pure function of [`GenSpec`]: the PRNG is PCG64
//! (XSL-RR 128/64, `rand_pcg::Pcg64`) seeded with `seed_from_u64`, and draws
//! happen in a fixed sequential order. Parents are only drawn from classes
//! generated earlier, so inheritance is acyclic by construction.
//!
//! `attribute_sharing` controls cohesion. Each class with fields reserves its
//! first field as a hub; every method uses the hub with probability equal to
//! the knob, and the remaining fields are split between methods so that no
//! two methods share them. At 1.0 every method pair shares the hub; at 0.0
//! there is no hub and all attribute sets are pairwise disjoint.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use thiserror::Error;

use crate::model::{CallSite, ClassInfo, ClassKind, ClassModel, FieldInfo, MethodInfo};

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub seed: u64,
    pub n_classes: usize,
    pub n_packages: usize,
    pub max_methods: usize,
    pub max_fields: usize,
    pub inheritance_prob: f64,
    pub cross_class_call_prob: f64,
    pub attribute_sharing: f64,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            n_classes: 10,
            n_packages: 1,
            max_methods: 5,
            max_fields: 4,
            inheritance_prob: 0.3,
            cross_class_call_prob: 0.3,
            attribute_sharing: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    InvalidSpec(String),
    #[error("unsatisfiable generator parameters: {0}")]
    Unsatisfiable(String),
}

const PRIMITIVE_TYPES: &[&str] = &["int", "long", "boolean", "double"];
const EXTERNAL_TYPES: &[&str] = &["ext.Clock", "ext.Logger", "ext.Store"];
const INTERFACE_PROB: f64 = 0.1;
const CALL_SLOTS: usize = 3;
const INTERNAL_TARGET_PROB: f64 = 0.85;
const INTRA_CALL_PROB: f64 = 0.2;

impl GenSpec {
    pub fn check(&self) -> Result<(), GenError> {
        if self.n_packages == 0 {
            return Err(GenError::InvalidSpec(
                "n_packages must be at least 1".into(),
            ));
        }
        for (name, p) in [
            ("inheritance_prob", self.inheritance_prob),
            ("cross_class_call_prob", self.cross_class_call_prob),
            ("attribute_sharing", self.attribute_sharing),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GenError::InvalidSpec(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        if self.max_fields == 0 && self.attribute_sharing > 0.0 {
            return Err(GenError::Unsatisfiable(
                "attribute_sharing > 0 needs at least one field per class (max_fields = 0)".into(),
            ));
        }
        Ok(())
    }
}

pub fn generate(spec: &GenSpec) -> Result<ClassModel, GenError> {
    spec.check()?;
    let mut externals = BTreeSet::new();
    let mut classes = generate_classes(spec, "", &mut externals);
    classes.extend(externals.into_iter().map(ClassInfo::external));
    Ok(ClassModel::new(classes, Vec::new()))
}

/// Generates one sub-corpus per spec, each under its own `s<k>.` package
/// prefix, and merges them. Calls and type references stay within a stratum;
/// external stubs are shared. Useful for corpora whose classes follow
/// different knob settings.
pub fn generate_strata(strata: &[GenSpec]) -> Result<ClassModel, GenError> {
    let mut externals = BTreeSet::new();
    let mut classes = Vec::new();
    for (k, spec) in strata.iter().enumerate() {
        spec.check()?;
        classes.extend(generate_classes(spec, &format!("s{k}."), &mut externals));
    }
    classes.extend(externals.into_iter().map(ClassInfo::external));
    Ok(ClassModel::new(classes, Vec::new()))
}

fn class_name(prefix: &str, spec: &GenSpec, idx: usize) -> String {
    format!("{prefix}pkg{}.C{idx}", idx % spec.n_packages)
}

fn pick<'a, T>(rng: &mut Pcg64, items: &'a [T]) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.random_range(0..items.len())])
    }
}

fn random_type(
    rng: &mut Pcg64,
    spec: &GenSpec,
    prefix: &str,
    own: usize,
    externals: &mut BTreeSet<String>,
) -> String {
    let roll: f64 = rng.random();
    if roll < 0.7 || spec.n_classes == 0 {
        PRIMITIVE_TYPES[rng.random_range(0..PRIMITIVE_TYPES.len())].to_string()
    } else if roll < 0.9 {
        let idx = rng.random_range(0..spec.n_classes);
        if idx == own {
            "int".to_string()
        } else {
            class_name(prefix, spec, idx)
        }
    } else {
        let ext = EXTERNAL_TYPES[rng.random_range(0..EXTERNAL_TYPES.len())].to_string();
        externals.insert(ext.clone());
        ext
    }
}

fn generate_classes(
    spec: &GenSpec,
    prefix: &str,
    externals: &mut BTreeSet<String>,
) -> Vec<ClassInfo> {
    let mut rng = Pcg64::seed_from_u64(spec.seed);
    let mut classes: Vec<ClassInfo> = Vec::with_capacity(spec.n_classes);

    for idx in 0..spec.n_classes {
        let fqn = class_name(prefix, spec, idx);
        let kind = if idx > 0 && rng.random_bool(INTERFACE_PROB) {
            ClassKind::Interface
        } else {
            ClassKind::Class
        };
        let mut class = ClassInfo::new(fqn, kind);

        let earlier = |k: ClassKind| -> Vec<String> {
            classes
                .iter()
                .filter(|c| c.kind == k)
                .map(|c| c.fqn.clone())
                .collect()
        };
        match kind {
            ClassKind::Class => {
                if rng.random_bool(spec.inheritance_prob) {
                    if let Some(parent) = pick(&mut rng, &earlier(ClassKind::Class)) {
                        class.parents.push(parent.clone());
                    }
                }
                if rng.random_bool(spec.inheritance_prob / 2.0) {
                    if let Some(iface) = pick(&mut rng, &earlier(ClassKind::Interface)) {
                        class.parents.push(iface.clone());
                    }
                }
            }
            ClassKind::Interface => {
                if rng.random_bool(spec.inheritance_prob) {
                    if let Some(parent) = pick(&mut rng, &earlier(ClassKind::Interface)) {
                        class.parents.push(parent.clone());
                    }
                }
                // Marker interfaces: no members.
                classes.push(class);
                continue;
            }
        }

        let n_methods = rng.random_range(0..=spec.max_methods);
        let mut n_fields = rng.random_range(0..=spec.max_fields);
        if spec.attribute_sharing > 0.0 && n_methods > 0 && n_fields == 0 {
            n_fields = 1;
        }
        for f in 0..n_fields {
            let ty = random_type(&mut rng, spec, prefix, idx, externals);
            class.fields.push(FieldInfo::new(format!("f{f}"), ty));
        }

        for m in 0..n_methods {
            let arity = rng.random_range(0..=2);
            let params = (0..arity)
                .map(|_| random_type(&mut rng, spec, prefix, idx, externals))
                .collect();
            let returns = if rng.random_bool(0.4) {
                "void".to_string()
            } else {
                random_type(&mut rng, spec, prefix, idx, externals)
            };
            class
                .methods
                .push(MethodInfo::new(format!("m{m}"), params, returns));
        }

        if n_methods > 0 {
            let hub = spec.attribute_sharing > 0.0;
            let private_start = usize::from(hub);
            for f in private_start..n_fields {
                let owner = rng.random_range(0..n_methods);
                class.methods[owner].attributes_used.insert(format!("f{f}"));
            }
            if hub {
                for method in &mut class.methods {
                    if rng.random_bool(spec.attribute_sharing) {
                        method.attributes_used.insert("f0".to_string());
                    }
                }
            }
        }
        classes.push(class);
    }

    // Calls are drawn once every signature exists.
    let callable: Vec<usize> = (0..classes.len())
        .filter(|&i| !classes[i].methods.is_empty())
        .collect();
    for idx in 0..classes.len() {
        let n_methods = classes[idx].methods.len();
        for m in 0..n_methods {
            let mut calls = Vec::new();
            for _ in 0..CALL_SLOTS {
                if !rng.random_bool(spec.cross_class_call_prob) {
                    continue;
                }
                if rng.random_bool(INTERNAL_TARGET_PROB) {
                    let Some(&target) = pick(&mut rng, &callable) else {
                        continue;
                    };
                    if target == idx {
                        continue;
                    }
                    let callee = &classes[target].methods
                        [rng.random_range(0..classes[target].methods.len())];
                    calls.push(CallSite::resolved(
                        &classes[target].fqn,
                        &callee.name,
                        callee.arity,
                    ));
                } else {
                    let ext = EXTERNAL_TYPES[rng.random_range(0..EXTERNAL_TYPES.len())];
                    externals.insert(ext.to_string());
                    let op = format!("op{}", rng.random_range(0..3));
                    calls.push(CallSite::resolved(ext, op, rng.random_range(0..=1)));
                }
            }
            if n_methods > 1 && rng.random_bool(INTRA_CALL_PROB) {
                let other = (m + rng.random_range(1..n_methods)) % n_methods;
                let callee = &classes[idx].methods[other];
                calls.push(CallSite::resolved(
                    &classes[idx].fqn,
                    &callee.name,
                    callee.arity,
                ));
            }
            classes[idx].methods[m].calls.extend(calls);
        }
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::compute_all;
    use crate::model::{export_model, validate};

    #[test]
    fn zero_classes_is_empty() {
        let model = generate(&GenSpec {
            n_classes: 0,
            ..GenSpec::default()
        })
        .unwrap();
        assert!(model.is_empty());
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = GenSpec {
            seed: 7,
            n_classes: 30,
            n_packages: 3,
            ..GenSpec::default()
        };
        let a = export_model(&generate(&spec).unwrap()).unwrap();
        let b = export_model(&generate(&spec).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = export_model(&generate(&GenSpec { seed: 8, ..spec }).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn output_is_valid() {
        for seed in 0..50 {
            let model = generate(&GenSpec {
                seed,
                n_classes: 25,
                n_packages: 4,
                inheritance_prob: 0.7,
                ..GenSpec::default()
            })
            .unwrap();
            assert!(
                validate(&model).is_empty(),
                "seed {seed}: {:?}",
                validate(&model)
            );
        }
    }

    #[test]
    fn full_sharing_gives_single_component() {
        for seed in 0..20 {
            let model = generate(&GenSpec {
                seed,
                n_classes: 20,
                attribute_sharing: 1.0,
                ..GenSpec::default()
            })
            .unwrap();
            for row in compute_all(&model).unwrap() {
                if row.method_count >= 1 {
                    assert_eq!(row.lcom3, 1, "seed {seed} {}", row.class_fqn);
                }
            }
        }
    }

    #[test]
    fn zero_sharing_makes_every_pair_disjoint() {
        for seed in 0..20 {
            let model = generate(&GenSpec {
                seed,
                n_classes: 20,
                attribute_sharing: 0.0,
                ..GenSpec::default()
            })
            .unwrap();
            for row in compute_all(&model).unwrap() {
                let m = row.method_count;
                assert_eq!(row.lcom1, m * m.saturating_sub(1) / 2, "seed {seed}");
            }
        }
    }

    #[test]
    fn unsatisfiable_and_invalid_specs() {
        let no_fields = GenSpec {
            max_fields: 0,
            attribute_sharing: 0.5,
            ..GenSpec::default()
        };
        assert!(matches!(
            generate(&no_fields),
            Err(GenError::Unsatisfiable(_))
        ));
        let bad_prob = GenSpec {
            inheritance_prob: 1.5,
            ..GenSpec::default()
        };
        assert!(matches!(generate(&bad_prob), Err(GenError::InvalidSpec(_))));
        let no_packages = GenSpec {
            n_packages: 0,
            ..GenSpec::default()
        };
        assert!(generate(&no_packages).is_err());
    }

    #[test]
    fn packages_round_robin() {
        let model = generate(&GenSpec {
            n_classes: 6,
            n_packages: 3,
            ..GenSpec::default()
        })
        .unwrap();
        let expected: BTreeSet<String> = ["pkg0", "pkg1", "pkg2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(model.packages(), &expected);
    }

    #[test]
    fn strata_are_prefixed_and_valid() {
        let model = generate_strata(&[
            GenSpec {
                seed: 1,
                ..GenSpec::default()
            },
            GenSpec {
                seed: 2,
                ..GenSpec::default()
            },
        ])
        .unwrap();
        assert!(validate(&model).is_empty());
        assert_eq!(model.internal_classes().count(), 20);
        assert!(model
            .internal_classes()
            .all(|c| c.fqn.starts_with("s0.") || c.fqn.starts_with("s1.")));
    }

    #[test]
    fn lower_sharing_means_higher_mean_lcom2() {
        let mean_lcom2 = |sharing: f64| {
            let mut total = 0usize;
            let mut count = 0usize;
            for seed in 0..30 {
                let model = generate(&GenSpec {
                    seed,
                    n_classes: 20,
                    max_methods: 8,
                    attribute_sharing: sharing,
                    ..GenSpec::default()
                })
                .unwrap();
                for row in compute_all(&model).unwrap() {
                    total += row.lcom2;
                    count += 1;
                }
            }
            total as f64 / count as f64
        };
        assert!(mean_lcom2(0.1) > mean_lcom2(0.9));
    }
}
