use std::collections::HashMap;

use super::{MetricsEngine, MetricsError};

enum State {
    Visiting,
    Done(usize),
}

impl MetricsEngine<'_> {
    /// Longest chain of in-corpus parents from `fqn` to a root. Parents that
    /// are external stubs do not add depth.
    pub fn depth_of_inheritance(&self, fqn: &str) -> Result<usize, MetricsError> {
        self.internal(fqn)?;
        let mut memo = HashMap::new();
        self.depth(fqn, &mut memo, &mut Vec::new())
    }

    pub(super) fn depth_table(&self) -> Result<HashMap<&str, usize>, MetricsError> {
        let mut memo = HashMap::new();
        for class in self.model.internal_classes() {
            self.depth(&class.fqn, &mut memo, &mut Vec::new())?;
        }
        Ok(memo
            .into_iter()
            .filter_map(|(k, v)| match v {
                State::Done(d) => Some((k, d)),
                State::Visiting => None,
            })
            .collect())
    }

    fn depth<'a>(
        &'a self,
        fqn: &'a str,
        memo: &mut HashMap<&'a str, State>,
        path: &mut Vec<&'a str>,
    ) -> Result<usize, MetricsError> {
        match memo.get(fqn) {
            Some(State::Done(d)) => return Ok(*d),
            Some(State::Visiting) => {
                let start = path.iter().position(|c| *c == fqn).unwrap_or(0);
                let mut cycle: Vec<String> = path[start..].iter().map(|c| c.to_string()).collect();
                cycle.push(fqn.to_string());
                return Err(MetricsError::Cycle(cycle));
            }
            None => {}
        }
        let Some(class) = self.model.class(fqn) else {
            return Ok(0);
        };
        memo.insert(&class.fqn, State::Visiting);
        path.push(&class.fqn);
        let mut best = 0;
        for parent in &class.parents {
            let Some(parent_class) = self.model.class(parent) else {
                continue;
            };
            if parent_class.is_external {
                continue;
            }
            best = best.max(self.depth(&parent_class.fqn, memo, path)? + 1);
        }
        path.pop();
        memo.insert(&class.fqn, State::Done(best));
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use crate::metrics::*;
    use crate::model::{ClassInfo, ClassKind, ClassModel};

    fn class(fqn: &str, parents: &[&str]) -> ClassInfo {
        let mut c = ClassInfo::new(fqn, ClassKind::Class);
        for p in parents {
            c = c.with_parent(*p);
        }
        c
    }

    #[test]
    fn root_and_chain() {
        let model = ClassModel::new(
            vec![class("A", &[]), class("B", &["A"]), class("C", &["B"])],
            vec![],
        );
        assert_eq!(depth_of_inheritance(&model, "A").unwrap(), 0);
        assert_eq!(depth_of_inheritance(&model, "C").unwrap(), 2);
    }

    #[test]
    fn diamond_takes_longest_arm() {
        // D reaches root R through a 2-step arm and a 4-step arm.
        let model = ClassModel::new(
            vec![
                class("R", &[]),
                class("S1", &["R"]),
                class("L1", &["R"]),
                class("L2", &["L1"]),
                class("L3", &["L2"]),
                class("D", &["S1", "L3"]),
            ],
            vec![],
        );
        assert_eq!(depth_of_inheritance(&model, "D").unwrap(), 4);
    }

    #[test]
    fn external_parent_is_a_root() {
        let model = ClassModel::new(
            vec![
                class("A", &["java.lang.Thread"]),
                ClassInfo::external("java.lang.Thread"),
            ],
            vec![],
        );
        assert_eq!(depth_of_inheritance(&model, "A").unwrap(), 0);
    }

    #[test]
    fn cycle_is_an_error() {
        let model = ClassModel::new(vec![class("A", &["B"]), class("B", &["A"])], vec![]);
        match depth_of_inheritance(&model, "A") {
            Err(MetricsError::Cycle(cycle)) => assert_eq!(cycle, ["A", "B", "A"]),
            other => panic!("expected cycle, got {other:?}"),
        }
        assert!(compute_all(&model).is_err());
    }
}
