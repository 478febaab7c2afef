use std::fmt;

use serde::Serialize;

use super::{SuccessSource, World};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "finding", rename_all = "kebab-case")]
pub enum Finding {
    Unreachable { state: usize },
    NonAbsorbingTerminal { state: usize, action: usize },
    NonAbsorbingReward { state: usize, action: usize, reward: f64 },
    DanglingIntended { state: usize, action: usize, target: usize },
    EmptyAlternates { state: usize, action: usize },
    IntendedInAlternates { state: usize, action: usize },
    BadProbability { state: usize, action: usize, value: f64 },
    NoAvailableAction { state: usize },
}

impl Finding {
    pub fn code(&self) -> &'static str {
        match self {
            Finding::Unreachable { .. } => "unreachable",
            Finding::NonAbsorbingTerminal { .. } => "non-absorbing-terminal",
            Finding::NonAbsorbingReward { .. } => "non-absorbing-reward",
            Finding::DanglingIntended { .. } => "dangling-intended",
            Finding::EmptyAlternates { .. } => "empty-alternates",
            Finding::IntendedInAlternates { .. } => "intended-in-alternates",
            Finding::BadProbability { .. } => "bad-probability",
            Finding::NoAvailableAction { .. } => "no-available-action",
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.code(), self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.findings.iter().any(|f| f.code() == code)
    }
}

/// Structural checks on a world. A clean report means every world invariant holds.
pub fn validate_world(w: &World) -> ValidationReport {
    let n = w.n_states();
    let mut findings = Vec::new();
    for s in 0..n {
        if w.available_actions(s).next().is_none() {
            findings.push(Finding::NoAvailableAction { state: s });
        }
        for a in w.available_actions(s) {
            let mv = w.get_move(s, a);
            if mv.intended >= n || mv.alternates.iter().any(|&x| x >= n) {
                findings.push(Finding::DanglingIntended {
                    state: s,
                    action: a,
                    target: mv.intended,
                });
                continue;
            }
            if w.is_terminal(s) {
                if mv.intended != s || !mv.alternates.is_empty() {
                    findings.push(Finding::NonAbsorbingTerminal { state: s, action: a });
                }
                if mv.rewards[0] != 0.0 {
                    findings.push(Finding::NonAbsorbingReward {
                        state: s,
                        action: a,
                        reward: mv.rewards[0],
                    });
                }
                continue;
            }
            if mv.alternates.contains(&mv.intended) {
                findings.push(Finding::IntendedInAlternates { state: s, action: a });
            }
            if mv.alternates.is_empty() && mv.success != SuccessSource::Certain {
                findings.push(Finding::EmptyAlternates { state: s, action: a });
            }
            if let SuccessSource::Fixed(q) = mv.success {
                if !(0.0..=1.0).contains(&q) {
                    findings.push(Finding::BadProbability {
                        state: s,
                        action: a,
                        value: q,
                    });
                }
            }
        }
    }
    // reachability over every listed outcome of available actions
    let mut seen = vec![false; n];
    let mut stack = vec![w.start()];
    if w.start() < n {
        seen[w.start()] = true;
    }
    while let Some(s) = stack.pop() {
        for a in w.available_actions(s) {
            let mv = w.get_move(s, a);
            for &t in std::iter::once(&mv.intended).chain(&mv.alternates) {
                if t < n && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    for (s, ok) in seen.iter().enumerate() {
        if !ok {
            findings.push(Finding::Unreachable { state: s });
        }
    }
    ValidationReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::WorldBuilder;

    #[test]
    fn terminal_with_self_reward_is_flagged() {
        let w = WorldBuilder::new(2, &["go"])
            .set_move(0, 0, 1, vec![0], vec![1.0, 0.0], SuccessSource::Confidence)
            .terminal(1)
            .set_move(1, 0, 1, vec![], vec![7.0], SuccessSource::Certain)
            .build();
        let r = validate_world(&w);
        assert!(r.has("non-absorbing-reward"), "{:?}", r);
        assert_eq!(r.findings.len(), 1);
    }

    #[test]
    fn island_state_is_unreachable() {
        let w = WorldBuilder::new(3, &["go"])
            .set_move(0, 0, 1, vec![0], vec![1.0, 0.0], SuccessSource::Confidence)
            .terminal(1)
            .set_move(2, 0, 1, vec![2], vec![1.0, 0.0], SuccessSource::Confidence)
            .build();
        let r = validate_world(&w);
        assert_eq!(r.findings, vec![Finding::Unreachable { state: 2 }]);
    }

    #[test]
    fn structural_violations() {
        let w = WorldBuilder::new(2, &["go", "oops"])
            .set_move(0, 0, 1, vec![1], vec![1.0, 0.0], SuccessSource::Confidence)
            .set_move(0, 1, 1, vec![], vec![0.0], SuccessSource::Confidence)
            .terminal(1)
            .set_move(1, 1, 0, vec![], vec![0.0], SuccessSource::Certain)
            .build();
        let r = validate_world(&w);
        assert!(r.has("intended-in-alternates"));
        assert!(r.has("empty-alternates"));
        assert!(r.has("non-absorbing-terminal"));
    }
}
