//! From a policy to a behavior label.
//!
//! A policy is rolled out deterministically from the start state and the
//! resulting trajectory is classified by a per-world rule. Two rollout
//! dynamics exist: [`rollout`] follows intended outcomes, [`rollout_likely`]
//! follows the outcome the user considers most likely (ties broken toward
//! the successor worth most to them). The map pipeline uses the latter,
//! since below `p = 1/(|alternates| + 1)` the best plan asks for a move the
//! user expects to fail.

use serde::{Deserialize, Serialize};

use crate::perception::UserMdp;
use crate::planner::{Policy, ValueFunction};
use crate::world::World;

pub const WANDER: &str = "wander";

/// Per-world behavior rule. State indices refer to the owning world.
#[derive(Clone, Debug, PartialEq)]
pub enum Classifier {
    /// Which of two terminals the rollout ends in.
    BigSmall { big: usize, small: usize },
    /// Risky when the rollout touches a cliff-adjacent cell; `disengage`
    /// adds a third behaviour for the composed world.
    Cliff {
        near_cliff: Vec<bool>,
        disengage: Option<usize>,
    },
    /// Through-wall when the rollout enters the penalized wall cell.
    Wall { penalty: usize },
    /// Disengage when any visited state's action is `disengage_action`.
    Chain { disengage_action: usize },
    /// The policy's action at the start state names the behavior.
    StartAction { names: Vec<String> },
    /// Which eatery the rollout ends in.
    Cafe {
        donuts: Vec<usize>,
        noodle: usize,
        vegan: usize,
        three_way: bool,
    },
}

impl Classifier {
    /// Label names by index. Index 0 is the first palette color.
    pub fn palette(&self) -> Vec<String> {
        let names: &[&str] = match self {
            Classifier::BigSmall { .. } => &["big", "small", WANDER],
            Classifier::Cliff { disengage: None, .. } => &["risky", "safe", WANDER],
            Classifier::Cliff { disengage: Some(_), .. } => &["risky", "safe", "disengage", WANDER],
            Classifier::Wall { .. } => &["around-wall", "through-wall", WANDER],
            Classifier::Chain { .. } => &["exercise", "disengage"],
            Classifier::StartAction { names } => return names.clone(),
            Classifier::Cafe { three_way: false, .. } => &["healthy", "donut", WANDER],
            Classifier::Cafe { three_way: true, .. } => &["vegan", "donut", "noodle", WANDER],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    fn label(&self, name: &str) -> BehaviorLabel {
        let palette = self.palette();
        let index = palette
            .iter()
            .position(|n| n == name)
            .unwrap_or_else(|| panic!("label `{name}` not in palette"));
        BehaviorLabel {
            index,
            name: palette[index].clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BehaviorLabel {
    pub index: usize,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub visited: Vec<usize>,
    pub actions: Vec<usize>,
    pub terminated: bool,
    pub steps: usize,
}

pub fn default_horizon(w: &World) -> usize {
    4 * w.n_states()
}

fn follow(w: &World, pi: &Policy, horizon: usize, mut succ: impl FnMut(usize, usize) -> usize) -> Trajectory {
    let mut s = w.start();
    let mut visited = vec![s];
    let mut actions = Vec::new();
    let mut steps = 0;
    while !w.is_terminal(s) && steps < horizon {
        let a = pi.action(s);
        s = succ(s, a);
        actions.push(a);
        visited.push(s);
        steps += 1;
    }
    Trajectory {
        terminated: w.is_terminal(s),
        visited,
        actions,
        steps,
    }
}

/// Follows `pi` from the start under intended outcomes.
pub fn rollout(w: &World, pi: &Policy, horizon: usize) -> Trajectory {
    follow(w, pi, horizon, |s, a| w.get_move(s, a).intended)
}

/// Follows `pi` from the start, moving each step to the highest-probability
/// successor under the user's own transition model. Equally likely successors
/// are ranked by `R(s,a,s') + γ v(s')`, then by state index.
pub fn rollout_likely(m: &UserMdp<'_>, v: &ValueFunction, pi: &Policy, horizon: usize) -> Trajectory {
    let w = m.world();
    let gamma = m.gamma();
    follow(w, pi, horizon, |s, a| likely_successor(m, &v.values, gamma, s, a))
}

fn likely_successor(m: &UserMdp<'_>, values: &[f64], gamma: f64, s: usize, a: usize) -> usize {
    let mut best: Option<(f64, f64, usize)> = None;
    for o in m.row(s, a) {
        let worth = o.reward + gamma * values[o.next];
        let take = match best {
            None => true,
            Some((bp, bw, bs)) => {
                let tol = 1e-12;
                if o.prob > bp + tol {
                    true
                } else if (o.prob - bp).abs() <= tol {
                    worth > bw || (worth == bw && o.next < bs)
                } else {
                    false
                }
            }
        };
        if take {
            best = Some((o.prob, worth, o.next));
        }
    }
    best.map(|b| b.2).unwrap_or(s)
}

/// Labels a trajectory produced by either rollout.
pub fn classify_trajectory(w: &World, pi: &Policy, traj: &Trajectory) -> BehaviorLabel {
    let c = w.classifier();
    let last = *traj.visited.last().expect("trajectory has a start state");
    match c {
        Classifier::BigSmall { big, small } => {
            if traj.terminated && last == *big {
                c.label("big")
            } else if traj.terminated && last == *small {
                c.label("small")
            } else {
                c.label(WANDER)
            }
        }
        Classifier::Cliff { near_cliff, disengage } => {
            if let Some(d) = disengage {
                if traj.terminated && last == *d {
                    return c.label("disengage");
                }
            }
            if !traj.terminated {
                c.label(WANDER)
            } else if traj.visited.iter().any(|&s| near_cliff[s]) {
                c.label("risky")
            } else {
                c.label("safe")
            }
        }
        Classifier::Wall { penalty } => {
            if !traj.terminated {
                c.label(WANDER)
            } else if traj.visited.contains(penalty) {
                c.label("through-wall")
            } else {
                c.label("around-wall")
            }
        }
        Classifier::Chain { disengage_action } => {
            let disengages = traj
                .visited
                .iter()
                .filter(|&&s| !w.is_terminal(s))
                .any(|&s| pi.action(s) == *disengage_action);
            if disengages {
                c.label("disengage")
            } else {
                c.label("exercise")
            }
        }
        Classifier::StartAction { names } => {
            let a = pi.action(w.start());
            BehaviorLabel {
                index: a,
                name: names[a].clone(),
            }
        }
        Classifier::Cafe {
            donuts,
            noodle,
            vegan,
            three_way,
        } => {
            if !traj.terminated {
                c.label(WANDER)
            } else if donuts.contains(&last) {
                c.label("donut")
            } else if last == *noodle {
                c.label(if *three_way { "noodle" } else { "healthy" })
            } else if last == *vegan {
                c.label(if *three_way { "vegan" } else { "healthy" })
            } else {
                c.label(WANDER)
            }
        }
    }
}

/// Classifies `pi` from its intended-outcome rollout.
pub fn classify_behavior(w: &World, pi: &Policy) -> BehaviorLabel {
    let traj = rollout(w, pi, default_horizon(w));
    classify_trajectory(w, pi, &traj)
}

/// Classifies the optimal plan of a solved user MDP from its likely-outcome rollout.
pub fn classify_plan(m: &UserMdp<'_>, v: &ValueFunction, pi: &Policy) -> BehaviorLabel {
    let w = m.world();
    let traj = rollout_likely(m, v, pi, default_horizon(w));
    classify_trajectory(w, pi, &traj)
}
