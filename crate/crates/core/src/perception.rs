//! The user-perceived MDP induced by a world and a (myopia, confidence) pair.
//!
//! Under confidence `p` an action reaches its intended successor with
//! probability `p`; the remaining `1 - p` is split equally across the
//! alternates. Moves whose success is a task constant use that constant
//! instead, and certain moves are point masses.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{AtlasError, Result};
use crate::world::{SuccessSource, World};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserTraits {
    /// Discount factor, in `[0, 1)`.
    pub gamma: f64,
    /// Confidence, in `[0, 1]`.
    pub p: f64,
}

impl UserTraits {
    pub fn new(gamma: f64, p: f64) -> Result<Self> {
        let t = UserTraits { gamma, p };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(AtlasError::TraitOutOfRange(format!(
                "gamma = {} not in [0, 1)",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(AtlasError::TraitOutOfRange(format!("p = {} not in [0, 1]", self.p)));
        }
        Ok(())
    }
}

/// Perceived MDP with transition rows stored over each move's support.
#[derive(Clone, Debug)]
pub struct UserMdp<'w> {
    world: &'w World,
    traits: UserTraits,
    n_actions: usize,
    offsets: Vec<usize>,
    next: Vec<usize>,
    prob: Vec<f64>,
    reward: Vec<f64>,
    expected_reward: Vec<f64>,
}

pub fn build_user_mdp(world: &World, traits: UserTraits) -> Result<UserMdp<'_>> {
    traits.validate()?;
    let n_states = world.n_states();
    let n_actions = world.n_actions();
    let mut offsets = Vec::with_capacity(n_states * n_actions + 1);
    let mut next = Vec::new();
    let mut prob = Vec::new();
    let mut reward = Vec::new();
    let mut expected_reward = Vec::with_capacity(n_states * n_actions);
    offsets.push(0);
    for s in 0..n_states {
        for a in 0..n_actions {
            let mv = world.get_move(s, a);
            let success = match mv.success {
                SuccessSource::Confidence => traits.p,
                SuccessSource::Fixed(q) => q,
                SuccessSource::Certain => 1.0,
            };
            let mut er = 0.0;
            if world.is_terminal(s) || mv.alternates.is_empty() {
                next.push(mv.intended);
                prob.push(1.0);
                reward.push(mv.rewards[0]);
                er += mv.rewards[0];
            } else {
                next.push(mv.intended);
                prob.push(success);
                reward.push(mv.rewards[0]);
                er += success * mv.rewards[0];
                let share = (1.0 - success) / mv.alternates.len() as f64;
                for (alt, r) in mv.alternates.iter().zip(&mv.rewards[1..]) {
                    next.push(*alt);
                    prob.push(share);
                    reward.push(*r);
                    er += share * r;
                }
            }
            expected_reward.push(er);
            offsets.push(next.len());
        }
    }
    Ok(UserMdp {
        world,
        traits,
        n_actions,
        offsets,
        next,
        prob,
        reward,
        expected_reward,
    })
}

/// One support entry of a transition row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub next: usize,
    pub prob: f64,
    pub reward: f64,
}

impl<'w> UserMdp<'w> {
    pub fn world(&self) -> &'w World {
        self.world
    }

    pub fn traits(&self) -> UserTraits {
        self.traits
    }

    pub fn gamma(&self) -> f64 {
        self.traits.gamma
    }

    pub fn n_states(&self) -> usize {
        self.world.n_states()
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    fn row_range(&self, s: usize, a: usize) -> std::ops::Range<usize> {
        let i = s * self.n_actions + a;
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn row(&self, s: usize, a: usize) -> impl Iterator<Item = Outcome> + '_ {
        self.row_range(s, a).map(move |k| Outcome {
            next: self.next[k],
            prob: self.prob[k],
            reward: self.reward[k],
        })
    }

    /// `T(s, a, s')`; sums duplicate support entries.
    pub fn prob(&self, s: usize, a: usize, next: usize) -> f64 {
        self.row(s, a).filter(|o| o.next == next).map(|o| o.prob).sum()
    }

    /// `Σ_s' T(s,a,s') R(s,a,s')`.
    #[inline]
    pub fn expected_reward(&self, s: usize, a: usize) -> f64 {
        self.expected_reward[s * self.n_actions + a]
    }

    /// `Q(s,a) = Σ_s' T(s,a,s') [R(s,a,s') + γ v(s')]`.
    #[inline]
    pub fn q_value(&self, values: &[f64], s: usize, a: usize) -> f64 {
        let mut acc = 0.0;
        for k in self.row_range(s, a) {
            acc += self.prob[k] * values[self.next[k]];
        }
        self.expected_reward[s * self.n_actions + a] + self.traits.gamma * acc
    }

    /// Debug dump: `state,action,next_state,probability`, one line per support entry.
    pub fn transitions_csv(&self) -> String {
        let mut out = String::from("state,action,next_state,probability\n");
        for s in 0..self.n_states() {
            for a in 0..self.n_actions {
                for o in self.row(s, a) {
                    let _ = writeln!(out, "{s},{a},{},{:.17e}", o.next, o.prob);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{make_big_small, make_chain, WorldKind, WorldParams};

    fn big_small() -> World {
        make_big_small(&WorldParams::defaults(WorldKind::BigSmall)).unwrap()
    }

    #[test]
    fn p_one_is_point_mass_on_intended() {
        let w = big_small();
        let m = build_user_mdp(&w, UserTraits::new(0.9, 1.0).unwrap()).unwrap();
        for s in 0..w.n_states() {
            for a in 0..w.n_actions() {
                let intended = w.get_move(s, a).intended;
                assert_eq!(m.prob(s, a, intended), 1.0);
            }
        }
    }

    #[test]
    fn p_zero_splits_evenly() {
        let w = big_small();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 0.0).unwrap()).unwrap();
        // interior cell (1,1): down has alternates up, right, left and stay
        let s = w.state_at(1, 1).unwrap();
        let alts = w.alternate_outcomes(s, 2).unwrap().to_vec();
        assert_eq!(alts.len(), 4);
        assert_eq!(m.prob(s, 2, w.intended_outcome(s, 2).unwrap()), 0.0);
        for alt in alts {
            assert_eq!(m.prob(s, 2, alt), 0.25);
        }
        // top-left corner, right: alternates are stay and down
        let s0 = w.start();
        let alts = w.alternate_outcomes(s0, 1).unwrap().to_vec();
        assert_eq!(alts.len(), 2);
        let m0 = build_user_mdp(&w, UserTraits::new(0.5, 0.0).unwrap()).unwrap();
        for alt in alts {
            assert_eq!(m0.prob(s0, 1, alt), 0.5);
        }
    }

    #[test]
    fn seventy_percent_with_two_alternates() {
        let w = big_small();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 0.7).unwrap()).unwrap();
        let s0 = w.start();
        let row: Vec<f64> = m.row(s0, 1).map(|o| o.prob).collect();
        assert_eq!(row.len(), 3);
        assert_eq!(row[0], 0.7);
        assert!((row[1] - 0.15).abs() < 1e-15 && (row[2] - 0.15).abs() < 1e-15);
    }

    #[test]
    fn traits_out_of_range() {
        assert!(UserTraits::new(1.0, 0.5).is_err());
        assert!(UserTraits::new(-0.1, 0.5).is_err());
        assert!(UserTraits::new(0.5, 1.5).is_err());
        assert!(UserTraits::new(0.5, f64::NAN).is_err());
        let w = big_small();
        assert!(build_user_mdp(&w, UserTraits { gamma: 1.0, p: 0.5 }).is_err());
    }

    #[test]
    fn terminal_rows_are_self_loops() {
        let w = make_chain(&WorldParams::defaults(WorldKind::Chain)).unwrap();
        let m = build_user_mdp(&w, UserTraits::new(0.9, 0.3).unwrap()).unwrap();
        for t in w.terminals() {
            for a in 0..w.n_actions() {
                let row: Vec<Outcome> = m.row(t, a).collect();
                assert_eq!(row.len(), 1);
                assert_eq!((row[0].next, row[0].prob, row[0].reward), (t, 1.0, 0.0));
            }
        }
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let w = big_small();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 0.7).unwrap()).unwrap();
        let csv = m.transitions_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("state,action,next_state,probability"));
        assert!(lines.count() >= w.n_states() * w.n_actions());
    }
}
