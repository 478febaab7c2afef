//! Exact tabular planning: value iteration, greedy policy extraction, exact
//! policy evaluation, and a brute-force policy enumeration oracle.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{AtlasError, Result};
use crate::perception::UserMdp;

#[derive(Clone, Debug, PartialEq)]
pub struct ValueFunction {
    pub values: Vec<f64>,
    /// False when `max_iter` ran out before the residual reached `tol`.
    pub converged: bool,
    pub iterations: usize,
    /// Max-norm difference between the last two iterates.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Policy {
    pub action_of: Vec<usize>,
}

impl Policy {
    pub fn action(&self, s: usize) -> usize {
        self.action_of[s]
    }
}

/// Value iteration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Lower bound on the number of sweeps. `None` means one sweep per state,
    /// so rewards propagate across the whole world even when a small discount
    /// drives the residual under `tol` after a couple of sweeps.
    pub min_sweeps: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            max_iter: 100_000,
            min_sweeps: None,
        }
    }
}

pub fn value_iteration(m: &UserMdp<'_>, tol: f64, max_iter: usize) -> Result<ValueFunction> {
    solve(
        m,
        &SolverConfig {
            tol,
            max_iter,
            min_sweeps: None,
        },
        None,
    )
}

pub fn value_iteration_with(m: &UserMdp<'_>, cfg: &SolverConfig) -> Result<ValueFunction> {
    solve(m, cfg, None)
}

/// Value iteration that also returns the residual of every sweep.
pub fn value_iteration_trace(
    m: &UserMdp<'_>,
    cfg: &SolverConfig,
) -> Result<(ValueFunction, Vec<f64>)> {
    let mut trace = Vec::new();
    let v = solve(m, cfg, Some(&mut trace))?;
    Ok((v, trace))
}

fn solve(m: &UserMdp<'_>, cfg: &SolverConfig, mut trace: Option<&mut Vec<f64>>) -> Result<ValueFunction> {
    if !(cfg.tol > 0.0) {
        return Err(AtlasError::InvalidSolver(format!("tol must be > 0, got {}", cfg.tol)));
    }
    if cfg.max_iter < 1 {
        return Err(AtlasError::InvalidSolver("max_iter must be >= 1".into()));
    }
    let world = m.world();
    let n = m.n_states();
    let min_sweeps = cfg.min_sweeps.unwrap_or(n).min(cfg.max_iter);
    let mut values = vec![0.0; n];
    let mut fresh = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        residual = 0.0;
        for s in 0..n {
            let mut best = f64::NEG_INFINITY;
            for a in world.available_actions(s) {
                let q = m.q_value(&values, s, a);
                if q > best {
                    best = q;
                }
            }
            if !best.is_finite() {
                return Err(AtlasError::NonFinite { state: s, iteration: it });
            }
            residual = residual.max((best - values[s]).abs());
            fresh[s] = best;
        }
        std::mem::swap(&mut values, &mut fresh);
        if let Some(t) = trace.as_deref_mut() {
            t.push(residual);
        }
        if residual <= cfg.tol && it >= min_sweeps {
            return Ok(ValueFunction {
                values,
                converged: true,
                iterations: it,
                residual,
            });
        }
    }
    Ok(ValueFunction {
        values,
        converged: false,
        iterations: cfg.max_iter,
        residual,
    })
}

/// Greedy policy; ties go to the lowest action index.
pub fn extract_policy(m: &UserMdp<'_>, v: &ValueFunction) -> Policy {
    let world = m.world();
    let action_of = (0..m.n_states())
        .map(|s| {
            let mut best_a = usize::MAX;
            let mut best_q = f64::NEG_INFINITY;
            for a in world.available_actions(s) {
                let q = m.q_value(&v.values, s, a);
                if best_a == usize::MAX || q > best_q {
                    best_a = a;
                    best_q = q;
                }
            }
            best_a
        })
        .collect();
    Policy { action_of }
}

/// Exact `V^π` from the linear system `(I - γ P_π) V = r_π`.
pub fn policy_evaluation(m: &UserMdp<'_>, pi: &Policy) -> ValueFunction {
    let n = m.n_states();
    let gamma = m.gamma();
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for s in 0..n {
        let act = pi.action(s);
        b[s] = m.expected_reward(s, act);
        for o in m.row(s, act) {
            a[(s, o.next)] -= gamma * o.prob;
        }
    }
    let lu = a.clone().lu();
    let mut x = lu.solve(&b).unwrap_or_else(|| DVector::zeros(n));
    // one refinement pass tightens the residual to round-off
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let values: Vec<f64> = x.iter().copied().collect();
    let residual = (0..n)
        .map(|s| {
            let act = pi.action(s);
            (m.q_value(&values, s, act) - values[s]).abs()
        })
        .fold(0.0, f64::max);
    ValueFunction {
        values,
        converged: true,
        iterations: 1,
        residual,
    }
}

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Enumerates every deterministic policy over the non-terminal states and
/// returns the one with the highest start-state value. Terminal states keep
/// their first available action. Among equal values the lexicographically
/// first policy (state 0 most significant) wins.
pub fn brute_force_optimal(m: &UserMdp<'_>, cap: u128) -> Result<(ValueFunction, Policy)> {
    let world = m.world();
    let n = m.n_states();
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            let acts: Vec<usize> = world.available_actions(s).collect();
            if world.is_terminal(s) {
                acts.into_iter().take(1).collect()
            } else {
                acts
            }
        })
        .collect();
    let mut needed: u128 = 1;
    for c in &choices {
        needed = needed.saturating_mul(c.len() as u128);
        if needed > cap {
            return Err(AtlasError::CapExceeded { needed, cap });
        }
    }
    let start = world.start();
    let mut digits = vec![0usize; n];
    let mut best: Option<(ValueFunction, Policy)> = None;
    loop {
        let pi = Policy {
            action_of: (0..n).map(|s| choices[s][digits[s]]).collect(),
        };
        let v = policy_evaluation(m, &pi);
        let better = match &best {
            None => true,
            Some((bv, _)) => v.values[start] > bv.values[start],
        };
        if better {
            best = Some((v, pi));
        }
        // odometer with the last state as the fastest digit
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(best.expect("at least one policy"));
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < choices[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::{build_user_mdp, UserTraits};
    use crate::world::{SuccessSource, World, WorldBuilder};

    fn two_state_chain() -> World {
        WorldBuilder::new(2, &["go", "stay"])
            .set_move(0, 0, 1, vec![], vec![1.0], SuccessSource::Certain)
            .set_move(0, 1, 0, vec![], vec![0.0], SuccessSource::Certain)
            .terminal(1)
            .build()
    }

    #[test]
    fn single_absorbing_state() {
        let w = WorldBuilder::new(1, &["a"]).terminal(0).build();
        let m = build_user_mdp(&w, UserTraits::new(0.9, 1.0).unwrap()).unwrap();
        let v = value_iteration(&m, 1e-8, 1000).unwrap();
        assert_eq!(v.values, vec![0.0]);
        assert!(v.converged);
    }

    #[test]
    fn two_state_chain_is_one_step() {
        let w = two_state_chain();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 1.0).unwrap()).unwrap();
        let v = value_iteration(&m, 1e-10, 1000).unwrap();
        assert!((v.values[0] - 1.0).abs() < 1e-12);
        assert_eq!(v.values[1], 0.0);
        assert_eq!(extract_policy(&m, &v).action(0), 0);
        let pe = policy_evaluation(&m, &Policy { action_of: vec![0, 0] });
        assert!((pe.values[0] - 1.0).abs() < 1e-12);
        assert!(pe.residual <= 1e-12);
    }

    #[test]
    fn ties_go_to_lowest_action() {
        let w = WorldBuilder::new(2, &["a", "b", "c"])
            .set_move(0, 0, 1, vec![], vec![2.0], SuccessSource::Certain)
            .set_move(0, 1, 1, vec![], vec![2.0], SuccessSource::Certain)
            .set_move(0, 2, 1, vec![], vec![2.0], SuccessSource::Certain)
            .terminal(1)
            .build();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 1.0).unwrap()).unwrap();
        let v = value_iteration(&m, 1e-10, 100).unwrap();
        let pi = extract_policy(&m, &v);
        assert_eq!(pi.action(0), 0);
        assert_eq!(pi, extract_policy(&m, &v));
    }

    #[test]
    fn absorbing_zero_reward_evaluates_to_zero() {
        let w = WorldBuilder::new(2, &["go"])
            .set_move(0, 0, 1, vec![], vec![0.0], SuccessSource::Certain)
            .terminal(1)
            .build();
        let m = build_user_mdp(&w, UserTraits::new(0.9, 1.0).unwrap()).unwrap();
        let v = policy_evaluation(&m, &Policy { action_of: vec![0, 0] });
        assert_eq!(v.values, vec![0.0, 0.0]);
    }

    #[test]
    fn bad_solver_settings() {
        let w = two_state_chain();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 1.0).unwrap()).unwrap();
        assert!(value_iteration(&m, 0.0, 10).is_err());
        assert!(value_iteration(&m, 1e-8, 0).is_err());
    }

    #[test]
    fn max_iter_reports_non_convergence() {
        let w = two_state_chain();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 1.0).unwrap()).unwrap();
        let cfg = SolverConfig {
            tol: 1e-300,
            max_iter: 1,
            min_sweeps: Some(1),
        };
        let v = value_iteration_with(&m, &cfg).unwrap();
        assert!(!v.converged);
        assert_eq!(v.iterations, 1);
    }

    #[test]
    fn non_finite_rewards_are_rejected() {
        let w = WorldBuilder::new(2, &["go"])
            .set_move(0, 0, 1, vec![], vec![f64::INFINITY], SuccessSource::Certain)
            .terminal(1)
            .build();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 1.0).unwrap()).unwrap();
        assert!(matches!(
            value_iteration(&m, 1e-8, 10),
            Err(AtlasError::NonFinite { .. })
        ));
    }

    #[test]
    fn one_state_brute_force() {
        let w = WorldBuilder::new(1, &["a", "b"]).terminal(0).build();
        let m = build_user_mdp(&w, UserTraits::new(0.5, 1.0).unwrap()).unwrap();
        let (v, pi) = brute_force_optimal(&m, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(pi.action_of, vec![0]);
        assert_eq!(v.values, vec![0.0]);
    }
}
