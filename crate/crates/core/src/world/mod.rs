//! Worlds: the task tuple of states, actions and rewards shared by every user.
//!
//! A [`World`] is immutable once built. Each (state, action) pair carries a
//! [`Move`]: the intended successor, the alternate successors a user fears
//! might happen instead, and where the success probability comes from.

mod grid;
mod params;
mod validate;
mod zoo;

pub use grid::{GridLayout, GRID_ACTIONS};
pub use params::{WorldKind, WorldParams, PARAM_NAMES};
pub use validate::{validate_world, Finding, ValidationReport};
pub use zoo::{
    build_world, make_big_small, make_cafe, make_chain, make_cliff, make_composite,
    make_gamblers, make_literature_world, make_riverswim, make_wall,
};

use serde::{Deserialize, Serialize};

use crate::behavior::Classifier;
use crate::error::{AtlasError, Result};

/// Where the probability of reaching the intended successor comes from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SuccessSource {
    /// The user's confidence trait `p`.
    Confidence,
    /// A constant of the task itself (Gambler's Ruin odds).
    Fixed(f64),
    /// The action always does what it says; alternates must be empty.
    Certain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Move {
    pub intended: usize,
    pub alternates: Vec<usize>,
    /// Rewards aligned with `[intended, alternates...]`.
    pub rewards: Vec<f64>,
    pub success: SuccessSource,
}

impl Move {
    pub fn reward_to(&self, next: usize) -> f64 {
        if next == self.intended {
            return self.rewards[0];
        }
        self.alternates
            .iter()
            .position(|&s| s == next)
            .map(|i| self.rewards[i + 1])
            .unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct World {
    pub kind: WorldKind,
    pub params: WorldParams,
    pub(crate) n_states: usize,
    pub(crate) actions: Vec<String>,
    pub(crate) available: Vec<bool>,
    pub(crate) moves: Vec<Move>,
    pub(crate) start: usize,
    pub(crate) terminals: Vec<bool>,
    /// Grid coordinate `(row, col)` of each state, for gridworlds.
    pub(crate) cells: Vec<Option<(usize, usize)>>,
    pub(crate) classifier: Classifier,
}

impl World {
    /// Short identifier used in file names and reports, e.g. `big-small`.
    pub fn id(&self) -> &'static str {
        self.kind.name()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminals[s]
    }

    pub fn terminals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_states).filter(|&s| self.terminals[s])
    }

    pub fn is_available(&self, s: usize, a: usize) -> bool {
        self.available[s * self.actions.len() + a]
    }

    pub fn available_actions(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.actions.len()).filter(move |&a| self.is_available(s, a))
    }

    pub fn cell(&self, s: usize) -> Option<(usize, usize)> {
        self.cells[s]
    }

    /// State index of the grid cell `(row, col)`, if it is a state.
    pub fn state_at(&self, row: usize, col: usize) -> Option<usize> {
        self.cells.iter().position(|c| *c == Some((row, col)))
    }

    pub fn classifier(&self) -> &Classifier {
        &self.classifier
    }

    pub fn get_move(&self, s: usize, a: usize) -> &Move {
        &self.moves[s * self.actions.len() + a]
    }

    fn checked_move(&self, s: usize, a: usize) -> Result<&Move> {
        if s >= self.n_states || a >= self.actions.len() || !self.is_available(s, a) {
            return Err(AtlasError::UnavailableAction { state: s, action: a });
        }
        Ok(self.get_move(s, a))
    }

    pub fn intended_outcome(&self, s: usize, a: usize) -> Result<usize> {
        self.checked_move(s, a).map(|m| m.intended)
    }

    /// Alternate successors of `(s, a)`; empty for terminals and certain actions.
    pub fn alternate_outcomes(&self, s: usize, a: usize) -> Result<&[usize]> {
        self.checked_move(s, a).map(|m| m.alternates.as_slice())
    }

    /// `R(s, a, s')`; zero for successors outside the move's support.
    pub fn reward(&self, s: usize, a: usize, next: usize) -> f64 {
        self.get_move(s, a).reward_to(next)
    }

    /// Serializable description: kind plus constructor parameters.
    pub fn to_json(&self) -> Result<String> {
        if self.kind == WorldKind::Custom {
            return Err(AtlasError::Malformed(
                "hand-built worlds have no parameter form".into(),
            ));
        }
        let doc = WorldDoc {
            kind: self.kind,
            params: self.params.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| AtlasError::Malformed(e.to_string()))
    }

    /// Rebuilds a world from [`World::to_json`] output. Missing parameters take
    /// the kind's defaults.
    pub fn from_json(text: &str) -> Result<World> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| AtlasError::Malformed(e.to_string()))?;
        let kind_name = raw
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| AtlasError::Malformed("missing `kind`".into()))?;
        let kind: WorldKind = kind_name.parse()?;
        let mut params = WorldParams::defaults(kind);
        if let Some(obj) = raw.get("params").and_then(|p| p.as_object()) {
            for (name, value) in obj {
                let v = value
                    .as_f64()
                    .ok_or_else(|| AtlasError::Malformed(format!("parameter `{name}` is not a number")))?;
                params.set(name, v)?;
            }
        }
        build_world(kind, &params)
    }
}

#[derive(Serialize, Deserialize)]
struct WorldDoc {
    kind: WorldKind,
    params: WorldParams,
}

/// Assembles hand-built worlds. Constructors in the zoo go through
/// [`GridLayout`] or this builder.
#[derive(Clone, Debug)]
pub struct WorldBuilder {
    world: World,
}

impl WorldBuilder {
    /// All moves start as self-loops with zero reward and certain success.
    pub fn new(n_states: usize, actions: &[&str]) -> Self {
        let n_actions = actions.len();
        let moves = (0..n_states * n_actions)
            .map(|i| Move {
                intended: i / n_actions,
                alternates: Vec::new(),
                rewards: vec![0.0],
                success: SuccessSource::Certain,
            })
            .collect();
        WorldBuilder {
            world: World {
                kind: WorldKind::Custom,
                params: WorldParams::defaults(WorldKind::Custom),
                n_states,
                actions: actions.iter().map(|a| a.to_string()).collect(),
                available: vec![true; n_states * n_actions],
                moves,
                start: 0,
                terminals: vec![false; n_states],
                cells: vec![None; n_states],
                classifier: Classifier::StartAction {
                    names: actions.iter().map(|a| a.to_string()).collect(),
                },
            },
        }
    }

    pub fn kind(mut self, kind: WorldKind, params: WorldParams) -> Self {
        self.world.kind = kind;
        self.world.params = params;
        self
    }

    pub fn start(mut self, s: usize) -> Self {
        self.world.start = s;
        self
    }

    /// Marks `s` terminal with every action looping back at zero reward.
    pub fn terminal(mut self, s: usize) -> Self {
        self.world.terminals[s] = true;
        let n_actions = self.world.actions.len();
        for a in 0..n_actions {
            self.world.moves[s * n_actions + a] = Move {
                intended: s,
                alternates: Vec::new(),
                rewards: vec![0.0],
                success: SuccessSource::Certain,
            };
        }
        self
    }

    /// Sets the move for `(s, a)`; `rewards` aligns with `[intended, alternates...]`.
    pub fn set_move(
        mut self,
        s: usize,
        a: usize,
        intended: usize,
        alternates: Vec<usize>,
        rewards: Vec<f64>,
        success: SuccessSource,
    ) -> Self {
        let n_actions = self.world.actions.len();
        debug_assert_eq!(rewards.len(), alternates.len() + 1);
        self.world.moves[s * n_actions + a] = Move {
            intended,
            alternates,
            rewards,
            success,
        };
        self
    }

    pub fn unavailable(mut self, s: usize, a: usize) -> Self {
        let n_actions = self.world.actions.len();
        self.world.available[s * n_actions + a] = false;
        self
    }

    pub fn cells(mut self, cells: Vec<Option<(usize, usize)>>) -> Self {
        self.world.cells = cells;
        self
    }

    pub fn classifier(mut self, c: Classifier) -> Self {
        self.world.classifier = c;
        self
    }

    pub fn build(self) -> World {
        self.world
    }
}
