use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{AtlasError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorldKind {
    BigSmall,
    Cliff,
    Wall,
    Chain,
    RiverSwim,
    GamblersV1,
    GamblersV2,
    Cafe,
    CliffDisengage,
    CafeThreeway,
    /// Hand-built world without a parameter form.
    Custom,
}

impl WorldKind {
    pub const ALL: [WorldKind; 10] = [
        WorldKind::BigSmall,
        WorldKind::Cliff,
        WorldKind::Wall,
        WorldKind::Chain,
        WorldKind::RiverSwim,
        WorldKind::GamblersV1,
        WorldKind::GamblersV2,
        WorldKind::Cafe,
        WorldKind::CliffDisengage,
        WorldKind::CafeThreeway,
    ];

    /// The eight single-decision worlds with a known reference equivalence class.
    pub const CLASSIFIED: [WorldKind; 8] = [
        WorldKind::Wall,
        WorldKind::Cliff,
        WorldKind::BigSmall,
        WorldKind::Chain,
        WorldKind::RiverSwim,
        WorldKind::GamblersV1,
        WorldKind::GamblersV2,
        WorldKind::Cafe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WorldKind::BigSmall => "big-small",
            WorldKind::Cliff => "cliff",
            WorldKind::Wall => "wall",
            WorldKind::Chain => "chain",
            WorldKind::RiverSwim => "riverswim",
            WorldKind::GamblersV1 => "gamblers-v1",
            WorldKind::GamblersV2 => "gamblers-v2",
            WorldKind::Cafe => "cafe",
            WorldKind::CliffDisengage => "cliff-disengage",
            WorldKind::CafeThreeway => "cafe-threeway",
            WorldKind::Custom => "custom",
        }
    }

    /// Edge switch counts this world's default map is expected to show.
    pub fn expected_class(self) -> Option<[usize; 4]> {
        match self {
            WorldKind::Wall => Some([2, 0, 2, 0]),
            WorldKind::Cliff | WorldKind::GamblersV2 => Some([1, 1, 0, 0]),
            WorldKind::BigSmall
            | WorldKind::Chain
            | WorldKind::RiverSwim
            | WorldKind::GamblersV1
            | WorldKind::Cafe => Some([1, 0, 1, 0]),
            _ => None,
        }
    }
}

impl fmt::Display for WorldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WorldKind {
    type Err = AtlasError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let kind = match norm.as_str() {
            "big-small" | "bigsmall" => WorldKind::BigSmall,
            "cliff" => WorldKind::Cliff,
            "wall" => WorldKind::Wall,
            "chain" => WorldKind::Chain,
            "riverswim" | "river-swim" => WorldKind::RiverSwim,
            "gamblers-v1" | "gamblers1" => WorldKind::GamblersV1,
            "gamblers-v2" | "gamblers2" => WorldKind::GamblersV2,
            "cafe" | "cafe-2way" | "cafe-twoway" => WorldKind::Cafe,
            "cliff-disengage" => WorldKind::CliffDisengage,
            "cafe-threeway" | "cafe-3way" => WorldKind::CafeThreeway,
            _ => return Err(AtlasError::UnknownKind(s.to_string())),
        };
        Ok(kind)
    }
}

impl Serialize for WorldKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for WorldKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Constructor parameters. One flat record covers every world kind; each
/// constructor reads the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldParams {
    /// Grid width in cells.
    pub width: usize,
    /// Grid height in cells.
    pub height: usize,
    /// Number of non-terminal states in the one-dimensional worlds.
    pub length: usize,
    pub reward_big: f64,
    pub reward_small: f64,
    pub reward_goal: f64,
    pub reward_cliff: f64,
    pub reward_wall: f64,
    pub reward_disengage: f64,
    pub reward_end: f64,
    pub reward_dead: f64,
    pub reward_donut: f64,
    pub reward_noodle: f64,
    pub reward_vegan: f64,
    /// Reward for every move that does not enter a terminal or penalized cell.
    pub step_reward: f64,
    /// Gambler's Ruin: chance that `continue` advances.
    pub p_continue: f64,
    /// Gambler's Ruin: chance that `finish` ends in the dead-end state.
    pub p_fail: f64,
    /// Wall world: column of the passable penalized wall cell.
    pub penalty_col: usize,
    /// Wall world: goal column minus `penalty_col`.
    pub goal_offset: usize,
}

pub const PARAM_NAMES: [&str; 20] = [
    "width",
    "height",
    "length",
    "reward_big",
    "reward_small",
    "reward_ratio",
    "reward_goal",
    "reward_cliff",
    "reward_wall",
    "reward_disengage",
    "reward_end",
    "reward_dead",
    "reward_donut",
    "reward_noodle",
    "reward_vegan",
    "step_reward",
    "p_continue",
    "p_fail",
    "penalty_col",
    "goal_offset",
];

impl WorldParams {
    /// Shipped defaults. These were tuned so each default map lands in its
    /// world's equivalence class; see the README for the frozen values.
    pub fn defaults(kind: WorldKind) -> Self {
        let base = WorldParams {
            width: 5,
            height: 5,
            length: 4,
            reward_big: 300.0,
            reward_small: 100.0,
            reward_goal: 100.0,
            reward_cliff: -1000.0,
            reward_wall: -50.0,
            reward_disengage: 10.0,
            reward_end: 100.0,
            reward_dead: 0.0,
            reward_donut: 50.0,
            reward_noodle: 100.0,
            reward_vegan: 200.0,
            step_reward: 0.0,
            p_continue: 0.6,
            p_fail: 0.9,
            penalty_col: 0,
            goal_offset: 0,
        };
        match kind {
            WorldKind::BigSmall => base,
            WorldKind::Cliff | WorldKind::CliffDisengage => WorldParams {
                width: 8,
                height: 4,
                reward_cliff: -0.01,
                step_reward: -0.01,
                ..base
            },
            WorldKind::Wall => WorldParams {
                width: 5,
                height: 6,
                reward_wall: -20.0,
                goal_offset: 1,
                ..base
            },
            WorldKind::Chain => WorldParams {
                reward_end: 500.0,
                ..base
            },
            WorldKind::RiverSwim => WorldParams {
                reward_big: 500.0,
                reward_small: 10.0,
                ..base
            },
            WorldKind::GamblersV1 | WorldKind::GamblersV2 => WorldParams { length: 3, ..base },
            WorldKind::Cafe | WorldKind::CafeThreeway => WorldParams {
                width: 8,
                height: 13,
                ..base
            },
            WorldKind::Custom => base,
        }
    }

    /// Sets one parameter by name. `reward_ratio` sets `reward_small` relative
    /// to the current `reward_big`.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let name = name.replace('-', "_");
        let as_count = |v: f64| -> Result<usize> {
            if v.is_finite() && v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(AtlasError::InvalidParams(format!("`{name}` must be a whole number, got {v}")))
            }
        };
        match name.as_str() {
            "width" => self.width = as_count(value)?,
            "height" => self.height = as_count(value)?,
            "length" => self.length = as_count(value)?,
            "penalty_col" => self.penalty_col = as_count(value)?,
            "goal_offset" => self.goal_offset = as_count(value)?,
            "reward_big" => self.reward_big = value,
            "reward_small" => self.reward_small = value,
            "reward_ratio" => self.reward_small = value * self.reward_big,
            "reward_goal" => self.reward_goal = value,
            "reward_cliff" => self.reward_cliff = value,
            "reward_wall" => self.reward_wall = value,
            "reward_disengage" => self.reward_disengage = value,
            "reward_end" => self.reward_end = value,
            "reward_dead" => self.reward_dead = value,
            "reward_donut" => self.reward_donut = value,
            "reward_noodle" => self.reward_noodle = value,
            "reward_vegan" => self.reward_vegan = value,
            "step_reward" => self.step_reward = value,
            "p_continue" => self.p_continue = value,
            "p_fail" => self.p_fail = value,
            _ => {
                return Err(AtlasError::UnknownParam {
                    kind: "any".into(),
                    name,
                })
            }
        }
        Ok(())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        let rewards = [
            ("reward_big", self.reward_big),
            ("reward_small", self.reward_small),
            ("reward_goal", self.reward_goal),
            ("reward_cliff", self.reward_cliff),
            ("reward_wall", self.reward_wall),
            ("reward_disengage", self.reward_disengage),
            ("reward_end", self.reward_end),
            ("reward_dead", self.reward_dead),
            ("reward_donut", self.reward_donut),
            ("reward_noodle", self.reward_noodle),
            ("reward_vegan", self.reward_vegan),
            ("step_reward", self.step_reward),
        ];
        for (name, v) in rewards {
            if !v.is_finite() {
                return Err(AtlasError::InvalidParams(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}
