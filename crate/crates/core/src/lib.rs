//! Behavior maps for tabular worlds seen through a user's myopia and confidence.
//!
//! A [`world::World`] plus [`perception::UserTraits`] gives a perceived MDP;
//! [`planner`] solves it, [`behavior`] labels the plan, and [`atlas`]
//! sweeps the trait square into a [`atlas::BehaviorMap`] with an edge-switch
//! signature.

pub mod atlas;
pub mod behavior;
pub mod config;
pub mod error;
pub mod intervention;
pub mod io;
pub mod perception;
pub mod planner;
pub mod render;
pub mod sweep;
pub mod world;

pub use error::{AtlasError, Result};
