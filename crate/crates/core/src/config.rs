//! Run configuration loaded from JSON. Keys mirror CLI flag names; flags win
//! over file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::atlas::{GridSpec, DEFAULT_GAMMA_RANGE, DEFAULT_P_RANGE};
use crate::error::{AtlasError, Result};
use crate::planner::SolverConfig;
use crate::world::{build_world, World, WorldKind, WorldParams};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub world: Option<WorldKind>,
    /// Parameter overrides on top of the kind's defaults.
    pub params: BTreeMap<String, f64>,
    pub res: Option<usize>,
    pub gamma_range: Option<(f64, f64)>,
    pub p_range: Option<(f64, f64)>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub palette: Option<Vec<String>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| AtlasError::Malformed(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AtlasError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Values set in `over` replace those in `self`; params merge key by key.
    pub fn overlay(mut self, over: RunConfig) -> RunConfig {
        self.world = over.world.or(self.world);
        self.params.extend(over.params);
        self.res = over.res.or(self.res);
        self.gamma_range = over.gamma_range.or(self.gamma_range);
        self.p_range = over.p_range.or(self.p_range);
        self.tol = over.tol.or(self.tol);
        self.max_iter = over.max_iter.or(self.max_iter);
        self.out = over.out.or(self.out);
        self.svg = over.svg.or(self.svg);
        self.palette = over.palette.or(self.palette);
        self
    }

    pub fn kind(&self) -> Result<WorldKind> {
        self.world
            .ok_or_else(|| AtlasError::InvalidParams("no world given (use --world)".into()))
    }

    /// Defaults for the kind with `params` applied in key order, except that
    /// `reward_ratio` goes last so it sees the final `reward_big`.
    pub fn world_params(&self, kind: WorldKind) -> Result<WorldParams> {
        let mut p = WorldParams::defaults(kind);
        let is_ratio = |k: &str| k.replace('-', "_") == "reward_ratio";
        for (k, &v) in self.params.iter().filter(|(k, _)| !is_ratio(k)) {
            p.set(k, v)?;
        }
        for (k, &v) in self.params.iter().filter(|(k, _)| is_ratio(k)) {
            p.set(k, v)?;
        }
        Ok(p)
    }

    pub fn build_world(&self) -> Result<World> {
        let kind = self.kind()?;
        build_world(kind, &self.world_params(kind)?)
    }

    pub fn grid(&self, default_res: usize) -> Result<GridSpec> {
        let res = self.res.unwrap_or(default_res);
        GridSpec::uniform(
            res,
            self.gamma_range.unwrap_or(DEFAULT_GAMMA_RANGE),
            res,
            self.p_range.unwrap_or(DEFAULT_P_RANGE),
        )
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        let mut s = SolverConfig::default();
        if let Some(t) = self.tol {
            s.tol = t;
        }
        if let Some(n) = self.max_iter {
            s.max_iter = n;
        }
        if !(s.tol > 0.0 && s.tol.is_finite()) || s.max_iter == 0 {
            return Err(AtlasError::InvalidSolver(format!("tol={} max_iter={}", s.tol, s.max_iter)));
        }
        Ok(s)
    }
}
