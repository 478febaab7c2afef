//! Behavior maps over the (myopia, confidence) square.
//!
//! Every grid point is solved independently, so the map is assembled
//! positionally and does not depend on evaluation order. With the
//! `parallel` feature the cells fan out over rayon's pool.

mod signature;
mod topology;

pub use signature::{
    check_equivalent, edge_switch_counts, edge_switch_counts_with, edge_switch_positions, signature,
    EdgeOptions, EquivalenceSignature, EDGE_NAMES,
};
pub use topology::{interior_topology_report, TopologyReport};

use serde::{Deserialize, Serialize};

use crate::behavior::{classify_plan, WANDER};
use crate::error::{AtlasError, Result};
use crate::perception::{build_user_mdp, UserTraits};
use crate::planner::{extract_policy, value_iteration_with, SolverConfig};
use crate::world::World;

pub const DEFAULT_RESOLUTION: usize = 101;
pub const DEFAULT_GAMMA_RANGE: (f64, f64) = (0.01, 0.99);
pub const DEFAULT_P_RANGE: (f64, f64) = (0.01, 1.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub gamma_samples: Vec<f64>,
    pub p_samples: Vec<f64>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

impl GridSpec {
    pub fn uniform(
        n_gamma: usize,
        gamma_range: (f64, f64),
        n_p: usize,
        p_range: (f64, f64),
    ) -> Result<Self> {
        let spec = GridSpec {
            gamma_samples: linspace(gamma_range.0, gamma_range.1, n_gamma),
            p_samples: linspace(p_range.0, p_range.1, n_p),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `res x res` over the default axis ranges.
    pub fn square(res: usize) -> Result<Self> {
        Self::uniform(res, DEFAULT_GAMMA_RANGE, res, DEFAULT_P_RANGE)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma", &self.gamma_samples), ("p", &self.p_samples)] {
            if v.len() < 3 {
                return Err(AtlasError::InvalidGrid(format!("{name} axis needs at least 3 samples")));
            }
            if v.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(AtlasError::InvalidGrid(format!("{name} samples must strictly increase")));
            }
        }
        let (g0, g1) = (self.gamma_samples[0], *self.gamma_samples.last().unwrap());
        if !(g0 >= 0.0 && g1 < 1.0) {
            return Err(AtlasError::InvalidGrid(format!("gamma samples must lie in [0, 1), got [{g0}, {g1}]")));
        }
        let (p0, p1) = (self.p_samples[0], *self.p_samples.last().unwrap());
        if !(p0 >= 0.0 && p1 <= 1.0) {
            return Err(AtlasError::InvalidGrid(format!("p samples must lie in [0, 1], got [{p0}, {p1}]")));
        }
        Ok(())
    }

    pub fn n_gamma(&self) -> usize {
        self.gamma_samples.len()
    }

    pub fn n_p(&self) -> usize {
        self.p_samples.len()
    }

    /// Affine position of gamma sample `i` in `[0, 1]`.
    pub fn gamma_unit(&self, i: usize) -> f64 {
        unit(&self.gamma_samples, i)
    }

    pub fn p_unit(&self, i: usize) -> f64 {
        unit(&self.p_samples, i)
    }
}

fn unit(samples: &[f64], i: usize) -> f64 {
    let lo = samples[0];
    let hi = *samples.last().unwrap();
    (samples[i] - lo) / (hi - lo)
}

/// Index of the sample nearest to the unit-square coordinate `u`.
pub(crate) fn nearest_index(samples: &[f64], u: f64) -> usize {
    let n = samples.len();
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for i in 0..n {
        let d = (unit(samples, i) - u).abs();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Dense label grid, `p`-index major: `labels[ip * n_gamma + ig]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviorMap {
    pub spec: GridSpec,
    pub labels: Vec<usize>,
    pub world_id: String,
    pub palette: Vec<String>,
}

impl BehaviorMap {
    pub fn new(spec: GridSpec, labels: Vec<usize>, world_id: impl Into<String>, palette: Vec<String>) -> Result<Self> {
        if labels.len() != spec.n_gamma() * spec.n_p() {
            return Err(AtlasError::InvalidGrid(format!(
                "{} labels for a {}x{} grid",
                labels.len(),
                spec.n_gamma(),
                spec.n_p()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= palette.len()) {
            return Err(AtlasError::InvalidGrid(format!("label index {bad} outside palette")));
        }
        Ok(BehaviorMap {
            spec,
            labels,
            world_id: world_id.into(),
            palette,
        })
    }

    pub fn n_gamma(&self) -> usize {
        self.spec.n_gamma()
    }

    pub fn n_p(&self) -> usize {
        self.spec.n_p()
    }

    pub fn label(&self, ip: usize, ig: usize) -> usize {
        self.labels[ip * self.n_gamma() + ig]
    }

    pub fn label_name(&self, index: usize) -> &str {
        &self.palette[index]
    }

    pub fn is_wander(&self, index: usize) -> bool {
        self.palette[index] == WANDER
    }

    /// Distinct label indices present, ascending.
    pub fn distinct_labels(&self) -> Vec<usize> {
        let mut seen = vec![false; self.palette.len()];
        for &l in &self.labels {
            seen[l] = true;
        }
        (0..self.palette.len()).filter(|&l| seen[l]).collect()
    }

    /// Label at the cell nearest to the unit-square point `(u, v)`.
    pub fn label_at_unit(&self, u: f64, v: f64) -> usize {
        let ig = nearest_index(&self.spec.gamma_samples, u);
        let ip = nearest_index(&self.spec.p_samples, v);
        self.label(ip, ig)
    }

    /// One `γ`-ordered row of labels at fixed `p` index.
    pub fn row(&self, ip: usize) -> &[usize] {
        let g = self.n_gamma();
        &self.labels[ip * g..(ip + 1) * g]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[derive(Default)]
pub enum Execution {
    Serial,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}


#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MapOptions {
    pub solver: SolverConfig,
    pub execution: Execution,
}

/// Solves one grid point and returns its label index.
pub fn cell_label(w: &World, traits: UserTraits, solver: &SolverConfig) -> Result<usize> {
    let m = build_user_mdp(w, traits)?;
    let v = value_iteration_with(&m, solver)?;
    if !v.converged {
        return Err(AtlasError::CellFailures(vec![format!(
            "gamma={} p={}: no convergence after {} sweeps (residual {:e})",
            traits.gamma, traits.p, v.iterations, v.residual
        )]));
    }
    let pi = extract_policy(&m, &v);
    Ok(classify_plan(&m, &v, &pi).index)
}

pub fn compute_behavior_map(w: &World, spec: &GridSpec) -> Result<BehaviorMap> {
    compute_behavior_map_with(w, spec, &MapOptions::default())
}

pub fn compute_behavior_map_with(w: &World, spec: &GridSpec, opts: &MapOptions) -> Result<BehaviorMap> {
    spec.validate()?;
    let n_gamma = spec.n_gamma();
    let total = n_gamma * spec.n_p();
    let solve = |idx: usize| -> Result<usize, String> {
        let (ip, ig) = (idx / n_gamma, idx % n_gamma);
        let traits = UserTraits {
            gamma: spec.gamma_samples[ig],
            p: spec.p_samples[ip],
        };
        cell_label(w, traits, &opts.solver).map_err(|e| match e {
            AtlasError::CellFailures(mut v) => v.remove(0),
            other => format!("gamma={} p={}: {other}", traits.gamma, traits.p),
        })
    };
    let results: Vec<Result<usize, String>> = match opts.execution {
        Execution::Serial => (0..total).map(solve).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..total).into_par_iter().map(solve).collect()
        }
    };
    let mut labels = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(l) => labels.push(l),
            Err(msg) => {
                failures.push(msg);
                labels.push(0);
            }
        }
    }
    if !failures.is_empty() {
        return Err(AtlasError::CellFailures(failures));
    }
    BehaviorMap::new(spec.clone(), labels, w.id(), w.classifier().palette())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{build_world, WorldKind, WorldParams};

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::square(2).is_err());
        assert!(GridSpec::uniform(5, (0.1, 1.0), 5, (0.0, 1.0)).is_err());
        assert!(GridSpec::uniform(5, (0.5, 0.1), 5, (0.0, 1.0)).is_err());
        let s = GridSpec::square(101).unwrap();
        assert_eq!(s.gamma_samples[0], 0.01);
        assert_eq!(s.gamma_samples[100], 0.99);
        assert_eq!(s.p_samples[100], 1.0);
        assert_eq!(s.gamma_unit(100), 1.0);
    }

    #[test]
    fn three_by_three_smoke() {
        for kind in WorldKind::ALL {
            let w = build_world(kind, &WorldParams::defaults(kind)).unwrap();
            let m = compute_behavior_map(&w, &GridSpec::square(3).unwrap()).unwrap();
            assert_eq!(m.labels.len(), 9);
        }
    }

    #[test]
    fn map_constructor_checks_shape() {
        let spec = GridSpec::square(3).unwrap();
        assert!(BehaviorMap::new(spec.clone(), vec![0; 8], "x", vec!["a".into()]).is_err());
        assert!(BehaviorMap::new(spec, vec![1; 9], "x", vec!["a".into()]).is_err());
    }
}
