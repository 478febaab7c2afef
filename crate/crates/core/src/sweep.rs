//! Parameter-perturbation sweeps and composite-world experiments.
//!
//! A sweep walks the Cartesian product of per-parameter value lists (the
//! last axis varies fastest), builds each world from `base` plus the cell's
//! overrides, and records its signature. Constructor and pipeline errors are
//! stored per cell instead of aborting the run.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::atlas::{
    compute_behavior_map_with, interior_topology_report, signature, BehaviorMap, EquivalenceSignature, GridSpec,
    MapOptions, TopologyReport,
};
use crate::error::{AtlasError, Result};
use crate::world::{build_world, WorldKind, WorldParams};

pub const DEFAULT_SWEEP_CAP: usize = 200;
/// Per-axis resolution used by the shipped presets.
pub const PRESET_RESOLUTION: usize = 51;
pub const PRESET_NAME: &str = "paper-b";

/// Varied parameters: name and value list, in axis order.
pub type Varied = Vec<(String, Vec<f64>)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    /// One value per axis, in axis order.
    pub values: Vec<f64>,
    pub signature: Option<EquivalenceSignature>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub world: WorldKind,
    pub axes: Vec<SweepAxis>,
    pub cells: Vec<SweepCell>,
    /// True when no cell failed and every signature is the same.
    pub all_equal: bool,
    /// Most common signature; ties go to the one seen first.
    pub modal_signature: Option<EquivalenceSignature>,
    pub failures: Vec<String>,
    /// The world's reference edge class, when it has one.
    pub expected_class: Option<[usize; 4]>,
}

impl SweepReport {
    /// All cells equal and, where a class is known, equal to it.
    pub fn verdict(&self) -> bool {
        let class_ok = match (self.expected_class, &self.modal_signature) {
            (Some(c), Some(s)) => s.edge_switches == c,
            (Some(_), None) => false,
            (None, _) => true,
        };
        self.all_equal && class_ok
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep reports always serialize")
    }

    /// One row per cell: axis values, `n1..n4`, `num_behaviors`, `error`.
    pub fn index_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        header.extend(["n1", "n2", "n3", "n4", "num_behaviors", "error"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for c in &self.cells {
            let mut row: Vec<String> = c.values.iter().map(|v| v.to_string()).collect();
            match &c.signature {
                Some(s) => {
                    row.extend(s.edge_switches.iter().map(|n| n.to_string()));
                    row.push(s.num_behaviors.to_string());
                }
                None => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
            row.push(c.error.clone().unwrap_or_default());
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| AtlasError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| AtlasError::Io(e.to_string()))
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "world: {}", self.world);
        let _ = writeln!(out, "cells: {} ({} failed)", self.cells.len(), self.failures.len());
        if let Some(s) = &self.modal_signature {
            let _ = writeln!(out, "modal: {} {:?}", s.num_behaviors, s.edge_switches);
        }
        let _ = write!(out, "verdict: {}", self.verdict());
        out
    }
}

fn csv_err(e: csv::Error) -> AtlasError {
    AtlasError::Io(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub cap: usize,
    pub map: MapOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            cap: DEFAULT_SWEEP_CAP,
            map: MapOptions::default(),
        }
    }
}

pub fn perturbation_sweep(
    kind: WorldKind,
    base: &WorldParams,
    varied: &[(String, Vec<f64>)],
    spec: &GridSpec,
) -> Result<SweepReport> {
    perturbation_sweep_with(kind, base, varied, spec, &SweepOptions::default())
}

pub fn perturbation_sweep_with(
    kind: WorldKind,
    base: &WorldParams,
    varied: &[(String, Vec<f64>)],
    spec: &GridSpec,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    spec.validate()?;
    for (name, values) in varied {
        // unknown names are a caller error, not a per-cell failure
        let mut probe = base.clone();
        probe.set(name, values.first().copied().unwrap_or(0.0)).or_else(|e| match e {
            AtlasError::UnknownParam { name, .. } => Err(AtlasError::UnknownParam {
                kind: kind.name().into(),
                name,
            }),
            _ => Ok(()),
        })?;
        if values.is_empty() {
            return Err(AtlasError::InvalidParams(format!("no values given for `{name}`")));
        }
    }
    let total = varied
        .iter()
        .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()))
        .unwrap_or(usize::MAX);
    if total > opts.cap {
        return Err(AtlasError::SweepTooLarge { cells: total, cap: opts.cap });
    }

    let mut cells = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut values = vec![0.0; varied.len()];
        for (k, (_, vals)) in varied.iter().enumerate().rev() {
            values[k] = vals[rem % vals.len()];
            rem /= vals.len();
        }
        let outcome = run_cell(kind, base, varied, &values, spec, &opts.map);
        let (sig, err) = match outcome {
            Ok(s) => (Some(s), None),
            Err(e) => {
                let label: Vec<String> = varied
                    .iter()
                    .zip(&values)
                    .map(|((n, _), v)| format!("{n}={v}"))
                    .collect();
                failures.push(format!("[{}] {e}", label.join(", ")));
                (None, Some(e.to_string()))
            }
        };
        cells.push(SweepCell {
            values,
            signature: sig,
            error: err,
        });
    }

    let sigs: Vec<&EquivalenceSignature> = cells.iter().filter_map(|c| c.signature.as_ref()).collect();
    let same = |a: &EquivalenceSignature, b: &EquivalenceSignature| {
        a.num_behaviors == b.num_behaviors && a.edge_switches == b.edge_switches
    };
    let mut modal: Option<(&EquivalenceSignature, usize)> = None;
    for s in &sigs {
        let n = sigs.iter().filter(|t| same(s, t)).count();
        if modal.is_none_or(|(_, best)| n > best) {
            modal = Some((s, n));
        }
    }
    let all_equal = failures.is_empty() && sigs.windows(2).all(|w| same(w[0], w[1]));
    let modal_signature = modal.map(|(s, _)| s.clone());
    Ok(SweepReport {
        world: kind,
        axes: varied
            .iter()
            .map(|(name, values)| SweepAxis {
                name: name.clone(),
                values: values.clone(),
            })
            .collect(),
        cells,
        all_equal,
        modal_signature,
        failures,
        expected_class: kind.expected_class(),
    })
}

fn run_cell(
    kind: WorldKind,
    base: &WorldParams,
    varied: &[(String, Vec<f64>)],
    values: &[f64],
    spec: &GridSpec,
    opts: &MapOptions,
) -> Result<EquivalenceSignature> {
    let mut params = base.clone();
    for ((name, _), &v) in varied.iter().zip(values) {
        params.set(name, v)?;
    }
    let w = build_world(kind, &params)?;
    signature(&compute_behavior_map_with(&w, spec, opts)?)
}

/// Base parameters and varied axes of the shipped `paper-b` preset.
pub fn paper_b_preset(kind: WorldKind) -> Option<(WorldParams, Varied)> {
    let axis = |name: &str, v: &[f64]| (name.to_string(), v.to_vec());
    let mut base = WorldParams::defaults(kind);
    let varied = match kind {
        WorldKind::BigSmall => {
            base.height = 7;
            base.reward_big = 300.0;
            vec![
                axis("width", &[4.0, 5.0, 6.0, 7.0, 8.0]),
                axis("reward_ratio", &[0.17, 0.25, 0.33]),
            ]
        }
        WorldKind::Cliff => vec![
            axis("width", &[6.0, 8.0, 10.0]),
            axis("height", &[3.0, 4.0, 5.0]),
            axis("reward_goal", &[50.0, 100.0]),
        ],
        WorldKind::Wall => vec![
            axis("width", &[5.0, 6.0, 7.0]),
            axis("height", &[5.0, 6.0, 7.0]),
            axis("reward_wall", &[-20.0, -25.0]),
        ],
        WorldKind::Chain => vec![axis("length", &[3.0, 4.0, 5.0]), axis("reward_end", &[500.0, 1000.0])],
        WorldKind::RiverSwim => vec![axis("length", &[3.0, 4.0, 5.0]), axis("reward_big", &[500.0, 1000.0])],
        WorldKind::GamblersV1 => vec![
            axis("length", &[2.0, 3.0]),
            axis("p_fail", &[0.9, 0.95]),
            axis("reward_goal", &[50.0, 100.0]),
        ],
        WorldKind::GamblersV2 => vec![axis("length", &[2.0, 3.0, 4.0]), axis("p_continue", &[0.5, 0.6, 0.7])],
        WorldKind::Cafe => vec![
            axis("reward_donut", &[30.0, 50.0]),
            axis("reward_noodle", &[100.0, 150.0]),
            axis("reward_vegan", &[200.0, 300.0]),
        ],
        _ => return None,
    };
    Some((base, varied))
}

pub fn preset(name: &str, kind: WorldKind) -> Result<(WorldParams, Varied)> {
    if name != PRESET_NAME {
        return Err(AtlasError::InvalidParams(format!(
            "unknown preset `{name}`; available: {PRESET_NAME}"
        )));
    }
    paper_b_preset(kind).ok_or_else(|| AtlasError::InvalidParams(format!("no `{name}` preset for `{kind}`")))
}

/// Full pipeline on a composite world.
pub fn composition_experiment(
    kind: WorldKind,
    params: &WorldParams,
    spec: &GridSpec,
) -> Result<(BehaviorMap, EquivalenceSignature, TopologyReport)> {
    composition_experiment_with(kind, params, spec, &MapOptions::default())
}

pub fn composition_experiment_with(
    kind: WorldKind,
    params: &WorldParams,
    spec: &GridSpec,
    opts: &MapOptions,
) -> Result<(BehaviorMap, EquivalenceSignature, TopologyReport)> {
    if !matches!(kind, WorldKind::CliffDisengage | WorldKind::CafeThreeway) {
        return Err(AtlasError::InvalidParams(format!("`{kind}` is not a composite world")));
    }
    let w = build_world(kind, params)?;
    let m = compute_behavior_map_with(&w, spec, opts)?;
    let sig = signature(&m)?;
    let topo = interior_topology_report(&m);
    Ok((m, sig, topo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GridSpec {
        GridSpec::square(11).unwrap()
    }

    #[test]
    fn empty_sweep_matches_one_signature() {
        let kind = WorldKind::BigSmall;
        let base = WorldParams::defaults(kind);
        let r = perturbation_sweep(kind, &base, &[], &small()).unwrap();
        assert_eq!(r.cells.len(), 1);
        let w = build_world(kind, &base).unwrap();
        let direct = signature(&compute_behavior_map_with(&w, &small(), &MapOptions::default()).unwrap()).unwrap();
        assert_eq!(r.cells[0].signature.as_ref(), Some(&direct));
        assert!(r.all_equal);
    }

    #[test]
    fn constructor_errors_are_recorded_per_cell() {
        let kind = WorldKind::BigSmall;
        let varied = vec![("width".to_string(), vec![1.0, 5.0])];
        let r = perturbation_sweep(kind, &WorldParams::defaults(kind), &varied, &small()).unwrap();
        assert_eq!(r.cells.len(), 2);
        assert!(r.cells[0].error.is_some());
        assert!(r.cells[1].signature.is_some());
        assert_eq!(r.failures.len(), 1);
        assert!(!r.all_equal);
        assert!(!r.verdict());
    }

    #[test]
    fn cap_and_unknown_names_are_rejected() {
        let kind = WorldKind::Chain;
        let base = WorldParams::defaults(kind);
        let big: Vec<f64> = (0..15).map(f64::from).collect();
        let varied = vec![("length".to_string(), big.clone()), ("reward_end".to_string(), big)];
        assert_eq!(
            perturbation_sweep(kind, &base, &varied, &small()),
            Err(AtlasError::SweepTooLarge { cells: 225, cap: 200 })
        );
        let bad = vec![("nope".to_string(), vec![1.0])];
        assert!(matches!(
            perturbation_sweep(kind, &base, &bad, &small()),
            Err(AtlasError::UnknownParam { .. })
        ));
    }

    #[test]
    fn cell_order_is_last_axis_fastest() {
        let kind = WorldKind::Chain;
        let varied = vec![
            ("length".to_string(), vec![3.0, 4.0]),
            ("reward_end".to_string(), vec![500.0, 1000.0]),
        ];
        let r = perturbation_sweep(kind, &WorldParams::defaults(kind), &varied, &small()).unwrap();
        let vals: Vec<Vec<f64>> = r.cells.iter().map(|c| c.values.clone()).collect();
        assert_eq!(vals, vec![vec![3.0, 500.0], vec![3.0, 1000.0], vec![4.0, 500.0], vec![4.0, 1000.0]]);
        let csv = r.index_csv().unwrap();
        assert!(csv.starts_with("length,reward_end,n1,n2,n3,n4,num_behaviors,error\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn presets_exist_for_classified_worlds_only() {
        for kind in WorldKind::CLASSIFIED {
            let (_, varied) = paper_b_preset(kind).unwrap();
            let cells: usize = varied.iter().map(|(_, v)| v.len()).product();
            assert!(cells <= DEFAULT_SWEEP_CAP);
        }
        assert!(paper_b_preset(WorldKind::CafeThreeway).is_none());
        assert!(preset("other", WorldKind::Cliff).is_err());
    }

    #[test]
    fn composition_rejects_atomic_worlds() {
        let kind = WorldKind::Cliff;
        assert!(composition_experiment(kind, &WorldParams::defaults(kind), &small()).is_err());
    }
}
