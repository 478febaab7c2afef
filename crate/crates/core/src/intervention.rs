//! Intervention strategies as piecewise-linear paths in the unit trait
//! square, boundary-crossing counts, and crossing-preserving transfer
//! between equivalent maps.
//!
//! Coordinates are normalized: `(0, 0)` is the lowest sampled (γ, p) pair of
//! a map and `(1, 1)` the highest.

use serde::{Deserialize, Serialize};

use crate::atlas::{check_equivalent, edge_switch_positions, signature, BehaviorMap};
use crate::error::{AtlasError, Result};

pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InterventionPath {
    /// `(γ, p)` in the unit square.
    pub waypoints: Vec<(f64, f64)>,
}

impl InterventionPath {
    pub fn new(waypoints: Vec<(f64, f64)>) -> Result<Self> {
        let path = InterventionPath { waypoints };
        path.validate()?;
        Ok(path)
    }

    pub fn segment(from: (f64, f64), to: (f64, f64)) -> Result<Self> {
        Self::new(vec![from, to])
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(AtlasError::InvalidPath("a path needs at least 2 waypoints".into()));
        }
        for (i, &(g, p)) in self.waypoints.iter().enumerate() {
            if !((0.0..=1.0).contains(&g) && (0.0..=1.0).contains(&p)) {
                return Err(AtlasError::InvalidPath(format!(
                    "waypoint {i} ({g}, {p}) leaves the unit square"
                )));
            }
        }
        Ok(())
    }

    pub fn reversed(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        InterventionPath { waypoints }
    }

    /// Per-step `(Δγ, Δp)` increments.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        self.waypoints
            .windows(2)
            .map(|w| (w[1].0 - w[0].0, w[1].1 - w[0].1))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub crossings: usize,
    pub crossing_points: Vec<(f64, f64)>,
    /// Label of each run along the path, in order.
    pub labels_sequence: Vec<usize>,
}

pub fn path_crossings(m: &BehaviorMap, path: &InterventionPath, samples_per_segment: usize) -> Result<CrossingReport> {
    path.validate()?;
    if samples_per_segment < 2 {
        return Err(AtlasError::InvalidPath(format!(
            "samples_per_segment must be >= 2, got {samples_per_segment}"
        )));
    }
    let mut pts = Vec::new();
    for (k, w) in path.waypoints.windows(2).enumerate() {
        let ((g0, p0), (g1, p1)) = (w[0], w[1]);
        let first = if k == 0 { 0 } else { 1 };
        for i in first..samples_per_segment {
            let t = i as f64 / (samples_per_segment - 1) as f64;
            pts.push((g0 + (g1 - g0) * t, p0 + (p1 - p0) * t));
        }
    }
    let labels: Vec<usize> = pts.iter().map(|&(g, p)| m.label_at_unit(g, p)).collect();
    let mut crossing_points = Vec::new();
    let mut labels_sequence = vec![labels[0]];
    for i in 1..labels.len() {
        if labels[i] != labels[i - 1] {
            let (a, b) = (pts[i - 1], pts[i]);
            crossing_points.push((0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1)));
            labels_sequence.push(labels[i]);
        }
    }
    Ok(CrossingReport {
        crossings: crossing_points.len(),
        crossing_points,
        labels_sequence,
    })
}

/// Monotone piecewise-linear map on `[0, 1]` sending `from[k]` to `to[k]`.
fn align(from: &[f64], to: &[f64], x: f64) -> f64 {
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    for (&a, &b) in from.iter().zip(to) {
        if a > *xs.last().unwrap() && a < 1.0 && b > *ys.last().unwrap() && b < 1.0 {
            xs.push(a);
            ys.push(b);
        }
    }
    xs.push(1.0);
    ys.push(1.0);
    for k in 1..xs.len() {
        if x <= xs[k] {
            let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
            return ys[k - 1] + t * (ys[k] - ys[k - 1]);
        }
    }
    1.0
}

fn positions(m: &BehaviorMap) -> Result<[Vec<f64>; 4]> {
    let raw = edge_switch_positions(m)?;
    Ok(raw.map(|v| v.into_iter().map(|(x, _, _)| x).collect()))
}

/// Carries `path` from `src` to the equivalent map `dst`, keeping its
/// crossing count. Waypoints go through a bilinear blend of per-edge
/// alignment maps; when that does not reproduce the count, an axis-parallel
/// path with the right count is searched for in `dst`.
pub fn transfer_strategy(src: &BehaviorMap, path: &InterventionPath, dst: &BehaviorMap) -> Result<InterventionPath> {
    path.validate()?;
    if !check_equivalent(src, dst)? {
        return Err(AtlasError::NotEquivalent {
            src: signature(src)?.world,
            dst: signature(dst)?.world,
        });
    }
    let want = path_crossings(src, path, DEFAULT_SAMPLES_PER_SEGMENT)?.crossings;
    let (ps, pd) = (positions(src)?, positions(dst)?);
    let [bottom_s, right_s, top_s, left_s] = &ps;
    let [bottom_d, right_d, top_d, left_d] = &pd;
    let mapped = InterventionPath::new(
        path.waypoints
            .iter()
            .map(|&(u, v)| {
                let u2 = (1.0 - v) * align(bottom_s, bottom_d, u) + v * align(top_s, top_d, u);
                let v2 = (1.0 - u) * align(left_s, left_d, v) + u * align(right_s, right_d, v);
                (u2.clamp(0.0, 1.0), v2.clamp(0.0, 1.0))
            })
            .collect(),
    )?;
    if path_crossings(dst, &mapped, DEFAULT_SAMPLES_PER_SEGMENT)?.crossings == want {
        return Ok(mapped);
    }
    axis_parallel_search(dst, want)
}

fn axis_parallel_search(m: &BehaviorMap, want: usize) -> Result<InterventionPath> {
    let (g, p) = (m.n_gamma(), m.n_p());
    let spec = &m.spec;
    // rows at fixed p, then columns at fixed γ
    let lines = (0..p)
        .map(|ip| {
            let cells: Vec<(f64, f64)> = (0..g).map(|ig| (spec.gamma_unit(ig), spec.p_unit(ip))).collect();
            (cells, m.row(ip).to_vec())
        })
        .chain((0..g).map(|ig| {
            let cells: Vec<(f64, f64)> = (0..p).map(|ip| (spec.gamma_unit(ig), spec.p_unit(ip))).collect();
            let labels = (0..p).map(|ip| m.label(ip, ig)).collect();
            (cells, labels)
        }));
    for (cells, labels) in lines {
        let changes: Vec<usize> = (1..labels.len()).filter(|&i| labels[i] != labels[i - 1]).collect();
        if changes.len() < want {
            continue;
        }
        // span from the first cell to just before the change after the `want`-th one
        let start = 0;
        let end = if want < changes.len() { changes[want] - 1 } else { labels.len() - 1 };
        if end <= start {
            continue;
        }
        let candidate = InterventionPath::new(vec![cells[start], cells[end]])?;
        if path_crossings(m, &candidate, DEFAULT_SAMPLES_PER_SEGMENT)?.crossings == want {
            return Ok(candidate);
        }
    }
    Err(AtlasError::TransferFailed(want))
}
