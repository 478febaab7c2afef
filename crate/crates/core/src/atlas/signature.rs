use serde::{Deserialize, Serialize};

use super::BehaviorMap;
use crate::error::{AtlasError, Result};

/// Edges in walk order.
pub const EDGE_NAMES: [&str; 4] = ["bottom", "right", "top", "left"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeOptions {
    /// A label run shorter than this many cells is absorbed by the run
    /// before it. 0 and 1 disable the filter.
    pub min_run: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceSignature {
    pub world: String,
    pub num_behaviors: usize,
    pub edge_switches: [usize; 4],
}

/// `(p index, γ index)` of each cell on edge `e`, in walk order.
pub(crate) fn edge_cells(m: &BehaviorMap, e: usize) -> Vec<(usize, usize)> {
    let (g, p) = (m.n_gamma(), m.n_p());
    match e {
        0 => (0..g).map(|ig| (0, ig)).collect(),
        1 => (0..p).map(|ip| (ip, g - 1)).collect(),
        2 => (0..g).rev().map(|ig| (p - 1, ig)).collect(),
        3 => (0..p).rev().map(|ip| (ip, 0)).collect(),
        _ => unreachable!("four edges"),
    }
}

fn edge_labels(m: &BehaviorMap, e: usize) -> Result<Vec<usize>> {
    let seq: Vec<usize> = edge_cells(m, e).into_iter().map(|(ip, ig)| m.label(ip, ig)).collect();
    if seq.iter().any(|&l| m.is_wander(l)) {
        return Err(AtlasError::WanderOnEdge {
            world: m.world_id.clone(),
            edge: EDGE_NAMES[e],
        });
    }
    Ok(seq)
}

fn smooth(seq: &[usize], min_run: usize) -> Vec<usize> {
    if min_run <= 1 || seq.is_empty() {
        return seq.to_vec();
    }
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for &l in seq {
        match runs.last_mut() {
            Some((lab, len)) if *lab == l => *len += 1,
            _ => runs.push((l, 1)),
        }
    }
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (i, &(lab, len)) in runs.iter().enumerate() {
        let short = len < min_run && i > 0;
        match out.last_mut() {
            Some((prev, plen)) if short || *prev == lab => *plen += len,
            _ => out.push((lab, len)),
        }
    }
    out.into_iter().flat_map(|(l, n)| std::iter::repeat_n(l, n)).collect()
}

fn switches(seq: &[usize]) -> usize {
    seq.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn edge_switch_counts(m: &BehaviorMap) -> Result<[usize; 4]> {
    edge_switch_counts_with(m, &EdgeOptions::default())
}

pub fn edge_switch_counts_with(m: &BehaviorMap, opts: &EdgeOptions) -> Result<[usize; 4]> {
    let mut out = [0; 4];
    for (e, slot) in out.iter_mut().enumerate() {
        *slot = switches(&smooth(&edge_labels(m, e)?, opts.min_run));
    }
    Ok(out)
}

/// Switch locations on each edge as unit-square coordinates along the edge
/// axis (γ for bottom and top, `p` for right and left), ascending. Each
/// location is the midpoint between the two differing cells.
pub fn edge_switch_positions(m: &BehaviorMap) -> Result<[Vec<(f64, usize, usize)>; 4]> {
    let mut out: [Vec<(f64, usize, usize)>; 4] = Default::default();
    for (e, slot) in out.iter_mut().enumerate() {
        let cells = edge_cells(m, e);
        let labels = edge_labels(m, e)?;
        let coord = |(ip, ig): (usize, usize)| {
            if e % 2 == 0 {
                m.spec.gamma_unit(ig)
            } else {
                m.spec.p_unit(ip)
            }
        };
        for k in 1..cells.len() {
            if labels[k] != labels[k - 1] {
                let x = 0.5 * (coord(cells[k - 1]) + coord(cells[k]));
                // record labels in ascending-axis order
                let (lo, hi) = if e < 2 { (labels[k - 1], labels[k]) } else { (labels[k], labels[k - 1]) };
                slot.push((x, lo, hi));
            }
        }
        slot.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    Ok(out)
}

pub fn signature(m: &BehaviorMap) -> Result<EquivalenceSignature> {
    Ok(EquivalenceSignature {
        world: m.world_id.clone(),
        num_behaviors: m.distinct_labels().len(),
        edge_switches: edge_switch_counts(m)?,
    })
}

/// Same behavior count and same per-edge switch counts, in edge order.
pub fn check_equivalent(a: &BehaviorMap, b: &BehaviorMap) -> Result<bool> {
    let (sa, sb) = (signature(a)?, signature(b)?);
    Ok(sa.num_behaviors == sb.num_behaviors && sa.edge_switches == sb.edge_switches)
}
