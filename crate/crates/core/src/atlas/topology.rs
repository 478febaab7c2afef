use serde::{Deserialize, Serialize};

use super::{edge_switch_counts, BehaviorMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyReport {
    /// 4-connected region count per label index (palette order).
    pub components_per_label: Vec<usize>,
    /// Regions touching no map edge.
    pub interior_loops: usize,
    pub warnings: Vec<String>,
}

pub fn interior_topology_report(m: &BehaviorMap) -> TopologyReport {
    let (g, p) = (m.n_gamma(), m.n_p());
    let mut comp = vec![usize::MAX; g * p];
    let mut components_per_label = vec![0; m.palette.len()];
    let mut interior_loops = 0;
    let mut stack = Vec::new();
    let mut next_id = 0;
    for start in 0..g * p {
        if comp[start] != usize::MAX {
            continue;
        }
        let lab = m.labels[start];
        comp[start] = next_id;
        stack.push(start);
        let mut touches_edge = false;
        while let Some(c) = stack.pop() {
            let (ip, ig) = (c / g, c % g);
            if ip == 0 || ig == 0 || ip + 1 == p || ig + 1 == g {
                touches_edge = true;
            }
            let mut visit = |n: usize| {
                if comp[n] == usize::MAX && m.labels[n] == lab {
                    comp[n] = next_id;
                    stack.push(n);
                }
            };
            if ip > 0 {
                visit(c - g);
            }
            if ip + 1 < p {
                visit(c + g);
            }
            if ig > 0 {
                visit(c - 1);
            }
            if ig + 1 < g {
                visit(c + 1);
            }
        }
        components_per_label[lab] += 1;
        if !touches_edge {
            interior_loops += 1;
        }
        next_id += 1;
    }

    let mut warnings = Vec::new();
    for (l, &n) in components_per_label.iter().enumerate() {
        if n > 1 {
            warnings.push(format!("label `{}` splits into {n} regions", m.palette[l]));
        }
    }
    if interior_loops > 0 {
        warnings.push(format!(
            "{interior_loops} region(s) touch no edge; edge signatures cannot see them"
        ));
    }
    if let Ok(counts) = edge_switch_counts(m) {
        let total: usize = counts.iter().sum();
        if total >= 4 {
            warnings.push(format!(
                "{total} edge switches; with this many crossings the signature may not pin down the interior"
            ));
        }
    }
    TopologyReport {
        components_per_label,
        interior_loops,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::GridSpec;

    fn map(n: usize, labels: Vec<usize>) -> BehaviorMap {
        BehaviorMap::new(GridSpec::square(n).unwrap(), labels, "t", vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn island_is_an_interior_loop() {
        let mut labels = vec![0; 25];
        labels[12] = 1;
        let r = interior_topology_report(&map(5, labels));
        assert_eq!(r.components_per_label, vec![1, 1]);
        assert_eq!(r.interior_loops, 1);
    }

    #[test]
    fn split_regions_are_counted() {
        let labels = vec![1, 0, 1, 1, 0, 1, 1, 0, 1];
        let r = interior_topology_report(&map(3, labels));
        assert_eq!(r.components_per_label, vec![1, 2]);
        assert_eq!(r.interior_loops, 0);
        assert!(r.warnings.iter().any(|w| w.contains("edge switches")));
    }
}
