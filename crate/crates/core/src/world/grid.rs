use super::{Move, SuccessSource, World, WorldKind, WorldParams};
use crate::behavior::Classifier;

/// Fixed action order for every gridworld; ties in planning resolve toward
/// the front of this list.
pub const GRID_ACTIONS: [&str; 4] = ["up", "right", "down", "left"];

const OFFSETS: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

#[derive(Clone, Copy, Debug, PartialEq)]
enum CellKind {
    Open,
    Blocked,
    Terminal(f64),
    Penalty(f64),
}

/// Rectangular layout that compiles into a [`World`].
///
/// Moves into a blocked cell or off the grid leave the agent in place, and
/// that in-place result is the action's intended outcome. The alternates of
/// an action are the intended outcomes of the other actions plus staying,
/// minus its own intended outcome.
#[derive(Clone, Debug)]
pub struct GridLayout {
    height: usize,
    width: usize,
    cells: Vec<CellKind>,
    step_reward: f64,
    start: (usize, usize),
}

impl GridLayout {
    pub fn new(height: usize, width: usize, step_reward: f64) -> Self {
        GridLayout {
            height,
            width,
            cells: vec![CellKind::Open; height * width],
            step_reward,
            start: (0, 0),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn idx(&self, row: usize, col: usize) -> usize {
        assert!(row < self.height && col < self.width, "cell ({row},{col}) off grid");
        row * self.width + col
    }

    pub fn block(&mut self, row: usize, col: usize) -> &mut Self {
        let i = self.idx(row, col);
        self.cells[i] = CellKind::Blocked;
        self
    }

    pub fn terminal(&mut self, row: usize, col: usize, reward: f64) -> &mut Self {
        let i = self.idx(row, col);
        self.cells[i] = CellKind::Terminal(reward);
        self
    }

    /// A passable cell whose entry pays `reward` instead of the step reward.
    pub fn penalty(&mut self, row: usize, col: usize, reward: f64) -> &mut Self {
        let i = self.idx(row, col);
        self.cells[i] = CellKind::Penalty(reward);
        self
    }

    pub fn start(&mut self, row: usize, col: usize) -> &mut Self {
        self.start = (row, col);
        self
    }

    pub fn is_blocked(&self, row: usize, col: usize) -> bool {
        self.cells[self.idx(row, col)] == CellKind::Blocked
    }

    /// Cell reached from `(row, col)` by `action` under the stay-in-place rule.
    pub fn step(&self, row: usize, col: usize, action: usize) -> (usize, usize) {
        let (dr, dc) = OFFSETS[action];
        let r = row as isize + dr;
        let c = col as isize + dc;
        if r < 0 || c < 0 || r >= self.height as isize || c >= self.width as isize {
            return (row, col);
        }
        let (r, c) = (r as usize, c as usize);
        if self.is_blocked(r, c) {
            (row, col)
        } else {
            (r, c)
        }
    }

    /// Grid cells reachable from the start through open moves, ignoring
    /// terminals as pass-through.
    pub fn reachable_from_start(&self) -> Vec<(usize, usize)> {
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![self.start];
        let mut out = Vec::new();
        seen[self.idx(self.start.0, self.start.1)] = true;
        while let Some((r, c)) = stack.pop() {
            out.push((r, c));
            if matches!(self.cells[self.idx(r, c)], CellKind::Terminal(_)) {
                continue;
            }
            for a in 0..4 {
                let n = self.step(r, c, a);
                let i = self.idx(n.0, n.1);
                if !seen[i] {
                    seen[i] = true;
                    stack.push(n);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn build(&self, kind: WorldKind, params: WorldParams, classifier: Classifier) -> World {
        let mut index = vec![usize::MAX; self.cells.len()];
        let mut cells = Vec::new();
        for r in 0..self.height {
            for c in 0..self.width {
                if !self.is_blocked(r, c) {
                    index[self.idx(r, c)] = cells.len();
                    cells.push(Some((r, c)));
                }
            }
        }
        let n_states = cells.len();
        let n_actions = GRID_ACTIONS.len();
        let mut moves = Vec::with_capacity(n_states * n_actions);
        let mut terminals = vec![false; n_states];
        let entry_reward = |r: usize, c: usize| match self.cells[self.idx(r, c)] {
            CellKind::Terminal(v) | CellKind::Penalty(v) => v,
            _ => self.step_reward,
        };
        for (s, cell) in cells.iter().enumerate() {
            let (r, c) = cell.expect("grid state");
            if let CellKind::Terminal(_) = self.cells[self.idx(r, c)] {
                terminals[s] = true;
                for _ in 0..n_actions {
                    moves.push(Move {
                        intended: s,
                        alternates: Vec::new(),
                        rewards: vec![0.0],
                        success: SuccessSource::Certain,
                    });
                }
                continue;
            }
            let targets: Vec<(usize, usize)> = (0..n_actions).map(|a| self.step(r, c, a)).collect();
            for a in 0..n_actions {
                let intended = targets[a];
                let mut alts: Vec<(usize, usize)> = targets
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| b != a)
                    .map(|(_, &t)| t)
                    .chain(std::iter::once((r, c)))
                    .filter(|&t| t != intended)
                    .collect();
                alts.sort_unstable();
                alts.dedup();
                // states are numbered row-major, so (row, col) order is state order
                let to_state = |(rr, cc): (usize, usize)| index[self.idx(rr, cc)];
                let mut rewards = vec![entry_reward(intended.0, intended.1)];
                rewards.extend(alts.iter().map(|&(rr, cc)| entry_reward(rr, cc)));
                let alternates: Vec<usize> = alts.into_iter().map(to_state).collect();
                moves.push(Move {
                    intended: to_state(intended),
                    alternates,
                    rewards,
                    success: SuccessSource::Confidence,
                });
            }
        }
        World {
            kind,
            params,
            n_states,
            actions: GRID_ACTIONS.iter().map(|a| a.to_string()).collect(),
            available: vec![true; n_states * n_actions],
            moves,
            start: index[self.idx(self.start.0, self.start.1)],
            terminals,
            cells,
            classifier,
        }
    }
}
