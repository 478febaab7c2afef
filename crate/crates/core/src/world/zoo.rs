//! Constructors for every world in the catalog.

use super::{GridLayout, SuccessSource, World, WorldBuilder, WorldKind, WorldParams};
use crate::behavior::Classifier;
use crate::error::{AtlasError, Result};

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(AtlasError::InvalidParams(msg.into()))
}

fn check_grid(p: &WorldParams, min_w: usize, min_h: usize) -> Result<()> {
    if p.width < min_w || p.height < min_h {
        return invalid(format!(
            "grid must be at least {min_w} wide and {min_h} high, got {}x{}",
            p.width, p.height
        ));
    }
    Ok(())
}

pub fn build_world(kind: WorldKind, params: &WorldParams) -> Result<World> {
    match kind {
        WorldKind::BigSmall => make_big_small(params),
        WorldKind::Cliff => make_cliff(params),
        WorldKind::Wall => make_wall(params),
        WorldKind::Chain
        | WorldKind::RiverSwim
        | WorldKind::GamblersV1
        | WorldKind::GamblersV2
        | WorldKind::Cafe => make_literature_world(kind, params),
        WorldKind::CliffDisengage | WorldKind::CafeThreeway => make_composite(kind, params),
        WorldKind::Custom => Err(AtlasError::UnknownKind("custom".into())),
    }
}

/// Start top-left; small reward at the bottom of the start column, big reward
/// at the bottom of the far column.
pub fn make_big_small(p: &WorldParams) -> Result<World> {
    check_grid(p, 2, 2)?;
    p.check_finite()?;
    if !(p.reward_small > 0.0 && p.reward_big > 0.0) {
        return invalid("big-small rewards must be positive");
    }
    if p.reward_small >= p.reward_big {
        return invalid(format!(
            "small reward {} must be below big reward {}",
            p.reward_small, p.reward_big
        ));
    }
    let (h, w) = (p.height, p.width);
    let mut g = GridLayout::new(h, w, p.step_reward);
    g.start(0, 0)
        .terminal(h - 1, 0, p.reward_small)
        .terminal(h - 1, w - 1, p.reward_big);
    let mut world = g.build(
        WorldKind::BigSmall,
        p.clone(),
        Classifier::StartAction { names: vec![] },
    );
    world.classifier = Classifier::BigSmall {
        big: world.state_at(h - 1, w - 1).expect("big terminal"),
        small: world.state_at(h - 1, 0).expect("small terminal"),
    };
    Ok(world)
}

fn cliff_layout(p: &WorldParams, extra_row: bool) -> Result<GridLayout> {
    check_grid(p, 3, 2)?;
    p.check_finite()?;
    if p.reward_goal <= 0.0 {
        return invalid("cliff goal reward must be positive");
    }
    if p.reward_cliff >= 0.0 {
        return invalid(format!("cliff penalty must be negative, got {}", p.reward_cliff));
    }
    let (h, w) = (p.height, p.width);
    let mut g = GridLayout::new(if extra_row { h + 1 } else { h }, w, p.step_reward);
    g.start(h - 1, 0).terminal(h - 1, w - 1, p.reward_goal);
    for c in 1..w - 1 {
        g.terminal(h - 1, c, p.reward_cliff);
    }
    if extra_row {
        g.terminal(h, 0, p.reward_disengage);
        for c in 1..w {
            g.block(h, c);
        }
    }
    Ok(g)
}

fn cliff_classifier(world: &World, p: &WorldParams, disengage: Option<usize>) -> Classifier {
    let (h, w) = (p.height, p.width);
    let start = world.start();
    let goal = world.state_at(h - 1, w - 1).expect("goal");
    let cliff: Vec<usize> = (1..w - 1).filter_map(|c| world.state_at(h - 1, c)).collect();
    let mut near_cliff = vec![false; world.n_states()];
    for &s in &cliff {
        near_cliff[s] = true;
    }
    for s in 0..world.n_states() {
        if s == start || s == goal || Some(s) == disengage {
            continue;
        }
        let Some((r, c)) = world.cell(s) else { continue };
        let touches = cliff.iter().any(|&k| {
            let (kr, kc) = world.cell(k).expect("cliff cell");
            r.abs_diff(kr) + c.abs_diff(kc) == 1
        });
        if touches {
            near_cliff[s] = true;
        }
    }
    Classifier::Cliff {
        near_cliff,
        disengage,
    }
}

/// Start bottom-left, goal bottom-right, absorbing penalized cliff between.
pub fn make_cliff(p: &WorldParams) -> Result<World> {
    let g = cliff_layout(p, false)?;
    let mut world = g.build(WorldKind::Cliff, p.clone(), Classifier::StartAction { names: vec![] });
    world.classifier = cliff_classifier(&world, p, None);
    Ok(world)
}

/// A wall across row `height - 2` with a gap in the last column and one
/// passable penalized cell at `penalty_col`. The start sits above the
/// penalized cell; the goal is on the bottom row, `goal_offset` columns
/// toward the gap.
pub fn make_wall(p: &WorldParams) -> Result<World> {
    check_grid(p, 3, 3)?;
    p.check_finite()?;
    if p.reward_goal <= 0.0 {
        return invalid("wall goal reward must be positive");
    }
    if p.reward_wall >= 0.0 {
        return invalid(format!("wall penalty must be negative, got {}", p.reward_wall));
    }
    let (h, w, pc) = (p.height, p.width, p.penalty_col);
    let gc = pc + p.goal_offset;
    if gc >= w {
        return invalid(format!("penalty column {pc} plus goal offset {} outside a grid of width {w}", p.goal_offset));
    }
    let wall_row = h - 2;
    let mut g = GridLayout::new(h, w, p.step_reward);
    for c in 0..w - 1 {
        g.block(wall_row, c);
    }
    g.penalty(wall_row, pc, p.reward_wall)
        .start(0, pc)
        .terminal(h - 1, gc, p.reward_goal);
    // a penalty-free path must exist around the wall
    let mut detour = g.clone();
    detour.block(wall_row, pc);
    if !detour.reachable_from_start().contains(&(h - 1, gc)) {
        return invalid("wall placement leaves no path around the penalized cell");
    }
    let mut world = g.build(WorldKind::Wall, p.clone(), Classifier::StartAction { names: vec![] });
    world.classifier = Classifier::Wall {
        penalty: world.state_at(wall_row, pc).expect("penalty cell"),
    };
    Ok(world)
}

pub fn make_literature_world(kind: WorldKind, p: &WorldParams) -> Result<World> {
    match kind {
        WorldKind::Chain => make_chain(p),
        WorldKind::RiverSwim => make_riverswim(p),
        WorldKind::GamblersV1 | WorldKind::GamblersV2 => make_gamblers(kind, p),
        WorldKind::Cafe => make_cafe(p, false),
        other => Err(AtlasError::UnknownKind(other.name().into())),
    }
}

pub fn make_composite(kind: WorldKind, p: &WorldParams) -> Result<World> {
    match kind {
        WorldKind::CliffDisengage => {
            if !(p.reward_disengage > 0.0 && p.reward_disengage < p.reward_goal) {
                return invalid(format!(
                    "disengage reward must lie in (0, {}), got {}",
                    p.reward_goal, p.reward_disengage
                ));
            }
            let g = cliff_layout(p, true)?;
            let mut world = g.build(kind, p.clone(), Classifier::StartAction { names: vec![] });
            let d = world.state_at(p.height, 0).expect("disengage state");
            world.classifier = cliff_classifier(&world, p, Some(d));
            Ok(world)
        }
        WorldKind::CafeThreeway => make_cafe(p, true),
        other => Err(AtlasError::UnknownKind(other.name().into())),
    }
}

fn check_length(p: &WorldParams, what: &str) -> Result<()> {
    if p.length < 3 {
        return invalid(format!("{what} length must be at least 3, got {}", p.length));
    }
    p.check_finite()
}

/// States `0..length` in a line, then the end state and the disengage state.
/// `exercise` advances (failing leaves the user in place); `disengage` ends
/// the episode with a small reward.
pub fn make_chain(p: &WorldParams) -> Result<World> {
    check_length(p, "chain")?;
    if p.reward_disengage <= 0.0 || p.reward_end <= p.reward_disengage {
        return invalid("chain needs 0 < disengage reward < end reward");
    }
    let n = p.length;
    let (end, quit) = (n, n + 1);
    let mut b = WorldBuilder::new(n + 2, &["exercise", "disengage"])
        .kind(WorldKind::Chain, p.clone())
        .start(0)
        .terminal(end)
        .terminal(quit);
    for s in 0..n {
        let next = s + 1;
        let r_next = if next == end { p.reward_end } else { p.step_reward };
        b = b
            .set_move(s, 0, next, vec![s], vec![r_next, p.step_reward], SuccessSource::Confidence)
            .set_move(s, 1, quit, vec![], vec![p.reward_disengage], SuccessSource::Certain);
    }
    Ok(b.classifier(Classifier::Chain { disengage_action: 1 }).build())
}

/// River cells `0..length`; the left bank (small reward) is state `length`,
/// the right bank (large reward) `length + 1`. The user starts next to the
/// left bank. `upstream` may fail and leave the user in place; `downstream`
/// always drifts left.
pub fn make_riverswim(p: &WorldParams) -> Result<World> {
    check_length(p, "riverswim")?;
    if !(p.reward_small > 0.0 && p.reward_small < p.reward_big) {
        return invalid("riverswim needs 0 < small reward < big reward");
    }
    let n = p.length;
    let (left_bank, right_bank) = (n, n + 1);
    let mut b = WorldBuilder::new(n + 2, &["upstream", "downstream"])
        .kind(WorldKind::RiverSwim, p.clone())
        .start(0)
        .terminal(left_bank)
        .terminal(right_bank);
    for s in 0..n {
        let up = if s + 1 == n { right_bank } else { s + 1 };
        let down = if s == 0 { left_bank } else { s - 1 };
        let r_up = if up == right_bank { p.reward_big } else { p.step_reward };
        let r_down = if down == left_bank { p.reward_small } else { p.step_reward };
        b = b
            .set_move(s, 0, up, vec![s], vec![r_up, p.step_reward], SuccessSource::Confidence)
            .set_move(s, 1, down, vec![], vec![r_down], SuccessSource::Certain);
    }
    Ok(b
        .classifier(Classifier::StartAction {
            names: vec!["upstream".into(), "downstream".into()],
        })
        .build())
}

/// Positions `0..length` (start at 0), dead-end state `length`, goal `length + 1`.
/// `continue` steps toward the goal with probability `p_continue` (otherwise
/// the user stays put); `finish` jumps to the goal, landing in the dead end
/// with probability `p_fail`. The confidence axis replaces `p_continue` in
/// v1 and the finish success probability `1 - p_fail` in v2.
pub fn make_gamblers(kind: WorldKind, p: &WorldParams) -> Result<World> {
    if p.length < 2 {
        return invalid(format!("gamblers length must be at least 2, got {}", p.length));
    }
    p.check_finite()?;
    for (name, v) in [("p_continue", p.p_continue), ("p_fail", p.p_fail)] {
        if !(0.0..=1.0).contains(&v) {
            return invalid(format!("{name} must lie in [0, 1], got {v}"));
        }
    }
    if p.reward_goal <= p.reward_dead {
        return invalid("gamblers goal reward must exceed the dead-end reward");
    }
    let (continue_src, finish_src) = match kind {
        WorldKind::GamblersV1 => (SuccessSource::Confidence, SuccessSource::Fixed(1.0 - p.p_fail)),
        WorldKind::GamblersV2 => (SuccessSource::Fixed(p.p_continue), SuccessSource::Confidence),
        other => return Err(AtlasError::UnknownKind(other.name().into())),
    };
    let n = p.length;
    let (dead, goal) = (n, n + 1);
    let mut b = WorldBuilder::new(n + 2, &["continue", "finish"])
        .kind(kind, p.clone())
        .start(0)
        .terminal(dead)
        .terminal(goal);
    for s in 0..n {
        let next = if s + 1 == n { goal } else { s + 1 };
        let r_next = if next == goal { p.reward_goal } else { p.step_reward };
        b = b
            .set_move(s, 0, next, vec![s], vec![r_next, p.step_reward], continue_src)
            .set_move(s, 1, goal, vec![dead], vec![p.reward_goal, p.reward_dead], finish_src);
    }
    Ok(b
        .classifier(Classifier::StartAction {
            names: vec!["continue".into(), "finish".into()],
        })
        .build())
}

/// Café layout on a `height x width` grid (13 x 8 by default). The user starts
/// at the bottom; a wall three rows above the start has a single opening
/// flanked by the two donut stores, so every route north passes them. The
/// noodle shop sits closer than the vegan café.
pub fn make_cafe(p: &WorldParams, three_way: bool) -> Result<World> {
    check_grid(p, 8, 13)?;
    p.check_finite()?;
    let rewards = [p.reward_donut, p.reward_noodle, p.reward_vegan];
    if rewards.iter().any(|r| *r <= 0.0) {
        return invalid("café rewards must be positive");
    }
    let (h, w) = (p.height, p.width);
    let door_row = h - 4;
    let door_col = 3;
    let start = (h - 1, door_col);
    let donuts = [(door_row, door_col - 1), (door_row, door_col + 1)];
    let noodle = (door_row - 3, 0);
    let vegan = (0, w - 1);
    let mut g = GridLayout::new(h, w, p.step_reward);
    for c in 0..w {
        if c != door_col {
            g.block(door_row, c);
        }
    }
    g.start(start.0, start.1)
        .terminal(donuts[0].0, donuts[0].1, p.reward_donut)
        .terminal(donuts[1].0, donuts[1].1, p.reward_donut)
        .terminal(noodle.0, noodle.1, p.reward_noodle)
        .terminal(vegan.0, vegan.1, p.reward_vegan);
    let kind = if three_way {
        WorldKind::CafeThreeway
    } else {
        WorldKind::Cafe
    };
    let mut world = g.build(kind, p.clone(), Classifier::StartAction { names: vec![] });
    let at = |(r, c): (usize, usize)| world.state_at(r, c).expect("eatery");
    world.classifier = Classifier::Cafe {
        donuts: donuts.iter().map(|&d| at(d)).collect(),
        noodle: at(noodle),
        vegan: at(vegan),
        three_way,
    };
    Ok(world)
}
