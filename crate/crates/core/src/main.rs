//! `atlas` command line.
//!
//! Exit codes: 0 success, 1 bad arguments or unreadable input, 2 pipeline
//! failure, 3 maps not equivalent (or a sweep that leaves its class).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use behavior_atlas::atlas::{
    compute_behavior_map_with, edge_switch_counts_with, interior_topology_report, BehaviorMap, EdgeOptions,
    EquivalenceSignature, Execution, MapOptions, DEFAULT_RESOLUTION,
};
use behavior_atlas::config::RunConfig;
use behavior_atlas::intervention::{path_crossings, transfer_strategy, InterventionPath, DEFAULT_SAMPLES_PER_SEGMENT};
use behavior_atlas::io::{load_map_csv, save_map_csv, signature_json, write_file};
use behavior_atlas::perception::{build_user_mdp, UserTraits};
use behavior_atlas::render::{render_svg, SvgStyle};
use behavior_atlas::sweep::{composition_experiment_with, perturbation_sweep_with, preset, SweepOptions, DEFAULT_SWEEP_CAP, PRESET_RESOLUTION};
use behavior_atlas::world::{validate_world, WorldKind};
use behavior_atlas::AtlasError;

#[derive(Parser, Debug)]
#[command(name = "atlas", version, about = "Behavior maps over (gamma, p) user traits")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one world's behavior map and print its signature.
    Map(MapArgs),
    /// Compare two maps, given as CSV files or world names.
    Equiv(EquivArgs),
    /// Run a parameter-perturbation sweep.
    Sweep(SweepArgs),
    /// Count boundary crossings along an intervention path.
    Path(PathArgs),
    /// Run a composite world through the full pipeline.
    Compose(ComposeArgs),
    /// Print a world's JSON description and validation findings.
    World(WorldCmdArgs),
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    reward_big: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_small: Option<f64>,
    /// Sets the small reward as a fraction of the big reward.
    #[arg(long, allow_hyphen_values = true)]
    reward_ratio: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_goal: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_cliff: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_wall: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_disengage: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_end: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_dead: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_donut: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_noodle: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    reward_vegan: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    step_reward: Option<f64>,
    #[arg(long)]
    p_continue: Option<f64>,
    #[arg(long)]
    p_fail: Option<f64>,
    #[arg(long)]
    penalty_col: Option<usize>,
    #[arg(long)]
    goal_offset: Option<usize>,
}

impl ParamArgs {
    fn pairs(&self) -> Vec<(&'static str, f64)> {
        let counts = [
            ("width", self.width),
            ("height", self.height),
            ("length", self.length),
            ("penalty_col", self.penalty_col),
            ("goal_offset", self.goal_offset),
        ];
        let reals = [
            ("reward_big", self.reward_big),
            ("reward_small", self.reward_small),
            ("reward_ratio", self.reward_ratio),
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
            ("p_continue", self.p_continue),
            ("p_fail", self.p_fail),
        ];
        counts
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v as f64)))
            .chain(reals.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))))
            .collect()
    }
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Samples per axis.
    #[arg(long)]
    res: Option<usize>,
    /// Gamma axis range as `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    gamma_range: Option<(f64, f64)>,
    /// Confidence axis range as `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    p_range: Option<(f64, f64)>,
    /// Value-iteration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Accepted for reproducible scripts; every computation is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluate cells on the calling thread only.
    #[arg(long)]
    serial: bool,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long)]
    world: Option<WorldKind>,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Map CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Absorb edge label runs shorter than this before counting switches.
    #[arg(long, default_value_t = 0)]
    min_run: usize,
}

#[derive(Args, Debug)]
struct EquivArgs {
    /// Map CSV path or world name.
    a: String,
    /// Map CSV path or world name.
    b: String,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    world: WorldKind,
    /// Named preset (`paper-b`).
    #[arg(long)]
    preset: Option<String>,
    /// Varied parameter as `name=v1,v2,...`; repeatable.
    #[arg(long = "vary")]
    vary: Vec<String>,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = DEFAULT_SWEEP_CAP)]
    cap: usize,
    /// Report JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Index CSV output.
    #[arg(long)]
    index: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PathArgs {
    /// Map CSV to read. Without it, `--world` is computed.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    world: Option<WorldKind>,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Start point `g,p` in the unit square.
    #[arg(long, value_parser = parse_point)]
    from: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_point)]
    to: Option<(f64, f64)>,
    /// JSON list of `[gamma, p]` waypoints.
    #[arg(long = "path")]
    path_file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_SEGMENT)]
    samples: usize,
    /// Map CSV or world name to carry the path to.
    #[arg(long)]
    transfer_to: Option<String>,
    /// Crossing report JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    #[arg(long)]
    kind: WorldKind,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WorldCmdArgs {
    #[arg(long)]
    world: WorldKind,
    #[command(flatten)]
    params: ParamArgs,
    /// Dump the perceived transition table at `--gamma`/`--p` to this CSV.
    #[arg(long)]
    transitions: Option<PathBuf>,
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    #[arg(long, default_value_t = 0.8)]
    p: f64,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected `lo:hi`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`"));
    Ok((num(lo)?, num(hi)?))
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (g, p) = s.split_once(',').ok_or_else(|| format!("expected `g,p`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`"));
    Ok((num(g)?, num(p)?))
}

fn exit_code(e: &AtlasError) -> u8 {
    match e {
        AtlasError::NotEquivalent { .. } => 3,
        AtlasError::CellFailures(_)
        | AtlasError::WanderOnEdge { .. }
        | AtlasError::NonFinite { .. }
        | AtlasError::TransferFailed(_)
        | AtlasError::CapExceeded { .. } => 2,
        _ => 1,
    }
}

type CmdResult = Result<u8, AtlasError>;

/// File config overlaid by flag values.
fn run_config(world: Option<WorldKind>, params: &ParamArgs, grid: &GridArgs) -> Result<RunConfig, AtlasError> {
    let file = match &grid.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut flags = RunConfig {
        world,
        res: grid.res,
        gamma_range: grid.gamma_range,
        p_range: grid.p_range,
        tol: grid.tol,
        max_iter: grid.max_iter,
        ..RunConfig::default()
    };
    for (k, v) in params.pairs() {
        flags.params.insert(k.to_string(), v);
    }
    Ok(file.overlay(flags))
}

fn map_options(cfg: &RunConfig, grid: &GridArgs) -> Result<MapOptions, AtlasError> {
    Ok(MapOptions {
        solver: cfg.solver()?,
        execution: if grid.serial { Execution::Serial } else { Execution::default() },
    })
}

fn style(cfg: &RunConfig) -> SvgStyle {
    SvgStyle {
        colors: cfg.palette.clone().unwrap_or_default(),
        ..SvgStyle::default()
    }
}

fn report_topology(m: &BehaviorMap) {
    for w in interior_topology_report(m).warnings {
        eprintln!("warning: {w}");
    }
}

fn write_outputs(m: &BehaviorMap, cfg: &RunConfig, out: Option<&Path>, svg: Option<&Path>) -> Result<(), AtlasError> {
    if let Some(path) = out.or(cfg.out.as_deref()) {
        save_map_csv(m, path)?;
    }
    if let Some(path) = svg.or(cfg.svg.as_deref()) {
        write_file(path, &render_svg(m, &style(cfg)))?;
    }
    Ok(())
}

fn cmd_map(a: &MapArgs) -> CmdResult {
    let cfg = run_config(a.world, &a.params, &a.grid)?;
    let w = cfg.build_world()?;
    let m = compute_behavior_map_with(&w, &cfg.grid(DEFAULT_RESOLUTION)?, &map_options(&cfg, &a.grid)?)?;
    write_outputs(&m, &cfg, a.out.as_deref(), a.svg.as_deref())?;
    let sig = EquivalenceSignature {
        world: m.world_id.clone(),
        num_behaviors: m.distinct_labels().len(),
        edge_switches: edge_switch_counts_with(&m, &EdgeOptions { min_run: a.min_run })?,
    };
    report_topology(&m);
    println!("{}", signature_json(&sig));
    Ok(0)
}

/// A world name computes that world's default map; anything else is read
/// as a map CSV.
fn load_or_compute(spec: &str, grid: &GridArgs) -> Result<BehaviorMap, AtlasError> {
    match spec.parse::<WorldKind>() {
        Ok(kind) => {
            let cfg = run_config(Some(kind), &ParamArgs::default(), grid)?;
            let w = cfg.build_world()?;
            Ok(compute_behavior_map_with(&w, &cfg.grid(DEFAULT_RESOLUTION)?, &map_options(&cfg, grid)?)?)
        }
        Err(_) => load_map_csv(Path::new(spec)),
    }
}

fn cmd_equiv(a: &EquivArgs) -> CmdResult {
    let ma = load_or_compute(&a.a, &a.grid)?;
    let mb = load_or_compute(&a.b, &a.grid)?;
    let sa = behavior_atlas::atlas::signature(&ma)?;
    let sb = behavior_atlas::atlas::signature(&mb)?;
    println!("{}", signature_json(&sa));
    println!("{}", signature_json(&sb));
    let same = sa.num_behaviors == sb.num_behaviors && sa.edge_switches == sb.edge_switches;
    println!("equivalent: {same}");
    Ok(if same { 0 } else { 3 })
}

fn parse_vary(s: &str) -> Result<(String, Vec<f64>), AtlasError> {
    let bad = || AtlasError::InvalidParams(format!("--vary expects `name=v1,v2,...`, got `{s}`"));
    let (name, vals) = s.split_once('=').ok_or_else(bad)?;
    let values = vals
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name.trim().replace('-', "_"), values))
}

fn cmd_sweep(a: &SweepArgs) -> CmdResult {
    let cfg = run_config(Some(a.world), &a.params, &a.grid)?;
    let (base, mut varied) = match &a.preset {
        Some(name) => {
            let (mut base, varied) = preset(name, a.world)?;
            // explicit flags still apply on top of the preset base
            for (k, v) in a.params.pairs() {
                base.set(k, v)?;
            }
            (base, varied)
        }
        None => (cfg.world_params(a.world)?, Vec::new()),
    };
    for v in &a.vary {
        let (name, values) = parse_vary(v)?;
        varied.retain(|(n, _)| *n != name);
        varied.push((name, values));
    }
    let opts = SweepOptions {
        cap: a.cap,
        map: map_options(&cfg, &a.grid)?,
    };
    let report = perturbation_sweep_with(a.world, &base, &varied, &cfg.grid(PRESET_RESOLUTION)?, &opts)?;
    if let Some(path) = &a.out {
        write_file(path, &report.to_json())?;
    }
    if let Some(path) = &a.index {
        write_file(path, &report.index_csv()?)?;
    }
    for f in &report.failures {
        eprintln!("cell failed: {f}");
    }
    println!("{}", report.summary());
    Ok(if report.verdict() { 0 } else { 3 })
}

fn cmd_path(a: &PathArgs) -> CmdResult {
    let cfg = run_config(a.world, &a.params, &a.grid)?;
    let m = match &a.map {
        Some(path) => load_map_csv(path)?,
        None => compute_behavior_map_with(&cfg.build_world()?, &cfg.grid(DEFAULT_RESOLUTION)?, &map_options(&cfg, &a.grid)?)?,
    };
    let path = match (&a.path_file, a.from, a.to) {
        (Some(file), None, None) => {
            let text = std::fs::read_to_string(file).map_err(|e| AtlasError::Io(format!("{}: {e}", file.display())))?;
            let p: InterventionPath = serde_json::from_str(&text).map_err(|e| AtlasError::Malformed(e.to_string()))?;
            p.validate()?;
            p
        }
        (None, Some(from), Some(to)) => InterventionPath::segment(from, to)?,
        _ => {
            return Err(AtlasError::InvalidPath(
                "give either --path FILE or both --from and --to".into(),
            ))
        }
    };
    let report = path_crossings(&m, &path, a.samples)?;
    println!("crossings: {}", report.crossings);
    let names: Vec<&str> = report.labels_sequence.iter().map(|&l| m.label_name(l)).collect();
    println!("labels: {}", names.join(" -> "));
    if let Some(out) = &a.out {
        let text = serde_json::to_string_pretty(&report).map_err(|e| AtlasError::Io(e.to_string()))?;
        write_file(out, &text)?;
    }
    if let Some(target) = &a.transfer_to {
        let dst = load_or_compute(target, &a.grid)?;
        let moved = transfer_strategy(&m, &path, &dst)?;
        let check = path_crossings(&dst, &moved, a.samples)?;
        println!("transferred: {}", serde_json::to_string(&moved).map_err(|e| AtlasError::Io(e.to_string()))?);
        println!("transferred crossings: {}", check.crossings);
    }
    Ok(0)
}

fn cmd_compose(a: &ComposeArgs) -> CmdResult {
    let cfg = run_config(Some(a.kind), &a.params, &a.grid)?;
    let params = cfg.world_params(a.kind)?;
    let (m, sig, topo) =
        composition_experiment_with(a.kind, &params, &cfg.grid(DEFAULT_RESOLUTION)?, &map_options(&cfg, &a.grid)?)?;
    write_outputs(&m, &cfg, a.out.as_deref(), a.svg.as_deref())?;
    let names: Vec<&str> = m.distinct_labels().into_iter().map(|l| m.label_name(l)).collect();
    println!("behaviors: {}", sig.num_behaviors);
    println!("labels: {}", names.join(", "));
    println!("{}", signature_json(&sig));
    for w in topo.warnings {
        eprintln!("warning: {w}");
    }
    Ok(0)
}

fn cmd_world(a: &WorldCmdArgs) -> CmdResult {
    let cfg = run_config(Some(a.world), &a.params, &GridArgs::default())?;
    let w = cfg.build_world()?;
    println!("{}", w.to_json()?);
    let report = validate_world(&w);
    for f in &report.findings {
        eprintln!("finding: {f}");
    }
    if let Some(path) = &a.transitions {
        let mdp = build_user_mdp(&w, UserTraits::new(a.gamma, a.p)?)?;
        write_file(path, &mdp.transitions_csv())?;
    }
    Ok(if report.is_clean() { 0 } else { 2 })
}

fn init_threads() -> Result<(), AtlasError> {
    let Ok(raw) = std::env::var("ATLAS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| AtlasError::InvalidParams(format!("ATLAS_THREADS must be a positive integer, got `{raw}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AtlasError::InvalidParams(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = init_threads().and_then(|()| match &cli.cmd {
        Command::Map(a) => cmd_map(a),
        Command::Equiv(a) => cmd_equiv(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Path(a) => cmd_path(a),
        Command::Compose(a) => cmd_compose(a),
        Command::World(a) => cmd_world(a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
