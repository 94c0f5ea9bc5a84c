//! Scenario generation and the repeated-play loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Algorithm, ExperimentConfig};
use crate::error::{Error, Result};
use crate::game::{
    build_action_catalog, enumerate_game, ActionCatalog, ActionSpace, MixedStrategy, NormalFormGame, World, WorldBuilder,
};
use crate::learners::{learner_step, EpsilonSchedule, EsnLearner, FixedLearner, Learner, QLearner};
use crate::vr_traffic::Format;
use crate::wifi_coex;

/// Positions of UAVs and users plus the resulting association.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    pub area_radius: f64,
    pub coverage_radius: f64,
    /// `(x, y, altitude)`
    pub uav_positions: Vec<(f64, f64, f64)>,
    pub user_positions: Vec<(f64, f64)>,
    pub n_wifi: usize,
    /// Serving UAV per user; `None` when no UAV covers the user.
    pub association: Vec<Option<usize>>,
}

impl Topology {
    pub fn num_associated(&self) -> usize {
        self.association.iter().flatten().count()
    }
}

/// `n` points uniform on the disc of radius `r` centred at the origin.
pub fn sample_disc(n: usize, r: f64, rng: &mut impl Rng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let rho = r * rng.gen::<f64>().sqrt();
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            (rho * theta.cos(), rho * theta.sin())
        })
        .collect()
}

/// Uniform users and UAVs on the disc, every UAV covering radius `r`.
pub fn generate_topology(n_uavs: usize, n_users: usize, r: f64, altitude: f64, rng: &mut impl Rng) -> Result<Topology> {
    if n_uavs == 0 || n_users == 0 {
        return Err(Error::contract("generate_topology", "need at least one UAV and one user"));
    }
    let uavs: Vec<_> = sample_disc(n_uavs, r, rng).into_iter().map(|(x, y)| (x, y, altitude)).collect();
    let users = sample_disc(n_users, r, rng);
    Ok(Topology {
        area_radius: r,
        coverage_radius: r,
        association: associate_users(&uavs, &users, r),
        uav_positions: uavs,
        user_positions: users,
        n_wifi: 0,
    })
}

/// Nearest UAV (by horizontal distance) whose coverage disc contains the
/// user. Ties go to the lower index.
pub fn associate_users(uavs: &[(f64, f64, f64)], users: &[(f64, f64)], coverage: f64) -> Vec<Option<usize>> {
    users
        .iter()
        .map(|&(ux, uy)| {
            let mut best: Option<(usize, f64)> = None;
            for (j, &(x, y, _)) in uavs.iter().enumerate() {
                let d = (ux - x).hypot(uy - y);
                if d <= coverage && best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
            best.map(|(j, _)| j)
        })
        .collect()
}

/// Independent 64-bit seed for a named substream of `seed`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 16);
    rng.gen()
}

const STREAM_RUN: u64 = 1;
const STREAM_USERS: u64 = 2;
const STREAM_UAVS: u64 = 3;
const STREAM_CATALOG: u64 = 4;
const STREAM_WEIGHTS: u64 = 5;
const STREAM_EXPLORE: u64 = 6;

/// Seed of run `index` under `master`. Shared by every algorithm and UAV
/// count so that comparisons are paired.
pub fn run_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, STREAM_RUN, index as u64)
}

/// Everything fixed for the duration of an episode.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub topology: Topology,
    pub world: World,
    pub catalogs: Vec<ActionCatalog>,
    pub duty_cycle: f64,
}

/// Topology, world and catalogs for `n_uavs` UAVs under `seed`. Users and
/// UAVs come from separate streams, so the UAV set for B is a prefix of the
/// set for B + 1 and the users do not move.
pub fn build_scenario(cfg: &ExperimentConfig, algo: Algorithm, n_uavs: usize, seed: u64) -> Result<Scenario> {
    cfg.validate()?;
    if n_uavs == 0 {
        return Err(Error::config("topology.n_uavs", "must be >= 1"));
    }
    let t = &cfg.topology;
    let users = sample_disc(t.n_users, t.area_radius, &mut ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_USERS, 0)));
    let uavs: Vec<_> = sample_disc(n_uavs, t.area_radius, &mut ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_UAVS, 0)))
        .into_iter()
        .map(|(x, y)| (x, y, t.uav_altitude))
        .collect();
    let association = associate_users(&uavs, &users, t.coverage());
    let topology = Topology {
        area_radius: t.area_radius,
        coverage_radius: t.coverage(),
        uav_positions: uavs,
        user_positions: users,
        n_wifi: cfg.wifi.n_users,
        association,
    };
    let duty_cycle = if algo.uses_unlicensed() {
        wifi_coex::max_duty_cycle(&cfg.wifi)?
    } else {
        0.0
    };
    scenario_from_topology(cfg, topology, duty_cycle, seed)
}

/// World and catalogs for a given topology and duty cycle.
pub fn scenario_from_topology(cfg: &ExperimentConfig, topology: Topology, duty_cycle: f64, seed: u64) -> Result<Scenario> {
    let world = WorldBuilder {
        channel: &cfg.channel,
        vr: &cfg.vr,
        duty_cycle,
        uavs: &topology.uav_positions,
        users: &topology.user_positions,
        association: &topology.association,
    }
    .build()?;
    let share_levels = if duty_cycle > 0.0 { cfg.game.share_levels } else { 0 };
    let catalogs = (0..world.num_uavs())
        .map(|j| {
            let n = world.users_of(j).len();
            if n == 0 {
                return Ok(ActionCatalog::idle());
            }
            let space = ActionSpace {
                n_users: n,
                dl_rbs: cfg.channel.num_downlink_rbs,
                ul_rbs: cfg.channel.num_uplink_rbs,
                share_levels,
                quality_levels: cfg.vr.quality_scale.len(),
                formats: Format::ALL.to_vec(),
            };
            build_action_catalog(&space, cfg.game.max_actions, derive_seed(seed, STREAM_CATALOG, j as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario {
        topology,
        world,
        catalogs,
        duty_cycle,
    })
}

/// One learner per UAV. UAVs with nobody to serve get a fixed idle learner.
pub fn build_learners(cfg: &ExperimentConfig, algo: Algorithm, catalogs: &[ActionCatalog], seed: u64) -> Result<Vec<Box<dyn Learner>>> {
    let b = catalogs.len();
    catalogs
        .iter()
        .enumerate()
        .map(|(j, cat)| -> Result<Box<dyn Learner>> {
            let init = derive_seed(seed, STREAM_WEIGHTS, j as u64);
            let explore = derive_seed(seed, STREAM_EXPLORE, j as u64);
            if cat.actions()[0].is_idle() {
                return Ok(Box::new(FixedLearner { action: 0, n_actions: 1 }));
            }
            Ok(match algo {
                Algorithm::EsnLeaky => Box::new(EsnLearner::new(&cfg.esn, b, cat.len(), init, explore)?),
                Algorithm::Esn => Box::new(EsnLearner::new(&cfg.esn.conventional(), b, cat.len(), init, explore)?),
                Algorithm::Q | Algorithm::QLte => {
                    Box::new(QLearner::new(cat.len(), cfg.q_learning.learning_rate, explore))
                }
            })
        })
        .collect()
}

/// One row of the per-iteration trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub uav: usize,
    pub action: usize,
    pub utility: f64,
    pub estimate_error: f64,
}

/// Measured quantities of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    /// Σ_j u_j per iteration.
    pub per_iteration_total_qoe: Vec<f64>,
    /// `[uav][iteration]`
    pub per_uav_utility: Vec<Vec<f64>>,
    /// Mean total QoE over the final window.
    pub final_total_qoe: f64,
    /// Mean delay of users with a finite delay over the final window, s.
    /// NaN when no user was served in that window.
    pub final_avg_delay: f64,
    /// Share of all users (unassociated included) meeting the deadline over
    /// the final window, percent.
    pub pct_meeting_deadline: f64,
    pub convergence_iteration: usize,
    pub n_associated: usize,
    pub duty_cycle: f64,
}

/// Result of [`run_episode`].
#[derive(Clone, Debug)]
pub struct Episode {
    pub metrics: RunMetrics,
    pub trace: Option<Vec<TraceRow>>,
}

/// Knobs of the metric definitions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricWindows {
    pub smoothing: usize,
    pub final_window: usize,
    pub band: f64,
}

impl MetricWindows {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            smoothing: cfg.experiment.smoothing_window,
            final_window: cfg.experiment.final_window,
            band: cfg.experiment.convergence_band,
        }
    }
}

/// Trailing moving average with a window of at most `w` samples.
pub fn moving_average(series: &[f64], w: usize) -> Vec<f64> {
    let w = w.max(1);
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (t, &x) in series.iter().enumerate() {
        sum += x;
        if t >= w {
            sum -= series[t - w];
        }
        out.push(sum / (t + 1).min(w) as f64);
    }
    out
}

/// First iteration after which the smoothed series stays within
/// `band · |final mean|` of the final mean (mean over the last
/// `final_window` raw samples).
pub fn convergence_iteration(series: &[f64], windows: MetricWindows) -> usize {
    if series.is_empty() {
        return 0;
    }
    let tail = &series[series.len() - windows.final_window.min(series.len())..];
    let target = tail.iter().sum::<f64>() / tail.len() as f64;
    let tol = windows.band * target.abs() + 1e-12;
    let smooth = moving_average(series, windows.smoothing);
    match smooth.iter().rposition(|s| (s - target).abs() > tol) {
        Some(t) => t + 1,
        None => 0,
    }
}

/// Repeated play of a prepared scenario.
pub fn play(
    scenario: &Scenario,
    learners: &mut [Box<dyn Learner>],
    schedule: EpsilonSchedule,
    horizon: usize,
    windows: MetricWindows,
    trace: bool,
) -> Result<Episode> {
    let world = &scenario.world;
    let b = world.num_uavs();
    let n_users = world.num_users();
    let mut total = Vec::with_capacity(horizon);
    let mut per_uav = vec![Vec::with_capacity(horizon); b];
    let mut rows = trace.then(Vec::new);
    let final_start = horizon.saturating_sub(windows.final_window);
    let (mut delay_sum, mut delay_n, mut meeting) = (0.0, 0usize, 0usize);
    for t in 0..horizon {
        let round = learner_step(learners, &scenario.catalogs, world, schedule.at(t))?;
        total.push(round.outcome.utilities.iter().sum());
        for (j, r) in round.records.iter().enumerate() {
            per_uav[j].push(r.utility);
            if let Some(rows) = rows.as_mut() {
                rows.push(TraceRow {
                    iteration: t,
                    uav: j,
                    action: r.action,
                    utility: r.utility,
                    estimate_error: r.estimate_error(),
                });
            }
        }
        if t >= final_start {
            for u in round.outcome.users.iter().flatten() {
                if u.delay.is_finite() {
                    delay_sum += u.delay;
                    delay_n += 1;
                }
                meeting += usize::from(u.meets_deadline);
            }
        }
    }
    let window_len = horizon - final_start;
    let final_total_qoe = if window_len == 0 {
        0.0
    } else {
        total[final_start..].iter().sum::<f64>() / window_len as f64
    };
    let metrics = RunMetrics {
        final_total_qoe,
        final_avg_delay: if delay_n == 0 { f64::NAN } else { delay_sum / delay_n as f64 },
        pct_meeting_deadline: if window_len == 0 {
            0.0
        } else {
            100.0 * meeting as f64 / (window_len * n_users) as f64
        },
        convergence_iteration: convergence_iteration(&total, windows),
        n_associated: scenario.topology.num_associated(),
        duty_cycle: scenario.duty_cycle,
        per_iteration_total_qoe: total,
        per_uav_utility: per_uav,
    };
    Ok(Episode { metrics, trace: rows })
}

/// Builds the scenario and learners for `(algo, n_uavs, seed)` and plays
/// the configured horizon.
pub fn run_episode(cfg: &ExperimentConfig, algo: Algorithm, n_uavs: usize, seed: u64, trace: bool) -> Result<Episode> {
    let scenario = build_scenario(cfg, algo, n_uavs, seed)?;
    let mut learners = build_learners(cfg, algo, &scenario.catalogs, seed)?;
    let horizon = cfg.experiment.horizon;
    play(
        &scenario,
        &mut learners,
        cfg.exploration.schedule(horizon),
        horizon,
        MetricWindows::from_config(cfg),
        trace,
    )
}

/// One completed run of a sweep.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub sweep_value: usize,
    pub algo: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub metrics: RunMetrics,
}

/// Which runs a sweep performs.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub uav_counts: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub n_runs: usize,
    pub master_seed: u64,
}

impl SweepSpec {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            uav_counts: cfg.experiment.sweep_uavs.clone(),
            algorithms: cfg.experiment.algorithms.clone(),
            n_runs: cfg.experiment.n_runs,
            master_seed: cfg.experiment.master_seed,
        }
    }
}

/// Runs every (UAV count, algorithm, run) triple, in parallel on the current
/// rayon pool. Output order is fixed: UAV count, then algorithm, then run.
pub fn sweep(cfg: &ExperimentConfig, spec: &SweepSpec) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let mut jobs = vec![];
    for &b in &spec.uav_counts {
        for &algo in &spec.algorithms {
            for run in 0..spec.n_runs {
                jobs.push((b, algo, run));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(b, algo, run)| {
            let seed = run_seed(spec.master_seed, run);
            log::debug!("run B={b} algo={algo} run={run}");
            let ep = run_episode(cfg, algo, b, seed, false)?;
            Ok(RunRecord {
                sweep_value: b,
                algo,
                run,
                seed,
                metrics: ep.metrics,
            })
        })
        .collect()
}

/// Mean and spread of one metric over the runs of one (sweep value, algorithm) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub sweep_value: usize,
    pub algo: Algorithm,
    pub metric: &'static str,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    /// Number of finite samples.
    pub n: usize,
}

/// Scalar metrics reported per run, in output order.
pub const METRICS: [&str; 5] = [
    "total_qoe",
    "avg_delay",
    "pct_meeting_deadline",
    "convergence_iteration",
    "n_associated",
];

impl RunMetrics {
    pub fn scalar(&self, name: &str) -> Option<f64> {
        Some(match name {
            "total_qoe" => self.final_total_qoe,
            "avg_delay" => self.final_avg_delay,
            "pct_meeting_deadline" => self.pct_meeting_deadline,
            "convergence_iteration" => self.convergence_iteration as f64,
            "n_associated" => self.n_associated as f64,
            _ => return None,
        })
    }
}

/// Mean and sample standard deviation of the finite entries.
pub fn mean_std(values: impl IntoIterator<Item = f64>) -> (f64, f64, usize) {
    let v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    let n = v.len();
    if n == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    (mean, std, n)
}

/// One row per (sweep value, algorithm, metric), in first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut cells: Vec<(usize, Algorithm)> = vec![];
    for r in records {
        if !cells.contains(&(r.sweep_value, r.algo)) {
            cells.push((r.sweep_value, r.algo));
        }
    }
    let mut out = vec![];
    for (b, algo) in cells {
        let runs: Vec<&RunRecord> = records.iter().filter(|r| r.sweep_value == b && r.algo == algo).collect();
        for metric in METRICS {
            let (mean, std, n) = mean_std(runs.iter().filter_map(|r| r.metrics.scalar(metric)));
            out.push(SummaryRow {
                sweep_value: b,
                algo,
                metric,
                mean,
                std,
                n,
            });
        }
    }
    out
}

/// Outcome of playing a desk-scale game and checking the empirical profile
/// against the full utility table.
#[derive(Clone, Debug)]
pub struct NashReport {
    pub game: NormalFormGame<f64>,
    /// Empirical strategy of each UAV over the final window.
    pub profile: Vec<MixedStrategy<f64>>,
    /// Best pure-deviation gain of each UAV against that profile.
    pub regrets: Vec<f64>,
    pub episode: Episode,
}

impl NashReport {
    pub fn max_regret(&self) -> f64 {
        self.regrets.iter().copied().fold(0.0, f64::max)
    }
}

/// Empirical mixed strategy of each UAV from the trace rows at or after `from`.
pub fn empirical_profile(trace: &[TraceRow], catalog_sizes: &[usize], from: usize) -> Result<Vec<MixedStrategy<f64>>> {
    let mut counts: Vec<Vec<u64>> = catalog_sizes.iter().map(|&n| vec![0; n]).collect();
    for r in trace.iter().filter(|r| r.iteration >= from) {
        counts[r.uav][r.action] += 1;
    }
    counts.iter().map(|c| MixedStrategy::from_counts(c)).collect()
}

/// Plays `scenario` with `learners` and reports the regret of the empirical
/// profile over the final window. Refuses tables above `cell_cap`.
pub fn nash_check(
    scenario: &Scenario,
    learners: &mut [Box<dyn Learner>],
    schedule: EpsilonSchedule,
    horizon: usize,
    windows: MetricWindows,
    cell_cap: u128,
) -> Result<NashReport> {
    let game = enumerate_game(&scenario.world, &scenario.catalogs, cell_cap)?;
    if horizon == 0 {
        return Err(Error::config("experiment.horizon", "must be >= 1 for an equilibrium check"));
    }
    let episode = play(scenario, learners, schedule, horizon, windows, true)?;
    let sizes: Vec<usize> = scenario.catalogs.iter().map(ActionCatalog::len).collect();
    let from = horizon.saturating_sub(windows.final_window);
    let profile = empirical_profile(episode.trace.as_deref().unwrap_or_default(), &sizes, from)?;
    let regrets = game.ne_regret(&profile)?;
    Ok(NashReport {
        game,
        profile,
        regrets,
        episode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.esn.reservoir_size = 20;
        cfg.game.max_actions = 12;
        cfg.experiment.horizon = 60;
        cfg.experiment.final_window = 20;
        cfg.experiment.smoothing_window = 5;
        cfg.topology.n_users = 6;
        cfg
    }

    #[test]
    fn disc_samples_have_the_right_mean_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pts = sample_disc(100_000, 500.0, &mut rng);
        let mean = pts.iter().map(|(x, y)| x.hypot(*y)).sum::<f64>() / pts.len() as f64;
        assert!((mean / (2.0 * 500.0 / 3.0) - 1.0).abs() < 0.01, "{mean}");
        assert!(pts.iter().all(|(x, y)| x.hypot(*y) <= 500.0));
    }

    #[test]
    fn degenerate_disc_and_determinism() {
        let t = generate_topology(3, 4, 0.0, 100.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(t.user_positions.iter().all(|&(x, y)| x == 0.0 && y == 0.0));
        assert_eq!(t.association, vec![Some(0); 4]);
        let a = generate_topology(3, 10, 500.0, 100.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = generate_topology(3, 10, 500.0, 100.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(generate_topology(0, 1, 1.0, 1.0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn association_rules() {
        let uavs = [(-10.0, 0.0, 100.0), (10.0, 0.0, 100.0), (500.0, 0.0, 100.0)];
        let users = [(0.0, 0.0), (9.0, 1.0), (480.0, 0.0), (0.0, 300.0)];
        let a = associate_users(&uavs, &users, 100.0);
        assert_eq!(a, vec![Some(0), Some(1), Some(2), None]);
        let all = associate_users(&uavs[..1], &users, 1e9);
        assert_eq!(all, vec![Some(0); 4]);
    }

    #[test]
    fn uav_sets_are_nested_across_counts() {
        let cfg = small_cfg();
        let s3 = build_scenario(&cfg, Algorithm::Q, 3, 42).unwrap();
        let s5 = build_scenario(&cfg, Algorithm::Q, 5, 42).unwrap();
        assert_eq!(s3.topology.uav_positions[..], s5.topology.uav_positions[..3]);
        assert_eq!(s3.topology.user_positions, s5.topology.user_positions);
    }

    #[test]
    fn moving_average_and_convergence() {
        assert_eq!(moving_average(&[1.0, 3.0, 5.0, 7.0], 2), vec![1.0, 2.0, 4.0, 6.0]);
        let w = MetricWindows { smoothing: 1, final_window: 3, band: 0.05 };
        assert_eq!(convergence_iteration(&[0.0, 0.0, 1.0, 1.0, 1.0], w), 2);
        assert_eq!(convergence_iteration(&[2.0; 10], w), 0);
        assert_eq!(convergence_iteration(&[], w), 0);
        // A late dip outside the band pushes convergence past it.
        assert_eq!(convergence_iteration(&[1.0, 1.0, 0.5, 1.0, 1.0, 1.0], w), 3);
    }

    #[test]
    fn zero_horizon_has_empty_series() {
        let mut cfg = small_cfg();
        cfg.experiment.horizon = 0;
        cfg.topology.coverage_radius = Some(1e4);
        let ep = run_episode(&cfg, Algorithm::EsnLeaky, 2, 3, true).unwrap();
        assert!(ep.metrics.per_iteration_total_qoe.is_empty());
        assert_eq!(ep.metrics.convergence_iteration, 0);
        assert_eq!(ep.metrics.n_associated, 6);
        assert!(ep.trace.unwrap().is_empty());
    }

    #[test]
    fn single_action_gives_constant_qoe() {
        let mut cfg = small_cfg();
        cfg.topology.n_users = 1;
        cfg.game.max_actions = 1;
        cfg.vr.quality_scale = vec![1.0];
        let ep = run_episode(&cfg, Algorithm::EsnLeaky, 1, 5, false).unwrap();
        let s = &ep.metrics.per_iteration_total_qoe;
        assert!(s.iter().all(|&q| q == s[0]));
    }

    #[test]
    fn episodes_are_reproducible_and_bounded() {
        let cfg = small_cfg();
        for algo in Algorithm::ALL {
            let a = run_episode(&cfg, algo, 3, 11, true).unwrap();
            let b = run_episode(&cfg, algo, 3, 11, true).unwrap();
            assert_eq!(a.metrics, b.metrics);
            assert_eq!(a.trace, b.trace);
            let m = &a.metrics;
            assert!((0.0..=100.0).contains(&m.pct_meeting_deadline));
            assert!(m.convergence_iteration <= cfg.experiment.horizon);
            assert_eq!(a.trace.unwrap().len(), 3 * cfg.experiment.horizon);
        }
    }

    #[test]
    fn sweep_shape_and_summary() {
        let mut cfg = small_cfg();
        cfg.experiment.horizon = 20;
        let spec = SweepSpec {
            uav_counts: vec![1, 2],
            algorithms: vec![Algorithm::Q, Algorithm::EsnLeaky],
            n_runs: 1,
            master_seed: 3,
        };
        let records = sweep(&cfg, &spec).unwrap();
        assert_eq!(records.len(), 4);
        let rows = summarize(&records);
        assert_eq!(rows.len(), 4 * METRICS.len());
        assert!(rows.iter().filter(|r| r.n > 0).all(|r| r.std == 0.0));
    }

    #[test]
    fn mean_std_skips_non_finite() {
        let (m, s, n) = mean_std([1.0, f64::NAN, 3.0]);
        assert_eq!((m, n), (2.0, 2));
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
