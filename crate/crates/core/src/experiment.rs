//! Monte Carlo harness: disparity sweeps and clustering-strategy comparisons.
//!
//! Every trial owns a ChaCha8 stream keyed by `(seed, theta index, disparity
//! index, trial index)`, and per-point aggregation walks the trials in index
//! order. Results are therefore bit-identical for any number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::allocation::{
    fixed_fractions, min_power_qos, sumrate_max_weak_qos, AllocationError, AllocationMode,
    Anchoring, PowerAllocation,
};
use crate::channel::{make_user_state, ChannelError, ChannelParams};
use crate::clustering::{
    order_users, select_cluster, ClusterStrategy, ClusteringError, OrderingMethod, SelectionLimits,
};
use crate::geometry::{
    place_disparity_pair, sample_realization, GeometryError, NetworkRealization, PlacementResult,
};
use crate::sic::{decode_cluster, Cluster, DecodingOutcome, QosTargets, SicError};

/// Upper bound on theta-list and disparity-grid lengths (16-bit stream fields).
const MAX_AXIS_LEN: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid `{key}`: {message}")]
    InvalidConfig { key: String, message: String },
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error(transparent)]
    Decoding(#[from] SicError),
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
}

fn invalid(key: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidConfig {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Evenly spaced disparity values `min, min + step, ...` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisparityGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for DisparityGrid {
    fn default() -> Self {
        Self {
            min: 1.0,
            max: 6.0,
            step: 0.25,
        }
    }
}

impl DisparityGrid {
    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.min + i as f64 * self.step)
            .collect()
    }
}

/// One clustering strategy in a comparison, with an optional allocation
/// override so fixed-power and optimised rows can share seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyEntry {
    pub label: String,
    pub strategy: ClusterStrategy,
    pub mode: Option<AllocationMode>,
    pub fixed_fractions: Option<Vec<f64>>,
}

impl StrategyEntry {
    pub fn new(strategy: ClusterStrategy) -> Self {
        Self {
            label: strategy.name().to_string(),
            strategy,
            mode: None,
            fixed_fractions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub density: f64,
    pub window_radius: f64,
    pub channel: ChannelParams,
    pub budget: f64,
    pub mode: AllocationMode,
    pub fixed_fractions: Vec<f64>,
    pub theta_list: Vec<f64>,
    pub disparity: DisparityGrid,
    pub trials: u64,
    pub seed: u64,
    pub strategies: Vec<StrategyEntry>,
    pub ordering: OrderingMethod,
    /// Size sum-rate allocations for every user that must decode a message.
    pub robust_allocation: bool,
    /// Allocate on instantaneous fading; otherwise on distances only.
    pub instantaneous_csi: bool,
    /// Cluster size used by strategy comparisons.
    pub cluster_size: usize,
    pub limits: SelectionLimits,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            density: 1.0,
            window_radius: 15.0,
            channel: ChannelParams::default(),
            budget: 1.0,
            mode: AllocationMode::SumRateWeakQos,
            fixed_fractions: vec![0.2, 0.8],
            theta_list: vec![0.5, 0.9, 1.0],
            disparity: DisparityGrid::default(),
            trials: 100_000,
            seed: 0,
            strategies: vec![
                StrategyEntry::new(ClusterStrategy::RandomInCell),
                StrategyEntry::new(ClusterStrategy::InDiskHalfRho),
            ],
            ordering: OrderingMethod::ByLinkDistance,
            robust_allocation: true,
            instantaneous_csi: true,
            cluster_size: 2,
            limits: SelectionLimits::default(),
        }
    }
}

impl SimConfig {
    /// Sum-rate maximisation with weak-user QoS at three thresholds.
    pub fn sum_rate_setup() -> Self {
        Self::default()
    }

    /// Minimum power meeting `ln(3)` for both users.
    pub fn min_power_setup() -> Self {
        Self {
            mode: AllocationMode::MinPowerQos,
            theta_list: vec![2.0],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.density) {
            return Err(invalid("density", "must be positive"));
        }
        if !positive(self.window_radius) {
            return Err(invalid("window_radius", "must be positive"));
        }
        self.channel.validate().map_err(|e| {
            let key = match e {
                ChannelError::InvalidPathLoss(_) => "eta",
                ChannelError::InvalidNoise(_) => "noise",
                ChannelError::InvalidInterfererPower(_) => "interferer_power",
                _ => "channel",
            };
            invalid(key, e.to_string())
        })?;
        if !positive(self.budget) {
            return Err(invalid("budget", "must be positive"));
        }
        if self.theta_list.is_empty() {
            return Err(invalid("theta_list", "needs at least one threshold"));
        }
        if self.theta_list.len() > MAX_AXIS_LEN {
            return Err(invalid("theta_list", "too many thresholds"));
        }
        if let Some(t) = self
            .theta_list
            .iter()
            .find(|t| !(t.is_finite() && **t >= 0.0))
        {
            return Err(invalid(
                "theta_list",
                format!("threshold {t} must be finite and non-negative"),
            ));
        }
        let grid = &self.disparity;
        if !(grid.min.is_finite() && grid.min >= 1.0) {
            return Err(invalid("disparity.min", "must be at least 1"));
        }
        if !positive(grid.step) {
            return Err(invalid("disparity.step", "must be positive"));
        }
        if !(grid.max.is_finite() && grid.max >= grid.min) {
            return Err(invalid("disparity.max", "must be at least disparity.min"));
        }
        if grid.len() > MAX_AXIS_LEN {
            return Err(invalid("disparity", "grid has too many points"));
        }
        if self.trials == 0 || self.trials > u64::from(u32::MAX) {
            return Err(invalid("trials", "must lie in 1..=4294967295"));
        }
        if self.cluster_size < 2 {
            return Err(invalid("cluster_size", "must be at least 2"));
        }
        if self.mode == AllocationMode::Fixed {
            fixed_fractions(&self.fixed_fractions, self.budget)
                .map_err(|e| invalid("fixed_fractions", e.to_string()))?;
            if self.fixed_fractions.len() != 2 {
                return Err(invalid(
                    "fixed_fractions",
                    "disparity sweeps need two fractions",
                ));
            }
        }
        for entry in &self.strategies {
            entry
                .strategy
                .validate()
                .map_err(|e| invalid("strategy", e.to_string()))?;
            let mode = entry.mode.unwrap_or(self.mode);
            if mode == AllocationMode::Fixed {
                let fractions = entry
                    .fixed_fractions
                    .as_ref()
                    .unwrap_or(&self.fixed_fractions);
                fixed_fractions(fractions, self.budget)
                    .map_err(|e| invalid("strategy.fixed_fractions", e.to_string()))?;
                if fractions.len() != self.cluster_size {
                    return Err(invalid(
                        "strategy.fixed_fractions",
                        format!(
                            "need {} fractions, one per clustered user",
                            self.cluster_size
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    fn plan(&self) -> AllocationPlan<'_> {
        AllocationPlan {
            mode: self.mode,
            fixed_fractions: &self.fixed_fractions,
            budget: self.budget,
            anchoring: if self.robust_allocation {
                Anchoring::Robust
            } else {
                Anchoring::WeakAnchored
            },
            instantaneous_csi: self.instantaneous_csi,
        }
    }

    fn plan_for<'a>(&'a self, entry: &'a StrategyEntry) -> AllocationPlan<'a> {
        AllocationPlan {
            mode: entry.mode.unwrap_or(self.mode),
            fixed_fractions: entry
                .fixed_fractions
                .as_deref()
                .unwrap_or(&self.fixed_fractions),
            ..self.plan()
        }
    }
}

/// How a trial's cluster gets its powers.
#[derive(Debug, Clone, Copy)]
struct AllocationPlan<'a> {
    mode: AllocationMode,
    fixed_fractions: &'a [f64],
    budget: f64,
    anchoring: Anchoring,
    instantaneous_csi: bool,
}

/// Coordinates of a trial inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub theta_index: usize,
    pub theta: f64,
    pub disparity_index: usize,
    pub disparity: f64,
}

/// Random stream for one trial. Distinct coordinates give distinct ChaCha
/// streams under the same key.
pub fn trial_rng(seed: u64, theta_index: usize, disparity_index: usize, trial: u64) -> ChaCha8Rng {
    debug_assert!(theta_index < MAX_AXIS_LEN && disparity_index < MAX_AXIS_LEN);
    debug_assert!(trial <= u64::from(u32::MAX));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((theta_index as u64) << 48) | ((disparity_index as u64) << 32) | trial);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// NaN for strategies without a controlled disparity.
    pub disparity: f64,
    pub theta: f64,
    pub placement_feasible: bool,
    pub allocation: Option<PowerAllocation>,
    pub outcome: Option<DecodingOutcome>,
    pub success: bool,
    pub weak_link_distance: Option<f64>,
    pub out_of_cell_rejections: usize,
}

impl TrialRecord {
    fn infeasible(disparity: f64, theta: f64, out_of_cell_rejections: usize) -> Self {
        Self {
            disparity,
            theta,
            placement_feasible: false,
            allocation: None,
            outcome: None,
            success: false,
            weak_link_distance: None,
            out_of_cell_rejections,
        }
    }
}

fn allocate(
    cluster: &Cluster,
    qos: &QosTargets,
    plan: &AllocationPlan<'_>,
) -> Result<PowerAllocation, ExperimentError> {
    let view;
    let informed = if plan.instantaneous_csi {
        cluster
    } else {
        view = cluster.map_users(|u| u.distance_only_view());
        &view
    };
    Ok(match plan.mode {
        AllocationMode::SumRateWeakQos => {
            sumrate_max_weak_qos(informed, qos, plan.budget, plan.anchoring)?
        }
        AllocationMode::MinPowerQos => min_power_qos(informed, qos, plan.budget)?,
        AllocationMode::Fixed => fixed_fractions(plan.fixed_fractions, plan.budget)?,
    })
}

/// Allocates, decodes and scores an already-selected cluster.
fn evaluate_cluster(
    cluster: &Cluster,
    disparity: f64,
    theta: f64,
    plan: &AllocationPlan<'_>,
    out_of_cell_rejections: usize,
) -> Result<TrialRecord, ExperimentError> {
    let qos = QosTargets::uniform(theta, cluster.len())?;
    let allocation = allocate(cluster, &qos, plan)?;
    let outcome = decode_cluster(cluster, &allocation, &qos)?;
    let success = allocation.feasible && outcome.all_covered();
    Ok(TrialRecord {
        disparity,
        theta,
        placement_feasible: true,
        weak_link_distance: Some(cluster.weakest().link_distance),
        allocation: Some(allocation),
        outcome: Some(outcome),
        success,
        out_of_cell_rejections,
    })
}

/// Second half of a disparity trial: channel draws, ordering, allocation and
/// decoding for a given placement. `rng` continues the trial's stream.
pub fn evaluate_placement(
    config: &SimConfig,
    realization: &NetworkRealization,
    placement: &PlacementResult,
    disparity: f64,
    theta: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialRecord, ExperimentError> {
    if !placement.feasible {
        return Ok(TrialRecord::infeasible(disparity, theta, 0));
    }
    let strong = make_user_state(placement.strong_position, realization, &config.channel, rng)?;
    let weak = make_user_state(placement.weak_position, realization, &config.channel, rng)?;
    let cluster = order_users(vec![strong, weak], OrderingMethod::ByLinkDistance);
    evaluate_cluster(&cluster, disparity, theta, &config.plan(), 0)
}

/// One controlled-disparity trial.
pub fn run_trial(
    config: &SimConfig,
    point: GridPoint,
    trial: u64,
) -> Result<TrialRecord, ExperimentError> {
    let mut rng = trial_rng(config.seed, point.theta_index, point.disparity_index, trial);
    let realization = sample_realization(config.density, config.window_radius, &mut rng)?;
    let placement = place_disparity_pair(
        &realization,
        point.disparity,
        config.limits.placement_attempts,
        &mut rng,
    )?;
    evaluate_placement(
        config,
        &realization,
        &placement,
        point.disparity,
        point.theta,
        &mut rng,
    )
}

/// Aggregated metrics for one (theta, disparity) point or comparison row.
/// Rate and power means are over successful trials only and are `None` when
/// no trial succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub disparity: f64,
    pub trials: u64,
    pub placement_feasible_pct: f64,
    pub success_pct: f64,
    pub mean_rate_strong: Option<f64>,
    pub mean_rate_weak: Option<f64>,
    pub mean_power_strong: Option<f64>,
    pub mean_power_weak: Option<f64>,
    pub mean_sum_rate: Option<f64>,
    /// Mean weakest-user link distance over trials that produced a cluster.
    pub mean_weak_distance: Option<f64>,
    pub out_of_cell_rejections: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Incremental mean; a constant sequence reproduces its value exactly.
#[derive(Debug, Clone, Copy, Default)]
struct RunningMean {
    count: u64,
    mean: f64,
}

impl RunningMean {
    fn push(&mut self, x: f64) {
        self.count += 1;
        self.mean += (x - self.mean) / self.count as f64;
    }

    fn get(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }
}

/// Folds the records of one grid point, in order. `None` for no records.
pub fn aggregate(records: &[TrialRecord]) -> Option<SweepRow> {
    let first = records.first()?;
    let trials = records.len() as u64;
    let mut placed = 0u64;
    let mut succeeded = 0u64;
    let mut rejections = 0u64;
    let [mut rate_s, mut rate_w, mut power_s, mut power_w, mut sum_rate, mut weak_d] =
        [RunningMean::default(); 6];
    for r in records {
        rejections += r.out_of_cell_rejections as u64;
        if let Some(d) = r.weak_link_distance {
            weak_d.push(d);
        }
        if r.placement_feasible {
            placed += 1;
        }
        if !r.success {
            continue;
        }
        succeeded += 1;
        if let (Some(a), Some(o)) = (&r.allocation, &r.outcome) {
            let last = o.achieved_rate.len() - 1;
            rate_s.push(o.achieved_rate[0]);
            rate_w.push(o.achieved_rate[last]);
            sum_rate.push(o.achieved_rate.iter().sum());
            power_s.push(a.powers[0]);
            power_w.push(a.powers[last]);
        }
    }
    let pct = |n: u64| 100.0 * n as f64 / trials as f64;
    Some(SweepRow {
        theta: first.theta,
        disparity: first.disparity,
        trials,
        placement_feasible_pct: pct(placed),
        success_pct: pct(succeeded),
        mean_rate_strong: rate_s.get(),
        mean_rate_weak: rate_w.get(),
        mean_power_strong: power_s.get(),
        mean_power_weak: power_w.get(),
        mean_sum_rate: sum_rate.get(),
        mean_weak_distance: weak_d.get(),
        out_of_cell_rejections: rejections,
    })
}

fn run_point<F>(trials: u64, trial: F) -> Result<SweepRow, ExperimentError>
where
    F: Fn(u64) -> Result<TrialRecord, ExperimentError> + Sync + Send,
{
    let records = (0..trials)
        .into_par_iter()
        .map(trial)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(&records).expect("trials >= 1 after validation"))
}

/// Runs every (theta, disparity) point of the grid. Rows come out in
/// (theta, disparity) order.
pub fn run_disparity_sweep(config: &SimConfig) -> Result<SweepResult, ExperimentError> {
    config.validate()?;
    let grid = config.disparity.points();
    let mut rows = Vec::with_capacity(config.theta_list.len() * grid.len());
    for (theta_index, &theta) in config.theta_list.iter().enumerate() {
        for (disparity_index, &disparity) in grid.iter().enumerate() {
            let point = GridPoint {
                theta_index,
                theta,
                disparity_index,
                disparity,
            };
            rows.push(run_point(config.trials, |t| run_trial(config, point, t))?);
        }
    }
    Ok(SweepResult { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub strategy: &'static str,
    pub mode: AllocationMode,
    pub row: SweepRow,
}

/// One strategy-selected trial. Streams ignore the strategy so every entry
/// sees the same deployments.
fn run_strategy_trial(
    config: &SimConfig,
    entry: &StrategyEntry,
    theta_index: usize,
    theta: f64,
    trial: u64,
) -> Result<TrialRecord, ExperimentError> {
    let disparity = match entry.strategy {
        ClusterStrategy::ControlledDisparity { disparity } => disparity,
        _ => f64::NAN,
    };
    let mut rng = trial_rng(config.seed, theta_index, 0, trial);
    let realization = sample_realization(config.density, config.window_radius, &mut rng)?;
    let selection = select_cluster(
        &entry.strategy,
        &realization,
        &config.channel,
        config.cluster_size,
        config.ordering,
        config.limits,
        &mut rng,
    );
    match selection {
        Ok(sel) => evaluate_cluster(
            &sel.cluster,
            disparity,
            theta,
            &config.plan_for(entry),
            sel.out_of_cell_rejections,
        ),
        Err(ClusteringError::SelectionFailed {
            out_of_cell_rejections,
            ..
        }) => Ok(TrialRecord::infeasible(
            disparity,
            theta,
            out_of_cell_rejections,
        )),
        Err(e) if e.is_selection_failure() => Ok(TrialRecord::infeasible(disparity, theta, 0)),
        Err(e) => Err(e.into()),
    }
}

/// Runs each configured strategy at each threshold; one row per
/// (strategy, theta), in configuration order.
pub fn run_strategy_comparison(config: &SimConfig) -> Result<Vec<ComparisonRow>, ExperimentError> {
    config.validate()?;
    if config.strategies.is_empty() {
        return Err(invalid(
            "strategy",
            "comparison needs at least one strategy",
        ));
    }
    let mut rows = Vec::new();
    for entry in &config.strategies {
        let mode = entry.mode.unwrap_or(config.mode);
        for (theta_index, &theta) in config.theta_list.iter().enumerate() {
            let row = run_point(config.trials, |t| {
                run_strategy_trial(config, entry, theta_index, theta, t)
            })?;
            rows.push(ComparisonRow {
                label: entry.label.clone(),
                strategy: entry.strategy.name(),
                mode,
                row,
            });
        }
    }
    Ok(rows)
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T, F>(workers: Option<usize>, f: F) -> Result<T, ExperimentError>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| ExperimentError::WorkerPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
