//! User ordering and cluster-selection strategies.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{make_user_state, ChannelError, ChannelParams, UserState};
use crate::geometry::{
    place_disparity_pair, sample_user_in_cell, uniform_in_annulus, uniform_in_disk, GeometryError,
    NetworkRealization, Point, DEFAULT_PLACEMENT_ATTEMPTS, DEFAULT_SAMPLING_ATTEMPTS,
};
use crate::sic::Cluster;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusteringError {
    #[error("strategy `{strategy}` cannot build a cluster of {size} users")]
    UnsupportedSize { strategy: &'static str, size: usize },
    #[error("invalid `{strategy}` parameters: {reason}")]
    InvalidStrategy {
        strategy: &'static str,
        reason: String,
    },
    #[error("strategy `{strategy}` found no admissible cluster ({out_of_cell_rejections} out-of-cell candidates rejected)")]
    SelectionFailed {
        strategy: &'static str,
        out_of_cell_rejections: usize,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

impl ClusteringError {
    /// Failures that are a property of the sampled deployment, as opposed to
    /// a misconfigured strategy.
    pub fn is_selection_failure(&self) -> bool {
        matches!(
            self,
            ClusteringError::SelectionFailed { .. }
                | ClusteringError::Geometry(GeometryError::AttemptsExhausted(_))
        )
    }
}

/// How users in a cluster are ranked for SIC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingMethod {
    /// Nearest user is strongest.
    #[default]
    ByLinkDistance,
    /// Highest `r^(-eta) / mean W` is strongest, with fading averaged out.
    ByMeanSignalQuality,
    /// Highest instantaneous `G / W` is strongest.
    ByInstantaneousSignalQuality,
}

impl OrderingMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderingMethod::ByLinkDistance => "by_link_distance",
            OrderingMethod::ByMeanSignalQuality => "by_mean_signal_quality",
            OrderingMethod::ByInstantaneousSignalQuality => "by_instantaneous_signal_quality",
        }
    }

    fn compare(self, a: &UserState, b: &UserState) -> Ordering {
        match self {
            OrderingMethod::ByLinkDistance => a.link_distance.total_cmp(&b.link_distance),
            OrderingMethod::ByMeanSignalQuality => {
                b.mean_signal_quality().total_cmp(&a.mean_signal_quality())
            }
            OrderingMethod::ByInstantaneousSignalQuality => {
                b.reference_sinr().total_cmp(&a.reference_sinr())
            }
        }
    }
}

/// Sorts users strongest first. Ties keep input order.
///
/// # Panics
/// If `users` is empty.
pub fn order_users(mut users: Vec<UserState>, method: OrderingMethod) -> Cluster {
    users.sort_by(|a, b| method.compare(a, b));
    Cluster::new(users, method).expect("order_users needs at least one user")
}

/// How the users of a cluster are drawn from a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusterStrategy {
    /// Uniformly over the whole cell.
    RandomInCell,
    /// Uniformly over the disk of radius `rho / 2`, which always lies in the cell.
    InDiskHalfRho,
    /// Uniformly over a fixed disk; candidates outside the cell are rejected.
    FixedDisk { radius: f64 },
    /// Strong user from the central disk, weak user from the annulus.
    DiskAnnulus { r_disk: f64, r_in: f64, r_out: f64 },
    /// Strong user with reference SINR >= `t1`, weak user with reference SINR <= `t2`.
    SinrThreshold { t1: f64, t2: f64 },
    /// Strong user at `rho / 4`, weak user at `disparity` times that distance.
    ControlledDisparity { disparity: f64 },
}

impl ClusterStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            ClusterStrategy::RandomInCell => "random_in_cell",
            ClusterStrategy::InDiskHalfRho => "in_disk_half_rho",
            ClusterStrategy::FixedDisk { .. } => "fixed_disk",
            ClusterStrategy::DiskAnnulus { .. } => "disk_annulus",
            ClusterStrategy::SinrThreshold { .. } => "sinr_threshold",
            ClusterStrategy::ControlledDisparity { .. } => "controlled_disparity",
        }
    }

    pub fn validate(&self) -> Result<(), ClusteringError> {
        let invalid = |reason: &str| ClusteringError::InvalidStrategy {
            strategy: self.name(),
            reason: reason.to_string(),
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            ClusterStrategy::RandomInCell | ClusterStrategy::InDiskHalfRho => Ok(()),
            ClusterStrategy::FixedDisk { radius } if !positive(radius) => {
                Err(invalid("radius must be positive"))
            }
            ClusterStrategy::DiskAnnulus {
                r_disk,
                r_in,
                r_out,
            } => {
                if !(positive(r_disk) && positive(r_in) && positive(r_out)) {
                    Err(invalid("radii must be positive"))
                } else if r_out <= r_in {
                    Err(invalid("annulus outer radius must exceed inner radius"))
                } else {
                    Ok(())
                }
            }
            ClusterStrategy::SinrThreshold { t1, t2 } => {
                if !(t1.is_finite() && t2.is_finite() && t2 >= 0.0) {
                    Err(invalid("thresholds must be finite and non-negative"))
                } else if t1 < t2 {
                    Err(invalid("T1 must be at least T2"))
                } else {
                    Ok(())
                }
            }
            ClusterStrategy::ControlledDisparity { disparity }
                if !(disparity.is_finite() && disparity >= 1.0) =>
            {
                Err(invalid("disparity must be at least 1"))
            }
            _ => Ok(()),
        }
    }

    /// Cluster sizes the strategy can produce.
    fn supports(&self, size: usize) -> bool {
        match self {
            ClusterStrategy::DiskAnnulus { .. }
            | ClusterStrategy::SinrThreshold { .. }
            | ClusterStrategy::ControlledDisparity { .. } => size == 2,
            _ => size >= 2,
        }
    }
}

/// Which part of a strategy's region a candidate is drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Strong,
    Weak,
}

/// Spatial eligibility of a position. In-cell membership is checked separately.
fn position_eligible(strategy: &ClusterStrategy, role: Role, p: Point, rho: f64) -> bool {
    let r = p.norm();
    match *strategy {
        ClusterStrategy::InDiskHalfRho => r < rho / 2.0,
        ClusterStrategy::FixedDisk { radius } => r <= radius,
        ClusterStrategy::DiskAnnulus {
            r_disk,
            r_in,
            r_out,
        } => match role {
            Role::Strong => r <= r_disk,
            Role::Weak => (r_in..=r_out).contains(&r),
        },
        _ => true,
    }
}

/// Attempt caps used while selecting a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionLimits {
    /// Orientation redraws for controlled placement and candidate pairs for
    /// the SINR-threshold strategy.
    pub placement_attempts: usize,
    /// Draws per user for rejection sampling inside a region of the cell.
    pub sampling_attempts: usize,
}

impl Default for SelectionLimits {
    fn default() -> Self {
        Self {
            placement_attempts: DEFAULT_PLACEMENT_ATTEMPTS,
            sampling_attempts: DEFAULT_SAMPLING_ATTEMPTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub cluster: Cluster,
    /// Candidates drawn inside the strategy's region but outside the cell.
    pub out_of_cell_rejections: usize,
}

/// Picks an ordered cluster of `size` from an existing candidate pool.
///
/// Disk strategies keep the first eligible candidates; the SINR-threshold
/// strategy takes the first candidate with reference SINR at least `t1` and
/// the first other one at most `t2`.
pub fn pick_from_candidates(
    strategy: &ClusterStrategy,
    candidates: &[UserState],
    rho: f64,
    size: usize,
    ordering: OrderingMethod,
) -> Result<Cluster, ClusteringError> {
    strategy.validate()?;
    if !strategy.supports(size) {
        return Err(ClusteringError::UnsupportedSize {
            strategy: strategy.name(),
            size,
        });
    }
    let failed = || ClusteringError::SelectionFailed {
        strategy: strategy.name(),
        out_of_cell_rejections: 0,
    };
    let chosen: Vec<UserState> = match *strategy {
        ClusterStrategy::SinrThreshold { t1, t2 } => {
            let strong = candidates
                .iter()
                .position(|u| u.reference_sinr() >= t1)
                .ok_or_else(failed)?;
            let weak = candidates
                .iter()
                .enumerate()
                .position(|(i, u)| i != strong && u.reference_sinr() <= t2)
                .ok_or_else(failed)?;
            let cluster = order_users(vec![candidates[strong], candidates[weak]], ordering);
            return if sinr_pair_ok(&cluster, t1, t2) {
                Ok(cluster)
            } else {
                Err(failed())
            };
        }
        ClusterStrategy::DiskAnnulus { .. } => {
            let strong = candidates
                .iter()
                .position(|u| position_eligible(strategy, Role::Strong, u.position, rho))
                .ok_or_else(failed)?;
            let weak = candidates
                .iter()
                .enumerate()
                .position(|(i, u)| {
                    i != strong && position_eligible(strategy, Role::Weak, u.position, rho)
                })
                .ok_or_else(failed)?;
            vec![candidates[strong], candidates[weak]]
        }
        ClusterStrategy::ControlledDisparity { .. } => {
            return Err(ClusteringError::InvalidStrategy {
                strategy: strategy.name(),
                reason: "placement is geometric and does not draw from a candidate pool".into(),
            })
        }
        _ => candidates
            .iter()
            .filter(|u| position_eligible(strategy, Role::Strong, u.position, rho))
            .take(size)
            .copied()
            .collect(),
    };
    if chosen.len() < size {
        return Err(failed());
    }
    Ok(order_users(chosen, ordering))
}

fn sinr_pair_ok(cluster: &Cluster, t1: f64, t2: f64) -> bool {
    cluster.strongest().reference_sinr() >= t1 && cluster.weakest().reference_sinr() <= t2
}

/// Draws a cluster of `size` users from the serving cell of `realization`.
///
/// Selection failures (the strategy cannot be met in this deployment) come
/// back as [`ClusteringError::SelectionFailed`] or an exhausted geometry error;
/// see [`ClusteringError::is_selection_failure`].
pub fn select_cluster<R: Rng + ?Sized>(
    strategy: &ClusterStrategy,
    realization: &NetworkRealization,
    params: &ChannelParams,
    size: usize,
    ordering: OrderingMethod,
    limits: SelectionLimits,
    rng: &mut R,
) -> Result<Selection, ClusteringError> {
    strategy.validate()?;
    if !strategy.supports(size) {
        return Err(ClusteringError::UnsupportedSize {
            strategy: strategy.name(),
            size,
        });
    }
    let rho = realization.rho();
    let mut rejections = 0usize;
    let failed = |rejections| ClusteringError::SelectionFailed {
        strategy: strategy.name(),
        out_of_cell_rejections: rejections,
    };

    let positions: Vec<Point> = match *strategy {
        ClusterStrategy::RandomInCell => (0..size)
            .map(|_| sample_user_in_cell(realization, rng, limits.sampling_attempts))
            .collect::<Result<_, _>>()?,
        ClusterStrategy::InDiskHalfRho => {
            let mut out = Vec::with_capacity(size);
            for _ in 0..size {
                let p = draw_in_region(
                    realization,
                    limits.sampling_attempts,
                    &mut rejections,
                    rng,
                    |rng| uniform_in_disk(rho / 2.0, rng),
                )
                .ok_or_else(|| failed(rejections))?;
                out.push(p);
            }
            out
        }
        ClusterStrategy::FixedDisk { radius } => {
            let mut out = Vec::with_capacity(size);
            for _ in 0..size {
                let p = draw_in_region(
                    realization,
                    limits.sampling_attempts,
                    &mut rejections,
                    rng,
                    |rng| uniform_in_disk(radius, rng),
                )
                .ok_or_else(|| failed(rejections))?;
                out.push(p);
            }
            out
        }
        ClusterStrategy::DiskAnnulus {
            r_disk,
            r_in,
            r_out,
        } => {
            let strong = draw_in_region(
                realization,
                limits.sampling_attempts,
                &mut rejections,
                rng,
                |rng| uniform_in_disk(r_disk, rng),
            )
            .ok_or_else(|| failed(rejections))?;
            let weak = draw_in_region(
                realization,
                limits.sampling_attempts,
                &mut rejections,
                rng,
                |rng| uniform_in_annulus(r_in, r_out, rng),
            )
            .ok_or_else(|| failed(rejections))?;
            vec![strong, weak]
        }
        ClusterStrategy::SinrThreshold { .. } => {
            for _ in 0..limits.placement_attempts {
                let mut pair = Vec::with_capacity(2);
                for _ in 0..2 {
                    let p = sample_user_in_cell(realization, rng, limits.sampling_attempts)?;
                    pair.push(make_user_state(p, realization, params, rng)?);
                }
                match pick_from_candidates(strategy, &pair, rho, size, ordering) {
                    Ok(cluster) => {
                        return Ok(Selection {
                            cluster,
                            out_of_cell_rejections: 0,
                        })
                    }
                    Err(ClusteringError::SelectionFailed { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            return Err(failed(0));
        }
        ClusterStrategy::ControlledDisparity { disparity } => {
            let placed =
                place_disparity_pair(realization, disparity, limits.placement_attempts, rng)?;
            if !placed.feasible {
                return Err(failed(0));
            }
            vec![placed.strong_position, placed.weak_position]
        }
    };

    let users = positions
        .into_iter()
        .map(|p| make_user_state(p, realization, params, rng))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Selection {
        cluster: order_users(users, ordering),
        out_of_cell_rejections: rejections,
    })
}

/// Draws from a region until a point lands in the cell, counting the misses.
fn draw_in_region<R: Rng + ?Sized>(
    realization: &NetworkRealization,
    attempts: usize,
    rejections: &mut usize,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> Point,
) -> Option<Point> {
    for _ in 0..attempts {
        let p = draw(rng);
        if realization.in_cell(p) {
            return Some(p);
        }
        *rejections += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_realization;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn at(distance: f64) -> UserState {
        UserState::from_aggregates(distance, distance.powi(-4), 1.0)
    }

    fn with_sinr(distance: f64, sinr: f64) -> UserState {
        UserState::from_aggregates(distance, sinr, 1.0)
    }

    fn distances(c: &Cluster) -> Vec<f64> {
        c.users().iter().map(|u| u.link_distance).collect()
    }

    #[test]
    fn ordering_examples() {
        let c = order_users(
            vec![at(0.3), at(0.1), at(0.5)],
            OrderingMethod::ByLinkDistance,
        );
        assert_eq!(distances(&c), vec![0.1, 0.3, 0.5]);

        let mut quality = vec![at(1.0), at(2.0), at(3.0)];
        for (u, q) in quality.iter_mut().zip([2.0, 5.0, 1.0]) {
            u.mean_gain = q;
            u.mean_interference_plus_noise = 1.0;
        }
        let c = order_users(quality, OrderingMethod::ByMeanSignalQuality);
        assert_eq!(distances(&c), vec![2.0, 1.0, 3.0]);

        let mut a = at(0.3);
        a.fading = 0.1;
        let mut b = at(0.3);
        b.fading = 0.2;
        let c = order_users(vec![a, b], OrderingMethod::ByLinkDistance);
        assert_eq!(c.users()[0].fading, 0.1);
        assert_eq!(c.ordering(), OrderingMethod::ByLinkDistance);
    }

    #[test]
    fn candidate_examples() {
        let pool = vec![at(0.3), at(0.6), at(0.45)];
        let c = pick_from_candidates(
            &ClusterStrategy::InDiskHalfRho,
            &pool,
            1.0,
            2,
            OrderingMethod::ByLinkDistance,
        )
        .unwrap();
        assert_eq!(distances(&c), vec![0.3, 0.45]);

        let err = pick_from_candidates(
            &ClusterStrategy::FixedDisk { radius: 0.4 },
            &pool,
            1.0,
            2,
            OrderingMethod::ByLinkDistance,
        )
        .unwrap_err();
        assert!(err.is_selection_failure());

        let pool = vec![
            with_sinr(0.1, 3.0),
            with_sinr(0.2, 0.5),
            with_sinr(0.3, 1.5),
        ];
        let c = pick_from_candidates(
            &ClusterStrategy::SinrThreshold { t1: 2.0, t2: 1.0 },
            &pool,
            1.0,
            2,
            OrderingMethod::ByInstantaneousSignalQuality,
        )
        .unwrap();
        let sinrs: Vec<f64> = c.users().iter().map(|u| u.reference_sinr()).collect();
        assert_eq!(sinrs, vec![3.0, 0.5]);
    }

    #[test]
    fn annulus_candidates() {
        let s = ClusterStrategy::DiskAnnulus {
            r_disk: 0.2,
            r_in: 0.4,
            r_out: 0.6,
        };
        let c = pick_from_candidates(
            &s,
            &[at(0.5), at(0.3), at(0.1)],
            1.0,
            2,
            OrderingMethod::ByLinkDistance,
        )
        .unwrap();
        assert_eq!(distances(&c), vec![0.1, 0.5]);
        assert!(pick_from_candidates(
            &s,
            &[at(0.3), at(0.1)],
            1.0,
            2,
            OrderingMethod::ByLinkDistance
        )
        .is_err());
    }

    #[test]
    fn strategy_validation_and_sizes() {
        assert!(ClusterStrategy::SinrThreshold { t1: 1.0, t2: 2.0 }
            .validate()
            .is_err());
        assert!(ClusterStrategy::FixedDisk { radius: -1.0 }
            .validate()
            .is_err());
        assert!(ClusterStrategy::DiskAnnulus {
            r_disk: 0.1,
            r_in: 0.5,
            r_out: 0.4
        }
        .validate()
        .is_err());
        // overlap between disk and annulus is allowed
        assert!(ClusterStrategy::DiskAnnulus {
            r_disk: 0.5,
            r_in: 0.3,
            r_out: 0.6
        }
        .validate()
        .is_ok());

        let r = sample_realization(1.0, 15.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let p = ChannelParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = select_cluster(
            &ClusterStrategy::SinrThreshold { t1: 2.0, t2: 1.0 },
            &r,
            &p,
            3,
            OrderingMethod::ByLinkDistance,
            SelectionLimits::default(),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ClusteringError::UnsupportedSize { size: 3, .. }
        ));
        let err = select_cluster(
            &ClusterStrategy::RandomInCell,
            &r,
            &p,
            1,
            OrderingMethod::ByLinkDistance,
            SelectionLimits::default(),
            &mut rng,
        )
        .unwrap_err();
        assert!(!err.is_selection_failure());
    }

    #[test]
    fn oversized_fixed_disk_counts_rejections() {
        let r = NetworkRealization::from_interferers(vec![Point::new(1.0, 0.0)], 15.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut total = 0;
        for _ in 0..50 {
            let s = select_cluster(
                &ClusterStrategy::FixedDisk { radius: 2.0 },
                &r,
                &ChannelParams::default(),
                2,
                OrderingMethod::ByLinkDistance,
                SelectionLimits::default(),
                &mut rng,
            )
            .unwrap();
            for u in s.cluster.users() {
                assert!(r.in_cell(u.position));
                assert!(u.link_distance <= 2.0);
            }
            total += s.out_of_cell_rejections;
        }
        assert!(total > 0);
    }

    #[test]
    fn unreachable_disparity_is_a_selection_failure() {
        let pts = vec![
            Point::new(1.0, 0.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, -1.0),
        ];
        let r = NetworkRealization::from_interferers(pts, 15.0).unwrap();
        let err = select_cluster(
            &ClusterStrategy::ControlledDisparity { disparity: 6.0 },
            &r,
            &ChannelParams::default(),
            2,
            OrderingMethod::ByLinkDistance,
            SelectionLimits::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap_err();
        assert!(err.is_selection_failure());
    }

    fn all_strategies() -> Vec<ClusterStrategy> {
        vec![
            ClusterStrategy::RandomInCell,
            ClusterStrategy::InDiskHalfRho,
            ClusterStrategy::FixedDisk { radius: 0.3 },
            ClusterStrategy::DiskAnnulus {
                r_disk: 0.1,
                r_in: 0.15,
                r_out: 0.3,
            },
            ClusterStrategy::SinrThreshold { t1: 2.0, t2: 1.0 },
            ClusterStrategy::ControlledDisparity { disparity: 2.5 },
        ]
    }

    #[test]
    fn every_selected_user_is_in_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let params = ChannelParams::default();
        for _ in 0..100 {
            let r = sample_realization(1.0, 15.0, &mut rng).unwrap();
            for s in all_strategies() {
                match select_cluster(
                    &s,
                    &r,
                    &params,
                    2,
                    OrderingMethod::ByLinkDistance,
                    SelectionLimits::default(),
                    &mut rng,
                ) {
                    Ok(sel) => {
                        assert_eq!(sel.cluster.len(), 2);
                        for u in sel.cluster.users() {
                            assert!(r.in_cell(u.position), "{}", s.name());
                        }
                        if let ClusterStrategy::SinrThreshold { t1, t2 } = s {
                            assert!(sel.cluster.strongest().reference_sinr() >= t1);
                            assert!(sel.cluster.weakest().reference_sinr() <= t2);
                        }
                        if s == ClusterStrategy::InDiskHalfRho {
                            for u in sel.cluster.users() {
                                assert!(u.link_distance < r.rho() / 2.0);
                            }
                        }
                    }
                    Err(e) => assert!(e.is_selection_failure(), "{e}"),
                }
            }
        }
    }

    #[test]
    fn larger_clusters_from_pool_strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = sample_realization(1.0, 15.0, &mut rng).unwrap();
        let sel = select_cluster(
            &ClusterStrategy::InDiskHalfRho,
            &r,
            &ChannelParams::default(),
            4,
            OrderingMethod::ByLinkDistance,
            SelectionLimits::default(),
            &mut rng,
        )
        .unwrap();
        let d = distances(&sel.cluster);
        assert_eq!(d.len(), 4);
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }

    proptest! {
        #[test]
        fn ordering_is_permutation_invariant(
            keys in prop::collection::hash_set(1u32..10_000, 1..8),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let users: Vec<UserState> = keys.iter().map(|&k| at(k as f64 / 1000.0)).collect();
            let mut shuffled = users.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            for method in [
                OrderingMethod::ByLinkDistance,
                OrderingMethod::ByMeanSignalQuality,
                OrderingMethod::ByInstantaneousSignalQuality,
            ] {
                let a = order_users(users.clone(), method);
                let b = order_users(shuffled.clone(), method);
                prop_assert_eq!(distances(&a), distances(&b));
            }
            let d = distances(&order_users(shuffled, OrderingMethod::ByLinkDistance));
            prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
