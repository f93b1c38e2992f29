//! Downlink successive interference cancellation for an N-user cluster.
//!
//! Users are indexed from 0 (strongest) to N-1 (weakest); message k belongs to
//! user k. User i decodes messages N-1 down to i, cancelling each one before
//! the next, and treats the messages of stronger users (indices below the
//! current message) as noise. A failure anywhere in the chain stops it.

use thiserror::Error;

use crate::allocation::{AllocationMode, PowerAllocation};
use crate::channel::UserState;
use crate::clustering::OrderingMethod;

/// Relative slack applied to every SINR threshold comparison, so that
/// allocations computed to sit exactly on a constraint decode despite
/// floating-point rounding.
pub const DECODE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SicError {
    #[error("a cluster needs at least one user")]
    EmptyCluster,
    #[error("decoding threshold {index} must be finite and non-negative, got {value}")]
    InvalidThreshold { index: usize, value: f64 },
    #[error("cluster has {cluster} users but {what} has {got} entries")]
    SizeMismatch {
        cluster: usize,
        what: &'static str,
        got: usize,
    },
    #[error("user {user} cannot decode message {message} in a cluster of {size}")]
    IndexOutOfRange {
        user: usize,
        message: usize,
        size: usize,
    },
}

/// Users sharing one resource block, strongest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    users: Vec<UserState>,
    ordering: OrderingMethod,
}

impl Cluster {
    /// Wraps users that are already in strength order.
    pub fn new(users: Vec<UserState>, ordering: OrderingMethod) -> Result<Self, SicError> {
        if users.is_empty() {
            return Err(SicError::EmptyCluster);
        }
        Ok(Self { users, ordering })
    }

    pub fn users(&self) -> &[UserState] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn ordering(&self) -> OrderingMethod {
        self.ordering
    }

    pub fn strongest(&self) -> &UserState {
        &self.users[0]
    }

    pub fn weakest(&self) -> &UserState {
        &self.users[self.users.len() - 1]
    }

    /// The same cluster with every user replaced by `f(user)`.
    pub fn map_users(&self, f: impl Fn(&UserState) -> UserState) -> Self {
        Self {
            users: self.users.iter().map(f).collect(),
            ordering: self.ordering,
        }
    }
}

/// Per-message SINR thresholds; the target rate of message k is `ln(1 + theta_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QosTargets {
    thresholds: Vec<f64>,
}

impl QosTargets {
    pub fn new(thresholds: Vec<f64>) -> Result<Self, SicError> {
        for (index, &value) in thresholds.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SicError::InvalidThreshold { index, value });
            }
        }
        Ok(Self { thresholds })
    }

    /// The same threshold for every one of `n` messages.
    pub fn uniform(theta: f64, n: usize) -> Result<Self, SicError> {
        Self::new(vec![theta; n])
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn target_rate(&self, message: usize) -> f64 {
        self.thresholds[message].ln_1p()
    }
}

/// Result of running every user's SIC chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingOutcome {
    /// Row-major N x N table; entry (i, k) is meaningful only for k >= i.
    decode_success: Vec<bool>,
    size: usize,
    pub covered: Vec<bool>,
    /// Achieved rate per user in nats per channel use.
    pub achieved_rate: Vec<f64>,
}

impl DecodingOutcome {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Whether user `user` decoded message `message`. `false` below the diagonal.
    pub fn decoded(&self, user: usize, message: usize) -> bool {
        message >= user && self.decode_success[user * self.size + message]
    }

    pub fn all_covered(&self) -> bool {
        self.covered.iter().all(|&c| c)
    }
}

fn check_sizes(
    cluster: &Cluster,
    powers: &[f64],
    qos: Option<&QosTargets>,
) -> Result<(), SicError> {
    let n = cluster.len();
    if powers.len() != n {
        return Err(SicError::SizeMismatch {
            cluster: n,
            what: "allocation",
            got: powers.len(),
        });
    }
    if let Some(q) = qos {
        if q.len() != n {
            return Err(SicError::SizeMismatch {
                cluster: n,
                what: "QoS targets",
                got: q.len(),
            });
        }
    }
    Ok(())
}

#[inline]
fn sinr_unchecked(users: &[UserState], powers: &[f64], user: usize, message: usize) -> f64 {
    let u = &users[user];
    let intracell: f64 = powers[..message].iter().sum::<f64>() * u.gain;
    powers[message] * u.gain / (intracell + u.interference_plus_noise)
}

/// SINR of message `message` at user `user`, after cancelling all weaker
/// users' messages: `P_k G_i / (sum_{j<k} P_j G_i + W_i)`.
pub fn sinr_of(
    cluster: &Cluster,
    allocation: &PowerAllocation,
    user: usize,
    message: usize,
) -> Result<f64, SicError> {
    check_sizes(cluster, &allocation.powers, None)?;
    let n = cluster.len();
    if user > message || message >= n {
        return Err(SicError::IndexOutOfRange {
            user,
            message,
            size: n,
        });
    }
    Ok(sinr_unchecked(
        cluster.users(),
        &allocation.powers,
        user,
        message,
    ))
}

#[inline]
fn meets(sinr: f64, theta: f64) -> bool {
    sinr >= theta * (1.0 - DECODE_SLACK)
}

/// Runs the SIC chain of every user and assigns achieved rates.
///
/// In sum-rate mode the strongest user's own message is rate-adaptive: it
/// succeeds whenever the rest of its chain did, at rate `ln(1 + SINR)`.
/// Every other covered user gets its target rate and uncovered users get 0.
pub fn decode_cluster(
    cluster: &Cluster,
    allocation: &PowerAllocation,
    qos: &QosTargets,
) -> Result<DecodingOutcome, SicError> {
    check_sizes(cluster, &allocation.powers, Some(qos))?;
    let n = cluster.len();
    let users = cluster.users();
    let powers = &allocation.powers;
    let adaptive_strong = allocation.mode == AllocationMode::SumRateWeakQos;

    let mut table = vec![false; n * n];
    let mut covered = vec![false; n];
    let mut rates = vec![0.0; n];
    for i in 0..n {
        let mut chain_ok = true;
        for k in (i..n).rev() {
            let ok = chain_ok
                && if adaptive_strong && i == 0 && k == 0 {
                    true
                } else {
                    meets(sinr_unchecked(users, powers, i, k), qos.thresholds()[k])
                };
            table[i * n + k] = ok;
            chain_ok = ok;
        }
        covered[i] = table[i * n + i];
        if covered[i] {
            rates[i] = if adaptive_strong && i == 0 {
                sinr_unchecked(users, powers, 0, 0).ln_1p()
            } else {
                qos.target_rate(i)
            };
        }
    }
    Ok(DecodingOutcome {
        decode_success: table,
        size: n,
        covered,
        achieved_rate: rates,
    })
}

/// `true` iff `P_k > theta_k * sum_{j<k} P_j` for every message k >= 1.
///
/// When it fails for some k, message k is in outage at every user for any
/// positive interference-plus-noise.
///
/// # Panics
/// If `powers` and `qos` differ in length.
pub fn necessary_condition(powers: &[f64], qos: &QosTargets) -> bool {
    assert_eq!(powers.len(), qos.len(), "allocation and QoS sizes differ");
    let mut stronger = 0.0;
    for (k, (&p, &theta)) in powers.iter().zip(qos.thresholds()).enumerate() {
        if k > 0 && p <= theta * stronger {
            return false;
        }
        stronger += p;
    }
    true
}
