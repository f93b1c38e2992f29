//! Closed-form power allocation for a cluster under SINR targets.
//!
//! Write `w_i = W_i / G_i` for each user's interference-to-gain ratio. Message k
//! is decodable at user i <= k exactly when
//! `P_k >= theta_k * (sum_{j<k} P_j + w_i)`, so every message is pinned by the
//! worst ratio among the users that must decode it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sic::{Cluster, QosTargets};

/// Slack on the budget check.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("power budget must be finite and positive, got {0}")]
    InvalidBudget(f64),
    #[error("cluster has {cluster} users but {got} thresholds were given")]
    SizeMismatch { cluster: usize, got: usize },
    #[error("power fraction {index} must lie in [0, 1], got {value}")]
    InvalidFraction { index: usize, value: f64 },
    #[error("power fractions sum to {0}, which exceeds 1")]
    FractionsExceedUnity(f64),
    #[error("at least one power fraction is required")]
    NoFractions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMode {
    /// Minimal power for every message except the strongest user's, which
    /// takes whatever budget remains.
    SumRateWeakQos,
    /// Component-wise minimal powers meeting every target.
    MinPowerQos,
    /// Channel-independent fractions of the budget.
    Fixed,
}

impl AllocationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AllocationMode::SumRateWeakQos => "sum_rate_weak_qos",
            AllocationMode::MinPowerQos => "min_power_qos",
            AllocationMode::Fixed => "fixed",
        }
    }
}

impl std::fmt::Display for AllocationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which users a message's power is sized for in sum-rate mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Anchoring {
    /// Message k is sized for user k alone. Stronger users' ability to
    /// decode it is left to the decoder.
    #[default]
    WeakAnchored,
    /// Message k is sized for every user that must decode it.
    Robust,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
    pub budget: f64,
    pub mode: AllocationMode,
    /// Whether the powers fit in the budget. Infeasible allocations keep the
    /// raw requirement rather than a clamped one.
    pub feasible: bool,
}

impl PowerAllocation {
    pub fn total(&self) -> f64 {
        self.powers.iter().sum()
    }
}

fn check_budget(budget: f64) -> Result<(), AllocationError> {
    if budget.is_finite() && budget > 0.0 {
        Ok(())
    } else {
        Err(AllocationError::InvalidBudget(budget))
    }
}

fn check_sizes(cluster: &Cluster, qos: &QosTargets) -> Result<(), AllocationError> {
    if cluster.len() != qos.len() {
        return Err(AllocationError::SizeMismatch {
            cluster: cluster.len(),
            got: qos.len(),
        });
    }
    Ok(())
}

/// Running maximum of `W_i / G_i` over users 0..=k.
fn worst_ratios(cluster: &Cluster) -> Vec<f64> {
    let mut worst = 0.0f64;
    cluster
        .users()
        .iter()
        .map(|u| {
            worst = worst.max(u.normalized_interference());
            worst
        })
        .collect()
}

/// Component-wise minimal powers meeting every target at every user that
/// must decode the message.
///
/// `P_0 = theta_0 * b_0` and `P_k = theta_k * (sum_{j<k} P_j + b_k)` where
/// `b_k` is the worst `W_i / G_i` among users `0..=k`. A zero threshold gives
/// zero power for that message.
pub fn min_power_qos(
    cluster: &Cluster,
    qos: &QosTargets,
    budget: f64,
) -> Result<PowerAllocation, AllocationError> {
    check_budget(budget)?;
    check_sizes(cluster, qos)?;
    let worst = worst_ratios(cluster);
    let mut powers = Vec::with_capacity(cluster.len());
    let mut stronger = 0.0;
    for (&theta, &b) in qos.thresholds().iter().zip(&worst) {
        let p = if theta == 0.0 {
            0.0
        } else {
            theta * (stronger + b)
        };
        powers.push(p);
        stronger += p;
    }
    Ok(PowerAllocation {
        feasible: stronger <= budget + FEASIBILITY_SLACK,
        powers,
        budget,
        mode: AllocationMode::MinPowerQos,
    })
}

/// Sum-rate maximisation with QoS on every message but the strongest user's.
///
/// Messages 1..N get their minimal power given everything stronger, and the
/// strongest user's message takes the remainder of the budget, so
/// `S_k = (1 + theta_k) S_{k-1} + theta_k a_k` with `S_N = budget`, where
/// `a_k` is `W_k / G_k` or the running worst ratio depending on `anchoring`.
/// The recursion is affine in `P_0`, so it is solved by elimination. For two
/// users this is `P_1 = theta_1 (budget + a_1) / (1 + theta_1)`.
pub fn sumrate_max_weak_qos(
    cluster: &Cluster,
    qos: &QosTargets,
    budget: f64,
    anchoring: Anchoring,
) -> Result<PowerAllocation, AllocationError> {
    check_budget(budget)?;
    check_sizes(cluster, qos)?;
    let anchors: Vec<f64> = match anchoring {
        Anchoring::WeakAnchored => cluster
            .users()
            .iter()
            .map(|u| u.normalized_interference())
            .collect(),
        Anchoring::Robust => worst_ratios(cluster),
    };
    let thresholds = qos.thresholds();
    let n = cluster.len();

    // S_k = slope * P_0 + offset
    let (mut slope, mut offset) = (1.0, 0.0);
    for k in 1..n {
        let theta = thresholds[k];
        slope *= 1.0 + theta;
        offset = (1.0 + theta) * offset + theta * anchors[k];
    }
    let feasible = offset <= budget + FEASIBILITY_SLACK;
    let mut strongest = (budget - offset) / slope;
    if feasible {
        strongest = strongest.max(0.0);
    }

    let mut powers = vec![0.0; n];
    let mut stronger = strongest;
    for k in 1..n {
        let theta = thresholds[k];
        let p = if theta == 0.0 {
            0.0
        } else {
            theta * (stronger + anchors[k])
        };
        powers[k] = p;
        stronger += p;
    }
    // Spend exactly the budget on the adaptive message.
    powers[0] = budget - powers[1..].iter().sum::<f64>();
    if feasible {
        powers[0] = powers[0].max(0.0);
    }
    Ok(PowerAllocation {
        powers,
        budget,
        mode: AllocationMode::SumRateWeakQos,
        feasible,
    })
}

/// `P_k = fractions_k * budget`.
pub fn fixed_fractions(fractions: &[f64], budget: f64) -> Result<PowerAllocation, AllocationError> {
    check_budget(budget)?;
    if fractions.is_empty() {
        return Err(AllocationError::NoFractions);
    }
    for (index, &value) in fractions.iter().enumerate() {
        if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
            return Err(AllocationError::InvalidFraction { index, value });
        }
    }
    let total: f64 = fractions.iter().sum();
    if total > 1.0 + FEASIBILITY_SLACK {
        return Err(AllocationError::FractionsExceedUnity(total));
    }
    Ok(PowerAllocation {
        powers: fractions.iter().map(|f| f * budget).collect(),
        budget,
        mode: AllocationMode::Fixed,
        feasible: true,
    })
}
