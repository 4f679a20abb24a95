//! Two-stage decoding.
//!
//! Stage one projects the received `T`-vector onto the receiver's group
//! vector, which nulls every other group exactly. Stage two runs successive
//! interference cancellation inside the group: the receiver detects and
//! subtracts the weaker-gain (higher-power) members one by one, then detects
//! its own symbol while treating the remaining stronger-gain members as noise.

use std::cmp::Ordering;

use crate::modem::{ConstellationPoint, QPSK};
use crate::precoding::PrecodingBasis;
use crate::topology::PowerAllocation;
use crate::{Complex, Error, Result};

/// How the SIC decoding order is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderMode {
    /// Sort by the instantaneous gain `gamma_k |h_k|^2 / sigma^2`.
    Instantaneous,
    /// Sort by distance, nearest first, regardless of fading. Power grows
    /// with distance, so every receiver cancels exactly the same-group users
    /// that are sent with more power than itself.
    #[default]
    Distance,
}

/// Output of the projection stage together with the scalar channel the
/// receiver uses for reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedSignal {
    pub value: Complex,
    /// `sqrt(gamma_k) h_k`.
    pub effective_channel: Complex,
}

/// Computes `v_group^T y`.
pub fn project(y: &[Complex], basis: &PrecodingBasis, group: usize) -> Result<Complex> {
    if group >= basis.dim() {
        return Err(Error::GroupOutOfRange {
            index: group,
            groups: basis.dim(),
        });
    }
    if y.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            actual: y.len(),
        });
    }
    Ok(basis
        .vector(group)
        .iter()
        .zip(y)
        .map(|(&v, &c)| c * v)
        .sum())
}

/// User indices sorted by decreasing gain. Equal gains keep ascending index
/// order.
pub fn decoding_order(gains: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&a, &b| {
        gains[b]
            .partial_cmp(&gains[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Which same-group signals a receiver cancels and which it leaves as noise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SicPlan {
    receiver: usize,
    /// Weaker-gain members, in cancellation order (weakest first).
    cancel: Vec<usize>,
    /// Stronger-gain members, never cancelled.
    noise: Vec<usize>,
}

impl SicPlan {
    /// Builds the plan for `receiver` given the global decoding `order` and
    /// the members of its group that are actually transmitting.
    ///
    /// Panics if `receiver` is not in `order`.
    pub fn new(receiver: usize, order: &[usize], members: &[usize]) -> SicPlan {
        let pos = |u: usize| {
            order
                .iter()
                .position(|&x| x == u)
                .expect("user missing from decoding order")
        };
        let own = pos(receiver);
        let mut ranked: Vec<(usize, usize)> = members
            .iter()
            .filter(|&&m| m != receiver)
            .map(|&m| (pos(m), m))
            .collect();
        ranked.sort_unstable();
        let noise = ranked
            .iter()
            .filter(|(p, _)| *p < own)
            .map(|&(_, m)| m)
            .collect();
        let cancel = ranked
            .iter()
            .rev()
            .filter(|(p, _)| *p > own)
            .map(|&(_, m)| m)
            .collect();
        SicPlan {
            receiver,
            cancel,
            noise,
        }
    }

    pub fn receiver(&self) -> usize {
        self.receiver
    }

    pub fn cancel_set(&self) -> &[usize] {
        &self.cancel
    }

    pub fn noise_set(&self) -> &[usize] {
        &self.noise
    }
}

/// Nearest QPSK point to `residual / (effective_channel * amplitude)` in the
/// Euclidean metric of the received domain. Ties go to the earlier point in
/// [`QPSK`] order.
pub fn ml_detect(
    residual: Complex,
    effective_channel: Complex,
    amplitude: f64,
) -> ConstellationPoint {
    let scale = effective_channel * amplitude;
    let mut best = QPSK[0];
    let mut best_metric = f64::INFINITY;
    for s in QPSK {
        let metric = (residual - scale * s.value()).norm_sqr();
        if metric < best_metric {
            best = s;
            best_metric = metric;
        }
    }
    best
}

/// Result of running the cancellation chain at one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct SicOutcome {
    /// Decision on the receiver's own symbol.
    pub own: ConstellationPoint,
    /// Decisions on cancelled users, in cancellation order.
    pub cancelled: Vec<(usize, ConstellationPoint)>,
    /// Signal left after all subtractions, on which `own` was decided.
    pub residual: Complex,
}

/// Runs the SIC chain with a caller-supplied decision rule.
///
/// `decide(user, residual)` returns the symbol estimate for `user`; the
/// reconstruction `g sqrt(P_user) x_hat` is subtracted before moving on.
pub fn cancel_with<F>(
    projected: &ProjectedSignal,
    plan: &SicPlan,
    power: &PowerAllocation,
    mut decide: F,
) -> SicOutcome
where
    F: FnMut(usize, Complex) -> ConstellationPoint,
{
    let g = projected.effective_channel;
    let mut residual = projected.value;
    let mut cancelled = Vec::with_capacity(plan.cancel.len());
    for &j in &plan.cancel {
        let estimate = decide(j, residual);
        residual -= g * power.amplitude(j) * estimate.value();
        cancelled.push((j, estimate));
    }
    let own = decide(plan.receiver, residual);
    SicOutcome {
        own,
        cancelled,
        residual,
    }
}

/// SIC with single-user ML detection at every step.
pub fn sic_decode(
    projected: &ProjectedSignal,
    plan: &SicPlan,
    power: &PowerAllocation,
) -> SicOutcome {
    let g = projected.effective_channel;
    cancel_with(projected, plan, power, |j, r| {
        ml_detect(r, g, power.amplitude(j))
    })
}
