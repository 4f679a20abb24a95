//! Closed-form achievable rates.
//!
//! All rates are in bits per slot. Because a group symbol occupies `T`
//! slots, every log term carries a `1/T` prefactor.

use num_rational::Ratio;

use crate::channel::{channel_matrix, ChannelMatrix, FadingRealization, NoiseModel};
use crate::precoding::PrecodingBasis;
use crate::receiver::SicPlan;
use crate::topology::{GroupAssignment, PowerAllocation, Topology};
use crate::{Complex, Error, Result};

/// Scheme a [`RateRecord`] was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Hybrid,
    SingleUser,
    Tdma,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Hybrid => "hybrid",
            Scheme::SingleUser => "single_user",
            Scheme::Tdma => "tdma",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRecord {
    pub per_user: Vec<f64>,
    pub sum: f64,
    pub snr_db: f64,
    pub scheme: Scheme,
}

impl RateRecord {
    pub fn new(per_user: Vec<f64>, snr_db: f64, scheme: Scheme) -> Self {
        let sum = per_user.iter().sum();
        RateRecord {
            per_user,
            sum,
            snr_db,
            scheme,
        }
    }
}

/// `(|v^T H v|^2, |H v|^2)` for a channel matrix and a unit vector.
///
/// For the scalar channel both equal `gamma |h|^2`; they are computed
/// separately so that identity stays checkable.
pub fn gain_terms(h: &ChannelMatrix, v: &[f64]) -> Result<(f64, f64)> {
    let hv = h.apply_real(v)?;
    let quad: Complex = v.iter().zip(&hv).map(|(&a, &b)| b * a).sum();
    let energy = hv.iter().map(|c| c.norm_sqr()).sum();
    Ok((quad.norm_sqr(), energy))
}

/// Everything a rate evaluation needs for one fading block.
#[derive(Debug, Clone, Copy)]
pub struct LinkState<'a> {
    pub topology: &'a Topology,
    pub fading: &'a FadingRealization,
    pub power: &'a PowerAllocation,
    pub groups: &'a GroupAssignment,
    pub basis: &'a PrecodingBasis,
    pub noise: &'a NoiseModel,
}

impl LinkState<'_> {
    fn group_gain(&self, k: usize) -> Result<(f64, f64)> {
        let h = channel_matrix(self.topology, self.fading, k)?;
        gain_terms(&h, self.basis.vector(self.groups.group_of(k)))
    }

    /// Rate of user `k` under the hybrid scheme.
    ///
    /// The signal power is `P_T (d_k^2 / D) |v^T H_k v|^2`; interference comes
    /// from same-group users ahead of `k` in `order`, which `k` cannot
    /// cancel.
    pub fn user_rate(&self, k: usize, order: &[usize]) -> Result<f64> {
        self.topology.check_user(k)?;
        let (quad, energy) = self.group_gain(k)?;
        let d = self.topology.distances();
        let norm: f64 = d.iter().map(|x| x * x).sum();
        let signal = self.power.total() * d[k] * d[k] / norm * quad;
        let plan = SicPlan::new(k, order, self.groups.members(self.groups.group_of(k)));
        let interference: f64 = plan
            .noise_set()
            .iter()
            .map(|&j| energy * self.power.power(j))
            .sum();
        let t = self.topology.group_count() as f64;
        Ok((1.0 + signal / (interference + self.noise.variance())).log2() / t)
    }

    /// Hybrid-scheme rates of every user.
    pub fn hybrid_rates(&self, order: &[usize], snr_db: f64) -> Result<RateRecord> {
        let per_user = (0..self.topology.user_count())
            .map(|k| self.user_rate(k, order))
            .collect::<Result<_>>()?;
        Ok(RateRecord::new(per_user, snr_db, Scheme::Hybrid))
    }

    /// Rate of user `k` when it is alone in the cell and gets all of `P_T`.
    pub fn single_user_rate(&self, k: usize) -> Result<f64> {
        self.topology.check_user(k)?;
        let (_, energy) = self.group_gain(k)?;
        let t = self.topology.group_count() as f64;
        Ok((1.0 + self.power.total() / self.noise.variance() * energy).log2() / t)
    }

    pub fn single_user_rates(&self, snr_db: f64) -> Result<RateRecord> {
        let per_user = (0..self.topology.user_count())
            .map(|k| self.single_user_rate(k))
            .collect::<Result<_>>()?;
        Ok(RateRecord::new(per_user, snr_db, Scheme::SingleUser))
    }

    /// Equal time shares of the single-user rates; `sum` is the TDMA sum
    /// rate.
    pub fn tdma_rates(&self, snr_db: f64) -> Result<RateRecord> {
        let k = self.topology.user_count() as f64;
        let single = self.single_user_rates(snr_db)?;
        let per_user = single.per_user.iter().map(|r| r / k).collect();
        Ok(RateRecord::new(per_user, snr_db, Scheme::Tdma))
    }
}

/// TDMA baseline: each user gets `1/K` of the time at full power.
pub fn tdma_sum_rate(
    topology: &Topology,
    fading: &FadingRealization,
    noise: &NoiseModel,
    total_power: f64,
) -> Result<f64> {
    let t = topology.group_count() as f64;
    let k = topology.user_count();
    let mut sum = 0.0;
    for u in 0..k {
        let gain = channel_matrix(topology, fading, u)?.scale().norm_sqr();
        sum += (1.0 + total_power / noise.variance() * gain).log2() / t;
    }
    Ok(sum / k as f64)
}

/// Total degrees of freedom `K / T`.
pub fn dof_total(users: usize, groups: usize) -> Result<Ratio<usize>> {
    if users == 0 {
        return Err(Error::NoUsers);
    }
    if groups == 0 || groups > users {
        return Err(Error::GroupCountOutOfRange { groups, users });
    }
    Ok(Ratio::new(users, groups))
}

/// Hybrid over TDMA sum-rate ratio.
pub fn rate_ratio(hybrid_sum: f64, tdma_sum: f64) -> Result<f64> {
    if tdma_sum.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NonPositiveBaseline(tdma_sum));
    }
    Ok(hybrid_sum / tdma_sum)
}
