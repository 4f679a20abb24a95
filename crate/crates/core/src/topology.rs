//! Cell geometry, path loss, group assignment and power allocation.
//!
//! Users are indexed by increasing distance from the base station, so index
//! `0` has the strongest average channel and the smallest power share.

use crate::{Error, Result};

/// Distances (km) of the five-user reference cell.
pub const REFERENCE_DISTANCES: [f64; 5] = [0.5, 1.5, 2.5, 3.5, 4.5];
pub const REFERENCE_RADIUS_KM: f64 = 5.0;
/// Urban path-loss exponent.
pub const REFERENCE_PATH_LOSS_EXPONENT: f64 = 3.0;
pub const REFERENCE_GROUPS: usize = 2;
/// Macrocell transmit budget in watts.
pub const REFERENCE_TOTAL_POWER: f64 = 40.0;

/// Validated single-cell geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    distances: Vec<f64>,
    cell_radius: f64,
    path_loss_exponent: f64,
    group_count: usize,
}

impl Topology {
    /// Builds a topology from distances that are already sorted strictly
    /// increasing. Ties are rejected because they make the decoding order
    /// ambiguous.
    pub fn new(
        distances: Vec<f64>,
        cell_radius: f64,
        path_loss_exponent: f64,
        group_count: usize,
    ) -> Result<Self> {
        if !(cell_radius.is_finite() && cell_radius > 0.0) {
            return Err(Error::InvalidRadius(cell_radius));
        }
        if !(path_loss_exponent.is_finite() && path_loss_exponent > 0.0) {
            return Err(Error::InvalidPathLossExponent(path_loss_exponent));
        }
        if distances.is_empty() {
            return Err(Error::NoUsers);
        }
        for (index, &value) in distances.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveDistance { index, value });
            }
            if value > cell_radius {
                return Err(Error::BeyondRadius {
                    index,
                    value,
                    radius: cell_radius,
                });
            }
            if index > 0 && value <= distances[index - 1] {
                return Err(Error::UnsortedDistances { index, value });
            }
        }
        if group_count == 0 || group_count > distances.len() {
            return Err(Error::GroupCountOutOfRange {
                groups: group_count,
                users: distances.len(),
            });
        }
        Ok(Topology {
            distances,
            cell_radius,
            path_loss_exponent,
            group_count,
        })
    }

    /// The five-user, two-group reference cell.
    pub fn reference() -> Self {
        Topology::new(
            REFERENCE_DISTANCES.to_vec(),
            REFERENCE_RADIUS_KM,
            REFERENCE_PATH_LOSS_EXPONENT,
            REFERENCE_GROUPS,
        )
        .expect("reference cell is valid")
    }

    pub fn user_count(&self) -> usize {
        self.distances.len()
    }

    pub fn group_count(&self) -> usize {
        self.group_count
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn cell_radius(&self) -> f64 {
        self.cell_radius
    }

    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }

    pub(crate) fn check_user(&self, k: usize) -> Result<()> {
        if k < self.user_count() {
            Ok(())
        } else {
            Err(Error::UserOutOfRange {
                index: k,
                users: self.user_count(),
            })
        }
    }

    /// Linear path-loss gain `1 / d_k^n`.
    pub fn path_loss(&self, k: usize) -> Result<f64> {
        self.check_user(k)?;
        Ok(self.distances[k].powf(-self.path_loss_exponent))
    }

    /// Round-robin over distance-sorted users: user `k` joins group
    /// `k mod T`. Neighbouring users in distance order therefore always land
    /// in different groups, and same-group users are `T` ranks apart.
    pub fn assign_groups(&self) -> GroupAssignment {
        let t = self.group_count;
        let group_of: Vec<usize> = (0..self.user_count()).map(|k| k % t).collect();
        let mut members = vec![Vec::new(); t];
        for (k, &g) in group_of.iter().enumerate() {
            members[g].push(k);
        }
        GroupAssignment { group_of, members }
    }

    /// Distance-squared proportional power split of `total_power`.
    pub fn allocate_power(&self, total_power: f64) -> Result<PowerAllocation> {
        PowerAllocation::proportional_to_squared_distance(&self.distances, total_power)
    }
}

/// Partition of users into precoding groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAssignment {
    group_of: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl GroupAssignment {
    pub fn group_count(&self) -> usize {
        self.members.len()
    }

    pub fn user_count(&self) -> usize {
        self.group_of.len()
    }

    /// Group index of user `k`.
    ///
    /// Panics if `k` is out of range.
    pub fn group_of(&self, k: usize) -> usize {
        self.group_of[k]
    }

    /// Members of group `t`, nearest first.
    pub fn members(&self, t: usize) -> &[usize] {
        &self.members[t]
    }

    pub fn groups(&self) -> impl Iterator<Item = &[usize]> {
        self.members.iter().map(Vec::as_slice)
    }
}

/// Per-user transmit powers in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    per_user: Vec<f64>,
    total: f64,
}

impl PowerAllocation {
    /// `P_k = P_T d_k^2 / sum_j d_j^2`. Far users get more power to make up
    /// for their weaker channels.
    pub fn proportional_to_squared_distance(distances: &[f64], total_power: f64) -> Result<Self> {
        if !(total_power.is_finite() && total_power > 0.0) {
            return Err(Error::InvalidPower(total_power));
        }
        if distances.is_empty() {
            return Err(Error::NoUsers);
        }
        let norm: f64 = distances.iter().map(|d| d * d).sum();
        let per_user = distances
            .iter()
            .map(|d| total_power * d * d / norm)
            .collect();
        Ok(PowerAllocation {
            per_user,
            total: total_power,
        })
    }

    pub fn per_user(&self) -> &[f64] {
        &self.per_user
    }

    pub fn power(&self, k: usize) -> f64 {
        self.per_user[k]
    }

    /// Transmit amplitude `sqrt(P_k)`.
    pub fn amplitude(&self, k: usize) -> f64 {
        self.per_user[k].sqrt()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// The constant `a` with `a^2 = P_T`.
    pub fn amplitude_constant(&self) -> f64 {
        self.total.sqrt()
    }

    /// A copy in which only user `k` transmits, at its original share.
    /// Everyone else is switched off, so `total` drops to `P_k`.
    pub fn single_active(&self, k: usize) -> PowerAllocation {
        let per_user = self
            .per_user
            .iter()
            .enumerate()
            .map(|(j, &p)| if j == k { p } else { 0.0 })
            .collect();
        PowerAllocation {
            per_user,
            total: self.per_user[k],
        }
    }
}
