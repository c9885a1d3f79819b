//! Cost and reward arithmetic.
//!
//! Everything is kept in integer half-units so the 0.5 wirelength
//! coefficient never touches a float: one DBU of wire costs 1, one via 8 and
//! one violation 1000. Real values are `half_units / 2`.

use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("hpwl needs at least one pin")]
    NoPins,
    #[error("discount factor {0} outside [0, 1]")]
    BadGamma(f64),
}

/// A cost or reward in half-units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfUnits(pub i64);

impl HalfUnits {
    pub const ZERO: HalfUnits = HalfUnits(0);

    pub fn real(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Half-units for a whole number of real units.
    pub fn from_real_units(units: i64) -> Self {
        HalfUnits(units * 2)
    }
}

impl Add for HalfUnits {
    type Output = HalfUnits;
    fn add(self, rhs: Self) -> Self {
        HalfUnits(self.0 + rhs.0)
    }
}

impl AddAssign for HalfUnits {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Sub for HalfUnits {
    type Output = HalfUnits;
    fn sub(self, rhs: Self) -> Self {
        HalfUnits(self.0 - rhs.0)
    }
}

impl Neg for HalfUnits {
    type Output = HalfUnits;
    fn neg(self) -> Self {
        HalfUnits(-self.0)
    }
}

impl Sum for HalfUnits {
    fn sum<I: Iterator<Item = HalfUnits>>(iter: I) -> Self {
        HalfUnits(iter.map(|h| h.0).sum())
    }
}

/// Weights in half-units per DBU of wire, per via and per violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostWeights {
    pub wirelength: u64,
    pub via: u64,
    pub drv: u64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            wirelength: 1,
            via: 8,
            drv: 1000,
        }
    }
}

/// Violation counts by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DrvCounts {
    pub open: u64,
    pub short: u64,
    pub spacing: u64,
    pub min_area: u64,
}

impl DrvCounts {
    pub fn total(&self) -> u64 {
        self.open + self.short + self.spacing + self.min_area
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    /// Routed wirelength in DBU.
    pub wirelength: u64,
    pub via_count: u64,
    pub drv: DrvCounts,
    /// Wall-clock seconds; zero where timing is not measured.
    pub runtime_secs: f64,
}

impl MetricsSnapshot {
    pub fn drv_count(&self) -> u64 {
        self.drv.total()
    }

    /// Cost under the default weights.
    pub fn cost_half_units(&self) -> HalfUnits {
        cost(self, &CostWeights::default())
    }

    /// Same routing outcome, ignoring runtime.
    pub fn same_outcome(&self, other: &MetricsSnapshot) -> bool {
        self.wirelength == other.wirelength && self.via_count == other.via_count && self.drv == other.drv
    }
}

pub fn cost(s: &MetricsSnapshot, w: &CostWeights) -> HalfUnits {
    let total = w.wirelength * s.wirelength + w.via * s.via_count + w.drv * s.drv_count();
    HalfUnits(total as i64)
}

/// Reward of one ordering step: how much the chosen net lowered the cost.
pub fn ordering_reward(before: &MetricsSnapshot, after: &MetricsSnapshot, w: &CostWeights) -> HalfUnits {
    cost(before, w) - cost(after, w)
}

/// Reward of one routing move. A move that completes the net earns its
/// HPWL (given in DBU); any other move pays for the cost it adds.
pub fn routing_reward(
    before: &MetricsSnapshot,
    after: &MetricsSnapshot,
    completes_net: bool,
    net_hpwl: u64,
    w: &CostWeights,
) -> HalfUnits {
    if completes_net {
        HalfUnits::from_real_units(net_hpwl as i64)
    } else {
        cost(before, w) - cost(after, w)
    }
}

/// Half-perimeter of the bounding box of `pins`.
pub fn hpwl(pins: &[(i64, i64)]) -> Result<u64, MetricsError> {
    let (&(x0, y0), rest) = pins.split_first().ok_or(MetricsError::NoPins)?;
    let (mut lx, mut hx, mut ly, mut hy) = (x0, x0, y0, y0);
    for &(x, y) in rest {
        lx = lx.min(x);
        hx = hx.max(x);
        ly = ly.min(y);
        hy = hy.max(y);
    }
    Ok((hx - lx) as u64 + (hy - ly) as u64)
}

/// HPWL of a net whose pins may each offer several access points.
///
/// Per axis this is the gap between the largest per-pin minimum and the
/// smallest per-pin maximum, which bounds the extent of any tree touching
/// one access point of every pin. With one access point per pin it is the
/// plain bounding-box HPWL.
pub fn net_hpwl(pins: &[Vec<(i64, i64)>]) -> Result<u64, MetricsError> {
    if pins.is_empty() || pins.iter().any(|p| p.is_empty()) {
        return Err(MetricsError::NoPins);
    }
    let axis = |get: fn(&(i64, i64)) -> i64| {
        let mut max_lo = i64::MIN;
        let mut min_hi = i64::MAX;
        for pin in pins {
            let lo = pin.iter().map(get).min().unwrap();
            let hi = pin.iter().map(get).max().unwrap();
            max_lo = max_lo.max(lo);
            min_hi = min_hi.min(hi);
        }
        (max_lo - min_hi).max(0) as u64
    };
    Ok(axis(|p| p.0) + axis(|p| p.1))
}

/// Lower bound on the cumulative reward of one net-routing episode.
pub fn t_min(net_hpwl: u64, pin_count: usize) -> HalfUnits {
    -HalfUnits::from_real_units(net_hpwl as i64 * pin_count as i64)
}

pub fn discounted_return(rewards: &[f64], gamma: f64) -> Result<f64, MetricsError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(MetricsError::BadGamma(gamma));
    }
    let mut discount = 1.0;
    let mut total = 0.0;
    for r in rewards {
        total += discount * r;
        discount *= gamma;
    }
    Ok(total)
}
