//! Scripted net-ordering policies and the brute-force ordering oracle.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::design_io::RegionDescriptor;
use crate::env::{evaluate_order, EnvConfig, EnvError};
use crate::grid::NetId;
use crate::metrics::{self, MetricsSnapshot};

/// Largest region the exhaustive oracle accepts.
pub const MAX_EXHAUSTIVE_NETS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("no nets remain")]
    Empty,
    #[error("exhaustive search is limited to {max} nets, region has {0}", max = MAX_EXHAUSTIVE_NETS)]
    TooManyNets(usize),
    #[error("unknown policy `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OrderingPolicy {
    /// Lowest net id first.
    Fifo,
    MostPinsFirst,
    /// Smallest bounding box over all access points first.
    MinHpwlFirst,
    /// A seeded permutation of all nets, fixed per region.
    Random(u64),
    /// The listed nets in order, then any others by id.
    Explicit(Vec<NetId>),
}

impl OrderingPolicy {
    /// The remaining net this policy routes next; ties go to the lowest id.
    pub fn next_net(&self, remaining: &BTreeSet<NetId>, region: &RegionDescriptor) -> Result<NetId, PolicyError> {
        let lowest = *remaining.first().ok_or(PolicyError::Empty)?;
        let key_min = |key: &dyn Fn(NetId) -> i64| {
            remaining
                .iter()
                .copied()
                .min_by_key(|&n| (key(n), n))
                .expect("non-empty")
        };
        Ok(match self {
            OrderingPolicy::Fifo => lowest,
            OrderingPolicy::MostPinsFirst => {
                key_min(&|n| -(region.net(n).map_or(0, |s| s.pin_count()) as i64))
            }
            OrderingPolicy::MinHpwlFirst => key_min(&|n| access_hpwl(region, n) as i64),
            OrderingPolicy::Random(seed) => {
                let perm = random_permutation(*seed, region);
                perm.into_iter().find(|n| remaining.contains(n)).unwrap_or(lowest)
            }
            OrderingPolicy::Explicit(list) => list.iter().copied().find(|n| remaining.contains(n)).unwrap_or(lowest),
        })
    }

    /// Full routing order for `region`.
    pub fn order(&self, region: &RegionDescriptor) -> Vec<NetId> {
        let mut remaining: BTreeSet<NetId> = region.net_ids().into_iter().collect();
        let mut out = Vec::with_capacity(remaining.len());
        if let OrderingPolicy::Random(seed) = self {
            return random_permutation(*seed, region);
        }
        while let Ok(n) = self.next_net(&remaining, region) {
            remaining.remove(&n);
            out.push(n);
        }
        out
    }

    pub fn name(&self) -> String {
        match self {
            OrderingPolicy::Fifo => "fifo".into(),
            OrderingPolicy::MostPinsFirst => "most-pins".into(),
            OrderingPolicy::MinHpwlFirst => "min-hpwl".into(),
            OrderingPolicy::Random(seed) => format!("random:{seed}"),
            OrderingPolicy::Explicit(list) => format!("explicit:{}", list.iter().join(",")),
        }
    }
}

impl fmt::Display for OrderingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for OrderingPolicy {
    type Err = PolicyError;

    /// Accepts `fifo`, `most-pins`, `min-hpwl`, `random`, `random:SEED`
    /// and `explicit:ID,ID,...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || PolicyError::Unknown(s.to_string());
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head.to_ascii_lowercase().replace('_', "-").as_str(), arg) {
            ("fifo", None) => Ok(OrderingPolicy::Fifo),
            ("most-pins" | "most-pins-first", None) => Ok(OrderingPolicy::MostPinsFirst),
            ("min-hpwl" | "min-hpwl-first", None) => Ok(OrderingPolicy::MinHpwlFirst),
            ("random", None) => Ok(OrderingPolicy::Random(0)),
            ("random", Some(a)) => a.parse().map(OrderingPolicy::Random).map_err(|_| unknown()),
            ("explicit", Some(a)) => a
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| t.trim().parse::<NetId>())
                .collect::<Result<Vec<_>, _>>()
                .map(OrderingPolicy::Explicit)
                .map_err(|_| unknown()),
            _ => Err(unknown()),
        }
    }
}

fn access_hpwl(region: &RegionDescriptor, net: NetId) -> u64 {
    let Some(spec) = region.net(net) else { return 0 };
    let points: Vec<(i64, i64)> = spec.access_points().map(|ap| region.point_of(ap.maze_index)).collect();
    metrics::hpwl(&points).unwrap_or(0)
}

fn random_permutation(seed: u64, region: &RegionDescriptor) -> Vec<NetId> {
    let mut ids = region.net_ids();
    ids.sort_unstable();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ids
}

/// Routes every permutation of the region's nets and returns the cheapest,
/// ties to the lexicographically first.
pub fn exhaustive_best_order(
    region: &RegionDescriptor,
    config: EnvConfig,
) -> Result<(Vec<NetId>, MetricsSnapshot), PolicyError> {
    let mut ids = region.net_ids();
    ids.sort_unstable();
    if ids.len() > MAX_EXHAUSTIVE_NETS {
        return Err(PolicyError::TooManyNets(ids.len()));
    }
    let orders: Vec<Vec<NetId>> = ids.iter().copied().permutations(ids.len()).collect();
    let scored = orders
        .par_iter()
        .enumerate()
        .map(|(i, order)| {
            let snap = evaluate_order(region, order, config)?;
            Ok((metrics::cost(&snap, &config.weights), i, snap))
        })
        .collect::<Result<Vec<_>, EnvError>>()?;
    let (_, i, snap) = scored
        .into_iter()
        .min_by_key(|&(c, i, _)| (c, i))
        .expect("at least the empty ordering");
    Ok((orders[i].clone(), snap))
}
