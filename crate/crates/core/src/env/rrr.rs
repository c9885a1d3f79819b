use std::collections::BTreeMap;
use std::time::Instant;

use super::{EnvConfig, EnvError};
use crate::design_io::RegionDescriptor;
use crate::drc::{self, DrcReport};
use crate::grid::{Direction, GridGraph, NetId};
use crate::heuristics::OrderingPolicy;
use crate::metrics::{self, MetricsSnapshot};
use crate::router::{self, RoutedNet, SearchOptions};

/// Upper bound on rip-up-and-reroute rounds.
pub const MAX_RRR_ITERATIONS: u32 = 65;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrrConfig {
    pub env: EnvConfig,
    /// Extra cost for entering a node another net holds.
    pub overlap_penalty: u64,
    /// History cost added to every edge of a violating node per round.
    pub history_increment: u32,
    /// Fill `runtime_secs`; off keeps snapshots bit-reproducible.
    pub measure_runtime: bool,
}

impl Default for RrrConfig {
    fn default() -> Self {
        let env = EnvConfig::default();
        Self {
            overlap_penalty: env.weights.drv,
            env,
            history_increment: 2,
            measure_runtime: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RrrOutcome {
    /// Initial routing, then the best routing after each round: `iterations + 1` in all.
    pub snapshots: Vec<MetricsSnapshot>,
    pub routed: BTreeMap<NetId, RoutedNet>,
    pub grid: GridGraph,
    pub report: DrcReport,
}

impl RrrOutcome {
    pub fn final_snapshot(&self) -> MetricsSnapshot {
        *self.snapshots.last().expect("at least the initial routing")
    }
}

fn snapshot(routed: &BTreeMap<NetId, RoutedNet>, report: &DrcReport, started: Option<Instant>) -> MetricsSnapshot {
    MetricsSnapshot {
        wirelength: routed.values().map(RoutedNet::wirelength).sum(),
        via_count: routed.values().map(RoutedNet::via_count).sum(),
        drv: report.counts(),
        runtime_secs: started.map_or(0.0, |t| t.elapsed().as_secs_f64()),
    }
}

/// Routes every net in policy order with overlaps allowed, then runs
/// `iterations` rounds that rip up every net involved in a violation,
/// raise history cost around each violating node and reroute those nets
/// in policy order. Each snapshot and the outcome describe the cheapest
/// routing found so far; a clean round repeats the previous snapshot.
pub fn rrr_iterate(
    region: &RegionDescriptor,
    policy: &OrderingPolicy,
    iterations: u32,
    config: &RrrConfig,
) -> Result<RrrOutcome, EnvError> {
    if !(1..=MAX_RRR_ITERATIONS).contains(&iterations) {
        return Err(EnvError::InvalidIterations(iterations));
    }
    region.validate()?;
    let started = config.measure_runtime.then(Instant::now);
    let mut grid = GridGraph::from_region(region)?;
    let order = policy.order(region);
    let opts = SearchOptions::new(config.env.weights).permissive(config.overlap_penalty);
    let rules = &config.env.rules;

    let mut routed = BTreeMap::new();
    for &net in &order {
        let spec = region.net(net).ok_or(EnvError::UnknownNet(net))?;
        routed.insert(net, router::route_net(&mut grid, spec, &opts)?);
    }
    let mut report = drc::check_all(&grid, routed.values(), rules, true);
    let mut snapshots = vec![snapshot(&routed, &report, started)];
    // The search continues from each round; the cheapest state seen is kept.
    let w = &config.env.weights;
    let mut best = (grid.clone(), routed.clone(), report.clone(), snapshots[0]);

    for _ in 0..iterations {
        if report.is_clean() || best.2.is_clean() {
            let mut s = *snapshots.last().expect("non-empty");
            s.runtime_secs = started.map_or(0.0, |t| t.elapsed().as_secs_f64());
            snapshots.push(s);
            continue;
        }
        let ripped = report.implicated_nets(&grid);
        for v in &report.violations {
            for n in v.location.nodes() {
                for d in Direction::ALL {
                    if grid.dim().step(n, d).is_some() {
                        grid.add_history_cost(n, d, config.history_increment)?;
                    }
                }
            }
        }
        for net in &ripped {
            if let Some(r) = routed.remove(net) {
                router::ripup(&mut grid, &r);
            }
        }
        for &net in order.iter().filter(|n| ripped.contains(n)) {
            let spec = region.net(net).ok_or(EnvError::UnknownNet(net))?;
            routed.insert(net, router::route_net(&mut grid, spec, &opts)?);
        }
        report = drc::check_all(&grid, routed.values(), rules, true);
        let round = snapshot(&routed, &report, started);
        if metrics::cost(&round, w) < metrics::cost(&best.3, w) {
            best = (grid.clone(), routed.clone(), report.clone(), round);
        }
        snapshots.push(MetricsSnapshot {
            runtime_secs: round.runtime_secs,
            ..best.3
        });
    }
    let (grid, routed, report, _) = best;
    Ok(RrrOutcome {
        snapshots,
        routed,
        grid,
        report,
    })
}
