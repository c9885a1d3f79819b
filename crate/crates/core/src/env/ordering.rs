use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EnvConfig, EnvError, Mode, OrderingObservation, Transition};
use crate::design_io::RegionDescriptor;
use crate::drc::{self, DrcReport};
use crate::grid::{GridGraph, NetId};
use crate::metrics::{self, HalfUnits, MetricsSnapshot};
use crate::router::{self, RoutedNet, SearchOptions};

/// Net-ordering episode: each action names the next net for the built-in
/// router; the reward is the resulting drop in total cost.
#[derive(Debug, Clone)]
pub struct OrderingEpisode {
    region: RegionDescriptor,
    grid: GridGraph,
    config: EnvConfig,
    mode: Mode,
    seed: u64,
    rng: ChaCha8Rng,
    remaining: BTreeSet<NetId>,
    routed: BTreeMap<NetId, RoutedNet>,
    order: Vec<NetId>,
    initial: MetricsSnapshot,
    snapshot: MetricsSnapshot,
    report: DrcReport,
}

impl OrderingEpisode {
    pub fn reset(
        region: RegionDescriptor,
        mode: Mode,
        seed: u64,
        config: EnvConfig,
    ) -> Result<(Self, OrderingObservation), EnvError> {
        region.validate()?;
        let grid = GridGraph::from_region(&region)?;
        let remaining = region.net_ids().into_iter().collect();
        let mut ep = Self {
            region,
            grid,
            config,
            mode,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            remaining,
            routed: BTreeMap::new(),
            order: Vec::new(),
            initial: MetricsSnapshot::default(),
            snapshot: MetricsSnapshot::default(),
            report: DrcReport::default(),
        };
        // A region without nets ends immediately; its snapshot is still
        // whatever the checks find on the bare grid.
        ep.refresh();
        ep.initial = ep.snapshot;
        let obs = ep.observe();
        Ok((ep, obs))
    }

    pub fn step(&mut self, net: NetId) -> Result<Transition<OrderingObservation>, EnvError> {
        if self.is_done() {
            return Err(EnvError::EpisodeDone);
        }
        if !self.remaining.contains(&net) {
            return Err(EnvError::IllegalAction(net));
        }
        let spec = self.region.net(net).ok_or(EnvError::UnknownNet(net))?.clone();
        let before = self.snapshot;
        let routed = router::route_net(&mut self.grid, &spec, &SearchOptions::new(self.config.weights))?;
        self.remaining.remove(&net);
        self.routed.insert(net, routed);
        self.order.push(net);
        self.refresh();
        let reward = metrics::ordering_reward(&before, &self.snapshot, &self.config.weights);
        Ok(Transition {
            observation: self.observe(),
            reward,
            done: self.is_done(),
        })
    }

    fn refresh(&mut self) {
        let done = self.remaining.is_empty();
        self.report = drc::check_all(&self.grid, self.routed.values(), &self.config.rules, done);
        self.snapshot = MetricsSnapshot {
            wirelength: self.routed.values().map(RoutedNet::wirelength).sum(),
            via_count: self.routed.values().map(RoutedNet::via_count).sum(),
            drv: self.report.counts(),
            runtime_secs: 0.0,
        };
    }

    pub fn observe(&self) -> OrderingObservation {
        OrderingObservation::build(&self.grid, &self.remaining)
    }

    /// Uniform draw from the remaining nets, seeded by the episode seed.
    pub fn sample_action(&mut self) -> Option<NetId> {
        self.remaining.iter().copied().choose(&mut self.rng)
    }

    pub fn is_done(&self) -> bool {
        self.remaining.is_empty()
    }

    pub fn remaining(&self) -> &BTreeSet<NetId> {
        &self.remaining
    }

    pub fn routed(&self) -> &BTreeMap<NetId, RoutedNet> {
        &self.routed
    }

    /// Nets in the order they were routed.
    pub fn order(&self) -> &[NetId] {
        &self.order
    }

    pub fn snapshot(&self) -> MetricsSnapshot {
        self.snapshot
    }

    pub fn initial_snapshot(&self) -> MetricsSnapshot {
        self.initial
    }

    pub fn report(&self) -> &DrcReport {
        &self.report
    }

    pub fn grid(&self) -> &GridGraph {
        &self.grid
    }

    pub fn region(&self) -> &RegionDescriptor {
        &self.region
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cost(&self) -> HalfUnits {
        metrics::cost(&self.snapshot, &self.config.weights)
    }
}

/// Routes every net of `region` in `order` and returns the final snapshot.
pub fn evaluate_order(region: &RegionDescriptor, order: &[NetId], config: EnvConfig) -> Result<MetricsSnapshot, EnvError> {
    let (mut ep, _) = OrderingEpisode::reset(region.clone(), Mode::Validator, 0, config)?;
    for &net in order {
        ep.step(net)?;
    }
    if !ep.is_done() {
        let missing = *ep.remaining().iter().next().expect("not done");
        return Err(EnvError::IllegalAction(missing));
    }
    Ok(ep.snapshot())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design_io::{generate_region, parse_region, GeneratorParams};

    fn region(text: &str) -> RegionDescriptor {
        parse_region(text.as_bytes()).unwrap()
    }

    #[test]
    fn reset_exposes_all_nets() {
        let r = generate_region(3, &GeneratorParams {
            net_count: 3,
            ..Default::default()
        })
        .unwrap();
        let (ep, obs) = OrderingEpisode::reset(r.clone(), Mode::Trainer, 5, EnvConfig::default()).unwrap();
        assert_eq!(obs.actions, vec![0, 1, 2]);
        assert_eq!(obs.nets.len(), 3);
        assert!(obs.nets.iter().all(|n| n.channels.len() == 7));
        let (_, again) = OrderingEpisode::reset(r, Mode::Trainer, 5, EnvConfig::default()).unwrap();
        assert_eq!(obs, again);
        assert!(!ep.is_done());
    }

    #[test]
    fn empty_region_is_terminal() {
        let (ep, obs) = OrderingEpisode::reset(region("region e\ndim 2 2 1\n"), Mode::Trainer, 0, EnvConfig::default())
            .unwrap();
        assert!(ep.is_done());
        assert!(obs.actions.is_empty());
    }

    #[test]
    fn step_reward_matches_cost_delta() {
        // 4 DBU of wire and one via: 0.5 * 4 + 4 * 1 = 6.
        let r = region("region s\ndim 5 1 2\npitch 1 1\nnet 0\npin 0 ap 0 0 0\npin 1 ap 4 0 1\nend\n");
        let (mut ep, _) = OrderingEpisode::reset(r, Mode::Trainer, 0, EnvConfig::default()).unwrap();
        let t = ep.step(0).unwrap();
        assert!(t.done);
        assert_eq!(t.reward.real(), -6.0);
        assert!(ep.sample_action().is_none());
    }

    #[test]
    fn illegal_action_leaves_state_alone() {
        let r = generate_region(8, &GeneratorParams::default()).unwrap();
        let (mut ep, obs) = OrderingEpisode::reset(r, Mode::Trainer, 0, EnvConfig::default()).unwrap();
        assert_eq!(ep.step(99), Err(EnvError::IllegalAction(99)));
        assert_eq!(ep.observe(), obs);
        ep.step(1).unwrap();
        assert_eq!(ep.step(1), Err(EnvError::IllegalAction(1)));
    }

    #[test]
    fn obstacle_channel_marks_routed_wiring() {
        let r = region("region o\ndim 3 3 1\nnet 0\npin 0 ap 0 0 0\npin 1 ap 2 0 0\nend\nnet 1\npin 0 ap 0 2 0\npin 1 ap 2 2 0\nend\n");
        let (mut ep, obs) = OrderingEpisode::reset(r, Mode::Trainer, 0, EnvConfig::default()).unwrap();
        assert_eq!(obs.obstacle.count_ones(), 0);
        let t = ep.step(0).unwrap();
        let path = &ep.routed()[&0].paths[0];
        for &n in path.nodes() {
            assert_eq!(t.observation.obstacle.get(n), 1);
        }
        assert_eq!(t.observation.obstacle.count_ones(), path.nodes().len());
        assert_eq!(t.observation.actions, vec![1]);
    }

    #[test]
    fn same_pin_neighbor_features() {
        let r = region("region p\ndim 3 3 1\nnet 0\npin 0 ap 0 1 0 ap 1 1 0\npin 1 ap 2 2 0\nend\n");
        let (_, obs) = OrderingEpisode::reset(r, Mode::Trainer, 0, EnvConfig::default()).unwrap();
        let ch = &obs.nets[0].channels;
        let east = 1 + crate::grid::Direction::East.index();
        let west = 1 + crate::grid::Direction::West.index();
        use crate::grid::MazeIndex;
        assert_eq!(ch[east].get(MazeIndex::new(0, 1, 0)), 1);
        assert_eq!(ch[west].get(MazeIndex::new(1, 1, 0)), 1);
        assert_eq!(ch[east].count_ones() + ch[west].count_ones(), 2);
        // The lone pin has no same-pin neighbors.
        for c in &ch[1..] {
            assert_eq!(c.get(MazeIndex::new(2, 2, 0)), 0);
        }
        assert_eq!(ch[0].count_ones(), 3);
    }
}
