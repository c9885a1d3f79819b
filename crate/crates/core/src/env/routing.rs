use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EnvConfig, EnvError, RoutingObservation, Transition};
use crate::design_io::{NetSpec, RegionDescriptor};
use crate::drc;
use crate::grid::{Direction, GridGraph, MazeIndex, NetId, Passage, PinId};
use crate::metrics::{self, DrvCounts, HalfUnits, MetricsSnapshot};
use crate::router::{Path, RoutedNet};

/// Move `steps` unit edges in `direction`, optionally from another node
/// of the current tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingAction {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<MazeIndex>,
    pub direction: Direction,
    #[serde(default = "one")]
    pub steps: u32,
}

fn one() -> u32 {
    1
}

impl RoutingAction {
    pub fn new(direction: Direction) -> Self {
        Self {
            start: None,
            direction,
            steps: 1,
        }
    }

    pub fn from_index(d: u8) -> Result<Self, EnvError> {
        Direction::from_index(d).map(Self::new).ok_or(EnvError::BadDirection(d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingStatus {
    Running,
    Completed,
    Illegal,
    Truncated,
}

/// Single-net routing episode driven one lattice move at a time.
///
/// Every committed move is charged, backtracks included, so the cumulative
/// reward of a running episode is minus the cost added so far.
#[derive(Debug, Clone)]
pub struct RoutingEpisode {
    grid: GridGraph,
    net: NetSpec,
    config: EnvConfig,
    seed: u64,
    rng: ChaCha8Rng,
    hpwl: u64,
    t_min: HalfUnits,
    head: MazeIndex,
    tree: BTreeSet<MazeIndex>,
    edges: BTreeSet<(MazeIndex, MazeIndex)>,
    connected: BTreeSet<PinId>,
    wirelength: u64,
    via_count: u64,
    drv: DrvCounts,
    cumulative: HalfUnits,
    status: RoutingStatus,
    steps: u64,
}

impl RoutingEpisode {
    pub fn reset(
        region: &RegionDescriptor,
        net: NetId,
        seed: u64,
        config: EnvConfig,
    ) -> Result<(Self, RoutingObservation), EnvError> {
        region.validate()?;
        let grid = GridGraph::from_region(region)?;
        Self::on_grid(grid, region, net, seed, config)
    }

    /// Starts an episode on a grid that may already carry other nets.
    pub fn on_grid(
        mut grid: GridGraph,
        region: &RegionDescriptor,
        net: NetId,
        seed: u64,
        config: EnvConfig,
    ) -> Result<(Self, RoutingObservation), EnvError> {
        let spec = region.net(net).ok_or(EnvError::UnknownNet(net))?.clone();
        let first = spec.pins.first().ok_or(EnvError::UnknownNet(net))?;
        let head = first.access_points[0];
        let hpwl = region.net_hpwl(&spec);
        grid.occupy_path(net, &[head])?;
        let mut connected = BTreeSet::new();
        connected.insert(first.id);
        let status = if spec.pins.len() == 1 {
            RoutingStatus::Completed
        } else {
            RoutingStatus::Running
        };
        let mut ep = Self {
            grid,
            t_min: metrics::t_min(hpwl, spec.pin_count()),
            net: spec,
            config,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            hpwl,
            head,
            tree: BTreeSet::from([head]),
            edges: BTreeSet::new(),
            connected,
            wirelength: 0,
            via_count: 0,
            drv: DrvCounts::default(),
            cumulative: HalfUnits::ZERO,
            status,
            steps: 0,
        };
        ep.drv = ep.current_drv();
        let obs = ep.observe();
        Ok((ep, obs))
    }

    fn current_drv(&self) -> DrvCounts {
        let routed = self.routed_net();
        drc::check_all(&self.grid, [&routed], &self.config.rules, false).counts()
    }

    fn partial(&self) -> MetricsSnapshot {
        MetricsSnapshot {
            wirelength: self.wirelength,
            via_count: self.via_count,
            drv: self.drv,
            runtime_secs: 0.0,
        }
    }

    /// Nearest unconnected pin by lattice L1 from the head, ties to the
    /// lowest pin id, and within it the nearest access point, ties to the
    /// lowest linear index.
    pub fn target(&self) -> Option<MazeIndex> {
        let dim = self.grid.dim();
        self.net
            .pins
            .iter()
            .filter(|p| !self.connected.contains(&p.id))
            .filter_map(|p| {
                p.access_points
                    .iter()
                    .map(|&ap| (self.head.lattice_distance(ap), dim.linear(ap), ap))
                    .min()
                    .map(|(d, lin, ap)| (d, p.id, lin, ap))
            })
            .min()
            .map(|(_, _, _, ap)| ap)
    }

    pub fn observe(&self) -> RoutingObservation {
        RoutingObservation::build(&self.grid, self.net.id, self.head, self.target(), &self.config.weights)
    }

    pub fn step(&mut self, action: RoutingAction) -> Result<Transition<RoutingObservation>, EnvError> {
        if self.is_done() {
            return Err(EnvError::EpisodeDone);
        }
        self.steps += 1;
        let mut reward = HalfUnits::ZERO;
        if let Some(s) = action.start {
            if self.tree.contains(&s) {
                self.head = s;
            } else {
                self.status = RoutingStatus::Illegal;
            }
        }
        for _ in 0..action.steps {
            if self.is_done() {
                break;
            }
            reward += self.unit_move(action.direction)?;
        }
        Ok(Transition {
            observation: self.observe(),
            reward,
            done: self.is_done(),
        })
    }

    fn unit_move(&mut self, d: Direction) -> Result<HalfUnits, EnvError> {
        let next = match self.grid.dim().step(self.head, d) {
            Some(n) if self.grid.passage(n, Some(self.net.id)) == Passage::Free => n,
            _ => {
                self.status = RoutingStatus::Illegal;
                return Ok(HalfUnits::ZERO);
            }
        };
        let before = self.partial();
        let saved = (self.grid.clone(), self.tree.clone(), self.edges.clone(), self.connected.clone(), self.drv);

        self.grid.occupy_path(self.net.id, &[next])?;
        self.tree.insert(next);
        self.edges.insert((self.head.min(next), self.head.max(next)));
        if d.is_via() {
            self.via_count += 1;
        } else {
            self.wirelength += self.grid.pitch().length(d);
        }
        self.drv = self.current_drv();
        let newly: Vec<PinId> = self
            .net
            .pins
            .iter()
            .filter(|p| !self.connected.contains(&p.id) && p.access_points.contains(&next))
            .map(|p| p.id)
            .collect();
        self.connected.extend(newly);
        let completes = self.connected.len() == self.net.pins.len();
        let r = metrics::routing_reward(&before, &self.partial(), completes, self.hpwl, &self.config.weights);

        if completes {
            self.head = next;
            self.cumulative += r;
            self.status = RoutingStatus::Completed;
            return Ok(r);
        }
        if self.cumulative + r <= self.t_min {
            // Reaching the bound ends the episode there; the move is dropped.
            (self.grid, self.tree, self.edges, self.connected, self.drv) = saved;
            self.wirelength = before.wirelength;
            self.via_count = before.via_count;
            let clamped = self.t_min - self.cumulative;
            self.cumulative = self.t_min;
            self.status = RoutingStatus::Truncated;
            return Ok(clamped);
        }
        self.head = next;
        self.cumulative += r;
        Ok(r)
    }

    /// A uniformly random single-step move, seeded by the episode seed.
    pub fn sample_action(&mut self) -> RoutingAction {
        let d = self.rng.gen_range(0..6u8);
        RoutingAction::from_index(d).expect("in range")
    }

    /// The wiring placed so far, one path per distinct edge.
    pub fn routed_net(&self) -> RoutedNet {
        let pitch = self.grid.pitch();
        let paths = self
            .edges
            .iter()
            .map(|&(a, b)| Path::new(vec![a, b], pitch).expect("lattice edge"))
            .collect();
        let unconnected = self
            .net
            .pins
            .iter()
            .map(|p| p.id)
            .filter(|id| !self.connected.contains(id))
            .collect();
        RoutedNet {
            net: self.net.id,
            paths,
            connected: self.connected.iter().copied().collect(),
            unconnected,
        }
    }

    /// Charged wirelength and vias; an unfinished net counts as one open
    /// once the episode has ended.
    pub fn snapshot(&self) -> MetricsSnapshot {
        let mut s = self.partial();
        if self.is_done() && self.status != RoutingStatus::Completed {
            s.drv.open += 1;
        }
        s
    }

    pub fn status(&self) -> RoutingStatus {
        self.status
    }

    pub fn is_done(&self) -> bool {
        self.status != RoutingStatus::Running
    }

    pub fn head(&self) -> MazeIndex {
        self.head
    }

    pub fn connected(&self) -> &BTreeSet<PinId> {
        &self.connected
    }

    pub fn tree(&self) -> &BTreeSet<MazeIndex> {
        &self.tree
    }

    pub fn grid(&self) -> &GridGraph {
        &self.grid
    }

    pub fn into_grid(self) -> GridGraph {
        self.grid
    }

    pub fn net(&self) -> NetId {
        self.net.id
    }

    pub fn hpwl(&self) -> u64 {
        self.hpwl
    }

    pub fn cumulative(&self) -> HalfUnits {
        self.cumulative
    }

    pub fn t_min(&self) -> HalfUnits {
        self.t_min
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_count(&self) -> u64 {
        self.steps
    }
}
