//! The 3D routing lattice.
//!
//! Nodes sit on track crosspoints indexed by a zero-based maze index
//! `(x, y, z)`. Every node carries a type, an occupancy list of the nets
//! whose wiring passes through it, and six per-direction base costs. The
//! effective cost of a directed edge is the geometric cost under the active
//! [`CostWeights`], plus the larger of the two endpoint-facing base costs,
//! plus the accumulated history penalty on that edge.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design_io::RegionDescriptor;
use crate::metrics::CostWeights;

pub type NetId = u32;
pub type PinId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("invalid dimension {0}x{1}x{2}: every axis needs at least one line")]
    InvalidDim(u32, u32, u32),
    #[error("dimension mismatch: {dim} expects {expected} nodes, node table has {found}")]
    DimensionMismatch {
        dim: GridDim,
        expected: usize,
        found: usize,
    },
    #[error("duplicate maze index {0}")]
    DuplicateIndex(MazeIndex),
    #[error("ACCESS node {0} is missing its net or pin id")]
    AccessMissingNet(MazeIndex),
    #[error("non-ACCESS node {0} carries a net or pin id")]
    UnexpectedOwner(MazeIndex),
    #[error("maze index {0} is out of bounds for {1}")]
    OutOfBounds(MazeIndex, GridDim),
    #[error("no edge leaves {0} towards {1:?}")]
    NoEdge(MazeIndex, Direction),
    #[error("node {0} is an access point and cannot be blocked")]
    BlockAccess(MazeIndex),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDim {
    pub dx: u32,
    pub dy: u32,
    pub dz: u32,
}

impl GridDim {
    pub fn new(dx: u32, dy: u32, dz: u32) -> Result<Self, GridError> {
        if dx == 0 || dy == 0 || dz == 0 {
            return Err(GridError::InvalidDim(dx, dy, dz));
        }
        Ok(Self { dx, dy, dz })
    }

    pub fn node_count(&self) -> usize {
        self.dx as usize * self.dy as usize * self.dz as usize
    }

    pub fn contains(&self, idx: MazeIndex) -> bool {
        idx.x < self.dx && idx.y < self.dy && idx.z < self.dz
    }

    /// Linearized position, x fastest, then y, then z.
    pub fn linear(&self, idx: MazeIndex) -> usize {
        idx.x as usize + self.dx as usize * (idx.y as usize + self.dy as usize * idx.z as usize)
    }

    pub fn from_linear(&self, i: usize) -> MazeIndex {
        let dx = self.dx as usize;
        let dy = self.dy as usize;
        MazeIndex::new((i % dx) as u32, ((i / dx) % dy) as u32, (i / (dx * dy)) as u32)
    }

    /// The neighbor of `idx` in direction `d`, if it lies inside the lattice.
    pub fn step(&self, idx: MazeIndex, d: Direction) -> Option<MazeIndex> {
        let (ddx, ddy, ddz) = d.delta();
        let x = idx.x.checked_add_signed(ddx)?;
        let y = idx.y.checked_add_signed(ddy)?;
        let z = idx.z.checked_add_signed(ddz)?;
        let next = MazeIndex::new(x, y, z);
        self.contains(next).then_some(next)
    }

    pub fn indices(&self) -> impl Iterator<Item = MazeIndex> + '_ {
        (0..self.node_count()).map(|i| self.from_linear(i))
    }
}

impl fmt::Display for GridDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.dx, self.dy, self.dz)
    }
}

/// Zero-based lattice coordinates. Serializes as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 3]", into = "[u32; 3]")]
pub struct MazeIndex {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl MazeIndex {
    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Self { x, y, z }
    }

    /// L1 distance in lattice steps.
    pub fn lattice_distance(&self, other: MazeIndex) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y) + self.z.abs_diff(other.z)
    }
}

impl From<[u32; 3]> for MazeIndex {
    fn from(a: [u32; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<MazeIndex> for [u32; 3] {
    fn from(m: MazeIndex) -> Self {
        [m.x, m.y, m.z]
    }
}

impl fmt::Display for MazeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// The six lattice directions, indexed 0..5 in cost-tuple order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Up = 0,
    Down = 1,
    North = 2,
    South = 3,
    East = 4,
    West = 5,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::Up,
        Direction::Down,
        Direction::North,
        Direction::South,
        Direction::East,
        Direction::West,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: u8) -> Option<Direction> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::North => Direction::South,
            Direction::South => Direction::North,
            Direction::East => Direction::West,
            Direction::West => Direction::East,
        }
    }

    pub fn delta(self) -> (i32, i32, i32) {
        match self {
            Direction::Up => (0, 0, 1),
            Direction::Down => (0, 0, -1),
            Direction::North => (0, 1, 0),
            Direction::South => (0, -1, 0),
            Direction::East => (1, 0, 0),
            Direction::West => (-1, 0, 0),
        }
    }

    pub fn is_via(self) -> bool {
        matches!(self, Direction::Up | Direction::Down)
    }

    /// Direction leading from `a` to the adjacent node `b`, if they are neighbors.
    pub fn between(a: MazeIndex, b: MazeIndex) -> Option<Direction> {
        let d = (
            b.x as i64 - a.x as i64,
            b.y as i64 - a.y as i64,
            b.z as i64 - a.z as i64,
        );
        Self::ALL.into_iter().find(|dir| {
            let (x, y, z) = dir.delta();
            (x as i64, y as i64, z as i64) == d
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeType {
    NotExist,
    Blockage,
    Normal,
    Access,
}

impl NodeType {
    pub fn is_traversable(self) -> bool {
        matches!(self, NodeType::Normal | NodeType::Access)
    }
}

/// Per-axis track pitch in DBU. Layers are one unit apart in `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pitch {
    pub x: u32,
    pub y: u32,
}

impl Default for Pitch {
    fn default() -> Self {
        Self { x: 1, y: 1 }
    }
}

impl Pitch {
    /// DBU length of one step in direction `d`; vias have no planar length.
    pub fn length(&self, d: Direction) -> u64 {
        match d {
            Direction::North | Direction::South => self.y as u64,
            Direction::East | Direction::West => self.x as u64,
            Direction::Up | Direction::Down => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub maze_index: MazeIndex,
    pub point: Point3,
    pub node_type: NodeType,
    pub usage: bool,
    pub net: Option<NetId>,
    pub pin: Option<PinId>,
    /// Base traversal cost per direction, ordered as [`Direction::ALL`].
    pub cost: [u32; 6],
}

/// One row of a node table, the raw input of [`GridGraph::from_nodes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSpec {
    pub maze_index: MazeIndex,
    pub node_type: NodeType,
    pub net: Option<NetId>,
    pub pin: Option<PinId>,
}

impl NodeSpec {
    pub fn normal(maze_index: MazeIndex) -> Self {
        Self {
            maze_index,
            node_type: NodeType::Normal,
            net: None,
            pin: None,
        }
    }
}

/// How a node may be entered by a given net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Passage {
    Free,
    /// Claimed by another net; only crossable in permissive mode.
    Overlap,
    Blocked,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGraph {
    dim: GridDim,
    origin: (i64, i64),
    pitch: Pitch,
    nodes: Vec<Node>,
    occupants: Vec<Vec<NetId>>,
    history: Vec<[u32; 6]>,
}

impl GridGraph {
    /// Builds the lattice for a region: blockages and access points are
    /// stamped over an all-NORMAL node table.
    pub fn from_region(region: &RegionDescriptor) -> Result<Self, GridError> {
        Self::from_nodes(region.dim, region.origin, region.pitch, region.node_table())
    }

    pub fn from_nodes(
        dim: GridDim,
        origin: (i64, i64),
        pitch: Pitch,
        table: Vec<NodeSpec>,
    ) -> Result<Self, GridError> {
        let dim = GridDim::new(dim.dx, dim.dy, dim.dz)?;
        let expected = dim.node_count();
        if table.len() != expected {
            return Err(GridError::DimensionMismatch {
                dim,
                expected,
                found: table.len(),
            });
        }
        let mut slots: Vec<Option<Node>> = vec![None; expected];
        for spec in table {
            let idx = spec.maze_index;
            if !dim.contains(idx) {
                return Err(GridError::OutOfBounds(idx, dim));
            }
            match (spec.node_type, spec.net, spec.pin) {
                (NodeType::Access, Some(_), Some(_)) => {}
                (NodeType::Access, _, _) => return Err(GridError::AccessMissingNet(idx)),
                (_, None, None) => {}
                _ => return Err(GridError::UnexpectedOwner(idx)),
            }
            let slot = &mut slots[dim.linear(idx)];
            if slot.is_some() {
                return Err(GridError::DuplicateIndex(idx));
            }
            *slot = Some(Node {
                maze_index: idx,
                point: Point3 {
                    x: origin.0 + idx.x as i64 * pitch.x as i64,
                    y: origin.1 + idx.y as i64 * pitch.y as i64,
                    z: idx.z as i64,
                },
                node_type: spec.node_type,
                usage: false,
                net: spec.net,
                pin: spec.pin,
                cost: [0; 6],
            });
        }
        // Length matched and no duplicates, so every slot is filled.
        let nodes: Vec<Node> = slots.into_iter().map(|n| n.expect("slot filled")).collect();
        Ok(Self {
            dim,
            origin,
            pitch,
            nodes,
            occupants: vec![Vec::new(); expected],
            history: vec![[0; 6]; expected],
        })
    }

    pub fn dim(&self) -> GridDim {
        self.dim
    }

    pub fn pitch(&self) -> Pitch {
        self.pitch
    }

    pub fn origin(&self) -> (i64, i64) {
        self.origin
    }

    fn check(&self, idx: MazeIndex) -> Result<usize, GridError> {
        if self.dim.contains(idx) {
            Ok(self.dim.linear(idx))
        } else {
            Err(GridError::OutOfBounds(idx, self.dim))
        }
    }

    pub fn node_at(&self, idx: MazeIndex) -> Option<&Node> {
        self.dim.contains(idx).then(|| &self.nodes[self.dim.linear(idx)])
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Nets whose wiring passes through `idx`, ascending.
    pub fn occupants(&self, idx: MazeIndex) -> &[NetId] {
        &self.occupants[self.dim.linear(idx)]
    }

    /// Every net with a stake in an occupied node: its wiring plus, when
    /// the node is a pin site, the owning net. Empty for unwired nodes.
    pub fn claims(&self, idx: MazeIndex) -> Vec<NetId> {
        let i = self.dim.linear(idx);
        let occ = &self.occupants[i];
        if occ.is_empty() {
            return Vec::new();
        }
        let mut out = occ.clone();
        if let Some(n) = self.nodes[i].net {
            if let Err(pos) = out.binary_search(&n) {
                out.insert(pos, n);
            }
        }
        out
    }

    /// In-bounds neighbors that are neither BLOCKAGE nor NOTEXIST.
    pub fn neighbors(&self, idx: MazeIndex) -> Result<Vec<(Direction, MazeIndex)>, GridError> {
        self.check(idx)?;
        Ok(Direction::ALL
            .into_iter()
            .filter_map(|d| self.dim.step(idx, d).map(|n| (d, n)))
            .filter(|(_, n)| self.nodes[self.dim.linear(*n)].node_type.is_traversable())
            .collect())
    }

    /// Whether `net` may enter `idx`. With `net = None` any wired node is blocked.
    pub fn passage(&self, idx: MazeIndex, net: Option<NetId>) -> Passage {
        let i = self.dim.linear(idx);
        let node = &self.nodes[i];
        if !node.node_type.is_traversable() {
            return Passage::Blocked;
        }
        match net {
            None => {
                if self.occupants[i].is_empty() {
                    Passage::Free
                } else {
                    Passage::Blocked
                }
            }
            Some(n) => {
                let foreign_pin = node.node_type == NodeType::Access && node.net != Some(n);
                let foreign_wire = self.occupants[i].iter().any(|&o| o != n);
                if foreign_pin || foreign_wire {
                    Passage::Overlap
                } else {
                    Passage::Free
                }
            }
        }
    }

    pub fn history(&self, idx: MazeIndex, d: Direction) -> u32 {
        self.history[self.dim.linear(idx)][d.index()]
    }

    pub fn has_edge(&self, idx: MazeIndex, d: Direction) -> bool {
        self.dim.contains(idx) && self.dim.step(idx, d).is_some()
    }

    /// Geometric cost of an edge under `w`, in half-units.
    pub fn geometric_cost(&self, d: Direction, w: &CostWeights) -> u64 {
        if d.is_via() {
            w.via
        } else {
            w.wirelength * self.pitch.length(d)
        }
    }

    /// Effective directed edge cost, or `None` when the edge leaves the lattice.
    pub fn edge_cost(&self, idx: MazeIndex, d: Direction, w: &CostWeights) -> Option<u64> {
        let next = self.dim.step(idx, d)?;
        let a = &self.nodes[self.dim.linear(idx)];
        let b = &self.nodes[self.dim.linear(next)];
        let base = a.cost[d.index()].max(b.cost[d.opposite().index()]) as u64;
        Some(self.geometric_cost(d, w) + base + self.history(idx, d) as u64)
    }

    pub fn set_base_cost(&mut self, idx: MazeIndex, d: Direction, cost: u32) -> Result<(), GridError> {
        let i = self.check(idx)?;
        self.nodes[i].cost[d.index()] = cost;
        Ok(())
    }

    /// Adds `delta` to the edge leaving `idx` in direction `d`, in both
    /// traversal directions.
    pub fn add_history_cost(&mut self, idx: MazeIndex, d: Direction, delta: u32) -> Result<(), GridError> {
        let i = self.check(idx)?;
        let next = self.dim.step(idx, d).ok_or(GridError::NoEdge(idx, d))?;
        let j = self.dim.linear(next);
        let h = &mut self.history[i][d.index()];
        *h = h.saturating_add(delta);
        let h = &mut self.history[j][d.opposite().index()];
        *h = h.saturating_add(delta);
        Ok(())
    }

    /// Turns a non-access node into BLOCKAGE or NOTEXIST. Wiring already on
    /// the node stays recorded.
    pub fn block(&mut self, idx: MazeIndex, kind: NodeType) -> Result<(), GridError> {
        let i = self.check(idx)?;
        if self.nodes[i].node_type == NodeType::Access {
            return Err(GridError::BlockAccess(idx));
        }
        match kind {
            NodeType::Blockage if self.nodes[i].node_type == NodeType::NotExist => {}
            NodeType::Blockage | NodeType::NotExist => self.nodes[i].node_type = kind,
            _ => {}
        }
        Ok(())
    }

    /// Marks every path node as used by `net`. Idempotent per net.
    pub fn occupy_path(&mut self, net: NetId, path: &[MazeIndex]) -> Result<(), GridError> {
        for &idx in path {
            self.check(idx)?;
        }
        for &idx in path {
            let i = self.dim.linear(idx);
            let occ = &mut self.occupants[i];
            if let Err(pos) = occ.binary_search(&net) {
                occ.insert(pos, net);
            }
            self.nodes[i].usage = true;
        }
        Ok(())
    }

    /// Frees every node held by `net`; nodes shared with other nets stay used.
    pub fn release_net(&mut self, net: NetId) {
        for (i, occ) in self.occupants.iter_mut().enumerate() {
            if let Ok(pos) = occ.binary_search(&net) {
                occ.remove(pos);
                self.nodes[i].usage = !occ.is_empty();
            }
        }
    }

    /// Usage bitmap in linear node order.
    pub fn usage_bitmap(&self) -> Vec<bool> {
        self.nodes.iter().map(|n| n.usage).collect()
    }

    pub fn used_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.usage).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn normal_grid(dx: u32, dy: u32, dz: u32) -> GridGraph {
        let dim = GridDim::new(dx, dy, dz).unwrap();
        let table = dim.indices().map(NodeSpec::normal).collect();
        GridGraph::from_nodes(dim, (0, 0), Pitch::default(), table).unwrap()
    }

    #[test]
    fn empty_region_has_no_access_nodes() {
        let g = normal_grid(2, 2, 1);
        assert_eq!(g.nodes().len(), 4);
        assert!(g.nodes().iter().all(|n| n.node_type == NodeType::Normal));
    }

    #[test]
    fn access_node_keeps_its_net() {
        let dim = GridDim::new(2, 2, 1).unwrap();
        let mut table: Vec<NodeSpec> = dim.indices().map(NodeSpec::normal).collect();
        table[0] = NodeSpec {
            maze_index: MazeIndex::new(0, 0, 0),
            node_type: NodeType::Access,
            net: Some(3),
            pin: Some(0),
        };
        let g = GridGraph::from_nodes(dim, (0, 0), Pitch::default(), table).unwrap();
        assert_eq!(g.node_at(MazeIndex::new(0, 0, 0)).unwrap().net, Some(3));
    }

    #[test]
    fn node_table_errors() {
        let dim = GridDim::new(2, 3, 2).unwrap();
        let mut table: Vec<NodeSpec> = dim.indices().map(NodeSpec::normal).collect();
        table.pop();
        let err = GridGraph::from_nodes(dim, (0, 0), Pitch::default(), table.clone()).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"));

        table.push(NodeSpec::normal(MazeIndex::new(0, 0, 0)));
        assert_eq!(
            GridGraph::from_nodes(dim, (0, 0), Pitch::default(), table.clone()).unwrap_err(),
            GridError::DuplicateIndex(MazeIndex::new(0, 0, 0))
        );

        let mut table: Vec<NodeSpec> = dim.indices().map(NodeSpec::normal).collect();
        table[1].node_type = NodeType::Access;
        assert!(matches!(
            GridGraph::from_nodes(dim, (0, 0), Pitch::default(), table),
            Err(GridError::AccessMissingNet(_))
        ));
    }

    #[test]
    fn neighbor_counts() {
        let g = normal_grid(3, 3, 3);
        assert_eq!(g.neighbors(MazeIndex::new(1, 1, 1)).unwrap().len(), 6);
        assert_eq!(g.neighbors(MazeIndex::new(0, 0, 0)).unwrap().len(), 3);
        assert!(g.neighbors(MazeIndex::new(3, 0, 0)).is_err());

        let mut g = normal_grid(3, 3, 1);
        g.block(MazeIndex::new(2, 1, 0), NodeType::Blockage).unwrap();
        assert_eq!(g.neighbors(MazeIndex::new(1, 1, 0)).unwrap().len(), 3);
    }

    #[test]
    fn occupy_and_release() {
        let mut g = normal_grid(3, 3, 1);
        let before = g.usage_bitmap();
        let path = [MazeIndex::new(0, 0, 0), MazeIndex::new(1, 0, 0), MazeIndex::new(2, 0, 0)];
        g.occupy_path(1, &path).unwrap();
        assert!(path.iter().all(|&p| g.node_at(p).unwrap().usage));
        let once = g.clone();
        g.occupy_path(1, &path).unwrap();
        assert_eq!(g, once);
        g.release_net(1);
        assert_eq!(g.usage_bitmap(), before);
    }

    #[test]
    fn release_keeps_other_nets() {
        let mut g = normal_grid(3, 3, 1);
        g.occupy_path(1, &[MazeIndex::new(0, 0, 0), MazeIndex::new(1, 0, 0)]).unwrap();
        g.occupy_path(2, &[MazeIndex::new(0, 2, 0), MazeIndex::new(1, 2, 0)]).unwrap();
        let used = g.used_count();
        g.release_net(7);
        assert_eq!(g.used_count(), used);
        g.release_net(1);
        assert_eq!(g.occupants(MazeIndex::new(1, 2, 0)), &[2]);
        assert_eq!(g.used_count(), 2);
    }

    #[test]
    fn history_is_symmetric_and_additive() {
        let mut g = normal_grid(3, 1, 1);
        let a = MazeIndex::new(0, 0, 0);
        let w = CostWeights::default();
        g.add_history_cost(a, Direction::East, 5).unwrap();
        g.add_history_cost(a, Direction::East, 5).unwrap();
        assert_eq!(g.history(a, Direction::East), 10);
        assert_eq!(g.history(MazeIndex::new(1, 0, 0), Direction::West), 10);
        assert_eq!(g.edge_cost(MazeIndex::new(1, 0, 0), Direction::West, &w), Some(11));
        assert_eq!(
            g.add_history_cost(a, Direction::West, 1),
            Err(GridError::NoEdge(a, Direction::West))
        );
    }

    #[test]
    fn notexist_never_becomes_traversable() {
        let mut g = normal_grid(2, 1, 1);
        let a = MazeIndex::new(1, 0, 0);
        g.block(a, NodeType::NotExist).unwrap();
        g.block(a, NodeType::Blockage).unwrap();
        g.block(a, NodeType::Normal).unwrap();
        assert_eq!(g.node_at(a).unwrap().node_type, NodeType::NotExist);
        assert_eq!(g.passage(a, Some(0)), Passage::Blocked);
    }

    proptest! {
        #[test]
        fn direction_opposite_round_trips(d in 0u8..6, x in 1u32..4, y in 1u32..4, z in 1u32..4) {
            let dir = Direction::from_index(d).unwrap();
            prop_assert_eq!(dir.opposite().opposite(), dir);
            let dim = GridDim::new(5, 5, 5).unwrap();
            let idx = MazeIndex::new(x, y, z);
            let there = dim.step(idx, dir).unwrap();
            prop_assert_eq!(dim.step(there, dir.opposite()), Some(idx));
            prop_assert_eq!(Direction::between(idx, there), Some(dir));
        }

        #[test]
        fn neighbors_are_symmetric(dx in 1u32..5, dy in 1u32..5, dz in 1u32..3, blocked in proptest::collection::vec(any::<u16>(), 0..8)) {
            let mut g = normal_grid(dx, dy, dz);
            let n = g.dim().node_count();
            for b in blocked {
                let idx = g.dim().from_linear(b as usize % n);
                g.block(idx, NodeType::Blockage).unwrap();
            }
            for a in g.dim().indices() {
                if !g.node_at(a).unwrap().node_type.is_traversable() { continue; }
                for (_, b) in g.neighbors(a).unwrap() {
                    prop_assert!(g.neighbors(b).unwrap().iter().any(|(_, c)| *c == a));
                }
            }
        }

        #[test]
        fn occupy_release_restores_bitmap(cells in proptest::collection::vec(0usize..27, 1..10), pre in proptest::collection::vec(0usize..27, 0..5)) {
            let mut g = normal_grid(3, 3, 3);
            let dim = g.dim();
            let pre: Vec<_> = pre.into_iter().map(|i| dim.from_linear(i)).collect();
            g.occupy_path(9, &pre).unwrap();
            let before = g.usage_bitmap();
            let path: Vec<_> = cells.into_iter().map(|i| dim.from_linear(i)).collect();
            g.occupy_path(4, &path).unwrap();
            g.release_net(4);
            prop_assert_eq!(g.usage_bitmap(), before);
        }
    }
}
