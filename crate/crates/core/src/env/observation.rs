use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::grid::{Direction, GridDim, GridGraph, MazeIndex, NetId, NodeType, Passage};
use crate::metrics::CostWeights;

/// Edge entry of the routing vector for a move the net cannot make.
pub const BLOCKED_EDGE: i64 = i64::MAX;

/// A dense `(dx, dy, dz)` 0/1 tensor; serializes as nested `[x][y][z]` arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Vec<u8>>>", into = "Vec<Vec<Vec<u8>>>")]
pub struct Tensor3 {
    dim: GridDim,
    data: Vec<u8>,
}

impl Tensor3 {
    pub fn zeros(dim: GridDim) -> Self {
        Self {
            dim,
            data: vec![0; dim.node_count()],
        }
    }

    pub fn dim(&self) -> GridDim {
        self.dim
    }

    pub fn get(&self, idx: MazeIndex) -> u8 {
        self.data[self.dim.linear(idx)]
    }

    pub fn set(&mut self, idx: MazeIndex, v: u8) {
        let i = self.dim.linear(idx);
        self.data[i] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }
}

impl From<Tensor3> for Vec<Vec<Vec<u8>>> {
    fn from(t: Tensor3) -> Self {
        let d = t.dim;
        (0..d.dx)
            .map(|x| {
                (0..d.dy)
                    .map(|y| (0..d.dz).map(|z| t.get(MazeIndex::new(x, y, z))).collect())
                    .collect()
            })
            .collect()
    }
}

impl TryFrom<Vec<Vec<Vec<u8>>>> for Tensor3 {
    type Error = String;

    fn try_from(v: Vec<Vec<Vec<u8>>>) -> Result<Self, Self::Error> {
        let dx = v.len();
        let dy = v.first().map_or(0, Vec::len);
        let dz = v.first().and_then(|p| p.first()).map_or(0, Vec::len);
        if v.iter().any(|p| p.len() != dy || p.iter().any(|r| r.len() != dz)) {
            return Err("tensor is not rectangular".into());
        }
        let dim = GridDim::new(dx as u32, dy as u32, dz as u32).map_err(|e| e.to_string())?;
        let mut t = Tensor3::zeros(dim);
        for (x, plane) in v.iter().enumerate() {
            for (y, row) in plane.iter().enumerate() {
                for (z, &val) in row.iter().enumerate() {
                    t.set(MazeIndex::new(x as u32, y as u32, z as u32), val);
                }
            }
        }
        Ok(t)
    }
}

/// Seven channels per remaining net: its access points, then for each
/// direction whether the neighbor there is an access point of the same pin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetFeatures {
    pub net: NetId,
    pub channels: Vec<Tensor3>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingObservation {
    pub dim: [u32; 3],
    pub obstacle: Tensor3,
    pub nets: Vec<NetFeatures>,
    /// Remaining net ids, ascending.
    pub actions: Vec<NetId>,
}

impl OrderingObservation {
    /// Obstacles are blockages, missing nodes, and every node wired or
    /// pinned by an already-routed net.
    pub(crate) fn build(g: &GridGraph, remaining: &BTreeSet<NetId>) -> Self {
        let dim = g.dim();
        let mut obstacle = Tensor3::zeros(dim);
        let mut access: Vec<Tensor3> = Vec::new();
        let mut same_pin: Vec<Vec<Tensor3>> = Vec::new();
        let slot = |net: NetId| remaining.iter().position(|&n| n == net);
        for _ in remaining {
            access.push(Tensor3::zeros(dim));
            same_pin.push(vec![Tensor3::zeros(dim); 6]);
        }
        for node in g.nodes() {
            let idx = node.maze_index;
            let routed_pin = node.node_type == NodeType::Access && node.net.is_some_and(|n| !remaining.contains(&n));
            if !node.node_type.is_traversable() || node.usage || routed_pin {
                obstacle.set(idx, 1);
            }
            if node.node_type != NodeType::Access {
                continue;
            }
            let Some(k) = node.net.and_then(slot) else { continue };
            access[k].set(idx, 1);
            for d in Direction::ALL {
                let Some(n) = dim.step(idx, d) else { continue };
                let other = g.node_at(n).expect("in bounds");
                if other.node_type == NodeType::Access && other.net == node.net && other.pin == node.pin {
                    same_pin[k][d.index()].set(idx, 1);
                }
            }
        }
        let nets = remaining
            .iter()
            .zip(access.into_iter().zip(same_pin))
            .map(|(&net, (a, sp))| {
                let mut channels = Vec::with_capacity(7);
                channels.push(a);
                channels.extend(sp);
                NetFeatures { net, channels }
            })
            .collect();
        Self {
            dim: [dim.dx, dim.dy, dim.dz],
            obstacle,
            nets,
            actions: remaining.iter().copied().collect(),
        }
    }
}

/// Head position, signed lattice offset to the target access point, and
/// the effective cost of each of the six moves ([`BLOCKED_EDGE`] if illegal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingObservation {
    pub vector: [i64; 12],
}

impl RoutingObservation {
    pub(crate) fn build(
        g: &GridGraph,
        net: NetId,
        head: MazeIndex,
        target: Option<MazeIndex>,
        weights: &CostWeights,
    ) -> Self {
        let mut v = [0i64; 12];
        v[0] = head.x as i64;
        v[1] = head.y as i64;
        v[2] = head.z as i64;
        if let Some(t) = target {
            v[3] = t.x as i64 - head.x as i64;
            v[4] = t.y as i64 - head.y as i64;
            v[5] = t.z as i64 - head.z as i64;
        }
        for d in Direction::ALL {
            v[6 + d.index()] = match g.dim().step(head, d) {
                Some(n) if g.passage(n, Some(net)) == Passage::Free => {
                    g.edge_cost(head, d, weights).expect("in bounds") as i64
                }
                _ => BLOCKED_EDGE,
            };
        }
        Self { vector: v }
    }

    pub fn head(&self) -> MazeIndex {
        MazeIndex::new(self.vector[0] as u32, self.vector[1] as u32, self.vector[2] as u32)
    }

    pub fn delta(&self) -> [i64; 3] {
        [self.vector[3], self.vector[4], self.vector[5]]
    }

    pub fn edges(&self) -> [i64; 6] {
        let mut e = [0; 6];
        e.copy_from_slice(&self.vector[6..]);
        e
    }
}
