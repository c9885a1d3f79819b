//! Routing problem instances: the region descriptor, its text file format,
//! clip partitioning, a seeded generator and fixed fixtures.

mod benchmarks;
mod fixtures;
mod generate;
mod partition;
mod region_file;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridDim, MazeIndex, NetId, NodeSpec, NodeType, PinId, Pitch};

pub use benchmarks::{read_benchmark_csv, sparsity, static_benchmarks, write_benchmark_csv, BenchmarkRow};
pub use fixtures::fig1_fixture;
pub use generate::{generate_region, GeneratorParams};
pub use partition::{clip_region, gcell_grid, partition_design, GcellBox};
pub use region_file::{parse_region, serialize_region};

/// Regions larger than this are rejected before any allocation.
pub const MAX_REGION_NODES: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignIoError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Semantic { line: Option<usize>, message: String },
    #[error("sparsity is undefined for a region without nets")]
    UndefinedSparsity,
    #[error("clip size must be at least 1")]
    InvalidClipSize,
    #[error("generator parameters unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error("benchmark csv: {0}")]
    Csv(String),
}

impl DesignIoError {
    pub(crate) fn semantic(message: impl Into<String>) -> Self {
        DesignIoError::Semantic {
            line: None,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AccessPoint {
    pub maze_index: MazeIndex,
    pub net: NetId,
    pub pin: PinId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinSpec {
    pub id: PinId,
    pub access_points: Vec<MazeIndex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSpec {
    pub id: NetId,
    /// Sorted by pin id, which runs densely from 0.
    pub pins: Vec<PinSpec>,
}

impl NetSpec {
    pub fn pin_count(&self) -> usize {
        self.pins.len()
    }

    pub fn access_points(&self) -> impl Iterator<Item = AccessPoint> + '_ {
        self.pins.iter().flat_map(move |p| {
            p.access_points.iter().map(move |&m| AccessPoint {
                maze_index: m,
                net: self.id,
                pin: p.id,
            })
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: Option<String>,
    /// Lower-left and upper-right corners in DBU: `[llx, lly, urx, ury]`.
    pub bbox: Option<[i64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionDescriptor {
    pub name: String,
    pub dim: GridDim,
    pub origin: (i64, i64),
    pub pitch: Pitch,
    pub blockages: Vec<MazeIndex>,
    pub nets: Vec<NetSpec>,
    pub provenance: Provenance,
}

impl RegionDescriptor {
    pub fn empty(name: impl Into<String>, dim: GridDim) -> Self {
        Self {
            name: name.into(),
            dim,
            origin: (0, 0),
            pitch: Pitch::default(),
            blockages: Vec::new(),
            nets: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn net(&self, id: NetId) -> Option<&NetSpec> {
        self.nets.iter().find(|n| n.id == id)
    }

    pub fn net_ids(&self) -> Vec<NetId> {
        self.nets.iter().map(|n| n.id).collect()
    }

    pub fn pin_count(&self) -> usize {
        self.nets.iter().map(NetSpec::pin_count).sum()
    }

    pub fn access_points(&self) -> impl Iterator<Item = AccessPoint> + '_ {
        self.nets.iter().flat_map(NetSpec::access_points)
    }

    /// Planar DBU position of a lattice index.
    pub fn point_of(&self, idx: MazeIndex) -> (i64, i64) {
        (
            self.origin.0 + idx.x as i64 * self.pitch.x as i64,
            self.origin.1 + idx.y as i64 * self.pitch.y as i64,
        )
    }

    /// DBU positions of each pin's access points, in pin order.
    pub fn pin_points(&self, net: &NetSpec) -> Vec<Vec<(i64, i64)>> {
        net.pins
            .iter()
            .map(|p| p.access_points.iter().map(|&m| self.point_of(m)).collect())
            .collect()
    }

    pub fn net_hpwl(&self, net: &NetSpec) -> u64 {
        crate::metrics::net_hpwl(&self.pin_points(net)).unwrap_or(0)
    }

    /// Node table with every node NORMAL except blockages and access points.
    pub fn node_table(&self) -> Vec<NodeSpec> {
        let mut table: Vec<NodeSpec> = self.dim.indices().map(NodeSpec::normal).collect();
        for &b in &self.blockages {
            if self.dim.contains(b) {
                table[self.dim.linear(b)].node_type = NodeType::Blockage;
            }
        }
        for ap in self.access_points() {
            if self.dim.contains(ap.maze_index) {
                let row = &mut table[self.dim.linear(ap.maze_index)];
                row.node_type = NodeType::Access;
                row.net = Some(ap.net);
                row.pin = Some(ap.pin);
            }
        }
        table
    }

    /// Checks every descriptor invariant.
    pub fn validate(&self) -> Result<(), DesignIoError> {
        let d = self.dim;
        if d.dx == 0 || d.dy == 0 || d.dz == 0 {
            return Err(DesignIoError::semantic(format!("dimension {d} has an empty axis")));
        }
        let count = (d.dx as u128) * (d.dy as u128) * (d.dz as u128);
        if count > MAX_REGION_NODES as u128 {
            return Err(DesignIoError::semantic(format!(
                "region of {count} nodes exceeds the {MAX_REGION_NODES} node limit"
            )));
        }
        if self.pitch.x == 0 || self.pitch.y == 0 {
            return Err(DesignIoError::semantic("pitch must be positive"));
        }
        if self.name.is_empty() || self.name.split_whitespace().count() != 1 {
            return Err(DesignIoError::semantic("region name must be a single token"));
        }
        let mut blocked = BTreeSet::new();
        for &b in &self.blockages {
            if !d.contains(b) {
                return Err(DesignIoError::semantic(format!("blockage {b} out of bounds for {d}")));
            }
            if !blocked.insert(b) {
                return Err(DesignIoError::semantic(format!("duplicate blockage {b}")));
            }
        }
        let mut net_ids = BTreeSet::new();
        let mut taken: BTreeMap<MazeIndex, (NetId, PinId)> = BTreeMap::new();
        for net in &self.nets {
            if !net_ids.insert(net.id) {
                return Err(DesignIoError::semantic(format!("duplicate net {}", net.id)));
            }
            if net.pins.is_empty() {
                return Err(DesignIoError::semantic(format!("net {} has no pins", net.id)));
            }
            for (expected, pin) in net.pins.iter().enumerate() {
                if pin.id as usize != expected {
                    return Err(DesignIoError::semantic(format!(
                        "net {}: pin ids must run densely from 0, found {} at position {expected}",
                        net.id, pin.id
                    )));
                }
                if pin.access_points.is_empty() {
                    return Err(DesignIoError::semantic(format!(
                        "net {} pin {} has no access point",
                        net.id, pin.id
                    )));
                }
                for &ap in &pin.access_points {
                    if !d.contains(ap) {
                        return Err(DesignIoError::semantic(format!(
                            "access point {ap} of net {} out of bounds for {d}",
                            net.id
                        )));
                    }
                    if blocked.contains(&ap) {
                        return Err(DesignIoError::semantic(format!("access point {ap} is a blockage")));
                    }
                    if taken.insert(ap, (net.id, pin.id)).is_some() {
                        return Err(DesignIoError::semantic(format!("duplicate access point {ap}")));
                    }
                }
            }
        }
        Ok(())
    }
}
