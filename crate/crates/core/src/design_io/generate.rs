use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DesignIoError, NetSpec, PinSpec, Provenance, RegionDescriptor};
use crate::grid::{Direction, GridDim, MazeIndex, Pitch};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub dim: GridDim,
    pub net_count: u32,
    /// Inclusive range of pins per net.
    pub pins_per_net: (u32, u32),
    /// Inclusive range of access points per pin; extra ones sit next to the first.
    pub access_points_per_pin: (u32, u32),
    /// Fraction of nodes turned into blockages.
    pub blockage_density: f64,
    pub pitch: Pitch,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            dim: GridDim { dx: 8, dy: 8, dz: 2 },
            net_count: 4,
            pins_per_net: (2, 3),
            access_points_per_pin: (1, 1),
            blockage_density: 0.05,
            pitch: Pitch { x: 1, y: 1 },
        }
    }
}

const PLACEMENT_TRIES: usize = 64;

/// Seeded synthetic region; identical `(seed, params)` give identical output.
pub fn generate_region(seed: u64, params: &GeneratorParams) -> Result<RegionDescriptor, DesignIoError> {
    let dim = GridDim::new(params.dim.dx, params.dim.dy, params.dim.dz)
        .map_err(|e| DesignIoError::Unsatisfiable(e.to_string()))?;
    let (pmin, pmax) = params.pins_per_net;
    let (amin, amax) = params.access_points_per_pin;
    if pmin < 1 || pmin > pmax || amin < 1 || amin > amax {
        return Err(DesignIoError::Unsatisfiable("empty pin or access point range".into()));
    }
    if !(0.0..1.0).contains(&params.blockage_density) {
        return Err(DesignIoError::Unsatisfiable("blockage density must lie in [0, 1)".into()));
    }
    let total = dim.node_count();
    if total > super::MAX_REGION_NODES {
        return Err(DesignIoError::Unsatisfiable("region too large".into()));
    }
    let blocked_count = (params.blockage_density * total as f64).round() as usize;
    let needed = params.net_count as usize * pmin as usize;
    if blocked_count + needed > total {
        return Err(DesignIoError::Unsatisfiable(format!(
            "{needed} access points and {blocked_count} blockages do not fit in {total} nodes"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut free = vec![true; total];
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng);
    let mut blockages: Vec<MazeIndex> = order[..blocked_count].iter().map(|&i| dim.from_linear(i)).collect();
    blockages.sort_by_key(|&m| dim.linear(m));
    for &b in &blockages {
        free[dim.linear(b)] = false;
    }

    let mut nets = Vec::with_capacity(params.net_count as usize);
    for net_id in 0..params.net_count {
        let pin_count = rng.gen_range(pmin..=pmax);
        let mut pins = Vec::with_capacity(pin_count as usize);
        for pin_id in 0..pin_count {
            let first = pick_free(&mut rng, &free, dim).ok_or_else(|| {
                DesignIoError::Unsatisfiable(format!("no free node left for net {net_id} pin {pin_id}"))
            })?;
            free[dim.linear(first)] = false;
            let mut aps = vec![first];
            let extra = rng.gen_range(amin..=amax) - 1;
            let mut planar = [Direction::North, Direction::South, Direction::East, Direction::West];
            planar.shuffle(&mut rng);
            for d in planar.into_iter().take(extra as usize) {
                if let Some(n) = dim.step(first, d) {
                    if free[dim.linear(n)] {
                        free[dim.linear(n)] = false;
                        aps.push(n);
                    }
                }
            }
            pins.push(PinSpec {
                id: pin_id,
                access_points: aps,
            });
        }
        nets.push(NetSpec { id: net_id, pins });
    }

    let region = RegionDescriptor {
        name: format!("gen_s{seed}"),
        dim,
        origin: (0, 0),
        pitch: params.pitch,
        blockages,
        nets,
        provenance: Provenance {
            source: Some("synthetic".into()),
            bbox: Some([
                0,
                0,
                (dim.dx as i64 - 1) * params.pitch.x as i64,
                (dim.dy as i64 - 1) * params.pitch.y as i64,
            ]),
        },
    };
    region.validate()?;
    Ok(region)
}

fn pick_free(rng: &mut ChaCha8Rng, free: &[bool], dim: GridDim) -> Option<MazeIndex> {
    for _ in 0..PLACEMENT_TRIES {
        let i = rng.gen_range(0..free.len());
        if free[i] {
            return Some(dim.from_linear(i));
        }
    }
    let start = rng.gen_range(0..free.len());
    (0..free.len())
        .map(|k| (start + k) % free.len())
        .find(|&i| free[i])
        .map(|i| dim.from_linear(i))
}
