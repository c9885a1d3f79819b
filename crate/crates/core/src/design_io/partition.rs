use serde::{Deserialize, Serialize};

use super::{DesignIoError, NetSpec, PinSpec, Provenance, RegionDescriptor};
use crate::grid::{GridDim, MazeIndex};

/// A half-open box of GCells: `[llx, urx) x [lly, ury)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GcellBox {
    pub llx: u32,
    pub lly: u32,
    pub urx: u32,
    pub ury: u32,
}

impl GcellBox {
    pub fn width(&self) -> u32 {
        self.urx - self.llx
    }

    pub fn height(&self) -> u32 {
        self.ury - self.lly
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn intersects(&self, other: &GcellBox) -> bool {
        self.llx < other.urx && other.llx < self.urx && self.lly < other.ury && other.lly < self.ury
    }
}

/// Splits a `gx x gy` GCell design into `clip x clip` boxes, x-major,
/// clipping the last column and row at the design edge.
pub fn partition_design(design: (u32, u32), clip: u32) -> Result<Vec<GcellBox>, DesignIoError> {
    if clip < 1 {
        return Err(DesignIoError::InvalidClipSize);
    }
    let (gx, gy) = design;
    let mut boxes = Vec::new();
    for llx in (0..gx).step_by(clip as usize) {
        for lly in (0..gy).step_by(clip as usize) {
            boxes.push(GcellBox {
                llx,
                lly,
                urx: (llx + clip).min(gx),
                ury: (lly + clip).min(gy),
            });
        }
    }
    Ok(boxes)
}

/// GCell grid size of a region whose GCells span `gcell` tracks per side.
pub fn gcell_grid(region: &RegionDescriptor, gcell: u32) -> (u32, u32) {
    let g = gcell.max(1);
    (region.dim.dx.div_ceil(g), region.dim.dy.div_ceil(g))
}

/// Cuts the nodes covered by `b` out of `design`, keeping every layer.
///
/// Pins keep only their access points inside the clip and are renumbered
/// densely; pins left without access points and nets left without pins are
/// dropped.
pub fn clip_region(design: &RegionDescriptor, gcell: u32, b: GcellBox) -> Result<RegionDescriptor, DesignIoError> {
    let g = gcell.max(1);
    let x0 = b.llx.saturating_mul(g);
    let y0 = b.lly.saturating_mul(g);
    let x1 = b.urx.saturating_mul(g).min(design.dim.dx);
    let y1 = b.ury.saturating_mul(g).min(design.dim.dy);
    if x0 >= x1 || y0 >= y1 {
        return Err(DesignIoError::semantic(format!("clip {b:?} lies outside design {}", design.name)));
    }
    let dim = GridDim::new(x1 - x0, y1 - y0, design.dim.dz).map_err(|e| DesignIoError::semantic(e.to_string()))?;
    let local = |m: MazeIndex| -> Option<MazeIndex> {
        (m.x >= x0 && m.x < x1 && m.y >= y0 && m.y < y1).then(|| MazeIndex::new(m.x - x0, m.y - y0, m.z))
    };
    let blockages = design.blockages.iter().filter_map(|&m| local(m)).collect();
    let nets = design
        .nets
        .iter()
        .filter_map(|net| {
            let pins: Vec<PinSpec> = net
                .pins
                .iter()
                .filter_map(|p| {
                    let aps: Vec<MazeIndex> = p.access_points.iter().filter_map(|&m| local(m)).collect();
                    (!aps.is_empty()).then_some(aps)
                })
                .enumerate()
                .map(|(i, aps)| PinSpec {
                    id: i as u32,
                    access_points: aps,
                })
                .collect();
            (!pins.is_empty()).then_some(NetSpec { id: net.id, pins })
        })
        .collect();
    let origin = design.point_of(MazeIndex::new(x0, y0, 0));
    let far = design.point_of(MazeIndex::new(x1 - 1, y1 - 1, 0));
    let region = RegionDescriptor {
        name: format!("{}_c{}_{}", design.name, b.llx, b.lly),
        dim,
        origin,
        pitch: design.pitch,
        blockages,
        nets,
        provenance: Provenance {
            source: Some(design.provenance.source.clone().unwrap_or_else(|| design.name.clone())),
            bbox: Some([origin.0, origin.1, far.0, far.1]),
        },
    };
    region.validate()?;
    Ok(region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sizes(boxes: &[GcellBox]) -> Vec<(u32, u32)> {
        boxes.iter().map(|b| (b.width(), b.height())).collect()
    }

    #[test]
    fn even_split() {
        let boxes = partition_design((6, 6), 3).unwrap();
        assert_eq!(sizes(&boxes), vec![(3, 3); 4]);
    }

    #[test]
    fn ragged_split() {
        let boxes = partition_design((6, 6), 4).unwrap();
        assert_eq!(sizes(&boxes), vec![(4, 4), (4, 2), (2, 4), (2, 2)]);
    }

    #[test]
    fn single_small_design() {
        assert_eq!(sizes(&partition_design((1, 1), 3).unwrap()), vec![(1, 1)]);
        assert_eq!(partition_design((4, 4), 0), Err(DesignIoError::InvalidClipSize));
    }

    #[test]
    fn clip_keeps_inside_pins() {
        let text = "region d\ndim 6 6 1\nblockage 4 4 0\nnet 0\npin 0 ap 0 0 0\npin 1 ap 5 5 0\nend\nnet 1\npin 0 ap 4 5 0\npin 1 ap 5 4 0\nend\n";
        let d = super::super::parse_region(text.as_bytes()).unwrap();
        let c = clip_region(&d, 3, GcellBox { llx: 1, lly: 1, urx: 2, ury: 2 }).unwrap();
        assert_eq!(c.dim, GridDim::new(3, 3, 1).unwrap());
        assert_eq!(c.blockages, vec![MazeIndex::new(1, 1, 0)]);
        assert_eq!(c.nets.len(), 2);
        assert_eq!(c.nets[0].pins.len(), 1);
        assert_eq!(c.nets[0].pins[0].access_points, vec![MazeIndex::new(2, 2, 0)]);
    }

    proptest! {
        #[test]
        fn partition_covers_exactly(gx in 1u32..40, gy in 1u32..40, clip in 1u32..12) {
            let boxes = partition_design((gx, gy), clip).unwrap();
            let area: u64 = boxes.iter().map(GcellBox::area).sum();
            prop_assert_eq!(area, gx as u64 * gy as u64);
            for (i, a) in boxes.iter().enumerate() {
                prop_assert!(a.urx <= gx && a.ury <= gy);
                prop_assert!(a.width() <= clip && a.height() <= clip);
                prop_assert_eq!(a.llx % clip, 0);
                prop_assert_eq!(a.lly % clip, 0);
                for b in &boxes[i + 1..] {
                    prop_assert!(!a.intersects(b));
                }
            }
        }
    }
}
