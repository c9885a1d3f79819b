use super::{NetSpec, PinSpec, Provenance, RegionDescriptor};
use crate::grid::{GridDim, MazeIndex, Pitch};

/// A two-layer 7x5 region whose outcome depends on the routing order.
///
/// Nets 1 and 2 run west-east along rows 1 and 3; nets 3 and 4 run
/// south-north along columns 1 and 5. Layer 1 is only open along rows 1
/// and 3. Routed first, the straight rows of nets 1 and 2 wall off both
/// columns, so nets 3 and 4 cannot connect. Routed after nets 3 and 4,
/// nets 1 and 2 hop over the columns on layer 1 and everything connects.
pub fn fig1_fixture() -> RegionDescriptor {
    let dim = GridDim { dx: 7, dy: 5, dz: 2 };
    let mut blockages = Vec::new();
    for y in [0, 2, 4] {
        for x in 0..dim.dx {
            blockages.push(MazeIndex::new(x, y, 1));
        }
    }
    let two_pin = |id, a: (u32, u32), b: (u32, u32)| NetSpec {
        id,
        pins: vec![
            PinSpec {
                id: 0,
                access_points: vec![MazeIndex::new(a.0, a.1, 0)],
            },
            PinSpec {
                id: 1,
                access_points: vec![MazeIndex::new(b.0, b.1, 0)],
            },
        ],
    };
    RegionDescriptor {
        name: "fig1".into(),
        dim,
        origin: (0, 0),
        pitch: Pitch { x: 1, y: 1 },
        blockages,
        nets: vec![
            two_pin(1, (0, 1), (6, 1)),
            two_pin(2, (0, 3), (6, 3)),
            two_pin(3, (1, 0), (1, 4)),
            two_pin(4, (5, 0), (5, 4)),
        ],
        provenance: Provenance {
            source: Some("fixture".into()),
            bbox: Some([0, 0, 6, 4]),
        },
    }
}
