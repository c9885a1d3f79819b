// Shortest path on a small two-layer grid with a wall, history and a
// per-node base cost.

use gridroute::grid::{Direction, GridDim, GridGraph, MazeIndex, NodeSpec, NodeType, Pitch};
use gridroute::metrics::CostWeights;
use gridroute::router::astar;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dim = GridDim::new(6, 4, 2)?;
    let table = dim
        .indices()
        .map(|m| NodeSpec {
            // A wall at x = 3 on the lower layer forces a via detour.
            node_type: if m.x == 3 && m.z == 0 { NodeType::Blockage } else { NodeType::Normal },
            ..NodeSpec::normal(m)
        })
        .collect();
    let mut grid = GridGraph::from_nodes(dim, (0, 0), Pitch { x: 2, y: 2 }, table)?;
    grid.add_history_cost(MazeIndex::new(3, 1, 1), Direction::East, 10)?;
    grid.set_base_cost(MazeIndex::new(2, 0, 1), Direction::East, 5)?;

    let weights = CostWeights::default();
    let found = astar(&grid, &[MazeIndex::new(0, 1, 0)], &[MazeIndex::new(5, 1, 0)], &weights)?;
    println!(
        "cost {} half-units, wirelength {} DBU, {} vias, {} expansions",
        found.cost,
        found.path.wirelength(),
        found.path.via_count(),
        found.expansions
    );
    for m in found.path.nodes() {
        println!("  ({}, {}, {})", m.x, m.y, m.z);
    }
    assert_eq!(found.path.via_count(), 2);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
