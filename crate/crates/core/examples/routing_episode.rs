// A greedy agent driving the single-net routing episode: it steps along
// the offset to the target and falls back to the cheapest open move.

use gridroute::design_io::fig1_fixture;
use gridroute::env::{EnvConfig, RoutingAction, RoutingEpisode, BLOCKED_EDGE};
use gridroute::grid::Direction;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let region = fig1_fixture();
    let (mut ep, mut obs) = RoutingEpisode::reset(&region, 3, 0, EnvConfig::default())?;
    println!("net {} hpwl {} t_min {}", ep.net(), ep.hpwl(), ep.t_min().real());
    while !ep.is_done() {
        let [dx, dy, dz] = obs.delta();
        let edges = obs.edges();
        let toward = [
            (dz > 0, Direction::Up),
            (dz < 0, Direction::Down),
            (dy > 0, Direction::North),
            (dy < 0, Direction::South),
            (dx > 0, Direction::East),
            (dx < 0, Direction::West),
        ];
        let open = |d: Direction| edges[d.index()] != BLOCKED_EDGE;
        let d = toward
            .iter()
            .find(|(want, d)| *want && open(*d))
            .map(|(_, d)| *d)
            .or_else(|| Direction::ALL.into_iter().filter(|&d| open(d)).min_by_key(|d| edges[d.index()]))
            .ok_or("boxed in")?;
        let t = ep.step(RoutingAction::new(d))?;
        println!("  {d:?}: reward {}", t.reward.real());
        obs = t.observation;
    }
    let s = ep.snapshot();
    println!(
        "{:?} after {} steps: return {}, wirelength {}, vias {}",
        ep.status(),
        ep.step_count(),
        ep.cumulative().real(),
        s.wirelength,
        s.via_count
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
