// A seeded random agent choosing the net order; the summed rewards equal
// the drop in weighted cost.

use gridroute::design_io::{generate_region, GeneratorParams};
use gridroute::env::{EnvConfig, Mode, OrderingEpisode};
use gridroute::metrics::{cost, HalfUnits};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let region = generate_region(7, &GeneratorParams::default())?;
    let config = EnvConfig::default();
    let (mut ep, obs) = OrderingEpisode::reset(region, Mode::Trainer, 7, config)?;
    println!(
        "region {}: {} nets, obstacle tensor {:?}, {} channels per net",
        ep.region().name,
        obs.actions.len(),
        obs.dim,
        obs.nets[0].channels.len()
    );
    let mut total = HalfUnits::ZERO;
    while let Some(net) = ep.sample_action() {
        let t = ep.step(net)?;
        total += t.reward;
        println!("  route net {net}: reward {}, done {}", t.reward.real(), t.done);
    }
    let delta = cost(&ep.initial_snapshot(), &config.weights) - cost(&ep.snapshot(), &config.weights);
    println!("order {:?}, return {}, cost delta {}", ep.order(), total.real(), delta.real());
    assert_eq!(total, delta);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
