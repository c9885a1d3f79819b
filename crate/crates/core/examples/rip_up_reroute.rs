// Rip-up and reroute on a congested generated region, printing the
// per-round trend and writing it as CSV.

use gridroute::design_io::{generate_region, GeneratorParams};
use gridroute::env::{EnvConfig, RrrConfig, rrr_iterate};
use gridroute::grid::GridDim;
use gridroute::heuristics::OrderingPolicy;
use gridroute::report::{write_trend_csv, RouteResult};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = GeneratorParams {
        dim: GridDim { dx: 8, dy: 8, dz: 2 },
        net_count: 8,
        blockage_density: 0.1,
        ..GeneratorParams::default()
    };
    let region = generate_region(3, &params)?;
    let out = rrr_iterate(&region, &OrderingPolicy::MostPinsFirst, 8, &RrrConfig::default())?;
    for (i, s) in out.snapshots.iter().enumerate() {
        println!("round {i}: wirelength {}, vias {}, drv {}", s.wirelength, s.via_count, s.drv_count());
    }
    let result = RouteResult {
        region: region.name.clone(),
        policy: OrderingPolicy::MostPinsFirst.name(),
        snapshots: out.snapshots,
        runtime_secs: 0.0,
    };
    let mut csv = Vec::new();
    write_trend_csv(&[result], &EnvConfig::default(), &mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
