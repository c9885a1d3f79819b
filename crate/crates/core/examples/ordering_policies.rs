// The heuristic net orders next to the exhaustive best order.

use gridroute::design_io::fig1_fixture;
use gridroute::env::{evaluate_order, EnvConfig};
use gridroute::heuristics::{exhaustive_best_order, OrderingPolicy};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let region = fig1_fixture();
    let config = EnvConfig::default();
    let policies: Vec<OrderingPolicy> = ["fifo", "most-pins", "min-hpwl", "random:1", "explicit:4,3"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    for p in &policies {
        let order = p.order(&region);
        let s = evaluate_order(&region, &order, config)?;
        println!("{:<12} {order:?}: drv {}, cost {}", p.name(), s.drv_count(), s.cost_half_units().real());
    }
    let (order, best) = exhaustive_best_order(&region, config)?;
    println!("{:<12} {order:?}: drv {}, cost {}", "exhaustive", best.drv_count(), best.cost_half_units().real());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
