// Sequential net routing on the order-sensitive fixture, followed by the
// design rule checks, for a bad and a good net order.

use gridroute::design_io::fig1_fixture;
use gridroute::drc::{check_all, DrcRules};
use gridroute::grid::GridGraph;
use gridroute::metrics::CostWeights;
use gridroute::router::{route_net, SearchOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let region = fig1_fixture();
    let opts = SearchOptions::new(CostWeights::default());
    for order in [[1, 2, 3, 4], [3, 4, 1, 2]] {
        let mut grid = GridGraph::from_region(&region)?;
        let mut routed = Vec::new();
        for id in order {
            let net = region.net(id).ok_or("missing net")?;
            routed.push(route_net(&mut grid, net, &opts)?);
        }
        let report = check_all(&grid, &routed, &DrcRules::default(), true);
        let counts = report.counts();
        let wl: u64 = routed.iter().map(|r| r.wirelength()).sum();
        let vias: u64 = routed.iter().map(|r| r.via_count()).sum();
        println!(
            "order {order:?}: wirelength {wl}, vias {vias}, open {}, short {}, spacing {}, min-area {}",
            counts.open, counts.short, counts.spacing, counts.min_area
        );
        for v in &report.violations {
            println!("  {:?} nets {:?}", v.kind, v.nets);
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
