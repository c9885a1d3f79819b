// Region text format, clipping a design into GCell regions, and the
// static benchmark table.

use gridroute::design_io::{
    clip_region, gcell_grid, generate_region, parse_region, partition_design, serialize_region,
    static_benchmarks, write_benchmark_csv, GeneratorParams,
};
use gridroute::grid::GridDim;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = GeneratorParams {
        dim: GridDim { dx: 12, dy: 8, dz: 2 },
        net_count: 6,
        ..GeneratorParams::default()
    };
    let design = generate_region(11, &params)?;
    let text = serialize_region(&design);
    println!("{}", text.lines().take(6).collect::<Vec<_>>().join("\n"));
    assert_eq!(parse_region(text.as_bytes())?, design);

    let gcell = 4;
    let boxes = partition_design(gcell_grid(&design, gcell), 1)?;
    for b in &boxes {
        let clip = clip_region(&design, gcell, *b)?;
        println!("clip {}: {} nets, {} pins", clip.name, clip.nets.len(), clip.pin_count());
    }

    let mut csv = Vec::new();
    write_benchmark_csv(&static_benchmarks(), &mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
