// Benchmark several generated regions under every heuristic and write
// the comparison table and manifest.

use gridroute::design_io::GeneratorParams;
use gridroute::env::EnvConfig;
use gridroute::report::{generate_regions, run_bench, write_bench_reports, BenchInput, BenchManifest, PolicyChoice};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = GeneratorParams::default();
    let inputs: Vec<BenchInput> = generate_regions(4, 1, &params)?.into_iter().map(BenchInput::Region).collect();
    let policies: Vec<PolicyChoice> = ["fifo", "most-pins", "min-hpwl", "exhaustive"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let env = EnvConfig::default();
    let rows = run_bench(&inputs, &policies, 2, env);
    let manifest = BenchManifest {
        version: env!("CARGO_PKG_VERSION").into(),
        regions: inputs
            .iter()
            .filter_map(|i| match i {
                BenchInput::Region(r) => Some(r.name.clone()),
                BenchInput::Failed { .. } => None,
            })
            .collect(),
        policies: policies.iter().map(|p| p.to_string()).collect(),
        iterations: 2,
        rows: rows.len(),
        failures: rows.iter().filter(|r| r.outcome.is_err()).count(),
        weights: env.weights,
        rules: env.rules,
        generator: None,
    };
    let dir = tempfile::tempdir()?;
    write_bench_reports(dir.path(), &rows, &manifest, &env, false)?;
    print!("{}", std::fs::read_to_string(dir.path().join("table.csv"))?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
