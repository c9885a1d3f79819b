//! Command-line front end: `route`, `bench` and `serve`.
//!
//! Exit codes: 0 clean, 1 violations remain or a run failed, 2 bad input,
//! 3 the server could not bind.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::design_io::{fig1_fixture, GeneratorParams, RegionDescriptor};
use crate::drc::DrcRules;
use crate::env::{EnvConfig, Mode, MAX_RRR_ITERATIONS};
use crate::grid::{GridDim, Pitch};
use crate::metrics::CostWeights;
use crate::protocol::{build_region_set, serve, ClipSpec, ServeError, ServerConfig};
use crate::report::{
    generate_regions, load_region, route_region, run_bench, write_bench_reports, write_route_reports, BenchInput,
    BenchManifest, GeneratorManifest, PolicyChoice, ReportError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BIND: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gridroute", version, about = "Grid-graph detailed router and routing environments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Route regions with rip-up and reroute and write summary and trend CSVs.
    Route(RouteArgs),
    /// Route every region under every policy and write a comparison table.
    Bench(BenchArgs),
    /// Serve environment sessions over TCP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RuleArgs {
    /// Same-layer spacing threshold in tracks; 0 disables the check.
    #[arg(long, default_value_t = 0)]
    pub min_sep: u32,
    /// Minimum same-layer metal length in DBU; 0 disables the check.
    #[arg(long, default_value_t = 0)]
    pub min_len: u64,
}

impl RuleArgs {
    fn env(&self) -> EnvConfig {
        EnvConfig {
            weights: CostWeights::default(),
            rules: DrcRules {
                min_sep: self.min_sep,
                min_len: self.min_len,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Number of synthetic regions to generate.
    #[arg(long, value_name = "N")]
    pub generate: Option<u32>,
    /// Seed of the first generated region; later ones count up from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generated grid size as DXxDYxDZ.
    #[arg(long, default_value = "8x8x2", value_parser = parse_dim)]
    pub gen_dim: GridDim,
    #[arg(long, default_value_t = 4)]
    pub gen_nets: u32,
    #[arg(long, default_value_t = 0.05)]
    pub gen_density: f64,
}

impl GenArgs {
    fn params(&self) -> GeneratorParams {
        GeneratorParams {
            dim: self.gen_dim,
            net_count: self.gen_nets,
            blockage_density: self.gen_density,
            pitch: Pitch::default(),
            ..GeneratorParams::default()
        }
    }
}

fn parse_dim(s: &str) -> Result<GridDim, String> {
    let parts: Vec<u32> = s
        .split('x')
        .map(|p| p.trim().parse::<u32>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [dx, dy, dz] => GridDim::new(dx, dy, dz).map_err(|e| e.to_string()),
        _ => Err(format!("expected DXxDYxDZ, got `{s}`")),
    }
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got `{s}`"))?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_iterations(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if (1..=MAX_RRR_ITERATIONS).contains(&n) {
        Ok(n)
    } else {
        Err(format!("must be between 1 and {MAX_RRR_ITERATIONS}"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RouteArgs {
    /// Region files to route.
    #[arg(long = "region", value_name = "FILE")]
    pub regions: Vec<PathBuf>,
    /// Route the built-in order-sensitive fixture as well.
    #[arg(long)]
    pub fixture: bool,
    /// fifo, most-pins, min-hpwl, random[:SEED], explicit:ID,... or exhaustive.
    #[arg(long, default_value = "fifo", value_parser = |s: &str| s.parse::<PolicyChoice>().map_err(|e| e.to_string()))]
    pub policy: PolicyChoice,
    /// Rip-up-and-reroute rounds after the initial routing.
    #[arg(long, default_value_t = 5, value_parser = parse_iterations)]
    pub iterations: u32,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub rules: RuleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Region files to include.
    #[arg(long = "region", value_name = "FILE")]
    pub regions: Vec<PathBuf>,
    /// Include the built-in order-sensitive fixture.
    #[arg(long)]
    pub fixture: bool,
    /// Comma-separated policies; table rows follow this order within each region.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "fifo,most-pins,min-hpwl",
        value_parser = |s: &str| s.parse::<PolicyChoice>().map_err(|e| e.to_string())
    )]
    pub policies: Vec<PolicyChoice>,
    #[arg(long, default_value_t = 1, value_parser = parse_iterations)]
    pub iterations: u32,
    #[arg(long, default_value = "bench-report")]
    pub out: PathBuf,
    /// Also write timing.csv, which varies between runs.
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub rules: RuleArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Trainer,
    Validator,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, env = "GRIDROUTE_ADDR", default_value = "127.0.0.1:5555")]
    pub addr: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Trainer)]
    pub mode: ModeArg,
    /// Design files to serve; without any, the built-in fixture is served.
    #[arg(long = "region-set", value_name = "FILE")]
    pub region_set: Vec<PathBuf>,
    /// Repeat the whole region list this many times.
    #[arg(long, default_value_t = 1)]
    pub region_set_loop: u32,
    /// Cut each design into square clips of this many GCells per side.
    #[arg(long)]
    pub clip_size: Option<u32>,
    /// Serve only the clip whose lower-left GCell is X,Y.
    #[arg(long, value_parser = parse_pair, requires = "clip_size")]
    pub clip_location: Option<(u32, u32)>,
    /// GCell side in tracks.
    #[arg(long, default_value_t = 1)]
    pub gcell_size: u32,
    /// Serve each clip this many times in a row (trainer mode).
    #[arg(long, default_value_t = 1)]
    pub clip_loop: u32,
    /// Rip-up-and-reroute rounds reported in METRICS after an ordering episode.
    #[arg(long, value_parser = parse_iterations)]
    pub iteration_count: Option<u32>,
    /// Concurrent sessions.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub thread_count: u32,
    /// Routing attempts per net.
    #[arg(long, default_value_t = 1)]
    pub net_loop: u32,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub rules: RuleArgs,
}

fn gather(paths: &[PathBuf], fixture: bool, gen: &GenArgs) -> Result<Vec<RegionDescriptor>, ReportError> {
    let mut regions = Vec::new();
    for p in paths {
        regions.push(load_region(p)?);
    }
    if fixture {
        regions.push(fig1_fixture());
    }
    if let Some(n) = gen.generate {
        regions.extend(generate_regions(n, gen.seed, &gen.params())?);
    }
    Ok(regions)
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match cli.command {
        Command::Route(a) => cmd_route(&a, out, err),
        Command::Bench(a) => cmd_bench(&a, out, err),
        Command::Serve(a) => cmd_serve(&a, out, err),
    }
}

pub fn cmd_route(a: &RouteArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let regions = match gather(&a.regions, a.fixture, &a.gen) {
        Ok(r) if r.is_empty() => {
            let _ = writeln!(err, "error: no regions given");
            return EXIT_INPUT;
        }
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let env = a.rules.env();
    let mut results = Vec::new();
    for r in &regions {
        match route_region(r, &a.policy, a.iterations, env) {
            Ok(res) => {
                let s = res.final_snapshot();
                let _ = writeln!(
                    out,
                    "{}: wirelength {} vias {} drv {} ({:.3} s)",
                    res.region,
                    s.wirelength,
                    s.via_count,
                    s.drv_count(),
                    res.runtime_secs
                );
                results.push(res);
            }
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", r.name);
                return if e.is_input_error() { EXIT_INPUT } else { EXIT_VIOLATIONS };
            }
        }
    }
    if let Err(e) = write_route_reports(&a.out, &results, &env) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    if results.iter().all(|r| r.final_snapshot().drv_count() == 0) {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    }
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut inputs = Vec::new();
    for p in &a.regions {
        inputs.push(match load_region(p) {
            Ok(r) => BenchInput::Region(r),
            Err(e) => BenchInput::Failed {
                name: p.display().to_string(),
                error: e.to_string(),
            },
        });
    }
    let extra = match gather(&[], a.fixture, &a.gen) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    inputs.extend(extra.into_iter().map(BenchInput::Region));
    if inputs.is_empty() {
        let _ = writeln!(err, "error: no regions given");
        return EXIT_INPUT;
    }
    let env = a.rules.env();
    let rows = run_bench(&inputs, &a.policies, a.iterations, env);
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    let manifest = BenchManifest {
        version: env!("CARGO_PKG_VERSION").into(),
        regions: inputs
            .iter()
            .map(|i| match i {
                BenchInput::Region(r) => r.name.clone(),
                BenchInput::Failed { name, .. } => name.clone(),
            })
            .collect(),
        policies: a.policies.iter().map(|p| p.to_string()).collect(),
        iterations: a.iterations,
        rows: rows.len(),
        failures,
        weights: env.weights,
        rules: env.rules,
        generator: a.gen.generate.map(|count| GeneratorManifest {
            count,
            seed: a.gen.seed,
            params: a.gen.params(),
        }),
    };
    if let Err(e) = write_bench_reports(&a.out, &rows, &manifest, &env, a.timing) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    let _ = writeln!(out, "{} rows, {} failed, written to {}", rows.len(), failures, a.out.display());
    for r in rows.iter().filter(|r| r.outcome.is_err()) {
        let _ = writeln!(err, "failed: {} / {}: {}", r.region, r.policy, r.outcome.as_ref().unwrap_err());
    }
    if failures == 0 {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    }
}

/// Server configuration described by `a`.
pub fn server_config(a: &ServeArgs) -> Result<ServerConfig, ReportError> {
    let mut designs = gather(&a.region_set, false, &a.gen)?;
    if designs.is_empty() {
        designs.push(fig1_fixture());
    }
    let clip = a.clip_size.map(|size| ClipSpec {
        size,
        gcell: a.gcell_size,
        location: a.clip_location,
    });
    Ok(ServerConfig {
        mode: match a.mode {
            ModeArg::Trainer => Mode::Trainer,
            ModeArg::Validator => Mode::Validator,
        },
        catalog: build_region_set(&designs, clip, a.region_set_loop)?,
        clip_loop: a.clip_loop.max(1),
        thread_count: a.thread_count as usize,
        net_loop: a.net_loop.max(1),
        iteration_count: a.iteration_count,
        env: a.rules.env(),
    })
}

pub fn cmd_serve(a: &ServeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = match server_config(a) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let regions = config.catalog.len();
    match serve(a.addr.as_str(), config) {
        Ok(handle) => {
            let _ = writeln!(out, "listening on {} with {} regions", handle.addr(), regions);
            let _ = out.flush();
            handle.join();
            EXIT_OK
        }
        Err(e @ ServeError::Bind(_)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_BIND
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::OrderingPolicy;

    #[test]
    fn iteration_count_is_capped() {
        assert!(Cli::try_parse_from(["gridroute", "serve", "--iteration-count", "65"]).is_ok());
        assert!(Cli::try_parse_from(["gridroute", "serve", "--iteration-count", "66"]).is_err());
        assert!(Cli::try_parse_from(["gridroute", "serve", "--iteration-count", "0"]).is_err());
    }

    #[test]
    fn dims_and_pairs() {
        assert_eq!(parse_dim("4x5x2").unwrap(), GridDim::new(4, 5, 2).unwrap());
        assert!(parse_dim("4x5").is_err());
        assert_eq!(parse_pair("3, 1").unwrap(), (3, 1));
    }

    #[test]
    fn policy_flag() {
        let cli = Cli::try_parse_from(["gridroute", "route", "--policy", "exhaustive", "--fixture"]).unwrap();
        let Command::Route(a) = cli.command else { panic!() };
        assert_eq!(a.policy, PolicyChoice::Exhaustive);
        let cli = Cli::try_parse_from(["gridroute", "bench", "--policies", "fifo,random:3"]).unwrap();
        let Command::Bench(a) = cli.command else { panic!() };
        assert_eq!(
            a.policies,
            vec![
                PolicyChoice::Heuristic(OrderingPolicy::Fifo),
                PolicyChoice::Heuristic(OrderingPolicy::Random(3))
            ]
        );
    }
}
