mod common;

use gridroute::design_io::{generate_region, parse_region, serialize_region, GeneratorParams, RegionDescriptor};
use gridroute::drc::DrcRules;
use gridroute::env::{EnvConfig, Mode, OrderingEpisode, RoutingAction, RoutingEpisode, RoutingStatus};
use gridroute::grid::{Direction, GridDim, GridGraph};
use gridroute::metrics::HalfUnits;
use gridroute::router::{astar, RouteError};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn region_strategy() -> impl Strategy<Value = RegionDescriptor> {
    (any::<u64>(), 2u32..8, 2u32..8, 1u32..3, 1u32..6, 1u32..3).prop_filter_map(
        "placement must fit",
        |(seed, dx, dy, dz, nets, aps)| {
            let params = GeneratorParams {
                dim: GridDim { dx, dy, dz },
                net_count: nets,
                access_points_per_pin: (1, aps),
                ..GeneratorParams::default()
            };
            generate_region(seed, &params).ok()
        },
    )
}

fn config(min_sep: u32, min_len: u64) -> EnvConfig {
    EnvConfig {
        rules: DrcRules { min_sep, min_len },
        ..EnvConfig::default()
    }
}

/// Rewards and observations of a seeded random ordering episode.
fn ordering_run(region: &RegionDescriptor, seed: u64, cfg: EnvConfig) -> (Vec<HalfUnits>, Vec<String>) {
    let (mut ep, obs) = OrderingEpisode::reset(region.clone(), Mode::Trainer, seed, cfg).unwrap();
    let mut rewards = Vec::new();
    let mut seen = vec![serde_json::to_string(&obs).unwrap()];
    while let Some(n) = ep.sample_action() {
        let t = ep.step(n).unwrap();
        rewards.push(t.reward);
        seen.push(serde_json::to_string(&t.observation).unwrap());
    }
    (rewards, seen)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ordering_is_deterministic(region in region_strategy(), seed in any::<u64>(), sep in 0u32..3) {
        let cfg = config(sep, 2);
        prop_assert_eq!(ordering_run(&region, seed, cfg), ordering_run(&region, seed, cfg));
    }

    #[test]
    fn ordering_contracts_one_net_per_step(region in region_strategy(), seed in any::<u64>()) {
        let (mut ep, obs) = OrderingEpisode::reset(region.clone(), Mode::Validator, seed, EnvConfig::default()).unwrap();
        prop_assert_eq!(obs.actions, region.net_ids());
        let mut left = region.net_ids().len();
        while let Some(n) = ep.sample_action() {
            prop_assert_eq!(ep.observe(), ep.observe());
            let t = ep.step(n).unwrap();
            left -= 1;
            prop_assert_eq!(t.observation.actions.len(), left);
            prop_assert_eq!(t.done, left == 0);
            prop_assert!(ep.step(n).is_err(), "a routed net was accepted twice");
        }
        // Strict routing never overlaps another net.
        prop_assert_eq!(ep.snapshot().drv.short, 0);
    }

    #[test]
    fn routing_never_reports_below_t_min(region in region_strategy(), seed in any::<u64>()) {
        let net = region.net_ids()[0];
        let (mut ep, _) = RoutingEpisode::reset(&region, net, seed, EnvConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut total = HalfUnits::ZERO;
        for _ in 0..200 {
            if ep.is_done() {
                break;
            }
            let d = Direction::ALL[rand::Rng::gen_range(&mut rng, 0..6)];
            let steps = rand::Rng::gen_range(&mut rng, 0..3);
            let t = ep.step(RoutingAction { start: None, direction: d, steps }).unwrap();
            total += t.reward;
            prop_assert_eq!(total, ep.cumulative());
            if !t.done {
                prop_assert!(ep.cumulative() >= ep.t_min());
            }
        }
        if ep.status() == RoutingStatus::Truncated {
            prop_assert_eq!(ep.cumulative(), ep.t_min());
        }
        if ep.status() == RoutingStatus::Completed && region.net(net).unwrap().pins.len() > 1 {
            prop_assert!(ep.routed_net().is_fully_connected());
        }
    }

    #[test]
    fn routing_replays_identically(region in region_strategy(), seed in any::<u64>()) {
        let run = |r: &RegionDescriptor| {
            let (mut ep, obs) = RoutingEpisode::reset(r, r.net_ids()[0], seed, EnvConfig::default()).unwrap();
            let mut out = vec![(obs, HalfUnits::ZERO)];
            while !ep.is_done() && out.len() < 100 {
                let a = ep.sample_action();
                let t = ep.step(a).unwrap();
                out.push((t.observation, t.reward));
            }
            (out, ep.snapshot())
        };
        prop_assert_eq!(run(&region), run(&region));
    }

    #[test]
    fn region_file_round_trips(region in region_strategy()) {
        let text = serialize_region(&region);
        let back = parse_region(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &region);
        prop_assert_eq!(serialize_region(&back), text);
    }

    #[test]
    fn astar_is_symmetric_on_bare_grids(region in region_strategy()) {
        let grid = GridGraph::from_region(&region).unwrap();
        let aps: Vec<_> = region.access_points().map(|a| a.maze_index).collect();
        let (a, b) = (aps[0], aps[aps.len() - 1]);
        let w = EnvConfig::default().weights;
        match (astar(&grid, &[a], &[b], &w), astar(&grid, &[b], &[a], &w)) {
            (Ok(x), Ok(y)) => {
                prop_assert_eq!(x.cost, y.cost);
                let l1 = (a.x.abs_diff(b.x) + a.y.abs_diff(b.y)) as u64;
                prop_assert!(x.cost >= l1 * w.wirelength);
            }
            (Err(RouteError::NoPath), Err(RouteError::NoPath)) => {}
            other => prop_assert!(false, "asymmetric result {:?}", other),
        }
    }
}

#[test]
fn a_star_matches_dijkstra_on_extra_seeds() {
    for seed in 1000..1100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let case = common::random_search_case(&mut rng);
        let got = gridroute::router::astar_with(&case.grid, &case.sources, &case.targets, &case.opts)
            .ok()
            .map(|r| r.cost);
        assert_eq!(got, common::dijkstra_cost(&case), "seed {seed}");
    }
}
