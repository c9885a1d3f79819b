//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gridroute::design_io::{generate_region, GeneratorParams, RegionDescriptor};
use gridroute::env::{NetFeatures, OrderingObservation, RoutingObservation, RoutingStatus, Tensor3};
use gridroute::grid::{Direction, GridDim, GridGraph, MazeIndex, NodeSpec, NodeType, Passage, Pitch};
use gridroute::metrics::{CostWeights, DrvCounts, MetricsSnapshot};
use gridroute::protocol::{Action, ErrorCode, Message, Observation, RegionRef, StepInfo, TaskKind};
use gridroute::router::SearchOptions;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random search instance: grid, endpoints and options.
pub struct SearchCase {
    pub grid: GridGraph,
    pub sources: Vec<MazeIndex>,
    pub targets: Vec<MazeIndex>,
    pub opts: SearchOptions,
}

/// Grid up to 8x8x3 with blockages, access points of three nets, foreign
/// wiring, random base costs, history costs, pitch and weights.
pub fn random_search_case(rng: &mut ChaCha8Rng) -> SearchCase {
    let dim = GridDim {
        dx: rng.gen_range(1..=8),
        dy: rng.gen_range(2..=8),
        dz: rng.gen_range(1..=3),
    };
    let pitch = Pitch {
        x: rng.gen_range(1..=4),
        y: rng.gen_range(1..=4),
    };
    let mut table = Vec::new();
    for idx in dim.indices() {
        let mut spec = NodeSpec::normal(idx);
        let roll: f64 = rng.gen();
        if roll < 0.15 {
            spec.node_type = NodeType::Blockage;
        } else if roll < 0.18 {
            spec.node_type = NodeType::NotExist;
        } else if roll < 0.24 {
            spec.node_type = NodeType::Access;
            spec.net = Some(rng.gen_range(0..3));
            spec.pin = Some(0);
        }
        table.push(spec);
    }
    let mut grid = GridGraph::from_nodes(dim, (0, 0), pitch, table).expect("valid table");
    for idx in dim.indices() {
        for d in Direction::ALL {
            if rng.gen_bool(0.2) {
                grid.set_base_cost(idx, d, rng.gen_range(0..30)).unwrap();
            }
            if dim.step(idx, d).is_some() && rng.gen_bool(0.15) {
                grid.add_history_cost(idx, d, rng.gen_range(1..12)).unwrap();
            }
        }
        if rng.gen_bool(0.08) {
            grid.occupy_path(rng.gen_range(0..3), &[idx]).unwrap();
        }
    }
    let weights = CostWeights {
        wirelength: rng.gen_range(1..=3),
        via: rng.gen_range(1..=20),
        drv: 1000,
    };
    let mut opts = SearchOptions::new(weights);
    if rng.gen_bool(0.7) {
        opts = opts.for_net(rng.gen_range(0..3));
    }
    if rng.gen_bool(0.5) {
        opts = opts.permissive(rng.gen_range(0..200));
    }
    let mut open: Vec<MazeIndex> = dim
        .indices()
        .filter(|&m| grid.node_at(m).unwrap().node_type.is_traversable())
        .collect();
    if open.len() < 2 {
        // Guarantee two endpoints exist.
        return random_search_case(rng);
    }
    open.shuffle(rng);
    let ns = rng.gen_range(1..=3.min(open.len() - 1));
    let nt = rng.gen_range(1..=3.min(open.len() - ns));
    SearchCase {
        sources: open[..ns].to_vec(),
        targets: open[ns..ns + nt].to_vec(),
        grid,
        opts,
    }
}

/// Edge cost rebuilt from node fields: geometric length, the larger of the
/// two facing base costs, and the history on the edge.
pub fn oracle_edge_cost(g: &GridGraph, from: MazeIndex, d: Direction, w: &CostWeights) -> Option<u64> {
    let to = g.dim().step(from, d)?;
    let a = g.node_at(from)?;
    let b = g.node_at(to)?;
    let geometric = match d {
        Direction::Up | Direction::Down => w.via,
        Direction::North | Direction::South => w.wirelength * g.pitch().y as u64,
        Direction::East | Direction::West => w.wirelength * g.pitch().x as u64,
    };
    let base = a.cost[d.index()].max(b.cost[d.opposite().index()]) as u64;
    Some(geometric + base + g.history(from, d) as u64)
}

/// Multi-source shortest path cost by plain Dijkstra (petgraph) over an
/// explicitly built directed graph with a virtual super-source.
pub fn dijkstra_cost(case: &SearchCase) -> Option<u64> {
    let g = &case.grid;
    let dim = g.dim();
    let w = &case.opts.weights;
    let mut graph: DiGraph<(), u64> = DiGraph::new();
    let ids: Vec<NodeIndex> = (0..dim.node_count()).map(|_| graph.add_node(())).collect();
    let root = graph.add_node(());
    for from in dim.indices() {
        for d in Direction::ALL {
            let Some(to) = dim.step(from, d) else { continue };
            let extra = match g.passage(to, case.opts.net) {
                Passage::Free => 0,
                Passage::Overlap => match case.opts.overlap_penalty {
                    Some(p) => p,
                    None => continue,
                },
                Passage::Blocked => continue,
            };
            let cost = oracle_edge_cost(g, from, d, w).unwrap() + extra;
            graph.add_edge(ids[dim.linear(from)], ids[dim.linear(to)], cost);
        }
    }
    for &s in &case.sources {
        graph.add_edge(root, ids[dim.linear(s)], 0);
    }
    let dist = petgraph::algo::dijkstra(&graph, root, None, |e| *e.weight());
    case.targets.iter().filter_map(|t| dist.get(&ids[dim.linear(*t)]).copied()).min()
}

/// Exact minimum Steiner tree length (Dreyfus-Wagner) over planar edges of
/// traversable nodes, each weighted by its pitch length.
pub fn steiner_length(g: &GridGraph, terminals: &[MazeIndex]) -> Option<u64> {
    let dim = g.dim();
    let n = dim.node_count();
    let k = terminals.len();
    if k <= 1 {
        return Some(0);
    }
    let open: Vec<bool> = (0..n)
        .map(|i| g.node_at(dim.from_linear(i)).unwrap().node_type.is_traversable())
        .collect();
    const INF: u64 = u64::MAX / 4;
    // All-pairs distances by Floyd-Warshall; regions here are tiny.
    let mut dist = vec![vec![INF; n]; n];
    for i in 0..n {
        if !open[i] {
            continue;
        }
        dist[i][i] = 0;
        let m = dim.from_linear(i);
        for d in [Direction::North, Direction::South, Direction::East, Direction::West, Direction::Up, Direction::Down] {
            if let Some(t) = dim.step(m, d) {
                let j = dim.linear(t);
                if open[j] {
                    let len = if d.is_via() { 0 } else { g.pitch().length(d) };
                    dist[i][j] = dist[i][j].min(len);
                }
            }
        }
    }
    for via in 0..n {
        for i in 0..n {
            if dist[i][via] == INF {
                continue;
            }
            for j in 0..n {
                let c = dist[i][via] + dist[via][j];
                if c < dist[i][j] {
                    dist[i][j] = c;
                }
            }
        }
    }
    let full = (1usize << k) - 1;
    let mut dp = vec![vec![INF; n]; full + 1];
    for (t, &m) in terminals.iter().enumerate() {
        dp[1 << t] = dist[dim.linear(m)].clone();
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        for v in 0..n {
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                let c = dp[sub][v].saturating_add(dp[mask ^ sub][v]);
                if c < dp[mask][v] {
                    dp[mask][v] = c;
                }
                sub = (sub - 1) & mask;
            }
        }
        let merged = dp[mask].clone();
        for v in 0..n {
            let best = (0..n).map(|u| merged[u].saturating_add(dist[u][v])).min().unwrap();
            dp[mask][v] = dp[mask][v].min(best);
        }
    }
    let best = *dp[full].iter().min().unwrap();
    (best < INF).then_some(best)
}

pub fn congested_params() -> GeneratorParams {
    GeneratorParams {
        dim: GridDim { dx: 8, dy: 8, dz: 2 },
        net_count: 9,
        pins_per_net: (2, 4),
        access_points_per_pin: (1, 2),
        blockage_density: 0.12,
        pitch: Pitch { x: 1, y: 1 },
    }
}

/// Seeded regions, skipping seeds whose placement cannot be satisfied.
pub fn seeded_regions(count: usize, first_seed: u64, params: &GeneratorParams) -> Vec<RegionDescriptor> {
    (first_seed..)
        .filter_map(|s| generate_region(s, params).ok())
        .take(count)
        .collect()
}

fn random_tensor(rng: &mut ChaCha8Rng, dim: GridDim) -> Tensor3 {
    let mut t = Tensor3::zeros(dim);
    for idx in dim.indices() {
        if rng.gen_bool(0.3) {
            t.set(idx, 1);
        }
    }
    t
}

fn random_index(rng: &mut ChaCha8Rng) -> MazeIndex {
    MazeIndex::new(rng.gen_range(0..64), rng.gen_range(0..64), rng.gen_range(0..4))
}

fn random_snapshot(rng: &mut ChaCha8Rng) -> MetricsSnapshot {
    MetricsSnapshot {
        wirelength: rng.gen_range(0..1_000_000),
        via_count: rng.gen_range(0..100_000),
        drv: DrvCounts {
            open: rng.gen_range(0..50),
            short: rng.gen_range(0..50),
            spacing: rng.gen_range(0..50),
            min_area: rng.gen_range(0..50),
        },
        runtime_secs: if rng.gen_bool(0.5) { 0.0 } else { rng.gen::<f64>() * 100.0 },
    }
}

fn random_observation(rng: &mut ChaCha8Rng) -> Observation {
    if rng.gen_bool(0.5) {
        let dim = GridDim {
            dx: rng.gen_range(1..=4),
            dy: rng.gen_range(1..=4),
            dz: rng.gen_range(1..=2),
        };
        let nets: Vec<NetFeatures> = (0..rng.gen_range(0..3))
            .map(|net| NetFeatures {
                net,
                channels: (0..7).map(|_| random_tensor(rng, dim)).collect(),
            })
            .collect();
        Observation::Ordering(OrderingObservation {
            dim: [dim.dx, dim.dy, dim.dz],
            obstacle: random_tensor(rng, dim),
            actions: nets.iter().map(|n| n.net).collect(),
            nets,
        })
    } else {
        let mut vector = [0i64; 12];
        for v in &mut vector {
            *v = match rng.gen_range(0..3) {
                0 => i64::MAX,
                1 => rng.gen_range(-40..40),
                _ => rng.gen_range(0..5000),
            };
        }
        Observation::Routing(RoutingObservation { vector })
    }
}

fn random_text(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[char] = &['a', 'z', '_', '0', '9', ' ', '"', '\\', '\n', 'é', '→', '{', '}'];
    (0..rng.gen_range(0..16)).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

fn opt<T>(rng: &mut ChaCha8Rng, f: impl FnOnce(&mut ChaCha8Rng) -> T) -> Option<T> {
    if rng.gen_bool(0.5) {
        Some(f(rng))
    } else {
        None
    }
}

/// A random message of any type with every optional field exercised.
pub fn random_message(rng: &mut ChaCha8Rng) -> Message {
    let session = rng.gen_range(0..u64::MAX / 2);
    match rng.gen_range(0..8) {
        0 => Message::Hello {
            v: rng.gen_range(0..4),
            session: opt(rng, |r| r.gen_range(1..1000)),
        },
        1 => Message::Reset {
            session,
            task: if rng.gen_bool(0.5) { TaskKind::Ordering } else { TaskKind::Routing },
            region: opt(rng, |r| {
                if r.gen_bool(0.5) {
                    RegionRef::Name(random_text(r))
                } else {
                    RegionRef::Inline(random_text(r))
                }
            }),
            net: opt(rng, |r| r.gen_range(0..100)),
            seed: opt(rng, |r| r.gen()),
        },
        2 => Message::Observation {
            session,
            region: random_text(rng),
            observation: random_observation(rng),
            done: rng.gen(),
        },
        3 => Message::Step {
            session,
            action: if rng.gen_bool(0.5) {
                Action::Net(rng.gen_range(0..100))
            } else {
                Action::Move {
                    start: opt(rng, random_index),
                    d: rng.gen_range(0..8),
                    s: rng.gen_range(0..10),
                }
            },
        },
        4 => {
            let half: i64 = rng.gen_range(-5_000_000..5_000_000);
            Message::Transition {
                session,
                observation: random_observation(rng),
                reward: half as f64 / 2.0,
                reward_half_units: half,
                done: rng.gen(),
                info: opt(rng, |r| StepInfo {
                    net: r.gen_range(0..50),
                    attempt: r.gen_range(0..5),
                    status: *[
                        RoutingStatus::Running,
                        RoutingStatus::Completed,
                        RoutingStatus::Illegal,
                        RoutingStatus::Truncated,
                    ]
                    .choose(r)
                    .unwrap(),
                }),
            }
        }
        5 => Message::Metrics {
            session,
            snapshot: opt(rng, random_snapshot),
            trend: (0..rng.gen_range(0..4)).map(|_| random_snapshot(rng)).collect(),
        },
        6 => Message::Error {
            session: opt(rng, |r| r.gen_range(1..1000)),
            code: *[
                ErrorCode::Protocol,
                ErrorCode::Version,
                ErrorCode::Session,
                ErrorCode::NoEpisode,
                ErrorCode::EpisodeDone,
                ErrorCode::IllegalAction,
                ErrorCode::UnknownRegion,
                ErrorCode::InvalidRegion,
                ErrorCode::BadRequest,
                ErrorCode::Internal,
            ]
            .choose(rng)
            .unwrap(),
            message: random_text(rng),
        },
        _ => Message::Close { session },
    }
}

/// A field every message of this type must carry.
pub fn required_field(type_name: &str) -> &'static str {
    match type_name {
        "HELLO" => "v",
        "OBSERVATION" => "observation",
        "STEP" => "action",
        "TRANSITION" => "reward_half_units",
        "ERROR" => "code",
        _ => "session",
    }
}

/// Net id to routed wirelength for a map of routed nets.
pub fn wirelengths(routed: &BTreeMap<u32, gridroute::router::RoutedNet>) -> BTreeMap<u32, u64> {
    routed.iter().map(|(&n, r)| (n, r.wirelength())).collect()
}
