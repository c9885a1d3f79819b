//! A* search on the grid graph and maze-to-tree net routing.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design_io::NetSpec;
use crate::grid::{Direction, GridError, GridGraph, MazeIndex, NetId, Passage, PinId, Pitch};
use crate::metrics::CostWeights;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouteError {
    #[error("search needs at least one source and one target")]
    EmptyEndpoints,
    #[error("endpoint {0} is outside the grid or not traversable")]
    BadEndpoint(MazeIndex),
    #[error("no path reaches any target")]
    NoPath,
    #[error("path nodes {0} and {1} are not lattice neighbors")]
    NotAdjacent(MazeIndex, MazeIndex),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// An ordered run of lattice nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    nodes: Vec<MazeIndex>,
    wirelength: u64,
    via_count: u64,
}

impl Path {
    /// Validates adjacency and drops immediate backtracks (`a, b, a` becomes `a`).
    pub fn new(nodes: Vec<MazeIndex>, pitch: Pitch) -> Result<Self, RouteError> {
        let mut canon: Vec<MazeIndex> = Vec::with_capacity(nodes.len());
        for n in nodes {
            if let Some(&last) = canon.last() {
                if last == n {
                    continue;
                }
                if Direction::between(last, n).is_none() {
                    return Err(RouteError::NotAdjacent(last, n));
                }
                if canon.len() >= 2 && canon[canon.len() - 2] == n {
                    canon.pop();
                    continue;
                }
            }
            canon.push(n);
        }
        let mut wirelength = 0;
        let mut via_count = 0;
        for w in canon.windows(2) {
            let d = Direction::between(w[0], w[1]).expect("checked adjacency");
            if d.is_via() {
                via_count += 1;
            } else {
                wirelength += pitch.length(d);
            }
        }
        Ok(Self {
            nodes: canon,
            wirelength,
            via_count,
        })
    }

    pub fn nodes(&self) -> &[MazeIndex] {
        &self.nodes
    }

    pub fn wirelength(&self) -> u64 {
        self.wirelength
    }

    pub fn via_count(&self) -> u64 {
        self.via_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// How the search treats nodes claimed by other nets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub weights: CostWeights,
    /// Net being routed; `None` treats every wired node as blocked.
    pub net: Option<NetId>,
    /// When set, foreign nodes become enterable at this extra cost.
    pub overlap_penalty: Option<u64>,
}

impl SearchOptions {
    pub fn new(weights: CostWeights) -> Self {
        Self {
            weights,
            net: None,
            overlap_penalty: None,
        }
    }

    pub fn for_net(mut self, net: NetId) -> Self {
        self.net = Some(net);
        self
    }

    pub fn permissive(mut self, penalty: u64) -> Self {
        self.overlap_penalty = Some(penalty);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub path: Path,
    pub cost: u64,
    pub expansions: usize,
}

pub fn astar(
    g: &GridGraph,
    sources: &[MazeIndex],
    targets: &[MazeIndex],
    weights: &CostWeights,
) -> Result<SearchResult, RouteError> {
    astar_with(g, sources, targets, &SearchOptions::new(*weights))
}

/// Minimum-cost path from any source to any target.
///
/// The heuristic is the weighted planar L1 distance to the nearest target;
/// every edge costs at least its weighted planar length, so it is consistent
/// and the first target popped is optimal. Ties break on `f`, then `h`,
/// then the linear node index.
pub fn astar_with(
    g: &GridGraph,
    sources: &[MazeIndex],
    targets: &[MazeIndex],
    opts: &SearchOptions,
) -> Result<SearchResult, RouteError> {
    if sources.is_empty() || targets.is_empty() {
        return Err(RouteError::EmptyEndpoints);
    }
    let dim = g.dim();
    for &e in sources.iter().chain(targets) {
        match g.node_at(e) {
            Some(n) if n.node_type.is_traversable() => {}
            _ => return Err(RouteError::BadEndpoint(e)),
        }
    }
    let pitch = g.pitch();
    let w = &opts.weights;
    let n = dim.node_count();
    let mut is_target = vec![false; n];
    for &t in targets {
        is_target[dim.linear(t)] = true;
    }
    let heuristic = |m: MazeIndex| -> u64 {
        targets
            .iter()
            .map(|t| m.x.abs_diff(t.x) as u64 * pitch.x as u64 + m.y.abs_diff(t.y) as u64 * pitch.y as u64)
            .min()
            .unwrap_or(0)
            * w.wirelength
    };

    let mut best = vec![u64::MAX; n];
    let mut parent = vec![u32::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        let i = dim.linear(s);
        if best[i] != 0 {
            best[i] = 0;
            let h = heuristic(s);
            heap.push(Reverse((h, h, i)));
        }
    }

    let mut expansions = 0;
    while let Some(Reverse((f, h, i))) = heap.pop() {
        if closed[i] || f - h != best[i] {
            continue;
        }
        closed[i] = true;
        expansions += 1;
        if is_target[i] {
            let mut rev = vec![dim.from_linear(i)];
            let mut cur = i;
            while parent[cur] != u32::MAX {
                cur = parent[cur] as usize;
                rev.push(dim.from_linear(cur));
            }
            rev.reverse();
            return Ok(SearchResult {
                path: Path::new(rev, pitch)?,
                cost: best[i],
                expansions,
            });
        }
        let here = dim.from_linear(i);
        for d in Direction::ALL {
            let Some(next) = dim.step(here, d) else { continue };
            let j = dim.linear(next);
            if closed[j] {
                continue;
            }
            let extra = match g.passage(next, opts.net) {
                Passage::Free => 0,
                Passage::Overlap => match opts.overlap_penalty {
                    Some(p) => p,
                    None => continue,
                },
                Passage::Blocked => continue,
            };
            let step = g.edge_cost(here, d, w).expect("in-bounds edge") + extra;
            let cand = best[i] + step;
            if cand < best[j] {
                best[j] = cand;
                parent[j] = i as u32;
                let hj = heuristic(next);
                heap.push(Reverse((cand + hj, hj, j)));
            }
        }
    }
    Err(RouteError::NoPath)
}

/// The wiring tree of one net.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutedNet {
    pub net: NetId,
    pub paths: Vec<Path>,
    pub connected: Vec<PinId>,
    pub unconnected: Vec<PinId>,
}

impl RoutedNet {
    pub fn wirelength(&self) -> u64 {
        self.paths.iter().map(Path::wirelength).sum()
    }

    pub fn via_count(&self) -> u64 {
        self.paths.iter().map(Path::via_count).sum()
    }

    pub fn is_fully_connected(&self) -> bool {
        self.unconnected.is_empty()
    }

    /// Distinct tree nodes, sorted.
    pub fn nodes(&self) -> Vec<MazeIndex> {
        let set: BTreeSet<MazeIndex> = self.paths.iter().flat_map(|p| p.nodes().iter().copied()).collect();
        set.into_iter().collect()
    }

    /// Distinct undirected tree edges, each as `(lower, higher)`.
    pub fn edges(&self) -> Vec<(MazeIndex, MazeIndex)> {
        let set: BTreeSet<(MazeIndex, MazeIndex)> = self
            .paths
            .iter()
            .flat_map(|p| p.nodes().windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))))
            .collect();
        set.into_iter().collect()
    }
}

/// Routes a net by growing a tree from pin 0: each search runs from every
/// tree node to the access points of all still-unconnected pins, and the
/// pin it reaches joins the tree. Pins that cannot be reached are reported
/// as unconnected. The tree is recorded on the grid as it grows.
pub fn route_net(g: &mut GridGraph, net: &NetSpec, opts: &SearchOptions) -> Result<RoutedNet, RouteError> {
    let opts = SearchOptions {
        net: Some(net.id),
        ..*opts
    };
    let mut connected: BTreeSet<PinId> = BTreeSet::new();
    let mut paths = Vec::new();
    let Some(first) = net.pins.first() else {
        return Ok(RoutedNet {
            net: net.id,
            paths,
            connected: Vec::new(),
            unconnected: Vec::new(),
        });
    };
    connected.insert(first.id);
    let mut tree: Vec<MazeIndex> = first.access_points.clone();
    let mut in_tree: HashSet<MazeIndex> = tree.iter().copied().collect();

    loop {
        let pending: Vec<_> = net.pins.iter().filter(|p| !connected.contains(&p.id)).collect();
        if pending.is_empty() {
            break;
        }
        let targets: Vec<MazeIndex> = pending.iter().flat_map(|p| p.access_points.iter().copied()).collect();
        let found = match astar_with(g, &tree, &targets, &opts) {
            Ok(r) => r,
            Err(RouteError::NoPath) => break,
            Err(e) => return Err(e),
        };
        // Start the path at its last tree node so no tree edge is counted twice.
        let nodes = found.path.nodes();
        let start = nodes.iter().rposition(|m| in_tree.contains(m)).unwrap_or(0);
        let path = Path::new(nodes[start..].to_vec(), g.pitch())?;
        for p in &pending {
            if p.access_points.iter().any(|ap| path.nodes().contains(ap)) {
                connected.insert(p.id);
            }
        }
        if paths.is_empty() {
            // Only the access point actually used stays a source.
            tree.clear();
            in_tree.clear();
        }
        for &m in path.nodes() {
            if in_tree.insert(m) {
                tree.push(m);
            }
        }
        g.occupy_path(net.id, path.nodes())?;
        paths.push(path);
    }

    let unconnected = net.pins.iter().map(|p| p.id).filter(|id| !connected.contains(id)).collect();
    Ok(RoutedNet {
        net: net.id,
        paths,
        connected: connected.into_iter().collect(),
        unconnected,
    })
}

/// Removes a routed net's wiring from the grid.
pub fn ripup(g: &mut GridGraph, routed: &RoutedNet) {
    g.release_net(routed.net);
}
