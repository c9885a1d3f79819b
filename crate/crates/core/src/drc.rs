//! Violation detection over the occupied grid.
//!
//! All checks are read-only. Spacing is an L-infinity lattice distance on
//! one layer, and minimum area is approximated by the planar wire length of
//! each same-layer metal piece.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::grid::{Direction, GridGraph, MazeIndex, NetId, NodeType};
use crate::metrics::DrvCounts;
use crate::router::RoutedNet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    Open,
    Short,
    Spacing,
    MinArea,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Node(MazeIndex),
    Pair(MazeIndex, MazeIndex),
    Net(NetId),
}

impl Location {
    /// Grid nodes the violation sits on.
    pub fn nodes(&self) -> Vec<MazeIndex> {
        match *self {
            Location::Node(a) => vec![a],
            Location::Pair(a, b) => vec![a, b],
            Location::Net(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
    /// Two distinct nets for SHORT and SPACING, one otherwise; ascending.
    pub nets: Vec<NetId>,
}

/// Thresholds for the lite checks; zero disables a check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DrcRules {
    /// Same-layer L-infinity lattice distance two nets must keep.
    pub min_sep: u32,
    /// Minimum planar DBU length of a same-layer metal piece.
    pub min_len: u64,
}

/// One OPEN per net with an unconnected pin.
pub fn check_open<'a>(routed: impl IntoIterator<Item = &'a RoutedNet>) -> Vec<Violation> {
    routed
        .into_iter()
        .filter(|r| !r.is_fully_connected())
        .map(|r| Violation {
            kind: ViolationKind::Open,
            location: Location::Net(r.net),
            nets: vec![r.net],
        })
        .collect()
}

/// One SHORT per node claimed by two or more nets, naming the two lowest.
pub fn check_short(g: &GridGraph) -> Vec<Violation> {
    g.dim()
        .indices()
        .filter_map(|idx| {
            let claims = g.claims(idx);
            (claims.len() >= 2).then(|| Violation {
                kind: ViolationKind::Short,
                location: Location::Node(idx),
                nets: vec![claims[0], claims[1]],
            })
        })
        .collect()
}

fn lowest_foreign_pair(a: &[NetId], b: &[NetId]) -> Option<(NetId, NetId)> {
    let mut best: Option<(NetId, NetId)> = None;
    for &x in a {
        for &y in b {
            if x != y {
                let pair = (x.min(y), x.max(y));
                best = Some(best.map_or(pair, |p| p.min(pair)));
            }
        }
    }
    best
}

/// One SPACING per unordered pair of same-layer wired nodes held by
/// different nets closer than `min_sep`.
pub fn check_spacing_lite(g: &GridGraph, min_sep: u32) -> Vec<Violation> {
    if min_sep == 0 {
        return Vec::new();
    }
    let dim = g.dim();
    let reach = min_sep - 1;
    let mut out = Vec::new();
    for a in dim.indices() {
        let ca = g.claims(a);
        if ca.is_empty() {
            continue;
        }
        let ia = dim.linear(a);
        let ys = a.y.saturating_sub(reach)..=(a.y + reach).min(dim.dy - 1);
        for y in ys {
            for x in a.x.saturating_sub(reach)..=(a.x + reach).min(dim.dx - 1) {
                let b = MazeIndex::new(x, y, a.z);
                if dim.linear(b) <= ia {
                    continue;
                }
                let cb = g.claims(b);
                if let Some((n1, n2)) = lowest_foreign_pair(&ca, &cb) {
                    out.push(Violation {
                        kind: ViolationKind::Spacing,
                        location: Location::Pair(a, b),
                        nets: vec![n1, n2],
                    });
                }
            }
        }
    }
    out
}

/// One MIN_AREA per same-layer metal piece of `routed` shorter than
/// `min_len` that has an end landing on neither a via nor an access point
/// of the net.
pub fn check_min_area_lite(g: &GridGraph, routed: &RoutedNet, min_len: u64) -> Vec<Violation> {
    if min_len == 0 {
        return Vec::new();
    }
    let pitch = g.pitch();
    let nodes = routed.nodes();
    let mut planar: BTreeMap<MazeIndex, Vec<MazeIndex>> = nodes.iter().map(|&n| (n, Vec::new())).collect();
    let mut has_via: BTreeSet<MazeIndex> = BTreeSet::new();
    for (a, b) in routed.edges() {
        if a.z != b.z {
            has_via.insert(a);
            has_via.insert(b);
        } else {
            planar.get_mut(&a).expect("tree node").push(b);
            planar.get_mut(&b).expect("tree node").push(a);
        }
    }
    let touches = |n: MazeIndex| {
        has_via.contains(&n)
            || g
                .node_at(n)
                .is_some_and(|node| node.node_type == NodeType::Access && node.net == Some(routed.net))
    };

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &nodes {
        if !seen.insert(start) {
            continue;
        }
        let mut piece = vec![start];
        let mut stack = vec![start];
        let mut doubled_len = 0u64;
        while let Some(n) = stack.pop() {
            for &m in &planar[&n] {
                let d = Direction::between(n, m).expect("tree edge");
                doubled_len += pitch.length(d);
                if seen.insert(m) {
                    piece.push(m);
                    stack.push(m);
                }
            }
        }
        let length = doubled_len / 2;
        if length >= min_len {
            continue;
        }
        let bare_end = if piece.len() == 1 {
            !touches(start)
        } else {
            piece.iter().any(|&n| planar[&n].len() == 1 && !touches(n))
        };
        if bare_end {
            out.push(Violation {
                kind: ViolationKind::MinArea,
                location: Location::Node(*piece.iter().min().expect("non-empty")),
                nets: vec![routed.net],
            });
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrcReport {
    pub violations: Vec<Violation>,
}

impl DrcReport {
    pub fn counts(&self) -> DrvCounts {
        let mut c = DrvCounts::default();
        for v in &self.violations {
            match v.kind {
                ViolationKind::Open => c.open += 1,
                ViolationKind::Short => c.short += 1,
                ViolationKind::Spacing => c.spacing += 1,
                ViolationKind::MinArea => c.min_area += 1,
            }
        }
        c
    }

    pub fn drv_count(&self) -> u64 {
        self.violations.len() as u64
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Every net named by a violation, plus every claimant of a violating node.
    pub fn implicated_nets(&self, g: &GridGraph) -> BTreeSet<NetId> {
        let mut nets = BTreeSet::new();
        for v in &self.violations {
            nets.extend(v.nets.iter().copied());
            for n in v.location.nodes() {
                nets.extend(g.claims(n));
            }
        }
        nets
    }
}

/// Runs every check. Opens are included only when `include_opens` is set,
/// since a net that has not been routed yet is not open.
pub fn check_all<'a>(
    g: &GridGraph,
    routed: impl IntoIterator<Item = &'a RoutedNet> + Clone,
    rules: &DrcRules,
    include_opens: bool,
) -> DrcReport {
    let mut violations = Vec::new();
    if include_opens {
        violations.extend(check_open(routed.clone()));
    }
    violations.extend(check_short(g));
    violations.extend(check_spacing_lite(g, rules.min_sep));
    for r in routed {
        violations.extend(check_min_area_lite(g, r, rules.min_len));
    }
    DrcReport { violations }
}

/// Total violation count: opens, shorts, spacing and min-area together.
pub fn drv_count(report: &DrcReport) -> u64 {
    report.drv_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridDim, NodeSpec, Pitch};
    use crate::router::Path;

    fn m(x: u32, y: u32, z: u32) -> MazeIndex {
        MazeIndex::new(x, y, z)
    }

    fn grid(dx: u32, dy: u32, dz: u32) -> GridGraph {
        let dim = GridDim::new(dx, dy, dz).unwrap();
        GridGraph::from_nodes(dim, (0, 0), Pitch::default(), dim.indices().map(NodeSpec::normal).collect()).unwrap()
    }

    fn routed(net: NetId, paths: &[&[MazeIndex]], unconnected: &[u32]) -> RoutedNet {
        RoutedNet {
            net,
            paths: paths.iter().map(|p| Path::new(p.to_vec(), Pitch::default()).unwrap()).collect(),
            connected: vec![0],
            unconnected: unconnected.to_vec(),
        }
    }

    #[test]
    fn opens() {
        let a = routed(0, &[], &[]);
        let b = routed(1, &[], &[1]);
        let c = routed(2, &[], &[1, 2]);
        assert!(check_open([&a]).is_empty());
        assert_eq!(check_open([&a, &b]).len(), 1);
        assert_eq!(check_open([&a, &b, &c]).len(), 2);
    }

    #[test]
    fn shorts() {
        let mut g = grid(3, 3, 1);
        g.occupy_path(1, &[m(0, 0, 0), m(1, 0, 0)]).unwrap();
        g.occupy_path(2, &[m(0, 2, 0), m(1, 2, 0)]).unwrap();
        assert!(check_short(&g).is_empty());
        g.occupy_path(1, &[m(1, 0, 0), m(1, 0, 0)]).unwrap();
        assert!(check_short(&g).is_empty());
        g.occupy_path(2, &[m(1, 0, 0)]).unwrap();
        let s = check_short(&g);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].nets, vec![1, 2]);
    }

    #[test]
    fn spacing() {
        let mut g = grid(3, 3, 1);
        g.occupy_path(1, &[m(0, 0, 0)]).unwrap();
        g.occupy_path(2, &[m(1, 0, 0)]).unwrap();
        assert!(check_spacing_lite(&g, 0).is_empty());
        assert_eq!(check_spacing_lite(&g, 2).len(), 1);
        assert!(check_spacing_lite(&g, 1).is_empty());
    }

    #[test]
    fn min_area_stub() {
        let g = grid(4, 1, 2);
        // Via up, one unit east on layer 1, nothing at the far end.
        let r = routed(0, &[&[m(0, 0, 0), m(0, 0, 1), m(1, 0, 1)]], &[]);
        assert!(check_min_area_lite(&g, &r, 0).is_empty());
        let v = check_min_area_lite(&g, &r, 2);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].location, Location::Node(m(0, 0, 1)));
        // Exactly min_len long passes.
        let r = routed(0, &[&[m(0, 0, 0), m(0, 0, 1), m(1, 0, 1), m(2, 0, 1)]], &[]);
        assert!(check_min_area_lite(&g, &r, 2).is_empty());
        // Short but landing on vias at both ends passes.
        let r = routed(0, &[&[m(0, 0, 0), m(0, 0, 1), m(1, 0, 1), m(1, 0, 0)]], &[]);
        assert!(check_min_area_lite(&g, &r, 5).is_empty());
    }

    #[test]
    fn counting_is_stable() {
        let mut g = grid(3, 3, 1);
        g.occupy_path(1, &[m(1, 1, 0)]).unwrap();
        g.occupy_path(2, &[m(1, 1, 0)]).unwrap();
        let open = routed(3, &[], &[1]);
        let rules = DrcRules::default();
        let r1 = check_all(&g, [&open], &rules, true);
        let r2 = check_all(&g, [&open], &rules, true);
        assert_eq!(r1, r2);
        assert_eq!(drv_count(&r1), 2);
        assert_eq!(r1.counts().open, 1);
        assert_eq!(r1.counts().short, 1);
    }

    #[test]
    fn blockage_never_removes_short() {
        let mut g = grid(3, 1, 1);
        g.occupy_path(1, &[m(1, 0, 0)]).unwrap();
        g.occupy_path(2, &[m(1, 0, 0)]).unwrap();
        let before = check_short(&g);
        g.block(m(1, 0, 0), NodeType::Blockage).unwrap();
        g.block(m(0, 0, 0), NodeType::Blockage).unwrap();
        assert_eq!(check_short(&g), before);
    }
}
