//! Ghost preimages between signed discontinuities and the cycle test behind
//! condition A3.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::attractor::Attractor;
use crate::dynamics::ItmMap;
use crate::numerics::{Side, SignedPoint};

/// `β_index^side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SignedDiscontinuity {
    pub index: usize,
    pub side: Side,
}

impl SignedDiscontinuity {
    pub fn new(index: usize, side: Side) -> Self {
        SignedDiscontinuity { index, side }
    }

    pub fn point(&self, map: &ItmMap) -> SignedPoint {
        SignedPoint {
            value: map.beta_at(self.index).clone(),
            side: self.side,
        }
    }
}

impl std::fmt::Display for SignedDiscontinuity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "b{}{}", self.index, self.side.symbol())
    }
}

/// All signed discontinuities, ordered by `(index, side)`.
pub fn signed_discontinuities(map: &ItmMap) -> Vec<SignedDiscontinuity> {
    (1..map.r())
        .flat_map(|i| [SignedDiscontinuity::new(i, Side::Minus), SignedDiscontinuity::new(i, Side::Plus)])
        .collect()
}

/// First time `k ≥ 1` at which the orbit of `node` has value `β_i`, for
/// every `i` it reaches. The orbit lives on the `1/Q` grid, so stopping at
/// the first repeated state loses nothing.
fn first_hits(map: &ItmMap, node: SignedDiscontinuity) -> HashMap<usize, usize> {
    let mut hits = HashMap::new();
    let mut seen = HashSet::new();
    let mut point = node.point(map);
    seen.insert(point.clone());
    let mut k = 0;
    loop {
        point = map.step(&point);
        k += 1;
        if let Some(i) = map.discontinuity_index(&point.value) {
            hits.entry(i).or_insert(k);
        }
        if !seen.insert(point.clone()) {
            return hits;
        }
    }
}

/// Ghost preimages of `target` with their minimal landing times. For a plus
/// target `β_*⁺` these are the `β⁻` whose orbit lands on `β_*⁻`; the minus
/// case is mirrored.
pub fn ghost_preimages(map: &ItmMap, target: SignedDiscontinuity) -> Vec<(SignedDiscontinuity, usize)> {
    (1..map.r())
        .map(|i| SignedDiscontinuity::new(i, target.side.opposite()))
        .filter_map(|child| first_hits(map, child).get(&target.index).map(|&k| (child, k)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GhostNode {
    pub node: SignedDiscontinuity,
    pub in_x: bool,
}

/// `child` is a ghost preimage of `parent`, landing after `time` steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GhostEdge {
    pub child: SignedDiscontinuity,
    pub parent: SignedDiscontinuity,
    pub time: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GhostGraph {
    pub nodes: Vec<GhostNode>,
    /// Sorted by `(child, parent)`.
    pub edges: Vec<GhostEdge>,
}

impl GhostGraph {
    pub fn in_x(&self, node: SignedDiscontinuity) -> bool {
        self.nodes.iter().any(|n| n.node == node && n.in_x)
    }

    /// Ghost preimages of `parent` recorded in the graph.
    pub fn children(&self, parent: SignedDiscontinuity) -> impl Iterator<Item = &GhostEdge> {
        self.edges.iter().filter(move |e| e.parent == parent)
    }

    pub fn edge(&self, child: SignedDiscontinuity, parent: SignedDiscontinuity) -> Option<&GhostEdge> {
        self.edges.iter().find(|e| e.child == child && e.parent == parent)
    }
}

pub fn build_ghost_graph(map: &ItmMap, attractor: &Attractor) -> GhostGraph {
    let all = signed_discontinuities(map);
    let nodes = all
        .iter()
        .map(|&node| GhostNode {
            node,
            in_x: attractor.set.contains_signed(&node.point(map)),
        })
        .collect();
    let mut edges = Vec::new();
    for &child in &all {
        let hits = first_hits(map, child);
        let mut targets: Vec<(&usize, &usize)> = hits.iter().collect();
        targets.sort();
        for (&i, &time) in targets {
            edges.push(GhostEdge {
                child,
                parent: SignedDiscontinuity::new(i, child.side.opposite()),
                time,
            });
        }
    }
    GhostGraph { nodes, edges }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum A3Verdict {
    Holds,
    /// `beta` has both signed parts outside `X` and one of them lies on
    /// `cycle`. The cycle is listed child first: every edge's parent is the
    /// next edge's child, and the last parent is the first child.
    Violated { beta: usize, cycle: Vec<GhostEdge> },
}

impl A3Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, A3Verdict::Holds)
    }
}

/// Shortest directed cycle through `start`, following edges child → parent.
fn cycle_through(graph: &GhostGraph, start: SignedDiscontinuity) -> Option<Vec<GhostEdge>> {
    let mut prev: HashMap<SignedDiscontinuity, &GhostEdge> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        for e in graph.edges.iter().filter(|e| e.child == node) {
            if e.parent == start {
                let mut path = vec![e.clone()];
                let mut cur = node;
                while cur != start {
                    let back = prev[&cur];
                    path.push(back.clone());
                    cur = back.child;
                }
                path.reverse();
                return Some(path);
            }
            if e.parent != start && !prev.contains_key(&e.parent) {
                prev.insert(e.parent, e);
                queue.push_back(e.parent);
            }
        }
    }
    None
}

pub fn check_a3(graph: &GhostGraph) -> A3Verdict {
    let mut indices: Vec<usize> = graph.nodes.iter().map(|n| n.node.index).collect();
    indices.dedup();
    for i in indices {
        let minus = SignedDiscontinuity::new(i, Side::Minus);
        let plus = SignedDiscontinuity::new(i, Side::Plus);
        if graph.in_x(minus) || graph.in_x(plus) {
            continue;
        }
        for node in [minus, plus] {
            if let Some(cycle) = cycle_through(graph, node) {
                return A3Verdict::Violated { beta: i, cycle };
            }
        }
    }
    A3Verdict::Holds
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeVertex {
    pub node: SignedDiscontinuity,
    /// Position of the parent vertex in the previous level.
    pub parent: Option<usize>,
    /// Landing time of this vertex onto its parent.
    pub time: Option<usize>,
    /// The same signed discontinuity already occurs at a lower level or
    /// earlier in this one.
    pub repeated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GhostTree {
    pub root: SignedDiscontinuity,
    pub levels: Vec<Vec<TreeVertex>>,
}

impl GhostTree {
    /// Levels `≥ 1` containing the root's discontinuity `β` (either side).
    pub fn root_reappearances(&self) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, level)| level.iter().any(|v| v.node.index == self.root.index))
            .map(|(k, _)| k)
            .collect()
    }
}

/// Breadth-first unrolling of the ghost graph from `root`, `depth` levels
/// deep.
pub fn ghost_tree(graph: &GhostGraph, root: SignedDiscontinuity, depth: usize) -> GhostTree {
    let mut seen = HashSet::from([root]);
    let mut levels = vec![vec![TreeVertex {
        node: root,
        parent: None,
        time: None,
        repeated: false,
    }]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (p, vertex) in levels.last().expect("root level").iter().enumerate() {
            for e in graph.children(vertex.node) {
                next.push(TreeVertex {
                    node: e.child,
                    parent: Some(p),
                    time: Some(e.time),
                    repeated: !seen.insert(e.child),
                });
            }
        }
        levels.push(next);
    }
    GhostTree { root, levels }
}
