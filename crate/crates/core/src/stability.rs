//! Conditions A1, A2, A3 and Matching, and the verdict they add up to.

use serde::Serialize;

use crate::attractor::{compute_attractor, Attractor, Placement};
use crate::dynamics::ItmMap;
use crate::ghost::{build_ghost_graph, check_a3, A3Verdict, GhostEdge, GhostGraph};
use crate::numerics::{Interval, Rational, Side, SignedPoint};
use crate::return_map::{compute_return_maps, CriticalHit, ReturnMapData, ReturnMapError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StabilityError {
    #[error("NotFiniteType: the attractor did not stabilize within the iteration cap")]
    NotFiniteType,
    #[error(transparent)]
    ReturnMap(#[from] ReturnMapError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum Verdict<W> {
    Holds,
    Violated(W),
    /// Not decided because the map is not (known to be) of finite type.
    Undecided,
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Violated(w) => Some(w),
            _ => None,
        }
    }
}

/// A signed cut point whose orbit meets two or more discontinuities before
/// returning. Component indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct A1Witness {
    pub component: usize,
    pub interval: Interval,
    pub point: SignedPoint,
    pub hits: Vec<CriticalHit>,
}

/// A boundary point of a non-trivial component that lands on a
/// discontinuity before returning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct A2Witness {
    pub component: usize,
    pub interval: Interval,
    pub point: SignedPoint,
    pub hit: CriticalHit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct A3Witness {
    pub beta: usize,
    pub cycle: Vec<GhostEdge>,
}

/// A non-trivial component whose interior does not contain exactly one
/// landing point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingWitness {
    pub component: usize,
    pub interval: Interval,
    pub interior_landings: usize,
}

/// A dynamically trivial component whose ends do not land on the two sides
/// of one discontinuity lying inside `X`. `left` is the first hit of `x⁺`,
/// `right` that of `y⁻`, before the identity return.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivialComponentWitness {
    pub component: usize,
    pub interval: Interval,
    pub left: Option<CriticalHit>,
    pub right: Option<CriticalHit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub finite_type: bool,
    pub stabilization_step: Option<usize>,
    pub a1: Verdict<A1Witness>,
    pub a2: Verdict<A2Witness>,
    pub a3: Verdict<A3Witness>,
    pub matching: Verdict<MatchingWitness>,
    /// Ends of dynamically trivial components must be carried by the same
    /// discontinuity inside `X`; this follows from the other four on every
    /// map where they say what they mean, and fails on degenerate ones such
    /// as a branch with zero translation.
    pub trivial_components: Verdict<TrivialComponentWitness>,
    /// Components with `N = 1` whose left endpoint lands on a discontinuity:
    /// these have a landing point but none strictly inside, and are skipped
    /// by Matching as dynamically trivial.
    pub ambiguous_components: Vec<usize>,
    pub stable: bool,
}

/// Every computed piece of the pipeline for one map.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub map: ItmMap,
    pub attractor: Attractor,
    /// Empty when the map is not of finite type.
    pub return_maps: Vec<ReturnMapData>,
    pub ghost: GhostGraph,
    pub report: StabilityReport,
}

fn require_finite(attractor: &Attractor) -> Result<(), StabilityError> {
    if attractor.is_finite_type() {
        Ok(())
    } else {
        Err(StabilityError::NotFiniteType)
    }
}

pub fn check_a1(attractor: &Attractor, return_maps: &[ReturnMapData]) -> Result<Verdict<A1Witness>, StabilityError> {
    require_finite(attractor)?;
    for (c, data) in return_maps.iter().enumerate() {
        for chain in data.plus_chains.iter().chain(&data.minus_chains) {
            if chain.len() >= 2 {
                return Ok(Verdict::Violated(A1Witness {
                    component: c,
                    interval: data.component.clone(),
                    point: chain.start.clone(),
                    hits: chain.hits.clone(),
                }));
            }
        }
    }
    Ok(Verdict::Holds)
}

pub fn check_a2(attractor: &Attractor, return_maps: &[ReturnMapData]) -> Result<Verdict<A2Witness>, StabilityError> {
    require_finite(attractor)?;
    for (c, data) in return_maps.iter().enumerate() {
        if data.dynamically_trivial {
            continue;
        }
        for chain in [data.plus_chain(0), data.minus_chain(data.n())] {
            if let Some(hit) = chain.hits.first() {
                return Ok(Verdict::Violated(A2Witness {
                    component: c,
                    interval: data.component.clone(),
                    point: chain.start.clone(),
                    hit: hit.clone(),
                }));
            }
        }
    }
    Ok(Verdict::Holds)
}

pub fn check_matching(attractor: &Attractor, return_maps: &[ReturnMapData]) -> Result<Verdict<MatchingWitness>, StabilityError> {
    require_finite(attractor)?;
    for (c, data) in return_maps.iter().enumerate() {
        if data.dynamically_trivial {
            continue;
        }
        let interior = data.n() - 1;
        if interior != 1 {
            return Ok(Verdict::Violated(MatchingWitness {
                component: c,
                interval: data.component.clone(),
                interior_landings: interior,
            }));
        }
    }
    Ok(Verdict::Holds)
}

pub fn check_trivial_components(
    attractor: &Attractor,
    return_maps: &[ReturnMapData],
) -> Result<Verdict<TrivialComponentWitness>, StabilityError> {
    require_finite(attractor)?;
    for (c, data) in return_maps.iter().enumerate() {
        if !data.dynamically_trivial {
            continue;
        }
        let left = data.plus_chain(0).hits.first().cloned();
        let right = data.minus_chain(data.n()).hits.first().cloned();
        if !trivial_ends_match(attractor, left.as_ref(), right.as_ref()) {
            return Ok(Verdict::Violated(TrivialComponentWitness {
                component: c,
                interval: data.component.clone(),
                left,
                right,
            }));
        }
    }
    Ok(Verdict::Holds)
}

fn trivial_ends_match(attractor: &Attractor, left: Option<&CriticalHit>, right: Option<&CriticalHit>) -> bool {
    match (left, right) {
        (Some(l), Some(r)) => {
            l.discontinuity == r.discontinuity
                && l.side == Side::Plus
                && r.side == Side::Minus
                && matches!(attractor.placements[l.discontinuity - 1], Placement::Interior(_))
        }
        _ => false,
    }
}

fn ambiguous_components(return_maps: &[ReturnMapData]) -> Vec<usize> {
    return_maps
        .iter()
        .enumerate()
        .filter(|(_, d)| d.n() == 1 && !d.plus_chain(0).is_empty())
        .map(|(c, _)| c)
        .collect()
}

/// Run the whole pipeline. `max_iter` overrides the default attractor cap.
pub fn analyze(map: &ItmMap, max_iter: Option<usize>) -> Result<Analysis, StabilityError> {
    let attractor = compute_attractor(map, max_iter);
    let ghost = build_ghost_graph(map, &attractor);
    if !attractor.is_finite_type() {
        let report = StabilityReport {
            finite_type: false,
            stabilization_step: None,
            a1: Verdict::Undecided,
            a2: Verdict::Undecided,
            a3: Verdict::Undecided,
            matching: Verdict::Undecided,
            trivial_components: Verdict::Undecided,
            ambiguous_components: Vec::new(),
            stable: false,
        };
        return Ok(Analysis {
            map: map.clone(),
            attractor,
            return_maps: Vec::new(),
            ghost,
            report,
        });
    }
    let return_maps = compute_return_maps(map, &attractor)?;
    let a1 = check_a1(&attractor, &return_maps)?;
    let a2 = check_a2(&attractor, &return_maps)?;
    let matching = check_matching(&attractor, &return_maps)?;
    let a3 = match check_a3(&ghost) {
        A3Verdict::Holds => Verdict::Holds,
        A3Verdict::Violated { beta, cycle } => Verdict::Violated(A3Witness { beta, cycle }),
    };
    let trivial_components = check_trivial_components(&attractor, &return_maps)?;
    let stable = a1.holds() && a2.holds() && a3.holds() && matching.holds() && trivial_components.holds();
    let report = StabilityReport {
        finite_type: true,
        stabilization_step: attractor.step(),
        a1,
        a2,
        a3,
        matching,
        trivial_components,
        ambiguous_components: ambiguous_components(&return_maps),
        stable,
    };
    Ok(Analysis {
        map: map.clone(),
        attractor,
        return_maps,
        ghost,
        report,
    })
}

pub fn stability_verdict(map: &ItmMap) -> Result<StabilityReport, StabilityError> {
    analyze(map, None).map(|a| a.report)
}

/// Naive first-return iteration of a signed point, returning every critical
/// hit before return. Independent of the piece propagation.
fn naive_hits(map: &ItmMap, interval: &Interval, start: &SignedPoint) -> Vec<CriticalHit> {
    let cap = 4 * map.grid_bound().max(1) * map.r();
    let mut p = start.clone();
    let mut hits = Vec::new();
    for t in 0..cap {
        if t > 0 && interval.contains_signed(&p) {
            break;
        }
        if let Some(i) = map.beta().iter().position(|b| *b == p.value) {
            hits.push(CriticalHit {
                discontinuity: i + 1,
                side: p.side,
                time: t,
            });
        }
        p = map.step(&p);
    }
    hits
}

impl A1Witness {
    pub fn reverify(&self, map: &ItmMap) -> bool {
        let hits = naive_hits(map, &self.interval, &self.point);
        hits.len() >= 2 && hits == self.hits
    }
}

impl A2Witness {
    pub fn reverify(&self, map: &ItmMap) -> bool {
        let on_boundary = self.point.value == self.interval.left || self.point.value == self.interval.right;
        on_boundary && naive_hits(map, &self.interval, &self.point).first() == Some(&self.hit)
    }
}

impl A3Witness {
    /// Each edge is re-derived by iterating its child: the first time its
    /// value equals the parent's value must be the recorded landing time.
    pub fn reverify(&self, map: &ItmMap) -> bool {
        let n = self.cycle.len();
        let closed = n >= 2 && (0..n).all(|k| self.cycle[k].parent == self.cycle[(k + 1) % n].child);
        let contains_beta = self.cycle.iter().any(|e| e.child.index == self.beta);
        closed
            && contains_beta
            && self.cycle.iter().all(|e| {
                e.child.side != e.parent.side && {
                    let target = map.beta_at(e.parent.index);
                    let mut p = e.child.point(map);
                    let mut first = None;
                    for k in 1..=map.grid_bound().saturating_add(1) {
                        p = map.step(&p);
                        if p.value == *target {
                            first = Some(k);
                            break;
                        }
                    }
                    first == Some(e.time)
                }
            })
    }
}

impl TrivialComponentWitness {
    /// Recompute both first hits by naive iteration and check that they
    /// really fail to pair up on a discontinuity inside `X`.
    pub fn reverify(&self, map: &ItmMap) -> bool {
        let x = SignedPoint::plus(self.interval.left.clone()).expect("left end in [0,1)");
        let y = SignedPoint::minus(self.interval.right.clone()).expect("right end in (0,1]");
        let left = naive_hits(map, &self.interval, &x).into_iter().next();
        let right = naive_hits(map, &self.interval, &y).into_iter().next();
        let attractor = compute_attractor(map, None);
        left == self.left && right == self.right && !trivial_ends_match(&attractor, left.as_ref(), right.as_ref())
    }
}

impl MatchingWitness {
    /// Count the `1/Q` grid points strictly inside the component that hit a
    /// discontinuity before returning. Landing points are translates of
    /// discontinuities, so they all sit on that grid.
    pub fn reverify(&self, map: &ItmMap) -> bool {
        let q = map.grid_bound() as i64;
        let mut count = 0;
        for k in 1..q {
            let z = Rational::new(k, q);
            if z <= self.interval.left || z >= self.interval.right {
                continue;
            }
            let start = SignedPoint::plus(z).expect("inside (0,1)");
            if !naive_hits(map, &self.interval, &start).is_empty() {
                count += 1;
            }
        }
        count == self.interior_landings
    }
}
