//! Nested images `Xₙ = Tⁿ([0,1))` and their intersection.

use serde::Serialize;

use crate::dynamics::ItmMap;
use crate::numerics::{Interval, IntervalSet, Rational};

/// How many of the first `Xₙ` are kept for reporting.
const HISTORY_LEN: usize = 8;

/// `T(S)`: split every interval at the discontinuities inside it, translate
/// each piece by its branch's `γ`, and merge.
pub fn image(map: &ItmMap, set: &IntervalSet) -> IntervalSet {
    let mut pieces = Vec::new();
    for iv in set.iter() {
        for (piece, branch) in split_by_branch(map, iv) {
            let moved = piece.translate(map.gamma_at(branch));
            pieces.push((moved.left, moved.right));
        }
    }
    IntervalSet::canonicalize(pieces)
}

/// Cut `iv` at each `β_i` strictly inside it, tagging pieces with their
/// branch.
pub fn split_by_branch(map: &ItmMap, iv: &Interval) -> Vec<(Interval, usize)> {
    let mut out = Vec::new();
    let mut left = iv.left.clone();
    let mut branch = map.branch_of_value(&left);
    for b in map.beta().iter().filter(|b| **b > iv.left && **b < iv.right) {
        out.push((Interval { left, right: b.clone() }, branch));
        left = b.clone();
        branch += 1;
    }
    out.push((
        Interval {
            left,
            right: iv.right.clone(),
        },
        branch,
    ));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "step", rename_all = "snake_case")]
pub enum Stabilization {
    /// `X_{n+1} = X_n` first holds at this `n`.
    Step(usize),
    InfiniteTypeSuspected,
}

/// Where a discontinuity sits relative to the attractor. Component indices
/// are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "component", rename_all = "snake_case")]
pub enum Placement {
    /// Strictly inside a component `(l, r)`.
    Interior(usize),
    /// Equal to the left end `l` of a component `[l, r)`: in `X`, and on the
    /// boundary of its closure.
    LeftEndpoint(usize),
    /// Equal to the right end of a component: not in `X`, but in its closure.
    RightEndpoint(usize),
    Outside,
}

impl Placement {
    pub fn in_attractor(self) -> bool {
        matches!(self, Placement::Interior(_) | Placement::LeftEndpoint(_))
    }

    pub fn on_boundary(self) -> bool {
        matches!(self, Placement::LeftEndpoint(_) | Placement::RightEndpoint(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attractor {
    pub set: IntervalSet,
    pub stabilization: Stabilization,
    /// `X₀, X₁, …` up to a small fixed length.
    pub history: Vec<IntervalSet>,
    /// One entry per `β_i`, in index order.
    pub placements: Vec<Placement>,
    /// Iteration cap that was in force.
    pub cap: usize,
}

impl Attractor {
    pub fn is_finite_type(&self) -> bool {
        matches!(self.stabilization, Stabilization::Step(_))
    }

    pub fn step(&self) -> Option<usize> {
        match self.stabilization {
            Stabilization::Step(n) => Some(n),
            Stabilization::InfiniteTypeSuspected => None,
        }
    }

    /// `(i, component)` for every `β_i ∈ X`.
    pub fn discontinuities_inside(&self) -> Vec<(usize, usize)> {
        self.placements
            .iter()
            .enumerate()
            .filter_map(|(k, p)| match p {
                Placement::Interior(c) | Placement::LeftEndpoint(c) => Some((k + 1, *c)),
                _ => None,
            })
            .collect()
    }

    /// Indices of `β_i` lying on the boundary of the closure of `X`.
    pub fn boundary_hits(&self) -> Vec<usize> {
        self.indices_where(|p| p.on_boundary())
    }

    /// Indices of `β_i` outside the closure of `X`.
    pub fn discontinuities_outside(&self) -> Vec<usize> {
        self.indices_where(|p| p == Placement::Outside)
    }

    fn indices_where(&self, pred: impl Fn(Placement) -> bool) -> Vec<usize> {
        self.placements
            .iter()
            .enumerate()
            .filter(|(_, p)| pred(**p))
            .map(|(k, _)| k + 1)
            .collect()
    }
}

pub fn placement_of(set: &IntervalSet, x: &Rational) -> Placement {
    for (c, iv) in set.iter().enumerate() {
        if *x == iv.left {
            return Placement::LeftEndpoint(c);
        }
        if *x == iv.right {
            return Placement::RightEndpoint(c);
        }
        if iv.left < *x && *x < iv.right {
            return Placement::Interior(c);
        }
    }
    Placement::Outside
}

/// Iterate `X_{n+1} = T(X_n)` from `X₀ = [0,1)` until two consecutive sets
/// agree, or `max_iter` images have been taken. `None` means the default cap
/// `Q`, which is always enough: each strict step drops the measure by a
/// multiple of `1/Q`.
pub fn compute_attractor(map: &ItmMap, max_iter: Option<usize>) -> Attractor {
    let cap = max_iter.unwrap_or_else(|| map.grid_bound()).max(1);
    let mut current = IntervalSet::unit();
    let mut history = vec![current.clone()];
    let mut stabilization = Stabilization::InfiniteTypeSuspected;
    for n in 0..cap {
        let next = image(map, &current);
        if next == current {
            stabilization = Stabilization::Step(n);
            break;
        }
        if history.len() < HISTORY_LEN {
            history.push(next.clone());
        }
        current = next;
    }
    let placements = map.beta().iter().map(|b| placement_of(&current, b)).collect();
    Attractor {
        set: current,
        stabilization,
        history,
        placements,
        cap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "time", rename_all = "snake_case")]
pub enum Recurrence {
    Returns(usize),
    NoReturnWithinHorizon,
}

/// Does the neighbourhood `(x−δ, x+δ)` come back to itself within
/// `horizon` steps? Images are exact interval sets, so the answer is exact.
pub fn nonwandering_witness(map: &ItmMap, x: &Rational, delta: &Rational, horizon: usize) -> Recurrence {
    let nbhd = IntervalSet::canonicalize([(x - delta, x + delta)]);
    let mut current = nbhd.clone();
    for n in 1..=horizon {
        current = image(map, &current);
        if !current.intersection(&nbhd).is_empty() {
            return Recurrence::Returns(n);
        }
    }
    Recurrence::NoReturnWithinHorizon
}
