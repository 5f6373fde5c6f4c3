//! First-return structure on an interval component of a finite-type
//! attractor.

use serde::Serialize;

use crate::attractor::{split_by_branch, Attractor};
use crate::dynamics::{EntryCounts, ItmMap, Itinerary};
use crate::numerics::{Interval, IntervalSet, Rational, Side, SignedPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReturnMapError {
    #[error("NotFiniteType: the attractor did not stabilize, or a return exceeded {0} steps")]
    NotFiniteType(usize),
    #[error("NotAComponent: {0} is not a connected component of the attractor")]
    NotAComponent(String),
    #[error("piece {piece} partially overlaps the component at time {time}")]
    Straddle { piece: String, time: usize },
    #[error("TouchingViolated({0})")]
    TouchingViolated(usize),
}

/// A signed point's orbit hitting `β_discontinuity` at `time`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CriticalHit {
    pub discontinuity: usize,
    pub side: Side,
    pub time: usize,
}

/// The orbit of one signed cut point up to its first return.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedChain {
    pub start: SignedPoint,
    /// Discontinuities hit at times `0 ≤ t < return_time`, in order.
    pub hits: Vec<CriticalHit>,
    pub return_time: usize,
    /// `R_J(start)`.
    pub image: SignedPoint,
    pub itinerary: Itinerary,
}

impl SignedChain {
    pub fn len(&self) -> usize {
        self.hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }
}

/// First landing of an interior cut point on a discontinuity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Landing {
    pub time: usize,
    pub discontinuity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnMapData {
    pub component: Interval,
    /// `a₀ = x < a₁ < … < a_N = y`.
    pub cut_points: Vec<Rational>,
    /// `r_j` for `J_j = [a_{j−1}, a_j)`, `j = 1..N`.
    pub return_times: Vec<usize>,
    /// `R_J − id` on each `J_j`.
    pub translations: Vec<Rational>,
    /// Branch symbols of each `J_j` up to its return.
    pub itineraries: Vec<Itinerary>,
    /// Landings of `a₁..a_{N−1}`.
    pub landings: Vec<Landing>,
    /// Chains of `a₀⁺..a_{N−1}⁺`.
    pub plus_chains: Vec<SignedChain>,
    /// Chains of `a₁⁻..a_N⁻` (entry `j−1` belongs to `a_j⁻`).
    pub minus_chains: Vec<SignedChain>,
    /// `sigma[j−1]` is the left-to-right position (1-based) of `R_J(J_j)`.
    pub sigma: Vec<usize>,
    /// Inverse of `sigma`: `tau[p−1]` is the `j` whose image sits at position `p`.
    pub tau: Vec<usize>,
    pub dynamically_trivial: bool,
}

impl ReturnMapData {
    /// Number of continuity intervals `N`.
    pub fn n(&self) -> usize {
        self.return_times.len()
    }

    pub fn continuity_interval(&self, j: usize) -> Interval {
        Interval {
            left: self.cut_points[j - 1].clone(),
            right: self.cut_points[j].clone(),
        }
    }

    /// `R_J(J_j)`.
    pub fn image_of(&self, j: usize) -> Interval {
        self.continuity_interval(j).translate(&self.translations[j - 1])
    }

    /// Chain of `a_j⁺` (`0 ≤ j < N`).
    pub fn plus_chain(&self, j: usize) -> &SignedChain {
        &self.plus_chains[j]
    }

    /// Chain of `a_j⁻` (`1 ≤ j ≤ N`).
    pub fn minus_chain(&self, j: usize) -> &SignedChain {
        &self.minus_chains[j - 1]
    }

    /// The return map at a point of `J`, with its return time.
    pub fn apply(&self, x: &Rational) -> Option<(Rational, usize)> {
        let j = self.cut_points[1..].partition_point(|a| a <= x);
        if j >= self.n() || *x < self.cut_points[0] {
            return None;
        }
        Some((x + &self.translations[j], self.return_times[j]))
    }

    pub fn signature(&self) -> ReturnSignature {
        ReturnSignature {
            n: self.n(),
            return_times: self.return_times.clone(),
            sigma: self.sigma.clone(),
        }
    }

    /// `σ` in one-line notation, e.g. `(2 1)`.
    pub fn sigma_one_line(&self) -> String {
        let parts: Vec<String> = self.sigma.iter().map(|s| s.to_string()).collect();
        format!("({})", parts.join(" "))
    }
}

/// The data preserved by small perturbations of a stable map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ReturnSignature {
    pub n: usize,
    pub return_times: Vec<usize>,
    pub sigma: Vec<usize>,
}

struct Piece {
    origin: Interval,
    offset: Rational,
    symbols: Vec<usize>,
}

/// Forward-propagate the component `J` as a set of pieces until every piece
/// is back inside `J`.
pub fn compute_return_map(map: &ItmMap, attractor: &Attractor, component: &Interval) -> Result<ReturnMapData, ReturnMapError> {
    if !attractor.is_finite_type() {
        return Err(ReturnMapError::NotFiniteType(0));
    }
    if !attractor.set.components().contains(component) {
        return Err(ReturnMapError::NotAComponent(component.to_string()));
    }
    let cap = 2 * map.grid_bound().saturating_mul(attractor.set.len());

    let mut cuts: Vec<(Rational, Landing)> = Vec::new();
    let mut retired: Vec<Piece> = Vec::new();
    let mut work = vec![Piece {
        origin: component.clone(),
        offset: Rational::zero(),
        symbols: Vec::new(),
    }];
    while let Some(piece) = pop_leftmost(&mut work) {
        let time = piece.symbols.len();
        if time >= cap {
            return Err(ReturnMapError::NotFiniteType(cap));
        }
        let current = piece.origin.translate(&piece.offset);
        let parts = split_by_branch(map, &current);
        for (k, (part, branch)) in parts.iter().enumerate() {
            if k > 0 {
                let a = &part.left - &piece.offset;
                let discontinuity = map.discontinuity_index(&part.left).expect("split at a discontinuity");
                cuts.push((a, Landing { time, discontinuity }));
            }
            let origin = part.translate(&-&piece.offset);
            let offset = &piece.offset + map.gamma_at(*branch);
            let mut symbols = piece.symbols.clone();
            symbols.push(*branch);
            let moved = origin.translate(&offset);
            let next = Piece { origin, offset, symbols };
            if component.covers(&moved) {
                retired.push(next);
            } else if component.overlaps(&moved) {
                return Err(ReturnMapError::Straddle {
                    piece: moved.to_string(),
                    time: time + 1,
                });
            } else {
                work.push(next);
            }
        }
    }

    retired.sort_by(|a, b| a.origin.left.cmp(&b.origin.left));
    cuts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut cut_points = vec![component.left.clone()];
    cut_points.extend(cuts.iter().map(|(a, _)| a.clone()));
    cut_points.push(component.right.clone());
    debug_assert_eq!(retired.len() + 1, cut_points.len());

    let return_times: Vec<usize> = retired.iter().map(|p| p.symbols.len()).collect();
    let translations: Vec<Rational> = retired.iter().map(|p| p.offset.clone()).collect();
    let itineraries: Vec<Itinerary> = retired.iter().map(|p| Itinerary(p.symbols.clone())).collect();
    let landings: Vec<Landing> = cuts.into_iter().map(|(_, l)| l).collect();

    let n = retired.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let la = &retired[a].origin.left + &retired[a].offset;
        let lb = &retired[b].origin.left + &retired[b].offset;
        la.cmp(&lb)
    });
    let tau: Vec<usize> = order.iter().map(|j| j + 1).collect();
    let mut sigma = vec![0; n];
    for (p, &j) in order.iter().enumerate() {
        sigma[j] = p + 1;
    }

    let mut plus_chains = Vec::with_capacity(n);
    let mut minus_chains = Vec::with_capacity(n);
    for a in &cut_points[..n] {
        let start = SignedPoint::new(a.clone(), Side::Plus).expect("cut point below 1");
        plus_chains.push(signed_chain(map, component, start, cap)?);
    }
    for a in &cut_points[1..=n] {
        let start = SignedPoint::new(a.clone(), Side::Minus).expect("cut point above 0");
        minus_chains.push(signed_chain(map, component, start, cap)?);
    }

    let dynamically_trivial = n == 1 && translations[0].is_zero();
    Ok(ReturnMapData {
        component: component.clone(),
        cut_points,
        return_times,
        translations,
        itineraries,
        landings,
        plus_chains,
        minus_chains,
        sigma,
        tau,
        dynamically_trivial,
    })
}

/// Return maps of every component, left to right.
pub fn compute_return_maps(map: &ItmMap, attractor: &Attractor) -> Result<Vec<ReturnMapData>, ReturnMapError> {
    attractor
        .set
        .iter()
        .map(|c| compute_return_map(map, attractor, c))
        .collect()
}

fn pop_leftmost(work: &mut Vec<Piece>) -> Option<Piece> {
    let idx = work
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.origin.left.cmp(&b.1.origin.left))
        .map(|(i, _)| i)?;
    Some(work.swap_remove(idx))
}

/// Iterate a signed point until it is back in `J`, recording every time it
/// sits on a discontinuity (time 0 included).
pub fn signed_chain(map: &ItmMap, component: &Interval, start: SignedPoint, cap: usize) -> Result<SignedChain, ReturnMapError> {
    let mut point = start.clone();
    let mut hits = Vec::new();
    let mut symbols = Vec::new();
    let mut time = 0;
    loop {
        if time >= 1 && component.contains_signed(&point) {
            break;
        }
        if time >= cap {
            return Err(ReturnMapError::NotFiniteType(cap));
        }
        if let Some(i) = map.discontinuity_index(&point.value) {
            hits.push(CriticalHit {
                discontinuity: i,
                side: point.side,
                time,
            });
        }
        symbols.push(map.branch_of(&point));
        point = map.step(&point);
        time += 1;
    }
    Ok(SignedChain {
        start,
        hits,
        return_time: time,
        image: point,
        itinerary: Itinerary(symbols),
    })
}

impl SignedChain {
    /// Entry counts of the orbit over `[from, to)`.
    pub fn counts_between(&self, r: usize, from: usize, to: usize) -> EntryCounts {
        self.itinerary.counts_between(r, from, to)
    }
}

/// Check `R_J(a_{τ(p)}⁻) ∼ R_J(a_{τ(p+1)−1}⁺)` for `p = 1..N−1`; returns the
/// touching values.
pub fn verify_touching_equations(data: &ReturnMapData) -> Result<Vec<Rational>, ReturnMapError> {
    let mut values = Vec::new();
    for p in 1..data.n() {
        let right = &data.minus_chain(data.tau[p - 1]).image;
        let left = &data.plus_chain(data.tau[p] - 1).image;
        if !right.touches(left) {
            return Err(ReturnMapError::TouchingViolated(p));
        }
        values.push(right.value.clone());
    }
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnDynamics {
    Identity,
    RotationLike,
    ManyBranches,
}

pub fn classify_return_dynamics(data: &ReturnMapData) -> ReturnDynamics {
    match data.n() {
        1 => ReturnDynamics::Identity,
        2 => ReturnDynamics::RotationLike,
        _ => ReturnDynamics::ManyBranches,
    }
}

/// `⋃ Tᵏ(J_j)` over `0 ≤ k < r_j`, the forward orbit of `J` before return.
pub fn orbit_union(map: &ItmMap, data: &ReturnMapData) -> IntervalSet {
    let mut raw = Vec::new();
    for j in 1..=data.n() {
        let mut iv = data.continuity_interval(j);
        for &s in &data.itineraries[j - 1].0 {
            raw.push((iv.left.clone(), iv.right.clone()));
            iv = iv.translate(map.gamma_at(s));
        }
    }
    IntervalSet::canonicalize(raw)
}
