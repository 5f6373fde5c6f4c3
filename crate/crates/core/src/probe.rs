//! Exact perturbation experiments around a map.

use rayon::prelude::*;
use serde::Serialize;

use crate::attractor::{compute_attractor, split_by_branch, Attractor};
use crate::dynamics::{ItmMap, MapError};
use crate::ghost::GhostEdge;
use crate::numerics::{hausdorff_closure_distance, Interval, IntervalSet, Rational, Side};
use crate::return_map::{compute_return_maps, ReturnSignature};

/// Multiplier of the sample generator (Knuth's MMIX constant).
pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
/// Increment of the sample generator.
pub const LCG_INCREMENT: u64 = 1442695040888963407;
/// Deltas are multiples of `ε / GRID_STEPS`.
pub const GRID_STEPS: i64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbeError {
    #[error("NotFiniteType: the base map's attractor did not stabilize")]
    NotFiniteType,
    #[error("NoValidSamples: all {0} draws left the parameter polytope")]
    NoValidSamples(usize),
    #[error("at least one sample is required")]
    ZeroSamples,
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("NotRealizableDirectly: {0}")]
    NotRealizableDirectly(String),
    #[error("perturbed parameters leave the polytope: {0}")]
    OutOfPolytope(MapError),
    #[error("{0}")]
    Internal(String),
}

/// 64-bit linear congruential generator.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        self.state
    }

    /// Uniform-ish integer in `[−(GRID_STEPS−1), GRID_STEPS−1]` from the
    /// high bits of the next state.
    pub fn next_grid_step(&mut self) -> i64 {
        let span = (2 * GRID_STEPS - 1) as u64;
        ((self.next_u64() >> 33) % span) as i64 - (GRID_STEPS - 1)
    }
}

/// Parameter shifts in `(γ₁..γ_r, β₁..β_{r−1})` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerturbationSpec {
    pub epsilon: Rational,
    pub deltas: Vec<Rational>,
    pub seed: Option<u64>,
    pub sample: Option<usize>,
}

impl PerturbationSpec {
    pub fn apply(&self, map: &ItmMap) -> Result<ItmMap, MapError> {
        let params: Vec<Rational> = map.parameters().iter().zip(&self.deltas).map(|(p, d)| p + d).collect();
        ItmMap::from_parameters(map.r(), &params)
    }

    /// Every delta satisfies `|δ| ≤ ε`.
    pub fn within_epsilon(&self) -> bool {
        self.deltas.iter().all(|d| d.abs() <= self.epsilon)
    }
}

/// The `samples` specs drawn for `seed`, in sample order.
pub fn generate_specs(map: &ItmMap, epsilon: &Rational, samples: usize, seed: u64) -> Vec<PerturbationSpec> {
    let mut rng = Lcg::new(seed);
    let step = epsilon / Rational::from_integer(GRID_STEPS);
    (0..samples)
        .map(|k| PerturbationSpec {
            epsilon: epsilon.clone(),
            deltas: (0..2 * map.r() - 1).map(|_| step.scale(rng.next_grid_step())).collect(),
            seed: Some(seed),
            sample: Some(k),
        })
        .collect()
}

/// Features of an attractor that a stable map keeps under perturbation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub finite_type: bool,
    pub components: usize,
    /// Discontinuities in `X`.
    pub inside: usize,
    /// Discontinuities in `I ∖ closure(X)`.
    pub outside: usize,
    pub signatures: Vec<ReturnSignature>,
}

fn profile(map: &ItmMap, attractor: &Attractor) -> Result<Profile, ProbeError> {
    let signatures = if attractor.is_finite_type() {
        compute_return_maps(map, attractor)
            .map_err(|e| ProbeError::Internal(e.to_string()))?
            .iter()
            .map(|d| d.signature())
            .collect()
    } else {
        Vec::new()
    };
    Ok(Profile {
        finite_type: attractor.is_finite_type(),
        components: attractor.set.len(),
        inside: attractor.placements.iter().filter(|p| p.in_attractor()).count(),
        outside: attractor.discontinuities_outside().len(),
        signatures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleMeasure {
    pub profile: Profile,
    pub hausdorff: Rational,
    pub components_match: bool,
    pub counts_match: bool,
    pub signatures_match: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SampleOutcome {
    Accepted(SampleMeasure),
    Rejected { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub deltas: Vec<Rational>,
    pub outcome: SampleOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeAggregate {
    pub accepted: usize,
    pub rejected: usize,
    pub min_hausdorff: Rational,
    pub max_hausdorff: Rational,
    pub components_preserved: usize,
    pub counts_preserved: usize,
    pub signatures_preserved: usize,
    /// Every accepted sample kept components, counts and signatures.
    pub all_preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeResult {
    pub epsilon: Rational,
    pub seed: u64,
    pub lcg_multiplier: u64,
    pub lcg_increment: u64,
    pub base: Profile,
    pub samples: Vec<SampleRecord>,
    pub aggregate: ProbeAggregate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeConfig {
    pub epsilon: Rational,
    pub samples: usize,
    pub seed: u64,
    /// Upper bound on worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

fn measure(base_map: &ItmMap, base_set: &IntervalSet, base: &Profile, spec: &PerturbationSpec) -> SampleOutcome {
    let map = match spec.apply(base_map) {
        Ok(m) => m,
        Err(e) => return SampleOutcome::Rejected { reason: e.to_string() },
    };
    let attractor = compute_attractor(&map, None);
    let profile = match profile(&map, &attractor) {
        Ok(p) => p,
        Err(e) => return SampleOutcome::Rejected { reason: e.to_string() },
    };
    let hausdorff = hausdorff_closure_distance(base_set, &attractor.set).expect("attractors are non-empty");
    SampleOutcome::Accepted(SampleMeasure {
        components_match: profile.components == base.components,
        counts_match: profile.inside == base.inside && profile.outside == base.outside,
        signatures_match: profile.finite_type && profile.signatures == base.signatures,
        profile,
        hausdorff,
    })
}

/// Draw `samples` seeded perturbations of size `< ε`, recompute everything
/// for each one that stays in the polytope, and compare with the base map.
pub fn perturbation_probe(map: &ItmMap, config: &ProbeConfig) -> Result<ProbeResult, ProbeError> {
    if config.samples == 0 {
        return Err(ProbeError::ZeroSamples);
    }
    if !config.epsilon.is_positive() {
        return Err(ProbeError::NonPositiveEpsilon);
    }
    let base_attractor = compute_attractor(map, None);
    if !base_attractor.is_finite_type() {
        return Err(ProbeError::NotFiniteType);
    }
    let base = profile(map, &base_attractor)?;
    let specs = generate_specs(map, &config.epsilon, config.samples, config.seed);

    let run = || -> Vec<SampleRecord> {
        specs
            .par_iter()
            .map(|spec| SampleRecord {
                index: spec.sample.expect("generated"),
                deltas: spec.deltas.clone(),
                outcome: measure(map, &base_attractor.set, &base, spec),
            })
            .collect()
    };
    let records = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ProbeError::Internal(e.to_string()))?
            .install(run),
        None => run(),
    };

    let accepted: Vec<&SampleMeasure> = records
        .iter()
        .filter_map(|r| match &r.outcome {
            SampleOutcome::Accepted(m) => Some(m),
            SampleOutcome::Rejected { .. } => None,
        })
        .collect();
    if accepted.is_empty() {
        return Err(ProbeError::NoValidSamples(records.len()));
    }
    let min_hausdorff = accepted.iter().map(|m| m.hausdorff.clone()).min().expect("non-empty");
    let max_hausdorff = accepted.iter().map(|m| m.hausdorff.clone()).max().expect("non-empty");
    let components_preserved = accepted.iter().filter(|m| m.components_match).count();
    let counts_preserved = accepted.iter().filter(|m| m.counts_match).count();
    let signatures_preserved = accepted.iter().filter(|m| m.signatures_match).count();
    let n = accepted.len();
    let aggregate = ProbeAggregate {
        accepted: n,
        rejected: records.len() - n,
        min_hausdorff,
        max_hausdorff,
        components_preserved,
        counts_preserved,
        signatures_preserved,
        all_preserved: components_preserved == n && counts_preserved == n && signatures_preserved == n,
    };
    Ok(ProbeResult {
        epsilon: config.epsilon.clone(),
        seed: config.seed,
        lcg_multiplier: LCG_MULTIPLIER,
        lcg_increment: LCG_INCREMENT,
        base,
        samples: records,
        aggregate,
    })
}

/// A perturbation built to turn a ghost cycle into a periodic interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectedPerturbation {
    pub spec: PerturbationSpec,
    /// `[β − ε, β)` at a minus-type vertex `β⁻` of the cycle.
    pub periodic_interval: Interval,
    /// Sum of the landing times along the cycle.
    pub period: usize,
    /// Branch whose translation carries each leg's shift, in cycle order.
    pub branches: Vec<usize>,
}

impl DirectedPerturbation {
    /// Follow the predicted interval under `perturbed` for `period` steps:
    /// it must never be cut by a discontinuity and must come back onto
    /// itself exactly.
    pub fn verify(&self, perturbed: &ItmMap) -> bool {
        let mut iv = self.periodic_interval.clone();
        for _ in 0..self.period {
            let parts = split_by_branch(perturbed, &iv);
            if parts.len() != 1 {
                return false;
            }
            iv = iv.translate(perturbed.gamma_at(parts[0].1));
        }
        iv == self.periodic_interval
    }
}

/// Push every landing of the cycle past its target by `ε`: a minus-type
/// child ends `ε` to the right of the target value, a plus-type child `ε`
/// to the left. Each leg's shift is carried by the translation of one branch
/// that the leg visits and no other leg does, so the shifts do not interfere.
pub fn a3_breaking_perturbation(map: &ItmMap, cycle: &[GhostEdge], epsilon: &Rational) -> Result<DirectedPerturbation, ProbeError> {
    if cycle.is_empty() {
        return Err(ProbeError::NotRealizableDirectly("empty cycle".into()));
    }
    let r = map.r();
    let legs: Vec<Vec<u64>> = cycle
        .iter()
        .map(|e| map.iterate(&e.child.point(map), e.time).counts.0)
        .collect();
    let mut deltas = vec![Rational::zero(); 2 * r - 1];
    let mut branches = Vec::with_capacity(cycle.len());
    for (k, (edge, counts)) in cycle.iter().zip(&legs).enumerate() {
        let branch = (0..r).find(|&s| counts[s] > 0 && legs.iter().enumerate().all(|(other, c)| other == k || c[s] == 0));
        let Some(s) = branch else {
            return Err(ProbeError::NotRealizableDirectly(format!(
                "every branch visited by the leg {} -> {} is shared with another leg",
                edge.child, edge.parent
            )));
        };
        let shift = match edge.child.side {
            Side::Minus => epsilon.clone(),
            Side::Plus => -epsilon,
        };
        deltas[s] = shift / Rational::from_integer(counts[s] as i64);
        branches.push(s + 1);
    }
    let start = cycle
        .iter()
        .find(|e| e.child.side == Side::Minus)
        .expect("ghost cycles alternate sides");
    let beta = map.beta_at(start.child.index);
    let periodic_interval = Interval::new(beta - epsilon, beta.clone())
        .ok_or_else(|| ProbeError::NotRealizableDirectly("epsilon must be positive".into()))?;
    Ok(DirectedPerturbation {
        spec: PerturbationSpec {
            epsilon: epsilon.clone(),
            deltas,
            seed: None,
            sample: None,
        },
        periodic_interval,
        period: cycle.iter().map(|e| e.time).sum(),
        branches,
    })
}

/// Outcome of applying a directed perturbation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectedOutcome {
    pub perturbation: DirectedPerturbation,
    pub perturbed_attractor: IntervalSet,
    pub periodic_interval_verified: bool,
    /// `periodic_interval ⊆ X̃`.
    pub periodic_interval_in_attractor: bool,
    pub hausdorff: Rational,
}

pub fn apply_directed(map: &ItmMap, perturbation: DirectedPerturbation) -> Result<DirectedOutcome, ProbeError> {
    let base = compute_attractor(map, None);
    if !base.is_finite_type() {
        return Err(ProbeError::NotFiniteType);
    }
    let perturbed = perturbation.spec.apply(map).map_err(ProbeError::OutOfPolytope)?;
    let attractor = compute_attractor(&perturbed, None);
    let hausdorff = hausdorff_closure_distance(&base.set, &attractor.set).expect("attractors are non-empty");
    Ok(DirectedOutcome {
        periodic_interval_verified: perturbation.verify(&perturbed),
        periodic_interval_in_attractor: IntervalSet::single(perturbation.periodic_interval.clone()).is_subset_of(&attractor.set),
        perturbation,
        perturbed_attractor: attractor.set,
        hausdorff,
    })
}
