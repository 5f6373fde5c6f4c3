//! The interval translation map itself.
//!
//! `T(x) = x + γᵢ` on `[βᵢ₋₁, βᵢ)` with `β₀ = 0`, `β_r = 1`. Branch and
//! discontinuity indices are 1-based throughout, as in `β₁..β_{r−1}` and
//! `γ₁..γ_r`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::numerics::{Interval, Rational, Side, SignedPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("r must be at least 2 (got {0})")]
    TooFewBranches(usize),
    #[error("BadArity: expected {expected} {what}, got {got}")]
    BadArity {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("BadOrder: discontinuities must satisfy 0 < β₁ < … < β_(r−1) < 1")]
    BadOrder,
    #[error("BadTranslation({0}): γ_{0} lies outside [−β_{{i−1}}, 1−β_i]")]
    BadTranslation(usize),
    #[error("cannot parse map specification: {0}")]
    Parse(String),
}

/// A validated ITM with rational parameters.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ItmMap {
    beta: Vec<Rational>,
    gamma: Vec<Rational>,
    /// `0, β₁, …, β_{r−1}, 1`
    cuts: Vec<Rational>,
    grid: BigInt,
}

impl ItmMap {
    /// Validate parameters against the polytope `ITM(r)`.
    pub fn validate(r: usize, beta: Vec<Rational>, gamma: Vec<Rational>) -> Result<Self, MapError> {
        if r < 2 {
            return Err(MapError::TooFewBranches(r));
        }
        if beta.len() != r - 1 {
            return Err(MapError::BadArity {
                what: "discontinuities",
                expected: r - 1,
                got: beta.len(),
            });
        }
        if gamma.len() != r {
            return Err(MapError::BadArity {
                what: "translations",
                expected: r,
                got: gamma.len(),
            });
        }
        let mut cuts = Vec::with_capacity(r + 1);
        cuts.push(Rational::zero());
        cuts.extend(beta.iter().cloned());
        cuts.push(Rational::one());
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MapError::BadOrder);
        }
        for (i, g) in gamma.iter().enumerate() {
            let lo = -&cuts[i];
            let hi = Rational::one() - &cuts[i + 1];
            if *g < lo || *g > hi {
                return Err(MapError::BadTranslation(i + 1));
            }
        }
        let grid = Rational::lcm_of_denominators(beta.iter().chain(gamma.iter()));
        Ok(ItmMap {
            beta,
            gamma,
            cuts,
            grid,
        })
    }

    pub fn new(beta: Vec<Rational>, gamma: Vec<Rational>) -> Result<Self, MapError> {
        let r = gamma.len();
        Self::validate(r, beta, gamma)
    }

    pub fn r(&self) -> usize {
        self.gamma.len()
    }

    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    pub fn gamma(&self) -> &[Rational] {
        &self.gamma
    }

    /// `β_i` for `1 ≤ i ≤ r−1`.
    pub fn beta_at(&self, i: usize) -> &Rational {
        &self.beta[i - 1]
    }

    /// `γ_i` for `1 ≤ i ≤ r`.
    pub fn gamma_at(&self, i: usize) -> &Rational {
        &self.gamma[i - 1]
    }

    /// `Q`, the lcm of all parameter denominators. Every orbit of a point on
    /// the grid `{k/Q}` stays on it.
    pub fn grid(&self) -> &BigInt {
        &self.grid
    }

    /// `Q` as an iteration bound (saturating).
    pub fn grid_bound(&self) -> usize {
        self.grid.to_usize().unwrap_or(usize::MAX)
    }

    /// Branch domain `I_i = [β_{i−1}, β_i)`.
    pub fn branch_interval(&self, i: usize) -> Interval {
        Interval::new(self.cuts[i - 1].clone(), self.cuts[i].clone()).expect("cuts increase")
    }

    /// Parameter vector `(γ₁..γ_r, β₁..β_{r−1})`.
    pub fn parameters(&self) -> Vec<Rational> {
        self.gamma.iter().chain(self.beta.iter()).cloned().collect()
    }

    /// Rebuild from a parameter vector in `(γ, β)` order.
    pub fn from_parameters(r: usize, params: &[Rational]) -> Result<Self, MapError> {
        if params.len() != 2 * r - 1 {
            return Err(MapError::BadArity {
                what: "parameters",
                expected: 2 * r - 1,
                got: params.len(),
            });
        }
        Self::validate(r, params[r..].to_vec(), params[..r].to_vec())
    }

    /// Whether `T(I)` is compactly contained in `(0, 1)`, i.e. every branch
    /// image stays away from both ends of the interval.
    pub fn image_compactly_contained(&self) -> bool {
        (1..=self.r()).all(|i| {
            let lo = &self.cuts[i - 1] + &self.gamma[i - 1];
            let hi = &self.cuts[i] + &self.gamma[i - 1];
            lo.is_positive() && hi < 1
        })
    }

    /// The index `i` with `β_i = x`, if `x` is a discontinuity. `0` and `1`
    /// are not discontinuities.
    pub fn discontinuity_index(&self, x: &Rational) -> Option<usize> {
        self.beta.binary_search(x).ok().map(|k| k + 1)
    }

    /// Branch of the plain point `x ∈ [0,1)`, i.e. of `x⁺`.
    pub fn branch_of_value(&self, x: &Rational) -> usize {
        1 + self.beta.partition_point(|b| b <= x)
    }

    pub fn branch_of(&self, p: &SignedPoint) -> usize {
        match p.side {
            Side::Plus => 1 + self.beta.partition_point(|b| b <= &p.value),
            Side::Minus => 1 + self.beta.partition_point(|b| b < &p.value),
        }
    }

    pub fn step(&self, p: &SignedPoint) -> SignedPoint {
        let i = self.branch_of(p);
        SignedPoint {
            value: &p.value + &self.gamma[i - 1],
            side: p.side,
        }
    }

    /// `T(x)` for a plain point.
    pub fn apply(&self, x: &Rational) -> Rational {
        x + &self.gamma[self.branch_of_value(x) - 1]
    }

    pub fn iterate(&self, p: &SignedPoint, n: usize) -> Orbit {
        let mut point = p.clone();
        let mut symbols = Vec::with_capacity(n);
        let mut counts = vec![0u64; self.r()];
        for _ in 0..n {
            let i = self.branch_of(&point);
            symbols.push(i);
            counts[i - 1] += 1;
            point = SignedPoint {
                value: &point.value + &self.gamma[i - 1],
                side: point.side,
            };
        }
        Orbit {
            end: point,
            itinerary: Itinerary(symbols),
            counts: EntryCounts(counts),
        }
    }

    /// `Tr(p, n) = Tⁿ(p) − p`.
    pub fn translation_factor(&self, p: &SignedPoint, n: usize) -> Rational {
        self.iterate(p, n).end.value - &p.value
    }

    /// `Σ_s k_s γ_s`.
    pub fn translation_of(&self, counts: &EntryCounts) -> Rational {
        counts
            .0
            .iter()
            .zip(&self.gamma)
            .filter(|(k, _)| **k > 0)
            .map(|(k, g)| g.scale(*k as i64))
            .sum()
    }

    /// Follow the orbit of `p` from time 1 on until it equals a discontinuity
    /// value (`Precritical`) or revisits a state (`Preperiodic`). The orbit
    /// lives on the finite grid `{k/Q}`, so this terminates within `Q + 1`
    /// steps.
    pub fn classify_orbit(&self, p: &SignedPoint) -> OrbitClass {
        let mut seen: HashMap<SignedPoint, usize> = HashMap::new();
        let mut point = p.clone();
        let mut t = 0usize;
        loop {
            if t >= 1 {
                if let Some(i) = self.discontinuity_index(&point.value) {
                    return OrbitClass::Precritical {
                        discontinuity: i,
                        side: point.side,
                        time: t,
                    };
                }
            }
            if let Some(first) = seen.get(&point) {
                return OrbitClass::Preperiodic {
                    preperiod: *first,
                    period: t - first,
                };
            }
            seen.insert(point.clone(), t);
            point = self.step(&point);
            t += 1;
        }
    }

    pub fn to_spec(&self) -> MapSpec {
        MapSpec {
            r: self.r(),
            beta: self.beta.clone(),
            gamma: self.gamma.clone(),
        }
    }

    /// Parse and validate a JSON map specification.
    pub fn from_json(text: &str) -> Result<Self, MapError> {
        let spec: MapSpec = serde_json::from_str(text).map_err(|e| MapError::Parse(e.to_string()))?;
        spec.into_map()
    }
}

impl std::fmt::Debug for ItmMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ItmMap {{ beta: {:?}, gamma: {:?} }}", self.beta, self.gamma)
    }
}

/// On-disk map description: `{"r": 3, "beta": ["1/3","2/3"], "gamma": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub r: usize,
    pub beta: Vec<Rational>,
    pub gamma: Vec<Rational>,
}

impl MapSpec {
    pub fn into_map(self) -> Result<ItmMap, MapError> {
        ItmMap::validate(self.r, self.beta, self.gamma)
    }
}

/// Branch symbols `i₀, i₁, …` of an orbit segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Itinerary(pub Vec<usize>);

impl Itinerary {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry counts over the symbols in `from..to`.
    pub fn counts_between(&self, r: usize, from: usize, to: usize) -> EntryCounts {
        let mut counts = vec![0u64; r];
        for &s in &self.0[from..to] {
            counts[s - 1] += 1;
        }
        EntryCounts(counts)
    }
}

/// `k_s(x, n)` for `s = 1..r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct EntryCounts(pub Vec<u64>);

impl EntryCounts {
    pub fn horizon(&self) -> u64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub end: SignedPoint,
    pub itinerary: Itinerary,
    pub counts: EntryCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitClass {
    /// The orbit hits `β_discontinuity` (on `side`) at `time ≥ 1`.
    Precritical {
        discontinuity: usize,
        side: Side,
        time: usize,
    },
    Preperiodic {
        preperiod: usize,
        period: usize,
    },
}
