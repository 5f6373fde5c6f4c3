//! Coefficient vectors in `W(r) = ℝ^r ⊕ ℝ^{r−1}` attached to the orbit of a
//! component, their products with the parameter vector, and the shape of
//! their linear dependencies.

use serde::Serialize;

use crate::dynamics::ItmMap;
use crate::linalg::nullspace;
use crate::numerics::{Rational, Side};
use crate::return_map::{ReturnMapData, SignedChain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorTag {
    /// `L_j`
    Landing { j: usize },
    /// `C^±(j,k)`
    CriticalConnection { side: Side, j: usize, k: usize },
    /// `R_j^±`
    Return { side: Side, j: usize },
}

impl std::fmt::Display for VectorTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VectorTag::Landing { j } => write!(f, "L_{j}"),
            VectorTag::CriticalConnection { side, j, k } => write!(f, "C{}({j},{k})", side.symbol()),
            VectorTag::Return { side, j } => write!(f, "R{}_{j}", side.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientVector {
    pub tag: VectorTag,
    /// Coordinates on `e₁..e_r`.
    pub e_part: Vec<i64>,
    /// Coordinates on `f₁..f_{r−1}`.
    pub f_part: Vec<i64>,
}

impl CoefficientVector {
    /// `Σ e_s γ_s + Σ f_s β_s`.
    pub fn product(&self, map: &ItmMap) -> Rational {
        let e: Rational = self
            .e_part
            .iter()
            .zip(map.gamma())
            .filter(|(c, _)| **c != 0)
            .map(|(c, g)| g.scale(*c))
            .sum();
        let f: Rational = self
            .f_part
            .iter()
            .zip(map.beta())
            .filter(|(c, _)| **c != 0)
            .map(|(c, b)| b.scale(*c))
            .sum();
        e + f
    }

    pub fn coordinates(&self) -> Vec<i64> {
        self.e_part.iter().chain(&self.f_part).copied().collect()
    }

    pub fn e_total(&self) -> i64 {
        self.e_part.iter().sum()
    }
}

fn counts(chain: &SignedChain, r: usize, from: usize, to: usize) -> Vec<i64> {
    chain.counts_between(r, from, to).0.into_iter().map(|k| k as i64).collect()
}

fn unit_f(r: usize, index: usize, sign: i64) -> Vec<i64> {
    let mut f = vec![0; r - 1];
    f[index - 1] += sign;
    f
}

/// Vectors for one signed chain starting at `a_j^side`. The landing vector is
/// pushed only when `with_landing` is set, so that interior cut points get a
/// single `L_j` although both of their chains would produce it.
fn chain_vectors(out: &mut Vec<CoefficientVector>, chain: &SignedChain, side: Side, j: usize, r: usize, with_landing: bool) {
    let hits = &chain.hits;
    if hits.is_empty() {
        out.push(CoefficientVector {
            tag: VectorTag::Return { side, j },
            e_part: counts(chain, r, 0, chain.return_time),
            f_part: vec![0; r - 1],
        });
        return;
    }
    if with_landing {
        out.push(CoefficientVector {
            tag: VectorTag::Landing { j },
            e_part: counts(chain, r, 0, hits[0].time),
            f_part: unit_f(r, hits[0].discontinuity, -1),
        });
    }
    for k in 1..hits.len() {
        let mut f = unit_f(r, hits[k - 1].discontinuity, 1);
        f[hits[k].discontinuity - 1] -= 1;
        out.push(CoefficientVector {
            tag: VectorTag::CriticalConnection { side, j, k },
            e_part: counts(chain, r, hits[k - 1].time, hits[k].time),
            f_part: f,
        });
    }
    let last = hits.last().expect("non-empty");
    out.push(CoefficientVector {
        tag: VectorTag::Return { side, j },
        e_part: counts(chain, r, last.time, chain.return_time),
        f_part: unit_f(r, last.discontinuity, 1),
    });
}

/// All `L`, `C` and `R` vectors of a component. Boundary points whose chains
/// are empty get only their `f`-free return vector.
pub fn build_vectors(data: &ReturnMapData, map: &ItmMap) -> Vec<CoefficientVector> {
    let r = map.r();
    let n = data.n();
    let mut out = Vec::new();
    for j in 0..n {
        chain_vectors(&mut out, data.plus_chain(j), Side::Plus, j, r, true);
    }
    for j in 1..=n {
        chain_vectors(&mut out, data.minus_chain(j), Side::Minus, j, r, j == n);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub tag: VectorTag,
    /// The product `⟨v, (γ β)⟩`.
    pub product: Rational,
    /// The value the product must equal.
    pub expected: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("IdentityViolated({0})")]
pub struct IdentityViolated(pub String);

/// Check `⟨L_j⟩ + a_j = 0`, `⟨C⟩ = 0` and `⟨R_j^±⟩ = R_J(a_j^±)` (minus `a_j`
/// for the `f`-free boundary variant), plus `R_J(a_j^±) ∈ J`.
pub fn verify_identities(data: &ReturnMapData, map: &ItmMap) -> Vec<IdentityCheck> {
    build_vectors(data, map)
        .into_iter()
        .map(|v| {
            let product = v.product(map);
            let (expected, extra_ok) = match v.tag {
                VectorTag::Landing { j } => (-&data.cut_points[j], true),
                VectorTag::CriticalConnection { .. } => (Rational::zero(), true),
                VectorTag::Return { side, j } => {
                    let chain = match side {
                        Side::Plus => data.plus_chain(j),
                        Side::Minus => data.minus_chain(j),
                    };
                    let inside = data.component.contains_signed(&chain.image);
                    let value = if chain.is_empty() {
                        &chain.image.value - &data.cut_points[j]
                    } else {
                        chain.image.value.clone()
                    };
                    (value, inside)
                }
            };
            let holds = extra_ok && product == expected;
            IdentityCheck {
                tag: v.tag,
                product,
                expected,
                holds,
            }
        })
        .collect()
}

/// Like [`verify_identities`], failing on the first violated identity.
pub fn require_identities(data: &ReturnMapData, map: &ItmMap) -> Result<Vec<IdentityCheck>, IdentityViolated> {
    let checks = verify_identities(data, map);
    match checks.iter().find(|c| !c.holds) {
        Some(bad) => Err(IdentityViolated(bad.tag.to_string())),
        None => Ok(checks),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinDepPattern {
    PatternHolds { nullity: usize },
    PatternViolated { basis_vector: Vec<Rational>, tags: Vec<VectorTag>, reason: String },
}

impl LinDepPattern {
    pub fn holds(&self) -> bool {
        matches!(self, LinDepPattern::PatternHolds { .. })
    }
}

/// Compute every linear dependency among the vectors exactly and check that
/// each one has the forced shape: along the `+` chain of `a_j` and the `−`
/// chain of `a_{j+1}` the coefficients are `c` and `−c` for a single `c`,
/// and `α(L_j) = α_j⁻ + α_j⁺` at interior cut points. Boundary `L₀`, `L_N`
/// are unconstrained; missing vectors simply drop out of the equalities.
pub fn check_lin_dep_pattern(data: &ReturnMapData, map: &ItmMap) -> LinDepPattern {
    let vectors = build_vectors(data, map);
    let columns: Vec<Vec<i64>> = vectors.iter().map(|v| v.coordinates()).collect();
    let tags: Vec<VectorTag> = vectors.iter().map(|v| v.tag).collect();
    let basis = nullspace(&columns);
    let n = data.n();

    let chain_of = |side: Side, j: usize| -> Vec<usize> {
        tags.iter()
            .enumerate()
            .filter(|(_, t)| match t {
                VectorTag::CriticalConnection { side: s, j: jj, .. } | VectorTag::Return { side: s, j: jj } => *s == side && *jj == j,
                VectorTag::Landing { .. } => false,
            })
            .map(|(i, _)| i)
            .collect()
    };
    let return_of = |side: Side, j: usize| -> usize {
        tags.iter()
            .position(|t| *t == VectorTag::Return { side, j })
            .expect("every signed cut point has a return vector")
    };

    for alpha in &basis {
        let fail = |reason: String| LinDepPattern::PatternViolated {
            basis_vector: alpha.clone(),
            tags: tags.clone(),
            reason,
        };
        for j in 0..n {
            let c = &alpha[return_of(Side::Plus, j)];
            if let Some(i) = chain_of(Side::Plus, j).into_iter().find(|&i| alpha[i] != *c) {
                return fail(format!("{} differs from R+_{j}", tags[i]));
            }
            let minus_c = -c;
            if let Some(i) = chain_of(Side::Minus, j + 1).into_iter().find(|&i| alpha[i] != minus_c) {
                return fail(format!("{} is not the negative of R+_{j}", tags[i]));
            }
        }
        for j in 1..n {
            let Some(l) = tags.iter().position(|t| *t == VectorTag::Landing { j }) else {
                return fail(format!("interior cut point {j} has no landing vector"));
            };
            let sum = &alpha[return_of(Side::Minus, j)] + &alpha[return_of(Side::Plus, j)];
            if alpha[l] != sum {
                return fail(format!("L_{j} coefficient is not R-_{j} + R+_{j}"));
            }
        }
    }
    LinDepPattern::PatternHolds { nullity: basis.len() }
}
