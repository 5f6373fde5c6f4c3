//! Shared fixtures, the seeded map corpus, and naive pointwise oracles that
//! do not use the engine's piece propagation.

#![allow(dead_code)]

use itmlab_core::numerics::{q, Interval, IntervalSet, Rational};
use itmlab_core::ItmMap;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fig1() -> ItmMap {
    ItmMap::validate(3, vec![q(1, 3), q(2, 3)], vec![q(1, 3), q(1, 7), q(-1, 2)]).unwrap()
}

pub fn rotation() -> ItmMap {
    ItmMap::validate(2, vec![q(2, 5)], vec![q(3, 5), q(-2, 5)]).unwrap()
}

/// A map with `T(β₁⁻) = β₂⁻`, `T(β₂⁺) = β₁⁺` and all four signed points
/// outside `X`, found by [`search_ghost_map`].
pub fn ghost_map() -> ItmMap {
    ItmMap::validate(4, vec![q(1, 9), q(4, 9), q(2, 3)], vec![q(1, 3), q(4, 9), q(-1, 3), q(-1, 9)]).unwrap()
}

/// Random map with every parameter on the grid `1/d`, `d = den`.
pub fn random_map_on_grid(rng: &mut ChaCha8Rng, r: usize, den: i64) -> ItmMap {
    let mut cuts: Vec<i64> = Vec::new();
    while cuts.len() < r - 1 {
        let k = rng.gen_range(1..den);
        if !cuts.contains(&k) {
            cuts.push(k);
        }
    }
    cuts.sort();
    let mut bounds = vec![0];
    bounds.extend(&cuts);
    bounds.push(den);
    let gamma: Vec<Rational> = (0..r)
        .map(|i| q(rng.gen_range(-bounds[i]..=den - bounds[i + 1]), den))
        .collect();
    let beta: Vec<Rational> = cuts.iter().map(|&k| q(k, den)).collect();
    ItmMap::validate(r, beta, gamma).expect("grid construction respects the polytope")
}

/// `count` maps with `r ∈ {2,3,4}` and a common denominator `≤ max_den`.
pub fn corpus(count: usize, seed: u64, max_den: i64) -> Vec<ItmMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.gen_range(2..=4usize);
            let den = rng.gen_range(r as i64 + 1..=max_den);
            random_map_on_grid(&mut rng, r, den)
        })
        .collect()
}

/// The default corpus used by the property suites.
pub fn standard_corpus() -> Vec<ItmMap> {
    corpus(60, 0x17a1_2026, 64)
}

/// Plain `T(x)` by linear scan of the branch boundaries.
pub fn naive_step(map: &ItmMap, x: &Rational) -> Rational {
    let mut branch = 0;
    for (k, b) in map.beta().iter().enumerate() {
        if x >= b {
            branch = k + 1;
        }
    }
    x + &map.gamma()[branch]
}

/// `X` reconstructed pointwise: iterate every point of the `1/(4Q)` grid for
/// `3Q` steps and take the union of the grid cells the orbits end in.
pub fn naive_attractor(map: &ItmMap) -> IntervalSet {
    let qq = map.grid_bound() as i64;
    let fine = 4 * qq;
    let steps = 3 * qq;
    let mut cells = Vec::new();
    for k in 0..fine {
        let mut x = q(k, fine);
        for _ in 0..steps {
            x = naive_step(map, &x);
        }
        cells.push((x.clone(), x + q(1, fine)));
    }
    IntervalSet::canonicalize(cells)
}

/// First return of `z ∈ J` computed by plain iteration.
pub fn naive_first_return(map: &ItmMap, component: &Interval, z: &Rational, cap: usize) -> Option<(usize, Rational)> {
    let mut x = z.clone();
    for n in 1..=cap {
        x = naive_step(map, &x);
        if component.contains(&x) {
            return Some((n, x));
        }
    }
    None
}

/// Points of the `1/(4Q)` grid inside `J`.
pub fn grid_points(map: &ItmMap, component: &Interval) -> Vec<Rational> {
    let fine = 4 * map.grid_bound() as i64;
    (0..fine).map(|k| q(k, fine)).filter(|z| component.contains(z)).collect()
}

/// Search rational parameters for the ghost example: `r = 4`, common
/// denominator `d ≤ max_den` ascending, `T(β₁⁻) = β₂⁻` and `T(β₂⁺) = β₁⁺`
/// (hence `γ₁ = β₂ − β₁`, `γ₃ = β₁ − β₂`), all four signed points outside
/// `X`, `T(I)` compactly inside `(0,1)` and `β₁` away from the closure of `X`.
pub fn search_ghost_map(max_den: i64) -> Option<ItmMap> {
    use itmlab_core::compute_attractor;
    use itmlab_core::numerics::SignedPoint;
    for d in 3..=max_den {
        for b1 in 1..d {
            for b2 in b1 + 1..d {
                for b3 in b2 + 1..d {
                    let g1 = b2 - b1;
                    let g3 = b1 - b2;
                    // Branch 3 is [b2, b3): its translate must stay in [0, 1).
                    if b2 + g3 < 0 || b3 + g3 > d {
                        continue;
                    }
                    if b1 + g1 > d {
                        continue;
                    }
                    for g2 in -b1..=d - b2 {
                        for g4 in -b3..=0 {
                            let beta = vec![q(b1, d), q(b2, d), q(b3, d)];
                            let gamma = vec![q(g1, d), q(g2, d), q(g3, d), q(g4, d)];
                            let Ok(t) = ItmMap::validate(4, beta, gamma) else {
                                continue;
                            };
                            if !t.image_compactly_contained() {
                                continue;
                            }
                            let x = compute_attractor(&t, None).set;
                            let outside = [1usize, 2].iter().all(|&i| {
                                let v = t.beta_at(i).clone();
                                !x.contains_signed(&SignedPoint::minus(v.clone()).unwrap())
                                    && !x.contains_signed(&SignedPoint::plus(v).unwrap())
                            });
                            if outside && !x.closure_contains(t.beta_at(1)) {
                                return Some(t);
                            }
                        }
                    }
                }
            }
        }
    }
    None
}
