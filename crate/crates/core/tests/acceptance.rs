//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{corpus, fig1, grid_points, naive_attractor, naive_first_return, rotation, search_ghost_map, standard_corpus};
use itmlab_core::ghost::build_ghost_graph;
use itmlab_core::probe::{a3_breaking_perturbation, apply_directed, perturbation_probe, ProbeConfig};
use itmlab_core::return_map::{orbit_union, verify_touching_equations};
use itmlab_core::vectors::{check_lin_dep_pattern, verify_identities};
use itmlab_core::{
    analyze, compute_attractor, compute_return_maps, nonwandering_witness, q, Interval, IntervalSet, ItmMap, Rational, Recurrence,
    ReturnMapData, Side, SignedPoint, Stabilization, Verdict,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn fig1_x() -> IntervalSet {
    IntervalSet::canonicalize([(q(1, 6), q(13, 42)), (q(1, 2), q(17, 21))])
}

fn fig1_components(map: &ItmMap) -> Result<(ReturnMapData, ReturnMapData), String> {
    let a = compute_attractor(map, None);
    let mut maps = compute_return_maps(map, &a).map_err(|e| e.to_string())?;
    ensure(maps.len() == 2, format!("expected 2 components, got {}", maps.len()))?;
    let b = maps.pop().unwrap();
    let a = maps.pop().unwrap();
    Ok((a, b))
}

/// Pointwise comparison of a return map with direct iteration on the
/// `1/(4Q)` grid; returns the number of points compared.
fn oracle_agrees(map: &ItmMap, data: &ReturnMapData, cap: usize) -> Result<usize, String> {
    let points = grid_points(map, &data.component);
    for z in &points {
        let naive = naive_first_return(map, &data.component, z, cap).ok_or_else(|| format!("{z} does not return in {cap}"))?;
        let fast = data.apply(z).ok_or_else(|| format!("{z} outside {}", data.component))?;
        ensure((fast.1, fast.0.clone()) == naive, format!("{map:?} at {z}: {fast:?} vs {naive:?}"))?;
    }
    Ok(points.len())
}

fn criterion_1() -> Check {
    let t = fig1();
    let start = Instant::now();
    let a = compute_attractor(&t, None);
    let elapsed = start.elapsed();
    ensure(a.set == fig1_x(), format!("X = {}", a.set))?;
    ensure(a.stabilization == Stabilization::Step(3), format!("{:?}", a.stabilization))?;
    within(elapsed, Duration::from_secs(1))?;
    ensure(naive_attractor(&t) == a.set, "grid oracle disagrees")?;
    Ok(format!("X = {} at step 3 in {elapsed:.2?}", a.set))
}

fn criterion_2() -> Check {
    let t = fig1();
    let plus = t.iterate(&SignedPoint::plus(q(2, 3)).unwrap(), 3).end;
    let minus = t.iterate(&SignedPoint::minus(q(2, 3)).unwrap(), 3).end;
    ensure(plus.value == q(9, 14) && minus.value == q(9, 14), format!("{plus} / {minus}"))?;
    ensure(plus.side == Side::Plus && minus.side == Side::Minus && plus.touches(&minus), "sides do not touch")?;
    Ok(format!("T^3(2/3+) = {plus}, T^3(2/3-) = {minus}"))
}

fn criterion_3() -> Check {
    let t = fig1();
    let an = analyze(&t, None).map_err(|e| e.to_string())?;
    let r = &an.report;
    ensure(r.finite_type, "not finite type")?;
    ensure(r.a1 == Verdict::Holds, format!("A1 {:?}", r.a1))?;
    ensure(r.a2 == Verdict::Holds, format!("A2 {:?}", r.a2))?;
    ensure(r.a3 == Verdict::Holds, format!("A3 {:?}", r.a3))?;
    ensure(r.matching == Verdict::Holds, format!("Matching {:?}", r.matching))?;
    ensure(r.stable, "verdict unstable")?;
    let orbits = an.return_maps.iter().fold(IntervalSet::empty(), |acc, d| acc.union(&orbit_union(&t, d)));
    ensure(orbits == an.attractor.set, format!("O(J_A) ∪ O(J_B) = {orbits}"))?;
    Ok("stable, all conditions hold, O(J_A) ∪ O(J_B) = X".into())
}

fn criterion_4() -> Check {
    let t = fig1();
    let (ja, jb) = fig1_components(&t)?;
    ensure(jb.component == Interval::new(q(1, 2), q(17, 21)).unwrap(), format!("J_B = {}", jb.component))?;
    ensure(jb.n() == 2 && jb.return_times == [1, 2] && jb.sigma == [2, 1], format!("J_B {:?} {:?}", jb.return_times, jb.sigma))?;
    let touch_b = verify_touching_equations(&jb).map_err(|e| e.to_string())?;
    ensure(touch_b == [q(9, 14)], format!("J_B touching {touch_b:?}"))?;
    ensure(ja.n() == 2 && ja.return_times == [4, 3], format!("J_A {:?}", ja.return_times))?;
    let touch_a = verify_touching_equations(&ja).map_err(|e| e.to_string())?;
    ensure(touch_a == [q(2, 7)], format!("J_A touching {touch_a:?}"))?;
    let cap = 4 * t.grid_bound() * 2;
    let n = oracle_agrees(&t, &ja, cap)? + oracle_agrees(&t, &jb, cap)?;
    Ok(format!("J_A times (4,3) touching 2/7, J_B times (1,2) sigma (2 1) touching 9/14, {n} grid points agree"))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let maps: Vec<ItmMap> = std::iter::once(fig1()).chain(standard_corpus()).collect();
    let mut finite = 0;
    let mut checks = 0;
    for map in &maps {
        let a = compute_attractor(map, None);
        if !a.is_finite_type() {
            continue;
        }
        finite += 1;
        for data in compute_return_maps(map, &a).map_err(|e| format!("{map:?}: {e}"))? {
            for c in verify_identities(&data, map) {
                checks += 1;
                ensure(c.holds, format!("{map:?}: {} gave {} not {}", c.tag, c.product, c.expected))?;
            }
            let pattern = check_lin_dep_pattern(&data, map);
            ensure(pattern.holds(), format!("{map:?} on {}: {pattern:?}", data.component))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(finite >= 51, format!("only {finite} finite-type maps"))?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("{checks} identities, pattern holds on {finite} maps in {elapsed:.2?}"))
}

fn criterion_6() -> Check {
    let t = fig1();
    let eps = q(1, 1000);
    let start = Instant::now();
    let res = perturbation_probe(
        &t,
        &ProbeConfig {
            epsilon: eps.clone(),
            samples: 200,
            seed: 7,
            threads: None,
        },
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let agg = &res.aggregate;
    ensure(res.base.components == 2 && res.base.inside == 1, format!("base profile {:?}", res.base))?;
    ensure(agg.accepted > 0, "no accepted samples")?;
    ensure(agg.components_preserved == agg.accepted, format!("components preserved {}/{}", agg.components_preserved, agg.accepted))?;
    ensure(agg.counts_preserved == agg.accepted, format!("counts preserved {}/{}", agg.counts_preserved, agg.accepted))?;
    ensure(agg.signatures_preserved == agg.accepted, format!("signatures preserved {}/{}", agg.signatures_preserved, agg.accepted))?;
    ensure(agg.max_hausdorff <= eps.scale(20), format!("max Hausdorff {}", agg.max_hausdorff))?;
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "{} accepted, all preserved, max Hausdorff {} ({:.2}ε) in {elapsed:.2?}",
        agg.accepted,
        agg.max_hausdorff,
        (&agg.max_hausdorff / &eps).to_f64()
    ))
}

fn criterion_7() -> Check {
    let t = search_ghost_map(32).ok_or("constraint search found nothing")?;
    ensure(t.gamma_at(1) == &(t.beta_at(2) - t.beta_at(1)) && t.gamma_at(3) == &(t.beta_at(1) - t.beta_at(2)), "landing equations")?;
    let b1m = t.step(&SignedPoint::minus(t.beta_at(1).clone()).unwrap());
    let b2p = t.step(&SignedPoint::plus(t.beta_at(2).clone()).unwrap());
    ensure(b1m.value == *t.beta_at(2) && b2p.value == *t.beta_at(1), "T(β₁⁻) = β₂⁻ and T(β₂⁺) = β₁⁺ fail")?;
    let an = analyze(&t, None).map_err(|e| e.to_string())?;
    let outside = build_ghost_graph(&t, &an.attractor).nodes.iter().filter(|n| n.node.index <= 2 && !n.in_x).count();
    ensure(outside == 4, format!("{outside} of the four signed points outside X"))?;
    ensure(!an.report.stable, "verdict stable")?;
    let w = an.report.a3.witness().ok_or("A3 not violated")?;
    ensure(w.reverify(&t), "A3 witness does not re-verify")?;
    let eps = q(1, 4096);
    let d = a3_breaking_perturbation(&t, &w.cycle, &eps).map_err(|e| e.to_string())?;
    let out = apply_directed(&t, d).map_err(|e| e.to_string())?;
    let beta = t.beta_at(w.beta);
    let near = out
        .perturbed_attractor
        .iter()
        .find(|iv| IntervalSet::single((*iv).clone()).closure_distance(beta).is_some_and(|d| d <= eps))
        .ok_or("no component within ε of β₁")?
        .clone();
    ensure(!an.attractor.set.iter().any(|iv| iv.overlaps(&near)), "component near β₁ was already there")?;
    let gap = an.attractor.set.closure_distance(beta).unwrap();
    ensure(out.hausdorff.scale(2) >= gap, format!("Hausdorff {} < {gap}/2", out.hausdorff))?;
    ensure(out.periodic_interval_verified, "predicted periodic interval not periodic")?;
    Ok(format!(
        "{t:?}: unstable (A3), new component {near}, Hausdorff {} ≥ {}",
        out.hausdorff,
        &gap / &Rational::from_integer(2)
    ))
}

fn criterion_8() -> Check {
    let t = rotation();
    let a = compute_attractor(&t, None);
    ensure(a.set == IntervalSet::unit(), format!("X = {}", a.set))?;
    ensure(a.stabilization == Stabilization::Step(0), format!("{:?}", a.stabilization))?;
    ensure(analyze(&t, None).map_err(|e| e.to_string())?.report.stable, "not stable")?;
    let mut sampled = 0;
    for k in 0..40 {
        let x = q(k, 40);
        for p in [SignedPoint::plus(x.clone()).ok(), SignedPoint::minus(x.clone()).ok()].into_iter().flatten() {
            ensure(t.translation_factor(&p, 5).is_zero(), format!("Tr({p}, 5) ≠ 0"))?;
            sampled += 1;
        }
    }
    Ok(format!("X = [0,1) at step 0, stable, Tr(x,5) = 0 on {sampled} signed points"))
}

fn criterion_9() -> Check {
    let maps = corpus(200, 0x0909, 1024);
    let mut worst = 0.0f64;
    for map in &maps {
        let qq = map.grid_bound();
        ensure(qq <= 1024, format!("{map:?} has Q = {qq}"))?;
        match compute_attractor(map, None).stabilization {
            Stabilization::Step(n) if n <= qq => worst = worst.max(n as f64 / qq as f64),
            other => return Err(format!("{map:?}: {other:?} with Q = {qq}")),
        }
    }
    Ok(format!("{} maps stabilized, largest step/Q = {worst:.3}", maps.len()))
}

fn criterion_10() -> Check {
    let t = fig1();
    let a = compute_attractor(&t, None);
    let qq = t.grid_bound();
    let delta = q(1, 200);
    let far = q(1, 50);
    let (mut inside, mut outside) = (0, 0);
    for k in 0..(4 * qq as i64) {
        let x = q(k, 4 * qq as i64);
        if a.set.contains(&x) {
            let r = nonwandering_witness(&t, &x, &delta, qq);
            ensure(matches!(r, Recurrence::Returns(_)), format!("{x} in X: {r:?}"))?;
            inside += 1;
        } else if a.set.closure_distance(&x).unwrap() >= far {
            let r = nonwandering_witness(&t, &x, &delta, qq);
            ensure(r == Recurrence::NoReturnWithinHorizon, format!("{x} far from X: {r:?}"))?;
            outside += 1;
        }
    }
    Ok(format!("{inside} points of X return, {outside} far points do not"))
}

fn criterion_11() -> Check {
    let mut points = 0;
    let maps = standard_corpus();
    for map in &maps {
        let a = compute_attractor(map, None);
        let cap = 4 * map.grid_bound() * a.set.len();
        for data in compute_return_maps(map, &a).map_err(|e| format!("{map:?}: {e}"))? {
            points += oracle_agrees(map, &data, cap)?;
        }
    }
    Ok(format!("{points} grid points on {} maps, zero mismatches", maps.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("attractor of the reference map", criterion_1),
        ("touching at 9/14", criterion_2),
        ("reference map is stable", criterion_3),
        ("reference return maps", criterion_4),
        ("vector identities on corpus", criterion_5),
        ("perturbation probe", criterion_6),
        ("ghost example is unstable", criterion_7),
        ("rotation", criterion_8),
        ("finite-type termination", criterion_9),
        ("non-wandering property", criterion_10),
        ("oracle equivalence", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{elapsed:.2?}]: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{elapsed:.2?}]: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
