//! JSON report assembly. Components are numbered from 1 here, unlike the
//! library, so that the report reads the same way as the printed summary.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use itmlab_core::ghost::{A3Verdict, GhostGraph, GhostTree};
use itmlab_core::probe::{DirectedOutcome, ProbeResult, LCG_INCREMENT, LCG_MULTIPLIER};
use itmlab_core::return_map::{classify_return_dynamics, orbit_union, verify_touching_equations};
use itmlab_core::vectors::{build_vectors, check_lin_dep_pattern, verify_identities};
use itmlab_core::{Analysis, Attractor, ItmMap, Placement, ReturnMapData, Verdict};

pub const TOOL: &str = "itmlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lcg_multiplier: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lcg_increment: Option<u64>,
    pub max_iter: Option<usize>,
}

impl Header {
    pub fn new(input: &[u8], seed: Option<u64>, max_iter: Option<usize>) -> Self {
        Header {
            tool: TOOL,
            version: VERSION,
            input_sha256: hex::encode(Sha256::digest(input)),
            seed,
            lcg_multiplier: seed.map(|_| LCG_MULTIPLIER),
            lcg_increment: seed.map(|_| LCG_INCREMENT),
            max_iter,
        }
    }
}

fn placement(p: &Placement) -> Value {
    match p {
        Placement::Interior(c) => json!({"kind": "interior", "component": c + 1}),
        Placement::LeftEndpoint(c) => json!({"kind": "left_endpoint", "component": c + 1}),
        Placement::RightEndpoint(c) => json!({"kind": "right_endpoint", "component": c + 1}),
        Placement::Outside => json!({"kind": "outside"}),
    }
}

pub fn attractor_section(map: &ItmMap, a: &Attractor, max_iter: Option<usize>) -> Value {
    let placements: Vec<Value> = a
        .placements
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mut v = placement(p);
            v["discontinuity"] = json!(k + 1);
            v["beta"] = json!(map.beta_at(k + 1));
            v
        })
        .collect();
    json!({
        "components": a.set,
        "measure": a.set.measure(),
        "finite_type": a.is_finite_type(),
        "stabilization_step": a.step(),
        "cap": a.cap,
        "capped": max_iter.is_some() && !a.is_finite_type(),
        "placements": placements,
        "inside": a.discontinuities_inside().len(),
        "outside": a.discontinuities_outside().len(),
    })
}

pub fn return_map_entry(map: &ItmMap, k: usize, data: &ReturnMapData) -> Value {
    let touching = match verify_touching_equations(data) {
        Ok(values) => json!(values),
        Err(e) => json!({"error": e.to_string()}),
    };
    json!({
        "component": k + 1,
        "interval": data.component,
        "n": data.n(),
        "cut_points": data.cut_points,
        "return_times": data.return_times,
        "translations": data.translations,
        "sigma": data.sigma,
        "tau": data.tau,
        "landings": data.landings,
        "touching_values": touching,
        "dynamics": classify_return_dynamics(data),
        "dynamically_trivial": data.dynamically_trivial,
        "orbit": orbit_union(map, data),
        "plus_chains": data.plus_chains,
        "minus_chains": data.minus_chains,
    })
}

pub fn vectors_entry(map: &ItmMap, k: usize, data: &ReturnMapData) -> Value {
    let checks = verify_identities(data, map);
    let vectors: Vec<Value> = build_vectors(data, map)
        .into_iter()
        .zip(checks)
        .map(|(v, c)| {
            json!({
                "tag": v.tag.to_string(),
                "e": v.e_part,
                "f": v.f_part,
                "product": c.product,
                "expected": c.expected,
                "holds": c.holds,
            })
        })
        .collect();
    json!({
        "component": k + 1,
        "vectors": vectors,
        "pattern": check_lin_dep_pattern(data, map),
    })
}

pub fn ghost_section(graph: &GhostGraph, a3: &A3Verdict) -> Value {
    json!({
        "nodes": graph.nodes.iter().map(|n| json!({"node": n.node.to_string(), "in_x": n.in_x})).collect::<Vec<_>>(),
        "edges": graph.edges.iter().map(|e| json!({
            "child": e.child.to_string(),
            "parent": e.parent.to_string(),
            "time": e.time,
        })).collect::<Vec<_>>(),
        "a3": match a3 {
            A3Verdict::Holds => json!({"verdict": "holds"}),
            A3Verdict::Violated { beta, cycle } => json!({
                "verdict": "violated",
                "beta": beta,
                "cycle": cycle.iter().map(|e| format!("{} -> {} ({})", e.child, e.parent, e.time)).collect::<Vec<_>>(),
            }),
        },
    })
}

pub fn tree_section(tree: &GhostTree) -> Value {
    let levels: Vec<Value> = tree
        .levels
        .iter()
        .map(|level| {
            Value::Array(
                level
                    .iter()
                    .map(|v| {
                        json!({
                            "node": v.node.to_string(),
                            "parent": v.parent.map(|p| p + 1),
                            "time": v.time,
                            "repeated": v.repeated,
                        })
                    })
                    .collect(),
            )
        })
        .collect();
    json!({
        "root": tree.root.to_string(),
        "levels": levels,
        "root_reappearances": tree.root_reappearances(),
    })
}

/// Shift the `component` field of a serialized witness to 1-based.
fn verdict<W: Serialize>(v: &Verdict<W>) -> Value {
    let mut value = serde_json::to_value(v).expect("verdicts serialize");
    if let Some(c) = value.pointer_mut("/witness/component") {
        *c = json!(c.as_u64().unwrap_or(0) + 1);
    }
    value
}

pub fn stability_section(an: &Analysis) -> Value {
    let r = &an.report;
    json!({
        "finite_type": r.finite_type,
        "stabilization_step": r.stabilization_step,
        "a1": verdict(&r.a1),
        "a2": verdict(&r.a2),
        "a3": verdict(&r.a3),
        "matching": verdict(&r.matching),
        "trivial_components": verdict(&r.trivial_components),
        "ambiguous_components": r.ambiguous_components.iter().map(|c| c + 1).collect::<Vec<_>>(),
        "stable": r.stable,
    })
}

/// The full pipeline in one document.
pub fn analysis_document(header: &Header, an: &Analysis, max_iter: Option<usize>) -> Value {
    let map = &an.map;
    json!({
        "header": header,
        "map": map.to_spec(),
        "attractor": attractor_section(map, &an.attractor, max_iter),
        "return_maps": an.return_maps.iter().enumerate().map(|(k, d)| return_map_entry(map, k, d)).collect::<Vec<_>>(),
        "vectors": an.return_maps.iter().enumerate().map(|(k, d)| vectors_entry(map, k, d)).collect::<Vec<_>>(),
        "ghost": ghost_section(&an.ghost, &itmlab_core::ghost::check_a3(&an.ghost)),
        "stability": stability_section(an),
    })
}

pub fn probe_section(result: &ProbeResult) -> Value {
    serde_json::to_value(result).expect("probe results serialize")
}

pub fn directed_section(outcome: &DirectedOutcome) -> Value {
    let new_components: Vec<_> = outcome
        .perturbed_attractor
        .iter()
        .filter(|iv| iv.overlaps(&outcome.perturbation.periodic_interval))
        .cloned()
        .collect();
    json!({
        "deltas": outcome.perturbation.spec.deltas,
        "epsilon": outcome.perturbation.spec.epsilon,
        "branches": outcome.perturbation.branches,
        "periodic_interval": outcome.perturbation.periodic_interval,
        "period": outcome.perturbation.period,
        "periodic_interval_verified": outcome.periodic_interval_verified,
        "periodic_interval_in_attractor": outcome.periodic_interval_in_attractor,
        "new_components": new_components,
        "perturbed_attractor": outcome.perturbed_attractor,
        "hausdorff": outcome.hausdorff,
    })
}

pub fn render_json(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("reports serialize");
    s.push('\n');
    s
}
