//! Exact analysis of interval translation maps with rational parameters:
//! attractors, first-return maps, coefficient vectors, ghost preimages and
//! the stability verdict, plus perturbation experiments.

pub mod attractor;
pub mod dynamics;
pub mod ghost;
pub mod linalg;
pub mod numerics;
pub mod probe;
pub mod return_map;
pub mod stability;
pub mod vectors;

pub use attractor::{compute_attractor, image, nonwandering_witness, Attractor, Placement, Recurrence, Stabilization};
pub use dynamics::{EntryCounts, ItmMap, Itinerary, MapError, MapSpec, Orbit, OrbitClass};
pub use numerics::{hausdorff_closure_distance, q, Interval, IntervalSet, Rational, SetOp, Side, SignedPoint};
pub use return_map::{compute_return_map, compute_return_maps, ReturnMapData};
pub use stability::{analyze, stability_verdict, Analysis, StabilityReport, Verdict};
