//! Classification of coadjoint orbits of finite-dimensional real Lie
//! algebras given by structure constants.
//!
//! A covector `f` has a fixed-point orbit iff it vanishes on `[g,g]`, and a
//! bounded (hence compact) orbit iff it vanishes on `[g, g_n]`, where `g_n`
//! is the ideal projecting onto the non-compact part of the semisimple
//! quotient `g / rad(g)`. Bounded orbits split as `f1 + O_c` with `f1` a
//! fixed point and `O_c` an orbit of the compact quotient `g / g_n`.
//! Every verdict can be cross-checked against a random-walk orbit sampler.

pub mod algebra;
pub mod catalog;
pub mod classifier;
pub mod coadjoint;
pub mod error;
pub mod levi;
pub mod linalg;
pub mod report;
pub mod sampler;
pub mod spectral;
pub mod structure;
pub mod subspace;
pub mod tolerance;

pub use algebra::{annihilates, validate_algebra, AlgebraTable, Covector, LieAlgebra, Operator, Quotient, Vector};
pub use classifier::{
    classify, decompose, unboundedness_witness, Analysis, Decomposition, GrowthKind, OrbitClassification, Verdict,
    Witness,
};
pub use coadjoint::{flow, is_fixed_point, orbit_dimension};
pub use error::{Error, Result};
pub use levi::{levi_complement, LeviFactor};
pub use sampler::{estimate_bounded, sample_orbit, BoundednessEstimate, BoundednessStatus, OrbitSample, WalkConfig};
pub use structure::{
    is_compact_type, is_solvable, killing_form, radical, simple_ideal_decomposition, structure_report,
    KillingForm, StructureReport,
};
pub use subspace::Subspace;
pub use tolerance::Tolerances;
