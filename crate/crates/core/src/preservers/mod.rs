//! Linear maps between block-diagonal algebras and their compatibility-preservation audits.

mod audit;
mod fuzz;
mod generator;
mod map;

pub use audit::{
    classify_triple_hom, is_contractive_sampled, is_symmetric, is_triple_hom,
    preserves_compat_sampled, symmetric_factorization, BlockResidual, FactorizationReport,
    PreservationReport, TripleHomClassification, Witness, CONTRACTIVITY_SAMPLES,
};
pub use fuzz::fuzz_counterexample;
pub use generator::{generate_compat_pair, PairGenerator, PairStrategy, DEFAULT_MAX_RETRIES};
pub use map::{
    build_compression, build_jordan_hom, build_sandwich, build_scalar, build_star_anti_hom,
    build_star_hom, build_transpose, identity, range_version_adapter, LinearMap, Placement,
    Provenance,
};
