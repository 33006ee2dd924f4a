//! Absolute compatibility, orthogonality and triple-homomorphism preservers on
//! finite-dimensional C*-algebras `⊕ᵢ M_{nᵢ}(ℂ)`.
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigendecomposition, functional calculus,
//!   polar decomposition and norms.
//! * [`algebra`]: block-diagonal algebras, Jordan and triple products.
//! * [`relations`]: orthogonality, domain/range absolute compatibility and the
//!   characterizations that relate them.
//! * [`preservers`]: linear maps between algebras, triple-homomorphism checks and
//!   classification, compatibility-preservation audits and counterexample search.
//! * [`io`]: the JSON matrix and map file formats used by the command-line tool.
//! * [`suite`]: the batch verification suite behind `abscompat verify-suite`.

pub mod algebra;
pub mod error;
pub mod io;
pub mod linalg;
pub mod preservers;
pub mod random;
pub mod relations;
pub mod report;
pub mod suite;
pub mod witnesses;

pub use algebra::{AlgebraElement, AlgebraShape};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ToleranceConfig, C64};
pub use relations::CompatKind;
pub use report::{ConsistencyReport, RelationReport};
