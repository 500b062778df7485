//! Quantum CSS codes from polycyclic codes over small finite fields.
//!
//! The crate is organised bottom-up:
//!
//! - [`galois`]: arithmetic in GF(q) for every prime power q ≤ 29.
//! - [`polyring`]: polynomials, factorization and divisor enumeration.
//! - [`lincode`]: linear codes, duals, weight enumerators and exact distances.
//! - [`polycyclic`]: codes from ideals of `GF(q)[x]/⟨x^n − v(x)⟩`.
//! - [`css`]: the CSS construction, propagation rules and table verification.
//! - [`search`]: divisor-lattice searches and the derivation closure.
//! - [`catalog`]: the best-known-codes store.

pub mod catalog;
pub mod css;
pub mod galois;
pub mod lincode;
pub mod polycyclic;
pub mod polyring;
pub mod search;

pub use catalog::{Catalog, CatalogError, CatalogRecord, Verdict};
pub use css::{Claim, Construction, Convention, CssError, QuantumParams, Rule, VerificationReport};
pub use galois::{FieldElement, FieldError, FieldSpec};
pub use lincode::{CodeError, Distance, LinearCode, WeightEnumerator, DEFAULT_BUDGET};
pub use polycyclic::{AmbientRing, PolycyclicError};
pub use polyring::{factor, Factorization, Poly, PolyError};
pub use search::{SearchConfig, SearchError, SearchHit, SearchStats, Witness};
