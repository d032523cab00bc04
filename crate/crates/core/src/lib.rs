//! Decision procedures for the Cayley-isomorphism problem on `Z^n`.
//!
//! The crate decides whether a locally-finite Cayley (di)graph `Cay(Z^n; S)`
//! is a (D)CI-graph, decides isomorphism between two such graphs with
//! explicit witnesses, and provides the supporting exact-arithmetic
//! machinery: Smith/Hermite normal forms, lattice standardization, finite
//! stabilizer enumeration, congruence quotients mod k, a brute-force
//! finite-graph oracle, and automorphism extension along chains of finite
//! abelian groups.
//!
//! All arithmetic is exact; there is no floating point anywhere.
//!
//! Enumeration kernels are data-parallel via rayon when the `parallel`
//! feature (on by default) is enabled. Building with
//! `--no-default-features` selects the sequential fallbacks instead; the
//! `*_seq` entry points are always available for benchmarking.

pub mod cancel;
pub mod cayley;
pub mod decision;
pub mod intlin;
pub mod lattice;
pub mod oracle;
pub mod symmetry;
pub mod torsion;

mod error;

pub use error::{Error, Result};
