//! Exact symbolic calculus of q-characters for twisted quantum affine algebras
//! and their Borel subalgebras.
//!
//! The crate verifies, at desk scale and in exact arithmetic, the computable
//! structure theory of these algebras: Cartan data of the twisted types and
//! the determinants of their structure-constant matrices, truncated
//! q-characters of Kirillov-Reshetikhin and prefundamental modules, explicit
//! graded modules with their defining relations, TQ relations, QQ~ systems,
//! and the Bethe Ansatz equations they specialize to.
//!
//! Organization:
//! - [`field`]: the coefficient field Q(zeta_M)(s) with q = s^2.
//! - [`root_data`]: folded Dynkin diagrams, twisted Cartan data, F(k) matrices.
//! - [`lweight`]: l-weights, spectral parameters, the truncated character ring.
//! - [`qchar`]: character computations (monomial expansion, folding, limits).
//! - [`repcheck`]: explicit graded modules and relation verification.
//! - [`identities`]: TQ relations, QQ~ systems, Bethe Ansatz equations.
//! - [`cli`]: the command-line front end used by the `twistq` binary.

pub mod cli;
pub mod field;
pub mod identities;
pub mod lweight;
pub mod qchar;
pub mod repcheck;
pub mod report;
pub mod root_data;
pub mod suite;
