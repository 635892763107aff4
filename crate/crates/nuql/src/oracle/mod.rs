//! Independent reference implementations used to cross-check the fast paths.
//!
//! Everything in this module is deliberately written along a different
//! computational route than the code it validates: dense matrix products
//! instead of in-place amplitude updates, finite differences of fidelity
//! instead of analytic state derivatives, and a continued-fraction
//! incomplete beta instead of adaptive quadrature. The `verify` CLI command
//! runs these suites at runtime; the test suites reuse them.

pub mod dense;
pub mod fidelity;
pub mod stats;
pub mod verify;
