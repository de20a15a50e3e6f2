//! Phonon-blockade detector toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`] builds truncated Fock-space operators, the effective
//!   quadratic-coupling Hamiltonian and its Lindblad superoperator, and solves
//!   for the steady state and the mechanical second-order correlation `g2(0)`.
//! * [`effective`] maps laboratory parameters to the dimensionless effective
//!   parameters consumed by [`quantum`].
//! * [`dataset`] sweeps parameter ranges, labels each point with optical
//!   features and `log10 g2(0)`, and handles CSV persistence and splits.
//! * [`mlp`] is the 3 -> L -> 1 tanh network trained by Levenberg-Marquardt.
//! * [`oracle`] holds slow, independent reference implementations used by the
//!   test suites to cross-check the fast paths.

pub mod dataset;
pub mod effective;
pub mod mlp;
pub mod oracle;
pub mod quantum;

pub use faer::c64;
