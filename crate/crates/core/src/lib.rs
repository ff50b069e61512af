//! Sorting and selection when the comparator itself is hostile.
//!
//! The model: every item carries a real value, and a comparison of two items
//! is trustworthy only when their values differ by more than 1 (after
//! rescaling, "1" stands for the comparator's discrimination threshold).
//! Whenever two items are within distance 1 of each other, the answer is
//! chosen by an adversary that sees the full query history. Exact sorting is
//! hopeless in this model; the achievable target is approximate order, where
//! any two misordered items have close values.
//!
//! The crate provides:
//!
//! - [`oracle::ComparisonOracle`]: the only way algorithms may look at an
//!   instance. It records a full transcript, supports batched rounds of
//!   simultaneous comparisons, and delegates every close comparison to an
//!   [`policy::AdversaryPolicy`].
//! - [`baselines`]: round-robin tournament ordering/max/min and a naive
//!   quicksort/quickselect pair that an adversary can starve into quadratic
//!   work.
//! - [`rsort`]: a randomized, adversary-resistant recursive sorter and
//!   selector built from a pivot phase, a sampling phase, and a shifting
//!   phase.
//! - [`netsort`]: explicit sorting networks with wide gates (each gate sorts
//!   up to `m` positions per round) and a round-budgeted sorter built on
//!   them.
//! - [`roundselect`]: selection under a small round budget, combining
//!   repeated sparse subset sampling with a dense sampled sort.
//! - [`verify`]: white-box checkers that score outputs against the true
//!   values (which algorithms never see).
//! - [`experiment`]: seeded trial grids, CSV/plot-data emission, and scaling
//!   fits, shared by the CLI and the test suites.

#![forbid(unsafe_code)]

pub mod baselines;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod netsort;
pub mod oracle;
pub mod policy;
pub mod roundselect;
pub mod rsort;
pub mod seed;
pub mod verify;

pub use error::{Error, Result};
pub use experiment::{Algorithm, ExperimentSpec, TrialRow};
pub use instance::{Instance, InstanceFamily};
pub use oracle::{ComparisonOracle, OracleConfig, QueryRecord, Transcript};
pub use policy::{AdversaryPolicy, PolicyKind};
