//! Shared fixtures for the benchmark targets.

use advsort::{AdversaryPolicy, ComparisonOracle, InstanceFamily, PolicyKind};

/// A fresh batched oracle over a generated instance. Benches rebuild the
/// oracle per iteration because a run consumes its transcript state.
#[must_use]
pub fn oracle(
    family: &InstanceFamily,
    policy: PolicyKind,
    n: usize,
    seed: u64,
) -> ComparisonOracle {
    let instance = family.generate(n, seed);
    ComparisonOracle::batched(instance, AdversaryPolicy::new(policy, seed ^ 0x9e37_79b9))
}

/// The identity item set every algorithm in this workspace sorts.
#[must_use]
pub fn items(n: usize) -> Vec<usize> {
    (0..n).collect()
}
