//! White-box checkers.
//!
//! Algorithms only ever see oracle answers; these functions see the true
//! values and score what the algorithms produced. An arrangement is
//! k-approximately sorted when no item precedes another whose value is more
//! than k below it, and an item is a k-approximate rank-i selection when
//! some k-approximately sorted arrangement puts it at position i.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rsort::{Partition, PartitionPhase};

/// Checks that `order` is a permutation of `0..n`.
fn check_permutation(n: usize, order: &[usize]) -> Result<()> {
    if order.len() != n {
        return Err(Error::NotAPermutation { n });
    }
    let mut seen = vec![false; n];
    for &item in order {
        if item >= n || seen[item] {
            return Err(Error::NotAPermutation { n });
        }
        seen[item] = true;
    }
    Ok(())
}

/// The realized sort error of an arrangement: the largest value drop across
/// any inverted pair, i.e. max over positions p < q of `v[order[p]] -
/// v[order[q]]`, clamped below at 0. An arrangement is k-approximately
/// sorted exactly when this is at most k.
pub fn realized_sort_error(instance: &Instance, order: &[usize]) -> Result<f64> {
    check_permutation(instance.n(), order)?;
    let mut worst = 0.0f64;
    let mut prefix_max = f64::NEG_INFINITY;
    for &item in order {
        let v = instance.value(item);
        if prefix_max - v > worst {
            worst = prefix_max - v;
        }
        if v > prefix_max {
            prefix_max = v;
        }
    }
    Ok(worst)
}

/// Whether `item` is a k-approximate selection for the 1-based `rank`.
///
/// Equivalent to the existence of a k-approximately sorted arrangement with
/// `item` at position `rank`, which reduces to `|v(item) - s_rank| <= k`
/// where `s_rank` is the true rank-th smallest value. The brute-force
/// checker below demonstrates the equivalence on small instances.
pub fn is_k_approx_selection(
    instance: &Instance,
    rank: usize,
    item: usize,
    k: f64,
) -> Result<bool> {
    let n = instance.n();
    if item >= n {
        return Err(Error::IndexOutOfRange { index: item, n });
    }
    let target = instance.rank_value(rank)?;
    Ok((instance.value(item) - target).abs() <= k)
}

const BRUTE_FORCE_MAX: usize = 8;

/// Literal transcription of the selection definition: enumerates every
/// arrangement with `item` pinned at position `rank` and reports whether
/// any of them is k-approximately sorted. Only for n <= 8.
pub fn selection_check_bruteforce(
    instance: &Instance,
    rank: usize,
    item: usize,
    k: f64,
) -> Result<bool> {
    let n = instance.n();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::BruteForceTooLarge {
            n,
            max: BRUTE_FORCE_MAX,
        });
    }
    if item >= n {
        return Err(Error::IndexOutOfRange { index: item, n });
    }
    if rank == 0 || rank > n {
        return Err(Error::RankOutOfRange { rank, n });
    }
    let mut others: Vec<usize> = (0..n).filter(|&x| x != item).collect();
    let pivot_value = instance.value(item);
    let before = rank - 1;

    // Checks one arrangement (others[..before], item, others[before..])
    // without materializing it.
    let ok = |others: &[usize]| -> bool {
        let mut prefix_max = f64::NEG_INFINITY;
        for v in others[..before]
            .iter()
            .map(|&x| instance.value(x))
            .chain(std::iter::once(pivot_value))
            .chain(others[before..].iter().map(|&x| instance.value(x)))
        {
            if prefix_max - v > k {
                return false;
            }
            if v > prefix_max {
                prefix_max = v;
            }
        }
        true
    };

    fn search(
        others: &mut Vec<usize>,
        depth: usize,
        ok: &impl Fn(&[usize]) -> bool,
    ) -> bool {
        if depth == others.len() {
            return ok(others);
        }
        for i in depth..others.len() {
            others.swap(depth, i);
            if search(others, depth + 1, ok) {
                return true;
            }
            others.swap(depth, i);
        }
        false
    }

    Ok(search(&mut others, 0, &ok))
}

/// Max coordinate distance between two multisets after sorting each.
pub fn sorted_distance(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Whether an arrangement respects an empty value band: with no values in
/// [y, y + 1), every item valued below y must precede every item valued at
/// or above y + 1. Errors if the band is not actually empty, since the
/// guarantee is only meaningful across a real gap.
pub fn gap_partition_respected(instance: &Instance, y: f64, order: &[usize]) -> Result<bool> {
    for (index, &value) in instance.values().iter().enumerate() {
        if value >= y && value < y + 1.0 {
            return Err(Error::BandNotEmpty { y, value, index });
        }
    }
    check_permutation(instance.n(), order)?;
    let mut seen_high = false;
    for &item in order {
        if instance.value(item) >= y + 1.0 {
            seen_high = true;
        } else if seen_high {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Slack allowed by a partition certificate: how far below the lower side's
/// maximum the upper side may dip. Pivot splits come from one honest-or-
/// close round against a single pivot and carry slack 2; sample-and-shift
/// splits carry slack 4.
#[must_use]
pub fn partition_slack(phase: PartitionPhase) -> f64 {
    match phase {
        PartitionPhase::Pivot => 2.0,
        PartitionPhase::SampleShift => 4.0,
    }
}

/// Checks a partition certificate: every upper-side value must be at least
/// every lower-side value minus the phase's slack. Empty sides pass.
#[must_use]
pub fn partition_respects_values(instance: &Instance, partition: &Partition) -> bool {
    let max_lower = partition
        .lower
        .iter()
        .map(|&x| instance.value(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let min_upper = partition
        .upper
        .iter()
        .map(|&x| instance.value(x))
        .fold(f64::INFINITY, f64::min);
    min_upper >= max_lower - partition_slack(partition.phase)
}

/// Serializable outcome summary for one scored trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    /// Measured error (sort error, or |value - target| for selection).
    pub realized_k: f64,
    /// The bound the algorithm advertised for this run.
    pub claimed_k: f64,
    pub comparisons: usize,
    pub rounds: usize,
    /// realized_k <= claimed_k.
    pub pass: bool,
}

impl ApproxReport {
    #[must_use]
    pub fn new(realized_k: f64, claimed_k: f64, comparisons: usize, rounds: usize) -> Self {
        Self {
            realized_k,
            claimed_k,
            comparisons,
            rounds,
            pass: realized_k <= claimed_k,
        }
    }
}
