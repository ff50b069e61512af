//! Baseline algorithms: round-robin tournaments and naive quicksort.
//!
//! The tournament is the workhorse primitive. Comparing every pair and
//! ordering items by win count is unconditionally 2-approximately sorted,
//! whatever the adversary does: an item whose value exceeds another's by
//! more than 2 honestly beats everything the other beats, plus the other
//! itself, so it collects strictly more wins. Quicksort gets no such
//! protection; it is here as the cautionary baseline that an adaptive
//! adversary drives to quadratic work.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::ComparisonOracle;

/// Runs a round-robin tournament inside each group, all groups sharing one
/// batched round, and returns each group ordered by ascending win count
/// (ties by ascending item index). Groups of fewer than two items come back
/// unchanged without consuming anything.
pub fn tournament_groups(
    oracle: &mut ComparisonOracle,
    groups: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    let mut pairs = Vec::new();
    for group in groups {
        for a in 0..group.len() {
            for b in a + 1..group.len() {
                pairs.push((group[a], group[b]));
            }
        }
    }
    let winners = oracle.compare_all(&pairs);

    let mut orders = Vec::with_capacity(groups.len());
    let mut cursor = 0;
    for group in groups {
        let g = group.len();
        let n_pairs = g * g.saturating_sub(1) / 2;
        let mut wins: Vec<(usize, usize)> = group.iter().map(|&item| (0, item)).collect();
        let mut local = std::collections::HashMap::with_capacity(g);
        for (slot, &item) in group.iter().enumerate() {
            local.insert(item, slot);
        }
        for &w in &winners[cursor..cursor + n_pairs] {
            wins[local[&w]].0 += 1;
        }
        cursor += n_pairs;
        wins.sort_unstable();
        orders.push(wins.into_iter().map(|(_, item)| item).collect());
    }
    orders
}

/// Round-robin tournament ordering of `items`: one batched round of all
/// pairs, then ascending win count. Unconditionally 2-approximately sorted.
pub fn tournament_order(oracle: &mut ComparisonOracle, items: &[usize]) -> Vec<usize> {
    tournament_groups(oracle, std::slice::from_ref(&items.to_vec()))
        .pop()
        .expect("one group in, one order out")
}

/// The round-robin winner: most wins, ties broken toward the larger index.
/// Its value is within 2 of the true maximum of `items`.
pub fn tournament_max(oracle: &mut ComparisonOracle, items: &[usize]) -> Result<usize> {
    if items.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(*tournament_order(oracle, items)
        .last()
        .expect("non-empty order"))
}

/// The round-robin loser: fewest wins, ties broken toward the smaller
/// index. Within 2 of the true minimum.
pub fn tournament_min(oracle: &mut ComparisonOracle, items: &[usize]) -> Result<usize> {
    if items.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(tournament_order(oracle, items)[0])
}

/// Partitions `items` around a random pivot with sequential comparisons,
/// pivot passed as the left operand. Returns (lower, pivot, upper) where
/// lower holds the items the comparator claimed are below the pivot.
fn partition(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, usize, Vec<usize>) {
    let pi = rng.random_range(0..items.len());
    let pivot = items[pi];
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (pos, &x) in items.iter().enumerate() {
        if pos == pi {
            continue;
        }
        if oracle.compare(pivot, x) == pivot {
            lower.push(x);
        } else {
            upper.push(x);
        }
    }
    (lower, pivot, upper)
}

/// Textbook randomized quicksort against the adversarial comparator, one
/// sequential comparison per item per partition. Correct and O(n log n)
/// under an honest comparator; an adversary that tracks item appearances
/// can force empty splits and Theta(n^2) comparisons.
pub fn naive_quicksort(oracle: &mut ComparisonOracle, items: &[usize], seed: u64) -> Vec<usize> {
    enum Task {
        Sort(Vec<usize>),
        Emit(usize),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(items.len());
    let mut stack = vec![Task::Sort(items.to_vec())];
    while let Some(task) = stack.pop() {
        match task {
            Task::Emit(x) => out.push(x),
            Task::Sort(chunk) => {
                if chunk.len() <= 1 {
                    out.extend(chunk);
                    continue;
                }
                let (lower, pivot, upper) = partition(oracle, &chunk, &mut rng);
                stack.push(Task::Sort(upper));
                stack.push(Task::Emit(pivot));
                stack.push(Task::Sort(lower));
            }
        }
    }
    out
}

/// Quickselect for the 1-based `rank`, sharing quicksort's partition and
/// its adversarial weakness.
pub fn naive_quickselect(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    rank: usize,
    seed: u64,
) -> Result<usize> {
    if rank == 0 || rank > items.len() {
        return Err(Error::RankOutOfRange {
            rank,
            n: items.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = items.to_vec();
    let mut rank = rank;
    loop {
        if current.len() == 1 {
            return Ok(current[0]);
        }
        let (lower, pivot, upper) = partition(oracle, &current, &mut rng);
        if rank <= lower.len() {
            current = lower;
        } else if rank == lower.len() + 1 {
            return Ok(pivot);
        } else {
            rank -= lower.len() + 1;
            current = upper;
        }
    }
}
