//! Round-budgeted selection under the adversarial comparator.
//!
//! The stack has three layers. A sparse pass sorts many small random
//! subsets in lockstep within a d-round budget, classifies every item as
//! confidently-below (seen before the rank window too often), candidate
//! (seen inside the window), or rest, and picks from the right class. A
//! dense pass sorts one large sample with a 100-round network and reads a
//! deliberately biased index, undershooting or overshooting the target on
//! request. The combined selector runs both and returns whichever side the
//! one-round census says is safe, paying one more round to compare the two
//! picks.
//!
//! Extremum selection inside the stack never gets its own sorting budget:
//! a hierarchical knockout (equal blocks per level, block winners advance,
//! one round per level) finds a max or min in max(1, ceil(log2 d)) rounds
//! with an unconditional error of 2 per level.
//!
//! Round accounting is load-bearing: the sparse tail and the dense sort
//! are independent, so the combined selector drives them through shared
//! rounds. Total rounds never exceed d + 102 + the knockout level count,
//! which the code asserts on every run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::tournament_groups;
use crate::error::{Error, Result};
use crate::netsort::{network_for_budget, run_networks_lockstep, NetworkRun};
use crate::oracle::ComparisonOracle;
use crate::seed;

/// Default scale constant for desk-size experiments. The concentration
/// proofs want c > 90r for failure rate n^-r; at experiment sizes that
/// only inflates the subset count past n, so measurements run at 1.
pub const DESK_C: f64 = 1.0;

/// Round budget for the internal full sorts.
const SORT_BUDGET: usize = 100;

// ── Integer roots ──────────────────────────────────────────────────────────
//
// Structural sizes (subset size, window half-width) are defined as integer
// roots. Computing them through f64::powf misrounds exact powers (4096
// gives 3.999.. for the sixth root), so these stay in integers.

fn floor_nth_root(n: usize, k: u32) -> usize {
    let mut v = (n as f64).powf(1.0 / f64::from(k)).round() as usize;
    while v > 0 && v.saturating_pow(k) > n {
        v -= 1;
    }
    while (v + 1).saturating_pow(k) <= n {
        v += 1;
    }
    v
}

fn ceil_nth_root(n: usize, k: u32) -> usize {
    let f = floor_nth_root(n, k);
    if f.pow(k) == n {
        f
    } else {
        f + 1
    }
}

// ── Hierarchical knockout ──────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extreme {
    Max,
    Min,
}

/// Level count the knockout uses for a d-round outer budget.
#[must_use]
pub fn knockout_levels(d: usize) -> usize {
    let ceil_log2 = (usize::BITS - d.saturating_sub(1).leading_zeros()) as usize;
    ceil_log2.max(1)
}

/// A knockout mid-flight: survivors of the levels played so far. Each
/// level splits the survivors into equal blocks sized to finish on
/// schedule, runs every block as one tournament in a shared round, and
/// keeps each block's extreme.
#[derive(Debug, Clone)]
pub struct KnockoutRun {
    survivors: Vec<usize>,
    mode: Extreme,
    levels_total: usize,
    level: usize,
}

impl KnockoutRun {
    pub fn new(items: &[usize], d: usize, mode: Extreme) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptySelection);
        }
        if d < 1 {
            return Err(Error::ZeroRoundBudget);
        }
        Ok(Self {
            survivors: items.to_vec(),
            mode,
            levels_total: knockout_levels(d),
            level: 0,
        })
    }

    #[must_use]
    pub fn finished(&self) -> bool {
        self.survivors.len() == 1 || self.level >= self.levels_total
    }

    #[must_use]
    pub fn levels_total(&self) -> usize {
        self.levels_total
    }

    /// Blocks for the upcoming level. The last scheduled level is a single
    /// block; earlier levels size blocks as the (remaining-levels)-th root
    /// of the survivor count so the shrink rate finishes on time.
    #[must_use]
    pub fn current_groups(&self) -> Vec<Vec<usize>> {
        if self.finished() {
            return Vec::new();
        }
        let remaining = self.levels_total - self.level;
        let len = self.survivors.len();
        let block = if remaining <= 1 {
            len
        } else {
            ceil_nth_root(len, remaining as u32).max(2)
        };
        self.survivors.chunks(block).map(<[usize]>::to_vec).collect()
    }

    pub fn apply(&mut self, orders: &[Vec<usize>]) {
        assert!(!self.finished(), "apply on a finished knockout");
        self.survivors = orders
            .iter()
            .map(|o| match self.mode {
                Extreme::Max => *o.last().expect("nonempty block"),
                Extreme::Min => o[0],
            })
            .collect();
        self.level += 1;
    }

    #[must_use]
    pub fn winner(&self) -> usize {
        debug_assert!(self.finished());
        match self.mode {
            Extreme::Max => *self.survivors.last().unwrap(),
            Extreme::Min => self.survivors[0],
        }
    }
}

/// Outcome of a standalone knockout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnockoutOutcome {
    pub item: usize,
    /// Scheduled level count (the claim is 2 per level).
    pub levels: usize,
    /// Rounds actually played (early exit on a single survivor).
    pub rounds: usize,
    pub claimed_k: f64,
}

fn run_knockout(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    d: usize,
    mode: Extreme,
) -> Result<KnockoutOutcome> {
    let mut run = KnockoutRun::new(items, d, mode)?;
    let mut rounds = 0;
    while !run.finished() {
        let groups = run.current_groups();
        let orders = tournament_groups(oracle, &groups);
        run.apply(&orders);
        rounds += 1;
    }
    Ok(KnockoutOutcome {
        item: run.winner(),
        levels: run.levels_total(),
        rounds,
        claimed_k: 2.0 * run.levels_total() as f64,
    })
}

/// Maximum by hierarchical knockout: max(1, ceil(log2 d)) levels, one
/// round each, winner within 2 per level of the true maximum.
pub fn get_max(oracle: &mut ComparisonOracle, items: &[usize], d: usize) -> Result<KnockoutOutcome> {
    run_knockout(oracle, items, d, Extreme::Max)
}

/// Minimum by hierarchical knockout; mirror of [`get_max`].
pub fn get_min(oracle: &mut ComparisonOracle, items: &[usize], d: usize) -> Result<KnockoutOutcome> {
    run_knockout(oracle, items, d, Extreme::Min)
}

// ── Census ─────────────────────────────────────────────────────────────────

/// One-round census: submits (x, item) for every other x and returns how
/// many lose to `item`. An honest comparator makes this the number of
/// items more than 1 below; close pairs answer however the adversary
/// likes.
pub fn count_below(oracle: &mut ComparisonOracle, items: &[usize], item: usize) -> Result<usize> {
    let pairs: Vec<(usize, usize)> = items
        .iter()
        .filter(|&&x| x != item)
        .map(|&x| (x, item))
        .collect();
    let winners = oracle.compare_all(&pairs);
    Ok(winners.iter().filter(|&&w| w == item).count())
}

// ── Sparse selection ───────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SparseBranch {
    /// The rank fell inside the confidently-below class: its maximum.
    BelowMax,
    /// The rank fell among the window candidates: full-sorted and indexed.
    WindowRank,
    /// The rank fell past both classes: minimum of the rest.
    RestMin,
}

/// Outcome of the sparse pass, with the classification it derived.
#[derive(Debug, Clone)]
pub struct SparseOutcome {
    pub item: usize,
    pub branch: SparseBranch,
    /// Items seen inside the rank window of some subset sort.
    pub window: Vec<usize>,
    /// Non-candidates seen before the window too often.
    pub below: Vec<usize>,
    /// Everything else.
    pub rest: Vec<usize>,
    pub subsets: usize,
    pub subset_size: usize,
    /// Network depth each subset sort used (at most the d budget).
    pub subset_rounds: usize,
    pub tail_rounds: usize,
    /// Error claim of the tail operation (window sort or knockout).
    pub tail_claimed_k: f64,
}

struct SparseParts {
    window: Vec<usize>,
    below: Vec<usize>,
    rest: Vec<usize>,
    subsets: usize,
    subset_size: usize,
    subset_rounds: usize,
}

/// Subset phase of sparse selection: sample, sort in lockstep, classify.
fn sparse_classify(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    rank: usize,
    d: usize,
    c: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SparseParts> {
    let n = items.len();
    let s = ceil_nth_root(n, 3).clamp(2, n);
    let ln_n = (n as f64).ln();
    let iters = (c * (n as f64).powf(2.0 / 3.0) * ln_n).ceil().max(1.0) as usize;

    let net = network_for_budget(s, d)?;
    let sets: Vec<Vec<usize>> = (0..iters)
        .map(|_| {
            rand::seq::index::sample(rng, n, s)
                .iter()
                .map(|i| items[i])
                .collect()
        })
        .collect();
    let orders = run_networks_lockstep(oracle, &net, &sets)?;

    let center = ((rank as u128 * s as u128) / n as u128) as usize;
    let center = center.min(s - 1);
    let half = floor_nth_root(n, 6).max(1);
    let start = center.saturating_sub(half);
    let end = (center + half).min(s);

    let id_space = oracle.instance().n();
    let mut seen_left = vec![0u32; id_space];
    let mut in_window = vec![false; id_space];
    for order in &orders {
        for &x in &order[..start] {
            seen_left[x] += 1;
        }
        for &x in &order[start..end] {
            in_window[x] = true;
        }
    }

    let threshold = c / 2.0 * ln_n;
    let mut window = Vec::new();
    let mut below = Vec::new();
    let mut rest = Vec::new();
    for &x in items {
        if in_window[x] {
            window.push(x);
        } else if f64::from(seen_left[x]) > threshold {
            below.push(x);
        } else {
            rest.push(x);
        }
    }
    Ok(SparseParts {
        window,
        below,
        rest,
        subsets: iters,
        subset_size: s,
        subset_rounds: net.depth(),
    })
}

/// Sparse selection: subset sorts in a d-round budget classify the items,
/// then the branch matching the rank resolves with a window sort or a
/// knockout.
pub fn select_sparse(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    rank: usize,
    d: usize,
    c: f64,
    seed: u64,
) -> Result<SparseOutcome> {
    validate_selection(items, rank, d, c)?;
    if items.len() == 1 {
        return Ok(SparseOutcome {
            item: items[0],
            branch: SparseBranch::WindowRank,
            window: items.to_vec(),
            below: Vec::new(),
            rest: Vec::new(),
            subsets: 0,
            subset_size: 1,
            subset_rounds: 0,
            tail_rounds: 0,
            tail_claimed_k: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = sparse_classify(oracle, items, rank, d, c, &mut rng)?;
    let before_tail = oracle.round_count();

    let (item, branch, tail_claimed_k) = if rank <= parts.below.len() {
        let out = get_max(oracle, &parts.below, d)?;
        (out.item, SparseBranch::BelowMax, out.claimed_k)
    } else if rank <= parts.below.len() + parts.window.len() {
        let run = crate::netsort::round_sort(oracle, &parts.window, SORT_BUDGET)?;
        let item = run.order[rank - parts.below.len() - 1];
        (item, SparseBranch::WindowRank, run.claimed_k)
    } else {
        let out = get_min(oracle, &parts.rest, d)?;
        (out.item, SparseBranch::RestMin, out.claimed_k)
    };

    Ok(SparseOutcome {
        item,
        branch,
        window: parts.window,
        below: parts.below,
        rest: parts.rest,
        subsets: parts.subsets,
        subset_size: parts.subset_size,
        subset_rounds: parts.subset_rounds,
        tail_rounds: oracle.round_count() - before_tail,
        tail_claimed_k,
    })
}

// ── Dense selection ────────────────────────────────────────────────────────

/// Which side of the target rank the dense selector aims for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DenseSide {
    /// Undershoot: the pick should not exceed the target (minus margin).
    Below,
    /// Overshoot: the pick should not fall under the target (plus margin).
    Above,
}

/// Outcome of the dense pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseOutcome {
    pub item: usize,
    pub side: DenseSide,
    pub sample_size: usize,
    /// Index read from the sorted sample after margin and scaling.
    pub index: usize,
    pub depth: usize,
    pub claimed_k: f64,
}

/// Sample size and read index for a dense pass, kept separate for reuse
/// by the combined selector's shared-round schedule.
struct DensePlan {
    sample: Vec<usize>,
}

fn dense_plan(items: &[usize], c: f64, rng: &mut ChaCha8Rng) -> DensePlan {
    let n = items.len();
    let ln_n = (n as f64).ln().max(f64::MIN_POSITIVE);
    let nominal = c * (n as f64).powf(5.0 / 6.0) * ln_n;
    let t = (nominal.ceil() as usize).clamp(1, n);
    let sample = rand::seq::index::sample(rng, n, t)
        .iter()
        .map(|i| items[i])
        .collect();
    DensePlan { sample }
}

/// Index into the sorted sample. The count of sample items below the
/// target concentrates around t*rank/n, and a without-replacement draw
/// of t from n deviates by at most sqrt(c ln n * t(n-t)/n) with high
/// probability. At the nominal sample size c * n^(5/6) * ln n that
/// margin equals the c * n^(5/12) * ln n the asymptotic formulas budget
/// for, and it vanishes when the draw is the whole set, where the read
/// becomes plain rank selection.
fn dense_index(n: usize, rank: usize, side: DenseSide, c: f64, plan: &DensePlan) -> usize {
    let t = plan.sample.len();
    let ln_n = (n as f64).ln().max(f64::MIN_POSITIVE);
    let center = (t as f64 * rank as f64 / n as f64).ceil() - 1.0;
    let spread = (t * (n - t)) as f64 / n as f64;
    let margin = (c * ln_n * spread).sqrt().ceil();
    let raw = match side {
        DenseSide::Below => center - margin,
        DenseSide::Above => center + margin,
    };
    if raw.is_sign_negative() {
        0
    } else {
        (raw as usize).min(t - 1)
    }
}

/// Dense selection: sort one large sample within a 100-round budget and
/// read a margin-shifted index, aiming below or above the target rank.
pub fn select_dense(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    rank: usize,
    side: DenseSide,
    c: f64,
    seed: u64,
) -> Result<DenseOutcome> {
    validate_selection(items, rank, 1, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = dense_plan(items, c, &mut rng);
    let run = crate::netsort::round_sort(oracle, &plan.sample, SORT_BUDGET)?;
    let index = dense_index(items.len(), rank, side, c, &plan);
    Ok(DenseOutcome {
        item: run.order[index],
        side,
        sample_size: plan.sample.len(),
        index,
        depth: run.depth,
        claimed_k: run.claimed_k,
    })
}

// ── Combined selection ─────────────────────────────────────────────────────

/// Outcome of the combined selector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombinedOutcome {
    pub item: usize,
    /// Error claim: worst over the sort and knockout claims incurred,
    /// plus 2 for the final cross-check round.
    pub claimed_k: f64,
    pub rank: usize,
    pub sparse_item: usize,
    pub sparse_branch: SparseBranch,
    pub dense_item: usize,
    pub dense_side: DenseSide,
    /// One-round census result for the sparse pick.
    pub below_count: usize,
    /// Knockout level count for the d budget (the budget formula's term).
    pub knockout_levels: usize,
    pub rounds_used: usize,
    /// d + 102 + knockout levels; asserted, never exceeded.
    pub round_budget: usize,
}

enum TailJob<'n> {
    Net {
        run: NetworkRun<'n>,
        claimed_k: f64,
        read_index: usize,
    },
    Knock(KnockoutRun, f64),
}

/// Drives network runs and knockouts to completion through shared rounds:
/// every round takes the next layer or level of everything unfinished.
fn drive_shared(
    oracle: &mut ComparisonOracle,
    nets: &mut [&mut NetworkRun],
    knocks: &mut [&mut KnockoutRun],
) {
    loop {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut net_spans = Vec::new();
        let mut knock_spans = Vec::new();
        for (i, run) in nets.iter().enumerate() {
            if !run.finished() {
                let g = run.current_groups();
                net_spans.push((i, groups.len(), g.len()));
                groups.extend(g);
            }
        }
        for (i, k) in knocks.iter().enumerate() {
            if !k.finished() {
                let g = k.current_groups();
                knock_spans.push((i, groups.len(), g.len()));
                groups.extend(g);
            }
        }
        if groups.is_empty() {
            return;
        }
        let orders = tournament_groups(oracle, &groups);
        for (i, start, len) in net_spans {
            nets[i].apply(&orders[start..start + len]);
        }
        for (i, start, len) in knock_spans {
            knocks[i].apply(&orders[start..start + len]);
        }
    }
}

/// Combined selection: the sparse pass picks a candidate, a one-round
/// census decides whether it sits below or above the target, and a dense
/// pass aimed at the safe side provides the fallback; one more round
/// compares the two and returns the safe extreme.
///
/// The sparse tail and the dense sort have no data dependence, so they
/// run through shared rounds. Total rounds are asserted against
/// d + 102 + knockout levels.
pub fn select_combined(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    rank: usize,
    d: usize,
    c: f64,
    seed: u64,
) -> Result<CombinedOutcome> {
    validate_selection(items, rank, d, c)?;
    let levels = knockout_levels(d);
    let budget = d + 102 + levels;
    if items.len() == 1 {
        return Ok(CombinedOutcome {
            item: items[0],
            claimed_k: 0.0,
            rank,
            sparse_item: items[0],
            sparse_branch: SparseBranch::WindowRank,
            dense_item: items[0],
            dense_side: DenseSide::Below,
            below_count: 0,
            knockout_levels: levels,
            rounds_used: 0,
            round_budget: budget,
        });
    }

    let start_rounds = oracle.round_count();
    let n = items.len();
    let mut sparse_rng = ChaCha8Rng::seed_from_u64(seed::mix2(seed, 1));
    let mut dense_rng = ChaCha8Rng::seed_from_u64(seed::mix2(seed, 2));

    // Subset phase, then the tail and the dense sort in shared rounds.
    let parts = sparse_classify(oracle, items, rank, d, c, &mut sparse_rng)?;
    let plan = dense_plan(items, c, &mut dense_rng);
    let dense_net = network_for_budget(plan.sample.len(), SORT_BUDGET)?;
    let mut dense_run = NetworkRun::new(&dense_net, &plan.sample)?;
    let dense_claim = 2.0 * dense_net.depth() as f64;

    let window_net;
    let mut tail = if rank <= parts.below.len() {
        TailJob::Knock(
            KnockoutRun::new(&parts.below, d, Extreme::Max)?,
            2.0 * levels as f64,
        )
    } else if rank <= parts.below.len() + parts.window.len() {
        window_net = network_for_budget(parts.window.len(), SORT_BUDGET)?;
        let claimed = 2.0 * window_net.depth() as f64;
        TailJob::Net {
            run: NetworkRun::new(&window_net, &parts.window)?,
            claimed_k: claimed,
            read_index: rank - parts.below.len() - 1,
        }
    } else {
        TailJob::Knock(
            KnockoutRun::new(&parts.rest, d, Extreme::Min)?,
            2.0 * levels as f64,
        )
    };

    {
        let mut nets: Vec<&mut NetworkRun> = vec![&mut dense_run];
        let mut knocks: Vec<&mut KnockoutRun> = Vec::new();
        match &mut tail {
            TailJob::Net { run, .. } => nets.push(run),
            TailJob::Knock(k, _) => knocks.push(k),
        }
        drive_shared(oracle, &mut nets, &mut knocks);
    }

    let (sparse_item, sparse_branch, tail_claim) = match &tail {
        TailJob::Net {
            run,
            claimed_k,
            read_index,
        } => (
            run.arrangement()[*read_index],
            SparseBranch::WindowRank,
            *claimed_k,
        ),
        TailJob::Knock(k, claim) => {
            let branch = match rank <= parts.below.len() {
                true => SparseBranch::BelowMax,
                false => SparseBranch::RestMin,
            };
            (k.winner(), branch, *claim)
        }
    };
    let dense_order = dense_run.into_arrangement();

    let below_count = count_below(oracle, items, sparse_item)?;
    let dense_side = if below_count < rank {
        DenseSide::Below
    } else {
        DenseSide::Above
    };
    let dense_item = dense_order[dense_index(n, rank, dense_side, c, &plan)];

    let item = if dense_item == sparse_item {
        sparse_item
    } else {
        let winner = oracle.compare_all(&[(sparse_item, dense_item)])[0];
        match dense_side {
            // The census says the sparse pick is low: take the larger.
            DenseSide::Below => winner,
            // The census says it is high enough: take the smaller.
            DenseSide::Above => {
                if winner == sparse_item {
                    dense_item
                } else {
                    sparse_item
                }
            }
        }
    };

    let rounds_used = oracle.round_count() - start_rounds;
    assert!(
        rounds_used <= budget,
        "combined selection used {rounds_used} rounds, budget {budget}"
    );
    Ok(CombinedOutcome {
        item,
        claimed_k: tail_claim.max(dense_claim) + 2.0,
        rank,
        sparse_item,
        sparse_branch,
        dense_item,
        dense_side,
        below_count,
        knockout_levels: levels,
        rounds_used,
        round_budget: budget,
    })
}

fn validate_selection(items: &[usize], rank: usize, d: usize, c: f64) -> Result<()> {
    if items.is_empty() {
        return Err(Error::EmptySelection);
    }
    if rank < 1 || rank > items.len() {
        return Err(Error::RankOutOfRange {
            rank,
            n: items.len(),
        });
    }
    if d < 1 {
        return Err(Error::ZeroRoundBudget);
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument {
            what: "scale constant",
            detail: format!("c must be positive, got {c}"),
        });
    }
    Ok(())
}
