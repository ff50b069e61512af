//! Problem instances and the generator families used by the trial grids.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The comparator's discrimination threshold. Two items whose values differ
/// by at most this amount are "close": the adversary owns the answer.
pub const CLOSE_THRESHOLD: f64 = 1.0;

/// An immutable problem instance: one real value per item.
///
/// Item identity is the index into the value vector. Algorithms never see
/// the values; they only hold item indices and query the oracle. Values are
/// visible to white-box verifiers and to the adversary.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    values: Vec<f64>,
}

impl Instance {
    /// Builds an instance, rejecting empty input and non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if values.len() > u32::MAX as usize {
            return Err(Error::InstanceTooLarge(values.len()));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(bad));
        }
        Ok(Self { values })
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.values.len()
    }

    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value of one item. Panics on a bad index; algorithms cannot reach
    /// this (they go through the oracle), so a failure here is a bug.
    #[must_use]
    pub fn value(&self, item: usize) -> f64 {
        self.values[item]
    }

    /// True when the pair is within the adversary's discretion.
    #[must_use]
    pub fn close(&self, i: usize, j: usize) -> bool {
        (self.values[i] - self.values[j]).abs() <= CLOSE_THRESHOLD
    }

    /// Values in ascending order.
    #[must_use]
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut s = self.values.clone();
        s.sort_by(f64::total_cmp);
        s
    }

    /// The `rank`-th smallest value, 1-based.
    pub fn rank_value(&self, rank: usize) -> Result<f64> {
        if rank == 0 || rank > self.n() {
            return Err(Error::RankOutOfRange { rank, n: self.n() });
        }
        Ok(self.sorted_values()[rank - 1])
    }
}

// ── Generator families ─────────────────────────────────────────────────────

/// Named instance shapes. Each family maps `(n, seed)` to an instance
/// deterministically; item order is shuffled so that index order carries no
/// information about value order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum InstanceFamily {
    /// Values near `2 * rank` with sub-threshold jitter: all pairs are far
    /// apart, so every comparison is honest.
    UniformSpread,
    /// Every value is 0.0: every answer is adversarial.
    AllEqual,
    /// `count` clusters of width `width`, centers spaced `width + 3` apart.
    /// Items are split evenly across clusters. With `width <= 1` each
    /// cluster is one big close class but distinct clusters are far apart.
    Clustered { width: f64, count: usize },
    /// Three bands [0, 3), [5, 8), [10, 13). The strips [3, 5) and [8, 10)
    /// are guaranteed empty, so y = 3.0 and y = 8.0 are clean cut points
    /// for gap-respecting checks.
    GappedBands,
    /// A spread instance with a dense pack of about `n^(2/3) / 10` values
    /// squeezed into [t - 1, t] where t is the value at the given 1-based
    /// rank. Stresses selectors around that rank.
    DenseAtRank { rank: usize },
}

impl InstanceFamily {
    /// Deterministically generates an `n`-item instance.
    ///
    /// Panics if `n == 0` or if family parameters are degenerate (zero
    /// clusters); generation is test/harness plumbing, not a fallible API.
    #[must_use]
    pub fn generate(&self, n: usize, seed: u64) -> Instance {
        assert!(n > 0, "instance families need n >= 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = match self {
            InstanceFamily::UniformSpread => {
                let mut v: Vec<f64> = (0..n)
                    .map(|i| 2.0 * i as f64 + rng.random_range(0.0..0.9))
                    .collect();
                v.shuffle(&mut rng);
                v
            }
            InstanceFamily::AllEqual => vec![0.0; n],
            InstanceFamily::Clustered { width, count } => {
                assert!(*count >= 1, "clustered family needs at least one cluster");
                assert!(width.is_finite() && *width >= 0.0);
                let spacing = width + 3.0;
                let mut v: Vec<f64> = (0..n)
                    .map(|i| {
                        let c = (i % count) as f64;
                        c * spacing + rng.random_range(0.0..=*width)
                    })
                    .collect();
                v.shuffle(&mut rng);
                v
            }
            InstanceFamily::GappedBands => {
                let mut v: Vec<f64> = (0..n)
                    .map(|i| 5.0 * (i % 3) as f64 + rng.random_range(0.0..3.0))
                    .collect();
                v.shuffle(&mut rng);
                v
            }
            InstanceFamily::DenseAtRank { rank } => {
                let rank = (*rank).clamp(1, n);
                let target = 100.0;
                let dense = ((n as f64).powf(2.0 / 3.0) / 10.0).ceil() as usize + 2;
                let dense = dense.min(rank);
                // Sorted blueprint: spread below, a dense pack ending
                // exactly at the target, spread above. Gaps outside the
                // pack are 1.5, safely past the closeness threshold.
                let mut sorted = Vec::with_capacity(n);
                let below = rank - dense;
                for i in 0..below {
                    sorted.push(target - 3.0 - 1.5 * (below - i) as f64);
                }
                for _ in 0..dense.saturating_sub(1) {
                    sorted.push(target - rng.random_range(0.0..1.0));
                }
                sorted.push(target);
                for i in 0..(n - rank) {
                    sorted.push(target + 2.0 + 1.5 * i as f64);
                }
                sorted.shuffle(&mut rng);
                sorted
            }
        };
        Instance::new(values).expect("family generators produce valid instances")
    }

    /// Parses a family label such as `uniform-spread`, `all-equal`,
    /// `clustered:w=1:k=3`, `gapped-bands`, or `dense-at-rank:512`.
    pub fn parse(s: &str) -> Result<Self> {
        const VALID: &str =
            "uniform-spread, all-equal, clustered:w=<width>:k=<count>, gapped-bands, dense-at-rank:<rank>";
        let unknown = || Error::UnknownName {
            what: "instance family",
            got: s.to_string(),
            valid: VALID,
        };
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        match head {
            "uniform-spread" => Ok(InstanceFamily::UniformSpread),
            "all-equal" => Ok(InstanceFamily::AllEqual),
            "gapped-bands" => Ok(InstanceFamily::GappedBands),
            "clustered" => {
                let mut width = 1.0f64;
                let mut count = 3usize;
                for p in parts {
                    if let Some(w) = p.strip_prefix("w=") {
                        width = w.parse().map_err(|_| unknown())?;
                    } else if let Some(k) = p.strip_prefix("k=") {
                        count = k.parse().map_err(|_| unknown())?;
                    } else {
                        return Err(unknown());
                    }
                }
                if count == 0 || !width.is_finite() || width < 0.0 {
                    return Err(unknown());
                }
                Ok(InstanceFamily::Clustered { width, count })
            }
            "dense-at-rank" => {
                let rank = parts
                    .next()
                    .ok_or_else(unknown)?
                    .parse()
                    .map_err(|_| unknown())?;
                if rank == 0 {
                    return Err(unknown());
                }
                Ok(InstanceFamily::DenseAtRank { rank })
            }
            _ => Err(unknown()),
        }
    }

    /// Stable, parseable label (inverse of [`InstanceFamily::parse`]).
    #[must_use]
    pub fn label(&self) -> String {
        match self {
            InstanceFamily::UniformSpread => "uniform-spread".into(),
            InstanceFamily::AllEqual => "all-equal".into(),
            InstanceFamily::Clustered { width, count } => {
                format!("clustered:w={width}:k={count}")
            }
            InstanceFamily::GappedBands => "gapped-bands".into(),
            InstanceFamily::DenseAtRank { rank } => format!("dense-at-rank:{rank}"),
        }
    }
}
