//! The comparison oracle: the only window algorithms get onto an instance.
//!
//! Every comparison of items `i` and `j` behaves as follows. If the two
//! values differ by more than the closeness threshold, the oracle truthfully
//! reports the larger item. Otherwise the answer belongs to the adversary
//! policy, which sees the instance and the full query history and may answer
//! however it likes, including inconsistently for repeated queries.
//!
//! Comparisons are grouped into rounds. A `compare` call is a round of one.
//! `submit_round` issues many comparisons in a single round; the adversary
//! answers them in submission order, each answer allowed to depend on the
//! answers already given earlier in the same round. Round counts are the
//! costs that the round-budgeted algorithms advertise.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, CLOSE_THRESHOLD};
use crate::policy::AdversaryPolicy;

/// One answered comparison.
///
/// `seq` is the global query ordinal (0-based), `round` the round ordinal
/// the query was answered in, `winner` whichever of `left`/`right` the
/// comparator claimed was larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub seq: u64,
    pub round: u32,
    pub left: u32,
    pub right: u32,
    pub winner: u32,
}

/// Full history of answered comparisons plus the round counter.
#[derive(Debug, Clone, Default)]
pub struct Transcript {
    records: Vec<QueryRecord>,
    rounds: u32,
}

impl Transcript {
    #[must_use]
    pub fn records(&self) -> &[QueryRecord] {
        &self.records
    }

    #[must_use]
    pub fn comparison_count(&self) -> usize {
        self.records.len()
    }

    #[must_use]
    pub fn round_count(&self) -> usize {
        self.rounds as usize
    }

    /// Serializes the transcript as JSON lines, one record per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut w, rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Whether `submit_round` is available. `compare` works either way.
    pub batch_mode: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { batch_mode: true }
    }
}

/// Adversarial comparator over one instance.
pub struct ComparisonOracle {
    instance: Instance,
    policy: AdversaryPolicy,
    config: OracleConfig,
    transcript: Transcript,
}

impl ComparisonOracle {
    #[must_use]
    pub fn new(instance: Instance, policy: AdversaryPolicy, config: OracleConfig) -> Self {
        Self {
            instance,
            policy,
            config,
            transcript: Transcript::default(),
        }
    }

    /// Batch-mode oracle, the default for round-based algorithms.
    #[must_use]
    pub fn batched(instance: Instance, policy: AdversaryPolicy) -> Self {
        Self::new(instance, policy, OracleConfig::default())
    }

    /// Sequential-only oracle; `submit_round` refuses to run.
    #[must_use]
    pub fn sequential(instance: Instance, policy: AdversaryPolicy) -> Self {
        Self::new(instance, policy, OracleConfig { batch_mode: false })
    }

    #[must_use]
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    #[must_use]
    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    #[must_use]
    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    #[must_use]
    pub fn policy(&self) -> &AdversaryPolicy {
        &self.policy
    }

    #[must_use]
    pub fn comparison_count(&self) -> usize {
        self.transcript.comparison_count()
    }

    #[must_use]
    pub fn round_count(&self) -> usize {
        self.transcript.round_count()
    }

    fn check_item(&self, item: usize) {
        assert!(
            item < self.instance.n(),
            "item index {item} out of range for instance of {} items",
            self.instance.n()
        );
    }

    /// Answers one pair and records it. The round ordinal is supplied by the
    /// caller so a whole batch shares one round.
    fn answer(&mut self, i: usize, j: usize, round: u32) -> usize {
        let vi = self.instance.value(i);
        let vj = self.instance.value(j);
        let winner = if (vi - vj).abs() > CLOSE_THRESHOLD {
            if vi > vj {
                i
            } else {
                j
            }
        } else {
            self.policy.decide(i, j, &self.instance, &self.transcript)
        };
        let seq = self.transcript.records.len() as u64;
        self.transcript.records.push(QueryRecord {
            seq,
            round,
            left: i as u32,
            right: j as u32,
            winner: winner as u32,
        });
        self.policy.observe(i, j, &self.instance);
        winner
    }

    /// Compares two items as a round of one, returning the claimed larger
    /// item. Comparing an item against itself is a free no-op answering the
    /// item: nothing is recorded and no round is consumed.
    ///
    /// Panics on out-of-range indices; algorithms own their index book-
    /// keeping, so a failure here is a bug in the caller.
    pub fn compare(&mut self, i: usize, j: usize) -> usize {
        self.check_item(i);
        self.check_item(j);
        if i == j {
            return i;
        }
        let round = self.transcript.rounds;
        let winner = self.answer(i, j, round);
        self.transcript.rounds += 1;
        winner
    }

    /// Issues a batch of comparisons as one round and returns the winners
    /// in pair order. Self-pairs inside a batch are answered (as the item)
    /// without being recorded. The adversary answers the recorded pairs in
    /// submission order, so a repeated pair inside one round can legally
    /// receive contradicting answers.
    pub fn submit_round(&mut self, pairs: &[(usize, usize)]) -> Result<Vec<usize>> {
        if !self.config.batch_mode {
            return Err(Error::BatchModeDisabled);
        }
        if pairs.is_empty() {
            return Err(Error::EmptyBatch);
        }
        for &(i, j) in pairs {
            self.check_item(i);
            self.check_item(j);
        }
        let round = self.transcript.rounds;
        let winners = pairs
            .iter()
            .map(|&(i, j)| if i == j { i } else { self.answer(i, j, round) })
            .collect();
        self.transcript.rounds += 1;
        Ok(winners)
    }

    /// Answers a pair list, as one batched round when the oracle allows it
    /// and as sequential single-comparison rounds otherwise. An empty list
    /// is a no-op. Algorithms use this so they run under either oracle
    /// configuration while claiming batched round counts.
    pub fn compare_all(&mut self, pairs: &[(usize, usize)]) -> Vec<usize> {
        if pairs.is_empty() {
            return Vec::new();
        }
        if self.config.batch_mode {
            self.submit_round(pairs)
                .expect("non-empty batch on a batch-mode oracle cannot fail")
        } else {
            pairs.iter().map(|&(i, j)| self.compare(i, j)).collect()
        }
    }
}
