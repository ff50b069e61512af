//! Adversary policies: how close comparisons get answered.
//!
//! A policy is an adaptive adversary. The oracle consults it exactly for the
//! pairs within its discretion (value distance at most the closeness
//! threshold) and shows it the instance and the transcript of everything
//! answered so far. Policies may keep their own state; `observe` is invoked
//! after every recorded query, including honest ones, so a policy can track
//! how often each item has appeared.

use crate::instance::Instance;
use crate::oracle::Transcript;
use crate::seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PolicyKind {
    /// Answers close pairs truthfully (larger value wins, ties broken by
    /// the larger index). The fully benign comparator.
    Honest,
    /// Flips an unbiased deterministic coin per query, keyed by the policy
    /// seed and the query ordinal.
    SeededRandom,
    /// Always inverts: the smaller value wins, ties broken by the smaller
    /// index. Simple, stateless, maximally misleading locally.
    ReverseClose,
    /// Realizes a rotational orientation on each closeness component so
    /// that components of mutually close items contain long beat-cycles
    /// (item 0 beats 1 beats 2 ... beats 0 on an all-equal triple). No
    /// consistent total order explains its answers.
    CycleForcer,
    /// The busier item loses: whichever of the pair has appeared in more
    /// recorded queries so far is declared smaller (flat tie: the left
    /// operand loses). Starves pivot-style algorithms, which keep asking
    /// about the same pivot item.
    PivotStarver,
    /// Replays a fixed bit script cyclically: false means the left operand
    /// wins, true the right. Exists so tests can enumerate every possible
    /// answer pattern for small query counts.
    Scripted,
}

impl PolicyKind {
    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Honest => "honest",
            PolicyKind::SeededRandom => "seeded-random",
            PolicyKind::ReverseClose => "reverse-close",
            PolicyKind::CycleForcer => "cycle-forcer",
            PolicyKind::PivotStarver => "pivot-starver",
            PolicyKind::Scripted => "scripted",
        }
    }
}

/// Closeness-component tables for the cycle forcer, built lazily from the
/// first instance it is asked about.
#[derive(Debug, Clone)]
struct CycleTables {
    /// Position of each item within its component, components ordered by
    /// ascending item index.
    pos: Vec<u32>,
    /// Size of the component each item belongs to.
    size: Vec<u32>,
}

impl CycleTables {
    fn build(instance: &Instance) -> Self {
        let n = instance.n();
        let mut by_value: Vec<usize> = (0..n).collect();
        by_value.sort_by(|&a, &b| {
            instance
                .value(a)
                .total_cmp(&instance.value(b))
                .then(a.cmp(&b))
        });
        let mut pos = vec![0u32; n];
        let mut size = vec![0u32; n];
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n
                && instance.value(by_value[end]) - instance.value(by_value[end - 1]) <= 1.0
            {
                end += 1;
            }
            let mut members: Vec<usize> = by_value[start..end].to_vec();
            members.sort_unstable();
            for (p, &item) in members.iter().enumerate() {
                pos[item] = p as u32;
                size[item] = members.len() as u32;
            }
            start = end;
        }
        Self { pos, size }
    }
}

/// An adaptive adversary with optional per-item state.
#[derive(Debug, Clone)]
pub struct AdversaryPolicy {
    kind: PolicyKind,
    seed: u64,
    /// Recorded-appearance counts per item (pivot starver).
    tallies: Vec<u64>,
    /// Lazily built component tables (cycle forcer).
    cycle: Option<CycleTables>,
    /// Answer bits (scripted), consumed cyclically.
    script: Vec<bool>,
    cursor: usize,
}

impl AdversaryPolicy {
    #[must_use]
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            tallies: Vec::new(),
            cycle: None,
            script: Vec::new(),
            cursor: 0,
        }
    }

    /// A scripted policy answering from the given bits, cyclically. An
    /// empty script behaves as all-false (left operand always wins).
    #[must_use]
    pub fn scripted(bits: Vec<bool>) -> Self {
        Self {
            script: bits,
            ..Self::new(PolicyKind::Scripted, 0)
        }
    }

    #[must_use]
    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    #[must_use]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Clears all adaptive state and installs a new seed. The policy then
    /// behaves exactly like a freshly constructed one.
    pub fn reset(&mut self, seed: u64) {
        self.seed = seed;
        self.tallies.clear();
        self.cycle = None;
        self.cursor = 0;
    }

    /// A fresh copy whose seed is derived from this policy's seed and the
    /// given salt. Trial grids use this to give every cell an independent
    /// but reproducible adversary.
    #[must_use]
    pub fn fresh(&self, salt: u64) -> Self {
        let mut p = self.clone();
        p.reset(seed::mix2(self.seed, salt));
        p
    }

    /// Decides a close pair: returns whichever of `i`, `j` the comparator
    /// claims is larger. Only pairs within the adversary's discretion may
    /// be submitted; far pairs are the oracle's job and trip the assert.
    pub fn decide(
        &mut self,
        i: usize,
        j: usize,
        instance: &Instance,
        transcript: &Transcript,
    ) -> usize {
        assert_ne!(i, j, "self-pairs are answered by the oracle, not the policy");
        assert!(
            instance.close(i, j),
            "policy asked to decide a far pair ({i}, {j})"
        );
        let vi = instance.value(i);
        let vj = instance.value(j);
        match self.kind {
            PolicyKind::Honest => {
                if vi != vj {
                    if vi > vj {
                        i
                    } else {
                        j
                    }
                } else {
                    i.max(j)
                }
            }
            PolicyKind::ReverseClose => {
                if vi != vj {
                    if vi < vj {
                        i
                    } else {
                        j
                    }
                } else {
                    i.min(j)
                }
            }
            PolicyKind::SeededRandom => {
                if seed::coin(self.seed, transcript.comparison_count() as u64) {
                    i
                } else {
                    j
                }
            }
            PolicyKind::CycleForcer => {
                let tables = self
                    .cycle
                    .get_or_insert_with(|| CycleTables::build(instance));
                let (a, b) = (i.min(j), i.max(j));
                debug_assert_eq!(
                    tables.size[a], tables.size[b],
                    "close pair split across components"
                );
                let diff = tables.pos[b] - tables.pos[a];
                let c = tables.size[a];
                if diff <= (c - 1) / 2 {
                    a
                } else {
                    b
                }
            }
            PolicyKind::PivotStarver => {
                self.ensure_tallies(instance.n());
                let (ti, tj) = (self.tallies[i], self.tallies[j]);
                // The busier item loses; on a flat tie the left operand
                // loses.
                if ti > tj {
                    j
                } else if tj > ti {
                    i
                } else {
                    j
                }
            }
            PolicyKind::Scripted => {
                let bit = if self.script.is_empty() {
                    false
                } else {
                    self.script[self.cursor % self.script.len()]
                };
                self.cursor += 1;
                if bit {
                    j
                } else {
                    i
                }
            }
        }
    }

    /// Notification that a query on `(i, j)` was just recorded (honest or
    /// adversarial alike). Keeps the appearance tallies current.
    pub fn observe(&mut self, i: usize, j: usize, instance: &Instance) {
        if self.kind == PolicyKind::PivotStarver {
            self.ensure_tallies(instance.n());
            self.tallies[i] += 1;
            self.tallies[j] += 1;
        }
    }

    fn ensure_tallies(&mut self, n: usize) {
        if self.tallies.len() < n {
            self.tallies.resize(n, 0);
        }
    }

    /// Parses a policy label: one of `honest`, `seeded-random[:seed]`,
    /// `reverse-close`, `cycle-forcer`, `pivot-starver`, with an optional
    /// `:seed` suffix accepted everywhere.
    pub fn parse(s: &str) -> Result<Self> {
        const VALID: &str =
            "honest, seeded-random[:seed], reverse-close, cycle-forcer, pivot-starver";
        let unknown = || Error::UnknownName {
            what: "adversary policy",
            got: s.to_string(),
            valid: VALID,
        };
        let (head, seed) = match s.split_once(':') {
            Some((h, tail)) => (h, tail.parse::<u64>().map_err(|_| unknown())?),
            None => (s, 0),
        };
        let kind = match head {
            "honest" => PolicyKind::Honest,
            "seeded-random" => PolicyKind::SeededRandom,
            "reverse-close" => PolicyKind::ReverseClose,
            "cycle-forcer" => PolicyKind::CycleForcer,
            "pivot-starver" => PolicyKind::PivotStarver,
            _ => return Err(unknown()),
        };
        Ok(Self::new(kind, seed))
    }

    /// Stable label, parseable by [`AdversaryPolicy::parse`] for the five
    /// named policies.
    #[must_use]
    pub fn label(&self) -> String {
        if self.seed == 0 {
            self.kind.name().to_string()
        } else {
            format!("{}:{}", self.kind.name(), self.seed)
        }
    }
}
