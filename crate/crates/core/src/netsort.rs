//! Arity-m sorting networks executed in batched rounds.
//!
//! A network is a fixed schedule: each layer holds pairwise-disjoint gates,
//! each gate an ascending list of at most `m` positions. Executing a layer
//! sorts every gate's current occupants in parallel; here each gate is a
//! round-robin tournament and a whole layer is one oracle round. A depth-d
//! network therefore sorts in d rounds, and because every gate pass is
//! 2-approximate against any adversary, the end-to-end arrangement is
//! 2d-approximately sorted, unconditionally.
//!
//! Construction works on a power-of-two virtual width. Merging splits the
//! position grid into R residue lanes (R a power of two, at most m/2),
//! merges the lanes recursively in parallel, and repairs the interleave
//! with two staggered layers of row-pair gates (one layer of adjacent
//! pairs in the classic R = 2, m < 4 case). Positions at or above the real
//! width act as plus-infinity ghosts: they would never move, so every gate
//! simply drops them, which is the standard padding argument. Depth comes
//! out O(log_R^2 n * log R) and is always reported exactly as built.

use serde::{Deserialize, Serialize};

use crate::baselines::tournament_groups;
use crate::error::{Error, Result};
use crate::oracle::ComparisonOracle;

/// Construction scheme for [`build_network`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetScheme {
    /// Bottom-up: sort aligned base blocks with single gates, then merge
    /// pairs of runs of doubling length. The R-lane generalization of the
    /// Batcher odd-even mergesort (and exactly Batcher at m < 4).
    KWayOddEven,
    /// Top-down: split into R blocks, sort each recursively, then merge
    /// the sorted runs with a pairwise tree.
    RecursiveMerge,
}

impl NetScheme {
    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            NetScheme::KWayOddEven => "k-way-odd-even",
            NetScheme::RecursiveMerge => "recursive-merge",
        }
    }
}

/// A sorting network: `layers[r]` is the set of gates run in round `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortingNetwork {
    width: usize,
    arity: usize,
    layers: Vec<Vec<Vec<u32>>>,
}

impl SortingNetwork {
    #[must_use]
    pub fn width(&self) -> usize {
        self.width
    }

    /// The arity the network was built for (gates never exceed it).
    #[must_use]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[must_use]
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    #[must_use]
    pub fn layers(&self) -> &[Vec<Vec<u32>>] {
        &self.layers
    }

    #[must_use]
    pub fn comparison_bound(&self) -> usize {
        self.layers
            .iter()
            .flatten()
            .map(|g| g.len() * (g.len() - 1) / 2)
            .sum()
    }

    /// Applies the network to real values with an exact comparator.
    pub fn apply_exact(&self, values: &mut [f64]) {
        assert_eq!(values.len(), self.width, "value slice must match width");
        let mut scratch = Vec::new();
        for layer in &self.layers {
            for gate in layer {
                scratch.clear();
                scratch.extend(gate.iter().map(|&p| values[p as usize]));
                scratch.sort_by(f64::total_cmp);
                for (&p, &v) in gate.iter().zip(&scratch) {
                    values[p as usize] = v;
                }
            }
        }
    }

    /// Exhaustively checks the 0-1 principle: the network sorts every
    /// real-valued input iff it sorts all 2^width 0-1 inputs under an exact
    /// comparator. Guarded to widths where enumeration is sane.
    pub fn sorts_all_binary_inputs(&self) -> Result<bool> {
        const MAX: usize = 20;
        if self.width > MAX {
            return Err(Error::BinaryCheckTooWide {
                n: self.width,
                max: MAX,
            });
        }
        let mut bits = vec![0u8; self.width];
        for mask in 0..(1u32 << self.width) {
            for (i, b) in bits.iter_mut().enumerate() {
                *b = ((mask >> i) & 1) as u8;
            }
            for layer in &self.layers {
                for gate in layer {
                    let ones: usize = gate.iter().map(|&p| bits[p as usize] as usize).sum();
                    let zeros = gate.len() - ones;
                    for (slot, &p) in gate.iter().enumerate() {
                        bits[p as usize] = u8::from(slot >= zeros);
                    }
                }
            }
            if bits.windows(2).any(|w| w[0] > w[1]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Text form: a header line, then one line per gate as
    /// `round_index: p1 p2 ... pk`, layers in order.
    #[must_use]
    pub fn to_text(&self) -> String {
        let mut out = format!("network n={} m={}\n", self.width, self.arity);
        for (round, layer) in self.layers.iter().enumerate() {
            for gate in layer {
                out.push_str(&format!("{round}:"));
                for p in gate {
                    out.push_str(&format!(" {p}"));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parses the text form. The header is optional: without it, width and
    /// arity are inferred as the largest position plus one and the largest
    /// gate size.
    pub fn parse(text: &str) -> Result<Self> {
        let mut width: Option<usize> = None;
        let mut arity: Option<usize> = None;
        let mut layers: Vec<Vec<Vec<u32>>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |detail: String| Error::NetworkParse {
                line: lineno + 1,
                detail,
            };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("network") {
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("n=") {
                        width = Some(v.parse().map_err(|_| err(format!("bad width '{v}'")))?);
                    } else if let Some(v) = field.strip_prefix("m=") {
                        arity = Some(v.parse().map_err(|_| err(format!("bad arity '{v}'")))?);
                    } else {
                        return Err(err(format!("unknown header field '{field}'")));
                    }
                }
                continue;
            }
            let (round_s, rest) = line
                .split_once(':')
                .ok_or_else(|| err("expected 'round: p1 p2 ...'".into()))?;
            let round: usize = round_s
                .trim()
                .parse()
                .map_err(|_| err(format!("bad round index '{round_s}'")))?;
            let mut gate = Vec::new();
            for tok in rest.split_whitespace() {
                let p: u32 = tok
                    .parse()
                    .map_err(|_| err(format!("bad position '{tok}'")))?;
                gate.push(p);
            }
            if gate.len() < 2 {
                return Err(err("a gate needs at least two positions".into()));
            }
            if gate.windows(2).any(|w| w[0] >= w[1]) {
                return Err(err("gate positions must be strictly ascending".into()));
            }
            while layers.len() <= round {
                layers.push(Vec::new());
            }
            layers[round].push(gate);
        }

        layers.retain(|l| !l.is_empty());
        let max_pos = layers
            .iter()
            .flatten()
            .flatten()
            .copied()
            .max()
            .map_or(0, |p| p as usize + 1);
        let max_gate = layers.iter().flatten().map(Vec::len).max().unwrap_or(2);
        let width = width.unwrap_or(max_pos);
        let arity = arity.unwrap_or(max_gate);
        if width < max_pos {
            return Err(Error::NetworkParse {
                line: 0,
                detail: format!("declared width {width} smaller than positions used ({max_pos})"),
            });
        }
        if arity < max_gate {
            return Err(Error::NetworkParse {
                line: 0,
                detail: format!("declared arity {arity} smaller than largest gate ({max_gate})"),
            });
        }
        let net = SortingNetwork {
            width,
            arity,
            layers,
        };
        net.validate()?;
        Ok(net)
    }

    /// Structural invariants: gates within a layer are disjoint, ascending,
    /// in range, and no larger than the arity.
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| Error::InvalidArgument {
            what: "sorting network",
            detail,
        };
        for (round, layer) in self.layers.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for gate in layer {
                if gate.len() > self.arity {
                    return Err(bad(format!(
                        "round {round} has a gate of {} positions, arity is {}",
                        gate.len(),
                        self.arity
                    )));
                }
                for &p in gate {
                    if p as usize >= self.width {
                        return Err(bad(format!("round {round} position {p} out of range")));
                    }
                    if !seen.insert(p) {
                        return Err(bad(format!(
                            "round {round} position {p} is in two gates"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

// ── Construction ───────────────────────────────────────────────────────────

fn prev_pow2(x: usize) -> usize {
    debug_assert!(x >= 1);
    1 << (usize::BITS - 1 - x.leading_zeros())
}

fn next_pow2_multiple(base: usize, n: usize) -> usize {
    let mut v = base;
    while v < n {
        v *= 2;
    }
    v
}

/// Residue-lane count: a power of two, at most m/2 (so a cleanup gate of
/// two R-rows fits the arity), and at least 2.
fn lane_count(m: usize) -> usize {
    if m < 4 {
        2
    } else {
        prev_pow2(m / 2)
    }
}

struct Builder {
    /// Real width; positions at or beyond it are ghosts and are dropped.
    width: usize,
    layers: Vec<Vec<Vec<u32>>>,
}

impl Builder {
    fn gate(&mut self, layer: usize, positions: impl Iterator<Item = usize>) {
        let real: Vec<u32> = positions
            .filter(|&p| p < self.width)
            .map(|p| p as u32)
            .collect();
        debug_assert!(real.windows(2).all(|w| w[0] < w[1]));
        if real.len() < 2 {
            return;
        }
        while self.layers.len() <= layer {
            self.layers.push(Vec::new());
        }
        self.layers[layer].push(real);
    }

    /// Merges two equal sorted halves living on the arithmetic grid
    /// `base + k * stride`, `k < count`. Returns the depth used. `count`
    /// is a power of two and the left half is exactly count/2.
    fn merge(&mut self, m: usize, base: usize, stride: usize, count: usize, layer: usize) -> usize {
        if count <= m {
            self.gate(layer, (0..count).map(|k| base + k * stride));
            return 1;
        }
        let r = lane_count(m);
        let mut lane_depth = 0;
        for lane in 0..r {
            let d = self.merge(m, base + lane * stride, stride * r, count / r, layer);
            debug_assert!(lane_depth == 0 || lane_depth == d, "lanes must align");
            lane_depth = d;
        }
        if m < 4 {
            // Classic odd-even cleanup: one layer of adjacent pairs
            // (2i + 1, 2i + 2).
            let cleanup = layer + lane_depth;
            let mut i = 1;
            while i + 1 < count {
                self.gate(cleanup, [base + i * stride, base + (i + 1) * stride].into_iter());
                i += 2;
            }
            lane_depth + 1
        } else {
            // The interleave of R sorted lanes is sorted except for at most
            // two adjacent partial rows of the R-wide grid; two staggered
            // layers of row-pair gates (2R positions each) finish the job.
            let rows = count / r;
            let row = |k: usize, q: usize| base + (k * r + q) * stride;
            let even = layer + lane_depth;
            for u in 0..rows / 2 {
                self.gate(even, (0..2 * r).map(|q| row(2 * u, q)));
            }
            let odd = even + 1;
            let mut u = 0;
            while 2 * u + 2 < rows {
                self.gate(odd, (0..2 * r).map(|q| row(2 * u + 1, q)));
                u += 1;
            }
            lane_depth + 2
        }
    }

    /// Pairwise merge tree over `blocks` sorted runs of `run` positions
    /// each, starting at grid offset `base`. Returns the depth used.
    fn merge_tree(
        &mut self,
        m: usize,
        base: usize,
        stride: usize,
        run: usize,
        blocks: usize,
        layer: usize,
    ) -> usize {
        let mut depth = 0;
        let mut run = run;
        let mut blocks = blocks;
        while blocks > 1 {
            let mut stage = 0;
            for b in 0..blocks / 2 {
                let d = self.merge(m, base + 2 * b * run * stride, stride, 2 * run, layer + depth);
                debug_assert!(stage == 0 || stage == d);
                stage = d;
            }
            depth += stage;
            run *= 2;
            blocks /= 2;
        }
        depth
    }
}

/// Builds an arity-m sorting network of the given scheme. Arity below 2 is
/// an error; arity above the width is clamped to the width.
pub fn build_network(n: usize, m: usize, scheme: NetScheme) -> Result<SortingNetwork> {
    if m < 2 {
        return Err(Error::ArityTooSmall(m));
    }
    assert!(n >= 1, "networks need at least one position");
    let m = m.min(n);
    if n <= m {
        let layers = if n >= 2 {
            vec![vec![(0..n as u32).collect()]]
        } else {
            Vec::new()
        };
        return Ok(SortingNetwork {
            width: n,
            arity: m.max(2),
            layers,
        });
    }

    let r = lane_count(m);
    let base = if m < 4 { 2 } else { 2 * r };
    let virt = next_pow2_multiple(base, n);
    let mut b = Builder {
        width: n,
        layers: Vec::new(),
    };

    match scheme {
        NetScheme::KWayOddEven => {
            for block in 0..virt / base {
                b.gate(0, block * base..(block + 1) * base);
            }
            let mut depth = 1;
            let mut run = base;
            while run < virt {
                let mut stage = 0;
                for a in (0..virt).step_by(2 * run) {
                    let d = b.merge(m, a, 1, 2 * run, depth);
                    debug_assert!(stage == 0 || stage == d);
                    stage = d;
                }
                depth += stage;
                run *= 2;
            }
        }
        NetScheme::RecursiveMerge => {
            fn sort(b: &mut Builder, m: usize, base_pos: usize, count: usize, layer: usize) -> usize {
                if count <= m {
                    b.gate(layer, base_pos..base_pos + count);
                    return 1;
                }
                let r = lane_count(m);
                let block = count / r;
                let mut inner = 0;
                for k in 0..r {
                    let d = sort(b, m, base_pos + k * block, block, layer);
                    debug_assert!(inner == 0 || inner == d);
                    inner = d;
                }
                inner + b.merge_tree(m, base_pos, 1, block, r, layer + inner)
            }
            sort(&mut b, m, 0, virt, 0);
        }
    }

    // Ghost stripping can leave empty layers; drop them so depth is the
    // exact number of real rounds.
    let layers: Vec<Vec<Vec<u32>>> = b.layers.into_iter().filter(|l| !l.is_empty()).collect();
    let net = SortingNetwork {
        width: n,
        arity: m,
        layers,
    };
    debug_assert!(net.validate().is_ok());
    Ok(net)
}

// ── Execution ──────────────────────────────────────────────────────────────

/// A network mid-execution: the current arrangement plus the next layer to
/// run. Exposed so selection code can drive several heterogeneous runs in
/// shared rounds; most callers want [`run_network`].
#[derive(Debug, Clone)]
pub struct NetworkRun<'a> {
    net: &'a SortingNetwork,
    arrangement: Vec<usize>,
    layer: usize,
}

impl<'a> NetworkRun<'a> {
    pub fn new(net: &'a SortingNetwork, items: &[usize]) -> Result<Self> {
        if items.len() != net.width() {
            return Err(Error::WidthMismatch {
                net: net.width(),
                items: items.len(),
            });
        }
        Ok(Self {
            net,
            arrangement: items.to_vec(),
            layer: 0,
        })
    }

    #[must_use]
    pub fn finished(&self) -> bool {
        self.layer >= self.net.depth()
    }

    /// Gates of the upcoming layer as item groups (occupants, not
    /// positions). Empty when finished.
    #[must_use]
    pub fn current_groups(&self) -> Vec<Vec<usize>> {
        if self.finished() {
            return Vec::new();
        }
        self.net.layers()[self.layer]
            .iter()
            .map(|gate| gate.iter().map(|&p| self.arrangement[p as usize]).collect())
            .collect()
    }

    /// Writes one layer's tournament results back (ascending order into
    /// ascending positions) and advances.
    pub fn apply(&mut self, orders: &[Vec<usize>]) {
        assert!(!self.finished(), "apply on a finished run");
        let gates = &self.net.layers()[self.layer];
        assert_eq!(orders.len(), gates.len(), "one order per gate");
        for (gate, order) in gates.iter().zip(orders) {
            assert_eq!(gate.len(), order.len());
            for (&p, &item) in gate.iter().zip(order) {
                self.arrangement[p as usize] = item;
            }
        }
        self.layer += 1;
    }

    #[must_use]
    pub fn arrangement(&self) -> &[usize] {
        &self.arrangement
    }

    #[must_use]
    pub fn into_arrangement(self) -> Vec<usize> {
        self.arrangement
    }
}

/// Advances every unfinished run by one layer, all sharing a single round.
/// Returns false (consuming nothing) once every run is finished.
pub fn step_runs(oracle: &mut ComparisonOracle, runs: &mut [NetworkRun]) -> bool {
    let mut groups = Vec::new();
    let mut spans = Vec::new();
    for (idx, run) in runs.iter().enumerate() {
        if run.finished() {
            continue;
        }
        let g = run.current_groups();
        spans.push((idx, groups.len(), g.len()));
        groups.extend(g);
    }
    if groups.is_empty() {
        return false;
    }
    let orders = tournament_groups(oracle, &groups);
    for (idx, start, len) in spans {
        runs[idx].apply(&orders[start..start + len]);
    }
    true
}

/// Executes a network on `items`: each layer is one batched round, each
/// gate a tournament of its occupants written back in tournament order.
/// The result is 2·depth-approximately sorted against any adversary, and
/// exact when the comparator is honest and all value gaps exceed 1.
pub fn run_network(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    net: &SortingNetwork,
) -> Result<Vec<usize>> {
    let mut runs = [NetworkRun::new(net, items)?];
    while step_runs(oracle, &mut runs) {}
    let [run] = runs;
    Ok(run.into_arrangement())
}

/// Executes one network over many item sets in lockstep: layer i of every
/// set shares round i, so the whole family costs depth rounds total.
pub fn run_networks_lockstep(
    oracle: &mut ComparisonOracle,
    net: &SortingNetwork,
    sets: &[Vec<usize>],
) -> Result<Vec<Vec<usize>>> {
    let mut runs = sets
        .iter()
        .map(|s| NetworkRun::new(net, s))
        .collect::<Result<Vec<_>>>()?;
    while step_runs(oracle, &mut runs) {}
    Ok(runs.into_iter().map(NetworkRun::into_arrangement).collect())
}

// ── Round-budgeted sorting ─────────────────────────────────────────────────

/// Outcome of [`round_sort`]: the arrangement and exactly what was built
/// and claimed.
#[derive(Debug, Clone)]
pub struct RoundSortRun {
    pub order: Vec<usize>,
    pub arity: usize,
    pub depth: usize,
    /// 2 times the depth actually used; the unconditional error bound.
    pub claimed_k: f64,
}

/// Picks the network for a d-round budget: arity starts at
/// ceil(n^(2/sqrt(d))) and doubles (clamped to n) until the built depth
/// fits the budget. Always terminates: arity n is depth 1.
pub fn network_for_budget(n: usize, d: usize) -> Result<SortingNetwork> {
    if d < 1 {
        return Err(Error::ZeroRoundBudget);
    }
    let mut m = (n as f64).powf(2.0 / (d as f64).sqrt()).ceil() as usize;
    m = m.clamp(2, n.max(2));
    loop {
        let net = build_network(n, m, NetScheme::KWayOddEven)?;
        if net.depth() <= d {
            return Ok(net);
        }
        m = (m * 2).min(n);
    }
}

/// Sorts within a round budget: builds the budget network and runs it.
/// The claimed error bound is 2 times the depth actually used, never the
/// budget itself.
pub fn round_sort(
    oracle: &mut ComparisonOracle,
    items: &[usize],
    d: usize,
) -> Result<RoundSortRun> {
    if d < 1 {
        return Err(Error::ZeroRoundBudget);
    }
    if items.len() <= 1 {
        return Ok(RoundSortRun {
            order: items.to_vec(),
            arity: 2,
            depth: 0,
            claimed_k: 0.0,
        });
    }
    let net = network_for_budget(items.len(), d)?;
    let order = run_network(oracle, items, &net)?;
    Ok(RoundSortRun {
        order,
        arity: net.arity(),
        depth: net.depth(),
        claimed_k: 2.0 * net.depth() as f64,
    })
}
