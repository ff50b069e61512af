//! Trial-grid experiment harness: run algorithm x policy x family cells
//! over a size sweep, record one row per trial, and post-process rows into
//! plot data and scaling fits.
//!
//! Reproducibility is the contract here. Every cell derives its seed from
//! the master seed and the cell coordinates alone, each cell builds its
//! own instance, adversary, and algorithm randomness from that seed, and
//! rows hold nothing nondeterministic (no timing). The same spec therefore
//! produces byte-identical CSV output, cells can run on any thread
//! schedule, and a recorded row can be re-run and compared field for field
//! long after the original run.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::InstanceFamily;
use crate::netsort::round_sort;
use crate::oracle::ComparisonOracle;
use crate::policy::{AdversaryPolicy, PolicyKind};
use crate::roundselect::{select_combined, DESK_C};
use crate::rsort::{
    rselect, rsort, RSortParams, RSELECT_CLAIMED_K, RSORT_CLAIMED_K,
};
use crate::verify::realized_sort_error;
use crate::{baselines, seed};

// ── Algorithms ─────────────────────────────────────────────────────────────

/// Rank used by selection algorithms when none is given explicitly.
fn median_rank(n: usize) -> usize {
    n.div_ceil(2)
}

/// Every runnable algorithm, with the parameters that change its behavior.
/// Labels are self-describing and round-trip through [`Algorithm::parse`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Algorithm {
    /// Single-round all-pairs tournament sort.
    Tournament,
    /// Pivot quicksort with no defenses; the fragile baseline.
    NaiveQuicksort,
    /// Robust randomized sort. `theory_r` switches from desk constants to
    /// the proof constants for failure rate n^-r.
    RSort { theory_r: Option<f64> },
    /// Sorting-network sort within a d-round budget.
    RoundSort { d: usize },
    /// Pivot quickselect with no defenses. Median rank when none given.
    NaiveQuickselect { rank: Option<usize> },
    /// Robust randomized selection by one-sided descent.
    RSelect {
        rank: Option<usize>,
        theory_r: Option<f64>,
    },
    /// Round-budgeted combined selection (sparse + census + dense).
    SelectCombined {
        rank: Option<usize>,
        d: usize,
        c: f64,
    },
}

impl Algorithm {
    pub const VALID: &'static str =
        "tournament, quicksort, rsort[:r=R], roundsort:d=D, quickselect[:rank=K], \
         rselect[:rank=K][:r=R], select[:rank=K][:d=D][:c=C]";

    /// Parses a label like `select:rank=100:d=3`. Unknown names or fields
    /// are errors; omitted fields take the documented defaults.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let mut rank: Option<usize> = None;
        let mut d: Option<usize> = None;
        let mut c: Option<f64> = None;
        let mut r: Option<f64> = None;
        for field in parts {
            let (key, value) = field.split_once('=').ok_or_else(|| Error::InvalidArgument {
                what: "algorithm label",
                detail: format!("field '{field}' is not key=value"),
            })?;
            let bad = |detail: String| Error::InvalidArgument {
                what: "algorithm label",
                detail,
            };
            match key {
                "rank" => {
                    rank = Some(value.parse().map_err(|_| bad(format!("bad rank '{value}'")))?)
                }
                "d" => d = Some(value.parse().map_err(|_| bad(format!("bad d '{value}'")))?),
                "c" => c = Some(value.parse().map_err(|_| bad(format!("bad c '{value}'")))?),
                "r" => r = Some(value.parse().map_err(|_| bad(format!("bad r '{value}'")))?),
                _ => return Err(bad(format!("unknown field '{key}'"))),
            }
        }
        let algo = match name {
            "tournament" => Algorithm::Tournament,
            "quicksort" => Algorithm::NaiveQuicksort,
            "rsort" => Algorithm::RSort { theory_r: r },
            "roundsort" => Algorithm::RoundSort { d: d.unwrap_or(9) },
            "quickselect" => Algorithm::NaiveQuickselect { rank },
            "rselect" => Algorithm::RSelect { rank, theory_r: r },
            "select" => Algorithm::SelectCombined {
                rank,
                d: d.unwrap_or(3),
                c: c.unwrap_or(DESK_C),
            },
            other => {
                return Err(Error::UnknownName {
                    what: "algorithm",
                    got: other.to_string(),
                    valid: Self::VALID,
                })
            }
        };
        Ok(algo)
    }

    /// Canonical label; parses back to the same value.
    #[must_use]
    pub fn label(&self) -> String {
        let mut s = String::new();
        match self {
            Algorithm::Tournament => s.push_str("tournament"),
            Algorithm::NaiveQuicksort => s.push_str("quicksort"),
            Algorithm::RSort { theory_r } => {
                s.push_str("rsort");
                if let Some(r) = theory_r {
                    let _ = write!(s, ":r={r}");
                }
            }
            Algorithm::RoundSort { d } => {
                let _ = write!(s, "roundsort:d={d}");
            }
            Algorithm::NaiveQuickselect { rank } => {
                s.push_str("quickselect");
                if let Some(k) = rank {
                    let _ = write!(s, ":rank={k}");
                }
            }
            Algorithm::RSelect { rank, theory_r } => {
                s.push_str("rselect");
                if let Some(k) = rank {
                    let _ = write!(s, ":rank={k}");
                }
                if let Some(r) = theory_r {
                    let _ = write!(s, ":r={r}");
                }
            }
            Algorithm::SelectCombined { rank, d, c } => {
                s.push_str("select");
                if let Some(k) = rank {
                    let _ = write!(s, ":rank={k}");
                }
                let _ = write!(s, ":d={d}");
                if *c != DESK_C {
                    let _ = write!(s, ":c={c}");
                }
            }
        }
        s
    }

    #[must_use]
    pub fn is_selection(&self) -> bool {
        matches!(
            self,
            Algorithm::NaiveQuickselect { .. }
                | Algorithm::RSelect { .. }
                | Algorithm::SelectCombined { .. }
        )
    }
}

// ── Specs and rows ─────────────────────────────────────────────────────────

/// A full experiment: one algorithm against one adversary on one family,
/// swept over sizes with repeated trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub policy: PolicyKind,
    pub policy_seed: u64,
    pub family: InstanceFamily,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
}

/// One trial's record. Strictly scalar and strictly deterministic given
/// the cell seed, so CSV round-trips and replays are exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub algorithm: String,
    pub policy: String,
    pub family: String,
    pub n: usize,
    pub trial: usize,
    pub cell_seed: u64,
    pub comparisons: u64,
    pub rounds: u32,
    pub realized_k: f64,
    pub claimed_k: f64,
    pub pass: bool,
}

/// The seed a given cell of the trial grid runs under.
#[must_use]
pub fn cell_seed(master_seed: u64, n: usize, trial: usize) -> u64 {
    seed::derive(master_seed, &[n as u64, trial as u64])
}

/// Runs one cell: builds instance, adversary, and algorithm from the cell
/// seed, runs, and scores the outcome against the algorithm's claim.
pub fn run_cell(
    algorithm: &Algorithm,
    policy: PolicyKind,
    policy_seed: u64,
    family: &InstanceFamily,
    n: usize,
    trial: usize,
    cell: u64,
) -> Result<TrialRow> {
    run_cell_with_transcript(algorithm, policy, policy_seed, family, n, trial, cell)
        .map(|(row, _)| row)
}

/// [`run_cell`] plus the full query transcript, for dump and audit paths.
pub fn run_cell_with_transcript(
    algorithm: &Algorithm,
    policy: PolicyKind,
    policy_seed: u64,
    family: &InstanceFamily,
    n: usize,
    trial: usize,
    cell: u64,
) -> Result<(TrialRow, crate::oracle::Transcript)> {
    let instance = family.generate(n, seed::mix2(cell, 101));
    let adversary = AdversaryPolicy::new(policy, policy_seed).fresh(cell);
    let mut oracle = ComparisonOracle::batched(instance, adversary);
    let algo_seed = seed::mix2(cell, 202);
    let items: Vec<usize> = (0..n).collect();

    let selection_error = |oracle: &ComparisonOracle, item: usize, rank: usize| -> Result<f64> {
        let target = oracle.instance().rank_value(rank)?;
        Ok((oracle.instance().value(item) - target).abs())
    };

    let (realized_k, claimed_k) = match algorithm {
        Algorithm::Tournament => {
            let order = baselines::tournament_order(&mut oracle, &items);
            (realized_sort_error(oracle.instance(), &order)?, 2.0)
        }
        Algorithm::NaiveQuicksort => {
            let order = baselines::naive_quicksort(&mut oracle, &items, algo_seed);
            (
                realized_sort_error(oracle.instance(), &order)?,
                f64::INFINITY,
            )
        }
        Algorithm::RSort { theory_r } => {
            let params = match theory_r {
                Some(r) => RSortParams::theory(*r, algo_seed),
                None => RSortParams::desk(algo_seed),
            };
            let run = rsort(&mut oracle, &items, &params);
            (
                realized_sort_error(oracle.instance(), &run.order)?,
                RSORT_CLAIMED_K,
            )
        }
        Algorithm::RoundSort { d } => {
            let run = round_sort(&mut oracle, &items, *d)?;
            (
                realized_sort_error(oracle.instance(), &run.order)?,
                run.claimed_k,
            )
        }
        Algorithm::NaiveQuickselect { rank } => {
            let rank = rank.unwrap_or_else(|| median_rank(n));
            let item = baselines::naive_quickselect(&mut oracle, &items, rank, algo_seed)?;
            (selection_error(&oracle, item, rank)?, f64::INFINITY)
        }
        Algorithm::RSelect { rank, theory_r } => {
            let rank = rank.unwrap_or_else(|| median_rank(n));
            let params = match theory_r {
                Some(r) => RSortParams::theory(*r, algo_seed),
                None => RSortParams::desk(algo_seed),
            };
            let run = rselect(&mut oracle, &items, rank, &params)?;
            (selection_error(&oracle, run.item, rank)?, RSELECT_CLAIMED_K)
        }
        Algorithm::SelectCombined { rank, d, c } => {
            let rank = rank.unwrap_or_else(|| median_rank(n));
            let out = select_combined(&mut oracle, &items, rank, *d, *c, algo_seed)?;
            (selection_error(&oracle, out.item, rank)?, out.claimed_k)
        }
    };

    let row = TrialRow {
        algorithm: algorithm.label(),
        policy: AdversaryPolicy::new(policy, policy_seed).label(),
        family: family.label(),
        n,
        trial,
        cell_seed: cell,
        comparisons: oracle.comparison_count() as u64,
        rounds: oracle.round_count() as u32,
        realized_k,
        claimed_k,
        pass: realized_k <= claimed_k,
    };
    Ok((row, oracle.into_transcript()))
}

/// Runs the whole grid. Cells run in parallel but the row order is fixed:
/// sizes in spec order, trials ascending.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<TrialRow>> {
    let cells: Vec<(usize, usize)> = spec
        .sizes
        .iter()
        .flat_map(|&n| (0..spec.trials).map(move |t| (n, t)))
        .collect();
    cells
        .par_iter()
        .map(|&(n, trial)| {
            run_cell(
                &spec.algorithm,
                spec.policy,
                spec.policy_seed,
                &spec.family,
                n,
                trial,
                cell_seed(spec.master_seed, n, trial),
            )
        })
        .collect()
}

// ── CSV and plot data ──────────────────────────────────────────────────────

pub fn write_csv(path: &Path, rows: &[TrialRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

/// Per-size aggregates of a row set, in first-seen size order.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub n: usize,
    pub trials: usize,
    pub mean_comparisons: f64,
    pub p95_comparisons: u64,
    pub fail_rate: f64,
    pub mean_rounds: f64,
    pub max_rounds: u32,
    pub max_realized_k: f64,
}

#[must_use]
pub fn summarize(rows: &[TrialRow]) -> Vec<SizeSummary> {
    let mut order: Vec<usize> = Vec::new();
    for row in rows {
        if !order.contains(&row.n) {
            order.push(row.n);
        }
    }
    order
        .into_iter()
        .map(|n| {
            let mut comps: Vec<u64> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.comparisons)
                .collect();
            comps.sort_unstable();
            let trials = comps.len();
            let mean = comps.iter().sum::<u64>() as f64 / trials as f64;
            // Nearest-rank 95th percentile.
            let p95 = comps[((trials as f64 * 0.95).ceil() as usize).clamp(1, trials) - 1];
            let fails = rows.iter().filter(|r| r.n == n && !r.pass).count();
            let rounds: Vec<u32> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.rounds)
                .collect();
            let max_realized = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.realized_k)
                .fold(0.0_f64, f64::max);
            SizeSummary {
                n,
                trials,
                mean_comparisons: mean,
                p95_comparisons: p95,
                fail_rate: fails as f64 / trials as f64,
                mean_rounds: rounds.iter().map(|&r| f64::from(r)).sum::<f64>() / trials as f64,
                max_rounds: rounds.iter().copied().max().unwrap_or(0),
                max_realized_k: max_realized,
            }
        })
        .collect()
}

/// Writes the three two-column plot files next to `stem`:
/// `{stem}.mean.dat` (n, mean comparisons), `{stem}.p95.dat` (n, 95th
/// percentile comparisons, nearest rank), `{stem}.fail.dat` (n, fraction
/// of trials whose realized error exceeded the claim).
pub fn write_plot_data(stem: &Path, rows: &[TrialRow]) -> Result<()> {
    let summaries = summarize(rows);
    let render = |pick: &dyn Fn(&SizeSummary) -> String| -> String {
        let mut out = String::new();
        for s in &summaries {
            let _ = writeln!(out, "{} {}", s.n, pick(s));
        }
        out
    };
    let stem_s = stem.to_string_lossy();
    std::fs::write(
        format!("{stem_s}.mean.dat"),
        render(&|s| format!("{:.6}", s.mean_comparisons)),
    )?;
    std::fs::write(
        format!("{stem_s}.p95.dat"),
        render(&|s| s.p95_comparisons.to_string()),
    )?;
    std::fs::write(
        format!("{stem_s}.fail.dat"),
        render(&|s| format!("{:.6}", s.fail_rate)),
    )?;
    Ok(())
}

// ── Scaling fits ───────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    /// y = C * n ln n
    NLogN,
    /// y = C * n ln^2 n
    NLog2N,
    /// y = C * n^p
    PowerLaw,
}

impl FitModel {
    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            FitModel::NLogN => "n-log-n",
            FitModel::NLog2N => "n-log2-n",
            FitModel::PowerLaw => "power-law",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: FitModel,
    pub constant: f64,
    /// Exponent for the power law; absent for the fixed-shape models.
    pub exponent: Option<f64>,
    /// Root mean squared residual in log space, comparable across models.
    pub log_rmse: f64,
}

/// Fits the three scaling models to (n, y) points. Needs at least three
/// distinct sizes; the log-space residual says which shape fits best.
pub fn fit_scaling(points: &[(usize, f64)]) -> Result<Vec<FitReport>> {
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::TooFewSizes(distinct.len()));
    }
    let clean: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, y)| n >= 2 && y > 0.0)
        .map(|&(n, y)| (n as f64, y))
        .collect();

    let log_rmse = |predict: &dyn Fn(f64) -> f64| -> f64 {
        let sum: f64 = clean
            .iter()
            .map(|&(n, y)| {
                let e = predict(n).max(f64::MIN_POSITIVE).ln() - y.ln();
                e * e
            })
            .sum();
        (sum / clean.len() as f64).sqrt()
    };

    // Least squares through the origin for the fixed shapes.
    let through_origin = |shape: &dyn Fn(f64) -> f64| -> f64 {
        let num: f64 = clean.iter().map(|&(n, y)| shape(n) * y).sum();
        let den: f64 = clean.iter().map(|&(n, _)| shape(n) * shape(n)).sum();
        num / den
    };

    let nlogn = |n: f64| n * n.ln();
    let nlog2n = |n: f64| n * n.ln() * n.ln();
    let c1 = through_origin(&nlogn);
    let c2 = through_origin(&nlog2n);

    // Log-log linear regression for the power law.
    let m = clean.len() as f64;
    let sx: f64 = clean.iter().map(|&(n, _)| n.ln()).sum();
    let sy: f64 = clean.iter().map(|&(_, y)| y.ln()).sum();
    let sxx: f64 = clean.iter().map(|&(n, _)| n.ln() * n.ln()).sum();
    let sxy: f64 = clean.iter().map(|&(n, y)| n.ln() * y.ln()).sum();
    let p = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let a = (sy - p * sx) / m;
    let c3 = a.exp();

    Ok(vec![
        FitReport {
            model: FitModel::NLogN,
            constant: c1,
            exponent: None,
            log_rmse: log_rmse(&|n| c1 * nlogn(n)),
        },
        FitReport {
            model: FitModel::NLog2N,
            constant: c2,
            exponent: None,
            log_rmse: log_rmse(&|n| c2 * nlog2n(n)),
        },
        FitReport {
            model: FitModel::PowerLaw,
            constant: c3,
            exponent: Some(p),
            log_rmse: log_rmse(&|n| c3 * n.powf(p)),
        },
    ])
}

// ── Replay verification ────────────────────────────────────────────────────

/// A field that changed between a recorded row and its replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayMismatch {
    pub row: usize,
    pub field: &'static str,
    pub recorded: String,
    pub replayed: String,
}

/// Re-runs every row from its recorded labels and cell seed and compares
/// all outcome fields. An empty result means the file replays exactly.
pub fn verify_rows(rows: &[TrialRow]) -> Result<Vec<ReplayMismatch>> {
    let replayed: Vec<Result<TrialRow>> = rows
        .par_iter()
        .map(|row| {
            let algorithm = Algorithm::parse(&row.algorithm)?;
            let policy = AdversaryPolicy::parse(&row.policy)?;
            let family = InstanceFamily::parse(&row.family)?;
            run_cell(
                &algorithm,
                policy.kind(),
                policy.seed(),
                &family,
                row.n,
                row.trial,
                row.cell_seed,
            )
        })
        .collect();

    let mut mismatches = Vec::new();
    for (i, (row, fresh)) in rows.iter().zip(replayed).enumerate() {
        let fresh = fresh?;
        let mut diff = |field: &'static str, a: String, b: String| {
            if a != b {
                mismatches.push(ReplayMismatch {
                    row: i,
                    field,
                    recorded: a,
                    replayed: b,
                });
            }
        };
        diff("comparisons", row.comparisons.to_string(), fresh.comparisons.to_string());
        diff("rounds", row.rounds.to_string(), fresh.rounds.to_string());
        diff("realized_k", row.realized_k.to_string(), fresh.realized_k.to_string());
        diff("claimed_k", row.claimed_k.to_string(), fresh.claimed_k.to_string());
        diff("pass", row.pass.to_string(), fresh.pass.to_string());
    }
    Ok(mismatches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn tiny_spec(algorithm: Algorithm) -> ExperimentSpec {
        ExperimentSpec {
            algorithm,
            policy: PolicyKind::ReverseClose,
            policy_seed: 3,
            family: InstanceFamily::UniformSpread,
            sizes: vec![16, 32],
            trials: 3,
            master_seed: 99,
        }
    }

    #[test]
    fn algorithm_labels_round_trip() {
        let cases = [
            "tournament",
            "quicksort",
            "rsort",
            "rsort:r=2",
            "roundsort:d=9",
            "quickselect",
            "quickselect:rank=7",
            "rselect",
            "rselect:rank=7:r=3",
            "select:d=3",
            "select:rank=100:d=5",
            "select:rank=100:d=5:c=2",
        ];
        for s in cases {
            let a = Algorithm::parse(s).unwrap();
            assert_eq!(Algorithm::parse(&a.label()).unwrap(), a, "{s}");
        }
        assert_eq!(Algorithm::parse("select").unwrap().label(), "select:d=3");
        assert!(Algorithm::parse("bogosort").is_err());
        assert!(Algorithm::parse("rsort:x=1").is_err());
        assert!(Algorithm::parse("select:rank=").is_err());
    }

    #[test]
    fn cells_are_deterministic_and_order_stable() {
        let spec = tiny_spec(Algorithm::Tournament);
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        let coords: Vec<(usize, usize)> = a.iter().map(|r| (r.n, r.trial)).collect();
        assert_eq!(coords, vec![(16, 0), (16, 1), (16, 2), (32, 0), (32, 1), (32, 2)]);
        // Tournament is one round of all pairs whatever the adversary does.
        for row in &a {
            assert_eq!(row.comparisons, (row.n * (row.n - 1) / 2) as u64);
            assert_eq!(row.rounds, 1);
            assert!(row.pass);
        }
    }

    #[test]
    fn different_master_seeds_change_outcomes() {
        let mut spec = tiny_spec(Algorithm::NaiveQuicksort);
        spec.policy = PolicyKind::SeededRandom;
        spec.family = InstanceFamily::AllEqual;
        let a = run_experiment(&spec).unwrap();
        spec.master_seed = 100;
        let b = run_experiment(&spec).unwrap();
        assert_ne!(
            a.iter().map(|r| r.comparisons).collect::<Vec<_>>(),
            b.iter().map(|r| r.comparisons).collect::<Vec<_>>()
        );
    }

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let rows = run_experiment(&tiny_spec(Algorithm::RSort { theory_r: None })).unwrap();
        write_csv(&path, &rows).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(rows, back);

        let bytes_a = std::fs::read(&path).unwrap();
        write_csv(&path, &run_experiment(&tiny_spec(Algorithm::RSort { theory_r: None })).unwrap())
            .unwrap();
        let bytes_b = std::fs::read(&path).unwrap();
        assert_eq!(bytes_a, bytes_b, "same spec, same bytes");
    }

    #[test]
    fn plot_files_hold_per_size_aggregates() {
        let dir = tempdir().unwrap();
        let stem = dir.path().join("tourney");
        let rows = run_experiment(&tiny_spec(Algorithm::Tournament)).unwrap();
        write_plot_data(&stem, &rows).unwrap();
        let mean = std::fs::read_to_string(dir.path().join("tourney.mean.dat")).unwrap();
        let lines: Vec<&str> = mean.lines().collect();
        assert_eq!(lines, vec!["16 120.000000", "32 496.000000"]);
        let fail = std::fs::read_to_string(dir.path().join("tourney.fail.dat")).unwrap();
        assert_eq!(fail.lines().count(), 2);
        assert!(fail.lines().all(|l| l.ends_with(" 0.000000")));
        let p95 = std::fs::read_to_string(dir.path().join("tourney.p95.dat")).unwrap();
        assert_eq!(p95, "16 120\n32 496\n");
    }

    #[test]
    fn summaries_compute_nearest_rank_percentiles() {
        let mut rows = run_experiment(&tiny_spec(Algorithm::Tournament)).unwrap();
        for (i, row) in rows.iter_mut().enumerate() {
            row.comparisons = (i as u64 + 1) * 10;
        }
        // Sizes 16 and 32 hold trials {10,20,30} and {40,50,60}: the 95th
        // percentile by nearest rank of three samples is the third.
        let s = summarize(&rows);
        assert_eq!(s[0].p95_comparisons, 30);
        assert_eq!(s[1].p95_comparisons, 60);
        assert_eq!(s[0].mean_comparisons, 20.0);
    }

    #[test]
    fn scaling_fits_recover_planted_shapes() {
        let sizes = [256usize, 512, 1024, 2048, 4096, 8192];
        let nlogn: Vec<(usize, f64)> = sizes
            .iter()
            .map(|&n| (n, 3.0 * n as f64 * (n as f64).ln()))
            .collect();
        let fits = fit_scaling(&nlogn).unwrap();
        let f = &fits[0];
        assert_eq!(f.model, FitModel::NLogN);
        assert!((f.constant - 3.0).abs() < 1e-9);
        assert!(f.log_rmse < 1e-12);
        // The wrong fixed shape fits measurably worse.
        assert!(fits[1].log_rmse > 0.01);

        let power: Vec<(usize, f64)> = sizes
            .iter()
            .map(|&n| (n, 0.5 * (n as f64).powf(1.5)))
            .collect();
        let fits = fit_scaling(&power).unwrap();
        let f = &fits[2];
        assert_eq!(f.model, FitModel::PowerLaw);
        assert!((f.exponent.unwrap() - 1.5).abs() < 1e-9);
        assert!((f.constant - 0.5).abs() < 1e-9);

        assert!(matches!(
            fit_scaling(&[(16, 1.0), (32, 2.0)]),
            Err(Error::TooFewSizes(2))
        ));
    }

    #[test]
    fn recorded_rows_replay_without_mismatches() {
        let spec = ExperimentSpec {
            algorithm: Algorithm::SelectCombined {
                rank: None,
                d: 3,
                c: DESK_C,
            },
            policy: PolicyKind::CycleForcer,
            policy_seed: 11,
            family: InstanceFamily::Clustered {
                width: 1.0,
                count: 3,
            },
            sizes: vec![64],
            trials: 2,
            master_seed: 7,
        };
        let rows = run_experiment(&spec).unwrap();
        assert!(verify_rows(&rows).unwrap().is_empty());

        let mut corrupted = rows;
        corrupted[1].comparisons += 1;
        let bad = verify_rows(&corrupted).unwrap();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].row, 1);
        assert_eq!(bad[0].field, "comparisons");
    }

    #[test]
    fn every_algorithm_runs_a_small_grid() {
        for label in [
            "tournament",
            "quicksort",
            "rsort",
            "roundsort:d=3",
            "quickselect",
            "rselect",
            "select:d=3",
        ] {
            let spec = tiny_spec(Algorithm::parse(label).unwrap());
            let rows = run_experiment(&spec).unwrap();
            assert_eq!(rows.len(), 6, "{label}");
            for row in &rows {
                assert!(row.comparisons > 0, "{label}");
                assert!(row.rounds > 0, "{label}");
                assert!(row.realized_k.is_finite(), "{label}");
                assert_eq!(row.algorithm, Algorithm::parse(label).unwrap().label());
            }
        }
    }
}
