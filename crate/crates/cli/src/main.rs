//! Benchmark driver for sorting and selection under adversarial
//! comparators. `run` sweeps a trial grid and records one CSV row per
//! trial, `fit` fits scaling models to the recorded comparison counts,
//! and `verify` replays every recorded row from its seed and checks that
//! the file matches what the code still produces.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use advsort::experiment::{
    self, cell_seed, run_cell_with_transcript, run_experiment, summarize, Algorithm,
    ExperimentSpec,
};
use advsort::{AdversaryPolicy, Error, InstanceFamily, Result};

#[derive(Parser)]
#[command(name = "advsort", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a trial grid and write one CSV row per trial, plus plot data.
    Run(Box<RunArgs>),
    /// Fit scaling models to per-size mean comparison counts from a rows CSV.
    Fit(FitArgs),
    /// Replay every row of a rows CSV from its recorded seed and compare.
    Verify(VerifyArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Algorithm label: tournament, quicksort, rsort[:r=R], roundsort:d=D,
    /// quickselect[:rank=K], rselect[:rank=K][:r=R], select[:rank=K][:d=D][:c=C]
    #[arg(long)]
    algo: Option<String>,

    /// Adversary policy: honest, seeded-random[:seed], reverse-close,
    /// cycle-forcer, pivot-starver
    #[arg(long)]
    policy: Option<String>,

    /// Instance family: uniform-spread, all-equal, clustered[:w=W][:k=K],
    /// gapped-bands, dense-at-rank:R
    #[arg(long)]
    family: Option<String>,

    /// Comma-separated instance sizes, e.g. 256,512,1024
    #[arg(long)]
    n: Option<String>,

    /// Trials per size
    #[arg(long)]
    trials: Option<usize>,

    /// Master seed; every cell seed derives from it
    #[arg(long)]
    seed: Option<u64>,

    /// Round budget, for roundsort and select
    #[arg(long)]
    d: Option<usize>,

    /// Target rank (1-based), for selection algorithms; median when absent
    #[arg(long)]
    rank: Option<usize>,

    /// Oversampling constant, for select
    #[arg(long)]
    c: Option<f64>,

    /// Use proof constants sized for failure rate n^-R instead of the
    /// small desk constants, for rsort and rselect
    #[arg(long, value_name = "R", num_args = 0..=1, default_missing_value = "2")]
    theory_constants: Option<f64>,

    /// Output CSV path; plot data lands next to it as {stem}.{mean,p95,fail}.dat
    #[arg(long)]
    out: Option<PathBuf>,

    /// key=value defaults file; command-line flags win over config entries
    #[arg(long)]
    config: Option<PathBuf>,

    /// Write the full query transcript as JSONL; needs a single-cell grid
    /// (one size, one trial)
    #[arg(long)]
    dump_transcript: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Rows CSV produced by `run`
    input: PathBuf,

    /// Also write the fit reports as JSON
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Rows CSV produced by `run`
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(*args),
        Command::Fit(args) => cmd_fit(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

// ── run ────────────────────────────────────────────────────────────────────

fn cmd_run(args: RunArgs) -> Result<()> {
    let args = merge_config(args)?;

    let algo_label = args.algo.as_deref().unwrap_or("rsort");
    let algorithm = apply_overrides(
        Algorithm::parse(algo_label)?,
        args.d,
        args.rank,
        args.c,
        args.theory_constants,
    )?;
    let policy = AdversaryPolicy::parse(args.policy.as_deref().unwrap_or("honest"))?;
    let family = InstanceFamily::parse(args.family.as_deref().unwrap_or("uniform-spread"))?;
    let sizes = parse_sizes(args.n.as_deref().unwrap_or("256"))?;
    let spec = ExperimentSpec {
        algorithm,
        policy: policy.kind(),
        policy_seed: policy.seed(),
        family,
        sizes,
        trials: args.trials.unwrap_or(10),
        master_seed: args.seed.unwrap_or(0),
    };
    let out = args.out.unwrap_or_else(|| PathBuf::from("rows.csv"));

    let rows = if let Some(transcript_path) = &args.dump_transcript {
        if spec.sizes.len() != 1 || spec.trials != 1 {
            return Err(Error::InvalidArgument {
                what: "--dump-transcript",
                detail: format!(
                    "needs a single-cell grid (one size, one trial), got {} sizes x {} trials",
                    spec.sizes.len(),
                    spec.trials
                ),
            });
        }
        let n = spec.sizes[0];
        let (row, transcript) = run_cell_with_transcript(
            &spec.algorithm,
            spec.policy,
            spec.policy_seed,
            &spec.family,
            n,
            0,
            cell_seed(spec.master_seed, n, 0),
        )?;
        transcript.write_jsonl(BufWriter::new(File::create(transcript_path)?))?;
        println!(
            "wrote {} transcript records to {}",
            transcript.records().len(),
            transcript_path.display()
        );
        vec![row]
    } else {
        run_experiment(&spec)?
    };

    experiment::write_csv(&out, &rows)?;
    let stem = out.with_extension("");
    experiment::write_plot_data(&stem, &rows)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    println!(
        "wrote plot data to {}.{{mean,p95,fail}}.dat",
        stem.display()
    );
    for s in summarize(&rows) {
        println!(
            "n={} trials={} mean-comparisons={:.1} p95={} mean-rounds={:.1} \
             max-realized-k={:.3} violations={}",
            s.n,
            s.trials,
            s.mean_comparisons,
            s.p95_comparisons,
            s.mean_rounds,
            s.max_realized_k,
            (s.fail_rate * s.trials as f64).round() as usize,
        );
    }
    Ok(())
}

/// Folds the dedicated parameter flags into the parsed algorithm label.
/// A flag that the chosen algorithm has no use for is an error, not a
/// silent no-op.
fn apply_overrides(
    mut algo: Algorithm,
    d: Option<usize>,
    rank: Option<usize>,
    c: Option<f64>,
    theory: Option<f64>,
) -> Result<Algorithm> {
    let misfit = |flag: &'static str, algo: &Algorithm| Error::InvalidArgument {
        what: flag,
        detail: format!("does not apply to algorithm '{}'", algo.label()),
    };
    if let Some(v) = d {
        match &mut algo {
            Algorithm::RoundSort { d } | Algorithm::SelectCombined { d, .. } => *d = v,
            _ => return Err(misfit("--d", &algo)),
        }
    }
    if let Some(v) = rank {
        match &mut algo {
            Algorithm::NaiveQuickselect { rank }
            | Algorithm::RSelect { rank, .. }
            | Algorithm::SelectCombined { rank, .. } => *rank = Some(v),
            _ => return Err(misfit("--rank", &algo)),
        }
    }
    if let Some(v) = c {
        match &mut algo {
            Algorithm::SelectCombined { c, .. } => *c = v,
            _ => return Err(misfit("--c", &algo)),
        }
    }
    if let Some(v) = theory {
        match &mut algo {
            Algorithm::RSort { theory_r } | Algorithm::RSelect { theory_r, .. } => {
                *theory_r = Some(v)
            }
            _ => return Err(misfit("--theory-constants", &algo)),
        }
    }
    Ok(algo)
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let sizes: Vec<usize> = s
        .split(',')
        .map(|p| {
            p.trim().parse().map_err(|_| Error::InvalidArgument {
                what: "--n",
                detail: format!("'{p}' is not a size"),
            })
        })
        .collect::<Result<_>>()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidArgument {
            what: "--n",
            detail: "sizes must be positive".into(),
        });
    }
    Ok(sizes)
}

/// Reads a flat `key=value` config file (`#` comments and blank lines
/// allowed) and fills in every flag the command line left unset.
fn merge_config(mut args: RunArgs) -> Result<RunArgs> {
    let Some(path) = &args.config else {
        return Ok(args);
    };
    let map = read_config(path)?;

    fn fill<T: std::str::FromStr>(
        slot: &mut Option<T>,
        key: &'static str,
        value: &str,
    ) -> Result<()> {
        let parsed = value.parse().map_err(|_| Error::InvalidArgument {
            what: key,
            detail: format!("config value '{value}' does not parse"),
        })?;
        if slot.is_none() {
            *slot = Some(parsed);
        }
        Ok(())
    }

    for (key, value) in &map {
        match key.as_str() {
            "algo" => fill(&mut args.algo, "algo", value)?,
            "policy" => fill(&mut args.policy, "policy", value)?,
            "family" => fill(&mut args.family, "family", value)?,
            "n" => fill(&mut args.n, "n", value)?,
            "trials" => fill(&mut args.trials, "trials", value)?,
            "seed" => fill(&mut args.seed, "seed", value)?,
            "d" => fill(&mut args.d, "d", value)?,
            "rank" => fill(&mut args.rank, "rank", value)?,
            "c" => fill(&mut args.c, "c", value)?,
            "theory-constants" => {
                fill(&mut args.theory_constants, "theory-constants", value)?
            }
            "out" => fill(&mut args.out, "out", value)?,
            "dump-transcript" => fill(&mut args.dump_transcript, "dump-transcript", value)?,
            other => {
                return Err(Error::InvalidArgument {
                    what: "config file",
                    detail: format!("unknown key '{other}'"),
                })
            }
        }
    }
    Ok(args)
}

fn read_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidArgument {
                what: "config file",
                detail: format!("line {} is not key=value: '{line}'", lineno + 1),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

// ── fit ────────────────────────────────────────────────────────────────────

fn cmd_fit(args: FitArgs) -> Result<()> {
    let rows = experiment::read_csv(&args.input)?;
    let points: Vec<(usize, f64)> = summarize(&rows)
        .into_iter()
        .map(|s| (s.n, s.mean_comparisons))
        .collect();
    let reports = experiment::fit_scaling(&points)?;

    println!("{:<12} {:>14} {:>10} {:>10}", "model", "constant", "exponent", "log-rmse");
    for r in &reports {
        let exp = r
            .exponent
            .map_or_else(|| "-".to_string(), |e| format!("{e:.4}"));
        println!(
            "{:<12} {:>14.6} {:>10} {:>10.6}",
            r.model.name(),
            r.constant,
            exp,
            r.log_rmse
        );
    }
    let best = reports
        .iter()
        .min_by(|a, b| a.log_rmse.total_cmp(&b.log_rmse))
        .expect("fit_scaling returns all three models");
    println!("best fit: {}", best.model.name());

    if let Some(out) = &args.out {
        serde_json::to_writer_pretty(BufWriter::new(File::create(out)?), &reports)?;
        println!("wrote fit report to {}", out.display());
    }
    Ok(())
}

// ── verify ─────────────────────────────────────────────────────────────────

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let rows = experiment::read_csv(&args.input)?;
    let mismatches = experiment::verify_rows(&rows)?;
    for m in &mismatches {
        println!(
            "row {} field {}: recorded {} replayed {}",
            m.row, m.field, m.recorded, m.replayed
        );
    }
    println!("replayed {} rows: {} mismatches", rows.len(), mismatches.len());
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidArgument {
            what: "rows file",
            detail: format!("{} of {} rows do not replay", mismatches.len(), rows.len()),
        })
    }
}
