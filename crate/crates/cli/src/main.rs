//! `signrank`: qualitative analysis of tensors stored as JSON files.
//!
//! Every command prints one JSON report on standard output. Exit status is 0
//! on success, 1 when a predicate command is false under `--strict`, and 2 on
//! input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use signrank::combinatorics::MAX_L_ROWS;
use signrank::rational::{format_rational, parse_rational};
use signrank::rng::derived_rng;
use signrank::{
    bounds_report, condense, det_dim2, has_sign_left_inverse_order2, has_sign_right_inverse_order2,
    hyperdet_222, is_mr1, left_inverse_order2, multilinear_rank, rank_222_exact, right_inverse_order2,
    sample_member, shao_product, sign_pattern, sns_falsify_sample, sns_tensor_necessary, term_rank,
    BoundsOptions, CpOptions, DenseTensor, MagnitudeRange, Sign, SignTensor,
};

#[derive(Parser)]
#[command(name = "signrank", version, about = "Sign patterns, term rank and rank bounds for tensors")]
struct Cli {
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Exit with status 1 when a predicate command answers false.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct SearchArgs {
    /// Largest rank tried by the upper-bound search.
    #[arg(long)]
    r_max: Option<usize>,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Members sampled for the maximum-rank lower bound.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

impl SearchArgs {
    fn options(&self) -> BoundsOptions {
        BoundsOptions {
            r_max: self.r_max,
            samples: self.samples,
            cp: CpOptions { restarts: self.restarts, iterations: self.iterations, seed: self.seed, ..CpOptions::default() },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Subcommand)]
enum Command {
    /// Summary: sign counts, term rank, minimum-rank-one test, condensation,
    /// sign-nonsingularity necessary test and rank bounds.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Condensed sign pattern.
    Condense { file: PathBuf },
    /// Term rank with a maximum matching.
    Termrank { file: PathBuf },
    /// Whether every member of the sign class can have rank one (predicate).
    Mr1 { file: PathBuf },
    /// Exact determinant of a dimension-2 tensor.
    Det2 { file: PathBuf },
    /// Exact rank of a 2×2×2 tensor.
    Rank222 { file: PathBuf },
    /// Bounds on the minimum and maximum rank over the sign class.
    RankBounds {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Sign-nonsingularity: necessary test and a search for singular members
    /// (predicate).
    SnsCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Whether every member has an order-2 inverse on the given side, and the
    /// inverse of the tensor itself (predicate).
    SignInverse {
        file: PathBuf,
        #[arg(long, value_enum)]
        side: Side,
    },
    /// Product `A·B` of two cubical tensors of equal dimension.
    Product { a: PathBuf, b: PathBuf },
    /// The vector `A x^{k-1}`.
    Apply {
        file: PathBuf,
        /// Comma-separated rationals.
        #[arg(long)]
        x: String,
    },
    /// Writes random members of the sign class as tensor files.
    Sample {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A report plus, for predicate commands, the answer.
struct Report {
    body: Value,
    predicate: Option<bool>,
}

impl Report {
    fn plain(body: Value) -> Self {
        Self { body, predicate: None }
    }

    fn predicate(body: Value, answer: bool) -> Self {
        Self { body, predicate: Some(answer) }
    }
}

type CliResult<T> = Result<T, String>;

fn read_tensor(path: &Path) -> CliResult<DenseTensor> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    DenseTensor::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_pattern(path: &Path) -> CliResult<SignTensor> {
    read_tensor(path).map(|a| sign_pattern(&a))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports always serialize")
}

fn sign_counts(s: &SignTensor) -> Value {
    let total: usize = s.dims().iter().product();
    let plus = s.count(Sign::Plus);
    let minus = s.count(Sign::Minus);
    json!({ "positive": plus, "negative": minus, "zero": total - plus - minus })
}

fn run(command: &Command) -> CliResult<Report> {
    let err = |e: signrank::Error| e.to_string();
    Ok(match command {
        Command::Analyze { file, search } => {
            let s = read_pattern(file)?;
            let matching = term_rank(&s);
            let sns = match s.shape().cubical_dim() {
                Some(n) if n <= MAX_L_ROWS && s.order() >= 2 => to_value(&sns_tensor_necessary(&s).map_err(err)?),
                _ => Value::Null,
            };
            Report::plain(json!({
                "shape": s.dims(),
                "signs": sign_counts(&s),
                "term_rank": matching.size(),
                "witness": matching,
                "mr1": is_mr1(&s),
                "condensed_shape": condense(&s).dims(),
                "sns_necessary": sns,
                "bounds": to_value(&bounds_report(&s, &search.options())),
            }))
        }
        Command::Condense { file } => {
            let s = read_pattern(file)?;
            Report::plain(json!({ "condensed": to_value(&condense(&s)) }))
        }
        Command::Termrank { file } => {
            let matching = term_rank(&read_pattern(file)?);
            Report::plain(json!({ "term_rank": matching.size(), "witness": matching }))
        }
        Command::Mr1 { file } => {
            let answer = is_mr1(&read_pattern(file)?);
            Report::predicate(json!({ "mr1": answer }), answer)
        }
        Command::Det2 { file } => {
            let det = det_dim2(&read_tensor(file)?).map_err(err)?;
            Report::plain(json!({ "det": format_rational(&det) }))
        }
        Command::Rank222 { file } => {
            let a = read_tensor(file)?;
            let rank = rank_222_exact(&a).map_err(err)?;
            let delta = hyperdet_222(&a).map_err(err)?;
            Report::plain(json!({
                "rank": rank,
                "hyperdeterminant": format_rational(&delta),
                "multilinear_rank": multilinear_rank(&a),
            }))
        }
        Command::RankBounds { file, search } => {
            let s = read_pattern(file)?;
            Report::plain(to_value(&bounds_report(&s, &search.options())))
        }
        Command::SnsCheck { file, trials, seed } => {
            let s = read_pattern(file)?;
            let necessary = sns_tensor_necessary(&s).map_err(err)?;
            let falsification = if s.shape().cubical_dim() == Some(2) {
                Some(sns_falsify_sample(&s, *trials, *seed).map_err(err)?)
            } else {
                None
            };
            let singular = falsification.as_ref().is_some_and(|f| f.counterexample.is_some());
            let answer = necessary.overall && !singular;
            Report::predicate(
                json!({
                    "sns_possible": answer,
                    "necessary": to_value(&necessary),
                    "falsification": to_value(&falsification),
                }),
                answer,
            )
        }
        Command::SignInverse { file, side } => {
            let a = read_tensor(file)?;
            let s = sign_pattern(&a);
            let (name, decision, inverse) = match side {
                Side::Left => (
                    "left",
                    has_sign_left_inverse_order2(&s).map_err(err)?,
                    to_value(&left_inverse_order2(&a).map_err(err)?),
                ),
                Side::Right => (
                    "right",
                    has_sign_right_inverse_order2(&s).map_err(err)?,
                    to_value(&right_inverse_order2(&a).map_err(err)?),
                ),
            };
            let answer = decision.decision;
            Report::predicate(json!({ "side": name, "pattern": to_value(&decision), "inverse": inverse }), answer)
        }
        Command::Product { a, b } => {
            let p = shao_product(&read_tensor(a)?, &read_tensor(b)?).map_err(err)?;
            Report::plain(json!({ "product": to_value(&p) }))
        }
        Command::Apply { file, x } => {
            let a = read_tensor(file)?;
            let x = x
                .split(',')
                .map(|t| parse_rational(t.trim()))
                .collect::<signrank::Result<Vec<_>>>()
                .map_err(|e| format!("--x: {e}"))?;
            let y = a.apply_power(&x).map_err(err)?;
            Report::plain(json!({ "result": y.iter().map(format_rational).collect::<Vec<_>>() }))
        }
        Command::Sample { file, count, seed, out } => {
            let s = read_pattern(file)?;
            fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
            let range = MagnitudeRange::default();
            let width = count.saturating_sub(1).to_string().len();
            let mut files = Vec::with_capacity(*count);
            for t in 0..*count {
                let member = sample_member(&s, &mut derived_rng(*seed, t as u64), &range);
                let path = out.join(format!("member_{t:0width$}.json"));
                fs::write(&path, member.to_json() + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
                files.push(path.display().to_string());
            }
            Report::plain(json!({ "count": count, "seed": seed, "range": to_value(&range), "files": files }))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&report.body)
            } else {
                serde_json::to_string(&report.body)
            };
            println!("{}", text.expect("reports always serialize"));
            if cli.strict && report.predicate == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
