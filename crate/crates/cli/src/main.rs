mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use splitkit::catalog4::{classify4, random_sweep4, sweep4};
use splitkit::collection::{targets_for_sizes, MAX_PROFILE_SETS};
use splitkit::criteria::{decide3, default_discrepancy_bound, dmono_check, Decision, ThreeSetShape};
use splitkit::stats::{chebyshev_bound, estimate_f, exact_f, monofold_shortfall, PrevalenceModel};
use splitkit::zoe::{reduce, restrict_solution, solve_zoe, ZoeInstance};
use splitkit::{discrepancy, is_p_splittable, solve_matrix, Proportion};
use thiserror::Error;

use crate::io::{format_incidence, parse_incidence, witness_line, Collection};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] splitkit::Error),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Parser)]
#[command(name = "splitkit", version, about = "Exact p-splittability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PArg {
    /// Proportion as NUM/DEN.
    #[arg(long, default_value = "1/2")]
    p: Proportion,
}

#[derive(Args)]
struct Jobs {
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct Seed {
    #[arg(long, env = "SPLITKIT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decide p-splittability of a collection (.im or .vp).
    Decide {
        #[command(flatten)]
        p: PArg,
        /// Try the monofold discrepancy criterion first (p = 1/2 only).
        #[arg(long)]
        dmono: bool,
        /// Constant K in the discrepancy bound ceil(K sqrt n).
        #[arg(long, default_value_t = 6.0)]
        disc_constant: f64,
        file: PathBuf,
    },
    /// Exact discrepancy with an optimal selection.
    Disc { file: PathBuf },
    /// Three-set decision with the criterion that settles it.
    Classify3 {
        #[command(flatten)]
        p: PArg,
        file: PathBuf,
    },
    /// Four-set classification at p = 1/2.
    Classify4 { file: PathBuf },
    /// Build the splitting instance for a zero-one equation system.
    ZoeReduce {
        #[command(flatten)]
        p: PArg,
        /// Append each row's target as a trailing column.
        #[arg(long)]
        rhs: bool,
        file: PathBuf,
    },
    /// Solve a zero-one system directly and through the reduction.
    ZoeCheck {
        #[command(flatten)]
        p: PArg,
        file: PathBuf,
    },
    /// Compare the four-set classifier with the exact solver.
    Sweep4 {
        #[arg(long, default_value_t = 2)]
        max_count: u64,
        /// Required for max-count 3 (about 10^9 profiles).
        #[arg(long)]
        long_run: bool,
        /// Check this many random profiles instead of all of them.
        #[arg(long)]
        random: Option<u64>,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Monte Carlo estimate of the splittable fraction f(n, k).
    EstimateF {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[command(flatten)]
        p: PArg,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Exact f(n, k) by enumeration (n <= 4, k <= 12).
    ExactF {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u64,
        #[command(flatten)]
        p: PArg,
    },
    /// Chebyshev bound on a single-set region falling below K sqrt n.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 6.0)]
        disc_constant: f64,
        /// Also sample the shortfall frequency.
        #[arg(long)]
        samples: Option<u64>,
        #[command(flatten)]
        seed: Seed,
    },
}

struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }

    fn decision(splittable: bool, text: String) -> Self {
        Outcome {
            text,
            code: if splittable { 0 } else { 1 },
        }
    }
}

fn with_jobs<T: Send>(jobs: &Jobs, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be positive".into())),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

fn verdict(splittable: bool) -> &'static str {
    if splittable {
        "SPLITTABLE"
    } else {
        "UNSPLITTABLE"
    }
}

/// Splitter search on the region profile, or column by column when there
/// are too many sets for a profile.
fn exact_decision(c: &Collection, p: Proportion) -> Result<Option<Vec<usize>>, CliError> {
    if let Collection::Matrix(m) = c {
        if m.rows() > MAX_PROFILE_SETS {
            let t = targets_for_sizes(&m.row_sums(), p);
            let out = solve_matrix(m, &t)?;
            return Ok(out.witness.map(|y| {
                y.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j + 1).collect()
            }));
        }
    }
    let v = c.profile()?;
    match is_p_splittable(&v, p).witness {
        Some(w) => Ok(Some(c.elements(&w)?)),
        None => Ok(None),
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Decide {
            p,
            dmono,
            disc_constant,
            file,
        } => {
            let c = Collection::read(&file)?;
            let mut lines = Vec::new();
            if dmono {
                if p.p != Proportion::HALF {
                    return Err(CliError::Usage("--dmono requires p = 1/2".into()));
                }
                let v = c.profile()?;
                let bound = default_discrepancy_bound(v.n(), disc_constant);
                let check = dmono_check(&v, bound)?;
                if let Some(w) = check.witness {
                    lines.push(verdict(true).to_string());
                    lines.push(format!("criterion: {}", check.reason));
                    lines.push(witness_line(&c.elements(&w)?));
                    return Ok(Outcome::decision(true, lines.join("\n") + "\n"));
                }
                lines.push(format!("criterion: {} (D = {bound}), using exact search", check.reason));
            }
            let found = exact_decision(&c, p.p)?;
            lines.insert(0, verdict(found.is_some()).to_string());
            if let Some(w) = &found {
                lines.push(witness_line(w));
            }
            Ok(Outcome::decision(found.is_some(), lines.join("\n") + "\n"))
        }
        Command::Disc { file } => {
            let c = Collection::read(&file)?;
            let (d, w) = discrepancy(&c.profile()?);
            Ok(Outcome::ok(format!(
                "discrepancy: {d}\n{}\n",
                witness_line(&c.elements(&w)?)
            )))
        }
        Command::Classify3 { p, file } => {
            let c = Collection::read(&file)?;
            let shape = ThreeSetShape::from_profile(&c.profile()?)?;
            let v = decide3(&shape, p.p);
            let ok = v.decision == Decision::Splittable;
            let mut text = format!("{}\ncriterion: {}\n", verdict(ok), v.reason);
            if let Some(w) = &v.witness {
                text += &witness_line(&c.elements(w)?);
                text.push('\n');
            }
            Ok(Outcome::decision(ok, text))
        }
        Command::Classify4 { file } => {
            let c = Collection::read(&file)?;
            let class = classify4(&c.profile()?)?;
            let ok = class.decision == Decision::Splittable;
            let ty = class.matched_type.map_or("none".to_string(), |t| t.to_string());
            let mut text = format!("{}\ntype: {ty}\n", verdict(ok));
            if ok {
                if let Some(w) = exact_decision(&c, Proportion::HALF)? {
                    text += &witness_line(&w);
                    text.push('\n');
                }
            }
            Ok(Outcome::decision(ok, text))
        }
        Command::ZoeReduce { p, rhs, file } => {
            let z = read_zoe(&file)?;
            let (m, targets) = reduce_any_p(&z, p.p)?;
            Ok(Outcome::ok(format_incidence(&m, rhs.then_some(&targets[..]))))
        }
        Command::ZoeCheck { p, file } => {
            let z = read_zoe(&file)?;
            let direct = solve_zoe(&z)?;
            let (m, targets) = reduce_any_p(&z, p.p)?;
            let t = splitkit::TargetSpec::points(&targets);
            let split = solve_matrix(&m, &t)?.witness;
            let bits = |x: &[bool]| x.iter().map(|&b| u8::from(b).to_string()).collect::<Vec<_>>().join(" ");
            let mut text = match &direct {
                Some(x) => format!("zoe: SOLVABLE x={}\n", bits(x)),
                None => "zoe: UNSOLVABLE\n".to_string(),
            };
            text += &format!("reduced: {}\n", verdict(split.is_some()));
            if let Some(y) = &split {
                // restriction is stated for p <= 1/2; above that the
                // complement of y solves the reflected instance
                let (p_low, y_low): (Proportion, Vec<bool>) = if p.p.is_at_most_half() {
                    (p.p, y.clone())
                } else {
                    (p.p.complement(), y.iter().map(|b| !b).collect())
                };
                let out = reduce(&z, p_low)?;
                let x = restrict_solution(&z, &out, &y_low)?;
                text += &format!("restricted: x={}\n", bits(&x));
            }
            let agree = direct.is_some() == split.is_some();
            text += &format!("agree: {agree}\n");
            Ok(Outcome {
                text,
                code: if agree { 0 } else { 1 },
            })
        }
        Command::Sweep4 {
            max_count,
            long_run,
            random,
            seed,
            jobs,
        } => {
            if max_count >= 3 && random.is_none() && !long_run {
                return Err(CliError::Usage(
                    "max-count 3 enumerates about 10^9 profiles; pass --long-run".into(),
                ));
            }
            let report = match random {
                Some(samples) => with_jobs(&jobs, || random_sweep4(samples, max_count, seed.seed))?,
                None => with_jobs(&jobs, || sweep4(max_count))??,
            };
            Ok(Outcome {
                code: if report.mismatches == 0 { 0 } else { 1 },
                text: report.to_string(),
            })
        }
        Command::EstimateF {
            n,
            k,
            samples,
            p,
            seed,
            jobs,
        } => {
            let model = PrevalenceModel::new(n, k)?;
            let est = with_jobs(&jobs, || estimate_f(&model, samples, seed.seed, p.p))?;
            Ok(Outcome::ok(est.to_string()))
        }
        Command::ExactF { n, k, p } => {
            let f = exact_f(&PrevalenceModel::new(n, k)?, p.p)?;
            Ok(Outcome::ok(format!("f={f}\nf_decimal={}\n", f.to_f64())))
        }
        Command::Bound {
            n,
            k,
            disc_constant,
            samples,
            seed,
        } => {
            let b = chebyshev_bound(n, k, disc_constant)?;
            let threshold = default_discrepancy_bound(n, disc_constant);
            let mut text = format!("bound={b}\nthreshold={threshold}\n");
            if let Some(s) = samples {
                let est = monofold_shortfall(&PrevalenceModel::new(n, k)?, threshold, s, seed.seed);
                text += &format!("shortfall={}\nstderr={}\nsamples={s}\nseed={}\n", est.f_hat, est.stderr, seed.seed);
            }
            Ok(Outcome::ok(text))
        }
    }
}

fn read_zoe(file: &PathBuf) -> Result<ZoeInstance, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Format(format!("{}: {e}", file.display())))?;
    Ok(ZoeInstance::new(parse_incidence(&text)?)?)
}

/// The reduced matrix and its row targets; for `p > 1/2` the construction
/// uses `1 - p` and each target becomes its complement in the row weight.
fn reduce_any_p(z: &ZoeInstance, p: Proportion) -> Result<(splitkit::IncidenceMatrix, Vec<u64>), CliError> {
    if p.is_at_most_half() {
        let out = reduce(z, p)?;
        Ok((out.m, out.rhs))
    } else {
        let out = reduce(z, p.complement())?;
        let targets = out.m.row_sums().iter().zip(&out.rhs).map(|(w, r)| w - r).collect();
        Ok((out.m, targets))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
