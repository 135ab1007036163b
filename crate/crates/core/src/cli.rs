//! Command-line front end. [`run`] holds all the logic so it can be driven
//! from tests; the binary only forwards `std::env::args`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{parse_fluent_text, parse_queries, parse_time_text, Corpus};
use crate::eval::{emit_report, read_answers, run_eval, REPORT_FILE};
use crate::hazard::{FluentPattern, DEFAULT_HORIZON};
use crate::learner::{build_person_period, export_spec, fit, read_episodes, FitConfig};
use crate::projector::{Mode, Projector, DEFAULT_ALPHA};
use crate::sexpr::parse_one;
use crate::world::{generate, WorldConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tproj", version, about = "Temporal projection of fluents over a time-indexed knowledge base")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Knowledge-base file (repeatable).
    #[arg(long, global = true)]
    pub kb: Vec<PathBuf>,
    /// Event file (repeatable).
    #[arg(long, global = true)]
    pub events: Vec<PathBuf>,
    /// Hazard file (repeatable).
    #[arg(long, global = true)]
    pub hazards: Vec<PathBuf>,
    /// Persistence threshold, strictly between 0 and 1.
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Maximum number of periods searched by hazard projection.
    #[arg(long, global = true, default_value_t = DEFAULT_HORIZON)]
    pub horizon: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate the input files, then print a summary.
    Load,
    /// Answer whether a fluent holds over a time.
    Ask {
        /// Fluent, e.g. "(isa Fred Married)".
        fluent: String,
        /// Time form: a date, a year, (year Y) or (interval A B).
        #[arg(long)]
        at: String,
        #[arg(long, default_value = "m2")]
        mode: Mode,
    },
    /// Print the projection procedure's result and trace.
    Project {
        fluent: String,
        #[arg(long)]
        at: String,
    },
    /// Probability that a fluent still holds at a date.
    Prob {
        fluent: String,
        #[arg(long)]
        at: String,
    },
    /// Fit a hazard spec from episode data.
    Learn {
        /// Episode CSV file.
        #[arg(long)]
        episodes: PathBuf,
        /// Pattern the fitted spec applies to, e.g. "(isa ?x Married)".
        #[arg(long)]
        pattern: String,
        /// Period length in days.
        #[arg(long, default_value_t = 365)]
        period: i64,
        /// Covariate pattern for each covariate index, in order.
        #[arg(long = "covariate")]
        covariates: Vec<String>,
        /// Give every period its own intercept even without events.
        #[arg(long)]
        no_pool: bool,
        /// Export even if the fit did not converge.
        #[arg(long)]
        force: bool,
        /// Hazard file to write; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic world with ground truth and queries.
    GenWorld {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        individuals: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0.5)]
        event_density: f64,
        #[arg(long, default_value_t = 200)]
        queries_per_set: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a query file against an answer key in each mode.
    Eval {
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        answers: PathBuf,
        /// Modes to run, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "m1,m2")]
        modes: Vec<Mode>,
        /// Directory for report.csv, verdicts.csv and curves.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn data(msg: impl ToString) -> Failure {
    Failure::Data(msg.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn load_corpus(c: &Common) -> Result<Corpus, Failure> {
    let paths: Vec<&PathBuf> = c.kb.iter().chain(&c.events).chain(&c.hazards).collect();
    Corpus::from_files(&paths).map_err(data)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let c = &cli.common;
    if !(c.alpha > 0.0 && c.alpha < 1.0) {
        return Err(usage(format!("--alpha must lie strictly between 0 and 1, got {}", c.alpha)));
    }
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(data);
    match &cli.command {
        Command::Load => {
            let corpus = load_corpus(c)?;
            w(
                out,
                format!(
                    "assertions={} events={} hazard_specs={} fixed_duration_rules={}",
                    corpus.kb.assertions().len(),
                    corpus.events.events().len(),
                    corpus.hazards.specs().count(),
                    corpus.hazards.fixed_rules().len()
                ),
            )
        }
        Command::Ask { fluent, at, mode } => {
            let fluent = parse_fluent_text(fluent).map_err(usage)?;
            let at = parse_time_text(at).map_err(usage)?;
            let corpus = load_corpus(c)?;
            corpus.check_symbols(&fluent).map_err(data)?;
            let p = Projector::new(&corpus).with_horizon(c.horizon);
            w(out, p.answer(&fluent, &at, *mode, c.alpha).to_string())
        }
        Command::Project { fluent, at } => {
            let fluent = parse_fluent_text(fluent).map_err(usage)?;
            let at = parse_time_text(at).map_err(usage)?;
            let corpus = load_corpus(c)?;
            let p = Projector::new(&corpus).with_horizon(c.horizon);
            let r = p.temporally_project(&fluent, &at, c.alpha).map_err(data)?;
            w(out, r.to_string())?;
            for line in &r.trace {
                w(out, format!("  {line}"))?;
            }
            Ok(())
        }
        Command::Prob { fluent, at } => {
            let fluent = parse_fluent_text(fluent).map_err(usage)?;
            let at = parse_time_text(at).map_err(usage)?;
            if at.start() != at.end() {
                return Err(usage("--at must be a single date for prob"));
            }
            let corpus = load_corpus(c)?;
            let p = Projector::new(&corpus).with_horizon(c.horizon);
            let v = p.prob_holds(&fluent, at.start()).map_err(data)?;
            w(out, format!("{v:.6}"))
        }
        Command::Learn {
            episodes,
            pattern,
            period,
            covariates,
            no_pool,
            force,
            out: path,
        } => {
            let parse_pattern = |s: &str| -> Result<FluentPattern, Failure> {
                let e = parse_one(s).map_err(|e| usage(e.message))?;
                FluentPattern::from_sexpr(&e).map_err(|e| usage(e.to_string()))
            };
            let pattern = parse_pattern(pattern)?;
            let covs = covariates.iter().map(|s| parse_pattern(s)).collect::<Result<Vec<_>, _>>()?;
            if *period < 1 {
                return Err(usage("--period must be at least one day"));
            }
            let text = read(episodes)?;
            let eps = read_episodes(text.as_bytes(), &episodes.display().to_string()).map_err(data)?;
            let records = build_person_period(&eps, *period).map_err(data)?;
            let cfg = FitConfig {
                pool_sparse: !no_pool,
                ..FitConfig::default()
            };
            let result = fit(&records, &cfg).map_err(data)?;
            let mut covs = covs;
            if covs.len() < result.beta.len() {
                return Err(usage(format!(
                    "episodes use {} covariates but only {} --covariate patterns were given",
                    result.beta.len(),
                    covs.len()
                )));
            }
            covs.truncate(result.beta.len());
            let spec = export_spec(&result, pattern, *period, &covs, *force).map_err(data)?;
            w(out, result.to_string().trim_end().to_string())?;
            match path {
                Some(p) => std::fs::write(p, format!("{spec}\n")).map_err(|e| data(format!("{}: {e}", p.display()))),
                None => w(out, spec.to_string()),
            }
        }
        Command::GenWorld {
            seed,
            individuals,
            density,
            event_density,
            queries_per_set,
            out: dir,
        } => {
            let cfg = WorldConfig {
                seed: *seed,
                n_individuals: *individuals,
                observation_density: *density,
                event_density: *event_density,
                queries_per_set: *queries_per_set,
                ..WorldConfig::default()
            };
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let world = generate(&cfg).map_err(data)?;
            world.write_dir(dir).map_err(data)?;
            w(
                out,
                format!(
                    "wrote {} ({} individuals, {} truth intervals, {} queries)",
                    dir.display(),
                    world.lifespans.len(),
                    world.truth.len(),
                    world.queries.len()
                ),
            )
        }
        Command::Eval {
            queries,
            answers,
            modes,
            out: dir,
        } => {
            let corpus = load_corpus(c)?;
            let qs = parse_queries(&read(queries)?, &queries.display().to_string()).map_err(data)?;
            let key = read_answers(&read(answers)?, &answers.display().to_string()).map_err(data)?;
            let report = run_eval(&corpus, &qs, &key, modes, c.alpha).map_err(data)?;
            if !report.invalid.is_empty() {
                w(out, format!("skipped {} queries with unknown symbols", report.invalid.len()))?;
            }
            if let Some(d) = dir {
                emit_report(&report, &corpus, d).map_err(data)?;
                w(out, format!("wrote {}", d.join(REPORT_FILE).display()))?;
            }
            out.write_all(report.report_csv().as_bytes()).map_err(data)
        }
    }
}
