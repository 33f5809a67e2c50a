use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use aztec_core::enumerate::{enumerate_tilings, EnumerateError};
use aztec_core::measures::{
    all_patterns, biased_params, cylinder_prob, pushforward_exact, stationarity_stat_test, MeasureError,
};
use aztec_core::shuffle::{check_bias, generate, ShuffleError};
use aztec_core::tasep::{density_profile, run_wedge, TasepError};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::document::{DocumentError, TilingDocument};
use crate::render::{render_svg, ColorBy};
use crate::report::regions_report;
use crate::verify::{Suite, VerifyError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Document { path: PathBuf, source: DocumentError },
    #[error(transparent)]
    Shuffle(#[from] ShuffleError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    Tasep(#[from] TasepError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("--steps must be at least 1")]
    NoSteps,
    #[error("--bins must be at least 1")]
    NoBins,
}

#[derive(Debug, Parser)]
#[command(name = "aztec", version, about = "Random domino tilings of the Aztec diamond and the particle systems behind them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Statistical,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a tiling by iterated shuffling and write it as JSON.
    Generate {
        #[arg(long)]
        order: u32,
        #[arg(long, default_value_t = 0.5)]
        bias: f64,
        #[arg(long)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a tiling document as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ColorBy::Heading)]
        color_by: ColorBy,
    },
    /// Frozen-region sizes and boundary deviations as JSON.
    Regions {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Count all tilings of a small order.
    Enumerate {
        #[arg(long)]
        order: u32,
        /// Also list how many tilings have k horizontal pairs.
        #[arg(long)]
        histogram: bool,
    },
    /// Run the particle system from the wedge and write its binned density.
    Tasep {
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value_t = 0.5)]
        bias: f64,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the Markov measure of density d is stationary.
    Stationarity {
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0.5)]
        bias: f64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Longest pattern checked in exact mode.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 3000)]
        length: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 100)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named verification suite; exits non-zero on failure.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

fn read_document(path: &Path) -> Result<TilingDocument, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    TilingDocument::from_json(&text).map_err(|source| CliError::Document {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: &Option<PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => Ok(stdout.write_all(bytes)?),
    }
}

#[derive(Serialize)]
struct EnumerationSummary {
    order: u32,
    tilings: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizontal_pairs: Option<Vec<(usize, usize)>>,
}

#[derive(Serialize)]
struct ExactStationarity {
    d: f64,
    bias: f64,
    max_len: usize,
    patterns: usize,
    max_deviation: f64,
    passed: bool,
}

#[derive(Serialize)]
struct PatternRow<'a> {
    pattern: &'a str,
    before: f64,
    after: f64,
    theory: f64,
    z: f64,
}

#[derive(Serialize)]
struct StatisticalStationarity<'a> {
    d: f64,
    bias: f64,
    length: usize,
    steps: usize,
    replicas: usize,
    threshold: f64,
    max_abs_z: f64,
    passed: bool,
    patterns: Vec<PatternRow<'a>>,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

/// Runs one command. The returned flag is the pass/fail verdict for
/// commands that have one and `true` otherwise.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<bool, CliError> {
    match cli.command {
        Command::Generate { order, bias, seed, out } => {
            let t = generate(order, bias, seed)?;
            let doc = TilingDocument::new(&t, bias, Some(seed));
            emit(&out, doc.to_json().as_bytes(), stdout)?;
            Ok(true)
        }
        Command::Render { input, out, color_by } => {
            let doc = read_document(&input)?;
            let t = doc.to_tiling().map_err(|source| CliError::Document { path: input, source })?;
            emit(&out, render_svg(&t, color_by).as_bytes(), stdout)?;
            Ok(true)
        }
        Command::Regions { input } => {
            let doc = read_document(&input)?;
            let t = doc.to_tiling().map_err(|source| CliError::Document { path: input, source })?;
            stdout.write_all(to_json(&regions_report(&t, doc.bias)).as_bytes())?;
            Ok(true)
        }
        Command::Enumerate { order, histogram } => {
            let census = enumerate_tilings(order)?;
            let summary = EnumerationSummary {
                order,
                tilings: census.tilings.len(),
                horizontal_pairs: histogram.then(|| census.horizontal_histogram.into_iter().collect()),
            };
            stdout.write_all(to_json(&summary).as_bytes())?;
            Ok(true)
        }
        Command::Tasep { steps, bias, bins, seed, out } => {
            if steps == 0 {
                return Err(CliError::NoSteps);
            }
            if bins == 0 {
                return Err(CliError::NoBins);
            }
            check_bias(bias)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = run_wedge(steps, bias, &mut rng)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["u", "bin_width", "empirical_density", "f_theory"])?;
            for b in density_profile(&s, steps, bins) {
                w.write_record([
                    b.center.to_string(),
                    b.width.to_string(),
                    b.empirical.to_string(),
                    b.theory.to_string(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            emit(&out, &bytes, stdout)?;
            Ok(true)
        }
        Command::Stationarity {
            d,
            bias,
            mode,
            max_len,
            length,
            steps,
            replicas,
            seed,
        } => {
            let m = biased_params(bias, d)?;
            match mode {
                Mode::Exact => {
                    let patterns = all_patterns(max_len);
                    let mut worst: f64 = 0.0;
                    for b in &patterns {
                        worst = worst.max((pushforward_exact(&m, bias, b)? - cylinder_prob(&m, b)).abs());
                    }
                    let passed = worst <= 1e-12;
                    let rep = ExactStationarity {
                        d,
                        bias,
                        max_len,
                        patterns: patterns.len(),
                        max_deviation: worst,
                        passed,
                    };
                    stdout.write_all(to_json(&rep).as_bytes())?;
                    Ok(passed)
                }
                Mode::Statistical => {
                    let rep = stationarity_stat_test(&m, bias, length, steps, replicas, seed)?;
                    let passed = rep.passed();
                    let out = StatisticalStationarity {
                        d,
                        bias,
                        length,
                        steps,
                        replicas,
                        threshold: rep.threshold,
                        max_abs_z: rep.max_abs_z(),
                        passed,
                        patterns: rep
                            .patterns
                            .iter()
                            .map(|s| PatternRow {
                                pattern: &s.pattern,
                                before: s.before,
                                after: s.after,
                                theory: s.theory,
                                z: s.z,
                            })
                            .collect(),
                    };
                    stdout.write_all(to_json(&out).as_bytes())?;
                    Ok(passed)
                }
            }
        }
        Command::Verify { suite } => {
            let rep = suite.run()?;
            write!(stdout, "{rep}")?;
            Ok(rep.passed)
        }
    }
}
