//! `lkcat` command line.
//!
//! Exit codes: `0` success or validation pass, `1` validation failure (report
//! on stdout), `2` input or parse error (message on stderr).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::front::{emit_svg, FrontDiagram};
use crate::mutation::{apply_braid_word, mutation_period, parse_braid_word, EulerLattice, ExceptionalSequence, SODPair};
use crate::puiseux::FormalType;
use crate::report::ValidationReport;
use crate::scalar::parse_rational;
use crate::schober::{decategorify_schober, validate_irregular_gluing, IrregularGluing, StokesSchoberShadow};
use crate::sheafknot::{monodromy, validate_front_sheaf, FrontSheaf};
use crate::sheafline::{validate_line, LineSheaf};

pub const DEFAULT_EPSILON: &str = "1/10";
pub const SVG_SAMPLES: usize = 720;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Json(PathBuf, serde_json::Error),
    #[error("{0}")]
    Input(String),
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "lkcat", version, about = "Legendrian fronts, sheaves on them, and mutation calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Legendrian fronts of formal types.
    #[command(subcommand)]
    Front(FrontCmd),
    /// Sheaves on lines and fronts.
    #[command(subcommand)]
    Sheaf(SheafCmd),
    /// Mutations of exceptional sequences and decompositions.
    #[command(subcommand)]
    Mutate(MutateCmd),
    /// Decategorified schobers and irregular gluing.
    #[command(subcommand)]
    Schober(SchoberCmd),
    /// Bundled examples.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Subcommand, Debug)]
enum FrontCmd {
    /// Build the front of a formal type.
    Build {
        /// Formal type JSON, or a JSON list of class expressions.
        #[arg(long = "type")]
        formal_type: PathBuf,
        #[arg(long, default_value = DEFAULT_EPSILON)]
        epsilon: String,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SheafCmd {
    /// Validate a sheaf on a line.
    ValidateLine {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Validate a sheaf on a front.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Monodromy along a front component.
    Monodromy {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, conflicts_with = "strand")]
        component: Option<usize>,
        /// Use the component containing this strand.
        #[arg(long)]
        strand: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum MutateCmd {
    /// Apply a braid word to an exceptional sequence.
    Act {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Period of left block mutation on a two-block decomposition.
    Period {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SchoberCmd {
    /// Turn per-sector flags on a front into a front sheaf.
    Decategorify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        front: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Validate irregular gluing data.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum DemoCmd {
    /// The Airy front; writes its SVG.
    Airy {
        #[arg(long, default_value = "airy.svg")]
        svg: PathBuf,
    },
    /// The front of {z^-N, i·z^-N} with its decomposition shadow.
    Spherical {
        n: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

/// Run with `args[0]` the program name; returns the exit code.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            return if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = write!(stdout, "{e}");
                0
            } else {
                let _ = write!(stderr, "{e}");
                2
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => {
            let _ = stdout.write_all(out.text.as_bytes());
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn json<T: Serialize>(value: &T) -> Self {
        Output {
            text: line(value),
            code: 0,
        }
    }

    fn report(r: &ValidationReport) -> Self {
        Output {
            text: line(r),
            code: if r.pass { 0 } else { 1 },
        }
    }
}

fn line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Json(path.to_path_buf(), e))
}

fn decode<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_value(read_json(path)?).map_err(|e| CliError::Json(path.to_path_buf(), e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// JSON to `--out` (printing nothing) or to stdout.
fn emit<T: Serialize>(out: &OutArgs, value: &T) -> Result<Output, CliError> {
    match &out.out {
        Some(p) => {
            write_file(p, &line(value))?;
            Ok(Output { text: String::new(), code: 0 })
        }
        None => Ok(Output::json(value)),
    }
}

fn epsilon(text: &str) -> Result<BigRational, CliError> {
    parse_rational(text).map_err(input)
}

fn formal_type(path: &Path) -> Result<FormalType, CliError> {
    let value = read_json(path)?;
    if let Some(items) = value.as_array() {
        let exprs: Vec<&str> = items
            .iter()
            .map(|v| v.as_str().ok_or_else(|| CliError::Input("class list entries must be strings".into())))
            .collect::<Result<_, _>>()?;
        return FormalType::parse_all(&exprs).map_err(input);
    }
    serde_json::from_value(value).map_err(|e| CliError::Json(path.to_path_buf(), e))
}

fn dispatch(cmd: Command) -> Result<Output, CliError> {
    match cmd {
        Command::Front(FrontCmd::Build {
            formal_type: t,
            epsilon: e,
            out,
            svg,
        }) => {
            let eps = epsilon(&e)?;
            let formal = formal_type(&t)?;
            let front = FrontDiagram::build(&formal, &eps).map_err(input)?;
            if let Some(p) = svg {
                write_file(&p, &emit_svg(&front, &eps, SVG_SAMPLES))?;
            }
            emit(&out, &front)
        }
        Command::Sheaf(SheafCmd::ValidateLine { input: p }) => {
            let s: LineSheaf = decode(&p)?;
            Ok(Output::report(&validate_line(&s.points(), &s).map_err(input)?))
        }
        Command::Sheaf(SheafCmd::Validate { input: p }) => {
            let s = FrontSheaf::read(&p).map_err(input)?;
            Ok(Output::report(&validate_front_sheaf(&s)))
        }
        Command::Sheaf(SheafCmd::Monodromy {
            input: p,
            component,
            strand,
        }) => {
            let s = FrontSheaf::read(&p).map_err(input)?;
            let report = validate_front_sheaf(&s);
            if !report.pass {
                return Ok(Output::report(&report));
            }
            let component = match (component, strand) {
                (_, Some(st)) => s
                    .front()
                    .component_of(st)
                    .ok_or_else(|| CliError::Input(format!("no strand {st}")))?,
                (c, None) => c.unwrap_or(0),
            };
            let m = monodromy(&s, component).map_err(input)?;
            let charpoly: Vec<String> = m.charpoly().map_err(input)?.iter().map(|c| c.to_string()).collect();
            Ok(Output::json(&json!({
                "component": component,
                "monodromy": m,
                "charpoly": charpoly,
            })))
        }
        Command::Mutate(MutateCmd::Act { input: p, word, out }) => {
            let seq: ExceptionalSequence = decode(&p)?;
            let word = parse_braid_word(&word).map_err(input)?;
            emit(&out, &apply_braid_word(&seq, &word).map_err(input)?)
        }
        Command::Mutate(MutateCmd::Period { input: p, max }) => {
            let pair: SODPair = decode(&p)?;
            let period = mutation_period(&pair, max).map_err(input)?;
            Ok(Output::json(&json!({ "period": period })))
        }
        Command::Schober(SchoberCmd::Decategorify { input: p, front, out }) => {
            let flags = read_json(&p)?;
            let front: FrontDiagram = decode(&front)?;
            let shadow = StokesSchoberShadow::from_value(front, flags).map_err(input)?;
            let sheaf = decategorify_schober(&shadow).map_err(input)?;
            let report = validate_front_sheaf(&sheaf);
            if !report.pass {
                return Ok(Output::report(&report));
            }
            emit(&out, &sheaf)
        }
        Command::Schober(SchoberCmd::Validate { input: p }) => {
            let gd = IrregularGluing::read(&p).map_err(input)?;
            Ok(Output::report(&validate_irregular_gluing(&gd).map_err(input)?))
        }
        Command::Demo(DemoCmd::Airy { svg }) => {
            let (front, eps) = airy_front()?;
            write_file(&svg, &emit_svg(&front, &eps, SVG_SAMPLES))?;
            Ok(Output::json(&FrontCounts::of(&front)))
        }
        Command::Demo(DemoCmd::Spherical { n, svg }) => {
            let (front, eps) = spherical_front(n)?;
            if let Some(p) = svg {
                write_file(&p, &emit_svg(&front, &eps, SVG_SAMPLES))?;
            }
            Ok(Output::json(&spherical_report(front)?))
        }
    }
}

#[derive(Serialize)]
struct FrontCounts {
    strands: usize,
    crossings: usize,
    components: usize,
}

impl FrontCounts {
    fn of(front: &FrontDiagram) -> Self {
        FrontCounts {
            strands: front.strands(),
            crossings: front.crossing_count(),
            components: front.components().len(),
        }
    }
}

#[derive(Serialize)]
struct ShadowSummary {
    gram: [[i64; 2]; 2],
    period: Option<usize>,
    valid: bool,
}

#[derive(Serialize)]
struct SphericalReport {
    #[serde(flatten)]
    counts: FrontCounts,
    shadow: ShadowSummary,
}

pub fn demo_epsilon() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(10))
}

/// The front of `{±(2/3)·z^(-3/2)}`.
pub fn airy_front() -> Result<(FrontDiagram, BigRational), CliError> {
    let t = FormalType::parse_all(&["(2/3)*z^(-3/2)", "(-2/3)*z^(-3/2)"]).map_err(input)?;
    let eps = demo_epsilon();
    Ok((FrontDiagram::build(&t, &eps).map_err(input)?, eps))
}

/// The front of `{z^(-N), i·z^(-N)}`.
pub fn spherical_front(n: usize) -> Result<(FrontDiagram, BigRational), CliError> {
    let a = format!("z^(-{n})");
    let b = format!("i*z^(-{n})");
    let t = FormalType::parse_all(&[a.as_str(), b.as_str()]).map_err(input)?;
    let eps = demo_epsilon();
    Ok((FrontDiagram::build(&t, &eps).map_err(input)?, eps))
}

/// Front counts with the period of the orthogonal two-line decomposition
/// and whether its flags close up around the front.
fn spherical_report(front: FrontDiagram) -> Result<SphericalReport, CliError> {
    let lattice = EulerLattice::from_ints(&[&[1, 0], &[0, 1]]).map_err(input)?;
    let (e0, e1) = (lattice.basis_vector(0), lattice.basis_vector(1));
    let pair = SODPair::new(lattice.clone(), vec![e0.clone()], vec![e1.clone()]).map_err(input)?;
    let period = mutation_period(&pair, 100).map_err(input)?;
    let closes = StokesSchoberShadow::generate(front.clone(), lattice, vec![vec![e0], vec![e1]])
        .ok()
        .and_then(|s| decategorify_schober(&s).ok())
        .map(|s| validate_front_sheaf(&s).pass)
        .unwrap_or(false);
    Ok(SphericalReport {
        counts: FrontCounts::of(&front),
        shadow: ShadowSummary {
            gram: [[1, 0], [0, 1]],
            period,
            valid: closes,
        },
    })
}
