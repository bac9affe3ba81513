//! Command-line front end. `main` only parses arguments and maps errors to
//! exit codes: 0 on success, 1 on internal/output failures, 2 on usage and
//! validation errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::contingency::{build_discordant_matrix, DiscordantMatrix};
use crate::error::Error;
use crate::ingest::{parse_alignment_tsv, parse_alignment_xml, parse_label_list, write_alignment_tsv};
use crate::matcher::{match_labels, MetricKind};
use crate::model::{Alignment, ComparisonConfig, Correction, Mode, Perspective, TestKind, DEFAULT_BERGMANN_CAP};
use crate::report::{graph_from_report, to_json};
use crate::siggraph::{compare, emit_dot, rank_systems};

#[derive(Debug, Parser)]
#[command(name = "aligncmp", version, about = "Compare ontology alignment systems with McNemar's test")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run all pairwise tests, correct for multiple comparisons and write the
    /// significance graph (DOT) and a JSON report.
    Compare(CompareArgs),
    /// Write the matrix of discordant counts as TSV.
    Table(TableArgs),
    /// Match two label lists with a string measure and optimal assignment.
    Match(MatchArgs),
    /// Print the rank groups stored in a JSON report.
    Rank(RankArgs),
}

#[derive(Debug, Args)]
pub struct SystemsInput {
    /// Reference alignment (TSV or OAEI RDF/XML).
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// System alignment as NAME=FILE; repeat for every system.
    #[arg(long = "alignment", value_name = "NAME=FILE")]
    pub alignments: Vec<String>,
    /// Contingency perspective: ifp ignores false positives, cfp counts them.
    #[arg(long, default_value = "ifp")]
    pub perspective: Perspective,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: SystemsInput,
    /// Pre-built discordant matrix (TSV) instead of alignment files.
    #[arg(long, conflicts_with_all = ["reference", "alignments"])]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value = "midp")]
    pub test: TestKind,
    /// Defaults to bergmann in nxn mode and holm in nx1 mode.
    #[arg(long)]
    pub correction: Option<Correction>,
    #[arg(long, default_value = "nxn", value_parser = ["nxn", "nx1"])]
    pub mode: String,
    /// Baseline system for nx1 mode.
    #[arg(long)]
    pub baseline: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Largest number of systems for which Bergmann's procedure is run.
    #[arg(long, default_value_t = DEFAULT_BERGMANN_CAP)]
    pub bergmann_cap: usize,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub input: SystemsInput,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Source label list (id<TAB>label).
    #[arg(long)]
    pub source: PathBuf,
    /// Target label list (id<TAB>label).
    #[arg(long)]
    pub target: PathBuf,
    /// One of: equal, hamming, jaro, jarowinkler, levenshtein, ngram,
    /// needlemanwunsch, smoa, substring.
    #[arg(long)]
    pub metric: MetricKind,
    /// Minimum similarity of an emitted correspondence.
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    /// System name recorded for the alignment; defaults to the metric name.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// JSON report written by `compare --report`.
    pub report: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: Error },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Domain(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Write { .. } => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut dyn Write, path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => out.write_all(bytes).map_err(|source| CliError::Write {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

/// Reads an alignment file, detecting RDF/XML by a leading `<`.
pub fn load_alignment(path: &Path, system_name: &str) -> CliResult<Alignment> {
    let bytes = read(path)?;
    let first = bytes
        .iter()
        .copied()
        .skip_while(|b| b.is_ascii_whitespace() || matches!(b, 0xEF | 0xBB | 0xBF))
        .next();
    let parsed = if first == Some(b'<') {
        parse_alignment_xml(&bytes, system_name)
    } else {
        parse_alignment_tsv(&bytes, system_name)
    };
    parsed.map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn load_systems(input: &SystemsInput) -> CliResult<DiscordantMatrix> {
    let reference = input
        .reference
        .as_deref()
        .ok_or_else(|| CliError::Usage("--reference is required (or --matrix for compare)".into()))?;
    if input.alignments.len() < 2 {
        return Err(CliError::Usage(format!(
            "at least two --alignment NAME=FILE arguments are required, got {}",
            input.alignments.len()
        )));
    }
    let r = load_alignment(reference, "reference")?;
    let systems = input
        .alignments
        .iter()
        .map(|arg| {
            let (name, file) = arg
                .split_once('=')
                .filter(|(n, f)| !n.trim().is_empty() && !f.is_empty())
                .ok_or_else(|| CliError::Usage(format!("--alignment expects NAME=FILE, got {arg:?}")))?;
            load_alignment(Path::new(file), name.trim())
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(build_discordant_matrix(&r, &systems, input.perspective)?)
}

pub fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> CliResult<()> {
    let mode = match (args.mode.as_str(), &args.baseline) {
        ("nx1", Some(b)) => Mode::Nx1 { baseline: b.clone() },
        ("nx1", None) => return Err(CliError::Usage("--mode nx1 requires --baseline".into())),
        (_, Some(_)) => return Err(CliError::Usage("--baseline is only valid with --mode nx1".into())),
        _ => Mode::NxN,
    };
    let correction = args.correction.unwrap_or(match mode {
        Mode::NxN => Correction::Bergmann,
        Mode::Nx1 { .. } => Correction::Holm,
    });
    let cfg = ComparisonConfig {
        perspective: args.input.perspective,
        test: args.test,
        correction,
        mode,
        alpha: args.alpha,
        bergmann_cap: args.bergmann_cap,
    };
    // fail on configuration errors before touching any input file
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidAlpha(cfg.alpha).into());
    }
    if cfg.correction.requires_all_pairs() && cfg.mode != Mode::NxN {
        return Err(Error::ModeMismatch {
            correction: cfg.correction.name(),
            required: "nxn",
        }
        .into());
    }

    let matrix = match &args.matrix {
        Some(path) => DiscordantMatrix::from_tsv(&read(path)?, cfg.perspective).map_err(|source| CliError::Input {
            path: path.clone(),
            source,
        })?,
        None => load_systems(&args.input)?,
    };
    let comparison = compare(&matrix, &cfg)?;
    if let Some(p) = &args.dot {
        write_file(p, emit_dot(&comparison.graph).as_bytes())?;
    }
    if let Some(p) = &args.report {
        write_file(p, to_json(&comparison).as_bytes())?;
    }
    let rows = rank_systems(&comparison.graph).rows();
    emit(out, None, format!("{}\n", rows.join("\n")).as_bytes())
}

pub fn cmd_table(args: &TableArgs, out: &mut dyn Write) -> CliResult<()> {
    let matrix = load_systems(&args.input)?;
    emit(out, args.out.as_deref(), matrix.to_tsv().as_bytes())
}

pub fn cmd_match(args: &MatchArgs, out: &mut dyn Write) -> CliResult<()> {
    let load = |path: &Path| {
        parse_label_list(&read(path)?).map_err(|source| CliError::Input {
            path: path.to_path_buf(),
            source,
        })
    };
    let src = load(&args.source)?;
    let tgt = load(&args.target)?;
    let name = args.name.clone().unwrap_or_else(|| args.metric.name().to_string());
    let alignment = match_labels(&src, &tgt, args.metric, args.threshold, &name)?;
    emit(out, args.out.as_deref(), &write_alignment_tsv(&alignment))
}

pub fn cmd_rank(args: &RankArgs, out: &mut dyn Write) -> CliResult<()> {
    let graph = graph_from_report(&read(&args.report)?).map_err(|source| CliError::Input {
        path: args.report.clone(),
        source,
    })?;
    let rows = rank_systems(&graph).rows();
    emit(out, None, format!("{}\n", rows.join("\n")).as_bytes())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Compare(a) => cmd_compare(a, out),
        Command::Table(a) => cmd_table(a, out),
        Command::Match(a) => cmd_match(a, out),
        Command::Rank(a) => cmd_rank(a, out),
    }
}
