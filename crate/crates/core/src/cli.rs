//! Command-line surface: argument types, subcommand execution, run manifests
//! and replay.
//!
//! Every subcommand computes all of its artifacts in memory first. With
//! `--out DIR` they are then written atomically (temp file + rename) next to a
//! `manifest.json` that records the command and the SHA-256 of every input
//! and output, so `replay --manifest DIR/manifest.json` can re-run it and
//! check the outputs byte for byte. Without `--out` the primary artifact goes
//! to stdout and nothing is written.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{
    parse_actions, read_config_file, recode_traits, validate_corpus, write_corpus, ActionRecord,
    ColumnConfig, RecodeMap,
};
use crate::distribution::{render_bars, trait_voice_distribution, write_distribution_csv};
use crate::error::{Error, Result};
use crate::failures::{mine_failures, multi_seed_eval, sweep_k, FailureReport};
use crate::featurization::{build_schema, build_table, ContingencyTable};
use crate::knn::{
    classify_split, make_split, normalize_table, write_predictions, KnnConfig, PredictionOutcome,
    DEFAULT_TRAIN_FRACTION,
};
use crate::report::{parse_report_json, render_report, OutputFormat};
use crate::synth::{generate, SynthSpec};

pub const MANIFEST_NAME: &str = "manifest.json";
const TOOL: &str = "failure-sieve";

#[derive(Debug, Parser)]
#[command(
    name = "failure-sieve",
    version,
    about = "Rank a kNN classifier's mispredictions as cases for close reading"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for classification, sweep and eval (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Parse and recode interaction records into the canonical corpus file.
    Ingest(IngestArgs),
    /// Build the verb x trait-value contingency table.
    Table(TableArgs),
    /// Classify one seeded test split and write per-verb predictions.
    Classify(ClassifyArgs),
    /// Classify one split and report its false actives and false passives.
    Failures(FailuresArgs),
    /// Mean accuracy per k over many seeds.
    Sweep(SweepArgs),
    /// One configuration over many seeds, with per-verb failure rates.
    Eval(EvalArgs),
    /// Active/passive usage per trait value.
    Dist(DistArgs),
    /// Generate a synthetic corpus with planted ambiguous verbs.
    Synth(SynthArgs),
    /// Re-render a JSON failure report in another format.
    Report(ReportArgs),
    /// Re-run a recorded command and check its outputs byte for byte.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InputArgs {
    /// Long-format interaction file(s); repeat or list several.
    #[arg(long = "input", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// TOML mapping of canonical fields to source column names.
    #[arg(long)]
    pub columns: Option<PathBuf>,
    /// TOML recode map, one table per trait category.
    #[arg(long)]
    pub recode: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Fraction of verb rows used for training.
    #[arg(long = "split", default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TableArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub split: SplitArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FailuresArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub split: SplitArgs,
    /// Rows per list in the Markdown report.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Md)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// `start:end:step` (inclusive) or a comma list.
    #[arg(long = "k-range", default_value = "1:21:2")]
    pub k_range: KRange,
    /// `a..b` (inclusive) and/or comma-separated seeds.
    #[arg(long, default_value = "1..100")]
    pub seeds: SeedList,
    #[arg(long = "split", default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "1..100")]
    pub seeds: SeedList,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long = "split", default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
    /// Most used test verbs left out of `accuracy_excluding_top`.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DistFormat {
    #[default]
    Csv,
    Md,
    Json,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DistArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Add one row per genre next to the `All` rows.
    #[arg(long)]
    pub by_genre: bool,
    #[arg(long, value_enum, default_value_t = DistFormat::Csv)]
    pub format: DistFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    /// TOML synthetic spec; defaults apply to omitted keys.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Overrides the seed in the synth spec.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    /// JSON report written by `failures --format json`.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Md)]
    pub format: OutputFormat,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Also write the replayed artifacts here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedList(pub Vec<u64>);

impl FromStr for SeedList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut seeds = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, b)) = part.split_once("..") {
                let b = b.strip_prefix('=').unwrap_or(b);
                let (a, b): (u64, u64) = (parse_num(a)?, parse_num(b)?);
                if a > b {
                    return Err(format!("empty seed range `{part}`"));
                }
                seeds.extend(a..=b);
            } else {
                seeds.push(parse_num(part)?);
            }
        }
        if seeds.is_empty() {
            return Err("no seeds given".into());
        }
        Ok(SeedList(seeds))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KRange(pub Vec<usize>);

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let ks = match parts.as_slice() {
            [start, end, step] => {
                let (start, end, step): (usize, usize, usize) =
                    (parse_num(start)?, parse_num(end)?, parse_num(step)?);
                if step == 0 {
                    return Err("k step must be positive".into());
                }
                (start..=end).step_by(step).collect()
            }
            [start, end] => (parse_num(start)?..=parse_num(end)?).collect(),
            [list] => list
                .split(',')
                .map(|p| parse_num(p.trim()))
                .collect::<Result<Vec<usize>, _>>()?,
            _ => return Err(format!("cannot read k range `{s}`")),
        };
        if ks.is_empty() || ks.contains(&0) {
            return Err(format!("k range `{s}` must contain only positive values"));
        }
        Ok(KRange(ks))
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))
}

/// One file produced by a subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Artifact {
            name: name.into(),
            bytes: bytes.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Execution {
    /// The first artifact is the primary one, printed when there is no `--out`.
    pub artifacts: Vec<Artifact>,
    pub inputs: Vec<PathBuf>,
    /// One line for the terminal.
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_config_file(path)?;
        serde_json::from_str(&text).map_err(|e| Error::config(format!("manifest: {e}")))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digest_file(path: &Path) -> Result<FileDigest> {
    let bytes = std::fs::read(path).map_err(|source| Error::ConfigFile {
        path: path.to_owned(),
        source,
    })?;
    Ok(FileDigest {
        path: path.to_owned(),
        sha256: sha256_hex(&bytes),
    })
}

impl Command {
    pub fn out_dir(&self) -> Option<&Path> {
        match self {
            Command::Ingest(a) => a.out.as_deref(),
            Command::Table(a) => a.out.as_deref(),
            Command::Classify(a) => a.out.as_deref(),
            Command::Failures(a) => a.out.as_deref(),
            Command::Sweep(a) => a.out.as_deref(),
            Command::Eval(a) => a.out.as_deref(),
            Command::Dist(a) => a.out.as_deref(),
            Command::Synth(a) => a.out.as_deref(),
            Command::Report(a) => a.out.as_deref(),
            Command::Replay(a) => a.out.as_deref(),
        }
    }

    fn set_out_dir(&mut self, dir: Option<PathBuf>) {
        let slot = match self {
            Command::Ingest(a) => &mut a.out,
            Command::Table(a) => &mut a.out,
            Command::Classify(a) => &mut a.out,
            Command::Failures(a) => &mut a.out,
            Command::Sweep(a) => &mut a.out,
            Command::Eval(a) => &mut a.out,
            Command::Dist(a) => &mut a.out,
            Command::Synth(a) => &mut a.out,
            Command::Report(a) => &mut a.out,
            Command::Replay(a) => &mut a.out,
        };
        *slot = dir;
    }
}

/// Reads, parses and recodes every input file. Configuration files are
/// loaded first so that a bad config fails before any data is touched.
pub fn load_records(args: &InputArgs) -> Result<Vec<ActionRecord>> {
    let columns = match &args.columns {
        Some(p) => ColumnConfig::load(p)?,
        None => ColumnConfig::default(),
    };
    let recode = match &args.recode {
        Some(p) => RecodeMap::load(p)?,
        None => RecodeMap::new(),
    };
    let mut records = Vec::new();
    for path in &args.inputs {
        let bytes = std::fs::read(path).map_err(|source| Error::ConfigFile {
            path: path.clone(),
            source,
        })?;
        records.extend(parse_actions(bytes.as_slice(), &columns)?);
    }
    Ok(recode_traits(&records, &recode))
}

fn input_paths(args: &InputArgs) -> Vec<PathBuf> {
    let mut paths = args.inputs.clone();
    paths.extend(args.columns.iter().cloned());
    paths.extend(args.recode.iter().cloned());
    paths
}

pub fn load_table(args: &InputArgs) -> Result<ContingencyTable> {
    let records = load_records(args)?;
    let schema = build_schema(&records)?;
    build_table(&records, &schema)
}

fn classify(table: &ContingencyTable, split: &SplitArgs) -> Result<Vec<PredictionOutcome>> {
    let normalized = normalize_table(table)?;
    let plan = make_split(table.len(), split.train_fraction, split.seed)?;
    classify_split(table, &normalized, &plan, &KnnConfig::new(split.k))
}

fn to_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// corpus → featurization → knn → failure mining for one seeded split.
pub fn run_pipeline(args: &FailuresArgs) -> Result<(FailureReport, Vec<Artifact>)> {
    let table = load_table(&args.input)?;
    let outcomes = classify(&table, &args.split)?;
    let report = mine_failures(&outcomes)?;
    let rendered = render_report(&report, args.format, args.top)?;
    let artifacts = vec![
        Artifact::new(format!("report.{}", args.format.extension()), rendered),
        Artifact::new(
            "predictions.csv",
            to_bytes(|b| write_predictions(b, &outcomes))?,
        ),
    ];
    Ok((report, artifacts))
}

/// Computes a command's artifacts without touching the filesystem.
pub fn execute(command: &Command) -> Result<Execution> {
    match command {
        Command::Ingest(a) => {
            let records = load_records(&a.input)?;
            let stats = validate_corpus(&records)?;
            Ok(Execution {
                artifacts: vec![
                    Artifact::new("corpus.csv", to_bytes(|b| write_corpus(b, &records))?),
                    Artifact::new("stats.json", serde_json::to_string_pretty(&stats)? + "\n"),
                ],
                inputs: input_paths(&a.input),
                summary: format!(
                    "{} unique verbs used {} times",
                    stats.unique_verb_count, stats.total_usage_count
                ),
            })
        }
        Command::Table(a) => {
            let table = load_table(&a.input)?;
            Ok(Execution {
                artifacts: vec![Artifact::new(
                    "table.csv",
                    to_bytes(|b| table.write_csv(b))?,
                )],
                inputs: input_paths(&a.input),
                summary: format!("{} verb rows x {} columns", table.len(), table.schema.len()),
            })
        }
        Command::Classify(a) => {
            let table = load_table(&a.input)?;
            let outcomes = classify(&table, &a.split)?;
            let correct = outcomes.iter().filter(|o| o.is_correct()).count();
            Ok(Execution {
                artifacts: vec![Artifact::new(
                    "predictions.csv",
                    to_bytes(|b| write_predictions(b, &outcomes))?,
                )],
                inputs: input_paths(&a.input),
                summary: format!(
                    "{correct} of {} test verbs predicted correctly",
                    outcomes.len()
                ),
            })
        }
        Command::Failures(a) => {
            let (report, artifacts) = run_pipeline(a)?;
            Ok(Execution {
                artifacts,
                inputs: input_paths(&a.input),
                summary: format!(
                    "accuracy {:.3}; {} false passives, {} false actives",
                    report.confusion.accuracy(),
                    report.false_passives.len(),
                    report.false_actives.len()
                ),
            })
        }
        Command::Sweep(a) => {
            let table = load_table(&a.input)?;
            let result = sweep_k(&table, &a.k_range.0, &a.seeds.0, a.train_fraction)?;
            let best = result.best().expect("at least one k");
            Ok(Execution {
                artifacts: vec![Artifact::new(
                    "sweep.csv",
                    to_bytes(|b| result.write_csv(b))?,
                )],
                inputs: input_paths(&a.input),
                summary: format!(
                    "best k = {} (mean accuracy {:.3} over {} seeds)",
                    best.k,
                    best.mean_accuracy,
                    result.seeds.len()
                ),
            })
        }
        Command::Eval(a) => {
            let table = load_table(&a.input)?;
            let summary = multi_seed_eval(
                &table,
                &KnnConfig::new(a.k),
                &a.seeds.0,
                a.train_fraction,
                a.top,
            )?;
            Ok(Execution {
                artifacts: vec![
                    Artifact::new("eval_runs.csv", to_bytes(|b| summary.write_runs_csv(b))?),
                    Artifact::new(
                        "verb_failure_rates.csv",
                        to_bytes(|b| summary.write_verb_rates_csv(b))?,
                    ),
                    Artifact::new("eval.json", serde_json::to_string_pretty(&summary)? + "\n"),
                ],
                inputs: input_paths(&a.input),
                summary: format!(
                    "median accuracy {:.3} over {} seeds",
                    summary.median_accuracy,
                    summary.runs.len()
                ),
            })
        }
        Command::Dist(a) => {
            let records = load_records(&a.input)?;
            let rows = trait_voice_distribution(&records, a.by_genre)?;
            let artifact = match a.format {
                DistFormat::Csv => Artifact::new(
                    "distribution.csv",
                    to_bytes(|b| write_distribution_csv(b, &rows))?,
                ),
                DistFormat::Md => Artifact::new("distribution.md", render_bars(&rows)),
                DistFormat::Json => Artifact::new(
                    "distribution.json",
                    serde_json::to_string_pretty(&rows)? + "\n",
                ),
            };
            Ok(Execution {
                artifacts: vec![artifact],
                inputs: input_paths(&a.input),
                summary: format!("{} distribution rows", rows.len()),
            })
        }
        Command::Synth(a) => {
            let mut spec = match &a.spec {
                Some(p) => SynthSpec::load(p)?,
                None => SynthSpec::default(),
            };
            if let Some(seed) = a.seed {
                spec.seed = seed;
            }
            let (records, truth) = generate(&spec)?;
            let resolved =
                toml::to_string(&spec).map_err(|e| Error::config(format!("synth spec: {e}")))?;
            Ok(Execution {
                artifacts: vec![
                    Artifact::new("corpus.csv", to_bytes(|b| write_corpus(b, &records))?),
                    Artifact::new("truth.csv", to_bytes(|b| truth.write_csv(b))?),
                    Artifact::new("synth_spec.toml", resolved),
                ],
                inputs: a.spec.iter().cloned().collect(),
                summary: format!(
                    "{} verbs ({} ambiguous), {} records",
                    truth.len(),
                    truth.ambiguous_count(),
                    records.len()
                ),
            })
        }
        Command::Report(a) => {
            let text = read_config_file(&a.report)?;
            let report = parse_report_json(&text)?;
            Ok(Execution {
                artifacts: vec![Artifact::new(
                    format!("report.{}", a.format.extension()),
                    render_report(&report, a.format, a.top)?,
                )],
                inputs: vec![a.report.clone()],
                summary: format!("rendered {} report", a.format.extension()),
            })
        }
        Command::Replay(_) => Err(Error::config(
            "replay cannot be executed as a pipeline step",
        )),
    }
}

/// Writes artifacts and the manifest into `dir`, each via temp file + rename.
pub fn write_outputs(dir: &Path, command: &Command, exec: &Execution) -> Result<Manifest> {
    let inputs = exec
        .inputs
        .iter()
        .map(|p| digest_file(p))
        .collect::<Result<Vec<_>>>()?;
    let outputs = exec
        .artifacts
        .iter()
        .map(|a| FileDigest {
            path: PathBuf::from(&a.name),
            sha256: sha256_hex(&a.bytes),
        })
        .collect();
    let manifest = Manifest {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.clone(),
        inputs,
        outputs,
    };
    let manifest_bytes = serde_json::to_string_pretty(&manifest)? + "\n";

    std::fs::create_dir_all(dir)?;
    for a in &exec.artifacts {
        write_atomic(&dir.join(&a.name), &a.bytes)?;
    }
    write_atomic(&dir.join(MANIFEST_NAME), manifest_bytes.as_bytes())?;
    Ok(manifest)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub checked: usize,
}

/// Re-runs the command recorded in a manifest and verifies inputs and
/// outputs against their recorded digests.
pub fn replay(args: &ReplayArgs) -> Result<ReplayOutcome> {
    let manifest = Manifest::load(&args.manifest)?;
    if manifest.tool != TOOL {
        return Err(Error::config(format!(
            "manifest was written by `{}`, not {TOOL}",
            manifest.tool
        )));
    }
    for recorded in &manifest.inputs {
        let now = digest_file(&recorded.path)?;
        if now.sha256 != recorded.sha256 {
            return Err(Error::Consistency(format!(
                "input {} changed since the manifest was written",
                recorded.path.display()
            )));
        }
    }

    let mut command = manifest.command.clone();
    command.set_out_dir(args.out.clone());
    let exec = execute(&command)?;
    if exec.artifacts.len() != manifest.outputs.len() {
        return Err(Error::Consistency(format!(
            "replay produced {} artifacts, manifest lists {}",
            exec.artifacts.len(),
            manifest.outputs.len()
        )));
    }
    for (artifact, recorded) in exec.artifacts.iter().zip(&manifest.outputs) {
        if Path::new(&artifact.name) != recorded.path
            || sha256_hex(&artifact.bytes) != recorded.sha256
        {
            return Err(Error::Consistency(format!(
                "replayed {} differs from the recorded output",
                artifact.name
            )));
        }
    }
    if let Some(dir) = &args.out {
        write_outputs(dir, &command, &exec)?;
    }
    Ok(ReplayOutcome {
        checked: manifest.outputs.len(),
    })
}

/// What a finished invocation did, for the terminal.
#[derive(Debug)]
pub enum RunResult {
    Written {
        dir: PathBuf,
        files: usize,
        summary: String,
    },
    Printed {
        bytes: Vec<u8>,
        summary: String,
    },
    Replayed(ReplayOutcome),
}

pub fn run(command: &Command) -> Result<RunResult> {
    if let Command::Replay(args) = command {
        return replay(args).map(RunResult::Replayed);
    }
    let exec = execute(command)?;
    match command.out_dir() {
        Some(dir) => {
            write_outputs(dir, command, &exec)?;
            Ok(RunResult::Written {
                dir: dir.to_owned(),
                files: exec.artifacts.len() + 1,
                summary: exec.summary,
            })
        }
        None => Ok(RunResult::Printed {
            bytes: exec
                .artifacts
                .into_iter()
                .next()
                .map(|a| a.bytes)
                .unwrap_or_default(),
            summary: exec.summary,
        }),
    }
}
