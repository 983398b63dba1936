//! Turning prediction outcomes into failure lists and evaluation summaries.
//!
//! "Frequency" throughout is a verb's usage count over the whole corpus.
//! Lists are ranked by usage count descending, then verb, then true label.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Voice;
use crate::error::{Error, Result};
use crate::featurization::ContingencyTable;
use crate::knn::{classify_split, make_split, normalize_table, KnnConfig, PredictionOutcome};

/// Binary confusion counts, rows = truth, columns = prediction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ConfusionRepr", from = "ConfusionRepr")]
pub struct ConfusionMatrix {
    pub active_active: usize,
    pub active_passive: usize,
    pub passive_active: usize,
    pub passive_passive: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.active_active + self.active_passive + self.passive_active + self.passive_passive
    }

    pub fn correct(&self) -> usize {
        self.active_active + self.passive_passive
    }

    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }

    /// Share of truly active verbs predicted active; `None` without any.
    pub fn recall_active(&self) -> Option<f64> {
        ratio(self.active_active, self.active_active + self.active_passive)
    }

    pub fn recall_passive(&self) -> Option<f64> {
        ratio(
            self.passive_passive,
            self.passive_passive + self.passive_active,
        )
    }

    fn add(&mut self, truth: Voice, predicted: Voice) {
        match (truth, predicted) {
            (Voice::Active, Voice::Active) => self.active_active += 1,
            (Voice::Active, Voice::Passive) => self.active_passive += 1,
            (Voice::Passive, Voice::Active) => self.passive_active += 1,
            (Voice::Passive, Voice::Passive) => self.passive_passive += 1,
        }
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

// Serialised form carries the derived ratios for readers of the JSON; they
// are recomputed, not trusted, when deserialising.
#[derive(Serialize, Deserialize)]
struct ConfusionRepr {
    active_active: usize,
    active_passive: usize,
    passive_active: usize,
    passive_passive: usize,
    #[serde(default, skip_deserializing)]
    accuracy: f64,
    #[serde(default, skip_deserializing)]
    recall_active: Option<f64>,
    #[serde(default, skip_deserializing)]
    recall_passive: Option<f64>,
}

impl From<ConfusionMatrix> for ConfusionRepr {
    fn from(m: ConfusionMatrix) -> Self {
        ConfusionRepr {
            active_active: m.active_active,
            active_passive: m.active_passive,
            passive_active: m.passive_active,
            passive_passive: m.passive_passive,
            accuracy: if m.total() > 0 { m.accuracy() } else { 0.0 },
            recall_active: m.recall_active(),
            recall_passive: m.recall_passive(),
        }
    }
}

impl From<ConfusionRepr> for ConfusionMatrix {
    fn from(r: ConfusionRepr) -> Self {
        ConfusionMatrix {
            active_active: r.active_active,
            active_passive: r.active_passive,
            passive_active: r.passive_active,
            passive_passive: r.passive_passive,
        }
    }
}

pub fn confusion(outcomes: &[PredictionOutcome]) -> Result<ConfusionMatrix> {
    if outcomes.is_empty() {
        return Err(Error::Consistency("no prediction outcomes".into()));
    }
    let mut m = ConfusionMatrix::default();
    for o in outcomes {
        m.add(o.true_label, o.predicted_label);
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedVerb {
    pub verb: String,
    pub true_label: Voice,
    pub predicted_label: Voice,
    pub usage_count: u32,
}

impl From<&PredictionOutcome> for RankedVerb {
    fn from(o: &PredictionOutcome) -> Self {
        RankedVerb {
            verb: o.verb.clone(),
            true_label: o.true_label,
            predicted_label: o.predicted_label,
            usage_count: o.usage_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub confusion: ConfusionMatrix,
    /// Truly active, predicted passive.
    pub false_passives: Vec<RankedVerb>,
    /// Truly passive, predicted active.
    pub false_actives: Vec<RankedVerb>,
    pub correct: Vec<RankedVerb>,
}

fn by_frequency(a: &PredictionOutcome, b: &PredictionOutcome) -> Ordering {
    b.usage_count
        .cmp(&a.usage_count)
        .then_with(|| a.verb.cmp(&b.verb))
        .then(a.true_label.cmp(&b.true_label))
}

fn ranked(outcomes: &[PredictionOutcome]) -> Vec<&PredictionOutcome> {
    let mut v: Vec<_> = outcomes.iter().collect();
    v.sort_by(|a, b| by_frequency(a, b));
    v
}

pub fn mine_failures(outcomes: &[PredictionOutcome]) -> Result<FailureReport> {
    let confusion = confusion(outcomes)?;
    let mut report = FailureReport {
        confusion,
        false_passives: Vec::new(),
        false_actives: Vec::new(),
        correct: Vec::new(),
    };
    for o in ranked(outcomes) {
        let list = match (o.true_label, o.predicted_label) {
            (Voice::Active, Voice::Passive) => &mut report.false_passives,
            (Voice::Passive, Voice::Active) => &mut report.false_actives,
            _ => &mut report.correct,
        };
        list.push(o.into());
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopEntry {
    pub verb: String,
    pub usage_count: u32,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopFrequent {
    pub entries: Vec<TopEntry>,
    pub correct_count: usize,
}

/// The `n` most used test verbs and how many of them were predicted correctly.
pub fn top_frequent_correctness(outcomes: &[PredictionOutcome], n: usize) -> Result<TopFrequent> {
    if n == 0 || n > outcomes.len() {
        return Err(Error::config(format!(
            "top-n of {n} is outside 1..={}",
            outcomes.len()
        )));
    }
    let entries: Vec<TopEntry> = ranked(outcomes)
        .into_iter()
        .take(n)
        .map(|o| TopEntry {
            verb: o.verb.clone(),
            usage_count: o.usage_count,
            correct: o.is_correct(),
        })
        .collect();
    let correct_count = entries.iter().filter(|e| e.correct).count();
    Ok(TopFrequent {
        entries,
        correct_count,
    })
}

/// Per-verb accuracy after dropping the `n` most used test verbs.
pub fn accuracy_excluding_top(outcomes: &[PredictionOutcome], n: usize) -> Result<f64> {
    if n >= outcomes.len() {
        return Err(Error::config(format!(
            "cannot exclude {n} of {} outcomes",
            outcomes.len()
        )));
    }
    let rest = &ranked(outcomes)[n..];
    let correct = rest.iter().filter(|o| o.is_correct()).count();
    Ok(correct as f64 / rest.len() as f64)
}

/// Same as [`accuracy_excluding_top`], but each verb weighs by its usage count.
pub fn usage_weighted_accuracy_excluding_top(
    outcomes: &[PredictionOutcome],
    n: usize,
) -> Result<f64> {
    if n >= outcomes.len() {
        return Err(Error::config(format!(
            "cannot exclude {n} of {} outcomes",
            outcomes.len()
        )));
    }
    let rest = &ranked(outcomes)[n..];
    let total: u64 = rest.iter().map(|o| u64::from(o.usage_count)).sum();
    let correct: u64 = rest
        .iter()
        .filter(|o| o.is_correct())
        .map(|o| u64::from(o.usage_count))
        .sum();
    Ok(correct as f64 / total as f64)
}

/// Metrics of one train/test draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub seed: u64,
    pub accuracy: f64,
    pub recall_active: Option<f64>,
    pub recall_passive: Option<f64>,
    pub confusion: ConfusionMatrix,
}

impl RunMetrics {
    fn new(seed: u64, confusion: ConfusionMatrix) -> Self {
        RunMetrics {
            seed,
            accuracy: confusion.accuracy(),
            recall_active: confusion.recall_active(),
            recall_passive: confusion.recall_passive(),
            confusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub k: usize,
    pub mean_accuracy: f64,
    /// Population standard deviation over seeds.
    pub sd_accuracy: f64,
    pub mean_recall_active: Option<f64>,
    pub mean_recall_passive: Option<f64>,
    /// In seed order.
    pub runs: Vec<RunMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    pub fn best(&self) -> Option<&SweepEntry> {
        self.entries.iter().max_by(|a, b| {
            a.mean_accuracy
                .total_cmp(&b.mean_accuracy)
                .then(b.k.cmp(&a.k))
        })
    }

    pub fn entry(&self, k: usize) -> Option<&SweepEntry> {
        self.entries.iter().find(|e| e.k == k)
    }

    /// One row per (k, seed), then `mean` and `sd` rows per k.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "seed", "accuracy", "recall_active", "recall_passive"])?;
        for e in &self.entries {
            let k = e.k.to_string();
            for r in &e.runs {
                w.write_record([
                    k.as_str(),
                    &r.seed.to_string(),
                    &fmt3(r.accuracy),
                    &fmt3_opt(r.recall_active),
                    &fmt3_opt(r.recall_passive),
                ])?;
            }
            w.write_record([
                k.as_str(),
                "mean",
                &fmt3(e.mean_accuracy),
                &fmt3_opt(e.mean_recall_active),
                &fmt3_opt(e.mean_recall_passive),
            ])?;
            w.write_record([k.as_str(), "sd", &fmt3(e.sd_accuracy), "", ""])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt3(x: f64) -> String {
    format!("{x:.3}")
}

pub(crate) fn fmt3_opt(x: Option<f64>) -> String {
    x.map(fmt3).unwrap_or_default()
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn population_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

fn mean_defined(xs: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = xs.flatten().collect();
    (!v.is_empty()).then(|| mean(&v))
}

fn check_seeds(seeds: &[u64]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::config("at least one seed is required"));
    }
    Ok(())
}

/// Full normalise → split → classify → confusion pipeline for every
/// (k, seed) pair.
pub fn sweep_k(
    table: &ContingencyTable,
    k_values: &[usize],
    seeds: &[u64],
    train_fraction: f64,
) -> Result<SweepResult> {
    check_seeds(seeds)?;
    if k_values.is_empty() {
        return Err(Error::config("at least one k is required"));
    }
    let normalized = normalize_table(table)?;
    let plans = seeds
        .iter()
        .map(|&s| make_split(table.len(), train_fraction, s))
        .collect::<Result<Vec<_>>>()?;
    let n_train = plans[0].train_indices.len();
    if let Some(&bad) = k_values.iter().find(|&&k| k == 0 || k > n_train) {
        return Err(Error::config(format!(
            "k = {bad} is outside 1..={n_train} (training rows)"
        )));
    }

    let jobs: Vec<(usize, usize)> = (0..k_values.len())
        .flat_map(|ki| (0..plans.len()).map(move |si| (ki, si)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(ki, si)| {
            let outcomes = classify_split(
                table,
                &normalized,
                &plans[si],
                &KnnConfig::new(k_values[ki]),
            )?;
            Ok(((ki, si), RunMetrics::new(seeds[si], confusion(&outcomes)?)))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;

    let mut entries: Vec<SweepEntry> = Vec::with_capacity(k_values.len());
    for (ki, &k) in k_values.iter().enumerate() {
        let runs: Vec<RunMetrics> = (0..plans.len())
            .map(|si| results[&(ki, si)].clone())
            .collect();
        let acc: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
        entries.push(SweepEntry {
            k,
            mean_accuracy: mean(&acc),
            sd_accuracy: population_sd(&acc),
            mean_recall_active: mean_defined(runs.iter().map(|r| r.recall_active)),
            mean_recall_passive: mean_defined(runs.iter().map(|r| r.recall_passive)),
            runs,
        });
    }
    Ok(SweepResult {
        train_fraction,
        seeds: seeds.to_vec(),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRun {
    #[serde(flatten)]
    pub metrics: RunMetrics,
    /// Unweighted accuracy without the `top_n` most used test verbs; `None`
    /// when the test split is too small.
    pub accuracy_excluding_top: Option<f64>,
    pub top_correct_count: Option<usize>,
    pub false_actives: Vec<String>,
    pub false_passives: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerbFailureRate {
    pub verb: String,
    pub label: Voice,
    pub usage_count: u32,
    /// Seeds in which the verb fell in the test split.
    pub test_appearances: usize,
    pub mispredictions: usize,
}

impl VerbFailureRate {
    pub fn failure_rate(&self) -> Option<f64> {
        ratio(self.mispredictions, self.test_appearances)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub config: KnnConfig,
    pub train_fraction: f64,
    pub top_n: usize,
    pub runs: Vec<EvalRun>,
    pub median_accuracy: f64,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub mean_recall_active: Option<f64>,
    pub mean_recall_passive: Option<f64>,
    pub median_accuracy_excluding_top: Option<f64>,
    /// Table order; verbs never drawn into a test split are omitted.
    pub verb_failures: Vec<VerbFailureRate>,
}

impl EvalSummary {
    pub fn verb(&self, verb: &str, label: Voice) -> Option<&VerbFailureRate> {
        self.verb_failures
            .iter()
            .find(|v| v.verb == verb && v.label == label)
    }

    /// One row per seed, then `median`, `mean` and `sd` rows.
    pub fn write_runs_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "seed",
            "accuracy",
            "recall_active",
            "recall_passive",
            "accuracy_excluding_top",
            "top_correct",
        ])?;
        for r in &self.runs {
            w.write_record([
                r.metrics.seed.to_string(),
                fmt3(r.metrics.accuracy),
                fmt3_opt(r.metrics.recall_active),
                fmt3_opt(r.metrics.recall_passive),
                fmt3_opt(r.accuracy_excluding_top),
                r.top_correct_count
                    .map(|c| c.to_string())
                    .unwrap_or_default(),
            ])?;
        }
        let excl: Vec<f64> = self
            .runs
            .iter()
            .filter_map(|r| r.accuracy_excluding_top)
            .collect();
        w.write_record([
            "median".into(),
            fmt3(self.median_accuracy),
            String::new(),
            String::new(),
            fmt3_opt(self.median_accuracy_excluding_top),
            String::new(),
        ])?;
        w.write_record([
            "mean".into(),
            fmt3(self.mean_accuracy),
            fmt3_opt(self.mean_recall_active),
            fmt3_opt(self.mean_recall_passive),
            fmt3_opt((!excl.is_empty()).then(|| mean(&excl))),
            String::new(),
        ])?;
        w.write_record([
            "sd".into(),
            fmt3(self.sd_accuracy),
            String::new(),
            String::new(),
            fmt3_opt((!excl.is_empty()).then(|| population_sd(&excl))),
            String::new(),
        ])?;
        w.flush()?;
        Ok(())
    }

    pub fn write_verb_rates_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "verb",
            "label",
            "usage_count",
            "test_appearances",
            "mispredictions",
            "failure_rate",
        ])?;
        for v in &self.verb_failures {
            w.write_record([
                v.verb.clone(),
                v.label.to_string(),
                v.usage_count.to_string(),
                v.test_appearances.to_string(),
                v.mispredictions.to_string(),
                fmt3_opt(v.failure_rate()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs one configuration over many seeds and summarises the spread.
pub fn multi_seed_eval(
    table: &ContingencyTable,
    config: &KnnConfig,
    seeds: &[u64],
    train_fraction: f64,
    top_n: usize,
) -> Result<EvalSummary> {
    check_seeds(seeds)?;
    let normalized = normalize_table(table)?;

    let per_seed = seeds
        .par_iter()
        .map(|&seed| {
            let plan = make_split(table.len(), train_fraction, seed)?;
            let outcomes = classify_split(table, &normalized, &plan, config)?;
            let report = mine_failures(&outcomes)?;
            let usable = top_n < outcomes.len();
            let run = EvalRun {
                metrics: RunMetrics::new(seed, report.confusion),
                accuracy_excluding_top: usable
                    .then(|| accuracy_excluding_top(&outcomes, top_n))
                    .transpose()?,
                top_correct_count: (usable && top_n > 0)
                    .then(|| top_frequent_correctness(&outcomes, top_n).map(|t| t.correct_count))
                    .transpose()?,
                false_actives: report
                    .false_actives
                    .iter()
                    .map(|v| v.verb.clone())
                    .collect(),
                false_passives: report
                    .false_passives
                    .iter()
                    .map(|v| v.verb.clone())
                    .collect(),
            };
            let tally: Vec<(usize, bool)> = plan
                .test_indices
                .iter()
                .zip(&outcomes)
                .map(|(&row, o)| (row, !o.is_correct()))
                .collect();
            Ok((run, tally))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut counts = vec![(0usize, 0usize); table.len()];
    for (_, tally) in &per_seed {
        for &(row, missed) in tally {
            counts[row].0 += 1;
            counts[row].1 += usize::from(missed);
        }
    }
    let verb_failures = table
        .rows
        .iter()
        .zip(&counts)
        .filter(|(_, (seen, _))| *seen > 0)
        .map(|(row, &(seen, missed))| VerbFailureRate {
            verb: row.verb.clone(),
            label: row.label,
            usage_count: row.usage_count,
            test_appearances: seen,
            mispredictions: missed,
        })
        .collect();

    let runs: Vec<EvalRun> = per_seed.into_iter().map(|(r, _)| r).collect();
    let acc: Vec<f64> = runs.iter().map(|r| r.metrics.accuracy).collect();
    let excl: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.accuracy_excluding_top)
        .collect();
    Ok(EvalSummary {
        config: *config,
        train_fraction,
        top_n,
        median_accuracy: median(&acc),
        mean_accuracy: mean(&acc),
        sd_accuracy: population_sd(&acc),
        mean_recall_active: mean_defined(runs.iter().map(|r| r.metrics.recall_active)),
        mean_recall_passive: mean_defined(runs.iter().map(|r| r.metrics.recall_passive)),
        median_accuracy_excluding_top: (!excl.is_empty()).then(|| median(&excl)),
        runs,
        verb_failures,
    })
}
