//! Synthetic corpora with planted clean and ambiguous verbs.
//!
//! Clean verbs carry a trait profile that determines their voice through a
//! [`SignalRule`]; ambiguous verbs get a profile drawn without regard to
//! their label and a fair-coin voice. If failure mining works, mispredicted
//! verbs should be disproportionately ambiguous ones, which [`enrichment`]
//! measures. Planted ambiguity is only a proxy for what a reader would call
//! an "interesting" case.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::corpus::{read_config_file, ActionRecord, Genre, TraitCategory, Traits, Voice};
use crate::error::{Error, Result};
use crate::failures::{mine_failures, FailureReport};
use crate::featurization::{build_schema, build_table};
use crate::knn::{classify_split, make_split, normalize_table, KnnConfig};
use crate::rng::SeededRng;

/// Number of distinct values generated for each trait category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vocabulary {
    pub gender: usize,
    pub species: usize,
    pub race_ethnicity: usize,
    pub age: usize,
    pub sexuality: usize,
}

impl Vocabulary {
    pub fn size(&self, category: TraitCategory) -> usize {
        match category {
            TraitCategory::Gender => self.gender,
            TraitCategory::Species => self.species,
            TraitCategory::RaceEthnicity => self.race_ethnicity,
            TraitCategory::Age => self.age,
            TraitCategory::Sexuality => self.sexuality,
        }
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            gender: 3,
            species: 2,
            race_ethnicity: 2,
            age: 2,
            sexuality: 2,
        }
    }
}

/// Name of the `index`-th synthetic value of a category, e.g. `gender-0`.
pub fn synth_value(category: TraitCategory, index: usize) -> String {
    format!("{}-{index}", category.as_str().replace('_', "-"))
}

/// Active iff more than half of a verb's records carry the marker value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalRule {
    pub category: TraitCategory,
}

impl SignalRule {
    pub fn marker(&self) -> String {
        synth_value(self.category, 0)
    }

    pub fn label(&self, marker_count: u32, usage_count: u32) -> Voice {
        if 2 * marker_count > usage_count {
            Voice::Active
        } else {
            Voice::Passive
        }
    }
}

impl Default for SignalRule {
    fn default() -> Self {
        SignalRule {
            category: TraitCategory::Gender,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub n_verbs: usize,
    pub ambiguous_fraction: f64,
    /// Mean of the per-verb usage count, which is geometric on 1, 2, ...
    pub mean_usage: f64,
    pub vocabulary: Vocabulary,
    pub signal: SignalRule,
    /// Per-record probability of the marker value for clean active verbs.
    pub marker_rate_active: f64,
    /// Same, for clean passive verbs.
    pub marker_rate_passive: f64,
    /// Same, for ambiguous verbs regardless of their label.
    pub marker_rate_ambiguous: f64,
    pub n_works: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_verbs: 700,
            ambiguous_fraction: 0.3,
            mean_usage: 5.0,
            vocabulary: Vocabulary::default(),
            signal: SignalRule::default(),
            marker_rate_active: 0.9,
            marker_rate_passive: 0.1,
            marker_rate_ambiguous: 0.5,
            n_works: 50,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SynthSpec =
            toml::from_str(text).map_err(|e| Error::config(format!("synth spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_config_file(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::config(format!("synth spec: {m}")));
        if self.n_verbs < 2 {
            return fail("n_verbs must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.ambiguous_fraction) {
            return fail("ambiguous_fraction must lie in [0, 1]");
        }
        if !(self.mean_usage >= 1.0 && self.mean_usage.is_finite()) {
            return fail("mean_usage must be a finite number >= 1");
        }
        if TraitCategory::ALL
            .iter()
            .any(|&c| self.vocabulary.size(c) == 0)
        {
            return fail("every vocabulary size must be at least 1");
        }
        if self.vocabulary.size(self.signal.category) < 2 {
            return fail("the signal category needs at least 2 values");
        }
        let rates = [
            self.marker_rate_active,
            self.marker_rate_passive,
            self.marker_rate_ambiguous,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return fail("marker rates must lie in [0, 1]");
        }
        if self.marker_rate_active <= self.marker_rate_passive {
            return fail("marker_rate_active must exceed marker_rate_passive");
        }
        if self.n_works == 0 {
            return fail("n_works must be at least 1");
        }
        Ok(())
    }

    pub fn ambiguous_count(&self) -> usize {
        (self.ambiguous_fraction * self.n_verbs as f64).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerbKind {
    Clean,
    Ambiguous,
}

impl fmt::Display for VerbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerbKind::Clean => "clean",
            VerbKind::Ambiguous => "ambiguous",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth(BTreeMap<String, VerbKind>);

impl GroundTruth {
    pub fn get(&self, verb: &str) -> Option<VerbKind> {
        self.0.get(verb).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ambiguous_count(&self) -> usize {
        self.0
            .values()
            .filter(|&&k| k == VerbKind::Ambiguous)
            .count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, VerbKind)> {
        self.0.iter().map(|(v, &k)| (v.as_str(), k))
    }

    /// Sidecar file: `verb,flag`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["verb", "flag"])?;
        for (verb, kind) in self.iter() {
            w.write_record([verb, &kind.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

const GENERATOR_STREAM: u64 = 0x5F3A_11D2_9C4E_B7A1;

pub fn generate(spec: &SynthSpec) -> Result<(Vec<ActionRecord>, GroundTruth)> {
    spec.validate()?;
    // Offset so that a split drawn with the same seed does not replay the
    // shuffle that picks the ambiguous verbs.
    let mut rng = SeededRng::new(spec.seed ^ GENERATOR_STREAM);

    let mut kinds = vec![VerbKind::Clean; spec.n_verbs];
    let mut order: Vec<usize> = (0..spec.n_verbs).collect();
    rng.shuffle(&mut order);
    for &i in &order[..spec.ambiguous_count()] {
        kinds[i] = VerbKind::Ambiguous;
    }

    // Failures before the first success; +1 gives usage >= 1 with the requested mean.
    let usage_dist = Geometric::new(1.0 / spec.mean_usage)
        .map_err(|e| Error::config(format!("synth spec: {e}")))?;
    let digits = (spec.n_verbs - 1).to_string().len();
    let marker_cat = spec.signal.category;

    let mut records = Vec::new();
    let mut truth = BTreeMap::new();
    for (i, &kind) in kinds.iter().enumerate() {
        let verb = format!("verb{i:0digits$}");
        let usage = 1 + usage_dist.sample(&mut rng).min(u64::from(u32::MAX) - 1) as u32;
        let label = if rng.coin() {
            Voice::Active
        } else {
            Voice::Passive
        };

        let rate = match (kind, label) {
            (VerbKind::Ambiguous, _) => spec.marker_rate_ambiguous,
            (VerbKind::Clean, Voice::Active) => spec.marker_rate_active,
            (VerbKind::Clean, Voice::Passive) => spec.marker_rate_passive,
        };
        let mut markers: Vec<bool>;
        let mut attempts = 0;
        loop {
            markers = (0..usage).map(|_| rng.unit() < rate).collect();
            let count = markers.iter().filter(|&&m| m).count() as u32;
            if kind == VerbKind::Ambiguous || spec.signal.label(count, usage) == label {
                break;
            }
            attempts += 1;
            if attempts == 10_000 {
                // Practically unreachable with sane rates; force the rule.
                let need = if label == Voice::Active {
                    usage / 2 + 1
                } else {
                    0
                };
                markers = (0..usage).map(|j| j < need).collect();
                break;
            }
        }

        for has_marker in markers {
            let mut traits = Traits::default();
            for category in TraitCategory::ALL {
                let size = spec.vocabulary.size(category);
                let idx = if category == marker_cat {
                    if has_marker {
                        0
                    } else {
                        1 + rng.below(size as u64 - 1) as usize
                    }
                } else {
                    rng.below(size as u64) as usize
                };
                traits.set(category, synth_value(category, idx));
            }
            let work = rng.below(spec.n_works as u64);
            let genre = Genre::ALL[rng.below(Genre::ALL.len() as u64) as usize];
            records.push(ActionRecord {
                work_id: format!("synth-work-{work}"),
                genre: Some(genre),
                verb: verb.clone(),
                voice: label,
                traits,
            });
        }
        truth.insert(verb, kind);
    }
    Ok((records, GroundTruth(truth)))
}

/// Ambiguous share among mispredictions over ambiguous share among all
/// test verbs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Enrichment {
    Defined(f64),
    /// No mispredictions, or no ambiguous verbs in the test split.
    Undefined,
}

impl Enrichment {
    pub fn value(self) -> Option<f64> {
        match self {
            Enrichment::Defined(x) => Some(x),
            Enrichment::Undefined => None,
        }
    }
}

pub fn enrichment(report: &FailureReport, truth: &GroundTruth) -> Result<Enrichment> {
    let kind = |verb: &str| {
        truth.get(verb).ok_or_else(|| Error::Coverage {
            verb: verb.to_owned(),
        })
    };
    let count_ambiguous = |list: &[crate::failures::RankedVerb]| -> Result<usize> {
        let mut n = 0;
        for v in list {
            n += usize::from(kind(&v.verb)? == VerbKind::Ambiguous);
        }
        Ok(n)
    };
    let missed = report.false_actives.len() + report.false_passives.len();
    let missed_ambiguous =
        count_ambiguous(&report.false_actives)? + count_ambiguous(&report.false_passives)?;
    let test = missed + report.correct.len();
    let test_ambiguous = missed_ambiguous + count_ambiguous(&report.correct)?;

    if missed == 0 || test_ambiguous == 0 {
        return Ok(Enrichment::Undefined);
    }
    let among_missed = missed_ambiguous as f64 / missed as f64;
    let among_test = test_ambiguous as f64 / test as f64;
    Ok(Enrichment::Defined(among_missed / among_test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRun {
    pub seed: u64,
    pub accuracy: f64,
    pub enrichment: Enrichment,
    pub report: FailureReport,
}

/// Generates a corpus from `spec` and runs the full pipeline on it, using the
/// spec's seed for the split as well.
pub fn run_synthetic(
    spec: &SynthSpec,
    config: &KnnConfig,
    train_fraction: f64,
) -> Result<SynthRun> {
    let (records, truth) = generate(spec)?;
    let schema = build_schema(&records)?;
    let table = build_table(&records, &schema)?;
    let normalized = normalize_table(&table)?;
    let plan = make_split(table.len(), train_fraction, spec.seed)?;
    let outcomes = classify_split(&table, &normalized, &plan, config)?;
    let report = mine_failures(&outcomes)?;
    Ok(SynthRun {
        seed: spec.seed,
        accuracy: report.confusion.accuracy(),
        enrichment: enrichment(&report, &truth)?,
        report,
    })
}
