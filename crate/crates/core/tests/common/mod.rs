#![allow(dead_code)]

use failure_sieve::corpus::{ActionRecord, Genre, TraitCategory, Traits, Voice};
use failure_sieve::distribution::{trait_voice_distribution, GenreKey};
use failure_sieve::failures::mine_failures;
use failure_sieve::featurization::{build_schema, build_table};
use failure_sieve::knn::PredictionOutcome;
use failure_sieve::rng::SeededRng;

/// All-pairs nearest neighbours: full distance list, stable sort by
/// (distance, training index), majority vote, split votes to the lowest
/// training index among the chosen k.
pub fn oracle_predict(
    train: &[Vec<f64>],
    labels: &[Voice],
    query: &[f64],
    k: usize,
) -> (Voice, Vec<(usize, f64)>) {
    let mut dist: Vec<(usize, f64)> = train
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let sq: f64 = row.iter().zip(query).map(|(a, b)| (a - b).powi(2)).sum();
            (i, sq.sqrt())
        })
        .collect();
    dist.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    dist.truncate(k);
    let active = dist
        .iter()
        .filter(|(i, _)| labels[*i] == Voice::Active)
        .count();
    let passive = k - active;
    let label = if active > passive {
        Voice::Active
    } else if passive > active {
        Voice::Passive
    } else {
        labels[dist.iter().map(|(i, _)| *i).min().unwrap()]
    };
    (label, dist)
}

/// Per-column min/max by scanning every cell.
pub fn oracle_min_max(m: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let cols = m[0].len();
    let mut lo = vec![f64::INFINITY; cols];
    let mut hi = vec![f64::NEG_INFINITY; cols];
    for j in 0..cols {
        for row in m {
            if row[j] < lo[j] {
                lo[j] = row[j];
            }
            if row[j] > hi[j] {
                hi[j] = row[j];
            }
        }
    }
    (lo, hi)
}

pub fn random_label(rng: &mut SeededRng) -> Voice {
    if rng.coin() {
        Voice::Active
    } else {
        Voice::Passive
    }
}

/// Either continuous values or a coarse grid that produces many exact ties.
pub fn random_matrix(
    rng: &mut SeededRng,
    rows: usize,
    cols: usize,
    gridded: bool,
) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if gridded {
                        rng.below(4) as f64 / 3.0
                    } else {
                        rng.unit()
                    }
                })
                .collect()
        })
        .collect()
}

const VERBS: [(&str, Voice); 8] = [
    ("scanning", Voice::Active),
    ("scanned", Voice::Passive),
    ("learning", Voice::Active),
    ("exposed", Voice::Passive),
    ("searching", Voice::Active),
    ("searching", Voice::Passive),
    ("hunted", Voice::Passive),
    ("protecting", Voice::Active),
];

const VALUES: [&[&str]; 5] = [
    &["Female", "Male", "Non-binary", "Trans woman", ""],
    &["Human", "Robot", "Animal", ""],
    &["White", "Asian", "PoC", "Black", ""],
    &["Adult", "Child", "Elderly", ""],
    &["Heterosexual", "Homosexual", ""],
];

pub fn random_corpus(rng: &mut SeededRng, max_records: u64) -> Vec<ActionRecord> {
    let n = 1 + rng.below(max_records) as usize;
    (0..n)
        .map(|_| {
            let (verb, voice) = VERBS[rng.below(VERBS.len() as u64) as usize];
            let traits = Traits::new(
                [0, 1, 2, 3, 4].map(|c| VALUES[c][rng.below(VALUES[c].len() as u64) as usize]),
            );
            let genre = match rng.below(5) {
                4 => None,
                g => Some(Genre::ALL[g as usize]),
            };
            ActionRecord::new(verb, voice, traits)
                .unwrap()
                .with_work(format!("w{}", rng.below(5)), genre)
        })
        .collect()
}

/// Contingency-table invariants; returns a description of the first violation.
pub fn check_table_invariants(records: &[ActionRecord]) -> Result<(), String> {
    let schema = build_schema(records).map_err(|e| e.to_string())?;
    let table = build_table(records, &schema).map_err(|e| e.to_string())?;
    let stats = failure_sieve::corpus::validate_corpus(records).map_err(|e| e.to_string())?;

    if table.len() != stats.unique_verb_count {
        return Err("row count != unique verb count".into());
    }
    let usage: u64 = table.rows.iter().map(|r| u64::from(r.usage_count)).sum();
    if usage != records.len() as u64 {
        return Err("usage total != record count".into());
    }
    for row in &table.rows {
        if row.features.len() != schema.len() {
            return Err("feature width".into());
        }
        for c in TraitCategory::ALL {
            let s: u32 = row.features[schema.category_range(c)].iter().sum();
            if s != row.usage_count {
                return Err(format!(
                    "{}/{c}: category sum {s} != usage {}",
                    row.verb, row.usage_count
                ));
            }
        }
    }
    for inv in &stats.inventories {
        if inv.values.values().sum::<usize>() != records.len() {
            return Err(format!("inventory sum for {}", inv.category));
        }
    }
    let mut reversed = records.to_vec();
    reversed.reverse();
    if build_table(&reversed, &schema).map_err(|e| e.to_string())? != table {
        return Err("table depends on record order".into());
    }
    Ok(())
}

pub fn check_distribution_invariants(records: &[ActionRecord]) -> Result<(), String> {
    let rows = trait_voice_distribution(records, true).map_err(|e| e.to_string())?;
    for c in TraitCategory::ALL {
        let mut keys = vec![GenreKey::All];
        keys.extend(Genre::ALL.map(GenreKey::Genre));
        for g in keys {
            let expected = records
                .iter()
                .filter(|r| match g {
                    GenreKey::All => true,
                    GenreKey::Genre(x) => r.genre == Some(x),
                })
                .count();
            let got: usize = rows
                .iter()
                .filter(|r| r.trait_category == c && r.genre == g)
                .map(|r| r.total_uses())
                .sum();
            if got != expected {
                return Err(format!("{c}/{g}: {got} uses, {expected} records"));
            }
        }
    }
    for r in &rows {
        if !(0.0..=1.0).contains(&r.active_proportion) {
            return Err("proportion out of range".into());
        }
        if r.total_uses() > 0 && r.active_proportion != r.active_uses as f64 / r.total_uses() as f64
        {
            return Err("proportion mismatch".into());
        }
        if r.is_empty() && r.active_proportion != 0.0 {
            return Err("empty row with nonzero proportion".into());
        }
    }
    Ok(())
}

pub fn random_outcomes(rng: &mut SeededRng, max: u64) -> Vec<PredictionOutcome> {
    let n = 1 + rng.below(max) as usize;
    (0..n)
        .map(|i| PredictionOutcome {
            verb: format!("v{}", rng.below(n as u64 * 2) + i as u64 * 1000),
            true_label: random_label(rng),
            predicted_label: random_label(rng),
            usage_count: 1 + rng.below(8) as u32,
            neighbors: Vec::new(),
        })
        .collect()
}

pub fn check_failure_invariants(outcomes: &[PredictionOutcome]) -> Result<(), String> {
    let report = mine_failures(outcomes).map_err(|e| e.to_string())?;
    let total = report.correct.len() + report.false_actives.len() + report.false_passives.len();
    if total != outcomes.len() || report.confusion.total() != outcomes.len() {
        return Err("partition".into());
    }
    for list in [
        &report.correct,
        &report.false_actives,
        &report.false_passives,
    ] {
        for w in list.windows(2) {
            let ordered = w[0].usage_count > w[1].usage_count
                || (w[0].usage_count == w[1].usage_count && w[0].verb <= w[1].verb);
            if !ordered {
                return Err(format!("ranking: {:?} before {:?}", w[0], w[1]));
            }
        }
    }
    if report
        .false_actives
        .iter()
        .any(|v| v.true_label != Voice::Passive || v.predicted_label != Voice::Active)
        || report
            .false_passives
            .iter()
            .any(|v| v.true_label != Voice::Active || v.predicted_label != Voice::Passive)
        || report
            .correct
            .iter()
            .any(|v| v.true_label != v.predicted_label)
    {
        return Err("list membership".into());
    }
    for n in 1..=outcomes.len() {
        let top = failure_sieve::failures::top_frequent_correctness(outcomes, n).unwrap();
        let missed = top.entries.iter().filter(|e| !e.correct).count();
        if top.correct_count + missed != n {
            return Err("top-n consistency".into());
        }
    }
    let acc0 = failure_sieve::failures::accuracy_excluding_top(outcomes, 0).unwrap();
    if acc0 != report.confusion.accuracy() {
        return Err("accuracy_excluding_top(0) != accuracy".into());
    }
    Ok(())
}
