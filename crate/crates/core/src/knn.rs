//! Brute-force k-nearest-neighbours over min-max normalised count profiles,
//! plus the seeded train/test split.
//!
//! Normalisation is fitted on the whole table before splitting (normalise,
//! then split). This leaks test-set ranges into the scaling; it is kept
//! because it is the recipe being replicated.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Voice;
use crate::error::{Error, Result};
use crate::featurization::ContingencyTable;
use crate::rng::SeededRng;

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub train_fraction: f64,
    /// Ascending.
    pub train_indices: Vec<usize>,
    /// Ascending.
    pub test_indices: Vec<usize>,
}

/// Partitions `0..n_rows` into train and test sets.
///
/// The row indices are shuffled with [`SeededRng::shuffle`] seeded by `seed`;
/// the first `round(fraction * n_rows)` shuffled indices form the training
/// set. Both sets are returned sorted.
pub fn make_split(n_rows: usize, fraction: f64, seed: u64) -> Result<SplitPlan> {
    if n_rows < 2 {
        return Err(Error::Consistency(format!(
            "cannot split {n_rows} row(s); need at least 2"
        )));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::config(format!(
            "train fraction must lie strictly between 0 and 1, got {fraction}"
        )));
    }
    let n_train = (fraction * n_rows as f64).round() as usize;
    if n_train == 0 || n_train == n_rows {
        return Err(Error::config(format!(
            "train fraction {fraction} leaves an empty side when splitting {n_rows} rows"
        )));
    }

    let mut order: Vec<usize> = (0..n_rows).collect();
    SeededRng::new(seed).shuffle(&mut order);
    let (train, test) = order.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPlan {
        seed,
        train_fraction: fraction,
        train_indices: train.to_vec(),
        test_indices: test.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn width(&self) -> usize {
        self.min.len()
    }
}

fn check_width(rows: &[Vec<f64>], expected: usize) -> Result<()> {
    match rows.iter().find(|r| r.len() != expected) {
        Some(r) => Err(Error::WidthMismatch {
            expected,
            found: r.len(),
        }),
        None => Ok(()),
    }
}

pub fn fit_normalization(features: &[Vec<f64>]) -> Result<NormalizationParams> {
    let first = features
        .first()
        .ok_or_else(|| Error::Consistency("cannot fit normalisation on an empty matrix".into()))?;
    check_width(features, first.len())?;
    let mut min = first.clone();
    let mut max = first.clone();
    for row in &features[1..] {
        for (j, &x) in row.iter().enumerate() {
            min[j] = min[j].min(x);
            max[j] = max[j].max(x);
        }
    }
    Ok(NormalizationParams { min, max })
}

/// `(x - min) / (max - min)` per column; constant columns map to 0.
pub fn apply_normalization(
    features: &[Vec<f64>],
    params: &NormalizationParams,
) -> Result<Vec<Vec<f64>>> {
    check_width(features, params.width())?;
    Ok(features
        .iter()
        .map(|row| {
            row.iter()
                .zip(params.min.iter().zip(&params.max))
                .map(|(&x, (&lo, &hi))| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 })
                .collect()
        })
        .collect())
}

/// Fits on every row of the table and returns the normalised feature matrix.
pub fn normalize_table(table: &ContingencyTable) -> Result<Vec<Vec<f64>>> {
    let raw = table.feature_rows();
    let params = fit_normalization(&raw)?;
    apply_normalization(&raw, &params)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distance {
    #[default]
    Euclidean,
}

impl Distance {
    pub fn between(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// How equal distances and split votes are resolved.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    /// The lowest training row index wins. Fully deterministic, unlike the
    /// random tie-breaking of most kNN packages.
    #[default]
    FirstInRowOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    #[serde(default)]
    pub distance: Distance,
    #[serde(default)]
    pub tie_policy: TiePolicy,
}

impl KnnConfig {
    pub fn new(k: usize) -> Self {
        KnnConfig {
            k,
            distance: Distance::Euclidean,
            tie_policy: TiePolicy::FirstInRowOrder,
        }
    }
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig::new(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    /// Row position within the training matrix.
    pub train_index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Voice,
    /// Nearest first.
    pub neighbors: Vec<Neighbor>,
}

pub fn knn_predict(
    train: &[Vec<f64>],
    train_labels: &[Voice],
    test: &[Vec<f64>],
    config: &KnnConfig,
) -> Result<Vec<Prediction>> {
    if train.len() != train_labels.len() {
        return Err(Error::Consistency(format!(
            "{} training rows but {} labels",
            train.len(),
            train_labels.len()
        )));
    }
    if config.k == 0 || config.k > train.len() {
        return Err(Error::config(format!(
            "k = {} is outside 1..={} (training rows)",
            config.k,
            train.len()
        )));
    }
    let width = train[0].len();
    check_width(train, width)?;
    check_width(test, width)?;

    Ok(test
        .par_iter()
        .map(|query| predict_one(train, train_labels, query, config))
        .collect())
}

fn predict_one(
    train: &[Vec<f64>],
    labels: &[Voice],
    query: &[f64],
    config: &KnnConfig,
) -> Prediction {
    let by_rank = |a: &Neighbor, b: &Neighbor| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.train_index.cmp(&b.train_index))
    };
    let mut all: Vec<Neighbor> = train
        .iter()
        .enumerate()
        .map(|(train_index, row)| Neighbor {
            train_index,
            distance: config.distance.between(row, query),
        })
        .collect();
    let k = config.k;
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, by_rank);
        all.truncate(k);
    }
    all.sort_unstable_by(by_rank);

    let active = all
        .iter()
        .filter(|n| labels[n.train_index] == Voice::Active)
        .count();
    let label = match (2 * active).cmp(&k) {
        std::cmp::Ordering::Greater => Voice::Active,
        std::cmp::Ordering::Less => Voice::Passive,
        std::cmp::Ordering::Equal => match config.tie_policy {
            TiePolicy::FirstInRowOrder => {
                let first = all.iter().map(|n| n.train_index).min().expect("k >= 1");
                labels[first]
            }
        },
    };
    Prediction {
        label,
        neighbors: all,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborVerb {
    pub verb: String,
    pub label: Voice,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionOutcome {
    pub verb: String,
    pub true_label: Voice,
    pub predicted_label: Voice,
    /// Usage across the whole corpus, not just the test split.
    pub usage_count: u32,
    pub neighbors: Vec<NeighborVerb>,
}

impl PredictionOutcome {
    pub fn is_correct(&self) -> bool {
        self.true_label == self.predicted_label
    }
}

/// Classifies the test rows of `plan` against its training rows.
///
/// `normalized` is the table's feature matrix after [`normalize_table`].
/// Outcomes come back in ascending table-row order.
pub fn classify_split(
    table: &ContingencyTable,
    normalized: &[Vec<f64>],
    plan: &SplitPlan,
    config: &KnnConfig,
) -> Result<Vec<PredictionOutcome>> {
    if normalized.len() != table.len() {
        return Err(Error::Consistency(format!(
            "normalised matrix has {} rows, table has {}",
            normalized.len(),
            table.len()
        )));
    }
    let pick = |idx: &[usize]| {
        idx.iter()
            .map(|&i| normalized[i].clone())
            .collect::<Vec<_>>()
    };
    let train = pick(&plan.train_indices);
    let test = pick(&plan.test_indices);
    let labels: Vec<Voice> = plan
        .train_indices
        .iter()
        .map(|&i| table.rows[i].label)
        .collect();

    let predictions = knn_predict(&train, &labels, &test, config)?;
    Ok(plan
        .test_indices
        .iter()
        .zip(predictions)
        .map(|(&row, p)| {
            let truth = &table.rows[row];
            PredictionOutcome {
                verb: truth.verb.clone(),
                true_label: truth.label,
                predicted_label: p.label,
                usage_count: truth.usage_count,
                neighbors: p
                    .neighbors
                    .iter()
                    .map(|n| {
                        let nb = &table.rows[plan.train_indices[n.train_index]];
                        NeighborVerb {
                            verb: nb.verb.clone(),
                            label: nb.label,
                            distance: n.distance,
                        }
                    })
                    .collect(),
            }
        })
        .collect())
}

/// Writes `verb,true_label,predicted_label,usage_count,nearest_verb,nearest_distance`.
pub fn write_predictions<W: Write>(out: W, outcomes: &[PredictionOutcome]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "verb",
        "true_label",
        "predicted_label",
        "usage_count",
        "nearest_verb",
        "nearest_distance",
    ])?;
    for o in outcomes {
        let nearest = &o.neighbors[0];
        w.write_record([
            o.verb.as_str(),
            o.true_label.as_str(),
            o.predicted_label.as_str(),
            &o.usage_count.to_string(),
            &nearest.verb,
            &format!("{:.6}", nearest.distance),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_sizes_and_determinism() {
        let plan = make_split(10, 0.7, 42).unwrap();
        assert_eq!(plan.train_indices.len(), 7);
        assert_eq!(plan.test_indices.len(), 3);
        let mut all: Vec<_> = plan
            .train_indices
            .iter()
            .chain(&plan.test_indices)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(plan, make_split(10, 0.7, 42).unwrap());
    }

    #[test]
    fn split_rejects_degenerate_inputs() {
        assert!(make_split(1, 0.7, 0).is_err());
        assert!(make_split(10, 0.0, 0).is_err());
        assert!(make_split(10, 1.0, 0).is_err());
        assert!(make_split(10, f64::NAN, 0).is_err());
        // round(0.01 * 10) == 0
        assert!(make_split(10, 0.01, 0).is_err());
        assert!(make_split(10, 0.99, 0).is_err());
        assert!(make_split(2, 0.5, 0).is_ok());
    }

    #[test]
    fn distinct_seeds_give_distinct_plans() {
        for s in 0..100u64 {
            let a = make_split(747, 0.7, 2 * s).unwrap();
            let b = make_split(747, 0.7, 2 * s + 1).unwrap();
            assert_ne!(a.train_indices, b.train_indices);
        }
    }

    #[test]
    fn normalization_trivial_cases() {
        let m = vec![vec![0.0, 3.0], vec![2.0, 3.0], vec![4.0, 3.0]];
        let p = fit_normalization(&m).unwrap();
        assert_eq!(p.min, vec![0.0, 3.0]);
        assert_eq!(p.max, vec![4.0, 3.0]);
        let n = apply_normalization(&m, &p).unwrap();
        assert_eq!(n[1], vec![0.5, 0.0]);
        assert_eq!(n[2], vec![1.0, 0.0]);
        assert!(fit_normalization(&[]).is_err());
        assert!(matches!(
            apply_normalization(&[vec![1.0]], &p),
            Err(Error::WidthMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn nearest_of_two_points() {
        let train = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let labels = [Voice::Passive, Voice::Active];
        let out = knn_predict(&train, &labels, &[vec![0.9, 0.9]], &KnnConfig::new(1)).unwrap();
        assert_eq!(out[0].label, Voice::Active);
        assert_eq!(out[0].neighbors[0].train_index, 1);
        assert!((out[0].neighbors[0].distance - 0.02f64.sqrt()).abs() < 1e-12);
        let far = Distance::Euclidean.between(&train[0], &[0.9, 0.9]);
        assert!((far - 1.62f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_match_wins_with_zero_distance() {
        let train = vec![vec![0.2, 0.4], vec![0.2, 0.5], vec![0.9, 0.1]];
        let labels = [Voice::Passive, Voice::Active, Voice::Active];
        let out = knn_predict(&train, &labels, &[vec![0.2, 0.4]], &KnnConfig::new(1)).unwrap();
        assert_eq!(out[0].label, Voice::Passive);
        assert_eq!(out[0].neighbors[0].distance, 0.0);
    }

    #[test]
    fn ties_go_to_the_lowest_training_row() {
        // Both rows sit at distance 1 from the query.
        let train = vec![vec![1.0], vec![-1.0]];
        let q = [vec![0.0]];
        let out = knn_predict(
            &train,
            &[Voice::Active, Voice::Passive],
            &q,
            &KnnConfig::new(1),
        );
        assert_eq!(out.unwrap()[0].label, Voice::Active);
        let out = knn_predict(
            &train,
            &[Voice::Passive, Voice::Active],
            &q,
            &KnnConfig::new(1),
        );
        assert_eq!(out.unwrap()[0].label, Voice::Passive);

        // Split vote with k = 2: the lower training index decides, not the nearer one.
        let train = vec![vec![0.5], vec![0.1]];
        let out = knn_predict(
            &train,
            &[Voice::Passive, Voice::Active],
            &[vec![0.0]],
            &KnnConfig::new(2),
        )
        .unwrap();
        assert_eq!(out[0].neighbors[0].train_index, 1);
        assert_eq!(out[0].label, Voice::Passive);
    }

    #[test]
    fn predict_errors() {
        let train = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let labels = [Voice::Passive, Voice::Active];
        assert!(matches!(
            knn_predict(&train, &labels, &[vec![0.0]], &KnnConfig::new(1)),
            Err(Error::WidthMismatch { .. })
        ));
        for k in [0, 3] {
            let err = knn_predict(&train, &labels, &[vec![0.0, 0.0]], &KnnConfig::new(k));
            assert_eq!(err.unwrap_err().exit_code(), 4);
        }
    }
}
