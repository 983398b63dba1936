mod common;

use common::{
    check_distribution_invariants, check_failure_invariants, check_table_invariants, random_corpus,
    random_outcomes,
};
use failure_sieve::corpus::{recode_traits, validate_corpus, RecodeMap, TraitCategory};
use failure_sieve::failures::{confusion, multi_seed_eval, sweep_k};
use failure_sieve::featurization::{build_schema, build_table};
use failure_sieve::knn::{classify_split, make_split, normalize_table, KnnConfig};
use failure_sieve::rng::SeededRng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn table_row_sums_match_usage(seed in any::<u64>()) {
        let records = random_corpus(&mut SeededRng::new(seed), 80);
        prop_assert_eq!(check_table_invariants(&records), Ok(()));
    }

    #[test]
    fn distribution_totals_match_records(seed in any::<u64>()) {
        let records = random_corpus(&mut SeededRng::new(seed), 80);
        prop_assert_eq!(check_distribution_invariants(&records), Ok(()));
    }

    #[test]
    fn failure_lists_partition_and_rank(seed in any::<u64>()) {
        let outcomes = random_outcomes(&mut SeededRng::new(seed), 40);
        prop_assert_eq!(check_failure_invariants(&outcomes), Ok(()));
    }

    #[test]
    fn recode_keeps_count_and_verbs(seed in any::<u64>()) {
        let records = random_corpus(&mut SeededRng::new(seed), 40);
        let mut map = RecodeMap::new();
        map.insert(TraitCategory::RaceEthnicity, "Black", "PoC").unwrap();
        map.insert(TraitCategory::Gender, "Trans woman", "Woman").unwrap();
        let out = recode_traits(&records, &map);
        prop_assert_eq!(out.len(), records.len());
        for (a, b) in records.iter().zip(&out) {
            prop_assert_eq!(&a.verb, &b.verb);
            prop_assert_eq!(a.voice, b.voice);
        }
        prop_assert_eq!(recode_traits(&out, &map), out.clone());
        // Stats are a pure function of the records.
        let s1 = serde_json::to_vec(&validate_corpus(&out).unwrap()).unwrap();
        let s2 = serde_json::to_vec(&validate_corpus(&recode_traits(&records, &map)).unwrap()).unwrap();
        prop_assert_eq!(s1, s2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn one_k_one_seed_sweep_is_that_run(seed in any::<u64>(), split_seed in any::<u64>()) {
        let records = random_corpus(&mut SeededRng::new(seed), 300);
        let table = build_table(&records, &build_schema(&records).unwrap()).unwrap();
        prop_assume!(table.len() >= 4);
        let sweep = sweep_k(&table, &[1], &[split_seed], 0.7).unwrap();
        let plan = make_split(table.len(), 0.7, split_seed).unwrap();
        let outcomes =
            classify_split(&table, &normalize_table(&table).unwrap(), &plan, &KnnConfig::new(1)).unwrap();
        let m = confusion(&outcomes).unwrap();
        prop_assert_eq!(sweep.entries.len(), 1);
        prop_assert_eq!(sweep.entries[0].runs[0].confusion, m);
        prop_assert_eq!(sweep.entries[0].mean_accuracy, m.accuracy());
        prop_assert_eq!(sweep.entries[0].sd_accuracy, 0.0);

        let eval = multi_seed_eval(&table, &KnnConfig::new(1), &[split_seed], 0.7, 0).unwrap();
        prop_assert_eq!(eval.runs[0].metrics.confusion, m);
        prop_assert_eq!(eval.median_accuracy, m.accuracy());
    }
}
