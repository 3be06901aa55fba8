//! Randomized invariant checks for the numeric and text primitives.

mod common;

use std::collections::HashSet;

use proptest::prelude::*;

use persuasion::dynamics::{chunk_sizes, BinnedRate};
use persuasion::features::extract::split_quarters;
use persuasion::features::tokenize::TokenizedText;
use persuasion::features::{argument_shape_features, FeatureMatrix};
use persuasion::lexicons::parse_lexicon;
use persuasion::models::{
    auc, bootstrap_test, grouped_folds, logistic_gradient, logistic_loss, mcnemar, paired_t_p,
    pair_predict, pairwise_accuracy_from_scores, permutation_test, LogRegModel, PairOutcome,
    Penalty, StandardizerState,
};
use persuasion::pairing::jaccard;

fn word_vec() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-f]{1,3}", 0..40)
}

fn word_set() -> impl Strategy<Value = HashSet<String>> {
    word_vec().prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jaccard_bounds_and_symmetry(a in word_set(), b in word_set()) {
        let j = jaccard(&a, &b);
        prop_assert!((0.0..=1.0).contains(&j));
        prop_assert_eq!(j, jaccard(&b, &a));
        if !a.is_empty() {
            prop_assert_eq!(jaccard(&a, &a), 1.0);
        }
        // containment pushes similarity to |a|/|b|
        if a.is_subset(&b) && !b.is_empty() {
            prop_assert!((j - a.len() as f64 / b.len() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn quarters_concatenate_to_the_original(tokens in word_vec()) {
        let quarters = split_quarters(&tokens);
        let rebuilt: Vec<String> = quarters.iter().flat_map(|q| q.iter().cloned()).collect();
        prop_assert_eq!(&rebuilt, &tokens);
        let sizes: Vec<usize> = quarters.iter().map(|q| q.len()).collect();
        let (min, max) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        prop_assert!(max - min <= 1);
        // any larger quarter precedes every smaller one
        for w in sizes.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let naive = common::naive_quarters(&tokens);
        for (a, b) in quarters.iter().zip(naive.iter()) {
            prop_assert_eq!(&a.to_vec(), b);
        }
    }

    #[test]
    fn chunk_sizes_partition_evenly(n in 0usize..10_000) {
        let sizes = chunk_sizes(n);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        prop_assert!(sizes[0] >= sizes[3]);
        prop_assert!(sizes[0] - sizes[3] <= 1);
        for w in sizes.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn entropy_is_bounded_by_distinct_words(tokens in prop::collection::vec("[a-e]{1,2}", 1..60)) {
        let stop = parse_lexicon("", "stopwords");
        let text = tokens.join(" ");
        let tok = TokenizedText::new(&text, &text, &stop);
        let f: persuasion::features::FeatureVector<f64> =
            argument_shape_features(&tok);
        let h = f.get("word_entropy").unwrap();
        let distinct = tokens.iter().collect::<HashSet<_>>().len() as f64;
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= distinct.log2() + 1e-9);
        let ttr = f.get("type_token_ratio").unwrap();
        prop_assert!(ttr > 0.0 && ttr <= 1.0 + 1e-12);
    }

    #[test]
    fn pair_prediction_is_antisymmetric(
        weights in prop::collection::vec(-3.0f64..3.0, 1..8),
        row in prop::collection::vec(prop::option::weighted(0.9, -5.0f64..5.0), 1..8),
    ) {
        let d = weights.len().min(row.len());
        let names: Vec<String> = (0..d).map(|i| format!("f{i}")).collect();
        let model = LogRegModel::<f64> {
            weights: weights[..d].to_vec(),
            intercept: 0.0,
            penalty: Penalty::L1,
            lambda: 0.0,
            class_weights: (1.0, 1.0),
            standardizer: StandardizerState {
                names: names.clone(),
                means: vec![0.0; d],
                stds: vec![1.0; d],
                dropped: Vec::new(),
            },
            converged: true,
            cv_score: 0.0,
        };
        let row = row[..d].to_vec();
        let flipped: Vec<Option<f64>> = row.iter().map(|c| c.map(|v| -v)).collect();
        let s = model.score_row(&row, &names);
        let s_flipped = model.score_row(&flipped, &names);
        prop_assert!((s + s_flipped).abs() < 1e-9);
        if s > 0.0 {
            prop_assert_eq!(pair_predict(&model, &row, &names), PairOutcome::PositiveWins);
            prop_assert_eq!(pair_predict(&model, &flipped, &names), PairOutcome::NegativeWins);
        }
    }

    #[test]
    fn standardizer_recovers_unit_moments(
        rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 3), 2..30),
    ) {
        let names: Vec<String> = (0..3).map(|i| format!("c{i}")).collect();
        let matrix = FeatureMatrix {
            names: names.clone(),
            rows: rows.iter().map(|r| r.iter().map(|&v| Some(v)).collect()).collect(),
        };
        let st = StandardizerState::fit(&matrix);
        let out = st.apply_matrix(&matrix);
        let n = out.len() as f64;
        for j in 0..3 {
            let col: Vec<f64> = out.iter().map(|r| r[j]).collect();
            let mean = col.iter().sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-8);
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let raw: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let raw_mean = raw.iter().sum::<f64>() / n;
            let raw_var = raw.iter().map(|v| (v - raw_mean).powi(2)).sum::<f64>() / n;
            if raw_var > 1e-9 {
                prop_assert!((var - 1.0).abs() < 1e-6);
            } else {
                prop_assert!(col.iter().all(|v| v.abs() < 1e-9));
            }
        }
    }

    #[test]
    fn auc_complement_identity(
        scores in prop::collection::vec(-10.0f64..10.0, 2..40),
        flips in prop::collection::vec(any::<bool>(), 2..40),
    ) {
        let n = scores.len().min(flips.len());
        let scores = &scores[..n];
        let mut labels = flips[..n].to_vec();
        // force both classes
        labels[0] = true;
        labels[n - 1] = false;
        let a = auc(scores, &labels).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
        let b = auc(&negated, &labels).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-9);
        prop_assert!((a - common::naive_auc(scores, &labels)).abs() < 1e-9);
    }

    #[test]
    fn test_p_values_stay_in_range(
        ca in prop::collection::vec(any::<bool>(), 1..40),
        cb in prop::collection::vec(any::<bool>(), 1..40),
        diffs in prop::collection::vec(-2.0f64..2.0, 1..20),
        seed in any::<u64>(),
    ) {
        let n = ca.len().min(cb.len());
        let p = mcnemar(&ca[..n], &cb[..n]);
        prop_assert!((0.0..=1.0).contains(&p));
        let p = permutation_test(&diffs, 100, seed);
        prop_assert!(p > 0.0 && p <= 1.0);
        if let Some((p, _)) = paired_t_p(&diffs) {
            prop_assert!((0.0..=1.0).contains(&p));
        }
        let mut labels = vec![false; diffs.len()];
        labels[0] = true;
        if diffs.len() > 1 {
            let p = bootstrap_test(&diffs, &labels, 50, seed).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn pairwise_accuracy_bounds_and_zero_model(
        scores in prop::collection::vec(-5.0f64..5.0, 0..50),
    ) {
        let acc = pairwise_accuracy_from_scores(&scores);
        prop_assert!((0.0..=1.0).contains(&acc));
        let zeros = vec![0.0f64; scores.len()];
        prop_assert_eq!(pairwise_accuracy_from_scores(&zeros), 0.5);
    }

    #[test]
    fn binned_rate_invariants(trials in 0usize..10_000, frac in 0.0f64..=1.0) {
        let successes = ((trials as f64) * frac).floor() as usize;
        let r: BinnedRate<f64> = BinnedRate::from_counts(3, trials, successes);
        prop_assert!((0.0..=1.0).contains(&r.rate));
        if trials > 0 {
            prop_assert!((r.rate * trials as f64 - successes as f64).abs() < 1e-9);
            let se = (r.rate * (1.0 - r.rate) / trials as f64).sqrt();
            prop_assert!((r.stderr - se).abs() < 1e-12);
        } else {
            prop_assert_eq!(r.rate, 0.0);
            prop_assert_eq!(r.stderr, 0.0);
        }
    }

    #[test]
    fn grouped_folds_keep_groups_together(
        groups in prop::collection::vec("[a-h]", 1..60),
    ) {
        let folds = grouped_folds(&groups, 5);
        prop_assert_eq!(folds.len(), groups.len());
        for (i, gi) in groups.iter().enumerate() {
            prop_assert!(folds[i] < 5);
            for (j, gj) in groups.iter().enumerate() {
                if gi == gj {
                    prop_assert_eq!(folds[i], folds[j]);
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences(
        rows in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 2..12),
        flips in prop::collection::vec(any::<bool>(), 2..12),
        weights in prop::collection::vec(-1.0f64..1.0, 2),
        intercept in -1.0f64..1.0,
    ) {
        let n = rows.len().min(flips.len());
        let x = rows[..n].to_vec();
        let y: Vec<f64> = flips[..n].iter().map(|&f| if f { 1.0 } else { -1.0 }).collect();
        let w1 = vec![1.0; n];
        let (gw, gb) = logistic_gradient(&x, &y, &w1, &weights, intercept);
        let eps = 1e-6;
        for k in 0..2 {
            let mut hi = weights.clone();
            let mut lo = weights.clone();
            hi[k] += eps;
            lo[k] -= eps;
            let fd = (logistic_loss(&x, &y, &w1, &hi, intercept)
                - logistic_loss(&x, &y, &w1, &lo, intercept))
                / (2.0 * eps);
            prop_assert!((fd - gw[k]).abs() <= 1e-4 * (1.0 + fd.abs()));
        }
        let fd_b = (logistic_loss(&x, &y, &w1, &weights, intercept + eps)
            - logistic_loss(&x, &y, &w1, &weights, intercept - eps))
            / (2.0 * eps);
        prop_assert!((fd_b - gb).abs() <= 1e-4 * (1.0 + fd_b.abs()));
    }
}
