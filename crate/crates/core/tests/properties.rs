mod common;

use bayesnid_core::eval::{accuracy, confusion_matrix};
use bayesnid_core::model::ModelParams;
use bayesnid_core::preprocess::{compute_column_stats, impute, Binarizer, ClampPolicy, CountTransform, RawTable};
use bayesnid_core::select::{
    bin_continuous, chi2_scores, chi_square_statistic, correlation_with_target, select_by_correlation, ContingencyTable,
};
use bayesnid_core::{
    deserialize_model, fit, fit_bernoulli, serialize_model, CleanDataset, FitConfig, Matrix, Transform, Variant,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn tag(variant: Variant) -> Transform {
    match variant {
        Variant::Gaussian => Transform::Continuous,
        Variant::Multinomial => Transform::Counts,
        Variant::Bernoulli => Transform::Binary,
    }
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![
        Just(Variant::Gaussian),
        Just(Variant::Multinomial),
        Just(Variant::Bernoulli)
    ]
}

/// Labelled table with every class present; `hi` bounds the integer cell values.
fn labelled(
    max_rows: usize,
    max_cols: usize,
    max_classes: usize,
) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>, usize)> {
    (1..=max_classes, 1..=max_cols).prop_flat_map(move |(k, d)| {
        (k.max(2)..=max_rows).prop_flat_map(move |n| {
            (
                prop::collection::vec(prop::collection::vec(-50.0f64..50.0, d), n),
                prop::collection::vec(0..k, n - k),
                Just(k),
            )
                .prop_map(move |(rows, extra, k)| {
                    let mut labels: Vec<usize> = (0..k).collect();
                    labels.extend(extra);
                    (rows, labels, k)
                })
        })
    })
}

fn continuous(rows: &[Vec<f64>], labels: &[usize], k: usize) -> CleanDataset {
    let names = (0..k).map(|c| format!("c{c}")).collect();
    CleanDataset::from_parts(
        Matrix::from_rows(rows).unwrap(),
        labels.to_vec(),
        names,
        Transform::Continuous,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scores_match_brute_force(seed in any::<u64>(), v in variant(), eps_exp in -3.0f64..0.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let binary = v == Variant::Bernoulli;
        let tiny = random_tiny(&mut rng, binary);
        let cfg = FitConfig { var_epsilon: 10f64.powf(eps_exp), ..FitConfig::default() };
        let model = fit(v, &tiny.dataset(tag(v)), &cfg).unwrap();
        let x = random_query(&mut rng, tiny.rows[0].len(), binary);
        let got = model.joint_log_likelihood(&x).unwrap();
        let want = oracle_scores(v, &tiny, &cfg, &x);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-9, "{v}: {g} vs {w}");
        }
    }

    #[test]
    fn posteriors_normalise(seed in any::<u64>(), v in variant(), scale in 1.0f64..1e4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let binary = v == Variant::Bernoulli;
        let tiny = random_tiny(&mut rng, binary);
        let model = fit(v, &tiny.dataset(tag(v)), &FitConfig::default()).unwrap();
        let mut x = random_query(&mut rng, tiny.rows[0].len(), binary);
        if !binary {
            x.iter_mut().for_each(|e| *e *= scale);
        }
        let post = model.predict_posterior(&x).unwrap();
        prop_assert!(post.iter().all(|p| p.is_finite() && *p >= 0.0));
        prop_assert!((post.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let log_post = model.predict_log_posterior(&x).unwrap();
        prop_assert!(log_post.iter().all(|l| !l.is_nan() && *l <= 0.0));
        prop_assert!((log_post.iter().map(|l| l.exp()).sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn smoothing_keeps_parameters_in_range(seed in any::<u64>(), alpha in 0.01f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bin = random_tiny(&mut rng, true);
        let model = fit_bernoulli(&bin.dataset(Transform::Binary), &FitConfig::default()).unwrap();
        let ModelParams::Bernoulli(p) = model.params() else { unreachable!() };
        prop_assert!(p.cond_prob().as_slice().iter().all(|&q| q > 0.0 && q < 1.0));

        let counts = random_tiny(&mut rng, false);
        let cfg = FitConfig { alpha, ..FitConfig::default() };
        let model = fit(Variant::Multinomial, &counts.dataset(Transform::Counts), &cfg).unwrap();
        let ModelParams::Multinomial(p) = model.params() else { unreachable!() };
        for row in p.log_cond_prob().iter_rows() {
            prop_assert!((row.iter().map(|l| l.exp()).sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn common_prior_shift_keeps_predictions(seed in any::<u64>(), v in variant(), delta in -50.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let binary = v == Variant::Bernoulli;
        let tiny = random_tiny(&mut rng, binary);
        let model = fit(v, &tiny.dataset(tag(v)), &FitConfig { var_epsilon: 1e-3, ..FitConfig::default() }).unwrap();
        let shifted = model.with_shifted_priors(delta);
        for _ in 0..5 {
            let x = random_query(&mut rng, tiny.rows[0].len(), binary);
            let scores = model.joint_log_likelihood(&x).unwrap();
            let mut sorted = scores.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            // a shift can only reorder classes whose scores already differ by rounding noise
            if sorted.len() > 1 && sorted[0] - sorted[1] < 1e-9 * sorted[0].abs().max(1.0) {
                continue;
            }
            prop_assert_eq!(model.predict(&x).unwrap(), shifted.predict(&x).unwrap());
        }
    }

    #[test]
    fn bernoulli_matches_literal_pseudocode(
        d in 1usize..=4,
        k in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rand::Rng::random_range(&mut rng, k..=5);
        let labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rand::Rng::random_range(&mut rng, 0..k) }).collect();
        let rows: Vec<Vec<f64>> = (0..n).map(|_| random_query(&mut rng, d, true)).collect();
        let tiny = Tiny { rows: rows.clone(), labels: labels.clone(), classes: k };
        let model = fit_bernoulli(&tiny.dataset(Transform::Binary), &FitConfig::default()).unwrap();
        let docs: Vec<_> = rows.iter().zip(&labels).map(|(r, &l)| (terms(r), l)).collect();
        let trace = train_bernoulli_nb(k, &docs, d);
        let ModelParams::Bernoulli(p) = model.params() else { unreachable!() };
        for c in 0..k {
            prop_assert!((model.priors().probabilities()[c] - trace.prior[c]).abs() <= 1e-15);
            for t in 0..d {
                prop_assert!((p.cond_prob().get(c, t) - trace.condprob[t][c]).abs() <= 1e-15);
            }
        }
        for _ in 0..4 {
            let x = random_query(&mut rng, d, true);
            let (best, scores) = apply_bernoulli_nb(&trace, &terms(&x));
            let got = model.joint_log_likelihood(&x).unwrap();
            for (g, s) in got.iter().zip(&scores) {
                prop_assert!((g - s).abs() <= 1e-12);
            }
            let mut sorted = scores.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            if sorted.len() == 1 || sorted[0] - sorted[1] > 1e-9 {
                prop_assert_eq!(model.predict(&x).unwrap(), best);
            }
        }
    }

    #[test]
    fn fitting_is_deterministic_and_round_trips(seed in any::<u64>(), v in variant()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tiny = random_tiny(&mut rng, v == Variant::Bernoulli);
        let data = tiny.dataset(tag(v));
        let a = fit(v, &data, &FitConfig::default()).unwrap();
        let b = fit(v, &data, &FitConfig::default()).unwrap();
        prop_assert_eq!(&a, &b);
        let bytes = serialize_model(&a);
        prop_assert_eq!(&bytes, &serialize_model(&b));
        prop_assert_eq!(deserialize_model(&bytes).unwrap(), a);
    }

    #[test]
    fn transforms_always_satisfy_their_tags((rows, labels, k) in labelled(15, 4, 3)) {
        let data = continuous(&rows, &labels, k);
        let counts = CountTransform::fit(&data).apply(&data).unwrap();
        prop_assert_eq!(counts.transform(), Transform::Counts);
        prop_assert!(counts.features().as_slice().iter().all(|&v| v >= 0.0 && v.is_finite()));
        let binarizer = Binarizer::fit(&data);
        let binary = binarizer.apply(&data).unwrap();
        prop_assert!(binary.features().as_slice().iter().all(|&v| v == 0.0 || v == 1.0));
        prop_assert_eq!(binary.n_rows(), data.n_rows());
        // binarising binary data again is the identity
        prop_assert_eq!(binarizer.apply(&binary).unwrap(), binary);
    }

    #[test]
    fn imputation_is_idempotent_and_keeps_rows(
        cells in prop::collection::vec(prop::option::weighted(0.8, -20.0f64..20.0), 3..40),
        signed in any::<bool>(),
    ) {
        let cols = 3;
        let n = cells.len() / cols;
        let cells = cells[..n * cols].to_vec();
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let table = RawTable::new(names, cells, vec!["x".into(); n], "Label").unwrap();
        let policy = if signed { ClampPolicy::new(["b"]) } else { ClampPolicy::default() };
        let stats = compute_column_stats(&table);
        let once = impute(&table, &stats, &policy);
        prop_assert_eq!(once.n_rows(), table.n_rows());
        prop_assert!(once.is_complete());
        let twice = impute(&once, &stats, &policy);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn chi_square_symmetries(
        table in (2usize..5, 2usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(1u64..40, c), r)),
    ) {
        let t = ContingencyTable::from_counts(table.clone()).unwrap();
        let chi = chi_square_statistic(&t);
        prop_assert!(chi.statistic >= 0.0);
        let swapped = chi_square_statistic(&t.transpose());
        prop_assert!((chi.statistic - swapped.statistic).abs() <= 1e-9 * chi.statistic.max(1.0));
        prop_assert_eq!(chi.dof, swapped.dof);
        let direct = chi_square_direct(&table.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect::<Vec<_>>());
        prop_assert!((chi.statistic - direct).abs() <= 1e-9 * direct.max(1.0));
    }

    #[test]
    fn chi_square_zero_on_proportional_tables(
        row in prop::collection::vec(1u64..20, 2..5),
        factors in prop::collection::vec(1u64..6, 2..5),
    ) {
        let table: Vec<Vec<u64>> = factors.iter().map(|f| row.iter().map(|v| v * f).collect()).collect();
        let chi = chi_square_statistic(&ContingencyTable::from_counts(table).unwrap());
        prop_assert!(chi.statistic.abs() <= 1e-12);
    }

    #[test]
    fn feature_permutation_permutes_scores((rows, labels, k) in labelled(20, 4, 3), rot in 0usize..4) {
        let data = continuous(&rows, &labels, k);
        let d = data.n_features();
        let perm: Vec<usize> = (0..d).map(|j| (j + rot) % d).collect();
        let permuted = data.select_columns(&perm);
        let (corr, corr_p) = (correlation_with_target(&data), correlation_with_target(&permuted));
        let (chi, chi_p) = (chi2_scores(&data, 4).unwrap(), chi2_scores(&permuted, 4).unwrap());
        for (new_j, &old_j) in perm.iter().enumerate() {
            prop_assert_eq!(corr_p[new_j], corr[old_j]);
            prop_assert_eq!(chi_p[new_j], chi[old_j]);
        }
    }

    #[test]
    fn positive_scaling_leaves_scores_alone((rows, labels, k) in labelled(20, 3, 3), s in prop::sample::select(vec![0.5f64, 2.0, 4.0, 1024.0])) {
        let data = continuous(&rows, &labels, k);
        let scaled = data.with_features(data.features().map(|v| v * s), Transform::Continuous).unwrap();
        for j in 0..data.n_features() {
            let col = data.features().column(j);
            let col_s = scaled.features().column(j);
            prop_assert_eq!(bin_continuous(&col, 5), bin_continuous(&col_s, 5));
        }
        prop_assert_eq!(chi2_scores(&data, 5).unwrap(), chi2_scores(&scaled, 5).unwrap());
        for (a, b) in correlation_with_target(&data).iter().zip(correlation_with_target(&scaled)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn correlation_selection_shrinks_with_threshold((rows, labels, k) in labelled(20, 4, 3), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let data = continuous(&rows, &labels, k);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a = select_by_correlation(&data, lo).unwrap().selected_sorted();
        let b = select_by_correlation(&data, hi).unwrap().selected_sorted();
        prop_assert!(b.iter().all(|j| a.contains(j)));
    }

    #[test]
    fn confusion_counts_conserved_and_permutable(
        pairs in prop::collection::vec((0usize..4, 0usize..4), 1..60),
        rot in 0usize..4,
    ) {
        let (truth, pred): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let cm = confusion_matrix(&truth, &pred, 4).unwrap();
        prop_assert_eq!(cm.total(), truth.len() as u64);
        prop_assert_eq!(accuracy(&confusion_matrix(&truth, &truth, 4).unwrap()).unwrap(), 1.0);
        let perm: Vec<usize> = (0..4).map(|c| (c + rot) % 4).collect();
        let t2: Vec<usize> = truth.iter().map(|&c| perm[c]).collect();
        let p2: Vec<usize> = pred.iter().map(|&c| perm[c]).collect();
        let cm2 = confusion_matrix(&t2, &p2, 4).unwrap();
        prop_assert_eq!(&cm2.counts, &cm.permuted(&perm).counts);
        prop_assert_eq!(accuracy(&cm2).unwrap(), accuracy(&cm).unwrap());
    }
}
