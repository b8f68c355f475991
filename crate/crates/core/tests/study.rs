use methagg_core::aggregate::{column_name, Technique};
use methagg_core::filtering::{r2_against, FilterConfig};
use methagg_core::matrix::MetricMatrix;
use methagg_core::metrics::Metric;
use methagg_core::stats::ModelKind;
use methagg_core::study::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn files_dataset(columns: Vec<(String, Vec<f64>)>, bugs: Vec<f64>) -> Dataset {
    let files = MetricMatrix::from_columns(columns).unwrap();
    Dataset {
        name: "constructed".into(),
        methods: MetricMatrix::new(Vec::new()),
        method_files: Vec::new(),
        files,
        defective: bugs.iter().map(|&b| b > 0.0).collect(),
        bugs,
    }
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn loc_columns(mut make: impl FnMut(Technique) -> Vec<f64>) -> Vec<(String, Vec<f64>)> {
    Technique::ALL.iter().map(|&t| (column_name("loc", t), make(t))).collect()
}

#[test]
fn rq1_single_method_files_have_zero_delta_for_location_aggregations() {
    let p = SynthParams { files: 60, mean_methods: 1.0, ..SynthParams::default() };
    let d = synth_corpus(&p, 5).unwrap().dataset("single").unwrap();
    assert_eq!(d.methods.n_rows(), d.n_files());
    let r = correlation_increase(&d).unwrap();
    assert_eq!(r.metrics.len(), 11);
    assert!(!r.metrics.contains(&Metric::Loc));
    for &m in &r.metrics {
        for t in [Technique::Sum, Technique::Avg, Technique::Med] {
            let c = r.cell(m, t).unwrap();
            if let (Some(a), Some(b)) = (c.rho_method, c.rho_file) {
                assert_eq!(a, b, "{m} {t:?}");
                assert_eq!(c.abs, Some(0.0));
            }
        }
    }
}

#[test]
fn rq2_uncorrelated_aggregations_all_survive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = files_dataset(loc_columns(|_| normals(&mut rng, 300)), vec![0.0; 300]);
    let m = redundancy_measures(&d, Metric::Loc, &FilterConfig::default()).unwrap();
    let names: Vec<String> = Technique::ALL.iter().map(|&t| column_name("loc", t)).collect();
    for (i, v) in m.iter().enumerate() {
        let others: Vec<String> = names.iter().filter(|n| **n != names[i]).cloned().collect();
        let expected = r2_against(&d.files, &names[i], &others).clamp(0.0, 1.0);
        assert!((v - expected).abs() < 1e-12);
        assert!(*v < 0.1);
    }
}

#[test]
fn rq2_cluster_discards_score_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let base: Vec<Vec<f64>> = (0..9).map(|_| normals(&mut rng, 200)).collect();
    let cols = loc_columns(|t| match t {
        Technique::Kurt => base[Technique::Skew.rank() as usize - 1].iter().map(|v| 2.0 * v + 1.0).collect(),
        Technique::Gini => base[Technique::Theil.rank() as usize - 1].iter().map(|v| v * v * v).collect(),
        t => base[t.rank() as usize - 1].clone(),
    });
    let d = files_dataset(cols, vec![0.0; 200]);
    let m = redundancy_measures(&d, Metric::Loc, &FilterConfig::default()).unwrap();
    let idx = |t: Technique| Technique::ALL.iter().position(|&x| x == t).unwrap();
    assert_eq!(m[idx(Technique::Kurt)], 1.0);
    assert_eq!(m[idx(Technique::Gini)], 1.0);
    assert!(m[idx(Technique::Skew)] < 1.0);
    assert!(m[idx(Technique::Theil)] < 1.0);
    assert!(m.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn rq2_exact_linear_combination_is_redundant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let avg = normals(&mut rng, 200);
    // med is negatively correlated with avg so that their sum stays below the
    // clustering threshold against either one
    let med: Vec<f64> = avg.iter().zip(normals(&mut rng, 200)).map(|(a, z)| -0.5 * a + 0.75f64.sqrt() * z).collect();
    let sum: Vec<f64> = avg.iter().zip(&med).map(|(a, m)| a + m).collect();
    let cols = loc_columns(|t| match t {
        Technique::Sum => sum.clone(),
        Technique::Avg => avg.clone(),
        Technique::Med => med.clone(),
        _ => normals(&mut rng, 200),
    });
    let d = files_dataset(cols, vec![0.0; 200]);
    let m = redundancy_measures(&d, Metric::Loc, &FilterConfig::default()).unwrap();
    assert!(m[0] >= 0.9, "{m:?}");
    assert!(m.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn rq2_single_survivor_scores_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let x = normals(&mut rng, 50);
    let cols = loc_columns(|t| x.iter().map(|v| v * (t.rank() as f64) + t.rank() as f64).collect());
    let d = files_dataset(cols, vec![0.0; 50]);
    let m = redundancy_measures(&d, Metric::Loc, &FilterConfig::default()).unwrap();
    assert_eq!(m[0], 0.0);
    assert!(m[1..].iter().all(|&v| v == 1.0));
}

#[test]
fn cv_exact_linear_response_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let x1 = normals(&mut rng, 120);
    let x2: Vec<f64> = (0..120).map(|_| rng.random_range(0.0..10.0)).collect();
    let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 3.0 + 2.0 * a - b).collect();
    let d = files_dataset(vec![("a".into(), x1), ("b".into(), x2)], y);
    let preds = vec!["a".to_string(), "b".to_string()];
    let input = CvInput { matrix: &d.files, predictors: &preds, counts: &d.bugs, labels: &d.defective, key: "exact" };
    let out = repeated_cv(input, ModelKind::Linear, &CvPlan::new(1)).unwrap();
    assert_eq!(out.values.len(), 100);
    assert!(out.values.iter().all(|v| v.value < 1e-10));
}

#[test]
fn cv_random_labels_give_chance_auc() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let x = normals(&mut rng, 500);
    let labels: Vec<f64> = (0..500).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect();
    let d = files_dataset(vec![("x".into(), x)], labels);
    let preds = vec!["x".to_string()];
    let input = CvInput { matrix: &d.files, predictors: &preds, counts: &d.bugs, labels: &d.defective, key: "null" };
    let out = repeated_cv(input, ModelKind::Logistic, &CvPlan::new(2)).unwrap();
    assert_eq!(out.values.len() + out.skipped.len(), 100);
    let mean = out.mean().unwrap();
    assert!((mean - 0.5).abs() <= 0.05, "{mean}");
    let recomputed = out.values.iter().map(|v| v.value).sum::<f64>() / out.values.len() as f64;
    assert_eq!(mean, recomputed);
    assert_eq!(out, repeated_cv(input, ModelKind::Logistic, &CvPlan::new(2)).unwrap());
}

#[test]
fn unstratified_single_class_folds_are_skipped() {
    let x: Vec<f64> = (0..40).map(f64::from).collect();
    let mut labels = vec![0.0; 40];
    labels[3] = 1.0;
    labels[30] = 1.0;
    let d = files_dataset(vec![("x".into(), x)], labels);
    let preds = vec!["x".to_string()];
    let input = CvInput { matrix: &d.files, predictors: &preds, counts: &d.bugs, labels: &d.defective, key: "skip" };
    let plan = CvPlan { stratified: false, ..CvPlan::new(3) };
    let out = repeated_cv(input, ModelKind::Logistic, &plan).unwrap();
    assert!(!out.skipped.is_empty());
    assert_eq!(out.values.len() + out.skipped.len(), 100);
}

#[test]
fn rq3_is_deterministic_and_complete() {
    let d = synth_corpus(&SynthParams { files: 120, ..SynthParams::default() }, 21).unwrap().dataset("s").unwrap();
    let cfg = StudyConfig { plan: CvPlan { repetitions: 3, ..CvPlan::new(9) }, ..StudyConfig::new(9) };
    let a = run_rq3(&d, &cfg).unwrap();
    assert_eq!(a, run_rq3(&d, &cfg).unwrap());
    assert!(a.gaps.is_empty(), "{:?}", a.gaps);
    assert_eq!(a.outcomes.len(), 2 * 10 * 2);
    for o in &a.outcomes {
        assert_eq!(o.values.len() + o.skipped.len(), 30);
        let mean = o.values.iter().map(|v| v.value).sum::<f64>() / o.values.len() as f64;
        assert_eq!(o.mean(), Some(mean));
    }
    let retained = a.retained_table();
    assert_eq!(retained.rows.len(), 10);
    assert_eq!(retained.value(&["s", "All"], "f1_candidates"), Some(108.0));
    assert_eq!(retained.value(&["s", "Sum"], "f1_candidates"), Some(12.0));
    assert_eq!(a.comparisons.len(), 4);
    let mse = a.means_table(ModelKind::Linear).to_csv();
    assert!(mse.starts_with("dataset,filtering,all,sum,avg,med,sd,iqr,skew,kurt,theil,gini\n"));
}
