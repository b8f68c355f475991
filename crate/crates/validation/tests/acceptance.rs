//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any
//! criterion fails. Every check below uses oracles written here, not the
//! library's own helpers.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use methagg::corpus::{extract_files, scan_corpus, DEFAULT_INCLUDE};
use methagg_core::aggregate::{aggregate, Technique};
use methagg_core::filtering::{redun_eliminate, select_representatives, varclus};
use methagg_core::matrix::MetricMatrix;
use methagg_core::metrics::{analyze_source, Metric};
use methagg_core::stats::{
    adjusted_r2, auc, cliffs_delta, fit_linear, fit_logistic, mann_whitney_exact, mann_whitney_normal, DesignMatrix,
    Magnitude, ModelKind,
};
use methagg_core::study::{
    assign_folds, correlation_increase, derive_seed, repeated_cv, run_rq3, synth_corpus, CvInput, CvPlan, Filtering,
    ModelLabel, StudyConfig, SynthParams,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Aggregator agreement with the naive oracles, relative to max(1, |oracle|).
const AGG_TOL: f64 = 1e-9;
/// Invariance checks, relative to max(1, |value|).
const INVARIANCE_TOL: f64 = 1e-9;
/// Halstead values recomputed from hand counts, relative.
const HALSTEAD_TOL: f64 = 1e-12;
/// Normal-approximation versus exact Mann-Whitney p-values.
const MW_TOL: f64 = 0.02;
/// Exact Mann-Whitney p-values versus the enumeration oracle.
const MW_EXACT_TOL: f64 = 1e-12;
/// Residual orthogonality, relative to ||y||.
const ORTHO_TOL: f64 = 1e-6;
/// Logistic score at convergence, per coordinate.
const SCORE_TOL: f64 = 1e-6;
/// Fold MSE for exactly linear data.
const EXACT_MSE_TOL: f64 = 1e-10;
/// Redundancy cutoff for adjusted R².
const REDUNDANCY_CUTOFF: f64 = 0.9;
/// Correlation cut for clusters.
const CLUSTER_THRESHOLD: f64 = 0.7;
/// Largest Cliff's |d| still labelled negligible.
const NEGLIGIBLE_D: f64 = 0.147;
/// Corpus size and seeds for the model-comparison criterion.
const RQ3_FILES: usize = 2000;
const RQ3_CORPUS_SEED: u64 = 1;
const RQ3_CV_SEED: u64 = 42;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

// ---------- naive aggregation oracles ----------

fn o_sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

fn o_mean(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for v in x {
        s += v;
    }
    s / x.len() as f64
}

fn o_quantile(x: &[f64], q: f64) -> f64 {
    let s = o_sorted(x);
    let h = (s.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= s.len() {
        return s[lo];
    }
    s[lo] + (h - lo as f64) * (s[lo + 1] - s[lo])
}

fn o_central(x: &[f64], p: i32) -> f64 {
    let m = o_mean(x);
    x.iter().map(|v| (v - m).powi(p)).sum()
}

fn o_constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

fn o_sd(x: &[f64]) -> f64 {
    if x.len() < 2 || o_constant(x) { 0.0 } else { (o_central(x, 2) / (x.len() as f64 - 1.0)).sqrt() }
}

fn o_skew(x: &[f64]) -> f64 {
    if x.len() < 2 || o_constant(x) {
        return 0.0;
    }
    let n = x.len() as f64;
    (o_central(x, 3) / n) / (o_central(x, 2) / (n - 1.0)).powf(1.5)
}

fn o_kurt(x: &[f64]) -> f64 {
    if x.len() < 2 || o_constant(x) {
        return 0.0;
    }
    (o_central(x, 4) / x.len() as f64) / o_sd(x).powi(4) - 3.0
}

fn o_theil(x: &[f64]) -> f64 {
    let m = o_mean(x);
    if m == 0.0 {
        return 0.0;
    }
    x.iter().map(|&v| if v == 0.0 { 0.0 } else { (v / m) * (v / m).ln() }).sum::<f64>() / x.len() as f64
}

fn o_gini(x: &[f64]) -> f64 {
    let s = o_sorted(x);
    let total: f64 = s.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let n = s.len() as f64;
    let weighted: f64 = s.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
    2.0 * weighted / (n * total) - (n + 1.0) / n
}

fn o_gini_mad(x: &[f64]) -> f64 {
    let m = o_mean(x);
    if m == 0.0 {
        return 0.0;
    }
    let n = x.len() as f64;
    let pairs: f64 = x.iter().flat_map(|a| x.iter().map(move |b| (a - b).abs())).sum();
    pairs / (2.0 * n * n * m)
}

fn oracle(x: &[f64], t: Technique) -> f64 {
    match t {
        Technique::Sum => x.iter().sum(),
        Technique::Avg => o_mean(x),
        Technique::Med => o_quantile(x, 0.5),
        Technique::Sd => o_sd(x),
        Technique::Iqr => o_quantile(x, 0.75) - o_quantile(x, 0.25),
        Technique::Skew => o_skew(x),
        Technique::Kurt => o_kurt(x),
        Technique::Theil => o_theil(x),
        Technique::Gini => o_gini(x),
    }
}

/// Seeded non-negative vector: continuous log-normal or small integers with
/// ties and zeros.
fn random_vector(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.random_range(1..=50);
    if rng.random_bool(0.5) {
        (0..n).map(|_| (rng.random_range(-2.0..2.0f64) * 1.2 + 1.6).exp()).collect()
    } else {
        (0..n).map(|_| rng.random_range(0..=20) as f64).collect()
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let x = random_vector(&mut rng);
        for t in Technique::ALL {
            let got = aggregate(&x, t).map_err(|e| format!("case {case} {t:?}: {e}"))?;
            let want = oracle(&x, t);
            worst = worst.max((got - want).abs() / want.abs().max(1.0));
            ensure(close(got, want, AGG_TOL), || format!("case {case} {t:?}: {got} vs oracle {want} on {x:?}"))?;
        }
        let g = aggregate(&x, Technique::Gini).unwrap();
        let mad = o_gini_mad(&x);
        ensure(close(g, mad, AGG_TOL), || format!("case {case}: gini {g} vs mean-absolute-difference {mad}"))?;
    }
    Ok(format!("1000 vectors x 9 techniques, worst relative error {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let scale_equivariant = [Technique::Sum, Technique::Avg, Technique::Med, Technique::Sd, Technique::Iqr];
    let scale_invariant = [Technique::Skew, Technique::Kurt, Technique::Theil, Technique::Gini];
    let shift_invariant = [Technique::Sd, Technique::Iqr, Technique::Skew, Technique::Kurt];
    let mut checks = 0usize;
    for case in 0..200 {
        let x = random_vector(&mut rng);
        let c = rng.random_range(0.1..10.0);
        let shift = rng.random_range(-5.0..5.0);
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
        let mut permuted = x.clone();
        permuted.shuffle(&mut rng);
        let a = |v: &[f64], t| aggregate(v, t).unwrap();
        let mut check = |ok: bool, what: &str, t: Technique| {
            checks += 1;
            ensure(ok, || format!("case {case}: {what} fails for {t:?} (c={c}, shift={shift})"))
        };
        for t in Technique::ALL {
            check(a(&permuted, t) == a(&x, t), "permutation", t)?;
        }
        for t in scale_equivariant {
            check(close(a(&scaled, t), c * a(&x, t), INVARIANCE_TOL), "scale equivariance", t)?;
        }
        for t in scale_invariant {
            check(close(a(&scaled, t), a(&x, t), INVARIANCE_TOL), "scale invariance", t)?;
        }
        for t in [Technique::Avg, Technique::Med] {
            check(close(a(&shifted, t), a(&x, t) + shift, INVARIANCE_TOL), "translation equivariance", t)?;
        }
        for t in shift_invariant {
            check(close(a(&shifted, t), a(&x, t), INVARIANCE_TOL), "translation invariance", t)?;
        }
        let n = x.len() as f64;
        let g = a(&x, Technique::Gini);
        check((0.0..=(n - 1.0) / n + 1e-12).contains(&g), "gini bounds", Technique::Gini)?;
        let th = a(&x, Technique::Theil);
        check(th >= 0.0 && ((th == 0.0) == o_constant(&x) || n == 1.0), "theil sign", Technique::Theil)?;
    }
    Ok(format!("200 vectors, {checks} checks"))
}

fn criterion_3() -> Outcome {
    let include: Vec<String> = DEFAULT_INCLUDE.map(String::from).to_vec();
    let files = scan_corpus(&fixtures().join("mini"), &include, &[]).map_err(|e| e.to_string())?;
    let ex = extract_files(&files).map_err(|e| e.to_string())?;
    ensure(ex.skipped.is_empty(), || format!("skipped {:?}", ex.skipped))?;
    let hand = fs::read_to_string(fixtures().join("mini_hand_counts.csv")).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<String>> = hand.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    ensure(rows.len() >= 12 && rows.len() == ex.methods.len(), || format!("{} hand rows, {} extracted", rows.len(), ex.methods.len()))?;
    for r in &rows {
        let id = format!("{}:{}", r[0], r[1]);
        let m = ex.methods.iter().find(|m| m.file == r[0] && m.method == r[1]).ok_or_else(|| format!("{id} missing"))?;
        let u: Vec<u32> = r[2..].iter().map(|v| v.parse().unwrap()).collect();
        ensure([m.start_line, m.loc, m.vg, m.evg, m.ivg] == u[..5], || {
            format!("{id}: got line/loc/vg/evg/ivg {:?}, hand {:?}", [m.start_line, m.loc, m.vg, m.evg, m.ivg], &u[..5])
        })?;
        let (n1, n2, big_n1, big_n2) = (u[5] as f64, u[6] as f64, u[7] as f64, u[8] as f64);
        let n = big_n1 + big_n2;
        let v = n * (n1 + n2).log2();
        let (d, l) = if n2 == 0.0 { (0.0, 1.0) } else { let d = n1 / 2.0 * big_n2 / n2; (d, 1.0 / d) };
        let want = [n, v, l, d, l * v, d * v, v / 3000.0, d * v / 18.0];
        let got = [m.hal_n, m.hal_v, m.hal_l, m.hal_d, m.hal_i, m.hal_e, m.hal_b, m.hal_t];
        for (k, (g, w)) in got.iter().zip(want).enumerate() {
            ensure((g - w).abs() <= HALSTEAD_TOL * w.abs().max(1.0), || format!("{id}: halstead[{k}] {g} vs {w}"))?;
        }
    }
    let mut graphs = 0;
    for f in &files {
        let src = fs::read_to_string(&f.path).map_err(|e| e.to_string())?;
        for a in analyze_source(&f.rel, &src).map_err(|e| e.to_string())? {
            let by_graph = a.cfg.edge_count() as i64 - a.cfg.node_count() as i64 + 2;
            ensure(a.metrics.vg as i64 == by_graph, || format!("{}: v(G) {} vs E-N+2 {by_graph}", a.span.name, a.metrics.vg))?;
            graphs += 1;
        }
    }
    Ok(format!("{} methods match hand counts; E-N+2 holds for {graphs}", rows.len()))
}

/// Exact two-sided p by enumerating every assignment of ranks 1..n to `a`.
fn mw_exact_oracle(na: usize, nb: usize, u: f64) -> f64 {
    let n = na + nb;
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let rank_sum: usize = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).sum();
        let uu = rank_sum as f64 - (na * (na + 1)) as f64 / 2.0;
        total += 1;
        le += (uu <= u) as u64;
        ge += (uu >= u) as u64;
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for case in 0..500 {
        let n = rng.random_range(2..=10);
        let ties = rng.random_bool(0.5);
        let scores: Vec<f64> =
            (0..n).map(|_| if ties { rng.random_range(0..4) as f64 } else { rng.random_range(0.0..1.0) }).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        labels[0] = true;
        labels[1] = false;
        labels.shuffle(&mut rng);
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for i in (0..n).filter(|&i| labels[i]) {
            for j in (0..n).filter(|&j| !labels[j]) {
                pairs += 1.0;
                wins += if scores[i] > scores[j] { 1.0 } else if scores[i] == scores[j] { 0.5 } else { 0.0 };
            }
        }
        let got = auc(&scores, &labels).map_err(|e| e.to_string())?;
        ensure(got == wins / pairs, || format!("auc case {case}: {got} vs brute force {}", wins / pairs))?;
    }

    let mut worst = (0.0f64, 0, 0);
    let mut failures = 0;
    let mut cases = 0;
    for na in 1..=8usize {
        for nb in 1..=8usize {
            for _ in 0..5 {
                let mut pool: Vec<f64> = (0..na + nb).map(|i| i as f64 + rng.random_range(0.0..0.5)).collect();
                pool.shuffle(&mut rng);
                let (a, b) = pool.split_at(na);
                let exact = mann_whitney_exact(a, b).map_err(|e| e.to_string())?;
                let want = mw_exact_oracle(na, nb, exact.u);
                ensure((exact.p - want).abs() <= MW_EXACT_TOL, || format!("exact p {} vs enumeration {want} at ({na},{nb})", exact.p))?;
                let normal = mann_whitney_normal(a, b).map_err(|e| e.to_string())?;
                let err = (normal.p - want).abs();
                cases += 1;
                if err > MW_TOL {
                    failures += 1;
                }
                if err > worst.0 {
                    worst = (err, na, nb);
                }
            }
        }
    }

    for (d, label) in [
        (0.0, Magnitude::Negligible),
        (0.1469, Magnitude::Negligible),
        (0.147, Magnitude::Small),
        (0.3299, Magnitude::Small),
        (0.33, Magnitude::Medium),
        (0.4739, Magnitude::Medium),
        (0.474, Magnitude::Large),
        (1.0, Magnitude::Large),
    ] {
        ensure(Magnitude::of(d) == label, || format!("|d| = {d} labelled {:?}", Magnitude::of(d)))?;
    }
    for _ in 0..200 {
        let a: Vec<f64> = (0..rng.random_range(1..12)).map(|_| rng.random_range(0..6) as f64).collect();
        let b: Vec<f64> = (0..rng.random_range(1..12)).map(|_| rng.random_range(0..6) as f64).collect();
        let dom: i64 = a.iter().flat_map(|x| b.iter().map(move |y| (x > y) as i64 - (x < y) as i64)).sum();
        let d = dom as f64 / (a.len() * b.len()) as f64;
        let es = cliffs_delta(&a, &b).map_err(|e| e.to_string())?;
        let want = if d.abs() < 0.147 {
            Magnitude::Negligible
        } else if d.abs() < 0.33 {
            Magnitude::Small
        } else if d.abs() < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        };
        ensure(es.cliffs_d == d && es.magnitude == want, || format!("cliffs {a:?} {b:?}: {es:?}, oracle d={d}"))?;
    }
    ensure(failures == 0, || {
        format!(
            "auc, exact p and cliffs checks pass, but the normal approximation misses exact p by more than {MW_TOL} in {failures}/{cases} tie-free cases; worst {:.4} at sizes ({},{})",
            worst.0, worst.1, worst.2
        )
    })?;
    Ok(format!("500 auc cases, {cases} Mann-Whitney cases (worst {:.4}), cliffs labels", worst.0))
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, rng)).collect()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst_ortho = 0.0f64;
    for case in 0..50 {
        let n = rng.random_range(20..80);
        let mut cols: Vec<Vec<f64>> = (0..3).map(|_| normals(&mut rng, n)).collect();
        if case % 5 == 0 {
            cols.push(cols[0].iter().zip(&cols[1]).map(|(a, b)| a + 2.0 * b).collect());
        }
        let noise = normals(&mut rng, n);
        let y: Vec<f64> = (0..n).map(|i| 3.0 + cols[0][i] - 0.5 * cols[1][i] + 2.0 * cols[2][i] + noise[i] * 5.0).collect();
        let names: Vec<String> = (0..cols.len()).map(|j| format!("x{j}")).collect();
        let m = DesignMatrix::new(names, cols.clone(), y.clone()).map_err(|e| e.to_string())?;
        let fit = fit_linear(&m).map_err(|e| e.to_string())?;
        let r: Vec<f64> = fit.predict_all(&m).unwrap().iter().zip(&y).map(|(p, y)| y - p).collect();
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ones = vec![1.0; n];
        for c in std::iter::once(&ones).chain(&cols) {
            let dot: f64 = c.iter().zip(&r).map(|(a, b)| a * b).sum();
            worst_ortho = worst_ortho.max(dot.abs() / y_norm);
            ensure(dot.abs() < ORTHO_TOL * y_norm, || format!("linear case {case}: |X'r| = {dot:e}"))?;
        }
    }
    let mut worst_score = 0.0f64;
    for case in 0..20 {
        let n = 200;
        let x1 = normals(&mut rng, n);
        let x2 = normals(&mut rng, n);
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let p = 1.0 / (1.0 + (-(0.3 + x1[i] - 0.7 * x2[i])).exp());
                if rng.random_bool(p) { 1.0 } else { 0.0 }
            })
            .collect();
        let m = DesignMatrix::new(vec!["a".into(), "b".into()], vec![x1.clone(), x2.clone()], y.clone()).map_err(|e| e.to_string())?;
        let fit = fit_logistic(&m).map_err(|e| e.to_string())?;
        ensure(fit.converged, || format!("logistic case {case} did not converge"))?;
        let p = fit.predict_all(&m).unwrap();
        for c in [&vec![1.0; n], &x1, &x2] {
            let s: f64 = c.iter().zip(y.iter().zip(&p)).map(|(x, (y, p))| x * (y - p)).sum();
            worst_score = worst_score.max(s.abs());
            ensure(s.abs() < SCORE_TOL, || format!("logistic case {case}: score {s:e}"))?;
        }
    }
    let x1 = normals(&mut rng, 150);
    let x2: Vec<f64> = (0..150).map(|_| rng.random_range(0.0..20.0)).collect();
    let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| -1.0 + 4.0 * a + 0.25 * b).collect();
    let matrix = MetricMatrix::from_columns(vec![("a".into(), x1), ("b".into(), x2)]).unwrap();
    let preds = vec!["a".to_string(), "b".to_string()];
    let labels = vec![false; 150];
    let input = CvInput { matrix: &matrix, predictors: &preds, counts: &y, labels: &labels, key: "exact" };
    let out = repeated_cv(input, ModelKind::Linear, &CvPlan::new(5)).map_err(|e| e.to_string())?;
    let worst_mse = out.values.iter().map(|v| v.value).fold(0.0, f64::max);
    ensure(out.values.len() == 100, || format!("{} fold values", out.values.len()))?;
    ensure(worst_mse < EXACT_MSE_TOL, || format!("exact-linear fold MSE {worst_mse:e}"))?;
    Ok(format!("orthogonality {worst_ortho:.1e}, logistic score {worst_score:.1e}, exact-linear MSE {worst_mse:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let a = normals(&mut rng, 120);
    let b = normals(&mut rng, 120);
    let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let d = normals(&mut rng, 120);
    let cols = vec![("vg.sum".to_string(), a), ("vg.avg".into(), b), ("vg.med".into(), c), ("loc.sum".into(), d)];
    let m = MetricMatrix::from_columns(cols).unwrap();
    let report = redun_eliminate(&m, REDUNDANCY_CUTOFF).map_err(|e| e.to_string())?;
    ensure(report.discarded.len() == 1, || format!("discarded {:?}", report.discarded))?;
    for v in &report.retained {
        let others: Vec<String> = report.retained.iter().filter(|o| *o != v).cloned().collect();
        let y = m.column_by_name(v).unwrap();
        let dm = DesignMatrix::from_matrix(&m, &others, &y).map_err(|e| e.to_string())?;
        let r2 = adjusted_r2(&dm, &fit_linear(&dm).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(r2 < REDUNDANCY_CUTOFF, || format!("{v} survives with adjusted R2 {r2}"))?;
    }

    let base = normals(&mut rng, 150);
    let jitter = |rng: &mut ChaCha8Rng, s: f64| normals(rng, 150).into_iter().map(move |z| z * s).collect::<Vec<f64>>();
    let theil: Vec<f64> = base.iter().zip(jitter(&mut rng, 0.1)).map(|(x, e)| x + e).collect();
    let med: Vec<f64> = base.iter().zip(jitter(&mut rng, 0.1)).map(|(x, e)| 2.0 * x + e).collect();
    let iqr: Vec<f64> = base.iter().zip(jitter(&mut rng, 0.1)).map(|(x, e)| (x + e).exp()).collect();
    let other = normals(&mut rng, 150);
    let cols = vec![("loc.theil".to_string(), theil), ("loc.med".into(), med), ("loc.iqr".into(), iqr), ("vg.skew".into(), other)];
    let m = MetricMatrix::from_columns(cols).unwrap();
    let tree = varclus(&m).map_err(|e| e.to_string())?;
    let rep = select_representatives(&tree, CLUSTER_THRESHOLD);
    ensure(rep.retained == ["loc.med", "vg.skew"], || format!("retained {:?}", rep.retained))?;
    Ok(format!("dropped {} of the collinear triple; kept loc.med from its cluster", report.discarded[0].var))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 }
}

fn criterion_7() -> Outcome {
    let (mut sums, mut meds) = (Vec::new(), Vec::new());
    for seed in 1..=20u64 {
        let d = synth_corpus(&SynthParams::default(), seed).and_then(|c| c.dataset("synth")).map_err(|e| e.to_string())?;
        let r = correlation_increase(&d).map_err(|e| e.to_string())?;
        let delta = |t| r.cell(Metric::Vg, t).and_then(|c| c.abs).ok_or_else(|| format!("seed {seed}: undefined delta for {t:?}"));
        sums.push(delta(Technique::Sum)?);
        meds.push(delta(Technique::Med)?);
    }
    let (s, m) = (median(sums), median(meds));
    ensure(s > 0.0 && m <= 0.0, || format!("median v(G) delta: Sum {s:.4}, Med {m:.4}"))?;
    Ok(format!("median v(G) delta over 20 corpora: Sum {s:+.4}, Med {m:+.4}"))
}

fn criterion_8() -> Outcome {
    let params = SynthParams { files: RQ3_FILES, ..SynthParams::default() };
    let d = synth_corpus(&params, RQ3_CORPUS_SEED).and_then(|c| c.dataset("synth")).map_err(|e| e.to_string())?;
    let cfg = StudyConfig::new(RQ3_CV_SEED);
    let n = d.n_files();
    for kind in [ModelKind::Linear, ModelKind::Logistic] {
        let key = format!("{}/{}", d.name, kind.name());
        let strata = (kind == ModelKind::Logistic).then_some(d.defective.as_slice());
        for rep in 0..cfg.plan.repetitions {
            let folds = assign_folds(n, cfg.plan.k, strata, derive_seed(cfg.plan.seed, &key, rep));
            let mut sizes = vec![0usize; cfg.plan.k];
            for &f in &folds {
                ensure(f < cfg.plan.k, || format!("fold index {f}"))?;
                sizes[f] += 1;
            }
            let spread = sizes.iter().max().unwrap() - sizes.iter().min().unwrap();
            ensure(sizes.iter().sum::<usize>() == n && spread <= 1, || format!("{key} rep {rep}: fold sizes {sizes:?}"))?;
        }
    }
    let r = run_rq3(&d, &cfg).map_err(|e| e.to_string())?;
    ensure(r.gaps.is_empty(), || format!("gaps {:?}", r.gaps))?;
    for o in &r.outcomes {
        let mut seen: Vec<(usize, usize)> = o.values.iter().map(|v| (v.repetition, v.fold)).chain(o.skipped.iter().map(|s| (s.repetition, s.fold))).collect();
        seen.sort();
        seen.dedup();
        ensure(seen.len() == 100, || format!("{} {} {:?}: {} distinct folds", o.filtering, o.label, o.kind, seen.len()))?;
    }
    let mut notes = Vec::new();
    for f in Filtering::ALL {
        let sum = r.mean(f, ModelLabel::Only(Technique::Sum), ModelKind::Logistic).ok_or("missing Sum AUC")?;
        let med = r.mean(f, ModelLabel::Only(Technique::Med), ModelKind::Logistic).ok_or("missing Med AUC")?;
        ensure(sum > med, || format!("{}: Sum AUC {sum:.4} <= Med AUC {med:.4}", f.name()))?;
        notes.push(format!("{} AUC Sum {sum:.3} > Med {med:.3}", f.name()));
        for kind in [ModelKind::Linear, ModelKind::Logistic] {
            let c = r.comparison(f, kind).ok_or("missing comparison")?;
            ensure(c.cliffs_d.abs() < NEGLIGIBLE_D, || format!("{} {}: All vs Sum |d| = {:.4}", f.name(), kind.name(), c.cliffs_d.abs()))?;
            notes.push(format!("{} {} |d| {:.3}", f.name(), kind.name(), c.cliffs_d.abs()));
        }
    }
    Ok(notes.join("; "))
}

/// One invocation of the command line, as the binary would run it.
fn cli(args: &[&str]) -> Result<(), String> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut stdin: &[u8] = b"";
    let mut io = methagg::Io { stdin: &mut stdin, stdout: &mut out, stderr: &mut err };
    let code = methagg::run(std::iter::once("methagg").chain(args.iter().copied()), &mut io);
    ensure(code == 0, || format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let corpus = path("corpus.csv");
    cli(&["synth", "--files", "150", "--seed", "3", "--out", &corpus])?;
    for out in ["run1", "run2"] {
        cli(&["study", "all", "--seed", "42", "--methods", &corpus, "--out", &path(out)])?;
    }
    let list = |p: &Path| -> Vec<String> {
        let mut v: Vec<String> = fs::read_dir(p).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        v.sort();
        v
    };
    let (a, b) = (dir.path().join("run1"), dir.path().join("run2"));
    let names = list(&a);
    ensure(names == list(&b) && names.len() == 18, || format!("bundle listings differ or incomplete: {names:?}"))?;
    ensure(names.iter().any(|n| n == "run_manifest.json"), || "no manifest".into())?;
    for n in &names {
        ensure(fs::read(a.join(n)).unwrap() == fs::read(b.join(n)).unwrap(), || format!("{n} differs"))?;
    }
    let manifest = fs::read_to_string(a.join("run_manifest.json")).unwrap();
    ensure(manifest.contains("\"sha256\"") && manifest.contains("\"seed\": 42"), || "manifest lacks digests or seed".into())?;
    Ok(format!("{} files byte-identical across two runs", names.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("aggregator oracle equivalence", criterion_1),
        ("aggregator invariances", criterion_2),
        ("metric extraction golden tests", criterion_3),
        ("statistical kernel oracles", criterion_4),
        ("regression correctness", criterion_5),
        ("filtering behaviour", criterion_6),
        ("size-correlation direction over synthetic corpora", criterion_7),
        ("model comparison sanity", criterion_8),
        ("end-to-end determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
