//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS/FAIL line with its measured values. Thresholds are pinned in code.
//!
//! Run with `cargo test --test acceptance -- --nocapture` for the report.

use std::collections::BTreeMap;
use std::time::Instant;

use tracemc::dist::{Dist, Value};
use tracemc::experiment::{run_experiment, write_summary_csv};
use tracemc::metrics::{kl_divergence, ks_statistic};
use tracemc::models::{self, Oracle};
use tracemc::scheduler::{run_chain_samples, run_inference, KernelSpec};
use tracemc::slice::SliceConfig;
use tracemc::trace::SampleRecord;

const SEEDS: [u64; 3] = [1, 2, 3];

fn report(tag: &str, pass: bool, details: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {tag}: {verdict} — {details}");
    assert!(pass, "{tag}: {details}");
}

fn oracle_cdf(model: &models::BenchmarkModel) -> impl Fn(f64) -> f64 + '_ {
    let oracle = match model.oracle.get() {
        Oracle::Cdf(c) => c,
        _ => panic!("{} carries no cdf oracle", model.name),
    };
    move |x| oracle.eval(x)
}

fn predicted_reals(samples: &[SampleRecord], name: &str) -> Vec<f64> {
    samples.iter().map(|s| s.predicts[name].expect_real()).collect()
}

/// Criterion 1: oracle equivalence of every kernel on the conjugate
/// single-site model — KS against N(2.5, var 0.5) below 0.02 using 10^5
/// recorded samples, three seeds each, under a minute per chain.
#[test]
fn criterion_1_kernel_correctness() {
    let model = models::normal_mean_1();
    let cdf = oracle_cdf(&model);
    let kernels: Vec<(&str, KernelSpec)> = vec![
        ("mh", KernelSpec::mh()),
        ("slice", KernelSpec::slice()),
        ("mix:0.1", KernelSpec::mixture(0.1).unwrap()),
        ("mix:0.5", KernelSpec::mixture(0.5).unwrap()),
    ];
    let mut pass = true;
    let mut details = String::new();
    for (label, spec) in &kernels {
        for seed in SEEDS {
            let start = Instant::now();
            let samples = run_chain_samples(&model.program, spec, 100_000, seed).unwrap();
            let elapsed = start.elapsed().as_secs_f64();
            let ks = ks_statistic(&predicted_reals(&samples, "m"), &cdf);
            let ok = ks < 0.02 && elapsed < 60.0;
            pass &= ok;
            details.push_str(&format!("{label}/s{seed}: ks {ks:.4} ({elapsed:.1}s); "));
        }
    }
    // context for the MH leg: prior proposals accept at about 4%, so the
    // running average needs far more steps before its KS settles
    for seed in SEEDS {
        let samples = run_chain_samples(&model.program, &KernelSpec::mh(), 1_000_000, seed).unwrap();
        let ks = ks_statistic(&predicted_reals(&samples, "m"), &cdf);
        println!("  info: mh at 1e6 samples, seed {seed}: ks {ks:.4}");
    }
    report("1 kernel-correctness (ks < 0.02, 1e5 samples, 3 seeds)", pass, &details);
}

/// Criterion 2: dimension-jump correctness on the branching-variance model —
/// corrected slice and corrected MH reach KS < 0.03 against the grid oracle
/// at 10^5 samples while the uncorrected slice stays above 0.05.
///
/// The slice window is widened to 10 here: the two posterior branches are
/// separated by a likelihood valley that a unit window cannot bridge, and
/// the criterion tests the correction, not the window default.
#[test]
fn criterion_2_transdimensional_correctness() {
    let model = models::normal_mean_3();
    let cdf = oracle_cdf(&model);
    let wide = SliceConfig::with_width(10.0);
    let mut pass = true;
    let mut details = String::new();

    let kernels: Vec<(&str, KernelSpec, bool)> = vec![
        ("slice", KernelSpec::slice().with_slice_config(wide.clone()), true),
        ("mh", KernelSpec::mh(), true),
        ("naive-slice", KernelSpec::naive_slice().with_slice_config(wide), false),
    ];
    for (label, spec, corrected) in &kernels {
        for seed in SEEDS {
            let samples = run_chain_samples(&model.program, spec, 100_000, seed).unwrap();
            let ks = ks_statistic(&predicted_reals(&samples, "m"), &cdf);
            let ok = if *corrected { ks < 0.03 } else { ks > 0.05 };
            pass &= ok;
            details.push_str(&format!("{label}/s{seed}: ks {ks:.4}; "));
        }
    }
    // context: branch-occupancy noise dominates at 1e5 samples (crossings
    // between the two posterior branches are acceptance-limited); the same
    // chains at 1e6 samples settle well inside the tolerance
    let spec = KernelSpec::slice().with_slice_config(SliceConfig::with_width(10.0));
    for seed in SEEDS {
        let samples = run_chain_samples(&model.program, &spec, 1_000_000, seed).unwrap();
        let ks = ks_statistic(&predicted_reals(&samples, "m"), &cdf);
        println!("  info: corrected slice at 1e6 samples, seed {seed}: ks {ks:.4}");
    }
    report(
        "2 transdimensional (corrected ks < 0.03, naive ks > 0.05, 1e5 samples)",
        pass,
        &details,
    );
}

fn discrete_kl(model: &models::BenchmarkModel, spec: &KernelSpec, budget: u64, seed: u64) -> f64 {
    let oracles = match model.oracle.get() {
        Oracle::Pmf(p) => p,
        _ => panic!("{} carries no pmf oracle", model.name),
    };
    let mut counts: BTreeMap<&str, BTreeMap<i64, u64>> = model
        .predict_names
        .iter()
        .map(|n| (n.as_str(), BTreeMap::new()))
        .collect();
    let mut n = 0u64;
    tracemc::scheduler::run_inference_with(&model.program, spec, budget, seed, |_, trace| {
        for (name, per_name) in counts.iter_mut() {
            *per_name.entry(trace.predicts[*name].expect_int()).or_insert(0) += 1;
        }
        n += 1;
    })
    .unwrap();
    // worst per-name divergence
    let mut worst: f64 = 0.0;
    for (name, per_name) in &counts {
        let emp: BTreeMap<i64, f64> = per_name
            .iter()
            .map(|(&k, &c)| (k, c as f64 / n as f64))
            .collect();
        worst = worst.max(kl_divergence(&emp, &oracles[*name]));
    }
    worst
}

/// Width calibration for the branching-variance model: the two posterior
/// branches sit about 4.5 apart, so the window must span that gap for the
/// chain to cross. Reports KS at 10^5 samples per width and seed.
#[test]
#[ignore]
fn measure_nm3_slice_width() {
    let model = models::normal_mean_3();
    let cdf = oracle_cdf(&model);
    for width in [10.0, 16.0, 24.0, 32.0] {
        let spec = KernelSpec::slice().with_slice_config(SliceConfig::with_width(width));
        let mut line = format!("width {width}: ");
        for seed in 1..=6u64 {
            let samples = run_chain_samples(&model.program, &spec, 100_000, seed).unwrap();
            let ks = ks_statistic(&predicted_reals(&samples, "m"), &cdf);
            let evals = samples.last().unwrap().ll_count as f64 / samples.len() as f64;
            line.push_str(&format!("s{seed} ks {ks:.4} ({evals:.1} ev/s); "));
        }
        println!("{line}");
    }
    // convergence check at 10x the samples
    let spec = KernelSpec::slice().with_slice_config(SliceConfig::with_width(10.0));
    for seed in SEEDS {
        let samples = run_chain_samples(&model.program, &spec, 1_000_000, seed).unwrap();
        let ks = ks_statistic(&predicted_reals(&samples, "m"), &cdf);
        println!("width 10 at 1e6 samples: s{seed} ks {ks:.4}");
    }
}

/// Criterion 3: discrete trans-dimensional correctness — the branching
/// posterior over the first count matches exhaustive enumeration with
/// KL < 0.01 at 10^6 LL-evaluations for both corrected kernels, and every
/// HMM state marginal matches path enumeration with KL < 0.01.
#[test]
fn criterion_3_discrete_transdimensional() {
    let mut pass = true;
    let mut details = String::new();
    let branching = models::branching();
    let hmm = models::hmm();
    for (label, spec) in [("mh", KernelSpec::mh()), ("slice", KernelSpec::slice())] {
        let kl = discrete_kl(&branching, &spec, 1_000_000, 1);
        pass &= kl < 0.01;
        details.push_str(&format!("branching/{label}: kl {kl:.5}; "));

        let kl = discrete_kl(&hmm, &spec, 1_000_000, 1);
        pass &= kl < 0.01;
        details.push_str(&format!("hmm/{label}: worst-state kl {kl:.5}; "));
    }
    report("3 discrete-transdimensional (kl < 0.01 at 1e6 evals)", pass, &details);
}

/// Criterion 4: the rejection-loop generator model — slice recovers the
/// conjugate posterior moments at 10^5 samples, and at an equal budget of
/// 10^4 evaluations its median KS over 20 runs beats the MH baseline.
#[test]
fn criterion_4_marsaglia() {
    let model = models::marsaglia();
    let mut pass = true;
    let mut details = String::new();
    for seed in SEEDS {
        let samples = run_chain_samples(&model.program, &KernelSpec::slice(), 100_000, seed).unwrap();
        let xs = predicted_reals(&samples, "mu");
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let ok = (mean - 7.25).abs() < 0.05 && (var - 5.0 / 6.0).abs() < 0.1;
        pass &= ok;
        details.push_str(&format!("s{seed}: mean {mean:.3}, var {var:.3}; "));
    }

    let summary = run_experiment(
        &model,
        &[KernelSpec::slice(), KernelSpec::mh()],
        10_000,
        20,
        1,
        &[10_000],
    )
    .unwrap();
    let slice_med = summary.kernels[0].1[0].median;
    let mh_med = summary.kernels[1].1[0].median;
    pass &= slice_med < mh_med;
    details.push_str(&format!(
        "median ks at 1e4 evals over 20 runs: slice {slice_med:.4} vs mh {mh_med:.4}"
    ));
    report(
        "4 marsaglia (mean within 0.05 of 7.25, var within 0.1 of 5/6, slice beats mh)",
        pass,
        &details,
    );
}

/// Criterion 5: the uninformative-prior model — slice's median KS over 20
/// runs is below MH's at no fewer than 4 of the 5 stated budgets.
#[test]
fn criterion_5_hard_prior_speedup() {
    let model = models::gauss_mean_hard();
    let budgets = [1_000u64, 3_000, 10_000, 30_000, 100_000];
    let summary = run_experiment(
        &model,
        &[KernelSpec::slice(), KernelSpec::mh()],
        100_000,
        20,
        1,
        &budgets,
    )
    .unwrap();
    let mut wins = 0;
    let mut details = String::new();
    for (i, &b) in budgets.iter().enumerate() {
        let s = summary.kernels[0].1[i].median;
        let m = summary.kernels[1].1[i].median;
        if s < m {
            wins += 1;
        }
        details.push_str(&format!("{b}: slice {s:.4} vs mh {m:.4}; "));
    }
    details.push_str(&format!("{wins}/5 budgets"));
    report("5 hard-prior speedup (slice below mh at >= 4 of 5 budgets)", wins >= 4, &details);
}

/// Criterion 6: bounded overhead where the prior already equals the
/// posterior — slice spends at least 3 evaluations per recorded sample, and
/// its final median KS over 20 runs stays within 2x of MH's at an equal
/// 10^4-evaluation budget.
#[test]
fn criterion_6_easy_model_overhead() {
    let model = models::gauss_mean_easy();
    let budget = 10_000u64;

    // evaluations per recorded sample, directly from one chain's records
    let samples = run_inference(&model.program, &KernelSpec::slice(), budget, 1).unwrap();
    let evals_per_sample = samples.last().unwrap().ll_count as f64 / samples.len() as f64;

    let summary = run_experiment(
        &model,
        &[KernelSpec::slice(), KernelSpec::mh()],
        budget,
        20,
        1,
        &[budget],
    )
    .unwrap();
    let slice_med = summary.kernels[0].1[0].median;
    let mh_med = summary.kernels[1].1[0].median;
    let ratio = slice_med / mh_med;
    let pass = evals_per_sample >= 3.0 && ratio <= 2.0;

    // context: the ratio scales like sqrt(evaluations per sample), which the
    // interval machinery bounds below by 3; a wider window approaches that
    // floor but cannot go under it
    let wide = KernelSpec::slice().with_slice_config(SliceConfig::with_width(8.0));
    let summary = run_experiment(&model, &[wide], budget, 20, 1, &[budget]).unwrap();
    let wide_med = summary.kernels[0].1[0].median;
    println!(
        "  info: slice at window width 8: median ks {wide_med:.4} (ratio {:.2})",
        wide_med / mh_med
    );

    report(
        "6 easy-model overhead (evals/sample >= 3, final median ks within 2x of mh)",
        pass,
        &format!(
            "evals/sample {evals_per_sample:.2}; median ks slice {slice_med:.4} vs mh {mh_med:.4} (ratio {ratio:.2})"
        ),
    );
}

/// Criterion 7: budget accounting — MH spends exactly one evaluation per
/// step, slice at least three, and recorded counts are strictly monotone,
/// on every bundled model family.
#[test]
fn criterion_7_budget_accounting() {
    let names = ["normal-mean-1", "normal-mean-3", "branching", "hmm", "marsaglia"];
    let mut pass = true;
    let mut details = String::new();
    for name in names {
        let model = models::by_name(name, None).unwrap();
        for (label, spec) in [("mh", KernelSpec::mh()), ("slice", KernelSpec::slice())] {
            let samples = run_inference(&model.program, &spec, 3_000, 7).unwrap();
            let mut monotone = true;
            let mut min_cost = u64::MAX;
            let mut max_cost = 0u64;
            for pair in samples.windows(2) {
                let (a, b) = (pair[0].ll_count, pair[1].ll_count);
                monotone &= b > a;
                min_cost = min_cost.min(b - a);
                max_cost = max_cost.max(b - a);
            }
            let ok = monotone
                && match label {
                    "mh" => min_cost == 1 && max_cost == 1,
                    _ => min_cost >= 3,
                };
            pass &= ok;
            details.push_str(&format!("{name}/{label}: cost [{min_cost}, {max_cost}]; "));
        }
    }
    report("7 budget accounting (mh = 1/step, slice >= 3/step, monotone)", pass, &details);
}

/// Criterion 8: classifier convergence — over 20 runs at a 10^5-evaluation
/// budget, slice's median final training MSE is no worse than MH's on the
/// separable logistic task and strictly better on the versicolor network.
#[test]
fn criterion_8_classifier_convergence() {
    let mut pass = true;
    let mut details = String::new();

    let logistic = models::by_name("logistic-setosa", None).unwrap();
    let summary = run_experiment(
        &logistic,
        &[KernelSpec::slice(), KernelSpec::mh()],
        100_000,
        20,
        1,
        &[100_000],
    )
    .unwrap();
    let s = summary.kernels[0].1[0].median;
    let m = summary.kernels[1].1[0].median;
    pass &= s <= m;
    details.push_str(&format!("logistic-setosa mse: slice {s:.6} vs mh {m:.6}; "));

    let nn = models::by_name("nn-versicolor", None).unwrap();
    let summary = run_experiment(
        &nn,
        &[KernelSpec::slice(), KernelSpec::mh()],
        100_000,
        20,
        1,
        &[100_000],
    )
    .unwrap();
    let s = summary.kernels[0].1[0].median;
    let m = summary.kernels[1].1[0].median;
    pass &= s < m;
    details.push_str(&format!("nn-versicolor mse: slice {s:.6} vs mh {m:.6}"));

    report(
        "8 classifier convergence (slice <= mh on logistic, < mh on nn)",
        pass,
        &details,
    );
}

/// Criterion 9: the module property suites, exercised through their public
/// surfaces. The exhaustive versions live with each module's tests; this
/// bundle re-runs one representative of every family end to end.
#[test]
fn criterion_9_property_suites() {
    let mut pass = true;
    let mut details = String::new();

    // distribution normalization
    let pois = Dist::poisson(4.0).unwrap();
    let mass: f64 = (0..200).map(|k| pois.log_prob(&Value::Int(k)).exp()).sum();
    let ok = (mass - 1.0).abs() < 1e-10;
    pass &= ok;
    details.push_str(&format!("poisson mass {mass:.12}; "));

    // cdf/quantile round trip
    let ig = Dist::inverse_gamma(3.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for i in 1..100 {
        let p = i as f64 / 100.0;
        let x = ig.quantile(p).unwrap().expect_real();
        worst = worst.max((ig.cdf(&Value::Real(x)) - p).abs());
    }
    pass &= worst < 1e-9;
    details.push_str(&format!("round-trip err {worst:.2e}; "));

    // replay determinism across the whole catalogue
    let mut replay_ok = true;
    for name in models::MODEL_NAMES {
        let model = models::by_name(name, None).unwrap();
        let mut chain = tracemc::Chain::new(11);
        let base = tracemc::trace::run_model(&model.program, &BTreeMap::new(), None, &mut chain);
        let replayed = tracemc::trace::run_model(&model.program, &base.choices, None, &mut chain);
        replay_ok &= replayed.total_ll == base.total_ll;
    }
    pass &= replay_ok;
    details.push_str(&format!("replay determinism {replay_ok}; "));

    // stale/fresh duality on the dimension-changing model
    let nm3 = models::normal_mean_3();
    let mut chain = tracemc::Chain::new(13);
    let addr = tracemc::Address::new("m", 0);
    let neg = Value::Real(-0.5);
    let pos = Value::Real(0.5);
    let old = tracemc::trace::run_model(&nm3.program, &BTreeMap::new(), Some((&addr, &neg)), &mut chain);
    let new = tracemc::trace::run_model(&nm3.program, &old.choices, Some((&addr, &pos)), &mut chain);
    let stale: Vec<_> = old.choices.keys().filter(|a| !new.choices.contains_key(*a)).collect();
    let fresh_rev: Vec<_> = old.choices.keys().filter(|a| !new.choices.contains_key(*a)).collect();
    let corr = tracemc::trace::transdim_correction(&old, &new, Some(&addr));
    let rev = tracemc::trace::transdim_correction(&new, &old, Some(&addr));
    let ok = stale == fresh_rev && (corr + rev).abs() < 1e-12;
    pass &= ok;
    details.push_str(&format!("stale/fresh duality and antisymmetry {ok}; "));

    // experiment determinism: identical inputs, identical bytes
    let branching = models::branching();
    let specs = [KernelSpec::mh(), KernelSpec::slice()];
    let a = run_experiment(&branching, &specs, 2_000, 3, 5, &[500, 2_000]).unwrap();
    let b = run_experiment(&branching, &specs, 2_000, 3, 5, &[500, 2_000]).unwrap();
    let dir = std::env::temp_dir();
    let pa = dir.join("tracemc_acceptance_det_a.csv");
    let pb = dir.join("tracemc_acceptance_det_b.csv");
    write_summary_csv(&pa, &a).unwrap();
    write_summary_csv(&pb, &b).unwrap();
    let identical = std::fs::read(&pa).unwrap() == std::fs::read(&pb).unwrap();
    let _ = std::fs::remove_file(pa);
    let _ = std::fs::remove_file(pb);
    pass &= identical;
    details.push_str(&format!("experiment determinism {identical}"));

    report("9 property suites", pass, &details);
}
