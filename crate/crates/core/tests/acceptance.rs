//! Acceptance criteria at desk scale. Each test prints one PASS/FAIL line;
//! run with `cargo test --test acceptance -- --nocapture --test-threads=1`.

use std::time::{Duration, Instant};

use nbp::cli::{cmd_sample, Mode, RunConfig};
use nbp::measures::{analytic_laplace_nbp, BaseMeasureSpec, StepFunction};
use nbp::suites::{
    check_atom_laws, check_distinct_atoms, check_factory_integer_equivalence,
    check_factory_iterations, check_ibp_exchangeability, check_laplace, check_ordinary_component,
    check_random_base, expected_distinct_atoms, two_atom_base, TestRecord,
};
use nbp::analytics::{test_successes_before_failures, test_sum_property, ALPHA};
use nbp::rng::RngState;

const SEED: u64 = 20_240_601;
const ROWS: u64 = 20_000;

const H10: f64 = 2.928_968_253_968_254;
const LAPLACE_MIXED_R2: f64 = 0.163_501_973_853_974_37;
const DEPTH1_DISTINCT_AFTER_10: f64 = 1.751_911_247_497_970_4;

fn report(id: u32, title: &str, records: &[TestRecord], elapsed: Duration, limit: Option<Duration>) -> bool {
    let in_time = limit.is_none_or(|l| elapsed < l);
    let ok = in_time && records.iter().all(|r| r.passed);
    let limit_txt = limit.map_or(String::new(), |l| format!(" (limit {:.0}s)", l.as_secs_f64()));
    println!(
        "{} criterion {id}: {title} [{:.2}s{limit_txt}]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for r in records {
        println!(
            "    {} {} stat={} p={} {}",
            if r.passed { "ok  " } else { "FAIL" },
            r.name,
            r.statistic.map_or("-".into(), |s| format!("{s:.4}")),
            r.p_value.map_or("-".into(), |p| format!("{p:.4}")),
            r.detail
        );
    }
    ok
}

#[test]
fn criterion_1_urn_law() {
    let t = Instant::now();
    let recs = check_atom_laws("urn", &two_atom_base(), 2.0, ROWS, SEED).unwrap();
    assert_eq!(recs.len(), 2);
    assert!(report(1, "urn scheme per-atom NB(2, p) law", &recs, t.elapsed(), Some(Duration::from_secs(10))));
}

#[test]
fn criterion_2_fractional_law() {
    let t = Instant::now();
    let recs = check_atom_laws("fractional", &two_atom_base(), 2.5, ROWS, SEED).unwrap();
    assert_eq!(recs.len(), 2);
    assert!(report(2, "fractional per-atom NB(2.5, p) law", &recs, t.elapsed(), Some(Duration::from_secs(30))));
}

#[test]
fn criterion_3_ordinary_component() {
    let t = Instant::now();
    let mut recs = check_ordinary_component("ordinary-r3", 1.5, 3.0, ROWS, SEED).unwrap();
    recs.extend(check_ordinary_component("ordinary-r2.5", 1.5, 2.5, ROWS, SEED).unwrap());
    assert!(recs[0].name.contains("Poisson(4.5)"));
    assert!(recs[2].name.contains("Poisson(3.75)"));
    assert!(report(3, "ordinary atom counts Poisson(r gamma), multiplicities 1", &recs, t.elapsed(), None));
}

#[test]
fn criterion_4_laplace_functional() {
    let t = Instant::now();
    let base = BaseMeasureSpec::from_pairs(&[(0.5, 0.5)], 1.0).unwrap();
    let f = StepFunction::constant(std::f64::consts::LN_2).unwrap();
    let analytic = analytic_laplace_nbp(&base, 2.0, &f).unwrap();
    assert!((analytic - LAPLACE_MIXED_R2).abs() < 1e-12, "analytic {analytic}");
    let rec = check_laplace(100_000, SEED).unwrap();
    assert!(report(4, "Laplace functional at f = ln 2, |z| < 4", &[rec], t.elapsed(), None));
}

#[test]
fn criterion_5_random_directing_measure() {
    let t = Instant::now();
    let recs = check_random_base(100_000, SEED).unwrap();
    assert!(report(5, "random atom: mixture marginal, covariance 1.5625", &recs, t.elapsed(), None));
}

#[test]
fn criterion_6_factory_iterations() {
    let t = Instant::now();
    let rec = check_factory_iterations(0.5, 0.5, 100_000, SEED).unwrap();
    let ok = report(6, "mean factory proposals sqrt(2) at r = 0.5, p = 0.5", std::slice::from_ref(&rec), t.elapsed(), None);
    println!("    stated value 1/sqrt(2) = {:.5}: NOT MATCHED", std::f64::consts::FRAC_1_SQRT_2);
    assert!(rec.detail.contains("not matched"));
    assert!(ok);
}

#[test]
fn criterion_7_appendix_identities() {
    let t = Instant::now();
    let mut rng = RngState::substream(SEED, "appendix");
    let sum = test_sum_property(&[1.5, 2.0], 0.4, ROWS, &mut rng).unwrap();
    let sbf = test_successes_before_failures(3, 0.3, ROWS, &mut rng).unwrap();
    let recs: Vec<TestRecord> = [("sum NB(1.5)+NB(2.0)", sum), ("successes before 3 failures", sbf)]
        .into_iter()
        .map(|(name, g)| TestRecord {
            name: name.into(),
            statistic: Some(g.statistic),
            p_value: Some(g.p_value),
            passed: g.passed() && g.alpha == ALPHA,
            skipped: false,
            seed: SEED,
            samples: ROWS,
            detail: format!("dof {}", g.degrees_of_freedom),
        })
        .collect();
    assert!(report(7, "negative binomial sum and stopping identities", &recs, t.elapsed(), None));
}

/// Composite Gauss-Legendre (5 points, 400 panels) of the depth-1 integrand,
/// written independently of the library's Simpson rule.
fn depth1_oracle() -> f64 {
    let nodes = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    let weights = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
    let g = |b: f64| {
        let miss: f64 = (1..=10).map(|j| (j as f64 - b) / j as f64).product();
        (1.0 - miss) / b
    };
    let panels = 400;
    let h = 1.0 / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = (i as f64 + 0.5) * h;
            nodes.iter().zip(weights).map(|(x, w)| w * g(mid + x * h / 2.0)).sum::<f64>() * h / 2.0
        })
        .sum()
}

#[test]
fn criterion_8_ibp_pipeline() {
    let t = Instant::now();
    assert!((depth1_oracle() - DEPTH1_DISTINCT_AFTER_10).abs() < 1e-10);
    assert!((expected_distinct_atoms(1.0, 1.0, 10, 0).unwrap() - H10).abs() < 1e-12);
    assert!((expected_distinct_atoms(1.0, 1.0, 10, 1).unwrap() - DEPTH1_DISTINCT_AFTER_10).abs() < 1e-9);
    let recs = vec![
        check_distinct_atoms(0, 20_000, SEED).unwrap(),
        check_distinct_atoms(1, 20_000, SEED).unwrap(),
        check_ibp_exchangeability(0, 2_000, SEED).unwrap(),
        check_ibp_exchangeability(1, 2_000, SEED).unwrap(),
    ];
    let ok = report(8, "IBP-backed pipeline, depth 0 and 1", &recs, t.elapsed(), Some(Duration::from_secs(60)));
    println!("    depth 0 target H_10 = {H10}; depth 1 target {DEPTH1_DISTINCT_AFTER_10} (H_10 holds for its buffet layer)");
    assert!(ok);
}

#[test]
fn criterion_9_determinism() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let mut cfg = RunConfig::new(Mode::NbpIbp);
        cfg.r = Some(1.5);
        cfg.c = 1.0;
        cfg.gamma = 2.0;
        cfg.rows = 50;
        cfg.seed = 7;
        cfg.out = Some(path.clone());
        assert_eq!(cmd_sample(&cfg), 0);
        std::fs::read(path).unwrap()
    };
    let a = run("a.jsonl");
    let b = run("b.jsonl");
    let same = TestRecord {
        name: "cmd_sample byte-identical".into(),
        statistic: None,
        p_value: None,
        passed: a == b && !a.is_empty(),
        skipped: false,
        seed: 7,
        samples: 50,
        detail: format!("{} bytes", a.len()),
    };
    let eq = check_factory_integer_equivalence(5_000, SEED).unwrap();
    assert!(report(9, "reproducible output, factory equals urn at integer r", &[same, eq], t.elapsed(), None));
}
