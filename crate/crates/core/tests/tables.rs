use std::fs::File;

use lexalign_core::metrics::Metric;
use lexalign_core::report::read_metrics_csv;
use lexalign_core::stats::{compare_groups, correlate_all, exact_two_sided_p, mann_whitney, u_null_counts, UMethod};
use lexalign_core::RepoMetricsF64;

fn reference_rows() -> Vec<RepoMetricsF64> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../testdata/repo_metrics.csv");
    read_metrics_csv(File::open(path).unwrap()).unwrap()
}

#[test]
fn correlations_reproduce_reference_table() {
    // metric, r, p, rho, p
    let want = [
        (Metric::AvgCc, -0.592, 0.0551, -0.136, 0.6893),
        (Metric::NameEntropy, -0.154, 0.6522, -0.264, 0.4334),
        (Metric::ReadabilityScore, 0.314, 0.3477, 0.355, 0.2847),
        (Metric::CommentDensity, 0.445, 0.1706, 0.409, 0.2115),
        (Metric::MaintainabilityIndex, -0.325, 0.3297, -0.127, 0.7092),
    ];
    let rows = reference_rows();
    assert_eq!(rows.len(), 11);
    let out = correlate_all(&rows).unwrap();
    for ((metric, r, p, rho, sp), got) in want.into_iter().zip(&out) {
        assert_eq!(got.metric, metric);
        let c = got.outcome.as_ref().unwrap();
        assert_eq!(c.n, 11);
        assert!((c.pearson_r - r).abs() <= 0.001, "{metric} r {}", c.pearson_r);
        assert!((c.pearson_p - p).abs() <= 0.0005, "{metric} p {}", c.pearson_p);
        assert!((c.spearman_rho - rho).abs() <= 0.005, "{metric} rho {}", c.spearman_rho);
        assert!((c.spearman_p - sp).abs() <= 0.005, "{metric} rho p {}", c.spearman_p);
    }
}

#[test]
fn group_tests_reproduce_reference_table() {
    let want = [
        (Metric::AvgCc, 14.0, 0.8413),
        (Metric::NameEntropy, 6.0, 0.2222),
        (Metric::ReadabilityScore, 15.0, 0.6905),
        (Metric::CommentDensity, 21.0, 0.0952),
        (Metric::MaintainabilityIndex, 11.0, 0.8413),
    ];
    let out = compare_groups(&reference_rows(), 5).unwrap();
    for ((metric, u, p), got) in want.into_iter().zip(&out) {
        let g = got.outcome.as_ref().unwrap();
        assert_eq!(got.metric, metric);
        assert_eq!(g.u_value, u, "{metric}");
        assert!((g.p_value - p).abs() <= 1e-4, "{metric} p {}", g.p_value);
        assert_eq!(g.method, UMethod::Exact);
        assert_eq!(
            g.high_group,
            [
                "flask-main.zip",
                "tensorflow-master.zip",
                "airflow-main.zip",
                "scikit-learn-main.zip",
                "ansible-devel.zip"
            ]
        );
    }
}

/// Two-sided p for every U by enumerating all rank assignments of the first group.
fn brute_force_p(n1: usize, n2: usize) -> Vec<f64> {
    let n = n1 + n2;
    let mut counts = vec![0u64; n1 * n2 + 1];
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let rank_sum: usize = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).sum();
        counts[rank_sum - n1 * (n1 + 1) / 2] += 1;
    }
    let total: u64 = counts.iter().sum();
    (0..counts.len())
        .map(|u| {
            let lo: u64 = counts[..=u].iter().sum();
            let hi: u64 = counts[u..].iter().sum();
            (2.0 * lo.min(hi) as f64 / total as f64).min(1.0)
        })
        .collect()
}

#[test]
fn exact_p_matches_enumeration() {
    for n1 in 1..10 {
        for n2 in 1..=(10 - n1) {
            let want = brute_force_p(n1, n2);
            assert_eq!(u_null_counts(n1, n2).len(), want.len());
            for (u, w) in want.iter().enumerate() {
                let got = exact_two_sided_p(u, n1, n2);
                assert!((got - w).abs() <= 1e-12, "n1={n1} n2={n2} u={u}: {got} vs {w}");
            }
        }
    }
}

#[test]
fn samples_use_exact_path_without_ties() {
    let a = [1.5, 7.0, 3.25];
    let b = [2.0, 9.0, 4.0, 8.5];
    let r = mann_whitney(&a, &b).unwrap();
    // pairs (a > b): 7>2, 7>4, 3.25>2
    assert_eq!(r.u, 3.0);
    assert_eq!(r.method, UMethod::Exact);
    assert!((r.p - brute_force_p(3, 4)[3]).abs() < 1e-15);
}
