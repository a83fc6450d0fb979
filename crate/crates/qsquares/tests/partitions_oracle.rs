use qsquares::partitions::{
    a_series, c41_series, c41_series_lhs, conjecture_scan, corollary_check, mk_series, qbinomial,
    truncated_pentagonal_check, Conjecture,
};
use qsquares::{jtp_bilateral, poch_expand, Exponent, Sign};

/// All partitions of `n` into parts at most `max`, as nonincreasing vectors.
fn partitions(n: i64, max: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for p in (1..=max.min(n)).rev() {
        prefix.push(p);
        partitions(n - p, p, prefix, out);
        prefix.pop();
    }
}

fn brute_mk(k: i64, n: i64) -> i64 {
    let mut all = Vec::new();
    partitions(n, n, &mut Vec::new(), &mut all);
    all.iter()
        .filter(|p| {
            let least_missing = (1..).find(|i| !p.contains(i)).unwrap();
            let above = p.iter().filter(|&&x| x > k).count();
            let below = p.iter().filter(|&&x| x < k).count();
            least_missing == k && above > below
        })
        .count() as i64
}

fn brute_a(nmax: usize) -> Vec<i64> {
    let excluded = [0, 7, 8, 13, 15, 20, 22, 27, 28];
    let doubled = [4, 9, 11, 16, 19, 24, 26, 31];
    let mut dp = vec![0i64; nmax + 1];
    dp[0] = 1;
    for part in 1..=nmax {
        let r = (part % 35) as i64;
        if excluded.contains(&r) {
            continue;
        }
        let colors = if doubled.contains(&r) { 2 } else { 1 };
        for _ in 0..colors {
            for n in part..=nmax {
                dp[n] += dp[n - part];
            }
        }
    }
    dp
}

/// Partitions fitting in a `k x (n-k)` box, counted by size.
fn brute_box(n: i64, k: i64) -> Vec<i64> {
    if k < 0 || k > n {
        return Vec::new();
    }
    let width = n - k;
    let mut counts = vec![0i64; (k * width + 1) as usize];
    let mut all = Vec::new();
    for size in 0..=k * width {
        all.clear();
        partitions(size, width.max(0), &mut Vec::new(), &mut all);
        if size == 0 {
            counts[0] = 1;
            continue;
        }
        counts[size as usize] = all.iter().filter(|p| p.len() as i64 <= k).count() as i64;
    }
    counts
}

#[test]
fn qbinomial_matches_box_partitions() {
    assert_eq!(qbinomial(4, 2, 10).integer_coeffs_i64(5), [1, 1, 2, 1, 1]);
    assert!(qbinomial(2, 5, 10).is_zero());
    assert_eq!(qbinomial(7, 0, 10).integer_coeffs_i64(3), [1, 0, 0]);
    for n in 0..=8 {
        for k in 0..=n {
            let want = brute_box(n, k);
            let got =
                qbinomial(n, k, want.len() as i64 + 3).integer_coeffs_i64(want.len() as i64 + 3);
            assert_eq!(&got[..want.len()], &want[..], "[{} choose {}]", n, k);
            assert!(got[want.len()..].iter().all(|&c| c == 0));
        }
    }
}

#[test]
fn mk_matches_enumeration() {
    let t = 26;
    for k in 1..=3 {
        let series = mk_series(k, t).unwrap().integer_coeffs_i64(t);
        for n in 0..t {
            assert_eq!(series[n as usize], brute_mk(k, n), "M_{}({})", k, n);
        }
    }
    assert_eq!(mk_series(3, 19).unwrap().integer_coeffs_i64(19)[18], 3);
    assert!(mk_series(2, 7)
        .unwrap()
        .integer_coeffs_i64(7)
        .iter()
        .all(|&c| c == 0));
}

#[test]
fn a_matches_colored_partition_count() {
    let t = 41;
    let series = a_series(t).unwrap().integer_coeffs_i64(t);
    assert_eq!(series, brute_a(40));
}

#[test]
fn truncated_pentagonal_identity() {
    for k in 1..=3 {
        let r = truncated_pentagonal_check(k, 50).unwrap();
        assert!(r.holds, "k = {}: {:?}", k, r.first_discrepancy);
    }
}

#[test]
fn corollary_convolution_identity() {
    for k in 1..=2 {
        let r = corollary_check(k, 40).unwrap();
        assert!(r.holds, "k = {}: {:?}", k, r.first_discrepancy);
    }
}

#[test]
fn pentagonal_series_two_ways() {
    let t = 200;
    let euler = poch_expand(
        Exponent::from_integer(1),
        Sign::Plus,
        Exponent::from_integer(1),
        t,
    )
    .unwrap();
    let jtp = jtp_bilateral(Exponent::new(3, 2), Exponent::new(1, 2), true, t).unwrap();
    assert_eq!(euler.rescale(2).unwrap(), jtp);
}

#[test]
fn both_forms_of_the_conjectured_series_agree() {
    for k in 1..=3 {
        assert_eq!(
            c41_series(k, 120).unwrap(),
            c41_series_lhs(k, 120).unwrap(),
            "k = {}",
            k
        );
    }
}

/// The scan is evidence, not proof. At `k = 1` it reports extra zeros.
#[test]
fn c41_scan_reports_its_empirical_zero_set() {
    let report = conjecture_scan(Conjecture::C41, 3, &[], 300).unwrap();
    let k1 = &report.cells[0];
    let zeros: Vec<i64> = k1
        .violations
        .iter()
        .filter(|v| v.coefficient == "0")
        .map(|v| v.n)
        .collect();
    assert_eq!(zeros, [5, 7, 9]);
    assert!(report.cells[1].violations.is_empty());
    assert!(report.cells[2].violations.is_empty());
}

#[test]
fn cexp_scan_has_no_violations() {
    let report = conjecture_scan(Conjecture::Cexp, 3, &[1, 2, 3, 4, 5, 6], 300).unwrap();
    assert_eq!(report.cells.len(), 3 * 6 * 2);
    assert_eq!(report.violation_count(), 0);
}

#[test]
fn flipped_sign_is_flagged_immediately() {
    let flipped = c41_series(2, 60).unwrap().neg();
    let first = flipped.terms().next().unwrap();
    assert!(first.1 < &0.into());
    assert_eq!(first.0, 7);
}
