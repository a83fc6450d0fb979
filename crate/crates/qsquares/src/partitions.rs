//! Partition generating functions around the truncated pentagonal number theorem.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{QSeries, Sign};
use crate::squares::{SignPattern, SquareClassSpec};

fn unit(t: i64) -> QSeries {
    QSeries::from_parts(1, 0, t.max(0), vec![BigInt::one()])
}

fn pochs(t: i64, factors: &[(i64, i64)], power: i64) -> Result<QSeries> {
    let mut s = unit(t);
    for &(a, m) in factors {
        s.apply_pochhammer(a, Sign::Plus, m, power)?;
    }
    Ok(s)
}

/// `(q;q)_n` as a polynomial truncated below `q^t`.
pub fn finite_poch(n: i64, t: i64) -> QSeries {
    let mut s = unit(t);
    for i in 1..=n {
        s.apply_binomial(i, Sign::Plus, 1);
    }
    s
}

/// Gaussian binomial `[n choose k]`; zero outside `0 <= k <= n`.
pub fn qbinomial(n: i64, k: i64, t: i64) -> QSeries {
    if k < 0 || n < 0 || k > n {
        return QSeries::zero(1, t);
    }
    let mut s = unit(t);
    for i in (n - k + 1)..=n {
        s.apply_binomial(i, Sign::Plus, 1);
    }
    for i in 1..=k {
        s.apply_binomial(i, Sign::Plus, -1);
    }
    s
}

/// `sum_{n>=k} q^(C(k,2)+(k+1)n) / (q;q)_n [n-1 choose k-1]`.
pub fn mk_series(k: i64, t: i64) -> Result<QSeries> {
    if k < 1 {
        return Err(Error::Domain(format!("k = {} must be at least 1", k)));
    }
    let mut acc = QSeries::zero(1, t);
    let mut n = k;
    loop {
        let e = k * (k - 1) / 2 + (k + 1) * n;
        if e >= t {
            break;
        }
        let mut term = qbinomial(n - 1, k - 1, t - e);
        for i in 1..=n {
            term.apply_binomial(i, Sign::Plus, -1);
        }
        acc = acc.add(&term.shift(e.into()));
        n += 1;
    }
    Ok(acc)
}

/// `1 / ((q,q^4;q^5)_inf (q^2,q^3,q^4,q^5;q^7)_inf)`.
pub fn a_series(t: i64) -> Result<QSeries> {
    pochs(t, &[(1, 5), (4, 5), (2, 7), (3, 7), (4, 7), (5, 7)], -1)
}

/// `sum_{j=lo}^{hi} (-1)^j q^(j(3j-1)/2)`.
fn pentagonal_window(lo: i64, hi: i64, t: i64) -> QSeries {
    let mut c = vec![BigInt::zero(); t.max(0) as usize];
    for j in lo..=hi {
        let e = j * (3 * j - 1) / 2;
        if e < t {
            c[e as usize] += if j.rem_euclid(2) == 0 { 1 } else { -1 };
        }
    }
    QSeries::from_parts(1, 0, t, c)
}

fn sign_k(k: i64) -> BigInt {
    if k.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Outcome of a coefficientwise comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub k: i64,
    pub truncation: i64,
    pub holds: bool,
    pub first_discrepancy: Option<i64>,
}

fn compare(name: &str, k: i64, t: i64, a: &QSeries, b: &QSeries) -> CheckReport {
    let d = a.sub(b);
    let first = d.first_nonzero().map(|(i, _)| i);
    CheckReport {
        name: name.into(),
        k,
        truncation: t,
        holds: first.is_none(),
        first_discrepancy: first,
    }
}

/// Left side of the truncated pentagonal identity,
/// `(-1)^(k-1) / (q;q)_inf sum_{n=-(k-1)}^{k} (-1)^n q^(n(3n-1)/2)`.
pub fn truncated_pentagonal_lhs(k: i64, t: i64) -> Result<QSeries> {
    let mut s = pentagonal_window(-(k - 1), k, t);
    s.apply_pochhammer(1, Sign::Plus, 1, -1)?;
    Ok(s.scale(&sign_k(k - 1)))
}

/// Checks the truncated pentagonal identity below `q^t`.
pub fn truncated_pentagonal_check(k: i64, t: i64) -> Result<CheckReport> {
    if k < 1 {
        return Err(Error::Domain(format!("k = {} must be at least 1", k)));
    }
    let lhs = truncated_pentagonal_lhs(k, t)?;
    let rhs = mk_series(k, t)?.add(&QSeries::from_parts(1, 0, t, vec![sign_k(k - 1)]));
    Ok(compare("truncated-pentagonal", k, t, &lhs, &rhs))
}

/// Exponents `a_j` and bits `t(j)` of the `840m+361` sequence below `t`.
pub fn sequence_840m361(t: i64) -> Result<Vec<(i64, Sign)>> {
    let pattern = SignPattern::Table {
        period: 16,
        zeros: vec![0, 1, 3, 5, 10, 12, 14, 15],
    };
    let spec = SquareClassSpec::from_pattern(840, 361, &pattern)?;
    Ok(spec
        .roots(t)
        .into_iter()
        .map(|s| ((s * s - spec.bsq) / spec.k, spec.sign_of_root(s)))
        .collect())
}

/// Checks, for `0 <= n <= nmax`,
/// `(-1)^(k-1) (sum_j (-1)^j A(n - j(3j-1)/2) - delta(n)) = sum_j (-1)^(t(j)) M_k(n - a_j)`
/// with `delta(n) = (-1)^(t(j))` when `n = a_j` and zero otherwise.
pub fn corollary_check(k: i64, nmax: i64) -> Result<CheckReport> {
    let t = nmax + 1;
    let a = a_series(t)?;
    let seq = sequence_840m361(t)?;
    let mut delta = vec![BigInt::zero(); t as usize];
    for (e, s) in &seq {
        delta[*e as usize] += s.as_i64();
    }
    let delta = QSeries::from_parts(1, 0, t, delta);
    let lhs = a
        .mul(&pentagonal_window(-(k - 1), k, t))
        .sub(&delta)
        .scale(&sign_k(k - 1));
    let rhs = delta.mul(&mk_series(k, t)?);
    Ok(compare("corollary", k, t, &lhs, &rhs))
}

/// The conjectures that can be scanned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conjecture {
    /// Zero and positivity pattern of the truncated series times `(q,q^6,q^7;q^7)`.
    C41,
    /// Sign pattern of the `A(n)` convolution.
    C41Inequalities,
    /// Nonnegativity of the `S`-twisted series over `(q,q^4;q^5)` and `(q^2,q^3;q^5)`.
    Cexp,
}

impl std::str::FromStr for Conjecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Conjecture> {
        match s.to_ascii_lowercase().as_str() {
            "c41" => Ok(Conjecture::C41),
            "c41-inequalities" | "c41ineq" => Ok(Conjecture::C41Inequalities),
            "cexp" => Ok(Conjecture::Cexp),
            _ => Err(Error::Parameter(format!("unknown conjecture '{}'", s))),
        }
    }
}

/// A coefficient that breaks the conjectured pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub n: i64,
    pub coefficient: String,
    pub expected: String,
}

/// One `(k, S, denominator)` cell of a scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCell {
    pub k: i64,
    pub s: Option<i64>,
    pub denominator: Option<String>,
    pub violations: Vec<Violation>,
}

/// Machine-readable scan result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub conjecture: Conjecture,
    pub k_max: i64,
    pub s_set: Vec<i64>,
    pub truncation: i64,
    pub cells: Vec<ScanCell>,
}

impl ScanReport {
    pub fn violation_count(&self) -> usize {
        self.cells.iter().map(|c| c.violations.len()).sum()
    }
}

/// `(-1)^k sum_{j>=k} (-1)^j q^(e_j) (1 - q^(d_j))`.
fn tail_series(k: i64, t: i64, e: impl Fn(i64) -> i64, d: impl Fn(i64) -> i64) -> QSeries {
    let mut c = vec![BigInt::zero(); t.max(0) as usize];
    let mut j = k;
    while e(j) < t {
        let s = sign_k(j) * sign_k(k);
        c[e(j) as usize] += &s;
        let f = e(j) + d(j);
        if f < t {
            c[f as usize] -= &s;
        }
        j += 1;
    }
    QSeries::from_parts(1, 0, t, c)
}

/// The series of the zero/positivity conjecture, built from its right-hand form.
pub fn c41_series(k: i64, t: i64) -> Result<QSeries> {
    let mut s = tail_series(k, t, |j| j * (3 * j + 1) / 2, |j| 2 * j + 1);
    for a in 2..=5 {
        s.apply_pochhammer(a, Sign::Plus, 7, -1)?;
    }
    Ok(s)
}

/// The same series from its left-hand form.
pub fn c41_series_lhs(k: i64, t: i64) -> Result<QSeries> {
    let mut s =
        truncated_pentagonal_lhs(k, t)?.sub(&QSeries::from_parts(1, 0, t, vec![sign_k(k - 1)]));
    for a in [1, 6, 7] {
        s.apply_pochhammer(a, Sign::Plus, 7, 1)?;
    }
    Ok(s)
}

/// `(-1)^(k-1) (sum_j (-1)^j A(n - j(3j-1)/2) - delta(n))`.
pub fn c41_inequality_series(k: i64, t: i64) -> Result<QSeries> {
    let a = a_series(t)?;
    let mut delta = vec![BigInt::zero(); t as usize];
    for (e, s) in sequence_840m361(t)? {
        delta[e as usize] += s.as_i64();
    }
    let delta = QSeries::from_parts(1, 0, t, delta);
    Ok(a.mul(&pentagonal_window(-(k - 1), k, t))
        .sub(&delta)
        .scale(&sign_k(k - 1)))
}

/// The two `S`-twisted series; `den` selects `(q,q^4;q^5)` or `(q^2,q^3;q^5)`.
pub fn cexp_series(k: i64, s: i64, den: (i64, i64), t: i64) -> Result<QSeries> {
    let mut ser = tail_series(k, t, |j| 7 * j * (j + 1) / 2 - j * s, |j| (2 * j + 1) * s);
    ser.apply_pochhammer(den.0, Sign::Plus, 5, -1)?;
    ser.apply_pochhammer(den.1, Sign::Plus, 5, -1)?;
    Ok(ser)
}

fn zero_positive_violations(series: &QSeries, t: i64, k: i64) -> Vec<Violation> {
    let b = k * (3 * k + 1) / 2;
    let mut out = Vec::new();
    for n in 0..t {
        let c = series.coeff_index(n);
        let zero_expected = n < b || n == b + 1;
        if zero_expected && !c.is_zero() {
            out.push(Violation {
                n,
                coefficient: c.to_string(),
                expected: "zero".into(),
            });
        } else if !zero_expected && !c.is_positive() {
            out.push(Violation {
                n,
                coefficient: c.to_string(),
                expected: "positive".into(),
            });
        }
    }
    out
}

/// `(k, S, denominator residues)` of one scan cell.
type CellKey = (i64, Option<i64>, Option<(i64, i64)>);

/// Scans a conjecture over `k = 1..=k_max` (and `S` in `s_set` for `Cexp`) below `q^t`.
pub fn conjecture_scan(which: Conjecture, k_max: i64, s_set: &[i64], t: i64) -> Result<ScanReport> {
    let mut cells_spec: Vec<CellKey> = Vec::new();
    for k in 1..=k_max {
        match which {
            Conjecture::Cexp => {
                for &s in s_set {
                    for den in [(1, 4), (2, 3)] {
                        cells_spec.push((k, Some(s), Some(den)));
                    }
                }
            }
            _ => cells_spec.push((k, None, None)),
        }
    }
    let cells = cells_spec
        .par_iter()
        .map(|&(k, s, den)| -> Result<ScanCell> {
            let violations = match which {
                Conjecture::C41 => zero_positive_violations(&c41_series(k, t)?, t, k),
                Conjecture::C41Inequalities => {
                    let ser = c41_inequality_series(k, t)?;
                    let b = k * (3 * k + 1) / 2;
                    (0..t)
                        .filter_map(|n| {
                            let c = ser.coeff_index(n);
                            let strict = n == b || n >= b + 2;
                            let bad = c.is_negative() || (strict && c.is_zero());
                            bad.then(|| Violation {
                                n,
                                coefficient: c.to_string(),
                                expected: if strict { "positive" } else { "nonnegative" }.into(),
                            })
                        })
                        .collect()
                }
                Conjecture::Cexp => {
                    let (s, den) = (s.unwrap(), den.unwrap());
                    let ser = cexp_series(k, s, den, t)?;
                    (0..t)
                        .filter_map(|n| {
                            let c = ser.coeff_index(n);
                            c.is_negative().then(|| Violation {
                                n,
                                coefficient: c.to_string(),
                                expected: "nonnegative".into(),
                            })
                        })
                        .collect()
                }
            };
            Ok(ScanCell {
                k,
                s,
                denominator: den.map(|(a, b)| format!("(q^{},q^{};q^5)", a, b)),
                violations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport {
        conjecture: which,
        k_max,
        s_set: s_set.to_vec(),
        truncation: t,
        cells,
    })
}
