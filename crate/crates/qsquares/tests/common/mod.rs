//! Brute-force oracles shared by the integration suites and the acceptance run.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use qsquares::prover::combination_series;
use qsquares::{Cusp, PochProduct, QSeries};

pub fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i64;
    (r.saturating_sub(2)..=r + 2).any(|x| x >= 0 && x * x == n)
}

/// Exponent of `-1` for the `n`-th term, read straight off a printed sign rule.
pub fn printed_bit(rule: &str, n: i64) -> i64 {
    if let Some(body) = rule
        .strip_prefix("table(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let (period, zeros) = body.split_once(':').unwrap();
        let period: i64 = period.parse().unwrap();
        let zeros: Vec<i64> = zeros.split(',').map(|z| z.parse().unwrap()).collect();
        return if zeros.contains(&(n % period)) { 0 } else { 1 };
    }
    let body = rule
        .strip_prefix("floor(")
        .unwrap()
        .strip_suffix(')')
        .unwrap();
    let (lin, d) = body.split_once(',').unwrap();
    let (a, b) = lin.split_once("n+").unwrap();
    let a: i64 = if a.is_empty() { 1 } else { a.parse().unwrap() };
    let (b, d): (i64, i64) = (b.parse().unwrap(), d.parse().unwrap());
    (a * n + b).div_euclid(d) % 2
}

/// `coef * sum_n (-1)^(t(n)) q^(shift + scale * m_n)` over `m_n >= 0` with `K m_n + bsq` square.
pub fn brute_component(text: &str, t: i64) -> Vec<(i64, i64)> {
    let field = |name: &str| -> Option<&str> {
        text.split_whitespace()
            .find_map(|tok| tok.strip_prefix(name).and_then(|r| r.strip_prefix('=')))
    };
    let int = |name: &str, default: i64| field(name).map_or(default, |v| v.parse().unwrap());
    let (k, bsq) = (int("K", 0), int("bsq", 0));
    let (coef, scale, shift) = (int("coef", 1), int("scale", 1), int("shift", 0));
    let rule = field("pattern");
    if rule.is_none() {
        assert!(
            field("signs").unwrap().split(',').all(|s| s == "+"),
            "oracle only knows all-plus explicit signs"
        );
    }
    let mut out = Vec::new();
    let mut n = 0;
    for m in 0.. {
        let e = shift + scale * m;
        if e >= t {
            break;
        }
        if is_square(k * m + bsq) {
            let bit = rule.map_or(0, |r| printed_bit(r, n));
            out.push((e, coef * if bit == 0 { 1 } else { -1 }));
            n += 1;
        }
    }
    out
}

pub fn scalar_lcm(terms: &[PochProduct]) -> BigInt {
    terms.iter().fold(BigInt::from(1), |acc, p| {
        acc.lcm(p.canonical().unwrap().scalar.denom())
    })
}

pub fn brute_residues(k: i64, bsq: i64) -> (i64, Vec<i64>) {
    let hit = |s: i64| (s * s - bsq).rem_euclid(k) == 0;
    let sols: Vec<i64> = (0..k).filter(|&s| hit(s)).collect();
    if sols.is_empty() {
        return (k, sols);
    }
    for r in 1..=k {
        if k % r == 0 && (0..k).all(|s| hit(s) == hit((s + r) % k)) {
            return (r, sols.into_iter().filter(|&s| s < r).collect());
        }
    }
    unreachable!()
}

/// Compiled theta combination of a raw corpus entry against direct enumeration below `q^t`.
pub fn step_zero(
    entry: &qsquares::corpus::CorpusEntry,
    raw_lhs: &[String],
    t: i64,
) -> (QSeries, QSeries) {
    let mut terms = Vec::new();
    for c in &entry.components {
        terms.extend(c.compile().unwrap());
    }
    let l = scalar_lcm(&terms);
    let compiled = combination_series(&terms, t).unwrap();
    let mut coeffs = std::collections::BTreeMap::<i64, i64>::new();
    for text in raw_lhs {
        for (e, c) in brute_component(text, t) {
            *coeffs.entry(e).or_insert(0) += c;
        }
    }
    let lo = coeffs.keys().next().copied().unwrap_or(0).min(0);
    let mut dense = vec![BigInt::from(0); (t - lo) as usize];
    for (e, c) in coeffs {
        dense[(e - lo) as usize] = BigInt::from(c) * &l;
    }
    (compiled, QSeries::from_parts(1, lo, t, dense))
}

/// The `lhs` strings of every statement in the built-in corpus, read as plain TOML.
pub fn raw_lhs() -> Vec<Vec<String>> {
    let raw: toml::Value = toml::from_str(qsquares::corpus::BUILTIN).unwrap();
    raw["statement"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            s["lhs"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_str().unwrap().to_string())
                .collect()
        })
        .collect()
}

/// Orbits of primitive vectors `(a, c) mod N` under `(a, c) -> (a + c, c)` and negation.
pub struct Orbits {
    n: i64,
    parent: Vec<usize>,
}

impl Orbits {
    pub fn new(n: i64) -> Orbits {
        let mut o = Orbits {
            n,
            parent: (0..(n * n) as usize).collect(),
        };
        for a in 0..n {
            for c in 0..n {
                if a.gcd(&c).gcd(&n) != 1 {
                    continue;
                }
                o.union(o.idx(a, c), o.idx(a + c, c));
                o.union(o.idx(a, c), o.idx(-a, -c));
            }
        }
        o
    }

    pub fn idx(&self, a: i64, c: i64) -> usize {
        (a.rem_euclid(self.n) * self.n + c.rem_euclid(self.n)) as usize
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        self.parent[rx] = ry;
    }

    pub fn class_of(&mut self, c: &Cusp) -> usize {
        let i = if c.is_infinity() {
            self.idx(1, 0)
        } else {
            self.idx(c.numer, c.denom)
        };
        self.find(i)
    }

    pub fn count(&mut self) -> usize {
        let n = self.n;
        let mut roots = std::collections::HashSet::new();
        for a in 0..n {
            for c in 0..n {
                if a.gcd(&c).gcd(&n) == 1 {
                    let i = self.idx(a, c);
                    roots.insert(self.find(i));
                }
            }
        }
        roots.len()
    }
}
