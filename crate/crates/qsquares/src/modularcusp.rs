//! Cusps of `Gamma_1(N)`, the modularity criterion for `E_g` products, orders at cusps
//! and the valence bound.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thetaprod::{bernoulli2, EProduct};
use crate::Exponent;

/// A cusp `numer/denom` in lowest terms; `1/0` is `i infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cusp {
    pub numer: i64,
    pub denom: i64,
}

impl Cusp {
    pub fn new(numer: i64, denom: i64) -> Result<Cusp> {
        if denom < 0 {
            return Cusp::new(-numer, -denom);
        }
        let g = numer.gcd(&denom);
        if g == 0 {
            return Err(Error::Domain("0/0 is not a cusp".into()));
        }
        if denom == 0 {
            return Ok(Cusp::infinity());
        }
        Ok(Cusp {
            numer: numer / g,
            denom: denom / g,
        })
    }

    pub fn infinity() -> Cusp {
        Cusp { numer: 1, denom: 0 }
    }

    pub fn is_infinity(&self) -> bool {
        self.denom == 0
    }

    /// Width `N / gcd(denom, N)`.
    pub fn width(&self, n: i64) -> i64 {
        n / self.denom.gcd(&n)
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "Infinity")
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

/// One representative per `Gamma_1(N)` class of cusps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspClassSet {
    pub level: i64,
    pub representatives: Vec<Cusp>,
}

impl CuspClassSet {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn finite(&self) -> impl Iterator<Item = &Cusp> {
        self.representatives.iter().filter(|c| !c.is_infinity())
    }
}

impl fmt::Display for CuspClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.representatives.iter().map(|c| c.to_string()).collect();
        write!(f, "[ {} ]", items.join(", "))
    }
}

/// Class key of `a/c`: `(c mod N, a mod gcd(c, N))` up to a common sign.
fn class_key(c: &Cusp, n: i64) -> (i64, i64) {
    let (a, d) = if c.is_infinity() {
        (1, 0)
    } else {
        (c.numer, c.denom)
    };
    let g = d.gcd(&n);
    let k1 = (d.rem_euclid(n), a.rem_euclid(g));
    let k2 = ((-d).rem_euclid(n), (-a).rem_euclid(g));
    k1.min(k2)
}

/// `a/c ~ a'/c'` iff `(a', c') = ±(a + j c, c) (mod N)` for some integer `j`.
pub fn cusps_equivalent(x: &Cusp, y: &Cusp, n: i64) -> bool {
    let (a, c) = if x.is_infinity() {
        (1, 0)
    } else {
        (x.numer, x.denom)
    };
    let (a2, c2) = if y.is_infinity() {
        (1, 0)
    } else {
        (y.numer, y.denom)
    };
    [1i64, -1].iter().any(|&s| {
        if (c2 - s * c).rem_euclid(n) != 0 {
            return false;
        }
        // a' = s (a + j c) mod N for some j: a' - s a lies in the ideal (c, N)
        let g = c.gcd(&n);
        (a2 - s * a).rem_euclid(g) == 0
    })
}

/// Representatives of all cusp classes of `Gamma_1(N)`, `i infinity` first.
pub fn cusp_representatives(n: i64) -> Result<CuspClassSet> {
    if n < 5 {
        return Err(Error::UnsupportedLevel(n));
    }
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut reps = vec![Cusp::infinity()];
    seen.insert(class_key(&Cusp::infinity(), n));
    for c in 0..n {
        let g = c.gcd(&n);
        for a in 0..g {
            if a.gcd(&g) != 1 {
                continue;
            }
            let d = if c == 0 { n } else { c };
            // lift a to a numerator coprime to d
            let mut num = a;
            while num.gcd(&d) != 1 {
                num += g;
            }
            let cusp = Cusp::new(num, d)?;
            if seen.insert(class_key(&cusp, n)) {
                reps.push(cusp);
            }
        }
    }
    Ok(CuspClassSet {
        level: n,
        representatives: reps,
    })
}

/// `(1/2) sum_{d | N} phi(d) phi(N/d)`, valid for `N >= 5`.
pub fn cusp_count_formula(n: i64) -> i64 {
    let phi = |m: i64| (1..=m).filter(|k| k.gcd(&m) == 1).count() as i64;
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| phi(d) * phi(n / d))
        .sum::<i64>()
        / 2
}

/// `y(N) = 2N` for even `N`, `N` otherwise.
pub fn y_level(n: i64) -> i64 {
    if n % 2 == 0 {
        2 * n
    } else {
        n
    }
}

/// The two congruence values `(sum a_g mod 12, sum g^2 a_g mod y(N))`.
pub fn modularity_residues(p: &EProduct) -> (i64, i64) {
    let s1: i64 = p.factors.values().sum();
    let s2: i64 = p.factors.iter().map(|(g, a)| g * g * a).sum();
    (s1.rem_euclid(12), s2.rem_euclid(y_level(p.level)))
}

/// Both congruences vanish; the `eta` exponent is not counted.
pub fn is_modular_function(p: &EProduct) -> bool {
    modularity_residues(p) == (0, 0)
}

fn fract(x: Exponent) -> Exponent {
    x - x.floor()
}

/// `ord(E_g; a/c, N) = (1/2) gcd(c, N) B2({a g / gcd(c, N)})`.
pub fn order_at_cusp(g: i64, c: &Cusp, n: i64) -> Result<Exponent> {
    if c.is_infinity() {
        return Err(Error::Domain(
            "order at infinity is read off the q-expansion".into(),
        ));
    }
    let gg = c.denom.gcd(&n);
    let x = fract(Ratio::new(c.numer * g, gg));
    Ok(Exponent::new(gg, 2) * bernoulli2(x))
}

/// Order of a whole product at a finite cusp (the `eta` factor must be absent).
pub fn product_order(p: &EProduct, c: &Cusp) -> Result<Exponent> {
    if p.eta != 0 {
        return Err(Error::Domain(format!("term {} carries an eta factor", p)));
    }
    let mut acc = Exponent::from_integer(0);
    for (&g, &a) in &p.factors {
        acc += order_at_cusp(g, c, p.level)? * Exponent::from_integer(a);
    }
    Ok(acc)
}

/// Minimum term order at each finite cusp, in representative order.
pub fn cusp_minima(terms: &[EProduct], cusps: &CuspClassSet) -> Result<Vec<(Cusp, Exponent)>> {
    check_terms(terms, cusps)?;
    let finite: Vec<Cusp> = cusps.finite().copied().collect();
    finite
        .par_iter()
        .map(|c| {
            let mut best: Option<Exponent> = None;
            for t in terms {
                let o = product_order(t, c)?;
                best = Some(best.map_or(o, |b| b.min(o)));
            }
            Ok((*c, best.unwrap_or_else(|| Exponent::from_integer(0))))
        })
        .collect()
}

fn check_terms(terms: &[EProduct], cusps: &CuspClassSet) -> Result<()> {
    for t in terms {
        if t.level != cusps.level {
            return Err(Error::Domain(format!(
                "term {} is not at level {}",
                t, cusps.level
            )));
        }
        if t.eta != 0 {
            return Err(Error::Domain(format!("term {} carries an eta factor", t)));
        }
        if !is_modular_function(t) {
            return Err(Error::NotModular(t.to_string()));
        }
    }
    Ok(())
}

/// `U = -floor(sum over finite cusps of the minimum term order)`.
pub fn valence_bound(terms: &[EProduct], cusps: &CuspClassSet) -> Result<i64> {
    let minima = cusp_minima(terms, cusps)?;
    Ok(bound_from_minima(&minima))
}

pub fn bound_from_minima(minima: &[(Cusp, Exponent)]) -> i64 {
    let total: Exponent = minima.iter().map(|(_, o)| *o).sum();
    -total.floor().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for n in [20, 24, 105] {
            assert_eq!(
                cusp_representatives(n).unwrap().len() as i64,
                cusp_count_formula(n)
            );
        }
        assert!(cusp_representatives(4).is_err());
    }

    #[test]
    fn e22_over_e43() {
        let p = EProduct::quotient(105, [(22, 1), (43, -1)]).unwrap();
        assert!(is_modular_function(&p));
        let c = Cusp::new(27, 35).unwrap();
        assert_eq!(product_order(&p, &c).unwrap(), Exponent::from_integer(2));
        let bad = EProduct::quotient(105, [(1, 1), (2, -1)]).unwrap();
        assert!(!is_modular_function(&bad));
        assert!(is_modular_function(&EProduct::one(105)));
    }

    #[test]
    fn equivalence_matches_keys() {
        let reps = cusp_representatives(20).unwrap();
        for (i, x) in reps.representatives.iter().enumerate() {
            for (j, y) in reps.representatives.iter().enumerate() {
                assert_eq!(cusps_equivalent(x, y, 20), i == j);
            }
        }
    }

    #[test]
    fn constant_bound_is_zero() {
        let cs = cusp_representatives(20).unwrap();
        assert_eq!(valence_bound(&[EProduct::one(20)], &cs).unwrap(), 0);
    }
}
