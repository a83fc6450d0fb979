//! Truncated Laurent series in `q^(1/D)` with big-integer coefficients.
//!
//! A [`QSeries`] stores a dense coefficient vector for the indices
//! `min_index .. prec`, where index `i` stands for the monomial `q^(i/D)`.
//! Everything at an index below `prec` is exact; nothing is claimed above it.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Exponent;

/// Exact truncated Laurent series in `q^(1/den)`.
/// Equality ignores stored zero padding: same grid, same truncation, same terms.
#[derive(Clone, Debug)]
pub struct QSeries {
    den: i64,
    min_index: i64,
    prec: i64,
    coeffs: Vec<BigInt>,
}

impl PartialEq for QSeries {
    fn eq(&self, other: &Self) -> bool {
        self.den == other.den && self.prec == other.prec && self.terms().eq(other.terms())
    }
}

impl Eq for QSeries {}

/// Sign of a `q`-argument: `+q^e` or `-q^e`.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(s: i64) -> Sign {
        if s < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Which of the two classical square sums [`square_sum_series`] produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareKind {
    /// `sum_{n>=1} q^(M n^2)`
    Squares,
    /// `sum_{n>=0} q^(M n(n+1))`
    Triangular,
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Index of `e` on the grid `q^(1/den)`; `den` must be a multiple of `e`'s denominator.
fn grid_index(e: Exponent, den: i64) -> i64 {
    debug_assert_eq!(den % e.denom(), 0);
    e.numer() * (den / e.denom())
}

impl QSeries {
    /// The zero series, exact below `q^t`.
    pub fn zero(den: i64, t: i64) -> QSeries {
        QSeries::from_parts(den, 0, den * t, Vec::new())
    }

    /// The constant series `1`, exact below `q^t`.
    pub fn one(t: i64) -> QSeries {
        QSeries::monomial(BigInt::one(), Exponent::from_integer(0), t)
    }

    /// `c q^e`, exact below `q^t`.
    pub fn monomial(c: BigInt, e: Exponent, t: i64) -> QSeries {
        let den = *e.denom();
        let idx = grid_index(e, den);
        let prec = den * t;
        if idx >= prec {
            return QSeries::from_parts(den, 0.min(idx), prec, Vec::new());
        }
        let mut coeffs = vec![BigInt::zero(); (prec - idx) as usize];
        coeffs[0] = c;
        QSeries::from_parts(den, idx, prec, coeffs)
    }

    /// Builds a series from a coefficient vector starting at `min_index`.
    /// Coefficients at or beyond `prec` are dropped.
    pub fn from_parts(den: i64, min_index: i64, prec: i64, mut coeffs: Vec<BigInt>) -> QSeries {
        assert!(den > 0, "denominator must be positive");
        let min_index = min_index.min(prec);
        let len = (prec - min_index) as usize;
        coeffs.resize(len, BigInt::zero());
        QSeries {
            den,
            min_index,
            prec,
            coeffs,
        }
    }

    /// Integer power series `sum c_n q^n` with `n < t`.
    pub fn from_integers<I: IntoIterator<Item = i64>>(coeffs: I, t: i64) -> QSeries {
        let v: Vec<BigInt> = coeffs.into_iter().map(BigInt::from).collect();
        QSeries::from_parts(1, 0, t, v)
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    /// Exclusive bound of exact indices.
    pub fn prec_index(&self) -> i64 {
        self.prec
    }

    /// Truncation order as an exponent: exact for every `q^e` with `e` below this.
    pub fn truncation(&self) -> Exponent {
        Exponent::new(self.prec, self.den)
    }

    /// Coefficient at grid index `i` (zero outside the stored window).
    pub fn coeff_index(&self, i: i64) -> BigInt {
        if i < self.min_index || i >= self.prec {
            return BigInt::zero();
        }
        self.coeffs[(i - self.min_index) as usize].clone()
    }

    /// Coefficient of `q^e`.
    pub fn coeff(&self, e: Exponent) -> Result<BigInt> {
        let scaled = e * Exponent::from_integer(self.den);
        if !scaled.is_integer() {
            return Ok(BigInt::zero());
        }
        let i = scaled.to_integer();
        if i >= self.prec {
            return Err(Error::Domain(format!(
                "coefficient of q^{} requested beyond truncation {}",
                e,
                self.truncation()
            )));
        }
        Ok(self.coeff_index(i))
    }

    /// Integer-exponent coefficients `c_0 .. c_{n-1}`.
    pub fn integer_coeffs(&self, n: i64) -> Vec<BigInt> {
        (0..n).map(|k| self.coeff_index(k * self.den)).collect()
    }

    /// Same as [`QSeries::integer_coeffs`] but converted to `i64` (panics on overflow).
    pub fn integer_coeffs_i64(&self, n: i64) -> Vec<i64> {
        self.integer_coeffs(n)
            .into_iter()
            .map(|c| c.to_i64().expect("coefficient exceeds i64"))
            .collect()
    }

    /// Nonzero terms as `(grid index, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.min_index + k as i64, c))
    }

    pub fn first_nonzero(&self) -> Option<(i64, BigInt)> {
        self.terms().next().map(|(i, c)| (i, c.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Re-expresses the series on the finer grid `q^(1/new_den)`.
    pub fn rescale(&self, new_den: i64) -> Result<QSeries> {
        if new_den % self.den != 0 {
            return Err(Error::Domain(format!(
                "cannot rescale denominator {} to {}",
                self.den, new_den
            )));
        }
        let f = new_den / self.den;
        if f == 1 {
            return Ok(self.clone());
        }
        let min_index = self.min_index * f;
        let prec = self.prec * f;
        let mut coeffs = vec![BigInt::zero(); (prec - min_index) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * f as usize] = c.clone();
        }
        Ok(QSeries::from_parts(new_den, min_index, prec, coeffs))
    }

    fn common(a: &QSeries, b: &QSeries) -> (QSeries, QSeries) {
        let d = lcm(a.den, b.den);
        (a.rescale(d).unwrap(), b.rescale(d).unwrap())
    }

    /// Substitutes `q -> q^k` for a positive integer `k`.
    pub fn substitute(&self, k: i64) -> QSeries {
        assert!(k > 0);
        let min_index = self.min_index * k;
        let prec = self.prec * k;
        let mut coeffs = vec![BigInt::zero(); (prec - min_index) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        QSeries::from_parts(self.den, min_index, prec, coeffs)
    }

    /// Multiplies by `q^e`; the truncation moves with it.
    pub fn shift(&self, e: Exponent) -> QSeries {
        let d = lcm(self.den, *e.denom());
        let mut s = self.rescale(d).unwrap();
        let off = grid_index(e, d);
        s.min_index += off;
        s.prec += off;
        s
    }

    /// Lowers the truncation to `q^t` if it is currently higher.
    pub fn truncate(&self, t: Exponent) -> QSeries {
        let d = lcm(self.den, *t.denom());
        let s = self.rescale(d).unwrap();
        let p = grid_index(t, d).min(s.prec);
        let mut coeffs = s.coeffs;
        let min_index = s.min_index.min(p);
        coeffs.truncate((p - min_index).max(0) as usize);
        QSeries::from_parts(d, min_index, p, coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> QSeries {
        let mut s = self.clone();
        for x in s.coeffs.iter_mut() {
            *x *= c;
        }
        s
    }

    /// Divides every coefficient by `c`, failing if any division is inexact.
    pub fn div_exact(&self, c: &BigInt) -> Result<QSeries> {
        let mut s = self.clone();
        for x in s.coeffs.iter_mut() {
            let (q, r) = x.div_rem(c);
            if !r.is_zero() {
                return Err(Error::Invariant(format!(
                    "coefficient {} not divisible by {}",
                    x, c
                )));
            }
            *x = q;
        }
        Ok(s)
    }

    pub fn neg(&self) -> QSeries {
        let mut s = self.clone();
        for x in s.coeffs.iter_mut() {
            *x = -std::mem::take(x);
        }
        s
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let (a, b) = QSeries::common(self, other);
        let min_index = a.min_index.min(b.min_index);
        let prec = a.prec.min(b.prec);
        let len = (prec - min_index).max(0) as usize;
        let mut coeffs = vec![BigInt::zero(); len];
        for s in [&a, &b] {
            for (k, c) in s.coeffs.iter().enumerate() {
                let i = s.min_index + k as i64;
                if i < prec {
                    coeffs[(i - min_index) as usize] += c;
                }
            }
        }
        QSeries::from_parts(a.den, min_index, prec, coeffs)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    /// Product; exact below the smaller of the two effective truncations.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let (a, b) = QSeries::common(self, other);
        let min_index = a.min_index + b.min_index;
        let prec = (a.prec + b.min_index).min(b.prec + a.min_index);
        let len = (prec - min_index).max(0) as usize;
        let mut coeffs = vec![BigInt::zero(); len];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() || i >= len {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
                if !y.is_zero() {
                    coeffs[i + j] += x * y;
                }
            }
        }
        QSeries::from_parts(a.den, min_index, prec, coeffs)
    }

    /// Quotient `self / other`; the divisor's lowest nonzero coefficient must be `±1`.
    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        let (a, b) = QSeries::common(self, other);
        let (vb, lead) = b
            .first_nonzero()
            .ok_or_else(|| Error::Domain("division by the zero series".into()))?;
        if !lead.abs().is_one() {
            return Err(Error::Domain(format!(
                "divisor has non-unit leading coefficient {}",
                lead
            )));
        }
        let min_index = a.min_index - vb;
        let prec = (a.prec - vb).min(b.prec - vb + min_index);
        let len = (prec - min_index).max(0) as usize;
        let bv: Vec<BigInt> = (0..len).map(|j| b.coeff_index(vb + j as i64)).collect();
        let mut c: Vec<BigInt> = Vec::with_capacity(len);
        for n in 0..len {
            let mut acc = a.coeff_index(min_index + vb + n as i64);
            for j in 1..=n {
                if !bv[j].is_zero() && !c[n - j].is_zero() {
                    acc -= &bv[j] * &c[n - j];
                }
            }
            if lead.is_negative() {
                acc = -acc;
            }
            c.push(acc);
        }
        Ok(QSeries::from_parts(a.den, min_index, prec, c))
    }

    /// Integer power, negative exponents through division.
    pub fn pow(&self, k: i64) -> Result<QSeries> {
        let one = QSeries::from_parts(self.den, 0, self.prec - self.min_index, vec![BigInt::one()]);
        if k == 0 {
            return Ok(one);
        }
        let mut acc = self.clone();
        for _ in 1..k.abs() {
            acc = acc.mul(self);
        }
        if k < 0 {
            one.div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// Multiplies in place by `(1 - s q^(idx/den))^power` where `idx > 0`.
    pub(crate) fn apply_binomial(&mut self, idx: i64, s: Sign, power: i64) {
        debug_assert!(idx > 0);
        let e = idx as usize;
        let n = self.coeffs.len();
        if e >= n {
            return;
        }
        for _ in 0..power.abs() {
            if power > 0 {
                for i in (e..n).rev() {
                    let (lo, hi) = self.coeffs.split_at_mut(i);
                    if lo[i - e].is_zero() {
                        continue;
                    }
                    match s {
                        Sign::Plus => hi[0] -= &lo[i - e],
                        Sign::Minus => hi[0] += &lo[i - e],
                    }
                }
            } else {
                for i in e..n {
                    let (lo, hi) = self.coeffs.split_at_mut(i);
                    if lo[i - e].is_zero() {
                        continue;
                    }
                    match s {
                        Sign::Plus => hi[0] += &lo[i - e],
                        Sign::Minus => hi[0] -= &lo[i - e],
                    }
                }
            }
        }
    }

    /// Multiplies in place by `(s q^(e/den); q^(m/den))_inf^power` on the stored grid.
    pub(crate) fn apply_pochhammer(&mut self, e: i64, s: Sign, m: i64, power: i64) -> Result<()> {
        if m <= 0 {
            return Err(Error::Domain(format!("nonpositive modulus {}", m)));
        }
        if e < 0 {
            return Err(Error::Domain(format!(
                "negative Pochhammer argument exponent {}",
                e
            )));
        }
        let span = self.coeffs.len() as i64;
        let mut idx = e;
        if idx == 0 {
            match s {
                Sign::Plus => {
                    if power > 0 {
                        for c in self.coeffs.iter_mut() {
                            *c = BigInt::zero();
                        }
                        return Ok(());
                    }
                    return Err(Error::Domain("division by (1;q)_inf = 0".into()));
                }
                Sign::Minus => {
                    let two = BigInt::from(2);
                    let f = num_traits::pow(two, power.unsigned_abs() as usize);
                    if power > 0 {
                        *self = self.scale(&f);
                    } else {
                        *self = self.div_exact(&f)?;
                    }
                    idx += m;
                }
            }
        }
        while idx < span {
            self.apply_binomial(idx, s, power);
            idx += m;
        }
        Ok(())
    }
}

/// Expands `(sign q^e; q^m)_inf` exactly below `q^t`.
pub fn poch_expand(e: Exponent, sign: Sign, m: Exponent, t: i64) -> Result<QSeries> {
    if m <= Exponent::zero() {
        return Err(Error::Domain(format!("nonpositive modulus {}", m)));
    }
    if e < Exponent::zero() {
        return Err(Error::Domain(format!("negative exponent {}", e)));
    }
    let den = lcm(*e.denom(), *m.denom());
    let mut s = QSeries::from_parts(den, 0, den * t, vec![BigInt::one()]);
    s.apply_pochhammer(grid_index(e, den), sign, grid_index(m, den), 1)?;
    Ok(s)
}

/// `sum_k (±1)^k q^(A k^2 + B k)` by direct enumeration, exact below `q^t`.
pub fn jtp_bilateral(a: Exponent, b: Exponent, alternating: bool, t: i64) -> Result<QSeries> {
    if a <= Exponent::zero() {
        return Err(Error::Domain(format!("A = {} must be positive", a)));
    }
    let den = lcm(*a.denom(), *b.denom());
    let tt = Exponent::from_integer(t);
    let f = |k: i64| a * Exponent::from_integer(k * k) + b * Exponent::from_integer(k);
    let center = (-b / (a * Exponent::from_integer(2))).round().to_integer();
    let mut ks = Vec::new();
    let mut k = center;
    while f(k) < tt {
        ks.push(k);
        k += 1;
    }
    let mut k = center - 1;
    while f(k) < tt {
        ks.push(k);
        k -= 1;
    }
    let min_index = ks
        .iter()
        .map(|&k| grid_index(f(k), den))
        .min()
        .unwrap_or(0)
        .min(0);
    let prec = den * t;
    let mut coeffs = vec![BigInt::zero(); (prec - min_index) as usize];
    for k in ks {
        let i = grid_index(f(k), den);
        let sgn = if alternating && k.rem_euclid(2) == 1 {
            -1
        } else {
            1
        };
        coeffs[(i - min_index) as usize] += sgn;
    }
    Ok(QSeries::from_parts(den, min_index, prec, coeffs))
}

/// `sum_{n>=1} q^(M n^2)` or `sum_{n>=0} q^(M n(n+1))`, computed from their product forms.
pub fn square_sum_series(kind: SquareKind, m: i64, t: i64) -> Result<QSeries> {
    if m < 1 {
        return Err(Error::Domain(format!("scale {} must be at least 1", m)));
    }
    let mut s = QSeries::from_parts(1, 0, t, vec![BigInt::one()]);
    match kind {
        SquareKind::Squares => {
            s.apply_pochhammer(2 * m, Sign::Plus, 2 * m, 1)?;
            s.apply_pochhammer(m, Sign::Minus, 2 * m, 2)?;
            let s = s.sub(&QSeries::one(t));
            s.div_exact(&BigInt::from(2))
        }
        SquareKind::Triangular => {
            s.apply_pochhammer(2 * m, Sign::Plus, 2 * m, 1)?;
            s.apply_pochhammer(2 * m, Sign::Minus, 2 * m, 2)?;
            Ok(s)
        }
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.terms() {
            let e = Exponent::new(i, self.den);
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag.is_one();
            if e.is_zero() {
                write!(f, "{}", mag)?;
            } else {
                if !unit {
                    write!(f, "{}*", mag)?;
                }
                if e.is_one() {
                    write!(f, "q")?;
                } else if e.is_integer() {
                    write!(f, "q^{}", e)?;
                } else {
                    write!(f, "q^({})", e)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.truncation())
    }
}
