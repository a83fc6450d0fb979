//! Theta quotients: Pochhammer products, `E_g` products at a level, theta monomials.
//!
//! Three representations of the same objects live here.
//!
//! * [`PochProduct`] is a rational scalar times `q^shift` times a product of
//!   `(±q^a; q^M)_inf^k`. It is the general term language for statements.
//! * [`EProduct`] is `c q^r prod E_g^(a_g) (q^N;q^N)^eta` at a fixed level `N`, with
//!   `E_g = q^(N B2(g/N)/2) (q^g, q^(N-g); q^N)_inf`.
//! * [`ThetaMonomial`] is `theta(±q^a; q^M) = (±q^a, ±q^(M-a); q^M)_inf`.
//!
//! Conversion between the first two goes through an [`AtomVector`]: every
//! Pochhammer symbol whose modulus divides `N` is a product of the atoms
//! `(q^b; q^N)_inf`, `1 <= b <= N`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{lcm, QSeries, Sign};
use crate::Exponent;

/// `B2(x) = x^2 - x + 1/6`.
pub fn bernoulli2(x: Exponent) -> Exponent {
    x * x - x + Exponent::new(1, 6)
}

/// Exponent of the built-in prefactor of `E_g` at level `n`.
pub fn eg_prefactor(g: i64, n: i64) -> Exponent {
    Exponent::from_integer(n) * bernoulli2(Exponent::new(g, n)) / Exponent::from_integer(2)
}

fn big_rational(r: Exponent) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// One Pochhammer factor `(sign q^exp; q^modulus)_inf ^ power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PochAtom {
    pub sign: Sign,
    pub exp: i64,
    pub modulus: i64,
    pub power: i64,
}

impl PochAtom {
    pub fn new(sign: Sign, exp: i64, modulus: i64, power: i64) -> PochAtom {
        PochAtom {
            sign,
            exp,
            modulus,
            power,
        }
    }

    pub fn plus(exp: i64, modulus: i64, power: i64) -> PochAtom {
        PochAtom::new(Sign::Plus, exp, modulus, power)
    }

    fn key(&self) -> (i64, Sign, i64) {
        (self.modulus, self.sign, self.exp)
    }
}

/// Rational scalar times `q^shift` times a product of Pochhammer symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PochProduct {
    pub scalar: BigRational,
    pub shift: Exponent,
    pub atoms: Vec<PochAtom>,
}

impl PochProduct {
    pub fn one() -> PochProduct {
        PochProduct::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> PochProduct {
        PochProduct {
            scalar: c,
            shift: Exponent::zero(),
            atoms: Vec::new(),
        }
    }

    pub fn monomial(c: BigRational, shift: Exponent) -> PochProduct {
        PochProduct {
            scalar: c,
            shift,
            atoms: Vec::new(),
        }
    }

    pub fn from_atoms(atoms: Vec<PochAtom>) -> PochProduct {
        PochProduct {
            scalar: BigRational::one(),
            shift: Exponent::zero(),
            atoms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn mul(&self, other: &PochProduct) -> PochProduct {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        PochProduct {
            scalar: &self.scalar * &other.scalar,
            shift: self.shift + other.shift,
            atoms,
        }
    }

    pub fn inv(&self) -> Result<PochProduct> {
        if self.scalar.is_zero() {
            return Err(Error::Domain("inverse of a zero product".into()));
        }
        Ok(PochProduct {
            scalar: self.scalar.recip(),
            shift: -self.shift,
            atoms: self
                .atoms
                .iter()
                .map(|a| PochAtom {
                    power: -a.power,
                    ..*a
                })
                .collect(),
        })
    }

    pub fn neg(&self) -> PochProduct {
        PochProduct {
            scalar: -self.scalar.clone(),
            ..self.clone()
        }
    }

    pub fn scaled(&self, c: &BigRational) -> PochProduct {
        PochProduct {
            scalar: &self.scalar * c,
            ..self.clone()
        }
    }

    pub fn shifted(&self, e: Exponent) -> PochProduct {
        PochProduct {
            shift: self.shift + e,
            ..self.clone()
        }
    }

    /// The product with its scalar replaced by one.
    pub fn unit_part(&self) -> PochProduct {
        PochProduct {
            scalar: BigRational::one(),
            ..self.clone()
        }
    }

    /// Substitutes `q -> q^k`.
    pub fn substitute(&self, k: i64) -> PochProduct {
        PochProduct {
            scalar: self.scalar.clone(),
            shift: self.shift * Exponent::from_integer(k),
            atoms: self
                .atoms
                .iter()
                .map(|a| PochAtom {
                    exp: a.exp * k,
                    modulus: a.modulus * k,
                    ..*a
                })
                .collect(),
        }
    }

    /// Canonical form: `(-1;q^M)` rewritten as `2(-q^M;q^M)`, out-of-range theta pairs
    /// normalized, equal atoms merged and sorted.
    ///
    /// A factor `(1;q^M)` in the numerator makes the whole product zero.
    pub fn canonical(&self) -> Result<PochProduct> {
        let mut scalar = self.scalar.clone();
        let mut shift = self.shift;
        let mut pending: Vec<PochAtom> = Vec::new();
        for a in &self.atoms {
            if a.power == 0 {
                continue;
            }
            if a.modulus <= 0 {
                return Err(Error::Domain(format!("nonpositive modulus in {:?}", a)));
            }
            pending.push(*a);
        }
        let mut used = vec![false; pending.len()];
        let mut out: Vec<PochAtom> = Vec::new();
        for i in 0..pending.len() {
            if used[i] {
                continue;
            }
            let a = pending[i];
            let in_range = a.exp > 0 && a.exp <= a.modulus;
            if in_range || a.exp == 0 {
                continue;
            }
            let partner = (0..pending.len()).find(|&j| {
                j != i
                    && !used[j]
                    && pending[j].sign == a.sign
                    && pending[j].modulus == a.modulus
                    && pending[j].power == a.power
                    && pending[j].exp == a.modulus - a.exp
            });
            let j = partner.ok_or_else(|| {
                Error::Domain(format!(
                    "factor ({}q^{};q^{}) is out of range and has no theta partner",
                    if a.sign == Sign::Minus { "-" } else { "" },
                    a.exp,
                    a.modulus
                ))
            })?;
            used[i] = true;
            used[j] = true;
            let m = ThetaMonomial::new(a.modulus, Exponent::from_integer(a.exp), a.sign);
            let (c, h, t) = m.normalize()?;
            for _ in 0..a.power.abs() {
                if a.power > 0 {
                    scalar *= &c;
                } else {
                    scalar /= &c;
                }
            }
            shift += h * Exponent::from_integer(a.power);
            let e = t.exp.to_integer();
            out.push(PochAtom { exp: e, ..a });
            out.push(PochAtom {
                exp: a.modulus - e,
                ..a
            });
        }
        for (i, a) in pending.iter().enumerate() {
            if !used[i] {
                out.push(*a);
            }
        }
        let mut merged: BTreeMap<(i64, Sign, i64), i64> = BTreeMap::new();
        for a in out {
            let a = if a.exp == 0 {
                match a.sign {
                    Sign::Plus => {
                        if a.power > 0 {
                            return Ok(PochProduct::constant(BigRational::zero()));
                        }
                        return Err(Error::Domain("division by (1;q)_inf = 0".into()));
                    }
                    Sign::Minus => {
                        let two = BigRational::from_integer(BigInt::from(2));
                        for _ in 0..a.power.abs() {
                            if a.power > 0 {
                                scalar *= &two;
                            } else {
                                scalar /= &two;
                            }
                        }
                        PochAtom {
                            exp: a.modulus,
                            ..a
                        }
                    }
                }
            } else {
                a
            };
            *merged.entry(a.key()).or_insert(0) += a.power;
        }
        let atoms = merged
            .into_iter()
            .filter(|(_, p)| *p != 0)
            .map(|((m, s, e), p)| PochAtom::new(s, e, m, p))
            .collect();
        Ok(PochProduct {
            scalar,
            shift,
            atoms,
        })
    }

    /// Smallest level `N` at which every atom is a product of `(q^b;q^N)` atoms.
    pub fn min_level(&self) -> i64 {
        self.atoms.iter().fold(1, |acc, a| match a.sign {
            Sign::Plus => lcm(acc, a.modulus),
            Sign::Minus => lcm(acc, 2 * a.modulus),
        })
    }

    /// Expansion of the canonical form without its scalar, exact below `q^t`.
    pub fn expand_unit(&self, t: i64) -> Result<QSeries> {
        let c = self.canonical()?;
        let den = *c.shift.denom();
        let shift_idx = c.shift.numer() * (den / c.shift.denom());
        let prec = den * t - shift_idx;
        if c.scalar.is_zero() {
            return Ok(QSeries::zero(den, t));
        }
        if prec <= 0 {
            return Ok(QSeries::from_parts(den, den * t, den * t, Vec::new()));
        }
        let mut s = QSeries::from_parts(den, 0, prec, vec![BigInt::one()]);
        for a in &c.atoms {
            s.apply_pochhammer(a.exp * den, a.sign, a.modulus * den, a.power)?;
        }
        Ok(s.shift(c.shift))
    }

    /// Expansion including the scalar, which must be an integer after canonicalization.
    pub fn expand(&self, t: i64) -> Result<QSeries> {
        let c = self.canonical()?;
        if !c.scalar.is_integer() {
            return Err(Error::Domain(format!(
                "scalar {} is not an integer; expand_unit and scale separately",
                c.scalar
            )));
        }
        Ok(c.expand_unit(t)?.scale(&c.scalar.to_integer()))
    }

    /// Rewrites the product in terms of the atoms `(q^b;q^N)`, `1 <= b <= N`.
    pub fn to_level(&self, n: i64) -> Result<AtomVector> {
        let c = self.canonical()?;
        let mut v = AtomVector::new(n, c.scalar.clone(), c.shift);
        if c.scalar.is_zero() {
            return Ok(v);
        }
        for a in &c.atoms {
            match a.sign {
                Sign::Plus => {
                    if n % a.modulus != 0 || a.exp <= 0 || a.exp > a.modulus {
                        return Err(Error::Domain(format!(
                            "(q^{};q^{}) does not blow up to level {}",
                            a.exp, a.modulus, n
                        )));
                    }
                    for j in 0..n / a.modulus {
                        v.add(a.exp + j * a.modulus, a.power);
                    }
                }
                Sign::Minus => {
                    // (-z;p) = (z^2;p^2) / (z;p)
                    if n % (2 * a.modulus) != 0 || a.exp <= 0 || a.exp > a.modulus {
                        return Err(Error::Domain(format!(
                            "(-q^{};q^{}) does not blow up to level {}",
                            a.exp, a.modulus, n
                        )));
                    }
                    let m2 = 2 * a.modulus;
                    for j in 0..n / m2 {
                        v.add(2 * a.exp + j * m2, a.power);
                    }
                    for j in 0..n / a.modulus {
                        v.add(a.exp + j * a.modulus, -a.power);
                    }
                }
            }
        }
        Ok(v)
    }

    /// Structural equality as functions: same atom vector at the common level.
    pub fn same_function(&self, other: &PochProduct) -> Result<bool> {
        let n = lcm(self.min_level(), other.min_level());
        Ok(self.to_level(n)? == other.to_level(n)?)
    }
}

/// Exponents of the atoms `(q^b;q^N)_inf`, `b = 1..=N`, with scalar and `q` shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomVector {
    pub level: i64,
    pub scalar: BigRational,
    pub shift: Exponent,
    exps: Vec<i64>,
}

impl AtomVector {
    pub fn new(level: i64, scalar: BigRational, shift: Exponent) -> AtomVector {
        AtomVector {
            level,
            scalar,
            shift,
            exps: vec![0; level as usize + 1],
        }
    }

    fn add(&mut self, b: i64, e: i64) {
        self.exps[b as usize] += e;
    }

    pub fn set(&mut self, b: i64, e: i64) {
        self.exps[b as usize] = e;
    }

    pub fn exponent(&self, b: i64) -> i64 {
        self.exps[b as usize]
    }

    /// Reads the vector as an `E_g` product; fails when `b` and `N-b` carry different
    /// exponents or the middle atom has an odd exponent.
    pub fn to_eproduct(&self) -> Result<EProduct> {
        let n = self.level;
        let mut factors = BTreeMap::new();
        let mut qpower = self.shift;
        for b in 1..n {
            if 2 * b > n {
                break;
            }
            let e = self.exps[b as usize];
            let a = if 2 * b == n {
                if e % 2 != 0 {
                    return Err(Error::Normalization(format!(
                        "atom (q^{};q^{}) has odd exponent {}",
                        b, n, e
                    )));
                }
                e / 2
            } else {
                let partner = self.exps[(n - b) as usize];
                if partner != e {
                    return Err(Error::Normalization(format!(
                        "atoms {} and {} at level {} have exponents {} and {}",
                        b,
                        n - b,
                        n,
                        e,
                        partner
                    )));
                }
                e
            };
            if a != 0 {
                factors.insert(b, a);
                qpower -= eg_prefactor(b, n) * Exponent::from_integer(a);
            }
        }
        Ok(EProduct {
            level: n,
            scalar: self.scalar.clone(),
            qpower,
            factors,
            eta: self.exps[n as usize],
        })
    }
}

/// `scalar * q^qpower * prod_g E_g^(a_g) * (q^N;q^N)_inf^eta` at level `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EProduct {
    pub level: i64,
    pub scalar: BigRational,
    pub qpower: Exponent,
    /// Keys are canonical `min(g, N-g)`; no zero exponents.
    pub factors: BTreeMap<i64, i64>,
    pub eta: i64,
}

impl EProduct {
    pub fn new<I: IntoIterator<Item = (i64, i64)>>(
        level: i64,
        scalar: BigRational,
        qpower: Exponent,
        factors: I,
        eta: i64,
    ) -> Result<EProduct> {
        if level < 1 {
            return Err(Error::Domain(format!("level {} must be positive", level)));
        }
        let mut map = BTreeMap::new();
        for (g, a) in factors {
            let r = g.rem_euclid(level);
            if r == 0 {
                return Err(Error::Domain(format!(
                    "E_{} is degenerate at level {}",
                    g, level
                )));
            }
            *map.entry(r.min(level - r)).or_insert(0) += a;
        }
        map.retain(|_, a| *a != 0);
        Ok(EProduct {
            level,
            scalar,
            qpower,
            factors: map,
            eta,
        })
    }

    pub fn one(level: i64) -> EProduct {
        EProduct {
            level,
            scalar: BigRational::one(),
            qpower: Exponent::zero(),
            factors: BTreeMap::new(),
            eta: 0,
        }
    }

    /// A plain quotient `prod E_g^(a_g)` with unit scalar.
    pub fn quotient<I: IntoIterator<Item = (i64, i64)>>(
        level: i64,
        factors: I,
    ) -> Result<EProduct> {
        EProduct::new(level, BigRational::one(), Exponent::zero(), factors, 0)
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty() && self.eta == 0 && self.qpower.is_zero()
    }

    pub fn mul(&self, other: &EProduct) -> Result<EProduct> {
        if self.level != other.level {
            return Err(Error::Domain(format!(
                "levels {} and {} differ",
                self.level, other.level
            )));
        }
        let f = self
            .factors
            .iter()
            .chain(other.factors.iter())
            .map(|(g, a)| (*g, *a));
        EProduct::new(
            self.level,
            &self.scalar * &other.scalar,
            self.qpower + other.qpower,
            f,
            self.eta + other.eta,
        )
    }

    pub fn inv(&self) -> Result<EProduct> {
        if self.scalar.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(EProduct {
            level: self.level,
            scalar: self.scalar.recip(),
            qpower: -self.qpower,
            factors: self.factors.iter().map(|(g, a)| (*g, -a)).collect(),
            eta: -self.eta,
        })
    }

    /// Total `q`-shift once every `E_g` prefactor is multiplied out.
    pub fn total_shift(&self) -> Exponent {
        self.factors.iter().fold(self.qpower, |acc, (g, a)| {
            acc + eg_prefactor(*g, self.level) * Exponent::from_integer(*a)
        })
    }

    /// The same function as a [`PochProduct`].
    pub fn to_poch(&self) -> PochProduct {
        let n = self.level;
        let mut atoms = Vec::new();
        for (&g, &a) in &self.factors {
            if 2 * g == n {
                atoms.push(PochAtom::plus(g, n, 2 * a));
            } else {
                atoms.push(PochAtom::plus(g, n, a));
                atoms.push(PochAtom::plus(n - g, n, a));
            }
        }
        if self.eta != 0 {
            atoms.push(PochAtom::plus(n, n, self.eta));
        }
        PochProduct {
            scalar: self.scalar.clone(),
            shift: self.total_shift(),
            atoms,
        }
    }

    pub fn expand_unit(&self, t: i64) -> Result<QSeries> {
        self.to_poch().expand_unit(t)
    }

    pub fn expand(&self, t: i64) -> Result<QSeries> {
        self.to_poch().expand(t)
    }

    /// Rewrites the product at a multiple `target` of its level.
    pub fn blowup(&self, target: i64) -> Result<EProduct> {
        if target <= 0 || target % self.level != 0 {
            return Err(Error::Domain(format!(
                "level {} does not divide {}",
                self.level, target
            )));
        }
        self.to_poch().to_level(target)?.to_eproduct()
    }
}

/// `theta(sign q^exp; q^modulus) = (sign q^exp, sign q^(modulus-exp); q^modulus)_inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaMonomial {
    pub modulus: i64,
    pub exp: Exponent,
    pub sign: Sign,
}

impl ThetaMonomial {
    pub fn new(modulus: i64, exp: Exponent, sign: Sign) -> ThetaMonomial {
        ThetaMonomial { modulus, exp, sign }
    }

    pub fn plus(modulus: i64, exp: i64) -> ThetaMonomial {
        ThetaMonomial::new(modulus, Exponent::from_integer(exp), Sign::Plus)
    }

    pub fn minus(modulus: i64, exp: i64) -> ThetaMonomial {
        ThetaMonomial::new(modulus, Exponent::from_integer(exp), Sign::Minus)
    }

    /// True for `theta(1) = 0`.
    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Plus && (self.exp / Exponent::from_integer(self.modulus)).is_integer()
    }

    /// Returns `(c, h, t)` with `self = c q^h t` and `t` in the canonical range
    /// `0 < a <= M/2`; `theta(-1)` keeps `a = 0`.
    pub fn normalize(&self) -> Result<(BigRational, Exponent, ThetaMonomial)> {
        if self.modulus <= 0 {
            return Err(Error::Domain(format!(
                "nonpositive theta modulus {}",
                self.modulus
            )));
        }
        if self.is_zero() {
            return Err(Error::ZeroTheta(format!("{}", self)));
        }
        let m = Exponent::from_integer(self.modulus);
        let s = self.sign.as_i64();
        let mut a = self.exp;
        let mut c: i64 = 1;
        let mut h = Exponent::zero();
        // theta(q^M z) = -z^{-1} theta(z)
        while a >= m {
            a -= m;
            c *= -s;
            h -= a;
        }
        // theta(z) = -z theta(q^M z)
        while a < Exponent::zero() {
            c *= -s;
            h += a;
            a += m;
        }
        // theta(q^M / z) = theta(z)
        if a * Exponent::from_integer(2) > m {
            a = m - a;
        }
        Ok((
            BigRational::from_integer(BigInt::from(c)),
            h,
            ThetaMonomial { exp: a, ..*self },
        ))
    }

    pub fn to_poch(&self) -> Result<PochProduct> {
        if !self.exp.is_integer() {
            return Err(Error::Domain(format!("{} has a fractional argument", self)));
        }
        let a = self.exp.to_integer();
        Ok(PochProduct::from_atoms(vec![
            PochAtom::new(self.sign, a, self.modulus, 1),
            PochAtom::new(self.sign, self.modulus - a, self.modulus, 1),
        ]))
    }

    /// Expansion exact below `q^t`; arguments may be fractional or out of range.
    pub fn expand(&self, t: i64) -> Result<QSeries> {
        let m = Exponent::from_integer(self.modulus);
        let (lo, hi) = (self.exp, m - self.exp);
        if lo >= Exponent::zero() && hi >= Exponent::zero() {
            let den = lcm(*lo.denom(), *hi.denom());
            let idx = |e: Exponent| e.numer() * (den / e.denom());
            let mut s = QSeries::from_parts(den, 0, den * t, vec![BigInt::one()]);
            s.apply_pochhammer(idx(lo), self.sign, self.modulus * den, 1)?;
            s.apply_pochhammer(idx(hi), self.sign, self.modulus * den, 1)?;
            return Ok(s);
        }
        let (c, h, canon) = self.normalize()?;
        let inner = canon.expand(t - h.floor().to_integer() + 1)?;
        let scaled = inner.scale(&c.to_integer()).shift(h);
        Ok(scaled.truncate(Exponent::from_integer(t)))
    }
}

impl fmt::Display for ThetaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Minus { "-" } else { "" };
        write!(f, "theta({}{};q^{})", s, qpow(self.exp), self.modulus)
    }
}

fn qpow(e: Exponent) -> String {
    if e.is_zero() {
        "1".into()
    } else if e.is_one() {
        "q".into()
    } else if e.is_integer() {
        format!("q^{}", e)
    } else {
        format!("q^({})", e)
    }
}

fn fmt_scalar_prefix(f: &mut fmt::Formatter<'_>, c: &BigRational, has_rest: bool) -> fmt::Result {
    if !has_rest {
        return write!(f, "{}", c);
    }
    if c.is_one() {
        Ok(())
    } else if (-c).is_one() {
        write!(f, "-")
    } else {
        write!(f, "{} ", c)
    }
}

impl fmt::Display for PochProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num: Vec<&PochAtom> = self.atoms.iter().filter(|a| a.power > 0).collect();
        let den: Vec<&PochAtom> = self.atoms.iter().filter(|a| a.power < 0).collect();
        let has_rest = !self.shift.is_zero() || !self.atoms.is_empty();
        fmt_scalar_prefix(f, &self.scalar, has_rest)?;
        let mut parts: Vec<String> = Vec::new();
        if !self.shift.is_zero() {
            parts.push(qpow(self.shift));
        }
        parts.extend(groups(&num, 1));
        if parts.is_empty() && !den.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" "))?;
        if !den.is_empty() {
            write!(f, " / {}", groups(&den, -1).join(" "))?;
        }
        Ok(())
    }
}

fn groups(atoms: &[&PochAtom], sgn: i64) -> Vec<String> {
    let mut order: Vec<(i64, i64)> = Vec::new();
    let mut by: BTreeMap<(i64, i64), Vec<String>> = BTreeMap::new();
    for a in atoms {
        let key = (a.modulus, a.power * sgn);
        if !by.contains_key(&key) {
            order.push(key);
        }
        let s = if a.sign == Sign::Minus { "-" } else { "" };
        by.entry(key)
            .or_default()
            .push(format!("{}{}", s, qpow(Exponent::from_integer(a.exp))));
    }
    order
        .into_iter()
        .map(|key| {
            let args = by[&key].join(",");
            let p = if key.1 == 1 {
                String::new()
            } else {
                format!("^{}", key.1)
            };
            format!("({};{}){}", args, qpow(Exponent::from_integer(key.0)), p)
        })
        .collect()
}

impl fmt::Display for EProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.level)?;
        if !self.scalar.is_one() {
            write!(f, "{} * ", self.scalar)?;
        }
        let sym = |g: i64, a: i64| {
            if a == 1 {
                format!("E{}", g)
            } else {
                format!("E{}^{}", g, a)
            }
        };
        let num: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, a)| **a > 0)
            .map(|(g, a)| sym(*g, *a))
            .collect();
        let den: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, a)| **a < 0)
            .map(|(g, a)| sym(*g, -*a))
            .collect();
        if num.is_empty() {
            write!(f, "1")?;
        } else {
            write!(f, "{}", num.join(" "))?;
        }
        if !den.is_empty() {
            write!(f, " / {}", den.join(" "))?;
        }
        if !self.qpower.is_zero() {
            if self.qpower.is_integer() {
                write!(f, " * q^{}", self.qpower)?;
            } else {
                write!(f, " * q^({})", self.qpower)?;
            }
        }
        if self.eta != 0 {
            write!(f, " * eta^{}", self.eta)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor {
            src: s.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: 1,
            column: self.pos + 1,
            message: msg.into(),
        })
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("expected an integer")
            }
        }
    }

    fn digit_next(&self) -> bool {
        self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit())
    }

    /// `q`, `q^e`, `q^(a/b)`; returns the exponent.
    fn qpow(&mut self) -> Result<Exponent> {
        if !self.eat(b'q') {
            return self.err("expected 'q'");
        }
        if !self.eat(b'^') {
            return Ok(Exponent::one());
        }
        if self.eat(b'{') {
            let e = self.rational()?;
            self.expect(b'}')?;
            return Ok(e);
        }
        if self.eat(b'(') {
            let e = self.rational()?;
            self.expect(b')')?;
            return Ok(e);
        }
        Ok(Exponent::from_integer(self.int()?))
    }

    fn rational(&mut self) -> Result<Exponent> {
        let n = self.int()?;
        if self.eat(b'/') {
            let d = self.int()?;
            if d == 0 {
                return self.err("zero denominator");
            }
            return Ok(Exponent::new(n, d));
        }
        Ok(Exponent::from_integer(n))
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

fn parse_arg(c: &mut Cursor) -> Result<(Sign, i64)> {
    let sign = if c.eat(b'-') { Sign::Minus } else { Sign::Plus };
    if c.peek() == Some(b'1') {
        c.int()?;
        return Ok((sign, 0));
    }
    let e = c.qpow()?;
    if !e.is_integer() {
        return c.err("Pochhammer arguments need integer exponents");
    }
    Ok((sign, e.to_integer()))
}

fn parse_group(c: &mut Cursor, sgn: i64) -> Result<Vec<PochAtom>> {
    c.expect(b'(')?;
    let mut args = vec![parse_arg(c)?];
    while c.eat(b',') {
        args.push(parse_arg(c)?);
    }
    c.expect(b';')?;
    let m = c.qpow()?;
    if !m.is_integer() || m <= Exponent::zero() {
        return c.err("modulus must be a positive integer power of q");
    }
    c.expect(b')')?;
    let _ = c.eat_str("_\\infty") || c.eat_str("_inf");
    let mut p = 1;
    if c.eat(b'^') {
        p = if c.eat(b'{') {
            let v = c.int()?;
            c.expect(b'}')?;
            v
        } else {
            c.int()?
        };
    }
    Ok(args
        .into_iter()
        .map(|(s, e)| PochAtom::new(s, e, m.to_integer(), p * sgn))
        .collect())
}

impl FromStr for PochProduct {
    type Err = Error;

    /// Grammar: `[-][scalar] [q^e] (args;q^M)[^k] ... [/ (args;q^M)[^k] ...]`,
    /// e.g. `1/2 q^-1 (q^2;q^2)(-q;q^2)^2` or `(q,q^6,q^7;q^7) / (q,q^4;q^5)`.
    fn from_str(s: &str) -> Result<PochProduct> {
        let mut c = Cursor::new(s);
        let mut p = PochProduct::one();
        let mut sgn = 1;
        if c.eat(b'-') {
            p.scalar = -p.scalar;
        } else {
            c.eat(b'+');
        }
        loop {
            match c.peek() {
                None => break,
                Some(b'*') => {
                    c.pos += 1;
                }
                Some(b'/') => {
                    if sgn < 0 {
                        return c.err("only one '/' is allowed");
                    }
                    c.pos += 1;
                    sgn = -1;
                }
                Some(b'(') => {
                    let atoms = parse_group(&mut c, sgn)?;
                    p.atoms.extend(atoms);
                }
                Some(b'q') => {
                    let e = c.qpow()?;
                    p.shift += e * Exponent::from_integer(sgn);
                }
                Some(ch) if ch.is_ascii_digit() => {
                    let n = BigInt::from(c.int()?);
                    let mut r = BigRational::from_integer(n);
                    // `a/b` directly followed by a digit is a rational scalar.
                    if c.peek() == Some(b'/') {
                        let save = c.pos;
                        c.pos += 1;
                        c.ws();
                        if c.digit_next() {
                            let d = c.int()?;
                            r /= BigRational::from_integer(BigInt::from(d));
                        } else {
                            c.pos = save;
                        }
                    }
                    if sgn > 0 {
                        p.scalar *= r;
                    } else {
                        if r.is_zero() {
                            return c.err("division by zero scalar");
                        }
                        p.scalar /= r;
                    }
                }
                Some(_) => return c.err("unexpected character"),
            }
        }
        if !c.at_end() {
            return c.err("trailing input");
        }
        Ok(p)
    }
}

impl FromStr for EProduct {
    type Err = Error;

    /// Grammar: `N: [scalar *] E7 E8^2 ... [/ E4 E9 ...] [* q^r] [* eta^k]`.
    fn from_str(s: &str) -> Result<EProduct> {
        let mut c = Cursor::new(s);
        let level = c.int()?;
        c.expect(b':')?;
        let mut scalar = BigRational::one();
        let mut qpower = Exponent::zero();
        let mut eta = 0;
        let mut factors: Vec<(i64, i64)> = Vec::new();
        let mut sgn = 1;
        if c.eat(b'-') {
            scalar = -scalar;
        }
        loop {
            match c.peek() {
                None => break,
                Some(b'*') => c.pos += 1,
                Some(b'/') => {
                    if sgn < 0 {
                        return c.err("only one '/' is allowed");
                    }
                    c.pos += 1;
                    sgn = -1;
                }
                Some(b'E') => {
                    c.pos += 1;
                    let g = c.int()?;
                    let a = if c.eat(b'^') { c.int()? } else { 1 };
                    factors.push((g, a * sgn));
                }
                Some(b'q') => {
                    let e = c.qpow()?;
                    qpower += e;
                }
                Some(b'e') => {
                    if !c.eat_str("eta") {
                        return c.err("expected 'eta'");
                    }
                    let k = if c.eat(b'^') { c.int()? } else { 1 };
                    eta += k;
                }
                Some(ch) if ch.is_ascii_digit() => {
                    let r = c.rational()?;
                    let r = big_rational(r);
                    if sgn > 0 {
                        scalar *= r;
                    } else {
                        scalar /= r;
                    }
                }
                Some(_) => return c.err("unexpected character"),
            }
        }
        EProduct::new(level, scalar, qpower, factors, eta)
    }
}

/// Converts an exact rational to a `BigRational`.
pub fn to_big(r: Exponent) -> BigRational {
    big_rational(r)
}

/// Rounds a `BigRational` known to be small to an `i64`, if integral.
pub fn big_to_i64(r: &BigRational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}
