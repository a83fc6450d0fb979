//! From square-sequence specifications to theta products.
//!
//! A specification `(K, b^2, signs)` describes `sum_n (-1)^(t(n)) q^(a_n)` where
//! `a_0 < a_1 < ...` are the integers `m` with `K m + b^2 = S^2`, `S >= 0`. The
//! solutions `S` fall into residue classes modulo a period `R`; each class carries a
//! sign, and along a class the sign alternates (`(-1)^k`) or stays fixed. Pairing the
//! classes `r` and `R - r` turns two one-sided sums into a bilateral sum, which the
//! Jacobi triple product converts into a single product.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prover::IdentityStatement;
use crate::series::{QSeries, Sign};
use crate::thetaprod::{to_big, PochAtom, PochProduct};
use crate::Exponent;

/// Minimal period `R` of `{S mod K : S^2 = bsq (mod K)}` and the solutions in `[0, R)`.
pub fn solve_residues(k: i64, bsq: i64) -> Result<(i64, Vec<i64>)> {
    if k < 1 {
        return Err(Error::Domain(format!("modulus K = {} must be positive", k)));
    }
    let sols: Vec<i64> = (0..k)
        .filter(|s| (s * s - bsq).rem_euclid(k) == 0)
        .collect();
    if sols.is_empty() {
        return Ok((k, Vec::new()));
    }
    let mut mark = vec![false; k as usize];
    for &s in &sols {
        mark[s as usize] = true;
    }
    let r = (1..=k)
        .filter(|r| k % r == 0)
        .find(|&r| sols.iter().all(|&s| mark[((s + r) % k) as usize]))
        .unwrap_or(k);
    let classes: Vec<i64> = sols.into_iter().filter(|&s| s < r).collect();
    Ok((r, classes))
}

/// `(K, b^2)` with one sign per residue class and the alternation rule along classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareClassSpec {
    pub k: i64,
    pub bsq: i64,
    pub period: i64,
    pub classes: Vec<i64>,
    pub signs: Vec<Sign>,
    pub alternating: bool,
}

impl SquareClassSpec {
    pub fn new(k: i64, bsq: i64, signs: Vec<Sign>, alternating: bool) -> Result<SquareClassSpec> {
        let (period, classes) = solve_residues(k, bsq)?;
        if signs.len() != classes.len() {
            return Err(Error::Domain(format!(
                "K={} bsq={} has {} residue classes mod {} but {} signs were given",
                k,
                bsq,
                classes.len(),
                period,
                signs.len()
            )));
        }
        Ok(SquareClassSpec {
            k,
            bsq,
            period,
            classes,
            signs,
            alternating,
        })
    }

    /// Reads class signs off a printed `t(n)` rule; fails when no class sign rule fits.
    pub fn from_pattern(k: i64, bsq: i64, pattern: &SignPattern) -> Result<SquareClassSpec> {
        let (period, classes) = solve_residues(k, bsq)?;
        let roots = roots_up_to(k, bsq, 3 * period);
        let sign_at = |n: usize| {
            if pattern.bit(n) == 0 {
                Sign::Plus
            } else {
                Sign::Minus
            }
        };
        let signs: Vec<Sign> = classes
            .iter()
            .map(|r| sign_at(roots.iter().position(|s| s == r).unwrap()))
            .collect();
        for alternating in [true, false] {
            let spec = SquareClassSpec {
                k,
                bsq,
                period,
                classes: classes.clone(),
                signs: signs.clone(),
                alternating,
            };
            if roots
                .iter()
                .enumerate()
                .all(|(n, &s)| spec.sign_of_root(s) == sign_at(n))
            {
                return Ok(spec);
            }
        }
        Err(Error::Domain(format!(
            "pattern {} is not constant along residue classes of K={} bsq={}",
            pattern, k, bsq
        )))
    }

    fn class_index(&self, s: i64) -> usize {
        let r = s.rem_euclid(self.period);
        self.classes
            .binary_search(&r)
            .expect("root lies in a class")
    }

    /// Sign of the term coming from the root `S >= 0`.
    pub fn sign_of_root(&self, s: i64) -> Sign {
        let base = self.signs[self.class_index(s)];
        let k = s.div_euclid(self.period);
        if self.alternating && k % 2 == 1 {
            base.flip()
        } else {
            base
        }
    }

    /// Roots `S >= 0` with exponent `(S^2 - bsq)/K` below `t`, increasing.
    pub fn roots(&self, t: i64) -> Vec<i64> {
        let bound = self.k * t + self.bsq;
        let smax = if bound > 0 { bound.sqrt() + 1 } else { 0 };
        (0..=smax)
            .filter(|s| {
                (s * s - self.bsq).rem_euclid(self.k) == 0 && (s * s - self.bsq) < self.k * t
            })
            .collect()
    }

    /// `sum (-1)^(t(n)) q^(a_n)` by direct enumeration below `q^t`.
    pub fn direct_series(&self, t: i64) -> QSeries {
        let roots = self.roots(t);
        let lo = roots
            .iter()
            .map(|s| (s * s - self.bsq) / self.k)
            .min()
            .unwrap_or(0)
            .min(0);
        let mut coeffs = vec![BigInt::zero(); (t - lo).max(0) as usize];
        for s in roots {
            let e = (s * s - self.bsq) / self.k;
            coeffs[(e - lo) as usize] += self.sign_of_root(s).as_i64();
        }
        QSeries::from_parts(1, lo, t, coeffs)
    }

    fn partner_index(&self, i: usize) -> usize {
        let p = (self.period - self.classes[i]).rem_euclid(self.period);
        self.classes
            .binary_search(&p)
            .expect("classes closed under negation")
    }
}

fn roots_up_to(k: i64, bsq: i64, count: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut s = 0;
    while (out.len() as i64) < count {
        if (s * s - bsq).rem_euclid(k) == 0 {
            out.push(s);
        }
        s += 1;
    }
    out
}

impl fmt::Display for SquareClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let signs: Vec<&str> = self
            .signs
            .iter()
            .map(|s| if *s == Sign::Plus { "+" } else { "-" })
            .collect();
        write!(
            f,
            "K={} bsq={} signs={} {}",
            self.k,
            self.bsq,
            signs.join(","),
            if self.alternating { "alt" } else { "plain" }
        )
    }
}

/// `weight * sign * sum_k (±1)^k q^(A k^2 + B k + C)`; `weight` is `1` or `1/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilateralSum {
    pub sign: Sign,
    pub alternating: bool,
    pub a: Exponent,
    pub b: Exponent,
    pub c: Exponent,
    pub weight: Exponent,
}

impl BilateralSum {
    pub fn exponent_at(&self, k: i64) -> Exponent {
        let k = Exponent::from_integer(k);
        self.a * k * k + self.b * k + self.c
    }

    /// True when the exponent is an integer for `k` in `{0, ±1, ±2}`.
    pub fn integer_valued(&self) -> bool {
        (-2..=2).all(|k| self.exponent_at(k).is_integer())
    }

    /// The triple product `q^C (q^(2A), ±q^(A+B), ±q^(A-B); q^(2A))` with its weight.
    pub fn to_product(&self) -> Result<PochProduct> {
        let m = self.a * Exponent::from_integer(2);
        let (p, n) = (self.a + self.b, self.a - self.b);
        if !m.is_integer() || !p.is_integer() || !n.is_integer() {
            return Err(Error::Domain(format!(
                "bilateral sum with A={} B={} has non-integral product exponents",
                self.a, self.b
            )));
        }
        let s = if self.alternating {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let m = m.to_integer();
        let scalar = to_big(self.weight) * BigRational::from_integer(self.sign.as_i64().into());
        Ok(PochProduct {
            scalar,
            shift: self.c,
            atoms: vec![
                PochAtom::plus(m, m, 1),
                PochAtom::new(s, p.to_integer(), m, 1),
                PochAtom::new(s, n.to_integer(), m, 1),
            ],
        })
    }
}

/// Pairs each class `r < R/2` with `R - r` and returns the bilateral sums, together with
/// the stray monomials a self-paired class `r = 0` leaves behind.
pub fn build_bilateral(spec: &SquareClassSpec) -> Result<(Vec<BilateralSum>, Vec<PochProduct>)> {
    let r_big = spec.period;
    let mut sums = Vec::new();
    let mut extra = Vec::new();
    for (i, &r) in spec.classes.iter().enumerate() {
        let j = spec.partner_index(i);
        let p = spec.classes[j];
        let a = Exponent::new(r_big * r_big, spec.k);
        let c = Exponent::new(r * r - spec.bsq, spec.k);
        if i == j {
            if spec.alternating {
                return Err(Error::Pairing(r, p));
            }
            // r = 0 or r = R/2: the class is its own partner
            let b = Exponent::new(2 * r * r_big, spec.k);
            let half = Exponent::new(1, 2);
            sums.push(BilateralSum {
                sign: spec.signs[i],
                alternating: false,
                a,
                b,
                c,
                weight: half,
            });
            if r == 0 {
                extra.push(PochProduct::monomial(
                    to_big(half) * BigRational::from_integer(spec.signs[i].as_i64().into()),
                    c,
                ));
            }
            continue;
        }
        if r > p {
            continue;
        }
        let compatible = if spec.alternating {
            spec.signs[j] == spec.signs[i].flip()
        } else {
            spec.signs[j] == spec.signs[i]
        };
        if !compatible {
            return Err(Error::Pairing(r, p));
        }
        let b = Exponent::new(2 * r * r_big, spec.k);
        sums.push(BilateralSum {
            sign: spec.signs[i],
            alternating: spec.alternating,
            a,
            b,
            c,
            weight: Exponent::one(),
        });
    }
    Ok((sums, extra))
}

/// The generating function of `spec` as a list of products.
pub fn compile_theta(spec: &SquareClassSpec) -> Result<Vec<PochProduct>> {
    let (sums, extra) = build_bilateral(spec)?;
    let mut out = Vec::with_capacity(sums.len() + extra.len());
    for s in &sums {
        out.push(s.to_product()?);
    }
    out.extend(extra);
    Ok(out)
}

/// The bits `t(n)` for `n < terms`, read from the roots in increasing order.
pub fn sign_pattern(spec: &SquareClassSpec, terms: usize) -> Result<Vec<u8>> {
    if spec.classes.is_empty() {
        return Err(Error::Domain("specification has no residue classes".into()));
    }
    let roots = roots_up_to(spec.k, spec.bsq, terms as i64);
    // distinct roots S >= 0 have distinct exponents, so no collision can occur
    Ok(roots
        .into_iter()
        .map(|s| {
            if spec.sign_of_root(s) == Sign::Plus {
                0
            } else {
                1
            }
        })
        .collect())
}

/// Printed sign rules `t(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignPattern {
    /// `t(n) = 0` iff `n mod period` lies in `zeros`.
    Table { period: usize, zeros: Vec<usize> },
    /// `t(n) = floor((mul n + add) / div)`.
    Floor { mul: usize, add: usize, div: usize },
}

impl SignPattern {
    pub fn bit(&self, n: usize) -> u8 {
        match self {
            SignPattern::Table { period, zeros } => u8::from(!zeros.contains(&(n % period))),
            SignPattern::Floor { mul, add, div } => (((mul * n + add) / div) % 2) as u8,
        }
    }

    pub fn all_plus() -> SignPattern {
        SignPattern::Table {
            period: 1,
            zeros: vec![0],
        }
    }

    /// `floor((n+2)/4)`
    pub fn fl24() -> SignPattern {
        SignPattern::Floor {
            mul: 1,
            add: 2,
            div: 4,
        }
    }

    /// `floor((n+4)/8)`
    pub fn fl48() -> SignPattern {
        SignPattern::Floor {
            mul: 1,
            add: 4,
            div: 8,
        }
    }

    /// `floor(5n/4)`
    pub fn fl5() -> SignPattern {
        SignPattern::Floor {
            mul: 5,
            add: 0,
            div: 4,
        }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignPattern::Table { period, zeros } => {
                let z: Vec<String> = zeros.iter().map(|z| z.to_string()).collect();
                write!(f, "zeros {{{}}} mod {}", z.join(","), period)
            }
            SignPattern::Floor { mul, add, div } => write!(f, "floor(({}n+{})/{})", mul, add, div),
        }
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    /// `floor(n+2,4)`, `floor(5n+0,4)` or `table(16:0,1,3,5)`.
    fn from_str(s: &str) -> Result<SignPattern> {
        let bad = || Error::Parse {
            line: 1,
            column: 1,
            message: format!("bad sign pattern '{}'", s),
        };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("floor(").and_then(|r| r.strip_suffix(')')) {
            let (lin, div) = rest.split_once(',').ok_or_else(bad)?;
            let (m, a) = lin.split_once("n+").ok_or_else(bad)?;
            let mul = if m.is_empty() {
                1
            } else {
                m.parse().map_err(|_| bad())?
            };
            return Ok(SignPattern::Floor {
                mul,
                add: a.trim().parse().map_err(|_| bad())?,
                div: div.trim().parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = s.strip_prefix("table(").and_then(|r| r.strip_suffix(')')) {
            let (p, z) = rest.split_once(':').ok_or_else(bad)?;
            let zeros = z
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse().map_err(|_| bad()))
                .collect::<Result<Vec<usize>>>()?;
            return Ok(SignPattern::Table {
                period: p.trim().parse().map_err(|_| bad())?,
                zeros,
            });
        }
        Err(bad())
    }
}

/// `coef * q^shift * G(q^scale)` for the generating function `G` of `spec`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareComponent {
    pub spec: SquareClassSpec,
    pub coef: i64,
    pub scale: i64,
    pub shift: i64,
}

impl SquareComponent {
    pub fn plain(spec: SquareClassSpec) -> SquareComponent {
        SquareComponent {
            spec,
            coef: 1,
            scale: 1,
            shift: 0,
        }
    }

    pub fn compile(&self) -> Result<Vec<PochProduct>> {
        if self.scale < 1 {
            return Err(Error::Domain(format!(
                "scale {} must be positive",
                self.scale
            )));
        }
        let c = BigRational::from_integer(self.coef.into());
        Ok(compile_theta(&self.spec)?
            .into_iter()
            .map(|p| {
                p.substitute(self.scale)
                    .scaled(&c)
                    .shifted(Exponent::from_integer(self.shift))
            })
            .collect())
    }

    pub fn direct_series(&self, t: i64) -> QSeries {
        let inner_t = (t - self.shift).div_euclid(self.scale) + 1;
        let g = self.spec.direct_series(inner_t.max(1));
        g.substitute(self.scale)
            .scale(&BigInt::from(self.coef))
            .shift(Exponent::from_integer(self.shift))
            .truncate(Exponent::from_integer(t))
    }
}

impl fmt::Display for SquareComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec)?;
        if self.coef != 1 {
            write!(f, " coef={}", self.coef)?;
        }
        if self.scale != 1 {
            write!(f, " scale={}", self.scale)?;
        }
        if self.shift != 0 {
            write!(f, " shift={}", self.shift)?;
        }
        Ok(())
    }
}

impl FromStr for SquareComponent {
    type Err = Error;

    /// `K=840 bsq=361 signs=+,+,-,+,-,+,-,- alt [coef=-1] [scale=5] [shift=1]`;
    /// `plain` instead of `alt` selects the non-alternating rule, `pattern=floor(n+2,4)`
    /// may replace `signs=`.
    fn from_str(s: &str) -> Result<SquareComponent> {
        let bad = |m: String| Error::Parse {
            line: 1,
            column: 1,
            message: m,
        };
        let (mut k, mut bsq, mut signs, mut alt, mut pattern) = (None, None, None, None, None);
        let (mut coef, mut scale, mut shift) = (1, 1, 0);
        for tok in s.split_whitespace() {
            let int = |v: &str| {
                v.parse::<i64>()
                    .map_err(|_| bad(format!("bad integer in '{}'", tok)))
            };
            match tok.split_once('=') {
                Some(("K", v)) => k = Some(int(v)?),
                Some(("bsq", v)) => bsq = Some(int(v)?),
                Some(("coef", v)) => coef = int(v)?,
                Some(("scale", v)) => scale = int(v)?,
                Some(("shift", v)) => shift = int(v)?,
                Some(("pattern", v)) => pattern = Some(v.parse::<SignPattern>()?),
                Some(("signs", v)) => {
                    let list = v
                        .split(',')
                        .map(|x| match x {
                            "+" => Ok(Sign::Plus),
                            "-" => Ok(Sign::Minus),
                            _ => Err(bad(format!("bad sign '{}'", x))),
                        })
                        .collect::<Result<Vec<Sign>>>()?;
                    signs = Some(list);
                }
                None if tok == "alt" => alt = Some(true),
                None if tok == "plain" => alt = Some(false),
                _ => return Err(bad(format!("unknown field '{}'", tok))),
            }
        }
        let k = k.ok_or_else(|| bad("missing K=".into()))?;
        let bsq = bsq.ok_or_else(|| bad("missing bsq=".into()))?;
        let spec = match (signs, pattern) {
            (Some(signs), None) => SquareClassSpec::new(k, bsq, signs, alt.unwrap_or(true))?,
            (None, Some(p)) => SquareClassSpec::from_pattern(k, bsq, &p)?,
            _ => return Err(bad("give exactly one of signs= and pattern=".into())),
        };
        Ok(SquareComponent {
            spec,
            coef,
            scale,
            shift,
        })
    }
}

// ---------------------------------------------------------------------------
// Parametric families

/// The parametric families of product formulae.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `K = 24P`, `a < P`.
    F24PThm,
    /// `K = 24P`, `P < a < 2P`.
    F24PCor,
    /// `K = 3P`, `a < P/2`.
    F3PThm,
    /// `K = 3P`, `P/2 < a < P`.
    F3PCor,
    /// `K = 16`, `a` in `{1, 3}`.
    F16m,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::F24PThm,
        Family::F24PCor,
        Family::F3PThm,
        Family::F3PCor,
        Family::F16m,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::F24PThm => "24P-thm",
            Family::F24PCor => "24P-cor",
            Family::F3PThm => "3P-thm",
            Family::F3PCor => "3P-cor",
            Family::F16m => "16m",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameter(format!("unknown family '{}'", s)))
    }
}

/// Which specialization of the three-term relation collapses the two bilateral sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThrelUse {
    pub which: u8,
    pub n: i64,
    pub u_exp: i64,
}

/// One member of a family with its case label and printed residue list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricInstance {
    pub family: Family,
    pub p: i64,
    pub a: i64,
    pub case: &'static str,
    pub spec: SquareClassSpec,
    pub printed_classes: Vec<i64>,
    pub statement: IdentityStatement,
    pub threl: Option<ThrelUse>,
}

/// True when `p` is a power of a single odd prime.
pub fn is_odd_prime_power(p: i64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut q = 3;
    while q * q <= p {
        if p % q == 0 {
            let mut m = p;
            while m % q == 0 {
                m /= q;
            }
            return m == 1;
        }
        q += 2;
    }
    true
}

/// Checks the hypotheses of `family` for `(p, a)`.
pub fn check_admissible(family: Family, p: i64, a: i64) -> Result<()> {
    let fail = |m: String| Err(Error::Parameter(m));
    if family == Family::F16m {
        return if a == 1 || a == 3 {
            Ok(())
        } else {
            fail(format!("a = {} must be 1 or 3", a))
        };
    }
    if !is_odd_prime_power(p) {
        return fail(format!("P = {} is not an odd prime power", p));
    }
    if a < 1 || a.gcd(&p) != 1 {
        return fail(format!(
            "a = {} must be positive and coprime to P = {}",
            a, p
        ));
    }
    if p % 3 == 0 || a % 3 == 0 {
        return fail(format!("P = {} and a = {} must both be prime to 3", p, a));
    }
    match family {
        Family::F24PThm | Family::F24PCor if a % 2 == 0 => fail(format!("a = {} must be odd", a)),
        Family::F24PThm if a >= p => fail(format!("a = {} must be below P = {}", a, p)),
        Family::F24PCor if !(p < a && a < 2 * p) => fail(format!("a = {} must lie in (P, 2P)", a)),
        Family::F3PThm if 2 * a >= p => fail(format!("a = {} must be below P/2", a)),
        Family::F3PCor if !(p < 2 * a && a < p) => fail(format!("a = {} must lie in (P/2, P)", a)),
        _ => Ok(()),
    }
}

fn poch(nums: &[i64], dens: &[i64], m: i64) -> PochProduct {
    let mut atoms: Vec<PochAtom> = nums.iter().map(|&e| PochAtom::plus(e, m, 1)).collect();
    atoms.extend(dens.iter().map(|&e| PochAtom::plus(e, m, -1)));
    PochProduct::from_atoms(atoms)
}

/// Instantiates one family member.
pub fn parametric_instance(family: Family, p: i64, a: i64) -> Result<ParametricInstance> {
    check_admissible(family, p, a)?;
    if family == Family::F16m {
        let spec = SquareClassSpec::new(16, a * a, vec![Sign::Plus, Sign::Plus], false)?;
        let rhs = PochProduct::from_atoms(vec![
            PochAtom::plus(8, 8, 1),
            PochAtom::new(Sign::Minus, 4 + a, 8, 1),
            PochAtom::new(Sign::Minus, 4 - a, 8, 1),
        ]);
        let lhs = compile_theta(&spec)?;
        let name = format!("16m+{}", a * a);
        return Ok(ParametricInstance {
            family,
            p: 0,
            a,
            case: "-",
            printed_classes: vec![a, 8 - a],
            statement: IdentityStatement::new(name, 16, lhs, rhs),
            spec,
            threl: None,
        });
    }
    let c1 = (a - p) % 3 == 0;
    let (k, pattern, rhs, classes, case, threl, level);
    match family {
        Family::F24PThm | Family::F24PCor => {
            k = 24 * p;
            level = 3 * p;
            let thm = family == Family::F24PThm;
            pattern = if thm || c1 {
                SignPattern::fl24()
            } else {
                SignPattern::fl5()
            };
            if c1 {
                rhs = poch(
                    &[(p - a) / 3, (2 * p + a) / 3, p],
                    &[(p - a) / 6, (5 * p + a) / 6],
                    p,
                );
                threl = ThrelUse {
                    which: 1,
                    n: p,
                    u_exp: (5 * p + a) / 6,
                };
                classes = if thm {
                    vec![a, 2 * p - a, 4 * p + a, 6 * p - a]
                } else {
                    vec![2 * p - a, a, 6 * p - a, 4 * p + a]
                };
            } else {
                rhs = poch(
                    &[(p + a) / 3, (2 * p - a) / 3, p],
                    &[(p + a) / 6, (5 * p - a) / 6],
                    p,
                );
                threl = ThrelUse {
                    which: 1,
                    n: p,
                    u_exp: (5 * p - a) / 6,
                };
                classes = if thm {
                    vec![a, 2 * p + a, 4 * p - a, 6 * p - a]
                } else {
                    vec![a, 4 * p - a, 2 * p + a, 6 * p - a]
                };
            }
            case = match (thm, c1) {
                (true, true) => "C1",
                (true, false) => "C2",
                (false, true) => "C1'",
                (false, false) => "C2'",
            };
        }
        Family::F3PThm | Family::F3PCor => {
            k = 3 * p;
            level = 6 * p;
            let thm = family == Family::F3PThm;
            pattern = if thm || !c1 {
                SignPattern::fl24()
            } else {
                SignPattern::fl5()
            };
            let m = 2 * p;
            if c1 {
                rhs = poch(
                    &[(4 * p - 4 * a) / 3, (2 * p + 4 * a) / 3, m],
                    &[(5 * p - 2 * a) / 3, (p + 2 * a) / 3],
                    m,
                );
                threl = ThrelUse {
                    which: 1,
                    n: m,
                    u_exp: (5 * p - 2 * a) / 3,
                };
                classes = if thm {
                    vec![a, p + a, 2 * p - a, 3 * p - a]
                } else {
                    vec![a, 2 * p - a, p + a, 3 * p - a]
                };
            } else {
                rhs = poch(
                    &[(4 * p + 4 * a) / 3, (2 * p - 4 * a) / 3, m],
                    &[(5 * p + 2 * a) / 3, (p - 2 * a) / 3],
                    m,
                );
                threl = ThrelUse {
                    which: 1,
                    n: m,
                    u_exp: (5 * p + 2 * a) / 3,
                };
                classes = if thm {
                    vec![a, p - a, 2 * p + a, 3 * p - a]
                } else {
                    vec![p - a, a, 3 * p - a, 2 * p + a]
                };
            }
            case = match (thm, c1) {
                (true, true) => "C1",
                (true, false) => "C2",
                (false, true) => "C1'",
                (false, false) => "C2'",
            };
        }
        Family::F16m => unreachable!(),
    }
    let spec = SquareClassSpec::from_pattern(k, a * a, &pattern)?;
    let lhs = compile_theta(&spec)?;
    let name = format!("{}:P={}:a={}", family, p, a);
    let mut statement = IdentityStatement::new(name, level, lhs, rhs);
    statement.tag = format!("{}m+{}", k, a * a);
    Ok(ParametricInstance {
        family,
        p,
        a,
        case,
        spec,
        printed_classes: classes,
        statement,
        threl: Some(threl),
    })
}

/// All admissible members with `P <= pmax`; inadmissible pairs are returned separately
/// with the reason.
pub fn parametric_instances(
    family: Family,
    pmax: i64,
) -> (Vec<ParametricInstance>, Vec<(i64, i64, Error)>) {
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    if family == Family::F16m {
        for a in [1, 3] {
            match parametric_instance(family, 0, a) {
                Ok(i) => ok.push(i),
                Err(e) => skipped.push((0, a, e)),
            }
        }
        return (ok, skipped);
    }
    for p in (3..=pmax).filter(|&p| is_odd_prime_power(p)) {
        for a in 1..2 * p {
            let nominal = match family {
                Family::F24PThm => a % 2 == 1 && a < p,
                Family::F24PCor => a % 2 == 1 && p < a && a < 2 * p,
                Family::F3PThm => 2 * a < p,
                Family::F3PCor => p < 2 * a && a < p,
                Family::F16m => false,
            };
            if !nominal || a.gcd(&p) != 1 {
                continue;
            }
            match parametric_instance(family, p, a) {
                Ok(i) => ok.push(i),
                Err(e) => skipped.push((p, a, e)),
            }
        }
    }
    (ok, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_840() {
        let (r, c) = solve_residues(840, 361).unwrap();
        assert_eq!(r, 210);
        assert_eq!(c, vec![19, 61, 79, 89, 121, 131, 149, 191]);
        assert_eq!(solve_residues(16, 1).unwrap(), (8, vec![1, 7]));
        assert_eq!(solve_residues(48, 1).unwrap(), (24, vec![1, 7, 17, 23]));
    }

    #[test]
    fn theorem_one_bilateral() {
        let spec: SquareComponent = "K=840 bsq=361 pattern=table(16:0,1,3,5,10,12,14,15)"
            .parse()
            .unwrap();
        let (sums, extra) = build_bilateral(&spec.spec).unwrap();
        assert!(extra.is_empty());
        let got: Vec<(Exponent, Exponent, i64)> =
            sums.iter().map(|s| (s.b, s.c, s.sign.as_i64())).collect();
        assert_eq!(
            got,
            vec![
                (Exponent::new(19, 2), Exponent::from_integer(0), 1),
                (Exponent::new(61, 2), Exponent::from_integer(4), 1),
                (Exponent::new(79, 2), Exponent::from_integer(7), -1),
                (Exponent::new(89, 2), Exponent::from_integer(9), 1),
            ]
        );
        assert!(sums
            .iter()
            .all(|s| s.a == Exponent::new(105, 2) && s.integer_valued()));
    }

    #[test]
    fn sixteen_m() {
        let spec = SquareClassSpec::new(16, 1, vec![Sign::Plus, Sign::Plus], false).unwrap();
        let (sums, _) = build_bilateral(&spec).unwrap();
        assert_eq!(sums.len(), 1);
        assert_eq!(
            (sums[0].a, sums[0].b, sums[0].c),
            (
                Exponent::from_integer(4),
                Exponent::from_integer(1),
                Exponent::from_integer(0)
            )
        );
        let p = &compile_theta(&spec).unwrap()[0];
        assert_eq!(p.to_string(), "(q^8,-q^5,-q^3;q^8)");
    }

    #[test]
    fn mismatched_pairing() {
        let spec = SquareClassSpec::new(16, 1, vec![Sign::Plus, Sign::Plus], true).unwrap();
        assert_eq!(build_bilateral(&spec), Err(Error::Pairing(1, 7)));
    }

    #[test]
    fn patterns() {
        let spec = SquareClassSpec::from_pattern(
            840,
            361,
            &"table(16:0,1,3,5,10,12,14,15)".parse().unwrap(),
        )
        .unwrap();
        let bits = sign_pattern(&spec, 16).unwrap();
        let zeros: Vec<usize> = (0..16).filter(|&n| bits[n] == 0).collect();
        assert_eq!(zeros, vec![0, 1, 3, 5, 10, 12, 14, 15]);
        let spec = SquareClassSpec::from_pattern(240, 1, &SignPattern::fl24()).unwrap();
        let bits = sign_pattern(&spec, 8).unwrap();
        assert_eq!(
            bits,
            (0..8)
                .map(|n| SignPattern::fl24().bit(n))
                .collect::<Vec<_>>()
        );
        let spec = SquareClassSpec::new(8, 1, vec![Sign::Plus], false).unwrap();
        assert!(sign_pattern(&spec, 12).unwrap().iter().all(|b| *b == 0));
    }

    #[test]
    fn family_examples() {
        let i = parametric_instance(Family::F24PThm, 5, 1).unwrap();
        assert_eq!(
            i.statement.rhs.to_string(),
            "(q^2,q^3,q^5;q^5) / (q,q^4;q^5)"
        );
        let i = parametric_instance(Family::F16m, 0, 3).unwrap();
        assert_eq!(i.statement.rhs.to_string(), "(q^8,-q^7,-q;q^8)");
        assert!(matches!(
            parametric_instance(Family::F24PThm, 5, 7),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            parametric_instance(Family::F3PThm, 9, 1),
            Err(Error::Parameter(_))
        ));
    }
}
