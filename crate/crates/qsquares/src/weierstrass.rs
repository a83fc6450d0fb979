//! The Weierstrass three-term theta relation, its two specializations, and the search
//! for monomial specializations that collapse a two-term sum into one product.
//!
//! With `theta(z) = theta(z; p) = (z, p/z; p)_inf`,
//!
//! ```text
//! X1 = theta(xy) theta(x/y) theta(uv) theta(u/v)
//! X2 = -theta(xv) theta(x/v) theta(uy) theta(u/y)
//! X3 = -(u/y) theta(yv) theta(y/v) theta(xu) theta(x/u)
//! ```
//!
//! satisfy `X1 + X2 + X3 = 0`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prover::combination_series;
use crate::series::{QSeries, Sign};
use crate::thetaprod::{PochAtom, PochProduct, ThetaMonomial};
use crate::Exponent;

/// `±q^e` used as a theta argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedMonomial {
    pub sign: Sign,
    pub exp: Exponent,
}

impl SignedMonomial {
    pub fn new(sign: Sign, exp: i64) -> SignedMonomial {
        SignedMonomial {
            sign,
            exp: Exponent::from_integer(exp),
        }
    }

    pub fn q(exp: i64) -> SignedMonomial {
        SignedMonomial::new(Sign::Plus, exp)
    }

    pub fn neg_q(exp: i64) -> SignedMonomial {
        SignedMonomial::new(Sign::Minus, exp)
    }

    pub fn mul(self, o: SignedMonomial) -> SignedMonomial {
        SignedMonomial {
            sign: self.sign.times(o.sign),
            exp: self.exp + o.exp,
        }
    }

    pub fn div(self, o: SignedMonomial) -> SignedMonomial {
        SignedMonomial {
            sign: self.sign.times(o.sign),
            exp: self.exp - o.exp,
        }
    }

    pub fn pow(self, k: i64) -> SignedMonomial {
        let sign = if k.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            self.sign
        };
        SignedMonomial {
            sign,
            exp: self.exp * Exponent::from_integer(k),
        }
    }

    fn theta(self, modulus: i64) -> ThetaMonomial {
        ThetaMonomial::new(modulus, self.exp, self.sign)
    }
}

impl fmt::Display for SignedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Minus { "-" } else { "" };
        if self.exp.is_zero() {
            write!(f, "{}1", s)
        } else if self.exp.is_one() {
            write!(f, "{}q", s)
        } else if self.exp.is_integer() {
            write!(f, "{}q^{}", s, self.exp)
        } else {
            write!(f, "{}q^({})", s, self.exp)
        }
    }
}

impl FromStr for SignedMonomial {
    type Err = Error;

    /// `q`, `-q^9`, `q^-3`, `1`, `-1`.
    fn from_str(s: &str) -> Result<SignedMonomial> {
        let bad = || Error::Parse {
            line: 1,
            column: 1,
            message: format!("bad monomial '{}'", s),
        };
        let t = s.trim();
        let (sign, body) = match t.strip_prefix('-') {
            Some(r) => (Sign::Minus, r.trim()),
            None => (Sign::Plus, t.strip_prefix('+').unwrap_or(t).trim()),
        };
        let exp = if body == "1" {
            Exponent::zero()
        } else if body == "q" {
            Exponent::one()
        } else if let Some(e) = body.strip_prefix("q^") {
            let e = e.trim_start_matches('(').trim_end_matches(')');
            e.parse::<Exponent>().map_err(|_| bad())?
        } else {
            return Err(bad());
        };
        Ok(SignedMonomial { sign, exp })
    }
}

/// `theta(. ; q^base)` relation instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassInstance {
    pub base_modulus: i64,
    pub u: SignedMonomial,
    pub v: SignedMonomial,
    pub x: SignedMonomial,
    pub y: SignedMonomial,
}

impl fmt::Display for WeierstrassInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "base={} u={} v={} x={} y={}",
            self.base_modulus, self.u, self.v, self.x, self.y
        )
    }
}

impl FromStr for WeierstrassInstance {
    type Err = Error;

    /// `base=35 u=q^10 v=q^3 x=q^14 y=q^6`.
    fn from_str(s: &str) -> Result<WeierstrassInstance> {
        let bad = |m: String| Error::Parse {
            line: 1,
            column: 1,
            message: m,
        };
        let mut base = None;
        let mut vals: BTreeMap<&str, SignedMonomial> = BTreeMap::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got '{}'", tok)))?;
            match k {
                "base" => {
                    base = Some(
                        v.parse::<i64>()
                            .map_err(|_| bad(format!("bad base '{}'", v)))?,
                    )
                }
                "u" | "v" | "x" | "y" => {
                    vals.insert(k, v.parse()?);
                }
                _ => return Err(bad(format!("unknown key '{}'", k))),
            }
        }
        let get = |k: &str| {
            vals.get(k)
                .copied()
                .ok_or_else(|| bad(format!("missing {}=", k)))
        };
        let base_modulus = base.ok_or_else(|| bad("missing base=".into()))?;
        if base_modulus < 1 {
            return Err(bad("base must be positive".into()));
        }
        Ok(WeierstrassInstance {
            base_modulus,
            u: get("u")?,
            v: get("v")?,
            x: get("x")?,
            y: get("y")?,
        })
    }
}

/// `scalar q^shift prod theta_i^(k_i)` with every theta in canonical range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTerm {
    pub scalar: BigRational,
    pub shift: Exponent,
    pub thetas: BTreeMap<ThetaMonomial, i64>,
    /// Names of factors that vanish identically.
    pub zero_factors: Vec<String>,
}

impl ThetaTerm {
    pub fn unit() -> ThetaTerm {
        ThetaTerm {
            scalar: BigRational::one(),
            shift: Exponent::zero(),
            thetas: BTreeMap::new(),
            zero_factors: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        !self.zero_factors.is_empty() || self.scalar.is_zero()
    }

    /// Multiplies by `theta(arg)^power`, normalizing the argument.
    pub fn push(&mut self, t: ThetaMonomial, power: i64) {
        match t.normalize() {
            Ok((c, h, canon)) => {
                for _ in 0..power.abs() {
                    if power > 0 {
                        self.scalar *= &c;
                    } else {
                        self.scalar /= &c;
                    }
                }
                self.shift += h * Exponent::from_integer(power);
                let e = self.thetas.entry(canon).or_insert(0);
                *e += power;
                if *e == 0 {
                    self.thetas.remove(&canon);
                }
            }
            Err(_) => self.zero_factors.push(t.to_string()),
        }
    }

    pub fn mul(&self, o: &ThetaTerm) -> ThetaTerm {
        let mut r = self.clone();
        r.scalar *= &o.scalar;
        r.shift += o.shift;
        for (t, k) in &o.thetas {
            let e = r.thetas.entry(*t).or_insert(0);
            *e += k;
            if *e == 0 {
                r.thetas.remove(t);
            }
        }
        r.zero_factors.extend(o.zero_factors.iter().cloned());
        r
    }

    pub fn inv(&self) -> Result<ThetaTerm> {
        if self.is_zero() {
            return Err(Error::ZeroTheta(self.zero_factors.join(", ")));
        }
        Ok(ThetaTerm {
            scalar: self.scalar.recip(),
            shift: -self.shift,
            thetas: self.thetas.iter().map(|(t, k)| (*t, -k)).collect(),
            zero_factors: Vec::new(),
        })
    }

    /// Expansion exact below `q^t` (zero when a factor vanishes).
    pub fn expand(&self, t: i64) -> Result<QSeries> {
        if self.is_zero() {
            return Ok(QSeries::zero(1, t));
        }
        if !self.scalar.is_integer() {
            return Err(Error::Domain(format!(
                "scalar {} is not integral",
                self.scalar
            )));
        }
        let inner_t = t - self.shift.floor().to_integer() + 1;
        let mut acc = QSeries::one(inner_t.max(0));
        for (th, k) in &self.thetas {
            let s = th.expand(inner_t.max(0))?;
            acc = if *k > 0 {
                acc.mul(&s.pow(*k)?)
            } else {
                acc.div(&s.pow(-*k)?)?
            };
        }
        Ok(acc
            .scale(&self.scalar.to_integer())
            .shift(self.shift)
            .truncate(Exponent::from_integer(t)))
    }

    pub fn to_poch(&self) -> Result<PochProduct> {
        let mut p = PochProduct::monomial(self.scalar.clone(), self.shift);
        for (th, k) in &self.thetas {
            let tp = th.to_poch()?;
            for a in tp.atoms {
                p.atoms.push(PochAtom {
                    power: a.power * k,
                    ..a
                });
            }
        }
        Ok(p)
    }
}

impl fmt::Display for ThetaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.scalar)?;
        if !self.shift.is_zero() {
            write!(f, " q^({})", self.shift)?;
        }
        for (t, k) in &self.thetas {
            if *k == 1 {
                write!(f, " {}", t)?;
            } else {
                write!(f, " {}^{}", t, k)?;
            }
        }
        Ok(())
    }
}

impl WeierstrassInstance {
    fn term(&self, scalar: i64, shift: SignedMonomial, args: [SignedMonomial; 4]) -> ThetaTerm {
        let mut t = ThetaTerm::unit();
        t.scalar = BigRational::from_integer((scalar * shift.sign.as_i64()).into());
        t.shift = shift.exp;
        for a in args {
            t.push(a.theta(self.base_modulus), 1);
        }
        t
    }

    /// The three normalized products `X1, X2, X3`.
    pub fn terms(&self) -> [ThetaTerm; 3] {
        let (u, v, x, y) = (self.u, self.v, self.x, self.y);
        let one = SignedMonomial::q(0);
        [
            self.term(1, one, [x.mul(y), x.div(y), u.mul(v), u.div(v)]),
            self.term(-1, one, [x.mul(v), x.div(v), u.mul(y), u.div(y)]),
            self.term(-1, u.div(y), [y.mul(v), y.div(v), x.mul(u), x.div(u)]),
        ]
    }
}

/// Result of expanding `X1 + X2 + X3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaddReport {
    pub instance: String,
    pub truncation: i64,
    pub holds: bool,
    /// First nonzero coefficient as `(grid index, denominator)`.
    pub first_discrepancy: Option<(i64, i64)>,
    pub zero_factors: Vec<String>,
}

/// Checks `X1 + X2 + X3 = 0` below `q^t`.
pub fn instantiate_tadd(inst: &WeierstrassInstance, t: i64) -> Result<TaddReport> {
    let terms = inst.terms();
    let mut acc = QSeries::zero(1, t);
    let mut zeros = Vec::new();
    for term in &terms {
        zeros.extend(term.zero_factors.iter().cloned());
        acc = acc.add(&term.expand(t)?);
    }
    let first = acc.first_nonzero().map(|(i, _)| (i, acc.den()));
    Ok(TaddReport {
        instance: inst.to_string(),
        truncation: t,
        holds: first.is_none(),
        first_discrepancy: first,
        zero_factors: zeros,
    })
}

/// Both sides of a specialized relation and whether they agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThrelReduction {
    pub lhs: Vec<PochProduct>,
    pub rhs: PochProduct,
    pub verified: bool,
}

fn theta_atoms(arg: SignedMonomial, modulus: i64, power: i64) -> Result<Vec<PochAtom>> {
    if !arg.exp.is_integer() {
        return Err(Error::Domain(format!("argument {} is fractional", arg)));
    }
    let e = arg.exp.to_integer();
    Ok(vec![
        PochAtom::new(arg.sign, e, modulus, power),
        PochAtom::new(arg.sign, modulus - e, modulus, power),
    ])
}

fn product(
    parts: &[(SignedMonomial, i64, i64)],
    eta: &[(i64, i64)],
    scalar: SignedMonomial,
) -> Result<PochProduct> {
    let mut atoms = Vec::new();
    for &(arg, m, k) in parts {
        atoms.extend(theta_atoms(arg, m, k)?);
    }
    for &(m, k) in eta {
        atoms.push(PochAtom::plus(m, m, k));
    }
    let p = PochProduct {
        scalar: BigRational::from_integer(scalar.sign.as_i64().into()),
        shift: scalar.exp,
        atoms,
    };
    p.canonical()
}

/// Both sides of the first (`which = 1`) or second (`which = 2`) specialization.
pub fn threl_sides(
    which: u8,
    n: i64,
    u: SignedMonomial,
) -> Result<(Vec<PochProduct>, PochProduct)> {
    let qn = |k: i64| SignedMonomial::q(k * n);
    let m3 = 3 * n;
    let u3 = u.pow(3);
    let u2 = u.pow(2);
    let degenerate = |p: &PochProduct| -> Result<()> {
        if p.is_zero() {
            Err(Error::ZeroTheta(format!(
                "a factor of the specialization N={} u={} vanishes",
                n, u
            )))
        } else {
            Ok(())
        }
    };
    let (l1, l2, r) = match which {
        1 => (
            product(&[(u3.div(qn(1)), m3, 1)], &[(m3, 1)], SignedMonomial::q(0))?,
            product(&[(u3.div(qn(2)), m3, 1)], &[(m3, 1)], qn(1).div(u))?,
            product(
                &[(u2.div(qn(1)), n, 1), (u, n, -1)],
                &[(n, 1)],
                SignedMonomial::q(0),
            )?,
        ),
        2 => (
            product(&[(u3.div(qn(2)), m3, 1)], &[(m3, 1)], SignedMonomial::q(0))?,
            product(
                &[(u3.div(qn(4)), m3, 1)],
                &[(m3, 1)],
                SignedMonomial::neg_q(0).mul(qn(3).div(u2)),
            )?,
            product(
                &[(u2.div(qn(2)), n, 1), (u.div(qn(1)), n, -1)],
                &[(n, 1)],
                SignedMonomial::q(0),
            )?,
        ),
        _ => {
            return Err(Error::Domain(format!(
                "specialization {} does not exist",
                which
            )))
        }
    };
    degenerate(&l1)?;
    degenerate(&l2)?;
    degenerate(&r)?;
    Ok((vec![l1, l2], r))
}

/// Builds both sides and checks them below `q^t`.
pub fn reduce_threl(which: u8, n: i64, u: SignedMonomial, t: i64) -> Result<ThrelReduction> {
    let (lhs, rhs) = threl_sides(which, n, u)?;
    let mut terms = lhs.clone();
    terms.push(rhs.neg());
    let verified = combination_series(&terms, t)?.is_zero();
    Ok(ThrelReduction { lhs, rhs, verified })
}

/// The relation instance from which a specialization is derived (base `3N`).
pub fn threl_instance(which: u8, n: i64, u: SignedMonomial) -> WeierstrassInstance {
    let k = if which == 1 { 1 } else { 2 };
    let x = SignedMonomial::q(k * n);
    WeierstrassInstance {
        base_modulus: 3 * n,
        u,
        v: x.div(u),
        x,
        y: u.pow(2).div(x),
    }
}

// ---------------------------------------------------------------------------
// Search

/// Canonical theta key `(sign, a)` with `0 <= a <= M/2`; `None` for `theta(1) = 0`.
fn theta_key(sign: Sign, e: i64, m: i64) -> Option<(i8, i64)> {
    let r = e.rem_euclid(m);
    if sign == Sign::Plus && r == 0 {
        return None;
    }
    Some((sign.as_i64() as i8, r.min(m - r)))
}

type Signature = Vec<((i8, i64), i64)>;

/// Whether the theta keys of `num / den` cancel down to exactly `want`.
fn signature_matches(
    num: &[Option<(i8, i64)>; 4],
    den: &[Option<(i8, i64)>; 4],
    want: &[((i8, i64), i64)],
) -> bool {
    let mut keys = [(0i8, 0i64); 8];
    for (slot, k) in keys.iter_mut().zip(num.iter().chain(den.iter())) {
        match k {
            Some(k) => *slot = *k,
            None => return false,
        }
    }
    let mut count = 0;
    let mut seen = [(0i8, 0i64); 8];
    for key in &keys {
        if seen[..count].contains(key) {
            continue;
        }
        seen[count] = *key;
        count += 1;
        let net: i64 = num.iter().filter(|k| k.as_ref() == Some(key)).count() as i64
            - den.iter().filter(|k| k.as_ref() == Some(key)).count() as i64;
        let expected = want.iter().find(|(w, _)| w == key).map_or(0, |(_, v)| *v);
        if net != expected {
            return false;
        }
    }
    want.iter().all(|(w, _)| seen[..count].contains(w))
}

/// Signature of a two-term target ratio `T1/T2` built from theta factors.
fn target_signature(ratio: &PochProduct, m: i64) -> Result<Signature> {
    let c = ratio.canonical()?;
    let mut map: BTreeMap<(i8, i64), i64> = BTreeMap::new();
    let mut pending: BTreeMap<(i64, Sign, i64), i64> = BTreeMap::new();
    for a in &c.atoms {
        *pending.entry((a.modulus, a.sign, a.exp)).or_insert(0) += a.power;
    }
    // pure (q^M;q^M) factors cancel in every ratio X_i / X_j
    pending.remove(&(m, Sign::Plus, m));
    let keys: Vec<(i64, Sign, i64)> = pending.keys().copied().collect();
    for key in keys {
        let Some(&k) = pending.get(&key) else {
            continue;
        };
        if k == 0 {
            continue;
        }
        let (md, s, e) = key;
        if md != m {
            return Err(Error::Domain(format!(
                "factor with modulus {} in a base-{} target",
                md, m
            )));
        }
        let partner = (m, s, m - e);
        if partner == key {
            // theta(±q^(M/2)) = (±q^(M/2); q^M)^2
            if k % 2 != 0 {
                return Err(Error::Domain("unpaired middle factor in target".into()));
            }
            *map.entry((s.as_i64() as i8, e)).or_insert(0) += k / 2;
        } else if s == Sign::Minus && e == m {
            // theta(-1) = 2 (-q^M;q^M)^2
            if k % 2 != 0 {
                return Err(Error::Domain("unpaired (-q^M;q^M) in target".into()));
            }
            *map.entry((-1, 0)).or_insert(0) += k / 2;
        } else {
            let kp = pending.get(&partner).copied().unwrap_or(0);
            if kp != k {
                return Err(Error::Domain(format!(
                    "target factor {:?} lacks its theta partner",
                    key
                )));
            }
            pending.insert(partner, 0);
            *map.entry((s.as_i64() as i8, e.min(m - e))).or_insert(0) += k;
        }
        pending.insert(key, 0);
    }
    Ok(map.into_iter().filter(|(_, v)| *v != 0).collect())
}

/// Exhaustive search for relation instances with `T1 + T2 = c q^h prod theta`.
///
/// A hit is an instance whose terms satisfy `T1/T2 = X_i/X_j`; then
/// `T1 + T2 = -(T1/X_i) X_k` is a single product. Hits are confirmed by expansion
/// below `q^t`.
pub fn search_specialization(
    target: (&PochProduct, &PochProduct),
    base_modulus: i64,
    exponent_bound: i64,
    t: i64,
) -> Result<Vec<WeierstrassInstance>> {
    let m = base_modulus;
    let ratio = target.0.mul(&target.1.inv()?);
    let want = target_signature(&ratio, m)?;
    let signs = [Sign::Plus, Sign::Minus];
    let mut grid: Vec<(i64, Sign, i64, Sign)> = Vec::new();
    for ue in 0..=exponent_bound {
        for &us in &signs {
            for ve in 0..=exponent_bound {
                for &vs in &signs {
                    grid.push((ue, us, ve, vs));
                }
            }
        }
    }
    let hits: Vec<WeierstrassInstance> = grid
        .par_iter()
        .flat_map_iter(|&(ue, us, ve, vs)| {
            let want = &want;
            let mut local = Vec::new();
            let uv = theta_key(us.times(vs), ue + ve, m);
            let u_v = theta_key(us.times(vs), ue - ve, m);
            for xe in 0..=exponent_bound {
                for &xs in &signs {
                    let xv = theta_key(xs.times(vs), xe + ve, m);
                    let x_v = theta_key(xs.times(vs), xe - ve, m);
                    let xu = theta_key(xs.times(us), xe + ue, m);
                    let x_u = theta_key(xs.times(us), xe - ue, m);
                    for ye in 0..=exponent_bound {
                        for &ys in &signs {
                            let xy = theta_key(xs.times(ys), xe + ye, m);
                            let x_y = theta_key(xs.times(ys), xe - ye, m);
                            let uy = theta_key(us.times(ys), ue + ye, m);
                            let u_y = theta_key(us.times(ys), ue - ye, m);
                            let yv = theta_key(ys.times(vs), ye + ve, m);
                            let y_v = theta_key(ys.times(vs), ye - ve, m);
                            let x = [[xy, x_y, uv, u_v], [xv, x_v, uy, u_y], [yv, y_v, xu, x_u]];
                            let found = (0..3).any(|i| {
                                (0..3).any(|j| i != j && signature_matches(&x[i], &x[j], want))
                            });
                            if found {
                                local.push(WeierstrassInstance {
                                    base_modulus: m,
                                    u: SignedMonomial::new(us, ue),
                                    v: SignedMonomial::new(vs, ve),
                                    x: SignedMonomial::new(xs, xe),
                                    y: SignedMonomial::new(ys, ye),
                                });
                            }
                        }
                    }
                }
            }
            local.into_iter()
        })
        .collect();
    let mut checked: HashMap<String, bool> = HashMap::new();
    let mut confirmed = Vec::new();
    for inst in hits {
        for single in collapse_candidates(&inst, target)? {
            let key = single.to_string();
            let ok = match checked.get(&key) {
                Some(&ok) => ok,
                None => {
                    let ok =
                        combination_series(&[target.0.clone(), target.1.clone(), single.neg()], t)?
                            .is_zero();
                    checked.insert(key, ok);
                    ok
                }
            };
            if ok {
                confirmed.push(inst);
                break;
            }
        }
    }
    Ok(confirmed)
}

/// The single products `-(T1/X_i) X_k` for every pair with `T1/T2 = X_i/X_j`, unverified.
fn collapse_candidates(
    inst: &WeierstrassInstance,
    target: (&PochProduct, &PochProduct),
) -> Result<Vec<PochProduct>> {
    let xs = inst.terms();
    let ratio = target.0.mul(&target.1.inv()?);
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i == j || xs[i].is_zero() || xs[j].is_zero() {
                continue;
            }
            let q = xs[i].mul(&xs[j].inv()?).to_poch()?;
            if q.same_function(&ratio)? {
                let k = 3 - i - j;
                out.push(
                    target
                        .0
                        .mul(&xs[i].inv()?.to_poch()?)
                        .mul(&xs[k].to_poch()?)
                        .neg()
                        .canonical()?,
                );
            }
        }
    }
    Ok(out)
}

/// If `T1/T2 = X_i/X_j` exactly, returns the single product `T1 + T2 = -(T1/X_i) X_k`
/// after checking it below `q^t`.
pub fn collapse(
    inst: &WeierstrassInstance,
    target: (&PochProduct, &PochProduct),
    t: i64,
) -> Result<Option<PochProduct>> {
    for single in collapse_candidates(inst, target)? {
        let check = combination_series(&[target.0.clone(), target.1.clone(), single.neg()], t)?;
        if check.is_zero() {
            return Ok(Some(single));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Euler rewrites

/// Rewrites `(q^a;q^(2a))^(-k)` as `(-q^a;q^a)^k` and `(-q^a;q^(2a))^(-k)` as
/// `(q^a;q^(2a))^k (-q^(2a);q^(2a))^k`; other factors are kept.
pub fn euler_rewrite(p: &PochProduct) -> PochProduct {
    let mut out = PochProduct {
        atoms: Vec::new(),
        ..p.clone()
    };
    for a in &p.atoms {
        let odd = a.exp > 0 && a.modulus == 2 * a.exp && a.power < 0;
        match (odd, a.sign) {
            (true, Sign::Plus) => {
                out.atoms
                    .push(PochAtom::new(Sign::Minus, a.exp, a.exp, -a.power))
            }
            (true, Sign::Minus) => {
                out.atoms.push(PochAtom::plus(a.exp, a.modulus, -a.power));
                out.atoms
                    .push(PochAtom::new(Sign::Minus, a.modulus, a.modulus, -a.power));
            }
            _ => out.atoms.push(*a),
        }
    }
    out
}

/// The relation instances used for the corpus, as `(tag, instance)`.
pub fn corpus_instances() -> Vec<(&'static str, WeierstrassInstance)> {
    let q = SignedMonomial::q;
    let n = SignedMonomial::neg_q;
    let w = |b, u, v, x, y| WeierstrassInstance {
        base_modulus: b,
        u,
        v,
        x,
        y,
    };
    vec![
        ("840m+361", w(35, q(10), q(3), q(14), q(6))),
        ("840m+529", w(35, q(15), q(3), q(17), q(14))),
        ("840m+121", w(35, q(14), q(9), q(15), q(13))),
        ("840m+289", w(35, q(7), q(15), q(1), q(2))),
        ("840m+1", w(35, q(5), q(14), q(2), q(4))),
        ("840m+169", w(35, q(7), q(16), q(3), q(5))),
        ("240m+1", w(40, n(9), q(16), n(1), n(5))),
        ("240m+49", w(40, n(8), q(5), q(17), q(7))),
        ("240m+121", w(40, n(16), q(11), q(19), q(15))),
        ("240m+169", w(40, n(13), n(15), n(3), q(8))),
        ("6.8", w(20, q(5), q(2), q(12), q(4))),
        ("6.9", w(10, n(3), q(1), q(4), q(3))),
        ("6.11", w(20, q(5), q(2), q(6), q(4))),
        ("6.14", w(10, n(3), q(1), q(4), q(3))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_instance() {
        let i: WeierstrassInstance = "base=40 u=-q^13 v=-q^15 x=-q^3 y=q^8".parse().unwrap();
        assert_eq!(i.u, SignedMonomial::neg_q(13));
        assert_eq!(i.to_string(), "base=40 u=-q^13 v=-q^15 x=-q^3 y=q^8");
        assert!("base=40 u=q".parse::<WeierstrassInstance>().is_err());
    }

    #[test]
    fn theorem_one_instance() {
        let i: WeierstrassInstance = "base=35 u=q^10 v=q^3 x=q^14 y=q^6".parse().unwrap();
        assert!(instantiate_tadd(&i, 210).unwrap().holds);
    }

    #[test]
    fn equal_x_and_y() {
        let i: WeierstrassInstance = "base=20 u=q^7 v=q^3 x=q^5 y=q^5".parse().unwrap();
        let r = instantiate_tadd(&i, 120).unwrap();
        assert!(r.holds);
        assert_eq!(r.zero_factors.len(), 1);
    }

    #[test]
    fn threl_examples() {
        let r = reduce_threl(1, 35, SignedMonomial::q(26), 210).unwrap();
        assert!(r.verified);
        assert_eq!(
            r.rhs,
            "(q^9,q^26;q^35)^-1 (q^17,q^18;q^35) (q^35;q^35)"
                .parse::<PochProduct>()
                .unwrap()
                .canonical()
                .unwrap()
        );
        assert!(
            reduce_threl(1, 8, SignedMonomial::q(7), 48)
                .unwrap()
                .verified
        );
        assert!(
            reduce_threl(2, 8, SignedMonomial::q(11), 48)
                .unwrap()
                .verified
        );
    }

    #[test]
    fn euler() {
        let p: PochProduct = "1 / (q;q^2)".parse().unwrap();
        assert_eq!(euler_rewrite(&p).expand(40).unwrap(), p.expand(40).unwrap());
        let p: PochProduct = "1 / (-q;q^2)".parse().unwrap();
        assert_eq!(euler_rewrite(&p).expand(40).unwrap(), p.expand(40).unwrap());
    }
}
