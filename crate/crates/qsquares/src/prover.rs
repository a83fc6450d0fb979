//! The valence-bound prover: normalize, check modularity, bound, expand, certify.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::modularcusp::{
    bound_from_minima, cusp_minima, cusp_representatives, is_modular_function, modularity_residues,
};
use crate::series::QSeries;
use crate::thetaprod::{AtomVector, EProduct, PochProduct};
use crate::Exponent;

/// `sum lhs = rhs`, all terms read at level `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityStatement {
    pub name: String,
    pub tag: String,
    pub level: i64,
    pub lhs: Vec<PochProduct>,
    pub rhs: PochProduct,
}

impl IdentityStatement {
    pub fn new(
        name: impl Into<String>,
        level: i64,
        lhs: Vec<PochProduct>,
        rhs: PochProduct,
    ) -> Self {
        let name = name.into();
        IdentityStatement {
            tag: name.clone(),
            name,
            level,
            lhs,
            rhs,
        }
    }

    /// Canonical text used for hashing.
    pub fn canonical_text(&self) -> String {
        let lhs: Vec<String> = self.lhs.iter().map(|t| t.to_string()).collect();
        format!(
            "name={}\ntag={}\nlevel={}\nlhs={}\nrhs={}\n",
            self.name,
            self.tag,
            self.level,
            lhs.join(" ; "),
            self.rhs
        )
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().map(|b| format!("{:02x}", b)).collect()
    }

    /// `lhs - rhs` as a flat term list.
    pub fn difference_terms(&self) -> Vec<PochProduct> {
        let mut terms = self.lhs.clone();
        terms.push(self.rhs.neg());
        terms
    }

    /// Direct check of `lhs - rhs` through `q^(t-1)`; returns the first nonzero grid index.
    pub fn residual(&self, t: i64) -> Result<Option<(i64, i64, BigInt)>> {
        first_nonzero_of_sum(&self.difference_terms(), t)
    }
}

/// Expands `sum terms` with rational scalars cleared by their common denominator.
pub fn combination_series(terms: &[PochProduct], t: i64) -> Result<QSeries> {
    let terms = terms
        .iter()
        .map(PochProduct::canonical)
        .collect::<Result<Vec<_>>>()?;
    let l = terms
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(p.scalar.denom()));
    let mut acc: Option<QSeries> = None;
    for p in &terms {
        let c = &p.scalar * BigRational::from_integer(l.clone());
        let s = p.expand_unit(t)?.scale(&c.to_integer());
        acc = Some(match acc {
            None => s,
            Some(a) => a.add(&s),
        });
    }
    Ok(acc.unwrap_or_else(|| QSeries::zero(1, t)))
}

fn first_nonzero_of_sum(terms: &[PochProduct], t: i64) -> Result<Option<(i64, i64, BigInt)>> {
    let s = combination_series(terms, t)?;
    Ok(s.first_nonzero().map(|(i, c)| (i, s.den(), c)))
}

/// Normal form of a statement: `1 + sum c_i f_i` with every `f_i` an `E_g` quotient.
///
/// Left-hand terms that agree as functions are merged; the negated right-hand side is
/// appended and everything is divided by the first term without its scalar.
pub fn normalize(stmt: &IdentityStatement) -> Result<Vec<EProduct>> {
    let n = stmt.level;
    let mut merged: Vec<(AtomVector, BigRational)> = Vec::new();
    let mut push = |t: &PochProduct, merge: bool| -> Result<()> {
        let v = t
            .to_level(n)
            .map_err(|e| Error::Normalization(e.to_string()))?;
        if v.scalar.is_zero() {
            return Ok(());
        }
        let unit = unit_vector(&v);
        match merged.iter_mut().find(|(u, _)| merge && *u == unit) {
            Some((_, c)) => *c += &v.scalar,
            None => merged.push((unit, v.scalar.clone())),
        }
        Ok(())
    };
    for t in &stmt.lhs {
        push(t, true)?;
    }
    push(&stmt.rhs.neg(), false)?;
    merged.retain(|(_, c)| !c.is_zero());
    let Some((first, _)) = merged.first().cloned() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for (v, c) in &merged {
        let q = divide_vectors(v, &first, c);
        let e = q
            .to_eproduct()
            .map_err(|e| Error::Normalization(e.to_string()))?;
        if e.eta != 0 {
            return Err(Error::Normalization(format!(
                "eta factor survives in {}",
                e
            )));
        }
        if !e.qpower.is_zero() {
            return Err(Error::Normalization(format!(
                "stray power q^{} in {}",
                e.qpower, e
            )));
        }
        out.push(e);
    }
    Ok(out)
}

fn unit_vector(v: &AtomVector) -> AtomVector {
    let mut key = AtomVector::new(v.level, BigRational::one(), v.shift);
    for b in 1..=v.level {
        key.set(b, v.exponent(b));
    }
    key
}

fn divide_vectors(a: &AtomVector, b: &AtomVector, c: &BigRational) -> AtomVector {
    let mut q = AtomVector::new(a.level, c.clone(), a.shift - b.shift);
    for i in 1..=a.level {
        q.set(i, a.exponent(i) - b.exponent(i));
    }
    q
}

/// Outcome of a proof attempt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Proven,
    /// First nonzero coefficient of the normalized sum, at grid index `index` in `q^(1/den)`.
    Refuted {
        index: i64,
        den: i64,
        coefficient: String,
    },
    NotApplicable {
        reasons: Vec<String>,
    },
}

impl Verdict {
    pub fn is_proven(&self) -> bool {
        matches!(self, Verdict::Proven)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Proven => write!(f, "proven"),
            Verdict::Refuted {
                index,
                den,
                coefficient,
            } => {
                if *den == 1 {
                    write!(f, "refuted at q^{} (coefficient {})", index, coefficient)
                } else {
                    write!(
                        f,
                        "refuted at q^({}/{}) (coefficient {})",
                        index, den, coefficient
                    )
                }
            }
            Verdict::NotApplicable { reasons } => {
                write!(f, "not applicable: {}", reasons.join("; "))
            }
        }
    }
}

/// Congruence values of one normalized term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularityCheck {
    pub term: String,
    pub sum_mod_12: i64,
    pub weighted_mod_y: i64,
}

/// Minimum term order at one finite cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspMinimum {
    pub cusp: String,
    pub order: String,
}

/// Everything needed to re-check a proof; field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofCertificate {
    pub statement: String,
    pub statement_hash: String,
    pub level: i64,
    pub normalized_by: String,
    pub terms: Vec<String>,
    pub modularity: Vec<ModularityCheck>,
    pub cusp_minima: Vec<CuspMinimum>,
    pub minima_sum: String,
    pub bound: i64,
    /// Coefficients of `q^0 .. q^checked_through` were expanded.
    pub checked_through: i64,
    pub verdict: Verdict,
}

impl ProofCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<ProofCertificate> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

fn not_applicable(stmt: &IdentityStatement, reasons: Vec<String>) -> ProofCertificate {
    ProofCertificate {
        statement: stmt.name.clone(),
        statement_hash: stmt.hash(),
        level: stmt.level,
        normalized_by: stmt.lhs.first().map(|t| t.to_string()).unwrap_or_default(),
        terms: Vec::new(),
        modularity: Vec::new(),
        cusp_minima: Vec::new(),
        minima_sum: "0".into(),
        bound: 0,
        checked_through: -1,
        verdict: Verdict::NotApplicable { reasons },
    }
}

/// Runs the whole procedure on one statement.
pub fn prove(stmt: &IdentityStatement) -> Result<ProofCertificate> {
    let terms = match normalize(stmt) {
        Ok(t) => t,
        Err(Error::Normalization(msg)) => return Ok(not_applicable(stmt, vec![msg])),
        Err(e) => return Err(e),
    };
    let mut cert = not_applicable(stmt, Vec::new());
    cert.terms = terms.iter().map(|t| t.to_string()).collect();
    cert.modularity = terms
        .iter()
        .map(|t| {
            let (a, b) = modularity_residues(t);
            ModularityCheck {
                term: t.to_string(),
                sum_mod_12: a,
                weighted_mod_y: b,
            }
        })
        .collect();
    let bad: Vec<String> = terms
        .iter()
        .filter(|t| !is_modular_function(t))
        .map(|t| format!("{} is not a modular function", t))
        .collect();
    if !bad.is_empty() {
        cert.verdict = Verdict::NotApplicable { reasons: bad };
        return Ok(cert);
    }
    if terms.is_empty() {
        cert.verdict = Verdict::Proven;
        return Ok(cert);
    }
    let cusps = cusp_representatives(stmt.level)?;
    let minima = cusp_minima(&terms, &cusps)?;
    let total: Exponent = minima.iter().map(|(_, o)| *o).sum();
    let u = bound_from_minima(&minima);
    cert.cusp_minima = minima
        .iter()
        .map(|(c, o)| CuspMinimum {
            cusp: c.to_string(),
            order: o.to_string(),
        })
        .collect();
    cert.minima_sum = total.to_string();
    cert.bound = u;
    cert.checked_through = u.max(0);
    let polys: Vec<PochProduct> = terms.iter().map(|t| t.to_poch()).collect();
    let series = combination_series(&polys, u.max(0) + 1)?;
    cert.verdict = match series.first_nonzero() {
        None => Verdict::Proven,
        Some((i, c)) => Verdict::Refuted {
            index: i,
            den: series.den(),
            coefficient: c.to_string(),
        },
    };
    Ok(cert)
}

/// Recomputes the certificate and compares every field.
pub fn verify_certificate(cert: &ProofCertificate, stmt: &IdentityStatement) -> Result<bool> {
    let h = stmt.hash();
    if cert.statement_hash != h {
        return Err(Error::StaleCertificate {
            expected: h,
            found: cert.statement_hash.clone(),
        });
    }
    // cheap arithmetic consistency first
    if !cert.cusp_minima.is_empty() {
        let mut total = Exponent::zero();
        for m in &cert.cusp_minima {
            match m.order.parse::<Exponent>() {
                Ok(o) => total += o,
                Err(_) => return Ok(false),
            }
        }
        if total.to_string() != cert.minima_sum || -total.floor().to_integer() != cert.bound {
            return Ok(false);
        }
    }
    Ok(prove(stmt)? == *cert)
}

/// Proves many statements in parallel, keeping input order.
pub fn prove_all(stmts: &[IdentityStatement]) -> Vec<Result<ProofCertificate>> {
    use rayon::prelude::*;
    stmts.par_iter().map(prove).collect()
}

/// Tally of verdict kinds.
pub fn summarize(certs: &[ProofCertificate]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for c in certs {
        let k = match c.verdict {
            Verdict::Proven => "proven",
            Verdict::Refuted { .. } => "refuted",
            Verdict::NotApplicable { .. } => "not_applicable",
        };
        *m.entry(k).or_insert(0) += 1;
    }
    m
}
