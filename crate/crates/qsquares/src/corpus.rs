//! The statement corpus: a versioned TOML file of product formulae.
//!
//! ```toml
//! version = 1
//!
//! [[statement]]
//! tag = "840m+361"
//! level = 105
//! lhs = ["K=840 bsq=361 pattern=table(16:0,1,3,5,10,12,14,15)"]
//! constant = "0"          # optional rational
//! rhs = "(q,q^6,q^7;q^7) / (q,q^4;q^5)"
//! ```
//!
//! `lhs` entries use the [`SquareComponent`] grammar, `rhs` the [`PochProduct`] grammar.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::prover::IdentityStatement;
use crate::series::QSeries;
use crate::squares::SquareComponent;
use crate::thetaprod::PochProduct;

pub const CORPUS_VERSION: i64 = 1;

/// The corpus shipped with the crate.
pub const BUILTIN: &str = include_str!("../data/corpus.toml");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorpus {
    version: i64,
    #[serde(default)]
    statement: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    tag: String,
    name: Option<String>,
    level: i64,
    lhs: Vec<String>,
    constant: Option<String>,
    rhs: String,
}

/// One statement: `sum components + constant = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub tag: String,
    pub name: String,
    pub level: i64,
    pub components: Vec<SquareComponent>,
    pub constant: BigRational,
    pub rhs: PochProduct,
}

impl CorpusEntry {
    /// Compiles every component into products.
    pub fn to_statement(&self) -> Result<IdentityStatement> {
        let mut lhs = Vec::new();
        for c in &self.components {
            lhs.extend(c.compile()?);
        }
        if !self.constant.is_zero() {
            lhs.push(PochProduct::constant(self.constant.clone()));
        }
        Ok(IdentityStatement {
            name: self.name.clone(),
            tag: self.tag.clone(),
            level: self.level,
            lhs,
            rhs: self.rhs.clone(),
        })
    }

    /// The left side summed term by term from the square roots, below `q^t`.
    pub fn direct_lhs(&self, t: i64) -> Result<QSeries> {
        let mut acc = QSeries::zero(1, t);
        for c in &self.components {
            acc = acc.add(&c.direct_series(t));
        }
        if !self.constant.is_zero() {
            if !self.constant.is_integer() {
                return Err(Error::Domain("non-integral constant".into()));
            }
            let k: BigInt = self.constant.to_integer();
            acc = acc.add(&QSeries::from_parts(1, 0, t, vec![k]));
        }
        Ok(acc)
    }
}

fn locate(text: &str, needle: &str) -> (usize, usize) {
    match text.find(needle) {
        Some(off) => {
            let line = text[..off].matches('\n').count() + 1;
            let col = off - text[..off].rfind('\n').map_or(0, |p| p + 1) + 1;
            (line, col)
        }
        None => (0, 0),
    }
}

fn located(text: &str, field: &str, e: Error) -> Error {
    let (line, column) = locate(text, field);
    match e {
        Error::Parse { message, .. } => Error::Parse {
            line,
            column,
            message: format!("{}: {}", field, message),
        },
        other => Error::Parse {
            line,
            column,
            message: format!("{}: {}", field, other),
        },
    }
}

/// Parses a corpus file.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    let raw: RawCorpus = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| {
                let line = text[..s.start].matches('\n').count() + 1;
                let col = s.start - text[..s.start].rfind('\n').map_or(0, |p| p + 1) + 1;
                (line, col)
            })
            .unwrap_or((0, 0));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    if raw.version != CORPUS_VERSION {
        return Err(Error::Parse {
            line: locate(text, "version").0,
            column: 1,
            message: format!("unsupported corpus version {}", raw.version),
        });
    }
    raw.statement
        .into_iter()
        .map(|r| {
            let components = r
                .lhs
                .iter()
                .map(|s| {
                    s.parse::<SquareComponent>()
                        .map_err(|e| located(text, s, e))
                })
                .collect::<Result<Vec<_>>>()?;
            let constant = match &r.constant {
                Some(c) => c.parse::<BigRational>().map_err(|_| {
                    located(text, c, Error::Domain(format!("bad constant '{}'", c)))
                })?,
                None => BigRational::zero(),
            };
            let rhs = r
                .rhs
                .parse::<PochProduct>()
                .map_err(|e| located(text, &r.rhs, e))?;
            Ok(CorpusEntry {
                name: r.name.unwrap_or_else(|| r.tag.clone()),
                tag: r.tag,
                level: r.level,
                components,
                constant,
                rhs,
            })
        })
        .collect()
}

/// The built-in corpus.
pub fn builtin() -> Vec<CorpusEntry> {
    parse_corpus(BUILTIN).expect("built-in corpus parses")
}

/// Looks up a built-in statement by tag.
pub fn builtin_entry(tag: &str) -> Option<CorpusEntry> {
    builtin().into_iter().find(|e| e.tag == tag)
}
