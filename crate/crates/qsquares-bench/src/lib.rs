//! Inputs shared by the benchmarks.

use qsquares::corpus::builtin_entry;
use qsquares::{IdentityStatement, PochProduct};

/// A corpus statement by tag.
pub fn statement(tag: &str) -> IdentityStatement {
    builtin_entry(tag)
        .expect("tag in corpus")
        .to_statement()
        .expect("statement compiles")
}

/// The right-hand side of the level-105 statements.
pub fn level_105_product() -> PochProduct {
    "(q,q^6,q^7;q^7) / (q,q^4;q^5)"
        .parse()
        .expect("valid product")
}
