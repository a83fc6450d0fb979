//! Exact q-series machinery for product formulae of square-sequence generating functions.
//!
//! The crate compiles a signed sum `sum (-1)^t(n) q^(a_n)` over the integers `m` with
//! `K m + b^2` a perfect square into a combination of Jacobi triple products, rewrites
//! identities between such products as sums of theta quotients `E_g` on `Gamma_1(N)`,
//! and proves them with a valence bound followed by a finite coefficient check.
//! A second route checks three-term theta relations of Weierstrass type directly.

pub mod corpus;
pub mod error;
pub mod modularcusp;
pub mod partitions;
pub mod prover;
pub mod series;
pub mod squares;
pub mod thetaprod;
pub mod weierstrass;

/// Exact rational exponent of `q`.
pub type Exponent = num_rational::Ratio<i64>;

pub use error::{Error, Result};
pub use modularcusp::{
    cusp_representatives, is_modular_function, order_at_cusp, valence_bound, Cusp, CuspClassSet,
};
pub use prover::{prove, verify_certificate, IdentityStatement, ProofCertificate, Verdict};
pub use series::{jtp_bilateral, poch_expand, square_sum_series, QSeries, Sign, SquareKind};
pub use squares::{solve_residues, BilateralSum, SquareClassSpec};
pub use thetaprod::{EProduct, PochAtom, PochProduct, ThetaMonomial};
pub use weierstrass::{SignedMonomial, WeierstrassInstance};
