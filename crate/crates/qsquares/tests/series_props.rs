use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use qsquares::{jtp_bilateral, poch_expand, Exponent, QSeries, Sign, ThetaMonomial};

const T: i64 = 24;

fn series() -> impl Strategy<Value = QSeries> {
    prop::collection::vec(-9i64..=9, 1..12).prop_map(|c| QSeries::from_integers(c, T))
}

fn unit_series() -> impl Strategy<Value = QSeries> {
    (
        prop_oneof![Just(1i64), Just(-1i64)],
        prop::collection::vec(-9i64..=9, 0..10),
    )
        .prop_map(|(lead, rest)| QSeries::from_integers(std::iter::once(lead).chain(rest), T))
}

fn ex(n: i64, d: i64) -> Exponent {
    Exponent::new(n, d)
}

/// Naive theta product `(z;q^m)(q^m/z;q^m)` with `z = s q^e`, via repeated factor multiplication.
fn naive_theta(s: i64, e: Exponent, m: i64, t: i64) -> QSeries {
    let den = *e.denom();
    let mut acc = QSeries::zero(den, t).add(&QSeries::one(t).rescale(den).unwrap());
    let mut factor = |x: Exponent| {
        let f = QSeries::one(t)
            .rescale(den)
            .unwrap()
            .sub(&QSeries::monomial(BigInt::from(s), x, t));
        acc = acc.mul(&f);
    };
    let mf = Exponent::from_integer(m);
    let mut k = 0;
    while e + mf * k < Exponent::from_integer(t) {
        factor(e + mf * k);
        k += 1;
    }
    let mut k = 1;
    while mf * k - e < Exponent::from_integer(t) {
        factor(mf * k - e);
        k += 1;
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        prop_assert_eq!(a.mul(&QSeries::one(T)), a.clone());
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn division_inverts_multiplication(a in series(), u in unit_series()) {
        prop_assert_eq!(a.mul(&u).div(&u).unwrap(), a);
    }

    #[test]
    fn substitution_is_a_ring_map(a in series(), b in series(), k in 1i64..4) {
        prop_assert_eq!(a.mul(&b).substitute(k), a.substitute(k).mul(&b.substitute(k)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// Bilateral sum against its triple product, both with fractional grids.
    #[test]
    fn jtp_matches_product(d in 1i64..4, a in 1i64..12, b_off in 0i64..24, alternating in any::<bool>()) {
        let t = 60;
        let bn = b_off % (2 * a - 1) - (a - 1);
        let (aa, bb) = (ex(a, d), ex(bn, d));
        let sum = jtp_bilateral(aa, bb, alternating, t).unwrap();
        let s = if alternating { Sign::Plus } else { Sign::Minus };
        let two_a = aa * 2;
        let prod = poch_expand(two_a, Sign::Plus, two_a, t).unwrap()
            .mul(&poch_expand(aa + bb, s, two_a, t).unwrap())
            .mul(&poch_expand(aa - bb, s, two_a, t).unwrap());
        let den = 2 * d;
        prop_assert_eq!(sum.rescale(den).unwrap(), prod.rescale(den).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// `z = c q^h z'` must hold as series for arbitrary out-of-range arguments.
    #[test]
    fn theta_normalization_sound(m in 2i64..15, e in -40i64..40, d in 1i64..3, minus in any::<bool>()) {
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        let th = ThetaMonomial::new(m, ex(e, d), sign);
        prop_assume!(!th.is_zero());
        let (c, h, canon) = th.normalize().unwrap();
        prop_assert!(canon.exp >= Exponent::zero());
        prop_assert!(canon.exp * 2 <= Exponent::from_integer(m));
        prop_assert!(c.is_integer());
        let t = 30;
        let direct = th.expand(t).unwrap();
        let headroom = (-h).ceil().to_integer().max(0) + 1;
        let rebuilt = canon.expand(t + headroom).unwrap().scale(&c.to_integer()).shift(h).truncate(Exponent::from_integer(t));
        let den = 2 * d;
        prop_assert_eq!(direct.rescale(den).unwrap(), rebuilt.rescale(den).unwrap());
        if (ex(e, d) >= Exponent::zero()) && (ex(e, d) <= Exponent::from_integer(m)) {
            let s = if minus { -1 } else { 1 };
            prop_assert_eq!(direct.rescale(den).unwrap(), naive_theta(s, ex(e, d), m, t).rescale(den).unwrap());
        }
    }
}

#[test]
fn pentagonal_number_theorem() {
    let t = 200;
    let euler = poch_expand(ex(1, 1), Sign::Plus, ex(1, 1), t).unwrap();
    let sum = jtp_bilateral(ex(3, 2), ex(1, 2), true, t).unwrap();
    assert_eq!(euler.rescale(2).unwrap(), sum);
}

#[test]
fn fractional_coefficient_lookup() {
    let s = poch_expand(ex(1, 2), Sign::Plus, ex(1, 2), 4).unwrap();
    assert_eq!(s.coeff(ex(1, 2)).unwrap(), BigInt::from(-1));
    assert!(s.coeff(ex(9, 2)).is_err());
    assert_eq!(s.coeff(ex(0, 1)).unwrap(), BigInt::from(1));
    assert_eq!(s.coeff(ex(3, 2)).unwrap(), BigInt::zero());
}
