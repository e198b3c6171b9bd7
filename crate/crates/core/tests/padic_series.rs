use dagger_core::padic::{
    binomial_poly, digit_sum, factorial_valuation, falling_coeff, int, ratio, stirling_second, valuation,
};
use dagger_core::{ExtRational, LogMag, MultiIndex, Prime, RadiusVector, Scalar, Series};
use num_bigint::BigInt;

fn p(n: u32) -> Prime {
    Prime::new(n).unwrap()
}

fn mi(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.to_vec())
}

fn poly(dim: usize, terms: &[(&[u32], i64)]) -> Series {
    Series::polynomial(dim, terms.iter().map(|(a, c)| (mi(a), int(*c)))).unwrap()
}

/// Trial division, independent of the library's valuation.
fn naive_valuation(mut n: i64, p: i64) -> i64 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[test]
fn valuations() {
    assert_eq!(valuation(&int(0), p(3)), ExtRational::Infinity);
    assert_eq!(valuation(&ratio(1, 9), p(3)), ExtRational::Finite(int(-2)));
    assert_eq!(valuation(&int(120), p(3)), ExtRational::Finite(int(naive_valuation(120, 3))));
    assert_eq!(valuation(&int(120), p(3)), ExtRational::Finite(int(1)));
}

#[test]
fn factorial_valuations() {
    assert_eq!(factorial_valuation(0, p(3)), int(0));
    assert_eq!(factorial_valuation(5, p(3)), int(1));
    assert_eq!(factorial_valuation(4, p(2)), int(3));
    // 5! = 120 and 4! = 24 by direct factorization
    assert_eq!(factorial_valuation(5, p(3)), int(naive_valuation(120, 3)));
    assert_eq!(factorial_valuation(4, p(2)), int(naive_valuation(24, 2)));
}

#[test]
fn digit_sums() {
    assert_eq!(digit_sum(0, p(3)), 0);
    assert_eq!(digit_sum(5, p(3)), 3);
    assert_eq!(digit_sum(8, p(2)), 1);
}

#[test]
fn stirling_and_falling() {
    let b = |n: i64| BigInt::from(n);
    assert_eq!(stirling_second(2, 1).unwrap(), b(1));
    assert_eq!(stirling_second(2, 2).unwrap(), b(1));
    assert_eq!(stirling_second(3, 2).unwrap(), b(3));
    for n in 0..=12 {
        assert_eq!(stirling_second(n, n).unwrap(), b(1));
    }
    assert_eq!(falling_coeff(2, 1).unwrap(), b(-1));
    assert_eq!(falling_coeff(2, 2).unwrap(), b(1));
    assert_eq!(falling_coeff(1, 1).unwrap(), b(1));
    assert_eq!(falling_coeff(3, 1).unwrap(), b(2));

    // oracle: x^3 = Σ s_{3,k} x(x-1)...(x-k+1) at several integers
    for x in 0..6i64 {
        let falling = |k: i64| (0..k).map(|j| x - j).product::<i64>();
        let sum: BigInt = (0..=3).map(|k| stirling_second(3, k as usize).unwrap() * falling(k)).sum();
        assert_eq!(sum, b(x.pow(3)));
    }
}

#[test]
fn binomial_polynomials() {
    assert_eq!(binomial_poly(&mi(&[0])), Series::constant(1, int(1), 0));
    let half = Series::polynomial(1, [(mi(&[2]), ratio(1, 2)), (mi(&[1]), ratio(-1, 2))]).unwrap();
    assert_eq!(binomial_poly(&mi(&[2])).first_difference(&half, u32::MAX), None);
    let x1x2 = poly(2, &[(&[1, 1], 1)]);
    assert_eq!(binomial_poly(&mi(&[1, 1])).first_difference(&x1x2, u32::MAX), None);
}

#[test]
fn add_and_scale() {
    let x1 = Series::var(2, 0, 1);
    let x2 = Series::var(2, 1, 1);
    assert_eq!(x1.add(&x2).unwrap(), poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]));
    let f = poly(2, &[(&[1, 1], 7), (&[0, 0], 2)]);
    assert!(f.scale(&int(0)).is_zero());
    assert!(f.add(&f.scale(&int(-1))).unwrap().is_zero());
}

#[test]
fn multiplication() {
    let a = poly(1, &[(&[0], 1), (&[1], 1)]).with_cap(2).unwrap();
    let b = poly(1, &[(&[0], 1), (&[1], -1)]).with_cap(2).unwrap();
    assert_eq!(a.multiply(&b).unwrap(), poly(1, &[(&[0], 1), (&[2], -1)]).with_cap(2).unwrap());

    let top = Series::from_terms(1, 3, [(mi(&[3]), int(1))], true).unwrap();
    let out = top.multiply(&Series::var(1, 0, 3)).unwrap();
    assert!(out.is_zero());
    assert!(!out.is_exact());

    let c = poly(1, &[(&[0], 3), (&[1], 1)]).with_cap(2).unwrap();
    let sq = c.multiply(&c).unwrap();
    assert_eq!(sq, poly(1, &[(&[0], 9), (&[1], 6), (&[2], 1)]));
}

#[test]
fn substitution() {
    let z = Series::var(1, 0, 2).pow(2).unwrap();
    let x_plus_y = poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]).with_cap(2).unwrap();
    assert_eq!(
        z.substitute(&[x_plus_y]).unwrap(),
        poly(2, &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)])
    );

    let heis = dagger_core::PValuedGroup::builtin_heisenberg(p(3)).unwrap();
    let law = heis.law().to_vec();
    let z1 = Series::var(3, 0, 1);
    assert_eq!(z1.substitute(&law).unwrap().first_difference(&law[0], u32::MAX), None);
    let z3 = Series::var(3, 2, 2);
    let expanded = z3.substitute(&law.iter().map(|f| f.with_cap(2).unwrap()).collect::<Vec<_>>()).unwrap();
    let want = poly(6, &[(&[0, 0, 1, 0, 0, 0], 1), (&[0, 0, 0, 0, 0, 1], 1), (&[0, 1, 0, 1, 0, 0], -3)]);
    assert_eq!(expanded.first_difference(&want, u32::MAX), None);
}

#[test]
fn evaluation() {
    let f = poly(1, &[(&[0], 1), (&[1], 1)]);
    assert_eq!(f.evaluate(&[int(0)]).unwrap(), int(1));
    assert_eq!(poly(2, &[(&[1, 1], 1)]).evaluate(&[int(2), int(3)]).unwrap(), int(6));

    // matrix product (0,p,0)(p,0,0) has corner entry 0, so z = 0 - p*1*1
    let heis = dagger_core::PValuedGroup::builtin_heisenberg(p(3)).unwrap();
    let xy: Vec<Scalar> = [0, 1, 0, 1, 0, 0].iter().map(|&c| int(c)).collect();
    assert_eq!(heis.law()[2].evaluate(&xy).unwrap(), int(-3));
}

#[test]
fn gauss_norms() {
    let q = p(3);
    let one = Series::one(1, 0);
    let rho = RadiusVector::new(vec![ratio(1, 4)]).unwrap();
    assert_eq!(one.gauss_norm(&rho, q).unwrap().mag, LogMag::one());

    let rho2 = RadiusVector::new(vec![ratio(1, 3), ratio(1, 5)]).unwrap();
    let x1x2 = poly(2, &[(&[1, 1], 1)]);
    assert_eq!(x1x2.gauss_norm(&rho2, q).unwrap().mag, LogMag::pow(ratio(8, 15)));

    // max(|3|, p^{1/4}) = max(p^{-1}, p^{1/4})
    let three_x = poly(1, &[(&[0], 3), (&[1], 1)]);
    let got = three_x.gauss_norm(&rho, q).unwrap().mag;
    assert_eq!(got, std::cmp::max(LogMag::pow(int(-1)), LogMag::pow(ratio(1, 4))));
    assert_eq!(got, LogMag::pow(ratio(1, 4)));
}

#[test]
fn zero_radius_is_allowed_and_negative_is_not() {
    assert!(RadiusVector::new(vec![int(0)]).is_ok());
    assert!(RadiusVector::new(vec![int(-1)]).is_err());
}
