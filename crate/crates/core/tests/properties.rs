use std::sync::Arc;

use dagger_core::distributions::{dcoeffs_from_moments, moments_from_dcoeffs, Distribution};
use dagger_core::mahler::{mahler_to_taylor, taylor_to_mahler, verify_norm_identity};
use dagger_core::padic::{digit_sum, factorial_valuation, int, ratio, valuation};
use dagger_core::{ExtRational, LogMag, MultiIndex, PValuedGroup, Prime, RadiusVector, Scalar, Series};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = Prime> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(7)].prop_map(|p| Prime::new(p).unwrap())
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-60i64..=60, 1i64..=30).prop_map(|(n, d)| ratio(n, d))
}

fn polynomial(dim: usize, degree: u32) -> impl Strategy<Value = Series> {
    let indices = MultiIndex::up_to(dim, degree);
    prop::collection::vec((0..indices.len(), scalar()), 0..6).prop_map(move |terms| {
        Series::polynomial(dim, terms.into_iter().map(|(i, c)| (indices[i].clone(), c))).unwrap()
    })
}

fn widen(f: &Series, cap: u32) -> Series {
    f.with_cap(cap).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_additive(a in scalar(), b in scalar(), p in prime()) {
        let lhs = valuation(&(&a * &b), p);
        prop_assert_eq!(lhs, valuation(&a, p).add(&valuation(&b, p)));
    }

    #[test]
    fn legendre_matches_digit_sum(n in 0u64..5000, p in prime()) {
        let want = ratio((n - digit_sum(n, p)) as i64, p.get() as i64 - 1);
        prop_assert_eq!(factorial_valuation(n, p), want);
    }

    #[test]
    fn series_ring_laws(f in polynomial(2, 3), g in polynomial(2, 3), h in polynomial(2, 3)) {
        let (f, g, h) = (widen(&f, 9), widen(&g, 9), widen(&h, 9));
        prop_assert_eq!(f.multiply(&g).unwrap(), g.multiply(&f).unwrap());
        prop_assert_eq!(
            f.multiply(&g).unwrap().multiply(&h).unwrap(),
            f.multiply(&g.multiply(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(
            f.multiply(&g.add(&h).unwrap()).unwrap(),
            f.multiply(&g).unwrap().add(&f.multiply(&h).unwrap()).unwrap()
        );
        prop_assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn evaluation_is_a_ring_map(f in polynomial(2, 4), g in polynomial(2, 4), x in scalar(), y in scalar()) {
        let pt = [x, y];
        let fg = widen(&f, 8).multiply(&widen(&g, 8)).unwrap();
        prop_assert_eq!(fg.evaluate(&pt).unwrap(), f.evaluate(&pt).unwrap() * g.evaluate(&pt).unwrap());
    }

    #[test]
    fn gauss_norm_is_multiplicative(
        f in polynomial(2, 4),
        g in polynomial(2, 4),
        p in prime(),
        r in prop::collection::vec(0i64..=4, 2),
    ) {
        let rho = RadiusVector::new(r.into_iter().map(|k| ratio(k, 4)).collect()).unwrap();
        let fg = widen(&f, 8).multiply(&widen(&g, 8)).unwrap();
        let lhs = fg.gauss_norm(&rho, p).unwrap().mag;
        let rhs = &f.gauss_norm(&rho, p).unwrap().mag * &g.gauss_norm(&rho, p).unwrap().mag;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauss_norm_is_ultrametric(f in polynomial(3, 3), g in polynomial(3, 3), p in prime()) {
        let rho = RadiusVector::uniform(3, ratio(1, 3)).unwrap();
        let sum = f.add(&g).unwrap().gauss_norm(&rho, p).unwrap().mag;
        let bound = std::cmp::max(f.gauss_norm(&rho, p).unwrap().mag, g.gauss_norm(&rho, p).unwrap().mag);
        prop_assert!(sum <= bound);
    }

    #[test]
    fn mahler_round_trip(f in polynomial(1, 12), p in prime()) {
        let m = taylor_to_mahler(&f).unwrap();
        prop_assert_eq!(mahler_to_taylor(&m).unwrap().first_difference(&f, u32::MAX), None);
        let rho = RadiusVector::uniform(1, ratio(1, 2)).unwrap();
        prop_assert!(verify_norm_identity(&f, &rho, p).unwrap().passed());
    }

    #[test]
    fn mahler_values_agree(f in polynomial(2, 5), x in 0i64..6, y in 0i64..6) {
        let m = taylor_to_mahler(&f).unwrap();
        let pt = [int(x), int(y)];
        prop_assert_eq!(m.evaluate(&pt).unwrap(), f.evaluate(&pt).unwrap());
    }

    #[test]
    fn triangular_solve_inverts(terms in prop::collection::vec((0usize..10, scalar()), 0..6)) {
        let indices = MultiIndex::up_to(2, 3);
        let moments: std::collections::BTreeMap<MultiIndex, Scalar> = terms
            .into_iter()
            .map(|(i, c)| (indices[i].clone(), c))
            .filter(|(_, c)| *c != int(0))
            .collect();
        let d = dcoeffs_from_moments(2, 3, &moments);
        prop_assert_eq!(moments_from_dcoeffs(2, 3, &d), moments);
    }

    #[test]
    fn dirac_total_mass_and_norm(coords in prop::collection::vec(-20i64..20, 3), seed in 0u64..4) {
        let g = Arc::new(PValuedGroup::builtin_heisenberg(Prime::new(3).unwrap()).unwrap());
        let x = g.point_from_ints(&coords).unwrap();
        let dx = Distribution::dirac(&g, &x, 3).unwrap();
        prop_assert_eq!(dx.total_mass(), int(1));
        // the α = 0 coefficient is 1 and the others are integers, so the norm is exactly 1
        prop_assert_eq!(dx.st_norm(&ratio(1 + seed as i64, 4)).mag, LogMag::one());
    }

    #[test]
    fn group_law_is_p_integral(coords in prop::collection::vec(-50i64..50, 6)) {
        let g = PValuedGroup::builtin_heisenberg(Prime::new(5).unwrap()).unwrap();
        let x = g.point_from_ints(&coords[..3]).unwrap();
        let y = g.point_from_ints(&coords[3..]).unwrap();
        let xy = g.multiply(&x, &y);
        prop_assert!(xy.coords().iter().all(|c| valuation(c, g.prime()) >= ExtRational::Finite(int(0))));
        prop_assert_eq!(Some(xy), g.model_multiply(&x, &y));
    }
}
