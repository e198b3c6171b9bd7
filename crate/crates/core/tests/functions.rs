use std::sync::Arc;

use dagger_core::distributions::{convolve, Distribution, Order};
use dagger_core::functions::{antipode_image, coassociativity_witness, counit_image, pair, pair_tensor, DaggerFunction};
use dagger_core::mahler::taylor_to_mahler;
use dagger_core::padic::int;
use dagger_core::{MultiIndex, PValuedGroup, Prime, Series};

fn heis() -> Arc<PValuedGroup> {
    Arc::new(PValuedGroup::builtin_heisenberg(Prime::new(3).unwrap()).unwrap())
}

fn mi(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.to_vec())
}

fn sample_function(g: &Arc<PValuedGroup>) -> DaggerFunction {
    let body = Series::polynomial(
        3,
        [(mi(&[2, 0, 1]), int(1)), (mi(&[0, 1, 0]), int(-2)), (mi(&[0, 0, 0]), int(5))],
    )
    .unwrap();
    DaggerFunction::new(g, body).unwrap()
}

#[test]
fn evaluation_examples() {
    let g = heis();
    let z1 = DaggerFunction::coordinate(&g, 0).unwrap();
    assert_eq!(z1.eval_at(&g.point_from_ints(&[2, 0, 0]).unwrap()), int(2));
    let one = DaggerFunction::constant(&g, int(1));
    for x in g.sample_points(5, 2, 4).unwrap() {
        assert_eq!(one.eval_at(&x), int(1));
    }
    let z3 = DaggerFunction::coordinate(&g, 2).unwrap();
    let xy = g.multiply(&g.point_from_ints(&[1, 0, 0]).unwrap(), &g.point_from_ints(&[0, 1, 0]).unwrap());
    assert_eq!(z3.eval_at(&xy), int(0));
}

#[test]
fn comul_examples() {
    let a = Arc::new(PValuedGroup::builtin_abelian(Prime::new(5).unwrap(), 2).unwrap());
    for i in 0..2 {
        assert_eq!(DaggerFunction::coordinate(&a, i).unwrap().comul().unwrap(), a.law()[i]);
    }
    let g = heis();
    let want = Series::polynomial(
        6,
        [(mi(&[0, 0, 1, 0, 0, 0]), int(1)), (mi(&[0, 0, 0, 0, 0, 1]), int(1)), (mi(&[0, 1, 0, 1, 0, 0]), int(-3))],
    )
    .unwrap();
    let got = DaggerFunction::coordinate(&g, 2).unwrap().comul().unwrap();
    assert_eq!(got.first_difference(&want, u32::MAX), None);
    assert_eq!(DaggerFunction::constant(&g, int(1)).comul().unwrap(), Series::constant(6, int(1), 0));

    let f = sample_function(&g);
    let c = f.comul().unwrap();
    let pts = g.sample_points(10, 5, 4).unwrap();
    for w in pts.windows(2) {
        let xy: Vec<_> = w[0].coords().iter().chain(w[1].coords()).cloned().collect();
        assert_eq!(c.evaluate(&xy).unwrap(), f.eval_at(&g.multiply(&w[0], &w[1])));
    }
}

#[test]
fn inversion_examples() {
    let g = heis();
    for grp in [g.clone(), Arc::new(PValuedGroup::builtin_abelian(Prime::new(2).unwrap(), 3).unwrap())] {
        let z1 = DaggerFunction::coordinate(&grp, 0).unwrap();
        assert_eq!(z1.inv_pullback().unwrap().body(), &Series::var(3, 0, 1).neg());
    }
    let want = Series::polynomial(3, [(mi(&[0, 0, 1]), int(-1)), (mi(&[1, 1, 0]), int(-3))]).unwrap();
    let got = DaggerFunction::coordinate(&g, 2).unwrap().inv_pullback().unwrap();
    assert_eq!(got.body().first_difference(&want, u32::MAX), None);
    let one = DaggerFunction::constant(&g, int(1));
    assert_eq!(one.inv_pullback().unwrap().body().first_difference(one.body(), u32::MAX), None);

    let f = sample_function(&g);
    assert_eq!(f.inv_pullback().unwrap().inv_pullback().unwrap(), f);
    for x in g.sample_points(5, 9, 4).unwrap() {
        assert_eq!(f.inv_pullback().unwrap().eval_at(&x), f.eval_at(&g.invert(&x)));
    }
}

#[test]
fn right_translation_examples() {
    let g = heis();
    let f = sample_function(&g);
    assert_eq!(f.right_translate(&g.identity()).unwrap(), f);

    let a = Arc::new(PValuedGroup::builtin_abelian(Prime::new(3).unwrap(), 2).unwrap());
    let z1 = DaggerFunction::coordinate(&a, 0).unwrap();
    let shifted = z1.right_translate(&a.point_from_ints(&[7, 4]).unwrap()).unwrap();
    let want = Series::polynomial(2, [(mi(&[1, 0]), int(1)), (mi(&[0, 0]), int(7))]).unwrap();
    assert_eq!(shifted.body().first_difference(&want, u32::MAX), None);

    let pts = g.sample_points(6, 11, 3).unwrap();
    let (h, h2) = (&pts[0], &pts[1]);
    let twice = f.right_translate(h).unwrap().right_translate(h2).unwrap();
    assert_eq!(twice, f.right_translate(&g.multiply(h2, h)).unwrap());
    for x in &pts[2..] {
        assert_eq!(f.right_translate(h).unwrap().eval_at(x), f.eval_at(&g.multiply(x, h)));
    }
}

#[test]
fn pairing_examples() {
    let g = heis();
    let f = sample_function(&g);
    let x = g.point_from_ints(&[2, 1, 3]).unwrap();
    assert_eq!(pair(&Distribution::dirac(&g, &x, 3).unwrap(), &f).unwrap(), f.eval_at(&x));

    let m = taylor_to_mahler(f.body()).unwrap();
    for alpha in MultiIndex::up_to(3, 3) {
        let b = Distribution::b_monomial(&g, &alpha, 3).unwrap();
        assert_eq!(pair(&b, &f).unwrap(), m.coeff(&alpha));
    }

    let l = Distribution::from_dcoeffs(&g, [(mi(&[1, 0, 0]), int(2)), (mi(&[0, 1, 1]), int(1))], 6).unwrap();
    let mu = Distribution::dirac(&g, &x, 6).unwrap();
    let c = convolve(&l, &mu, 3, Order::Standard).unwrap();
    assert_eq!(pair(&c, &f).unwrap(), pair_tensor(&l, &mu, &f.comul().unwrap()).unwrap());

    // the pairing refuses functions beyond the stored moments
    let short = Distribution::dirac(&g, &x, 2).unwrap();
    assert!(pair(&short, &f).is_err());
}

#[test]
fn hopf_identities() {
    let g = heis();
    let f = sample_function(&g);
    assert_eq!(coassociativity_witness(&f).unwrap(), None);
    assert_eq!(counit_image(&f).unwrap().first_difference(f.body(), u32::MAX), None);
    assert_eq!(
        antipode_image(&f).unwrap().first_difference(&Series::constant(3, int(5), 0), u32::MAX),
        None
    );
}
