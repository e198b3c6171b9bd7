//! Functions on `G` given by a polynomial in the chart coordinates, and the Hopf
//! structure maps: comultiplication `f ↦ f(xy)`, inversion `f ↦ f(x^{-1})`, right
//! translation, and the pairing with distributions.

use std::sync::Arc;

use num_traits::Zero;

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::group::{GroupPoint, PValuedGroup};
use crate::padic::{MultiIndex, Scalar};
use crate::series::Series;

#[derive(Debug, Clone, PartialEq)]
pub struct DaggerFunction {
    group: Arc<PValuedGroup>,
    body: Series,
}

impl DaggerFunction {
    pub fn new(group: &Arc<PValuedGroup>, body: Series) -> Result<Self> {
        if body.dim() != group.rank() {
            return Err(Error::DimensionMismatch {
                expected: group.rank(),
                found: body.dim(),
            });
        }
        if !body.is_exact() {
            return Err(Error::NotExact);
        }
        Ok(DaggerFunction {
            group: Arc::clone(group),
            body,
        })
    }

    /// The chart coordinate `Z_i`.
    pub fn coordinate(group: &Arc<PValuedGroup>, i: usize) -> Result<Self> {
        if i >= group.rank() {
            return Err(Error::IndexOutOfRange(format!("coordinate {i}")));
        }
        DaggerFunction::new(group, Series::var(group.rank(), i, 1))
    }

    pub fn constant(group: &Arc<PValuedGroup>, c: Scalar) -> Self {
        DaggerFunction {
            group: Arc::clone(group),
            body: Series::constant(group.rank(), c, 0),
        }
    }

    pub fn body(&self) -> &Series {
        &self.body
    }

    pub fn group(&self) -> &Arc<PValuedGroup> {
        &self.group
    }

    pub fn degree(&self) -> u32 {
        self.body.degree().unwrap_or(0)
    }

    pub fn eval_at(&self, x: &GroupPoint) -> Scalar {
        self.body.evaluate(x.coords()).expect("point has rank d")
    }

    fn compose(&self, args: &[Series]) -> Result<Series> {
        let cap = self.degree() * args.iter().filter_map(Series::degree).max().unwrap_or(1).max(1);
        let args: Vec<Series> = args.iter().map(|g| g.with_cap(cap)).collect::<Result<_>>()?;
        let body = self.body.with_cap(cap)?;
        let out = body.substitute(&args)?;
        let deg = out.degree().unwrap_or(0);
        out.with_cap(deg)
    }

    /// `f(F(X, Y))` in `2d` variables, so that its value at `(x, y)` is `f(xy)`.
    pub fn comul(&self) -> Result<Series> {
        self.compose(self.group.law())
    }

    /// `f(I(X))`, the function `x ↦ f(x^{-1})`.
    pub fn inv_pullback(&self) -> Result<DaggerFunction> {
        let body = self.compose(self.group.inverse_law())?;
        DaggerFunction::new(&self.group, body)
    }

    /// `(R_h f)(g) = f(gh)`. Composition reads `R_{h'} ∘ R_h = R_{h'h}`.
    pub fn right_translate(&self, h: &GroupPoint) -> Result<DaggerFunction> {
        let d = self.group.rank();
        let fixed: Vec<Option<Scalar>> = (0..d)
            .map(|_| None)
            .chain(h.coords().iter().cloned().map(Some))
            .collect();
        let body = self.comul()?.specialize(&fixed)?;
        let deg = body.degree().unwrap_or(0);
        DaggerFunction::new(&self.group, body.with_cap(deg)?)
    }
}

/// `λ(f) = Σ c_β μ_β`.
pub fn pair(lambda: &Distribution, f: &DaggerFunction) -> Result<Scalar> {
    lambda.apply(f.body())
}

/// `(λ ⊗ μ)(h) = Σ c_{β,β'} μ_β(λ) μ_{β'}(μ)` for `h` in `2d` variables.
pub fn pair_tensor(lambda: &Distribution, mu: &Distribution, h: &Series) -> Result<Scalar> {
    let d = lambda.group().rank();
    if h.dim() != 2 * d {
        return Err(Error::DimensionMismatch {
            expected: 2 * d,
            found: h.dim(),
        });
    }
    let mut total = Scalar::zero();
    for (idx, c) in h.terms() {
        let (b, b2): (MultiIndex, MultiIndex) = idx.split(d);
        for (dist, beta) in [(lambda, &b), (mu, &b2)] {
            if beta.degree() > dist.cap() {
                return Err(Error::InsufficientCap {
                    needed: beta.degree(),
                    have: dist.cap(),
                });
            }
        }
        total += c * lambda.moment(&b) * mu.moment(&b2);
    }
    Ok(total)
}

/// The coassociativity defect: the first monomial where `f(F(F(X,Y),Z))` and
/// `f(F(X,F(Y,Z)))` differ, if any.
pub fn coassociativity_witness(f: &DaggerFunction) -> Result<Option<String>> {
    let g = f.group();
    let d = g.rank();
    let comul = f.comul()?;
    let cap = comul.degree().unwrap_or(0) * g.law_degree();
    let lift = |s: &Series, offset: usize| -> Result<Series> {
        let map: Vec<usize> = (0..2 * d).map(|j| j + offset).collect();
        s.rename(3 * d, &map)?.with_cap(cap)
    };
    let var = |j: usize| Series::var(3 * d, j, cap);
    let xy: Vec<Series> = g.law().iter().map(|s| lift(s, 0)).collect::<Result<_>>()?;
    let yz: Vec<Series> = g.law().iter().map(|s| lift(s, d)).collect::<Result<_>>()?;
    let body = comul.with_cap(cap)?;
    let left = body.substitute(&[xy, (2 * d..3 * d).map(var).collect()].concat())?;
    let right = body.substitute(&[(0..d).map(var).collect(), yz].concat())?;
    Ok(left
        .first_difference(&right, cap)
        .map(|(a, x, y)| format!("monomial {a}: {x} vs {y}")))
}

/// `comul(f)` with the `Y` block set to zero; should give back `f`.
pub fn counit_image(f: &DaggerFunction) -> Result<Series> {
    let d = f.group().rank();
    let fixed: Vec<Option<Scalar>> = (0..d)
        .map(|_| None)
        .chain((0..d).map(|_| Some(Scalar::zero())))
        .collect();
    let s = f.comul()?.specialize(&fixed)?;
    let deg = s.degree().unwrap_or(0);
    s.with_cap(deg)
}

/// `comul(f)` with `Y := I(X)`; should be the constant `f(e)`.
pub fn antipode_image(f: &DaggerFunction) -> Result<Series> {
    let g = f.group();
    let d = g.rank();
    let comul = f.comul()?;
    let cap = comul.degree().unwrap_or(0) * g.inverse_law().iter().filter_map(Series::degree).max().unwrap_or(1).max(1);
    let args: Vec<Series> = (0..d)
        .map(|j| Series::var(d, j, cap))
        .chain(g.inverse_law().iter().map(|s| s.with_cap(cap).expect("exact")))
        .collect();
    let s = comul.with_cap(cap)?.substitute(&args)?;
    let deg = s.degree().unwrap_or(0);
    s.with_cap(deg)
}
