//! Sparse multivariate series over exact rationals, truncated at a total-degree cap.
//!
//! A [`Series`] stores every coefficient of total degree `≤ cap`. The `exact` flag
//! records whether the stored terms are the whole object (a polynomial); when it is
//! false, terms above the cap are unknown and any norm computed from the stored data
//! is only a lower bound.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{format_rational, parse_rational, LogMag, MultiIndex, Prime, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    dim: usize,
    cap: u32,
    terms: BTreeMap<MultiIndex, Scalar>,
    exact: bool,
}

/// A polyradius `(p^{ρ_1}, ..., p^{ρ_d})`, stored by its exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusVector(Vec<Scalar>);

impl RadiusVector {
    pub fn new(exponents: Vec<Scalar>) -> Result<Self> {
        if let Some(bad) = exponents.iter().find(|e| **e < Scalar::zero()) {
            return Err(Error::NegativeRadius(format_rational(bad)));
        }
        Ok(RadiusVector(exponents))
    }

    pub fn uniform(dim: usize, rho: Scalar) -> Result<Self> {
        Self::new(vec![rho; dim])
    }

    pub fn exponents(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The radii of two independent variable blocks side by side.
    pub fn concat(&self, other: &RadiusVector) -> RadiusVector {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        RadiusVector(v)
    }
}

/// A norm value together with whether it is exact or only a lower bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormValue {
    pub mag: LogMag,
    pub exact: bool,
}

/// `max_α p^{-v(c_α) + Σ w_i α_i}` over a finite family; `Zero` for the empty family.
pub fn weighted_sup<'a, I>(terms: I, weights: &[Scalar], p: Prime) -> LogMag
where
    I: IntoIterator<Item = (&'a MultiIndex, &'a Scalar)>,
{
    terms
        .into_iter()
        .map(|(alpha, c)| LogMag::of(c, p).shift(&alpha.weighted(weights)))
        .max()
        .unwrap_or(LogMag::Zero)
}

impl Series {
    pub fn zero(dim: usize, cap: u32) -> Self {
        Series {
            dim,
            cap,
            terms: BTreeMap::new(),
            exact: true,
        }
    }

    pub fn constant(dim: usize, c: Scalar, cap: u32) -> Self {
        let mut s = Series::zero(dim, cap);
        if !c.is_zero() {
            s.terms.insert(MultiIndex::zero(dim), c);
        }
        s
    }

    pub fn one(dim: usize, cap: u32) -> Self {
        Series::constant(dim, Scalar::one(), cap)
    }

    /// The coordinate function `X_i`; needs `cap ≥ 1` to be exact.
    pub fn var(dim: usize, i: usize, cap: u32) -> Self {
        let mut s = Series::zero(dim, cap);
        if cap >= 1 {
            s.terms.insert(MultiIndex::unit(dim, i), Scalar::one());
        } else {
            s.exact = false;
        }
        s
    }

    /// Builds a series from `(α, c)` pairs, summing repeats and dropping zeros.
    pub fn from_terms<I>(dim: usize, cap: u32, terms: I, exact: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let mut s = Series::zero(dim, cap);
        s.exact = exact;
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: alpha.dim(),
                });
            }
            if alpha.degree() > cap {
                return Err(Error::DegreeAboveCap {
                    degree: alpha.degree(),
                    cap,
                });
            }
            s.add_term(alpha, c);
        }
        Ok(s)
    }

    /// An exact polynomial whose cap is its own degree.
    pub fn polynomial<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let cap = terms.iter().map(|(a, _)| a.degree()).max().unwrap_or(0);
        Series::from_terms(dim, cap, terms, true)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    /// Number of stored terms; see `is_zero` for emptiness.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Scalar {
        self.terms.get(alpha).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Highest total degree present; `None` for the zero series.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// Moves to a new cap. Lowering truncates (and loses exactness if terms drop);
    /// raising is only allowed for exact series.
    pub fn with_cap(&self, cap: u32) -> Result<Series> {
        if cap >= self.cap {
            if !self.exact && cap > self.cap {
                return Err(Error::CannotExtend {
                    from: self.cap,
                    to: cap,
                });
            }
            let mut s = self.clone();
            s.cap = cap;
            return Ok(s);
        }
        let terms: BTreeMap<_, _> = self
            .terms
            .iter()
            .filter(|(a, _)| a.degree() <= cap)
            .map(|(a, c)| (a.clone(), c.clone()))
            .collect();
        let exact = self.exact && terms.len() == self.terms.len();
        Ok(Series {
            dim: self.dim,
            cap,
            terms,
            exact,
        })
    }

    fn check_dim(&self, other: &Series) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn fits(&self, cap: u32) -> bool {
        self.degree().is_none_or(|d| d <= cap)
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_dim(other)?;
        let cap = self.cap.min(other.cap);
        let exact = self.exact && other.exact && self.fits(cap) && other.fits(cap);
        let mut out = Series::zero(self.dim, cap);
        out.exact = exact;
        for (a, c) in self.terms.iter().chain(other.terms.iter()) {
            if a.degree() <= cap {
                out.add_term(a.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        let mut out = Series::zero(self.dim, self.cap);
        out.exact = self.exact || c.is_zero();
        if !c.is_zero() {
            out.terms = self
                .terms
                .iter()
                .map(|(a, x)| (a.clone(), x * c))
                .collect();
        }
        out
    }

    /// Cauchy product truncated at `min(cap_f, cap_g)`.
    pub fn multiply(&self, other: &Series) -> Result<Series> {
        self.check_dim(other)?;
        let cap = self.cap.min(other.cap);
        let exact_zero = (self.exact && self.is_zero()) || (other.exact && other.is_zero());
        let mut out = Series::zero(self.dim, cap);
        if exact_zero {
            return Ok(out);
        }
        out.exact = self.exact
            && other.exact
            && match (self.degree(), other.degree()) {
                (Some(a), Some(b)) => a + b <= cap,
                _ => true,
            };
        for (a, x) in &self.terms {
            let da = a.degree();
            if da > cap {
                continue;
            }
            for (b, y) in &other.terms {
                if da + b.degree() <= cap {
                    out.add_term(a.add(b), x * y);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Series> {
        let mut acc = Series::one(self.dim, self.cap);
        for _ in 0..n {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// `f(g_1, ..., g_d)` for series `g_i` without constant term.
    pub fn substitute(&self, args: &[Series]) -> Result<Series> {
        if args.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: args.len(),
            });
        }
        let Some(first) = args.first() else {
            return Ok(self.clone());
        };
        let target = first.dim;
        for (i, g) in args.iter().enumerate() {
            if g.dim != target {
                return Err(Error::DimensionMismatch {
                    expected: target,
                    found: g.dim,
                });
            }
            if !g.constant_term().is_zero() {
                return Err(Error::ConstantTerm(i));
            }
        }
        let mut cap = args.iter().map(Series::cap).min().unwrap_or(0);
        if !self.exact {
            cap = cap.min(self.cap);
        }
        let args: Vec<Series> = args
            .iter()
            .map(|g| g.with_cap(cap))
            .collect::<Result<_>>()?;

        // powers[i][k] = g_i^k
        let mut powers: Vec<Vec<Series>> = Vec::with_capacity(self.dim);
        for (i, g) in args.iter().enumerate() {
            let top = self.terms.keys().map(|a| a.entries()[i]).max().unwrap_or(0);
            let mut row = vec![Series::one(target, cap)];
            for k in 1..=top as usize {
                let next = row[k - 1].multiply(g)?;
                row.push(next);
            }
            powers.push(row);
        }

        let mut out = Series::zero(target, cap);
        let mut exact = self.exact;
        for (alpha, c) in &self.terms {
            let mut term = Series::constant(target, c.clone(), cap);
            for (i, &a) in alpha.entries().iter().enumerate() {
                if a > 0 {
                    term = term.multiply(&powers[i][a as usize])?;
                }
            }
            exact &= term.exact;
            out = out.add(&term)?;
        }
        out.exact = exact;
        Ok(out)
    }

    /// Re-embeds into `new_dim` variables, sending variable `i` to `map[i]`.
    pub fn rename(&self, new_dim: usize, map: &[usize]) -> Result<Series> {
        if map.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&j| j >= new_dim) {
            return Err(Error::IndexOutOfRange(format!("variable {bad} of {new_dim}")));
        }
        let mut out = Series::zero(new_dim, self.cap);
        out.exact = self.exact;
        for (alpha, c) in &self.terms {
            let mut idx = vec![0; new_dim];
            for (i, &a) in alpha.entries().iter().enumerate() {
                idx[map[i]] += a;
            }
            out.add_term(MultiIndex::new(idx), c.clone());
        }
        Ok(out)
    }

    /// Exact value at a point; sums only the stored terms.
    pub fn evaluate(&self, x: &[Scalar]) -> Result<Scalar> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut cache: Vec<Vec<Scalar>> = x.iter().map(|xi| vec![Scalar::one(), xi.clone()]).collect();
        let mut total = Scalar::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (i, &a) in alpha.entries().iter().enumerate() {
                let row = &mut cache[i];
                while row.len() <= a as usize {
                    let next = row.last().unwrap() * &x[i];
                    row.push(next);
                }
                term *= &row[a as usize];
            }
            total += term;
        }
        Ok(total)
    }

    /// Fixes the variables with `Some(value)` and keeps the rest, in order.
    pub fn specialize(&self, values: &[Option<Scalar>]) -> Result<Series> {
        if values.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: values.len(),
            });
        }
        if !self.exact {
            return Err(Error::NotExact);
        }
        let kept: Vec<usize> = (0..self.dim).filter(|&i| values[i].is_none()).collect();
        let mut out = Series::zero(kept.len(), self.cap);
        for (alpha, c) in &self.terms {
            let mut coeff = c.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    coeff *= num_traits::pow(v.clone(), alpha.entries()[i] as usize);
                }
            }
            let idx = kept.iter().map(|&i| alpha.entries()[i]).collect();
            out.add_term(MultiIndex::new(idx), coeff);
        }
        Ok(out)
    }

    /// Weighted Gauss norm `sup |c_α| p^{Σ ρ_i α_i}`.
    pub fn gauss_norm(&self, rho: &RadiusVector, p: Prime) -> Result<NormValue> {
        if rho.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.len(),
            });
        }
        Ok(NormValue {
            mag: weighted_sup(&self.terms, rho.exponents(), p),
            exact: self.exact,
        })
    }

    /// First monomial (in graded order) where `self` and `other` differ, up to `cap`.
    pub fn first_difference(&self, other: &Series, cap: u32) -> Option<(MultiIndex, Scalar, Scalar)> {
        let keys: std::collections::BTreeSet<&MultiIndex> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .filter(|a| a.degree() <= cap)
            .map(|a| (a.clone(), self.coeff(a), other.coeff(a)))
            .find(|(_, x, y)| x != y)
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(a, c)| TermRecord {
                index: a.entries().to_vec(),
                coeff: format_rational(c),
            })
            .collect()
    }

    /// Reads an exact polynomial from term records.
    pub fn from_records(dim: usize, records: &[TermRecord]) -> Result<Series> {
        let terms = records
            .iter()
            .map(|r| Ok((MultiIndex::new(r.index.clone()), parse_rational(&r.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        Series::polynomial(dim, terms)
    }
}

/// Serialized form of one term: `{"index": [..], "coeff": "num/den"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub index: Vec<u32>,
    pub coeff: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{int, ratio};

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn poly(dim: usize, terms: &[(&[u32], i64)]) -> Series {
        Series::polynomial(dim, terms.iter().map(|(a, c)| (mi(a), int(*c)))).unwrap()
    }

    #[test]
    fn add_and_scale() {
        let x1 = Series::var(2, 0, 3);
        let x2 = Series::var(2, 1, 3);
        let s = x1.add(&x2).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.is_exact());
        let f = poly(2, &[(&[0, 0], 3), (&[1, 1], 2)]).with_cap(3).unwrap();
        assert!(f.scale(&int(0)).is_zero());
        assert!(f.add(&f.scale(&int(-1))).unwrap().is_zero());
        assert!(x1.add(&Series::var(3, 0, 3)).is_err());
    }

    #[test]
    fn multiply_examples() {
        let a = poly(1, &[(&[0], 1), (&[1], 1)]).with_cap(2).unwrap();
        let b = poly(1, &[(&[0], 1), (&[1], -1)]).with_cap(2).unwrap();
        let prod = a.multiply(&b).unwrap();
        assert_eq!(prod, poly(1, &[(&[0], 1), (&[2], -1)]));

        let cap = 4;
        let top = Series::from_terms(1, cap, [(mi(&[cap]), int(1))], true).unwrap();
        let x = Series::var(1, 0, cap);
        let t = top.multiply(&x).unwrap();
        assert!(t.is_zero());
        assert!(!t.is_exact());

        let f = poly(1, &[(&[0], 3), (&[1], 1)]).with_cap(2).unwrap();
        assert_eq!(
            f.multiply(&f).unwrap(),
            poly(1, &[(&[0], 9), (&[1], 6), (&[2], 1)])
        );
    }

    #[test]
    fn substitute_examples() {
        // Z^2 at X+Y
        let z2 = poly(1, &[(&[2], 1)]);
        let xy = poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]).with_cap(2).unwrap();
        let out = z2.substitute(&[xy]).unwrap();
        assert_eq!(out, poly(2, &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]));
        assert!(out.is_exact());

        let with_const = poly(2, &[(&[0, 0], 1), (&[1, 0], 1)]);
        assert_eq!(
            z2.substitute(&[with_const]).unwrap_err(),
            Error::ConstantTerm(0)
        );
    }

    #[test]
    fn evaluate_examples() {
        let f = poly(1, &[(&[0], 1), (&[1], 1)]);
        assert_eq!(f.evaluate(&[int(0)]).unwrap(), int(1));
        let g = poly(2, &[(&[1, 1], 1)]);
        assert_eq!(g.evaluate(&[int(2), int(3)]).unwrap(), int(6));
        assert!(g.evaluate(&[int(2)]).is_err());
    }

    #[test]
    fn gauss_norm_examples() {
        let p = p3();
        let one = Series::one(1, 0);
        let n = one.gauss_norm(&RadiusVector::uniform(1, ratio(1, 2)).unwrap(), p).unwrap();
        assert_eq!(n.mag, LogMag::one());

        let xy = poly(2, &[(&[1, 1], 1)]);
        let rho = RadiusVector::new(vec![ratio(1, 3), ratio(1, 5)]).unwrap();
        assert_eq!(xy.gauss_norm(&rho, p).unwrap().mag, LogMag::pow(ratio(8, 15)));

        let f = poly(1, &[(&[0], 3), (&[1], 1)]);
        let n = f.gauss_norm(&RadiusVector::uniform(1, ratio(1, 4)).unwrap(), p).unwrap();
        assert_eq!(n.mag, LogMag::pow(ratio(1, 4)));
        assert!(n.exact);

        assert_eq!(
            Series::zero(1, 3).gauss_norm(&RadiusVector::uniform(1, int(1)).unwrap(), p).unwrap().mag,
            LogMag::Zero
        );
        assert!(RadiusVector::new(vec![int(-1)]).is_err());
    }

    #[test]
    fn truncated_norm_is_flagged() {
        let top = poly(1, &[(&[3], 1)]);
        let t = top.multiply(&top).unwrap();
        assert!(!t.is_exact());
        let n = t.gauss_norm(&RadiusVector::uniform(1, int(0)).unwrap(), p3()).unwrap();
        assert!(!n.exact);
    }

    #[test]
    fn cap_changes() {
        let f = poly(1, &[(&[0], 1), (&[3], 1)]);
        let low = f.with_cap(2).unwrap();
        assert!(!low.is_exact());
        assert!(low.with_cap(5).is_err());
        assert!(f.with_cap(9).unwrap().is_exact());
    }

    #[test]
    fn specialize_and_rename() {
        let f = poly(2, &[(&[1, 1], 2), (&[0, 1], 1)]);
        let g = f.specialize(&[Some(int(3)), None]).unwrap();
        assert_eq!(g, poly(1, &[(&[1], 7)]).with_cap(2).unwrap());
        let r = f.rename(3, &[2, 0]).unwrap();
        assert_eq!(r.coeff(&mi(&[1, 0, 1])), int(2));
    }

    #[test]
    fn records_round_trip() {
        let f = Series::polynomial(2, [(mi(&[1, 0]), ratio(-3, 4)), (mi(&[0, 2]), int(5))]).unwrap();
        let back = Series::from_records(2, &f.to_records()).unwrap();
        assert_eq!(back, f);
    }
}
