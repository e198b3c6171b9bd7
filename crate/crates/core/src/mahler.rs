//! Conversion between Taylor coefficients `c_β` and Mahler coefficients `m_α` of a
//! polynomial, `f(x) = Σ c_β x^β = Σ m_α binom(x, α)`, and the two matching norms.
//!
//! Multivariate conversion is the tensor product of the one-variable formulas, with
//! `binom(x, α) = Π binom(x_i, α_i)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{binomial_scalar, LogMag, MultiIndex, Prime, Scalar, StirlingTable};
use crate::report::CheckRecord;
use crate::series::{RadiusVector, Series, TermRecord};

/// `Π_i s_{β_i, α_i}`.
pub(crate) fn stirling_product(t: &StirlingTable, beta: &MultiIndex, alpha: &MultiIndex) -> BigInt {
    beta.entries()
        .iter()
        .zip(alpha.entries())
        .map(|(&b, &a)| t.second(b as usize, a as usize).clone())
        .product()
}

/// `Π_i a_{α_i, β_i}`.
pub(crate) fn falling_product(t: &StirlingTable, alpha: &MultiIndex, beta: &MultiIndex) -> BigInt {
    alpha
        .entries()
        .iter()
        .zip(beta.entries())
        .map(|(&a, &b)| t.falling(a as usize, b as usize).clone())
        .product()
}

pub(crate) fn max_entry<'a>(indices: impl IntoIterator<Item = &'a MultiIndex>) -> usize {
    indices
        .into_iter()
        .flat_map(|a| a.entries().iter().copied())
        .max()
        .unwrap_or(0) as usize
}

/// Finitely many Mahler coefficients `m_α`, `|α| ≤ cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MahlerFamily {
    dim: usize,
    cap: u32,
    coeffs: BTreeMap<MultiIndex, Scalar>,
    exact: bool,
}

impl MahlerFamily {
    pub fn from_coeffs<I>(dim: usize, cap: u32, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let mut map = BTreeMap::new();
        for (alpha, c) in coeffs {
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
            if !c.is_zero() {
                map.insert(alpha, c);
            }
        }
        Ok(MahlerFamily {
            dim,
            cap,
            coeffs: map,
            exact: true,
        })
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

    pub fn coeff(&self, alpha: &MultiIndex) -> Scalar {
        self.coeffs.get(alpha).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ m_α binom(x, α)` over the support.
    pub fn evaluate(&self, x: &[Scalar]) -> Result<Scalar> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(alpha, m)| {
                alpha
                    .entries()
                    .iter()
                    .zip(x)
                    .fold(m.clone(), |acc, (&a, xi)| acc * binomial_scalar(xi, a))
            })
            .sum())
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        Series::from_terms(self.dim, self.cap, self.coeffs.clone(), true)
            .expect("family is well-formed")
            .to_records()
    }
}

/// `m_α = Σ_{β ≥ α} c_β Π s_{β_i, α_i} α!`. Truncated input is rejected: the sum runs
/// over the whole tail above `α`.
pub fn taylor_to_mahler(f: &Series) -> Result<MahlerFamily> {
    if !f.is_exact() {
        return Err(Error::NotExact);
    }
    let t = StirlingTable::shared(max_entry(f.terms().map(|(a, _)| a)));
    let mut coeffs: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
    for (beta, c) in f.terms() {
        for alpha in beta.below() {
            let s = stirling_product(&t, beta, &alpha);
            if s.is_zero() {
                continue;
            }
            let term = c * Scalar::from_integer(s) * alpha.factorial();
            *coeffs.entry(alpha).or_insert_with(Scalar::zero) += term;
        }
    }
    coeffs.retain(|_, v| !v.is_zero());
    Ok(MahlerFamily {
        dim: f.dim(),
        cap: f.degree().unwrap_or(0),
        coeffs,
        exact: true,
    })
}

/// `c_β = Σ_{α ≥ β} (m_α / α!) Π a_{α_i, β_i}`.
pub fn mahler_to_taylor(m: &MahlerFamily) -> Result<Series> {
    if !m.exact {
        return Err(Error::NotExact);
    }
    let t = StirlingTable::shared(max_entry(m.coeffs.keys()));
    let mut terms = Vec::new();
    for (alpha, c) in &m.coeffs {
        let scaled = c / alpha.factorial();
        for beta in alpha.below() {
            let a = falling_product(&t, alpha, &beta);
            if !a.is_zero() {
                terms.push((beta, &scaled * Scalar::from_integer(a)));
            }
        }
    }
    Series::from_terms(m.dim, m.cap, terms, true)
}

/// `sup_α |m_α| / |α!| · p^{Σ ρ_i α_i}`.
pub fn mahler_norm(m: &MahlerFamily, rho: &RadiusVector, p: Prime) -> Result<LogMag> {
    if rho.len() != m.dim {
        return Err(Error::DimensionMismatch {
            expected: m.dim,
            found: rho.len(),
        });
    }
    Ok(m.coeffs
        .iter()
        .map(|(alpha, c)| {
            LogMag::of(c, p)
                .shift(&(alpha.factorial_valuation(p) + alpha.weighted(rho.exponents())))
        })
        .max()
        .unwrap_or(LogMag::Zero))
}

/// Gauss norm of `f` against the Mahler-side norm of its Mahler coefficients.
pub fn verify_norm_identity(f: &Series, rho: &RadiusVector, p: Prime) -> Result<CheckRecord> {
    if rho.exponents().iter().any(|r| *r <= Scalar::zero()) {
        return Err(Error::ParameterOutOfRange(
            "the norm identity needs every radius exponent > 0".into(),
        ));
    }
    let taylor = f.gauss_norm(rho, p)?.mag;
    let mahler = mahler_norm(&taylor_to_mahler(f)?, rho, p)?;
    let rec = CheckRecord::new(
        "mahler/norm-identity",
        "sup |c_b| r^|b| = sup |m_a|/|a!| r^|a| for an exact polynomial",
    )
    .param("p", p)
    .param("dim", f.dim())
    .magnitude("taylor", &taylor)
    .magnitude("mahler", &mahler);
    Ok(if taylor == mahler {
        rec
    } else {
        rec.fail(format!("taylor {taylor} vs mahler {mahler}"))
    })
}

/// `m` as an exact polynomial in the binomial basis, expanded through `binom(x, α)`.
/// Does not touch the second-kind table, so it cross-checks [`taylor_to_mahler`].
pub fn expand_binomials(m: &MahlerFamily) -> Result<Series> {
    let mut out = Series::zero(m.dim, m.cap);
    for (alpha, c) in &m.coeffs {
        let b = crate::padic::binomial_poly(alpha).with_cap(m.cap)?;
        out = out.add(&b.scale(c))?;
    }
    Ok(out)
}

impl std::fmt::Display for MahlerFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(a, c)| format!("{a}:{}", crate::padic::format_rational(c)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
