//! Distributions on a p-valued group, truncated at a total degree.
//!
//! A distribution `λ` is stored through its moments `μ_β = λ(Z^β)` and its
//! coefficients `d_α` in `λ = Σ d_α b^α`, `b_i = δ_{g_i} - δ_e`, linked by
//! `μ_β = Σ_{α ≤ β} d_α Π s_{β_i, α_i} α!`. When `λ` is a finite combination of Dirac
//! measures those atoms are kept, so moments can be regenerated at any degree.
//!
//! `exact` means every nonzero `d_α` lies within the stored range, so the norms below
//! are true values; otherwise they are lower bounds.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{GroupPoint, PValuedGroup};
use crate::mahler::{falling_product, stirling_product};
use crate::padic::{
    binomial_scalar, digit_sum, format_rational, int, valuation, ExtRational, LogMag, MultiIndex,
    Scalar, StirlingTable,
};
use crate::report::{CheckRecord, Verdict};
use crate::series::{NormValue, Series};

/// Which product `δ_x ∗ δ_y` means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    /// `(λ ∗ μ)(f) = (λ × μ)(f(xy))`, so `δ_x ∗ δ_y = δ_{xy}`.
    #[default]
    Standard,
    /// `δ_x ∗ δ_y = δ_{yx}`.
    Opposite,
}

#[derive(Debug, Clone)]
pub struct Distribution {
    group: Arc<PValuedGroup>,
    cap: u32,
    moments: BTreeMap<MultiIndex, Scalar>,
    dcoeffs: BTreeMap<MultiIndex, Scalar>,
    exact: bool,
    atoms: Option<Vec<(Scalar, GroupPoint)>>,
}

impl PartialEq for Distribution {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group
            && self.cap == other.cap
            && self.moments == other.moments
            && self.exact == other.exact
    }
}

/// `μ_β = Σ_{α ≤ β} d_α Π s_{β_i, α_i} α!` for `|β| ≤ cap`.
pub fn moments_from_dcoeffs(
    dim: usize,
    cap: u32,
    dcoeffs: &BTreeMap<MultiIndex, Scalar>,
) -> BTreeMap<MultiIndex, Scalar> {
    let t = StirlingTable::shared(cap as usize);
    let mut out = BTreeMap::new();
    for beta in MultiIndex::up_to(dim, cap) {
        let mut acc = Scalar::zero();
        for (alpha, d) in dcoeffs {
            if alpha.le(&beta) {
                let s = stirling_product(&t, &beta, alpha);
                if !s.is_zero() {
                    acc += d * Scalar::from_integer(s) * alpha.factorial();
                }
            }
        }
        if !acc.is_zero() {
            out.insert(beta, acc);
        }
    }
    out
}

/// `d_α = (1/α!) Σ_{β ≤ α} Π a_{α_i, β_i} μ_β` for `|α| ≤ cap`.
pub fn dcoeffs_from_moments(
    dim: usize,
    cap: u32,
    moments: &BTreeMap<MultiIndex, Scalar>,
) -> BTreeMap<MultiIndex, Scalar> {
    let t = StirlingTable::shared(cap as usize);
    let mut out = BTreeMap::new();
    for alpha in MultiIndex::up_to(dim, cap) {
        let mut acc = Scalar::zero();
        for beta in alpha.below() {
            if let Some(m) = moments.get(&beta) {
                let a = falling_product(&t, &alpha, &beta);
                if !a.is_zero() {
                    acc += m * Scalar::from_integer(a);
                }
            }
        }
        if !acc.is_zero() {
            out.insert(alpha.clone(), acc / alpha.factorial());
        }
    }
    out
}

fn point_moments(x: &GroupPoint, cap: u32) -> BTreeMap<MultiIndex, Scalar> {
    let dim = x.dim();
    let powers: Vec<Vec<Scalar>> = x
        .coords()
        .iter()
        .map(|c| {
            let mut row = vec![Scalar::one()];
            for _ in 0..cap {
                let next = row.last().unwrap() * c;
                row.push(next);
            }
            row
        })
        .collect();
    MultiIndex::up_to(dim, cap)
        .into_iter()
        .map(|beta| {
            let v = beta
                .entries()
                .iter()
                .enumerate()
                .fold(Scalar::one(), |acc, (i, &b)| acc * &powers[i][b as usize]);
            (beta, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// Atoms at natural coordinates with `Σ x_i ≤ cap` have all their `b`-coefficients
/// inside the stored range.
fn atoms_captured(atoms: &[(Scalar, GroupPoint)], cap: u32) -> bool {
    atoms.iter().all(|(_, x)| {
        let mut total = BigInt::zero();
        for c in x.coords() {
            if !c.is_integer() || c.is_negative() {
                return false;
            }
            total += c.to_integer();
        }
        total <= BigInt::from(cap)
    })
}

fn merge_atoms(atoms: Vec<(Scalar, GroupPoint)>) -> Vec<(Scalar, GroupPoint)> {
    let mut out: Vec<(Scalar, GroupPoint)> = Vec::new();
    for (c, x) in atoms {
        match out.iter_mut().find(|(_, y)| *y == x) {
            Some((acc, _)) => *acc += c,
            None => out.push((c, x)),
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    out
}

impl Distribution {
    /// A finite combination `Σ c_j δ_{x_j}`.
    pub fn from_atoms(
        group: &Arc<PValuedGroup>,
        atoms: Vec<(Scalar, GroupPoint)>,
        cap: u32,
    ) -> Result<Self> {
        let d = group.rank();
        for (_, x) in &atoms {
            if x.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: x.dim(),
                });
            }
        }
        let atoms = merge_atoms(atoms);
        let mut moments: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (c, x) in &atoms {
            for (beta, v) in point_moments(x, cap) {
                *moments.entry(beta).or_insert_with(Scalar::zero) += c * v;
            }
        }
        moments.retain(|_, v| !v.is_zero());
        let dcoeffs = dcoeffs_from_moments(d, cap, &moments);
        Ok(Distribution {
            group: Arc::clone(group),
            cap,
            exact: atoms_captured(&atoms, cap),
            moments,
            dcoeffs,
            atoms: Some(atoms),
        })
    }

    pub fn dirac(group: &Arc<PValuedGroup>, x: &GroupPoint, cap: u32) -> Result<Self> {
        Distribution::from_atoms(group, vec![(Scalar::one(), x.clone())], cap)
    }

    pub fn identity(group: &Arc<PValuedGroup>, cap: u32) -> Self {
        Distribution::dirac(group, &group.identity(), cap).expect("identity has rank d")
    }

    /// `b^α = Π (δ_{g_i} - δ_e)^{α_i} = Σ_{k ≤ α} (-1)^{|α-k|} binom(α, k) δ_k`, where `δ_k`
    /// is the Dirac at ψ-coordinates `k`.
    pub fn b_monomial(group: &Arc<PValuedGroup>, alpha: &MultiIndex, cap: u32) -> Result<Self> {
        Distribution::from_dcoeffs(group, [(alpha.clone(), Scalar::one())], cap)
    }

    /// `Σ d_α b^α` for finitely many `α` with `|α| ≤ cap`.
    pub fn from_dcoeffs<I>(group: &Arc<PValuedGroup>, dcoeffs: I, cap: u32) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let d = group.rank();
        let mut map: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (alpha, c) in dcoeffs {
            if alpha.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: alpha.dim(),
                });
            }
            if alpha.degree() > cap {
                return Err(Error::DegreeAboveCap {
                    degree: alpha.degree(),
                    cap,
                });
            }
            *map.entry(alpha).or_insert_with(Scalar::zero) += c;
        }
        map.retain(|_, v| !v.is_zero());
        let mut atoms = Vec::new();
        for (alpha, c) in &map {
            for k in alpha.below() {
                let mut coeff = c.clone();
                let mut parity = 0;
                for (&a, &ki) in alpha.entries().iter().zip(k.entries()) {
                    coeff *= binomial_scalar(&int(a as i64), ki);
                    parity += a - ki;
                }
                if parity % 2 == 1 {
                    coeff = -coeff;
                }
                let x = group.point(k.entries().iter().map(|&v| int(v as i64)).collect())?;
                atoms.push((coeff, x));
            }
        }
        let atoms = merge_atoms(atoms);
        let moments = moments_from_dcoeffs(d, cap, &map);
        Ok(Distribution {
            group: Arc::clone(group),
            cap,
            moments,
            dcoeffs: map,
            exact: true,
            atoms: Some(atoms),
        })
    }

    /// A moment family with unknown tail.
    pub fn from_moments<I>(group: &Arc<PValuedGroup>, moments: I, cap: u32) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let d = group.rank();
        let mut map = BTreeMap::new();
        for (beta, c) in moments {
            if beta.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: beta.dim(),
                });
            }
            if beta.degree() > cap {
                return Err(Error::DegreeAboveCap {
                    degree: beta.degree(),
                    cap,
                });
            }
            if !c.is_zero() {
                map.insert(beta, c);
            }
        }
        let dcoeffs = dcoeffs_from_moments(d, cap, &map);
        Ok(Distribution {
            group: Arc::clone(group),
            cap,
            moments: map,
            dcoeffs,
            exact: false,
            atoms: None,
        })
    }

    /// Raises or lowers the stored degree. Raising needs the Dirac atoms.
    pub fn with_cap(&self, cap: u32) -> Result<Self> {
        match &self.atoms {
            Some(atoms) => Distribution::from_atoms(&self.group, atoms.clone(), cap),
            None if cap <= self.cap => {
                let moments = self.moments.iter().filter(|(b, _)| b.degree() <= cap);
                Distribution::from_moments(
                    &self.group,
                    moments.map(|(b, c)| (b.clone(), c.clone())),
                    cap,
                )
            }
            None => Err(Error::CannotExtend {
                from: self.cap,
                to: cap,
            }),
        }
    }

    pub fn group(&self) -> &Arc<PValuedGroup> {
        &self.group
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn atoms(&self) -> Option<&[(Scalar, GroupPoint)]> {
        self.atoms.as_deref()
    }

    pub fn moment(&self, beta: &MultiIndex) -> Scalar {
        self.moments.get(beta).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn dcoeff(&self, alpha: &MultiIndex) -> Scalar {
        self.dcoeffs.get(alpha).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn moments(&self) -> &BTreeMap<MultiIndex, Scalar> {
        &self.moments
    }

    pub fn dcoeffs(&self) -> &BTreeMap<MultiIndex, Scalar> {
        &self.dcoeffs
    }

    /// `λ(1) = μ_0`.
    pub fn total_mass(&self) -> Scalar {
        self.moment(&MultiIndex::zero(self.group.rank()))
    }

    /// `λ(f)` for a polynomial `f` of degree at most the cap.
    pub fn apply(&self, f: &Series) -> Result<Scalar> {
        if let Some(deg) = f.degree() {
            if deg > self.cap {
                return Err(Error::InsufficientCap {
                    needed: deg,
                    have: self.cap,
                });
            }
        }
        Ok(f.terms().map(|(b, c)| c * self.moment(b)).sum())
    }

    pub fn sub(&self, other: &Distribution) -> Result<Distribution> {
        self.combine(other, -Scalar::one())
    }

    pub fn add(&self, other: &Distribution) -> Result<Distribution> {
        self.combine(other, Scalar::one())
    }

    fn combine(&self, other: &Distribution, sign: Scalar) -> Result<Distribution> {
        if self.group != other.group {
            return Err(Error::Config("distributions live on different groups".into()));
        }
        let cap = self.cap.min(other.cap);
        if let (Some(a), Some(b)) = (&self.atoms, &other.atoms) {
            let atoms = a
                .iter()
                .cloned()
                .chain(b.iter().map(|(c, x)| (c * &sign, x.clone())))
                .collect();
            return Distribution::from_atoms(&self.group, atoms, cap);
        }
        let mut moments: BTreeMap<MultiIndex, Scalar> = self
            .moments
            .iter()
            .filter(|(b, _)| b.degree() <= cap)
            .map(|(b, c)| (b.clone(), c.clone()))
            .collect();
        for (b, c) in other.moments.iter().filter(|(b, _)| b.degree() <= cap) {
            *moments.entry(b.clone()).or_insert_with(Scalar::zero) += c * &sign;
        }
        Distribution::from_moments(&self.group, moments, cap)
    }

    fn moments_at(&self, cap: u32) -> Result<BTreeMap<MultiIndex, Scalar>> {
        if cap <= self.cap {
            return Ok(self.moments.clone());
        }
        match &self.atoms {
            Some(_) => Ok(self.with_cap(cap)?.moments),
            None => Err(Error::InsufficientCap {
                needed: cap,
                have: self.cap,
            }),
        }
    }

    fn norm_with<F>(&self, exponent: F) -> NormValue
    where
        F: Fn(&MultiIndex, &Scalar) -> Scalar,
    {
        let p = self.group.prime();
        let mag = self
            .dcoeffs
            .iter()
            .map(|(alpha, d)| match valuation(d, p) {
                ExtRational::Infinity => LogMag::Zero,
                ExtRational::Finite(v) => LogMag::pow(exponent(alpha, &v)),
            })
            .max()
            .unwrap_or(LogMag::Zero);
        NormValue {
            mag,
            exact: self.exact,
        }
    }

    /// `‖λ‖_s = sup |d_α| s^{τα}`, `s = p^{-σ}`, `τα = Σ ω(g_i) α_i`.
    pub fn st_norm(&self, sigma: &Scalar) -> NormValue {
        let omega = self.group.omega().to_vec();
        self.norm_with(|a, v| -v - sigma * a.weighted(&omega))
    }

    /// `‖λ‖'_s = sup |d_α| s^{|α|}`.
    pub fn st_norm_prime(&self, sigma: &Scalar) -> NormValue {
        self.norm_with(|a, v| -v - sigma * int(a.degree() as i64))
    }

    /// `‖λ‖†_s = sup |α! d_α| s^{|α|}`.
    pub fn dagger_seminorm(&self, sigma: &Scalar) -> NormValue {
        let p = self.group.prime();
        self.norm_with(|a, v| -v - a.factorial_valuation(p) - sigma * int(a.degree() as i64))
    }

    /// Norm of the dual of the `N`-th strict neighborhood algebra:
    /// `sup |α! d_α| p^{-Σ τ_{N,i} α_i}`.
    pub fn dagger_norm(&self, n: u32) -> Result<NormValue> {
        let p = self.group.prime();
        let tau = self.group.neighborhood_params(n)?.tau;
        Ok(self.norm_with(|a, v| -v - a.factorial_valuation(p) - a.weighted(&tau)))
    }
}

/// A coefficient of `X^β Y^{β'}`.
type SplitTerm = (MultiIndex, MultiIndex, Scalar);

/// Precomputed coefficients of `F^γ = Π F_i^{γ_i}` for `|γ| ≤ cap`, split into
/// `X^β Y^{β'}` parts.
#[derive(Debug, Clone)]
pub struct ConvolutionKernel {
    group: Arc<PValuedGroup>,
    cap: u32,
    input_cap: u32,
    table: Vec<(MultiIndex, Vec<SplitTerm>)>,
}

impl ConvolutionKernel {
    pub fn new(group: &Arc<PValuedGroup>, cap: u32) -> Result<Self> {
        let d = group.rank();
        let input_cap = cap * group.law_degree();
        let law: Vec<Series> = group
            .law()
            .iter()
            .map(|f| f.with_cap(input_cap))
            .collect::<Result<_>>()?;
        let mut powers: BTreeMap<MultiIndex, Series> = BTreeMap::new();
        let mut table = Vec::new();
        for gamma in MultiIndex::up_to(d, cap) {
            let series = match gamma.entries().iter().position(|&g| g > 0) {
                None => Series::one(2 * d, input_cap),
                Some(i) => {
                    let mut prev = gamma.entries().to_vec();
                    prev[i] -= 1;
                    powers[&MultiIndex::new(prev)].multiply(&law[i])?
                }
            };
            let split = series
                .terms()
                .map(|(idx, c)| {
                    let (b, b2) = idx.split(d);
                    (b, b2, c.clone())
                })
                .collect();
            table.push((gamma.clone(), split));
            powers.insert(gamma, series);
        }
        Ok(ConvolutionKernel {
            group: Arc::clone(group),
            cap,
            input_cap,
            table,
        })
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Moment degree the inputs must reach.
    pub fn input_cap(&self) -> u32 {
        self.input_cap
    }

    /// `ν_γ = Σ coeff(F^γ, X^β Y^{β'}) μ_β(λ) μ_{β'}(μ)`.
    pub fn convolve(&self, lambda: &Distribution, mu: &Distribution, order: Order) -> Result<Distribution> {
        let (lambda, mu) = match order {
            Order::Standard => (lambda, mu),
            Order::Opposite => (mu, lambda),
        };
        if *lambda.group != *self.group || *mu.group != *self.group {
            return Err(Error::Config("distribution and kernel groups differ".into()));
        }
        let ml = lambda.moments_at(self.input_cap)?;
        let mm = mu.moments_at(self.input_cap)?;
        let mut moments = BTreeMap::new();
        for (gamma, terms) in &self.table {
            let mut acc = Scalar::zero();
            for (b, b2, c) in terms {
                if let (Some(x), Some(y)) = (ml.get(b), mm.get(b2)) {
                    acc += c * x * y;
                }
            }
            if !acc.is_zero() {
                moments.insert(gamma.clone(), acc);
            }
        }
        let d = self.group.rank();
        let dcoeffs = dcoeffs_from_moments(d, self.cap, &moments);
        let atoms = match (&lambda.atoms, &mu.atoms) {
            (Some(a), Some(b)) => {
                let mut out = Vec::with_capacity(a.len() * b.len());
                for (c, x) in a {
                    for (e, y) in b {
                        out.push((c * e, self.group.multiply(x, y)));
                    }
                }
                Some(merge_atoms(out))
            }
            _ => None,
        };
        let exact = atoms.as_ref().is_some_and(|a| atoms_captured(a, self.cap));
        Ok(Distribution {
            group: Arc::clone(&self.group),
            cap: self.cap,
            moments,
            dcoeffs,
            exact,
            atoms,
        })
    }
}

/// One-off convolution at output degree `cap`.
pub fn convolve(lambda: &Distribution, mu: &Distribution, cap: u32, order: Order) -> Result<Distribution> {
    ConvolutionKernel::new(lambda.group(), cap)?.convolve(lambda, mu, order)
}

/// Random `Σ d_α b^α` with up to `max_terms` terms of degree at most `max_degree`;
/// coefficients `±u p^k` with `k ∈ {-1, 0, 1, 2}`.
pub fn random_distribution(
    group: &Arc<PValuedGroup>,
    rng: &mut ChaCha8Rng,
    max_degree: u32,
    max_terms: usize,
    cap: u32,
) -> Result<Distribution> {
    let d = group.rank();
    let indices = MultiIndex::up_to(d, max_degree);
    let p = group.prime();
    let terms = rng.gen_range(1..=max_terms);
    let mut dcoeffs = Vec::new();
    for _ in 0..terms {
        let alpha = indices[rng.gen_range(0..indices.len())].clone();
        let k: i32 = rng.gen_range(-1..=2);
        let u: i64 = rng.gen_range(1..=(p.get() as i64).pow(2));
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let scale = if k >= 0 {
            Scalar::from_integer(p.pow(k as u32))
        } else {
            Scalar::new(BigInt::one(), p.big())
        };
        dcoeffs.push((alpha, int(sign * u) * scale));
    }
    let lambda = Distribution::from_dcoeffs(group, dcoeffs, cap)?;
    if lambda.dcoeffs.is_empty() {
        return Distribution::from_dcoeffs(group, [(MultiIndex::zero(d), Scalar::one())], cap);
    }
    Ok(lambda)
}

/// `trials` seeded pairs of finitely supported distributions and their products.
pub fn sample_products(
    kernel: &ConvolutionKernel,
    trials: usize,
    seed: u64,
    max_degree: u32,
) -> Result<Vec<(Distribution, Distribution, Distribution)>> {
    let group = &kernel.group;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let a = random_distribution(group, &mut rng, max_degree, 3, kernel.cap)?;
        let b = random_distribution(group, &mut rng, max_degree, 3, kernel.cap)?;
        let c = kernel.convolve(&a, &b, Order::Standard)?;
        out.push((a, b, c));
    }
    Ok(out)
}

fn fmt_mag(m: &LogMag) -> String {
    m.to_string()
}

/// `‖λ ∗ μ‖ ≤ ‖λ‖ ‖μ‖` over sampled products for one norm. The product's norm may be
/// truncated, which keeps the assertion sound and yields `lower-bound-pass`.
fn submultiplicative_record<F>(mut rec: CheckRecord, samples: &[(Distribution, Distribution, Distribution)], norm: F) -> CheckRecord
where
    F: Fn(&Distribution) -> NormValue,
{
    let mut truncated = false;
    let mut worst: Option<Scalar> = None;
    for (i, (a, b, c)) in samples.iter().enumerate() {
        let (na, nb, nc) = (norm(a), norm(b), norm(c));
        if !na.exact || !nb.exact {
            return rec.fail(format!("sample {i}: input norm is not exact"));
        }
        truncated |= !nc.exact;
        let rhs = &na.mag * &nb.mag;
        if nc.mag > rhs {
            rec = rec.fail(format!(
                "sample {i}: |conv| = {} > {} = |a||b|",
                fmt_mag(&nc.mag),
                fmt_mag(&rhs)
            ));
        }
        if let (Some(l), Some(r)) = (nc.mag.exponent(), rhs.exponent()) {
            let gap = r - l;
            if worst.as_ref().is_none_or(|w| gap < *w) {
                worst = Some(gap);
            }
        }
    }
    if let Some(w) = worst {
        rec = rec.exponent("min_gap", &w);
    }
    if rec.passed() && truncated {
        rec = rec.verdict(Verdict::LowerBoundPass);
    }
    rec
}

/// Whether `(G, ω)` is equi-valued with `2ω_0 > p/(p-1)`.
pub fn satisfies_hyp(group: &PValuedGroup) -> bool {
    let p = group.prime().get() as i64;
    group.is_equi_valued() && int(2) * &group.omega()[0] > crate::padic::ratio(p, p - 1)
}

/// Submultiplicativity of `‖·‖_s` for one `σ` over precomputed products.
pub fn check_submultiplicative_on(
    group: &PValuedGroup,
    sigma: &Scalar,
    samples: &[(Distribution, Distribution, Distribution)],
) -> CheckRecord {
    let rec = CheckRecord::new(
        "norms/st-submultiplicative",
        "|l * m|_s <= |l|_s |m|_s for s = p^-sigma in [1/p, 1) under 2 omega_0 > p/(p-1)",
    )
    .param("group", group.name())
    .param("sigma", format_rational(sigma))
    .param("samples", samples.len());
    if !satisfies_hyp(group) || *sigma <= Scalar::zero() || *sigma > Scalar::one() {
        return rec.verdict(Verdict::RegimeUnmet);
    }
    submultiplicative_record(rec, samples, |l| l.st_norm(sigma))
}

pub fn check_submultiplicative(
    group: &Arc<PValuedGroup>,
    sigma: &Scalar,
    trials: usize,
    seed: u64,
) -> Result<CheckRecord> {
    let kernel = ConvolutionKernel::new(group, 4)?;
    let samples = sample_products(&kernel, trials, seed, 2)?;
    Ok(check_submultiplicative_on(group, sigma, &samples))
}

/// `‖λ ∗ μ‖_N ≤ ‖λ‖_N ‖μ‖_N`, the Banach bound with constant 1.
pub fn check_banach_submult_on(
    group: &PValuedGroup,
    n: u32,
    samples: &[(Distribution, Distribution, Distribution)],
) -> CheckRecord {
    let rec = CheckRecord::new(
        "norms/banach-submultiplicative",
        "|l * m|_N <= |l|_N |m|_N on the dual of the N-th strict neighborhood algebra",
    )
    .param("group", group.name())
    .param("N", n)
    .param("samples", samples.len());
    let polydisc_ok = group
        .check_polydisc_bound(n)
        .iter()
        .all(CheckRecord::passed);
    if !polydisc_ok {
        return rec.verdict(Verdict::RegimeUnmet);
    }
    submultiplicative_record(rec, samples, |l| l.dagger_norm(n).expect("N >= 1"))
}

pub fn check_banach_submult_n(
    group: &Arc<PValuedGroup>,
    n: u32,
    trials: usize,
    seed: u64,
) -> Result<CheckRecord> {
    let kernel = ConvolutionKernel::new(group, 4)?;
    let samples = sample_products(&kernel, trials, seed, 2)?;
    Ok(check_banach_submult_on(group, n, &samples))
}

fn lower_bound_verdict(rec: CheckRecord, exact: bool) -> CheckRecord {
    if rec.passed() && !exact {
        rec.verdict(Verdict::LowerBoundPass)
    } else {
        rec
    }
}

/// Per-`α` comparison of two coefficient weights on the stored support of `λ`.
fn per_alpha<F, G>(mut rec: CheckRecord, lambda: &Distribution, lhs: F, rhs: G) -> CheckRecord
where
    F: Fn(&MultiIndex, &Scalar) -> Scalar,
    G: Fn(&MultiIndex, &Scalar) -> Scalar,
{
    let p = lambda.group.prime();
    for (alpha, d) in &lambda.dcoeffs {
        let v = match valuation(d, p) {
            ExtRational::Finite(v) => v,
            ExtRational::Infinity => continue,
        };
        let (l, r) = (lhs(alpha, &v), rhs(alpha, &v));
        if l > r {
            rec = rec.fail(format!(
                "alpha {alpha}: p^{} > p^{}",
                format_rational(&l),
                format_rational(&r)
            ));
        }
    }
    let exact = lambda.exact;
    lower_bound_verdict(rec, exact)
}

/// `‖λ‖'_{s^{min ω}} ≤ ‖λ‖_s ≤ ‖λ‖'_{s^{max ω}}`, term by term.
pub fn check_sandwich(lambda: &Distribution, sigma: &Scalar) -> CheckRecord {
    let g = &lambda.group;
    let omega = g.omega().to_vec();
    let (lo, hi) = (g.min_omega(), g.max_omega());
    let rec = CheckRecord::new(
        "norms/sandwich",
        "|l|'_{s^min omega} <= |l|_s <= |l|'_{s^max omega}",
    )
    .param("group", g.name())
    .param("sigma", format_rational(sigma));
    let deg = |a: &MultiIndex| int(a.degree() as i64);
    let rec = per_alpha(rec, lambda, |a, v| -v - sigma * &lo * deg(a), |a, v| -v - sigma * a.weighted(&omega));
    per_alpha(rec, lambda, |a, v| -v - sigma * a.weighted(&omega), |a, v| -v - sigma * &hi * deg(a))
}

/// Inclusion of the dagger algebra into `D_s` for `s < θ^{1/min ω}`, checked as
/// `|d_α| s^{τα} ≤ |α! d_α| (s^{min ω} θ^{-1})^{|α|}` for each stored `α`.
pub fn check_contact_embedding(lambda: &Distribution, sigma: &Scalar) -> CheckRecord {
    let g = &lambda.group;
    let p = g.prime();
    let theta = p.theta_exponent();
    let lo = g.min_omega();
    let damping = &theta - sigma * &lo;
    let rec = CheckRecord::new(
        "embeddings/contact",
        "|d_a| s^{tau a} <= |a! d_a| (s^min omega / theta)^|a| when s < theta^{1/min omega}",
    )
    .param("group", g.name())
    .param("sigma", format_rational(sigma))
    .exponent("damping", &damping);
    if damping >= Scalar::zero() || *sigma > Scalar::one() || *sigma <= Scalar::zero() {
        return rec.verdict(Verdict::RegimeUnmet);
    }
    let omega = g.omega().to_vec();
    per_alpha(
        rec,
        lambda,
        |a, v| -v - sigma * a.weighted(&omega),
        |a, v| -v - a.factorial_valuation(p) + &damping * int(a.degree() as i64),
    )
}

/// Regime exponents for the two comparison directions at `(N, σ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRegime {
    /// `max_j (τ_{N,j} - σ min ω + 1/(p-1))`; the contraction `(B_N)' → D_s` needs `< 0`.
    pub contraction: Scalar,
    /// `max_j (σ max ω - τ_{N,j} - 1/(p-1))`; the map `D_s → (B_N)'` needs `< 0` and `σ ≤ 1`.
    pub continuity: Scalar,
    pub sigma_ok: bool,
}

impl ComparisonRegime {
    pub fn new(group: &PValuedGroup, n: u32, sigma: &Scalar) -> Result<Self> {
        let theta = group.prime().theta_exponent();
        let tau = group.neighborhood_params(n)?.tau;
        let lo = group.min_omega();
        let hi = group.max_omega();
        let contraction = tau
            .iter()
            .map(|t| t - sigma * &lo + &theta)
            .max()
            .expect("rank >= 1");
        let continuity = tau
            .iter()
            .map(|t| sigma * &hi - t - &theta)
            .max()
            .expect("rank >= 1");
        Ok(ComparisonRegime {
            contraction,
            continuity,
            sigma_ok: *sigma > Scalar::zero() && *sigma <= Scalar::one(),
        })
    }

    pub fn contraction_holds(&self) -> bool {
        self.sigma_ok && self.contraction < Scalar::zero()
    }

    pub fn continuity_holds(&self) -> bool {
        self.sigma_ok && self.continuity < Scalar::zero()
    }
}

/// `p^{num/den} ≤ m` decided exactly as `p^num ≤ m^den`.
fn p_power_at_most(p: u32, e: &Scalar, m: &BigInt) -> bool {
    if *e <= Scalar::zero() {
        return true;
    }
    let (num, den) = (e.numer(), e.denom());
    let num: u32 = num.try_into().expect("small exponent");
    let den: u32 = den.try_into().expect("small exponent");
    num_traits::pow(BigInt::from(p), num as usize) <= num_traits::pow(m.clone(), den as usize)
}

/// Both comparison maps at `(N, σ)` on the stored support of `λ`.
///
/// Contraction: `|d_α| s^{τα} ≤ |α! d_α| p^{-Σ τ_{N,i} α_i}`.
/// Continuity: `|α! d_α| p^{-τ_N α} ≤ Π(α_i+1)^C · |d_α| s^{τα} · Π_j (s^{-max ω} p^{-τ_{N,j}} θ)^{α_j}`
/// with `C = 1`, which holds because `p^{s_p(n)/(p-1)} ≤ n + 1`.
pub fn check_comparison_maps(lambda: &Distribution, n: u32, sigma: &Scalar) -> Result<Vec<CheckRecord>> {
    let g = &lambda.group;
    let p = g.prime();
    let regime = ComparisonRegime::new(g, n, sigma)?;
    let tau = g.neighborhood_params(n)?.tau;
    let omega = g.omega().to_vec();
    let theta = p.theta_exponent();
    let hi = g.max_omega();

    let base = |id: &str, anchor: &str| {
        CheckRecord::new(format!("embeddings/{id}"), anchor)
            .param("group", g.name())
            .param("N", n)
            .param("sigma", format_rational(sigma))
    };
    let contraction = base(
        "contraction",
        "(B_N)' -> D_s, m_a -> b^a is a contraction when r_j s^min omega / theta < 1",
    )
    .exponent("regime", &regime.contraction);
    let contraction = if regime.contraction_holds() {
        per_alpha(
            contraction,
            lambda,
            |a, v| -v - sigma * a.weighted(&omega),
            |a, v| -v - a.factorial_valuation(p) - a.weighted(&tau),
        )
    } else {
        contraction.verdict(Verdict::RegimeUnmet)
    };

    let mut continuity = base(
        "continuity",
        "D_s -> (B_N)', b^a -> m_a is bounded by prod(a_i+1)^C when s^-max omega / (r_j theta) < 1",
    )
    .exponent("regime", &regime.continuity)
    .param("C", 1);
    if regime.continuity_holds() {
        let damping: Vec<Scalar> = tau.iter().map(|t| sigma * &hi - t - &theta).collect();
        let mut worst: Option<Scalar> = None;
        for (alpha, d) in &lambda.dcoeffs {
            let v = match valuation(d, p) {
                ExtRational::Finite(v) => v,
                ExtRational::Infinity => continue,
            };
            let lhs = -&v - alpha.factorial_valuation(p) - alpha.weighted(&tau);
            let rhs = -&v - sigma * alpha.weighted(&omega) + alpha.weighted(&damping);
            let e = &lhs - &rhs;
            let m: BigInt = alpha.entries().iter().map(|&a| BigInt::from(a + 1)).product();
            if !p_power_at_most(p.get(), &e, &m) {
                continuity = continuity.fail(format!(
                    "alpha {alpha}: p^{} > {m}",
                    format_rational(&e)
                ));
            }
            if worst.as_ref().is_none_or(|w| e > *w) {
                worst = Some(e);
            }
        }
        if let Some(w) = worst {
            continuity = continuity.exponent("max_log_factor", &w);
        }
        let exact = lambda.exact;
        continuity = lower_bound_verdict(continuity, exact);
    } else {
        continuity = continuity.verdict(Verdict::RegimeUnmet);
    }
    Ok(vec![contraction, continuity])
}

/// Smallest exponent `e_n = s_p(n)/(p-1)` bound behind `C = 1`: `p^{e_n} ≤ n + 1`.
pub fn digit_sum_bound_holds(n: u64, p: crate::padic::Prime) -> bool {
    let e = crate::padic::ratio(digit_sum(n, p) as i64, p.get() as i64 - 1);
    p_power_at_most(p.get(), &e, &BigInt::from(n + 1))
}

/// `‖λ‖_N ≤ ‖λ‖_{N+1}`, term by term, for `N` in `ns`.
pub fn check_norm_tower(lambda: &Distribution, ns: std::ops::RangeInclusive<u32>) -> Result<CheckRecord> {
    let g = &lambda.group;
    let p = g.prime();
    let mut rec = CheckRecord::new("norms/tower", "|l|_N <= |l|_{N+1}")
        .param("group", g.name())
        .param("N", format!("{}..{}", ns.start(), ns.end()));
    for n in ns {
        let t0 = g.neighborhood_params(n)?.tau;
        let t1 = g.neighborhood_params(n + 1)?.tau;
        rec = per_alpha(
            rec,
            lambda,
            |a, v| -v - a.factorial_valuation(p) - a.weighted(&t0),
            |a, v| -v - a.factorial_valuation(p) - a.weighted(&t1),
        );
    }
    Ok(rec)
}
