//! Exact scalars in `Q ⊂ Q_p`, p-adic valuations, p-power magnitudes and the
//! combinatorial tables (factorials, Stirling numbers) shared by the other modules.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

/// An exact rational, read as an element of `Q_p`.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `"num/den"`; the denominator is always written.
pub fn format_rational(q: &Scalar) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Scalar> {
    let bad = || Error::BadRational(text.to_string());
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Scalar::new(n, d))
        }
        None => Ok(Scalar::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

/// A validated rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        let is_prime = p >= 2 && (2..).take_while(|d: &u32| d * d <= p).all(|d| !p.is_multiple_of(d));
        if is_prime {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p as u64))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `1/(p-1)`, the valuation threshold of the exponential.
    pub fn theta_exponent(self) -> Scalar {
        ratio(1, self.0 as i64 - 1)
    }

    pub fn pow(self, k: u32) -> BigInt {
        num_traits::pow(self.big(), k as usize)
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A rational number or `+∞`; the codomain of valuations and of `ω`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    Finite(Scalar),
    Infinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn add(&self, other: &ExtRational) -> ExtRational {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => f.write_str(&format_rational(q)),
            ExtRational::Infinity => f.write_str("inf"),
        }
    }
}

/// `v_p(n)` for a nonzero integer.
pub fn valuation_int(n: &BigInt, p: Prime) -> u64 {
    debug_assert!(!n.is_zero());
    let p = p.big();
    let mut m = n.abs();
    let mut v = 0;
    // strip p^8 at a time first; cheap on large factorials
    let p8 = num_traits::pow(p.clone(), 8);
    loop {
        let (q, r) = m.div_rem(&p8);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 8;
    }
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    v
}

/// `v_p(x)`, with `v_p(0) = +∞`.
pub fn valuation(x: &Scalar, p: Prime) -> ExtRational {
    if x.is_zero() {
        return ExtRational::Infinity;
    }
    let v = valuation_int(x.numer(), p) as i64 - valuation_int(x.denom(), p) as i64;
    ExtRational::Finite(int(v))
}

/// Integer-valued `v_p` for nonzero scalars; panics on zero.
pub fn valuation_i64(x: &Scalar, p: Prime) -> i64 {
    assert!(!x.is_zero(), "valuation of zero is infinite");
    valuation_int(x.numer(), p) as i64 - valuation_int(x.denom(), p) as i64
}

/// Base-p digit sum `s_p(n)`.
pub fn digit_sum(n: u64, p: Prime) -> u64 {
    let p = p.get() as u64;
    let mut n = n;
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// `v_p(n!) = (n - s_p(n))/(p - 1)`.
pub fn factorial_valuation(n: u64, p: Prime) -> Scalar {
    ratio((n - digit_sum(n, p)) as i64, p.get() as i64 - 1)
}

/// A magnitude `p^e` stored by its exponent, or the magnitude of zero.
///
/// Ordered with `Zero` below every finite magnitude; multiplication adds exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogMag {
    Zero,
    Pow(Scalar),
}

impl LogMag {
    pub fn one() -> Self {
        LogMag::Pow(Scalar::zero())
    }

    pub fn pow(e: Scalar) -> Self {
        LogMag::Pow(e)
    }

    /// `|x|_p = p^{-v_p(x)}`.
    pub fn of(x: &Scalar, p: Prime) -> Self {
        match valuation(x, p) {
            ExtRational::Infinity => LogMag::Zero,
            ExtRational::Finite(v) => LogMag::Pow(-v),
        }
    }

    pub fn exponent(&self) -> Option<&Scalar> {
        match self {
            LogMag::Zero => None,
            LogMag::Pow(e) => Some(e),
        }
    }

    /// Multiplies by `p^e`.
    pub fn shift(&self, e: &Scalar) -> Self {
        match self {
            LogMag::Zero => LogMag::Zero,
            LogMag::Pow(x) => LogMag::Pow(x + e),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LogMag::Zero)
    }
}

impl Mul for LogMag {
    type Output = LogMag;
    fn mul(self, rhs: LogMag) -> LogMag {
        &self * &rhs
    }
}

impl Mul for &LogMag {
    type Output = LogMag;
    // magnitudes are stored by exponent, so multiplying adds
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &LogMag) -> LogMag {
        match (self, rhs) {
            (LogMag::Pow(a), LogMag::Pow(b)) => LogMag::Pow(a + b),
            _ => LogMag::Zero,
        }
    }
}

impl fmt::Display for LogMag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogMag::Zero => f.write_str("0"),
            LogMag::Pow(e) => write!(f, "p^({})", format_rational(e)),
        }
    }
}

/// Reduces a p-integral rational modulo `p^k`, returning the representative in `[0, p^k)`.
pub fn reduce_mod_pk(x: &Scalar, p: Prime, k: u32) -> Result<BigInt> {
    let modulus = p.pow(k);
    let den = x.denom().mod_floor(&modulus);
    if k > 0 && den.gcd(&p.big()) != BigInt::one() {
        return Err(Error::NotIntegral(format_rational(x)));
    }
    let inv = mod_inverse(&den, &modulus).ok_or_else(|| Error::NotIntegral(format_rational(x)))?;
    Ok((x.numer() * inv).mod_floor(&modulus))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Memoized Stirling numbers of the second kind `s_{n,k}` (monomials in falling powers)
/// and signed falling-factorial coefficients `a_{n,k}` (falling powers in monomials).
#[derive(Debug)]
pub struct StirlingTable {
    cap: usize,
    second: Vec<Vec<BigInt>>,
    falling: Vec<Vec<BigInt>>,
    factorials: Vec<BigInt>,
}

pub const DEFAULT_STIRLING_CAP: usize = 24;

static TABLE: RwLock<Option<Arc<StirlingTable>>> = RwLock::new(None);

impl StirlingTable {
    pub fn new(cap: usize) -> Self {
        let mut second = vec![vec![BigInt::zero(); cap + 1]; cap + 1];
        let mut falling = vec![vec![BigInt::zero(); cap + 1]; cap + 1];
        second[0][0] = BigInt::one();
        falling[0][0] = BigInt::one();
        for n in 1..=cap {
            for k in 1..=n {
                second[n][k] = BigInt::from(k) * &second[n - 1][k] + &second[n - 1][k - 1];
                falling[n][k] = &falling[n - 1][k - 1] - BigInt::from(n - 1) * &falling[n - 1][k];
            }
        }
        let mut factorials = vec![BigInt::one(); cap + 1];
        for n in 1..=cap {
            factorials[n] = &factorials[n - 1] * BigInt::from(n);
        }
        StirlingTable {
            cap,
            second,
            falling,
            factorials,
        }
    }

    /// Shared table covering at least `cap`; grows on demand.
    pub fn shared(cap: usize) -> Arc<StirlingTable> {
        if let Some(t) = TABLE.read().expect("stirling table lock").as_ref() {
            if t.cap >= cap {
                return Arc::clone(t);
            }
        }
        let mut guard = TABLE.write().expect("stirling table lock");
        match guard.as_ref() {
            Some(t) if t.cap >= cap => Arc::clone(t),
            _ => {
                let t = Arc::new(StirlingTable::new(cap.max(DEFAULT_STIRLING_CAP)));
                *guard = Some(Arc::clone(&t));
                t
            }
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `s_{n,k}`, zero above the diagonal.
    pub fn second(&self, n: usize, k: usize) -> &BigInt {
        &self.second[n][k]
    }

    /// `a_{n,k}`: the coefficient of `x^k` in `x(x-1)...(x-n+1)`.
    pub fn falling(&self, n: usize, k: usize) -> &BigInt {
        &self.falling[n][k]
    }

    pub fn factorial(&self, n: usize) -> &BigInt {
        &self.factorials[n]
    }
}

fn check_triangle(upper: usize, lower: usize) -> Result<()> {
    if lower > upper {
        return Err(Error::IndexOutOfRange(format!("need {lower} <= {upper}")));
    }
    Ok(())
}

/// Stirling number of the second kind `s_{β,α}` with `x^β = Σ s_{β,α} x^{(α)}`.
pub fn stirling_second(beta: usize, alpha: usize) -> Result<BigInt> {
    check_triangle(beta, alpha)?;
    Ok(StirlingTable::shared(beta).second(beta, alpha).clone())
}

/// `a_{α,β}`, the coefficient of `x^β` in the falling power `x^{(α)}`.
pub fn falling_coeff(alpha: usize, beta: usize) -> Result<BigInt> {
    check_triangle(alpha, beta)?;
    Ok(StirlingTable::shared(alpha).falling(alpha, beta).clone())
}

/// An exponent vector `α ∈ N_0^d`.
///
/// Ordered by total degree, then lexicographically, so maps keyed by multi-indices
/// iterate in a fixed graded order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        MultiIndex(v)
    }

    pub fn split(&self, at: usize) -> (MultiIndex, MultiIndex) {
        (MultiIndex(self.0[..at].to_vec()), MultiIndex(self.0[at..].to_vec()))
    }

    /// `Σ w_i α_i`.
    pub fn weighted(&self, weights: &[Scalar]) -> Scalar {
        self.0
            .iter()
            .zip(weights)
            .filter(|(&a, _)| a != 0)
            .map(|(&a, w)| w * int(a as i64))
            .sum()
    }

    /// `v_p(α!) = Σ v_p(α_i!)`.
    pub fn factorial_valuation(&self, p: Prime) -> Scalar {
        self.0.iter().map(|&a| factorial_valuation(a as u64, p)).sum()
    }

    /// `α! = Π α_i!` as an exact scalar.
    pub fn factorial(&self) -> Scalar {
        let t = StirlingTable::shared(self.0.iter().copied().max().unwrap_or(0) as usize);
        Scalar::from_integer(self.0.iter().map(|&a| t.factorial(a as usize).clone()).product())
    }

    /// All multi-indices of dimension `dim` with total degree at most `cap`, in graded order.
    pub fn up_to(dim: usize, cap: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for deg in 0..=cap {
            let mut cur = vec![0u32; dim];
            fill_degree(&mut cur, 0, deg, &mut out);
        }
        out.sort();
        out
    }

    /// All `β` with `β ≤ self` componentwise.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &a in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=a).map(move |b| {
                        let mut v = prefix.clone();
                        v.push(b);
                        v
                    })
                })
                .collect();
        }
        let mut out: Vec<MultiIndex> = out.into_iter().map(MultiIndex).collect();
        out.sort();
        out
    }
}

fn fill_degree(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill_degree(cur, pos + 1, remaining - a, out);
    }
    cur[pos] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `binom(x, α) = Π binom(x_i, α_i)` as an exact polynomial in `α.dim()` variables.
pub fn binomial_poly(alpha: &MultiIndex) -> Series {
    let dim = alpha.dim();
    let t = StirlingTable::shared(alpha.entries().iter().copied().max().unwrap_or(0) as usize);
    let mut out = Series::constant(dim, Scalar::one(), alpha.degree());
    for (i, &a) in alpha.entries().iter().enumerate() {
        let terms = (0..=a as usize).filter_map(|k| {
            let c = t.falling(a as usize, k);
            (!c.is_zero()).then(|| {
                let mut idx = vec![0; dim];
                idx[i] = k as u32;
                (
                    MultiIndex::new(idx),
                    Scalar::new(c.clone(), t.factorial(a as usize).clone()),
                )
            })
        });
        let factor = Series::from_terms(dim, alpha.degree(), terms, true)
            .expect("binomial factor within cap");
        out = out.multiply(&factor).expect("same dimension");
    }
    out
}

/// Exact `binom(x, k)` for rational `x`.
pub fn binomial_scalar(x: &Scalar, k: u32) -> Scalar {
    let mut acc = Scalar::one();
    for j in 0..k {
        acc = acc * (x - int(j as i64)) / int(j as i64 + 1);
    }
    acc
}
