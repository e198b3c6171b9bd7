//! Saturated p-valued groups given by an ordered basis and a polynomial group law.
//!
//! A point `g = g_1^{x_1} ... g_d^{x_d}` is stored by its coordinates `x ∈ Z_p^d`.
//! The law `F` gives the coordinates of a product, `I` those of an inverse. Built-in
//! groups also carry a coordinate model (vector addition, unitriangular matrices) used
//! as an independent multiplication oracle.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{
    format_rational, int, parse_rational, reduce_mod_pk, valuation, ExtRational, MultiIndex,
    Prime, Scalar,
};
use crate::report::{CheckRecord, Verdict};
use crate::series::{RadiusVector, Series, TermRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    /// `Z_p^d` under addition.
    Abelian,
    /// Unitriangular 3x3 matrices `(a, b, c)` with entries in `pZ_p`.
    Heisenberg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPoint(Vec<Scalar>);

impl GroupPoint {
    pub fn identity(dim: usize) -> Self {
        GroupPoint(vec![Scalar::zero(); dim])
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.0
    }
}

impl std::fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Radii of the `N`-th strict neighborhood group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodParams {
    pub n: u32,
    /// `τ_{N,i} = (ω(g_i) - 1/(p-1))/(N+1)`
    pub tau: Vec<Scalar>,
    /// Radii for the `2d` law variables: `τ_N` on both blocks.
    pub rho: Vec<Scalar>,
}

impl NeighborhoodParams {
    pub fn tau_radius(&self) -> RadiusVector {
        RadiusVector::new(self.tau.clone()).expect("tau is positive")
    }

    pub fn rho_radius(&self) -> RadiusVector {
        RadiusVector::new(self.rho.clone()).expect("rho is positive")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PValuedGroup {
    name: String,
    p: Prime,
    d: usize,
    omega: Vec<Scalar>,
    law: Vec<Series>,
    inverse: Vec<Series>,
    model: Option<ModelTag>,
}

/// On-disk group description. Rationals are `"num/den"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfig {
    pub name: String,
    pub p: u32,
    pub d: usize,
    pub omega: Vec<String>,
    #[serde(rename = "F")]
    pub law: Vec<Vec<TermRecord>>,
    #[serde(rename = "I")]
    pub inverse: Vec<Vec<TermRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelTag>,
}

fn canonical_omega(p: Prime) -> Scalar {
    if p.get() == 2 {
        int(2)
    } else {
        int(1)
    }
}

fn linear(dim: usize, terms: &[(usize, i64)]) -> Series {
    Series::polynomial(
        dim,
        terms.iter().map(|&(i, c)| (MultiIndex::unit(dim, i), int(c))),
    )
    .expect("well-formed")
}

fn mono(entries: Vec<u32>, c: Scalar) -> (MultiIndex, Scalar) {
    (MultiIndex::new(entries), c)
}

impl PValuedGroup {
    /// `Z_p^d` with the canonical valuation: `ω = 1` for odd `p`, `ω = 2` for `p = 2`.
    pub fn builtin_abelian(p: Prime, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::ParameterOutOfRange("rank must be positive".into()));
        }
        let law = (0..d).map(|i| linear(2 * d, &[(i, 1), (d + i, 1)])).collect();
        let inverse = (0..d).map(|i| linear(d, &[(i, -1)])).collect();
        PValuedGroup::from_parts(
            format!("abelian(p={p},d={d})"),
            p,
            vec![canonical_omega(p); d],
            law,
            inverse,
            Some(ModelTag::Abelian),
        )
    }

    /// The Heisenberg group of unitriangular matrices over `pZ_p`, basis
    /// `g_1 = (p,0,0)`, `g_2 = (0,p,0)`, `g_3 = (0,0,p)`, all with `ω = 1`.
    pub fn builtin_heisenberg(p: Prime) -> Result<Self> {
        if p.get() == 2 {
            return Err(Error::ParameterOutOfRange(
                "heisenberg needs p >= 3 (omega = 1 is not a p-valuation at p = 2)".into(),
            ));
        }
        let pp = Scalar::from_integer(p.big());
        let f3 = Series::polynomial(
            6,
            [
                mono(vec![0, 0, 1, 0, 0, 0], int(1)),
                mono(vec![0, 0, 0, 0, 0, 1], int(1)),
                mono(vec![0, 1, 0, 1, 0, 0], -pp.clone()),
            ],
        )?;
        let i3 = Series::polynomial(
            3,
            [mono(vec![0, 0, 1], int(-1)), mono(vec![1, 1, 0], -pp)],
        )?;
        let law = vec![linear(6, &[(0, 1), (3, 1)]), linear(6, &[(1, 1), (4, 1)]), f3];
        let inverse = vec![linear(3, &[(0, -1)]), linear(3, &[(1, -1)]), i3];
        PValuedGroup::from_parts(
            format!("heisenberg(p={p})"),
            p,
            vec![int(1); 3],
            law,
            inverse,
            Some(ModelTag::Heisenberg),
        )
    }

    /// Parses a builtin tag: `abelian:<p>:<d>` or `heisenberg:<p>`.
    pub fn builtin(tag: &str) -> Result<Self> {
        let parts: Vec<&str> = tag.split(':').collect();
        let prime = |s: &str| -> Result<Prime> {
            Prime::new(s.parse().map_err(|_| Error::Config(format!("bad prime in {tag:?}")))?)
        };
        match parts.as_slice() {
            ["abelian", p, d] => PValuedGroup::builtin_abelian(
                prime(p)?,
                d.parse().map_err(|_| Error::Config(format!("bad rank in {tag:?}")))?,
            ),
            ["heisenberg", p] => PValuedGroup::builtin_heisenberg(prime(p)?),
            _ => Err(Error::Config(format!(
                "unknown builtin {tag:?} (expected abelian:<p>:<d> or heisenberg:<p>)"
            ))),
        }
    }

    pub fn from_parts(
        name: String,
        p: Prime,
        omega: Vec<Scalar>,
        law: Vec<Series>,
        inverse: Vec<Series>,
        model: Option<ModelTag>,
    ) -> Result<Self> {
        let g = PValuedGroup {
            name,
            p,
            d: omega.len(),
            omega,
            law,
            inverse,
            model,
        };
        let problems = g.violations();
        if problems.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGroup(problems))
        }
    }

    /// Every violated structural invariant, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let d = self.d;
        let p = self.p;
        if d == 0 {
            out.push("rank d must be positive".to_string());
        }
        if self.law.len() != d {
            out.push(format!("F has {} components, expected {d}", self.law.len()));
        }
        if self.inverse.len() != d {
            out.push(format!("I has {} components, expected {d}", self.inverse.len()));
        }
        let t = p.theta_exponent();
        for (i, w) in self.omega.iter().enumerate() {
            if *w <= t {
                out.push(format!(
                    "omega(g_{}) = {} must exceed 1/(p-1)",
                    i + 1,
                    format_rational(w)
                ));
            }
            if w - &t > Scalar::one() {
                out.push(format!(
                    "omega(g_{}) - 1/(p-1) = {} exceeds 1 (not saturated)",
                    i + 1,
                    format_rational(&(w - &t))
                ));
            }
        }
        for (name, family, dim) in [("F", &self.law, 2 * d), ("I", &self.inverse, d)] {
            for (i, f) in family.iter().enumerate() {
                if f.dim() != dim {
                    out.push(format!("{name}_{} has {} variables, expected {dim}", i + 1, f.dim()));
                    continue;
                }
                if !f.is_exact() {
                    out.push(format!("{name}_{} is not an exact polynomial", i + 1));
                }
                for (alpha, c) in f.terms() {
                    if let ExtRational::Finite(v) = valuation(c, p) {
                        if v < Scalar::zero() {
                            out.push(format!(
                                "{name}_{} coefficient {} at {alpha} is not in Z_p",
                                i + 1,
                                format_rational(c)
                            ));
                        }
                    }
                }
            }
        }
        if self.law.len() == d && self.law.iter().all(|f| f.dim() == 2 * d) {
            for (i, f) in self.law.iter().enumerate() {
                let xs: Vec<Option<Scalar>> = (0..d).map(|_| None).collect();
                let zeros: Vec<Option<Scalar>> = (0..d).map(|_| Some(Scalar::zero())).collect();
                let right = [xs.clone(), zeros.clone()].concat();
                let left = [zeros, xs].concat();
                let target = Series::var(d, i, f.cap().max(1));
                for (side, fixed) in [("F(X,0) = X", right), ("F(0,Y) = Y", left)] {
                    match f.specialize(&fixed) {
                        Ok(s) if s.first_difference(&target, u32::MAX).is_none() => {}
                        Ok(_) => out.push(format!("F_{} violates the unit axiom {side}", i + 1)),
                        Err(_) => {}
                    }
                }
            }
        }
        for (i, f) in self.inverse.iter().enumerate() {
            if !f.constant_term().is_zero() {
                out.push(format!("I_{} has a nonzero constant term", i + 1));
            }
        }
        match self.model {
            Some(ModelTag::Heisenberg) if d != 3 || p.get() == 2 => {
                out.push("heisenberg model needs d = 3 and p >= 3".to_string())
            }
            _ => {}
        }
        out
    }

    pub fn load_group(text: &str) -> Result<Self> {
        let config: GroupConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        PValuedGroup::from_config(&config)
    }

    pub fn from_config(config: &GroupConfig) -> Result<Self> {
        let p = Prime::new(config.p)?;
        let d = config.d;
        let mut problems = Vec::new();
        if config.omega.len() != d {
            problems.push(format!("omega has {} entries, expected {d}", config.omega.len()));
        }
        let omega = config
            .omega
            .iter()
            .map(|w| parse_rational(w))
            .collect::<Result<Vec<_>>>()?;
        let read = |family: &[Vec<TermRecord>], dim: usize, name: &str| -> Result<Vec<Series>> {
            family
                .iter()
                .enumerate()
                .map(|(i, recs)| {
                    if let Some(r) = recs.iter().find(|r| r.index.len() != dim) {
                        return Err(Error::Config(format!(
                            "{name}_{} term index {:?} should have {dim} entries",
                            i + 1,
                            r.index
                        )));
                    }
                    Series::from_records(dim, recs)
                })
                .collect()
        };
        let law = read(&config.law, 2 * d, "F")?;
        let inverse = read(&config.inverse, d, "I")?;
        let g = PValuedGroup {
            name: config.name.clone(),
            p,
            d,
            omega,
            law,
            inverse,
            model: config.model,
        };
        problems.extend(g.violations());
        if problems.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGroup(problems))
        }
    }

    pub fn to_config(&self) -> GroupConfig {
        GroupConfig {
            name: self.name.clone(),
            p: self.p.get(),
            d: self.d,
            omega: self.omega.iter().map(format_rational).collect(),
            law: self.law.iter().map(Series::to_records).collect(),
            inverse: self.inverse.iter().map(Series::to_records).collect(),
            model: self.model,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn omega(&self) -> &[Scalar] {
        &self.omega
    }

    pub fn law(&self) -> &[Series] {
        &self.law
    }

    pub fn inverse_law(&self) -> &[Series] {
        &self.inverse
    }

    pub fn model(&self) -> Option<ModelTag> {
        self.model
    }

    pub fn min_omega(&self) -> Scalar {
        self.omega.iter().min().cloned().expect("rank >= 1")
    }

    pub fn max_omega(&self) -> Scalar {
        self.omega.iter().max().cloned().expect("rank >= 1")
    }

    pub fn is_equi_valued(&self) -> bool {
        self.omega.iter().all(|w| *w == self.omega[0])
    }

    /// Maximal total degree of the law polynomials.
    pub fn law_degree(&self) -> u32 {
        self.law.iter().filter_map(Series::degree).max().unwrap_or(1).max(1)
    }

    /// Replaces one law polynomial without re-validating; for building broken groups in checks.
    pub fn with_law_component(&self, i: usize, f: Series) -> Self {
        let mut g = self.clone();
        g.law[i] = f;
        g.name = format!("{}[F_{} replaced]", self.name, i + 1);
        g
    }

    pub fn point(&self, coords: Vec<Scalar>) -> Result<GroupPoint> {
        if coords.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: coords.len(),
            });
        }
        if let Some(bad) = coords
            .iter()
            .find(|c| matches!(valuation(c, self.p), ExtRational::Finite(ref v) if *v < Scalar::zero()))
        {
            return Err(Error::NotIntegral(format_rational(bad)));
        }
        Ok(GroupPoint(coords))
    }

    pub fn point_from_ints(&self, coords: &[i64]) -> Result<GroupPoint> {
        self.point(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn identity(&self) -> GroupPoint {
        GroupPoint::identity(self.d)
    }

    /// `x · y` through the law `F`.
    pub fn multiply(&self, x: &GroupPoint, y: &GroupPoint) -> GroupPoint {
        let args = [x.coords(), y.coords()].concat();
        GroupPoint(
            self.law
                .iter()
                .map(|f| f.evaluate(&args).expect("law has 2d variables"))
                .collect(),
        )
    }

    /// `x^{-1}` through `I`.
    pub fn invert(&self, x: &GroupPoint) -> GroupPoint {
        GroupPoint(
            self.inverse
                .iter()
                .map(|f| f.evaluate(x.coords()).expect("inverse has d variables"))
                .collect(),
        )
    }

    pub fn power(&self, x: &GroupPoint, n: u32) -> GroupPoint {
        (0..n).fold(self.identity(), |acc, _| self.multiply(&acc, x))
    }

    /// `[x, y] = x^{-1} y^{-1} x y`.
    pub fn commutator(&self, x: &GroupPoint, y: &GroupPoint) -> GroupPoint {
        let xi = self.invert(x);
        let yi = self.invert(y);
        let a = self.multiply(&xi, &yi);
        let b = self.multiply(&a, x);
        self.multiply(&b, y)
    }

    /// `ω(g_1^{x_1} ... g_d^{x_d}) = min_i (ω(g_i) + v(x_i))`, `+∞` at the identity.
    pub fn omega_of(&self, x: &GroupPoint) -> ExtRational {
        x.coords()
            .iter()
            .zip(&self.omega)
            .map(|(c, w)| valuation(c, self.p).add(&ExtRational::Finite(w.clone())))
            .min()
            .unwrap_or(ExtRational::Infinity)
    }

    pub fn neighborhood_params(&self, n: u32) -> Result<NeighborhoodParams> {
        if n == 0 {
            return Err(Error::ParameterOutOfRange("N must be >= 1".into()));
        }
        let t = self.p.theta_exponent();
        let tau: Vec<Scalar> = self
            .omega
            .iter()
            .map(|w| (w - &t) / int(n as i64 + 1))
            .collect();
        let rho = [tau.clone(), tau.clone()].concat();
        Ok(NeighborhoodParams { n, tau, rho })
    }

    /// Product through the coordinate model, independently of `F`.
    pub fn model_multiply(&self, x: &GroupPoint, y: &GroupPoint) -> Option<GroupPoint> {
        let p = Scalar::from_integer(self.p.big());
        match self.model? {
            ModelTag::Abelian => Some(GroupPoint(
                x.coords().iter().zip(y.coords()).map(|(a, b)| a + b).collect(),
            )),
            ModelTag::Heisenberg => {
                let a = heisenberg_matrix(x.coords(), &p);
                let b = heisenberg_matrix(y.coords(), &p);
                let prod = [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2] + &a[0] * &b[1]];
                Some(GroupPoint(heisenberg_coords(&prod, &p)))
            }
        }
    }

    pub fn model_invert(&self, x: &GroupPoint) -> Option<GroupPoint> {
        let p = Scalar::from_integer(self.p.big());
        match self.model? {
            ModelTag::Abelian => Some(GroupPoint(x.coords().iter().map(|a| -a).collect())),
            ModelTag::Heisenberg => {
                let a = heisenberg_matrix(x.coords(), &p);
                let inv = [-&a[0], -&a[1], -&a[2] + &a[0] * &a[1]];
                Some(GroupPoint(heisenberg_coords(&inv, &p)))
            }
        }
    }

    /// Seeded points with coordinates in `[0, p^M)`, valuations spread over `0..=3`.
    pub fn sample_points(&self, count: usize, seed: u64, precision: u32) -> Result<Vec<GroupPoint>> {
        let modulus = (self.p.get() as u64)
            .checked_pow(precision)
            .filter(|m| *m < (1 << 62))
            .ok_or_else(|| Error::ParameterOutOfRange(format!("p^{precision} too large")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = self.p.get() as u64;
        let points = (0..count)
            .map(|_| {
                let coords = (0..self.d)
                    .map(|_| {
                        let k = rng.gen_range(0..=3u32.min(precision));
                        let scale = p.pow(k);
                        let unit = rng.gen_range(0..modulus / scale);
                        Scalar::from_integer(BigInt::from(unit * scale))
                    })
                    .collect();
                GroupPoint(coords)
            })
            .collect();
        Ok(points)
    }

    /// Checks associativity, the two unit laws and the two inverse laws as polynomial
    /// identities, truncated at total degree `cap` where composition requires it.
    pub fn check_formal_group_axioms(&self, cap: u32) -> Vec<CheckRecord> {
        let d = self.d;
        let record = |id: &str, anchor: &str| {
            CheckRecord::new(format!("group-axioms/{id}"), anchor)
                .param("group", &self.name)
                .param("cap", cap)
        };
        let mut out = Vec::new();

        let assoc = record("associativity", "F(F(X,Y),Z) = F(X,F(Y,Z)) coefficientwise");
        out.push(match self.associativity_witness(cap) {
            Ok(None) => assoc,
            Ok(Some(w)) => assoc.fail(w),
            Err(e) => assoc.fail(e.to_string()),
        });

        let vars_d: Vec<Series> = (0..d).map(|j| Series::var(d, j, cap)).collect();
        let zeros: Vec<Series> = (0..d).map(|_| Series::zero(d, cap)).collect();
        for (id, anchor, args) in [
            ("right-unit", "F(X,0) = X", [vars_d.clone(), zeros.clone()].concat()),
            ("left-unit", "F(0,Y) = Y", [zeros.clone(), vars_d.clone()].concat()),
        ] {
            let mut rec = record(id, anchor);
            for (i, f) in self.law.iter().enumerate() {
                match f.substitute(&args) {
                    Ok(s) => {
                        let target = Series::var(d, i, cap);
                        if let Some((a, x, y)) = s.first_difference(&target, cap) {
                            rec = rec.fail(coefficient_witness(i, &a, &x, &y));
                        }
                    }
                    Err(e) => rec = rec.fail(format!("F_{}: {e}", i + 1)),
                }
            }
            out.push(rec);
        }

        let inv: Vec<Series> = self
            .inverse
            .iter()
            .map(|f| f.with_cap(cap))
            .collect::<Result<_>>()
            .unwrap_or_default();
        for (id, anchor, left_inverse) in [
            ("right-inverse", "F(X,I(X)) = 0", false),
            ("left-inverse", "F(I(X),X) = 0", true),
        ] {
            let mut rec = record(id, anchor);
            if inv.len() != d {
                out.push(rec.fail("inverse polynomials unavailable"));
                continue;
            }
            let args = if left_inverse {
                [inv.clone(), vars_d.clone()].concat()
            } else {
                [vars_d.clone(), inv.clone()].concat()
            };
            for (i, f) in self.law.iter().enumerate() {
                match f.substitute(&args) {
                    Ok(s) => {
                        if let Some((a, x, y)) = s.first_difference(&Series::zero(d, cap), cap) {
                            rec = rec.fail(coefficient_witness(i, &a, &x, &y));
                        }
                    }
                    Err(e) => rec = rec.fail(format!("F_{}: {e}", i + 1)),
                }
            }
            out.push(rec);
        }
        out
    }

    fn associativity_witness(&self, cap: u32) -> Result<Option<String>> {
        let d = self.d;
        let lift = |f: &Series, offset: usize| -> Result<Series> {
            let map: Vec<usize> = (0..2 * d).map(|j| j + offset).collect();
            f.rename(3 * d, &map)?.with_cap(cap)
        };
        let var = |j: usize| Series::var(3 * d, j, cap);
        let xy: Vec<Series> = self.law.iter().map(|f| lift(f, 0)).collect::<Result<_>>()?;
        let yz: Vec<Series> = self.law.iter().map(|f| lift(f, d)).collect::<Result<_>>()?;
        let left_args = [xy, (2 * d..3 * d).map(var).collect()].concat();
        let right_args = [(0..d).map(var).collect(), yz].concat();
        for (i, f) in self.law.iter().enumerate() {
            let lhs = f.substitute(&left_args)?;
            let rhs = f.substitute(&right_args)?;
            let upto = lhs.cap().min(rhs.cap());
            if let Some((a, x, y)) = lhs.first_difference(&rhs, upto) {
                return Ok(Some(coefficient_witness(i, &a, &x, &y)));
            }
        }
        Ok(None)
    }

    /// Compares `F` and `I` with the coordinate model on seeded samples.
    pub fn check_model_consistency(&self, samples: usize, seed: u64, precision: u32) -> CheckRecord {
        let mut rec = CheckRecord::new(
            "group-axioms/model-consistency",
            "coordinate law F and inverse I agree with the group model on sampled points",
        )
        .param("group", &self.name)
        .param("samples", samples)
        .param("seed", seed)
        .param("precision", precision);
        if self.model.is_none() {
            return rec.verdict(Verdict::RegimeUnmet);
        }
        let points = match self.sample_points(samples + 1, seed, precision) {
            Ok(p) => p,
            Err(e) => return rec.fail(e.to_string()),
        };
        for w in points.windows(2) {
            let (x, y) = (&w[0], &w[1]);
            let via_law = self.multiply(x, y);
            let via_model = self.model_multiply(x, y).expect("model present");
            if via_law != via_model {
                rec = rec.fail(format!("{x} * {y}: law {via_law}, model {via_model}"));
            }
            if self.invert(x) != self.model_invert(x).expect("model present") {
                rec = rec.fail(format!("inverse of {x} disagrees"));
            }
        }
        rec
    }

    /// Seeded checks of `ω(xy^{-1}) ≥ min(ω(x), ω(y))`, `ω([x,y]) ≥ ω(x) + ω(y)`
    /// and `ω(x^p) = ω(x) + 1`.
    pub fn check_pvaluation(&self, samples: usize, seed: u64, precision: u32) -> Vec<CheckRecord> {
        let base = |id: &str, anchor: &str| {
            CheckRecord::new(format!("pvaluation/{id}"), anchor)
                .param("group", &self.name)
                .param("samples", samples)
                .param("seed", seed)
                .param("precision", precision)
        };
        let mut ultra = base("ultrametric", "omega(x y^-1) >= min(omega(x), omega(y))");
        let mut comm = base("commutator", "omega([x,y]) >= omega(x) + omega(y)");
        let mut power = base("p-power", "omega(x^p) = omega(x) + 1");
        let points = match self.sample_points(samples + 1, seed, precision) {
            Ok(p) => p,
            Err(e) => {
                return vec![ultra.fail(e.to_string())];
            }
        };
        let one = ExtRational::Finite(int(1));
        for w in points.windows(2) {
            let (x, y) = (&w[0], &w[1]);
            let (wx, wy) = (self.omega_of(x), self.omega_of(y));
            let q = self.multiply(x, &self.invert(y));
            if self.omega_of(&q) < wx.clone().min(wy.clone()) {
                ultra = ultra.fail(format!("x = {x}, y = {y}"));
            }
            let c = self.commutator(x, y);
            if self.omega_of(&c) < wx.add(&wy) {
                comm = comm.fail(format!("x = {x}, y = {y}, [x,y] = {c}"));
            }
        }
        for x in &points[..samples] {
            let xp = self.power(x, self.p.get());
            if self.omega_of(&xp) != self.omega_of(x).add(&one) {
                power = power.fail(format!("x = {x}, x^p = {xp}"));
            }
        }
        vec![ultra, comm, power]
    }

    /// For sampled `x` with `ω(x) > p/(p-1)`, lifts a `p`-th root digit by digit
    /// until `y^p ≡ x (mod p^M)`. A finite-precision check, not a proof.
    pub fn check_saturation(&self, samples: usize, seed: u64, precision: u32) -> CheckRecord {
        let mut rec = CheckRecord::new(
            "saturation/p-th-roots",
            "omega(x) > p/(p-1) implies x is a p-th power (root lifted mod p^M)",
        )
        .param("group", &self.name)
        .param("samples", samples)
        .param("seed", seed)
        .param("precision", precision);
        let threshold = ExtRational::Finite(ratio_pp1(self.p));
        // push samples into the region where the hypothesis holds by taking p-th powers
        let points = match self.sample_points(samples, seed, precision) {
            Ok(pts) => pts,
            Err(e) => return rec.fail(e.to_string()),
        };
        let mut tested = 0;
        let mut skipped = 0;
        for (k, x) in points.iter().enumerate() {
            let x = if k % 2 == 0 { self.power(x, self.p.get()) } else { x.clone() };
            if self.omega_of(&x) <= threshold {
                skipped += 1;
                continue;
            }
            tested += 1;
            match self.lift_pth_root(&x, precision) {
                Ok(Some(_)) => {}
                Ok(None) => rec = rec.fail(format!("no p-th root of {x} mod p^{precision}")),
                Err(e) => rec = rec.fail(format!("{x}: {e}")),
            }
        }
        rec.param("tested", tested).param("skipped", skipped)
    }

    /// A `y` (mod `p^{M-1}`) with `y^p ≡ x (mod p^M)`, or `None` if lifting stalls.
    pub fn lift_pth_root(&self, x: &GroupPoint, precision: u32) -> Result<Option<GroupPoint>> {
        const MAX_CANDIDATES: usize = 512;
        let p = self.p;
        let target: Vec<BigInt> = x
            .coords()
            .iter()
            .map(|c| reduce_mod_pk(c, p, precision))
            .collect::<Result<_>>()?;
        let matches = |y: &GroupPoint, k: u32| -> Result<bool> {
            let yp = self.power(y, p.get());
            let modulus = p.pow(k);
            for (c, t) in yp.coords().iter().zip(&target) {
                if reduce_mod_pk(c, p, k)? != t % &modulus {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        if !matches(&self.identity(), 1)? {
            return Ok(None);
        }
        let mut candidates = vec![vec![BigInt::zero(); self.d]];
        let digits: Vec<Vec<u32>> = MultiIndex::up_to(self.d, (p.get() - 1) * self.d as u32)
            .into_iter()
            .map(|a| a.entries().to_vec())
            .filter(|a| a.iter().all(|&t| t < p.get()))
            .collect();
        for j in 1..precision {
            let step = p.pow(j - 1);
            let mut next = Vec::new();
            for y in &candidates {
                for t in &digits {
                    let lifted: Vec<BigInt> = y
                        .iter()
                        .zip(t)
                        .map(|(c, &ti)| c + &step * BigInt::from(ti))
                        .collect();
                    let pt = GroupPoint(lifted.iter().cloned().map(Scalar::from_integer).collect());
                    if matches(&pt, j + 1)? {
                        next.push(lifted);
                        if next.len() >= MAX_CANDIDATES {
                            break;
                        }
                    }
                }
                if next.len() >= MAX_CANDIDATES {
                    break;
                }
            }
            if next.is_empty() {
                return Ok(None);
            }
            candidates = next;
        }
        let y = candidates.swap_remove(0);
        Ok(Some(GroupPoint(y.into_iter().map(Scalar::from_integer).collect())))
    }

    /// Checks `v(d_{i,α}) ≥ -(ω(g_i) - 1/(p-1)) + Σ_j α_j (ω(h_j) - 1/(p-1))` for every
    /// stored coefficient of `F` (with `h = g_1..g_d, g_1..g_d`) and of the reversed
    /// inverse `J_i(Y) = I_i(Y_d, ..., Y_1)` (with `h = g_d^{-1}, ..., g_1^{-1}`).
    pub fn check_coefficient_bound(&self) -> Vec<CheckRecord> {
        let t = self.p.theta_exponent();
        let excess: Vec<Scalar> = self.omega.iter().map(|w| w - &t).collect();
        let law_weights = [excess.clone(), excess.clone()].concat();
        let rev_weights: Vec<Scalar> = excess.iter().rev().cloned().collect();
        let reversed = self.reversed_inverse();

        let mut out = Vec::new();
        for (id, anchor, family, weights) in [
            (
                "coeff-bound/law",
                "v(d_{i,a}) >= -(omega(g_i) - 1/(p-1)) + sum_j a_j (omega(h_j) - 1/(p-1)), h = (g, g)",
                &self.law,
                &law_weights,
            ),
            (
                "coeff-bound/inverse",
                "same bound for J_i(Y) = I_i(Y_d..Y_1) with h = (g_d^-1, ..., g_1^-1)",
                &reversed,
                &rev_weights,
            ),
        ] {
            let mut rec = CheckRecord::new(id, anchor).param("group", &self.name);
            let mut min_slack: Option<Scalar> = None;
            for (i, f) in family.iter().enumerate() {
                for (alpha, c) in f.terms() {
                    let v = match valuation(c, self.p) {
                        ExtRational::Finite(v) => v,
                        ExtRational::Infinity => continue,
                    };
                    let bound = -&excess[i] + alpha.weighted(weights);
                    let slack = &v - &bound;
                    if slack < Scalar::zero() {
                        rec = rec.fail(format!(
                            "component {} term {alpha}: v = {} < {}",
                            i + 1,
                            format_rational(&v),
                            format_rational(&bound)
                        ));
                    }
                    if min_slack.as_ref().is_none_or(|m| slack < *m) {
                        min_slack = Some(slack);
                    }
                }
            }
            if let Some(s) = min_slack {
                rec = rec.exponent("min_slack", &s);
            }
            out.push(rec);
        }
        out
    }

    /// `J_i(Y_1..Y_d) = I_i(Y_d..Y_1)`.
    pub fn reversed_inverse(&self) -> Vec<Series> {
        let d = self.d;
        let map: Vec<usize> = (0..d).map(|j| d - 1 - j).collect();
        self.inverse
            .iter()
            .map(|f| f.rename(d, &map).expect("inverse has d variables"))
            .collect()
    }

    /// `‖F_i‖ ≤ p^{τ_{N,i}}` on `B(p^{τ_N}) × B(p^{τ_N})`, and `‖J_i‖ ≤ p^{τ_{N,i}}` on the
    /// polydisc with reversed radii `(τ_{N,d}, ..., τ_{N,1})`.
    pub fn check_polydisc_bound(&self, n: u32) -> Vec<CheckRecord> {
        let params = match self.neighborhood_params(n) {
            Ok(p) => p,
            Err(e) => {
                return vec![CheckRecord::new("polydisc/law", "N >= 1").fail(e.to_string())]
            }
        };
        let rev = RadiusVector::new(params.tau.iter().rev().cloned().collect())
            .expect("tau is positive");
        let reversed = self.reversed_inverse();
        let mut out = Vec::new();
        for (id, anchor, family, radius) in [
            (
                "polydisc/law",
                "sup of F_i on B(p^tau_N) x B(p^tau_N) is at most p^tau_{N,i}",
                &self.law,
                params.rho_radius(),
            ),
            (
                "polydisc/inverse",
                "sup of J_i on B(p^tau_{N,d}, ..., p^tau_{N,1}) is at most p^tau_{N,i}",
                &reversed,
                rev,
            ),
        ] {
            let mut rec = CheckRecord::new(id, anchor)
                .param("group", &self.name)
                .param("N", n);
            for (i, f) in family.iter().enumerate() {
                let norm = f.gauss_norm(&radius, self.p).expect("radius matches");
                let bound = crate::padic::LogMag::pow(params.tau[i].clone());
                rec = rec.magnitude(&format!("norm_{}", i + 1), &norm.mag);
                rec = rec.exponent(&format!("tau_{}", i + 1), &params.tau[i]);
                if norm.mag > bound {
                    let worst = f
                        .terms()
                        .map(|(a, c)| {
                            (crate::padic::LogMag::of(c, self.p).shift(&a.weighted(radius.exponents())), a)
                        })
                        .max()
                        .map(|(_, a)| a.to_string())
                        .unwrap_or_default();
                    rec = rec.fail(format!("component {} monomial {worst}", i + 1));
                }
            }
            out.push(rec);
        }
        out
    }

    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("name".into(), self.name.clone());
        m.insert("p".into(), self.p.to_string());
        m.insert("d".into(), self.d.to_string());
        let om: Vec<String> = self.omega.iter().map(format_rational).collect();
        m.insert("omega".into(), om.join(", "));
        m.insert("law_degree".into(), self.law_degree().to_string());
        m.insert("equi_valued".into(), self.is_equi_valued().to_string());
        m
    }
}

fn ratio_pp1(p: Prime) -> Scalar {
    crate::padic::ratio(p.get() as i64, p.get() as i64 - 1)
}

fn coefficient_witness(i: usize, a: &MultiIndex, x: &Scalar, y: &Scalar) -> String {
    format!(
        "component {} monomial {a}: {} vs {}",
        i + 1,
        format_rational(x),
        format_rational(y)
    )
}

fn heisenberg_matrix(x: &[Scalar], p: &Scalar) -> [Scalar; 3] {
    [p * &x[0], p * &x[1], p * (&x[2] + p * &x[0] * &x[1])]
}

fn heisenberg_coords(m: &[Scalar; 3], p: &Scalar) -> Vec<Scalar> {
    vec![&m[0] / p, &m[1] / p, (&m[2] - &m[0] * &m[1]) / p]
}
