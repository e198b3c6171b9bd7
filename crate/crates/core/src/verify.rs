//! Named verification suites over one group, assembled into a [`Report`].

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{
    check_banach_submult_on, check_comparison_maps, check_contact_embedding, check_norm_tower,
    check_sandwich, check_submultiplicative_on, sample_products, ConvolutionKernel, Distribution,
    Order,
};
use crate::error::{Error, Result};
use crate::functions::{antipode_image, coassociativity_witness, counit_image, pair, pair_tensor, DaggerFunction};
use crate::group::PValuedGroup;
use crate::mahler::{mahler_to_taylor, taylor_to_mahler, verify_norm_identity};
use crate::padic::{
    factorial_valuation, format_rational, int, parse_rational, valuation_int, MultiIndex, Prime,
    Scalar,
};
use crate::report::{CheckRecord, Report, Verdict, SCHEMA_VERSION};
use crate::series::{RadiusVector, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    GroupAxioms,
    Pvaluation,
    Saturation,
    CoeffBound,
    Polydisc,
    Mahler,
    Convolution,
    Norms,
    Embeddings,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::GroupAxioms,
        Suite::Pvaluation,
        Suite::Saturation,
        Suite::CoeffBound,
        Suite::Polydisc,
        Suite::Mahler,
        Suite::Convolution,
        Suite::Norms,
        Suite::Embeddings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GroupAxioms => "group-axioms",
            Suite::Pvaluation => "pvaluation",
            Suite::Saturation => "saturation",
            Suite::CoeffBound => "coeff-bound",
            Suite::Polydisc => "polydisc",
            Suite::Mahler => "mahler",
            Suite::Convolution => "convolution",
            Suite::Norms => "norms",
            Suite::Embeddings => "embeddings",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// Parses a comma-separated suite list; `all` selects every suite, the empty string none.
pub fn parse_suites(text: &str) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if part == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Parses `a..b` (inclusive) or a single `N`.
pub fn parse_range(text: &str) -> Result<(u32, u32)> {
    let bad = || Error::Config(format!("bad N range {text:?}"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = text.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn parse_sigmas(text: &str) -> Result<Vec<Scalar>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_rational)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSource {
    /// `abelian:<p>:<d>` or `heisenberg:<p>`.
    Builtin(String),
    /// The text of a JSON group config, with a label for messages.
    Config { label: String, text: String },
}

impl GroupSource {
    pub fn load(&self) -> Result<PValuedGroup> {
        match self {
            GroupSource::Builtin(tag) => PValuedGroup::builtin(tag),
            GroupSource::Config { label, text } => PValuedGroup::load_group(text)
                .map_err(|e| Error::Config(format!("{label}: {e}"))),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            GroupSource::Builtin(tag) => tag,
            GroupSource::Config { label, .. } => label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub group: GroupSource,
    pub suites: Vec<Suite>,
    pub n_range: (u32, u32),
    pub sigmas: Vec<Scalar>,
    pub cap: u32,
    pub trials: usize,
    pub seed: u64,
    /// Sampled coordinates live in `[0, p^precision)`.
    pub precision: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            group: GroupSource::Builtin("heisenberg:3".into()),
            suites: Suite::ALL.to_vec(),
            n_range: (1, 8),
            sigmas: vec![crate::padic::ratio(1, 4), crate::padic::ratio(1, 2), crate::padic::ratio(3, 4), int(1)],
            cap: 8,
            trials: 100,
            seed: 7,
            precision: 12,
        }
    }
}

impl SuiteConfig {
    fn describe(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("group".into(), self.group.label().to_string());
        let suites: Vec<&str> = self.suites.iter().map(|s| s.name()).collect();
        m.insert("suites".into(), suites.join(","));
        m.insert("N".into(), format!("{}..{}", self.n_range.0, self.n_range.1));
        let sig: Vec<String> = self.sigmas.iter().map(format_rational).collect();
        m.insert("sigma".into(), sig.join(","));
        m.insert("cap".into(), self.cap.to_string());
        m.insert("trials".into(), self.trials.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("precision".into(), self.precision.to_string());
        m
    }

    fn ns(&self) -> std::ops::RangeInclusive<u32> {
        self.n_range.0..=self.n_range.1
    }

    /// Output degree for convolutions: inputs then need moments up to `cap`.
    fn convolution_cap(&self, group: &PValuedGroup) -> u32 {
        (self.cap / group.law_degree()).max(1)
    }
}

/// Folds per-sample records of one check into a single record.
fn merge(records: Vec<CheckRecord>) -> Option<CheckRecord> {
    let mut iter = records.into_iter();
    let mut acc = iter.next()?;
    for r in iter {
        acc.verdict = match (acc.verdict, r.verdict) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::RegimeUnmet, v) | (v, Verdict::RegimeUnmet) => v,
            (Verdict::LowerBoundPass, _) | (_, Verdict::LowerBoundPass) => Verdict::LowerBoundPass,
            _ => Verdict::Pass,
        };
        if acc.witness.is_none() {
            acc.witness = r.witness;
        }
    }
    Some(acc)
}

fn run_suite(suite: Suite, group: &Arc<PValuedGroup>, cfg: &SuiteConfig) -> Vec<CheckRecord> {
    match suite {
        Suite::GroupAxioms => {
            let mut out = group.check_formal_group_axioms(cfg.cap);
            if group.model().is_some() {
                out.push(group.check_model_consistency(cfg.trials, cfg.seed, cfg.precision));
            }
            out
        }
        Suite::Pvaluation => group.check_pvaluation(cfg.trials, cfg.seed, cfg.precision),
        Suite::Saturation => vec![group.check_saturation(cfg.trials, cfg.seed, cfg.precision)],
        Suite::CoeffBound => group.check_coefficient_bound(),
        Suite::Polydisc => cfg.ns().flat_map(|n| group.check_polydisc_bound(n)).collect(),
        Suite::Mahler => mahler_suite(group.prime(), cfg),
        Suite::Convolution => convolution_suite(group, cfg),
        Suite::Norms => norms_suite(group, cfg),
        Suite::Embeddings => embeddings_suite(group, cfg),
    }
}

/// A random exact polynomial with coefficients `±u p^k`, `k ∈ {-1, 0, 1, 2}`.
pub fn random_polynomial(rng: &mut ChaCha8Rng, p: Prime, dim: usize, degree: u32, terms: usize) -> Series {
    let indices = MultiIndex::up_to(dim, degree);
    let pairs: Vec<(MultiIndex, Scalar)> = (0..terms)
        .map(|_| {
            let alpha = indices[rng.gen_range(0..indices.len())].clone();
            let u: i64 = rng.gen_range(1..=50);
            let k: i32 = rng.gen_range(-1..=2);
            let scale = if k >= 0 {
                Scalar::from_integer(p.pow(k as u32))
            } else {
                Scalar::new(BigInt::from(1), p.big())
            };
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            (alpha, int(sign * u) * scale)
        })
        .collect();
    Series::polynomial(dim, pairs).expect("indices have the right dimension")
}

fn mahler_suite(p: Prime, cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let radii = [crate::padic::ratio(1, 4), crate::padic::ratio(1, 2), int(1)];
    let mut identity = Vec::new();
    let mut round = CheckRecord::new(
        "mahler/round-trip",
        "mahler_to_taylor(taylor_to_mahler(f)) = f for exact polynomials",
    )
    .param("p", p)
    .param("trials", cfg.trials);
    for t in 0..cfg.trials {
        let (dim, degree) = if t % 2 == 0 { (1, 12) } else { (2, 6) };
        let f = random_polynomial(&mut rng, p, dim, degree, 6);
        let rho = RadiusVector::uniform(dim, radii[t % 3].clone()).expect("positive");
        match verify_norm_identity(&f, &rho, p) {
            Ok(r) => identity.push(r.param("trials", cfg.trials)),
            Err(e) => identity.push(CheckRecord::new("mahler/norm-identity", "").fail(e.to_string())),
        }
        let back = taylor_to_mahler(&f).and_then(|m| mahler_to_taylor(&m));
        match back {
            Ok(b) if b.first_difference(&f, u32::MAX).is_none() => {}
            Ok(_) => round = round.fail(format!("trial {t}")),
            Err(e) => round = round.fail(format!("trial {t}: {e}")),
        }
    }
    let mut fact = CheckRecord::new(
        "mahler/factorial-valuation",
        "v(n!) = (n - s_p(n))/(p-1), against a running sum of v(k)",
    )
    .param("p", p)
    .param("n_max", 2000);
    let mut running = 0u64;
    for n in 1..=2000u64 {
        running += valuation_int(&BigInt::from(n), p);
        if factorial_valuation(n, p) != int(running as i64) {
            fact = fact.fail(format!("n = {n}"));
        }
    }
    let mut out: Vec<CheckRecord> = merge(identity).into_iter().collect();
    out.push(round);
    out.push(fact);
    out
}

fn convolution_suite(group: &Arc<PValuedGroup>, cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let cap = cfg.convolution_cap(group).min(3);
    let record = |id: &str, anchor: &str| {
        CheckRecord::new(format!("convolution/{id}"), anchor)
            .param("group", group.name())
            .param("cap", cap)
            .param("seed", cfg.seed)
    };
    let kernel = match ConvolutionKernel::new(group, cap) {
        Ok(k) => k,
        Err(e) => return vec![record("kernel", "F^gamma expansion").fail(e.to_string())],
    };
    // small coordinates keep the moment integers short
    let points = match group.sample_points(cfg.trials + 2, cfg.seed, cfg.precision.min(4)) {
        Ok(p) => p,
        Err(e) => return vec![record("samples", "sampling").fail(e.to_string())],
    };
    let dirac = |x| Distribution::dirac(group, x, kernel.input_cap()).expect("valid point");
    let mut hom = record("dirac-product", "delta_x * delta_y has the moments of delta_{xy}")
        .param("pairs", cfg.trials);
    let mut opp = record("opposite-order", "with the opposite convention delta_x * delta_y = delta_{yx}")
        .param("pairs", cfg.trials);
    let mut unit = record("unit", "delta_e is a two-sided unit");
    let mut adj = record("pairing", "(l * m)(f) = (l x m)(f(xy))");
    let e = Distribution::identity(group, kernel.input_cap());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    for (i, w) in points.windows(2).take(cfg.trials).enumerate() {
        let (dx, dy) = (dirac(&w[0]), dirac(&w[1]));
        let run = |a: &Distribution, b: &Distribution, o: Order| kernel.convolve(a, b, o);
        match run(&dx, &dy, Order::Standard) {
            Ok(c) => {
                let target = Distribution::dirac(group, &group.multiply(&w[0], &w[1]), cap).expect("valid");
                if c.moments() != target.moments() {
                    hom = hom.fail(format!("pair {i}: x = {}, y = {}", w[0], w[1]));
                }
                let f = DaggerFunction::new(group, random_polynomial(&mut rng, group.prime(), group.rank(), cap, 4))
                    .expect("exact");
                let lhs = pair(&c, &f);
                let rhs = f.comul().and_then(|h| pair_tensor(&dx, &dy, &h));
                if lhs.is_err() || lhs != rhs {
                    adj = adj.fail(format!("pair {i}"));
                }
            }
            Err(err) => hom = hom.fail(err.to_string()),
        }
        match run(&dx, &dy, Order::Opposite) {
            Ok(c) => {
                let target = Distribution::dirac(group, &group.multiply(&w[1], &w[0]), cap).expect("valid");
                if c.moments() != target.moments() {
                    opp = opp.fail(format!("pair {i}"));
                }
            }
            Err(err) => opp = opp.fail(err.to_string()),
        }
        if i < 10 {
            let left = run(&e, &dx, Order::Standard);
            let right = run(&dx, &e, Order::Standard);
            let want = dx.with_cap(cap).expect("atoms");
            for (side, got) in [("left", left), ("right", right)] {
                if got.as_ref().map(Distribution::moments) != Ok(want.moments()) {
                    unit = unit.fail(format!("{side} unit at {}", w[0]));
                }
            }
        }
    }
    let triples = (cfg.trials / 4).max(1);
    let mut assoc = record("associativity", "(dx * dy) * dz = dx * (dy * dz) on moments")
        .param("triples", triples);
    let big = ConvolutionKernel::new(group, cap);
    for (i, w) in points.windows(3).take(triples).enumerate() {
        let (dx, dy, dz) = (dirac(&w[0]), dirac(&w[1]), dirac(&w[2]));
        let res = big.as_ref().map_err(Clone::clone).and_then(|k| {
            let l = k.convolve(&k.convolve(&dx, &dy, Order::Standard)?, &dz, Order::Standard)?;
            let r = k.convolve(&dx, &k.convolve(&dy, &dz, Order::Standard)?, Order::Standard)?;
            Ok((l, r))
        });
        match res {
            Ok((l, r)) if l.moments() == r.moments() => {}
            Ok(_) => assoc = assoc.fail(format!("triple {i}")),
            Err(err) => assoc = assoc.fail(err.to_string()),
        }
    }

    let mut hopf = CheckRecord::new(
        "functions/hopf",
        "coassociativity, counit f(x e) = f(x) and antipode f(x x^-1) = f(e) for chart polynomials",
    )
    .param("group", group.name())
    .param("trials", 10);
    let mut translate = CheckRecord::new(
        "functions/right-translation",
        "(R_h f)(g) = f(gh) and R_h' R_h = R_{h'h}",
    )
    .param("group", group.name());
    for t in 0..10 {
        let body = random_polynomial(&mut rng, group.prime(), group.rank(), 3, 4);
        let f = DaggerFunction::new(group, body).expect("exact");
        match coassociativity_witness(&f) {
            Ok(None) => {}
            Ok(Some(w)) => hopf = hopf.fail(format!("trial {t}: {w}")),
            Err(err) => hopf = hopf.fail(err.to_string()),
        }
        if counit_image(&f).ok().as_ref() != Some(f.body()) {
            hopf = hopf.fail(format!("trial {t}: counit"));
        }
        let fe = f.eval_at(&group.identity());
        let constant = Series::constant(group.rank(), fe.clone(), 0);
        let anti = antipode_image(&f);
        if anti.ok().and_then(|a| a.first_difference(&constant, u32::MAX)).is_some() {
            hopf = hopf.fail(format!("trial {t}: antipode"));
        }
        let (g, h, h2) = (&points[t % points.len()], &points[(t + 1) % points.len()], &points[(t + 2) % points.len()]);
        let ok = f.right_translate(h).and_then(|rf| {
            let pointwise = rf.eval_at(g) == f.eval_at(&group.multiply(g, h));
            let composed = rf.right_translate(h2)? == f.right_translate(&group.multiply(h2, h))?;
            Ok(pointwise && composed)
        });
        if ok != Ok(true) {
            translate = translate.fail(format!("trial {t}"));
        }
    }
    vec![hom, opp, unit, assoc, adj, hopf, translate]
}

type Samples = Vec<(Distribution, Distribution, Distribution)>;

fn norm_samples(group: &Arc<PValuedGroup>, cfg: &SuiteConfig) -> Result<Samples> {
    let cap = cfg.convolution_cap(group).min(4);
    let kernel = ConvolutionKernel::new(group, cap)?;
    sample_products(&kernel, cfg.trials, cfg.seed, 2.min(cap))
}

fn all_distributions(samples: &Samples) -> impl Iterator<Item = &Distribution> {
    samples.iter().flat_map(|(a, b, c)| [a, b, c])
}

fn norms_suite(group: &Arc<PValuedGroup>, cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let samples = match norm_samples(group, cfg) {
        Ok(s) => s,
        Err(e) => return vec![CheckRecord::new("norms/samples", "sampling").fail(e.to_string())],
    };
    let mut out = Vec::new();
    for sigma in &cfg.sigmas {
        out.push(check_submultiplicative_on(group, sigma, &samples));
    }
    for n in cfg.ns() {
        out.push(check_banach_submult_on(group, n, &samples));
    }
    for sigma in &cfg.sigmas {
        let recs = all_distributions(&samples).map(|l| check_sandwich(l, sigma)).collect();
        out.extend(merge(recs).map(|r| r.param("samples", samples.len())));
    }
    let recs = all_distributions(&samples)
        .map(|l| check_norm_tower(l, cfg.ns()).unwrap_or_else(|e| CheckRecord::new("norms/tower", "").fail(e.to_string())))
        .collect();
    out.extend(merge(recs).map(|r| r.param("samples", samples.len())));
    out
}

fn embeddings_suite(group: &Arc<PValuedGroup>, cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let samples = match norm_samples(group, cfg) {
        Ok(s) => s,
        Err(e) => return vec![CheckRecord::new("embeddings/samples", "sampling").fail(e.to_string())],
    };
    let mut out = Vec::new();
    for sigma in &cfg.sigmas {
        let recs = all_distributions(&samples).map(|l| check_contact_embedding(l, sigma)).collect();
        out.extend(merge(recs).map(|r| r.param("samples", samples.len())));
    }
    for n in cfg.ns() {
        for sigma in &cfg.sigmas {
            let mut contraction = Vec::new();
            let mut continuity = Vec::new();
            for l in all_distributions(&samples) {
                match check_comparison_maps(l, n, sigma) {
                    Ok(mut v) => {
                        continuity.push(v.pop().expect("two records"));
                        contraction.push(v.pop().expect("two records"));
                    }
                    Err(e) => contraction.push(CheckRecord::new("embeddings/contraction", "").fail(e.to_string())),
                }
            }
            out.extend(merge(contraction).map(|r| r.param("samples", samples.len())));
            out.extend(merge(continuity).map(|r| r.param("samples", samples.len())));
        }
    }
    out
}

/// Runs the selected suites on an already loaded group.
pub fn run_on(group: &Arc<PValuedGroup>, cfg: &SuiteConfig) -> Report {
    #[cfg(not(target_arch = "wasm32"))]
    let per_suite: Vec<Vec<CheckRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .suites
            .iter()
            .map(|&s| scope.spawn(move || run_suite(s, group, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    #[cfg(target_arch = "wasm32")]
    let per_suite: Vec<Vec<CheckRecord>> =
        cfg.suites.iter().map(|&s| run_suite(s, group, cfg)).collect();

    Report {
        schema: SCHEMA_VERSION,
        group: group.name().to_string(),
        config: cfg.describe(),
        checks: per_suite.into_iter().flatten().collect(),
    }
}

pub fn run(cfg: &SuiteConfig) -> Result<Report> {
    let group = Arc::new(cfg.group.load()?);
    Ok(run_on(&group, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        assert_eq!(parse_suites("").unwrap(), vec![]);
        assert_eq!(parse_suites("all").unwrap().len(), 9);
        assert_eq!(parse_suites("norms, mahler").unwrap(), vec![Suite::Mahler, Suite::Norms]);
        assert!(parse_suites("nope").is_err());
        assert_eq!(parse_range("1..8").unwrap(), (1, 8));
        assert_eq!(parse_range("4").unwrap(), (4, 4));
        assert!(parse_range("0..2").is_err());
        assert_eq!(parse_sigmas("1/4,1").unwrap(), vec![crate::padic::ratio(1, 4), int(1)]);
    }

    #[test]
    fn empty_suite_list() {
        let cfg = SuiteConfig {
            suites: vec![],
            ..SuiteConfig::default()
        };
        let r = run(&cfg).unwrap();
        assert!(r.checks.is_empty());
        assert!(!r.has_failures());
    }

    #[test]
    fn small_run_is_clean_and_deterministic() {
        let cfg = SuiteConfig {
            trials: 6,
            n_range: (1, 3),
            cap: 4,
            ..SuiteConfig::default()
        };
        let a = run(&cfg).unwrap();
        let fails: Vec<_> = a.checks.iter().filter(|c| !c.passed()).collect();
        assert!(fails.is_empty(), "{fails:#?}");
        let b = run(&cfg).unwrap();
        assert_eq!(a.emit(crate::report::Format::Json), b.emit(crate::report::Format::Json));
    }
}
