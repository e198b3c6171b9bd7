//! Three browser operations over `dagger-core`, each returning a JSON string.
//!
//! The `*_json` functions hold the logic and run natively; the `#[wasm_bindgen]`
//! wrappers only convert errors into JS exceptions.

use dagger_core::distributions::ComparisonRegime;
use dagger_core::mahler::{mahler_norm, taylor_to_mahler};
use dagger_core::padic::{parse_rational, ratio};
use dagger_core::verify::parse_sigmas;
use dagger_core::{LogMag, MultiIndex, PValuedGroup, Prime, RadiusVector, Scalar, Series};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn show(q: &Scalar) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn show_mag(m: &LogMag) -> Value {
    match m.exponent() {
        Some(e) => Value::String(show(e)),
        None => Value::Null,
    }
}

fn parse_list(text: &str) -> Result<Vec<Scalar>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_rational(s).map_err(|e| e.to_string()))
        .collect()
}

fn load(tag: &str) -> Result<PValuedGroup, String> {
    PValuedGroup::builtin(tag.trim()).map_err(|e| e.to_string())
}

/// Taylor coefficients `c0, c1, ...` of a one-variable polynomial: its Mahler
/// coefficients, both sides of the norm identity at `ρ`, and the Gauss-norm
/// exponent for `ρ = 0, 1/8, ..., 2`.
pub fn mahler_json(coeffs: &str, p: u32, rho: &str) -> Result<String, String> {
    let p = Prime::new(p).map_err(|e| e.to_string())?;
    let cs = parse_list(coeffs)?;
    let rho = parse_rational(rho).map_err(|e| e.to_string())?;
    if rho <= Scalar::from_integer(0.into()) {
        return Err("rho must be positive".into());
    }
    let f = Series::polynomial(
        1,
        cs.iter().enumerate().map(|(k, c)| (MultiIndex::new(vec![k as u32]), c.clone())),
    )
    .map_err(|e| e.to_string())?;
    let m = taylor_to_mahler(&f).map_err(|e| e.to_string())?;
    let radius = RadiusVector::new(vec![rho.clone()]).map_err(|e| e.to_string())?;
    let gauss = f.gauss_norm(&radius, p).map_err(|e| e.to_string())?.mag;
    let mahler = mahler_norm(&m, &radius, p).map_err(|e| e.to_string())?;
    let degree = f.degree().unwrap_or(0);
    let mahler_coeffs: Vec<String> = (0..=degree).map(|k| show(&m.coeff(&MultiIndex::new(vec![k])))).collect();
    let curve: Vec<Value> = (0..=16)
        .map(|k| {
            let r = ratio(k, 8);
            let mag = f.gauss_norm(&RadiusVector::new(vec![r.clone()]).expect("non-negative"), p).expect("dim 1").mag;
            json!({ "rho": show(&r), "exponent": show_mag(&mag) })
        })
        .collect();
    Ok(json!({
        "mahler": mahler_coeffs,
        "gauss_exponent": show_mag(&gauss),
        "mahler_exponent": show_mag(&mahler),
        "agree": gauss == mahler,
        "curve": curve,
    })
    .to_string())
}

/// For each `N` in `1..=n_max` and each `σ`, the two comparison regime exponents
/// and whether the polydisc bound holds at `N`.
pub fn regime_grid_json(tag: &str, n_max: u32, sigmas: &str) -> Result<String, String> {
    let g = load(tag)?;
    let sigmas = parse_sigmas(sigmas).map_err(|e| e.to_string())?;
    if sigmas.is_empty() || n_max == 0 || n_max > 64 {
        return Err("need at least one sigma and 1 <= N <= 64".into());
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let tau = g.neighborhood_params(n).map_err(|e| e.to_string())?.tau;
        let polydisc = g.check_polydisc_bound(n).iter().all(|r| r.passed());
        let mut cells = Vec::new();
        for s in &sigmas {
            let r = ComparisonRegime::new(&g, n, s).map_err(|e| e.to_string())?;
            cells.push(json!({
                "sigma": show(s),
                "contraction": show(&r.contraction),
                "continuity": show(&r.continuity),
                "contraction_holds": r.contraction_holds(),
                "continuity_holds": r.continuity_holds(),
            }));
        }
        rows.push(json!({
            "N": n,
            "tau": tau.iter().map(show).collect::<Vec<_>>(),
            "polydisc": polydisc,
            "cells": cells,
        }));
    }
    Ok(json!({ "group": g.name(), "rows": rows }).to_string())
}

/// `xy`, `yx`, `x^{-1}` and `ω` of each, with the coordinate-model cross-check.
pub fn multiply_json(tag: &str, x: &str, y: &str) -> Result<String, String> {
    let g = load(tag)?;
    let x = g.point(parse_list(x)?).map_err(|e| e.to_string())?;
    let y = g.point(parse_list(y)?).map_err(|e| e.to_string())?;
    let coords = |pt: &dagger_core::GroupPoint| pt.coords().iter().map(show).collect::<Vec<_>>();
    let xy = g.multiply(&x, &y);
    let yx = g.multiply(&y, &x);
    let model_agrees = g.model_multiply(&x, &y).map(|m| m == xy);
    Ok(json!({
        "group": g.name(),
        "xy": coords(&xy),
        "yx": coords(&yx),
        "x_inverse": coords(&g.invert(&x)),
        "commutator": coords(&g.commutator(&x, &y)),
        "omega": {
            "x": g.omega_of(&x).to_string(),
            "y": g.omega_of(&y).to_string(),
            "xy": g.omega_of(&xy).to_string(),
        },
        "model_agrees": model_agrees,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn mahler(coeffs: &str, p: u32, rho: &str) -> Result<String, JsValue> {
    mahler_json(coeffs, p, rho).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn regime_grid(tag: &str, n_max: u32, sigmas: &str) -> Result<String, JsValue> {
    regime_grid_json(tag, n_max, sigmas).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn multiply(tag: &str, x: &str, y: &str) -> Result<String, JsValue> {
    multiply_json(tag, x, y).map_err(|e| JsValue::from_str(&e))
}
