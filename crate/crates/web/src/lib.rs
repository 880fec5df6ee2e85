//! Three operations exposed to the browser. Each takes plain text and
//! returns a JSON report; the `*_json` functions are the native entry points
//! the bindings wrap.

use addstruct::bohr::{self, BohrProfile, BohrSpec};
use addstruct::exact::one;
use addstruct::setstat;
use addstruct::worked::{self, HLambdaSpec};
use addstruct::{Group, GroupSet};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest group order the page accepts.
pub const WEB_MAX_ORDER: usize = 1 << 16;

fn admit(g: &Group) -> Result<(), String> {
    if g.order() > WEB_MAX_ORDER {
        return Err(format!("group order {} exceeds {WEB_MAX_ORDER}", g.order()));
    }
    Ok(())
}

/// Profile of a set given in the set-file format.
pub fn set_stats_json(text: &str) -> Result<String, String> {
    let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    let g: Group = header.ok_or("empty input")?.parse().map_err(|e: addstruct::Error| e.to_string())?;
    admit(&g)?;
    let a = GroupSet::from_text(text).map_err(|e| e.to_string())?;
    let p = setstat::profile(&a, None, &[2, 3, 4]).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&p).expect("profile serializes"))
}

/// Size, regularity and size lemmas of `B(Γ, ε)`.
pub fn bohr_json(group: &str, gamma: &str, eps: &str) -> Result<String, String> {
    let g: Group = group.parse().map_err(|e: addstruct::Error| e.to_string())?;
    admit(&g)?;
    let run = || -> addstruct::Result<serde_json::Value> {
        let spec = BohrSpec::new(bohr::parse_gamma(&g, gamma)?, bohr::parse_radii(eps)?)?;
        let p = BohrProfile::new(&g, &spec)?;
        Ok(json!({
            "size": p.count(&one()),
            "regularity": p.regularity_at(&one()),
            "checks": bohr::check_size_bounds(&g, &spec)?,
        }))
    };
    run().map(|v| v.to_string()).map_err(|e| e.to_string())
}

/// The `H + Λ` example with its slice claims and concentration ratios.
pub fn h_lambda_json(n: usize, k: usize, lambda: usize) -> Result<String, String> {
    if n > 16 {
        return Err("n is limited to 16 on this page".into());
    }
    let spec = HLambdaSpec { n, k, lambda_size: lambda };
    let a = worked::make_h_lambda(spec).map_err(|e| e.to_string())?;
    let r = worked::verify_h_lambda(&a, spec, 6).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&r).expect("report serializes"))
}

#[wasm_bindgen]
pub fn set_stats(text: &str) -> Result<String, JsValue> {
    set_stats_json(text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bohr_set(group: &str, gamma: &str, eps: &str) -> Result<String, JsValue> {
    bohr_json(group, gamma, eps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn h_lambda(n: usize, k: usize, lambda: usize) -> Result<String, JsValue> {
    h_lambda_json(n, k, lambda).map_err(|e| JsValue::from_str(&e))
}
