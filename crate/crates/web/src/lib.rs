//! Browser bindings. Each operation is a plain function from parameters to a
//! JSON string, wrapped for JavaScript by `wasm-bindgen`; the page in `www/`
//! calls the wrappers.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tamellc::characters::{delta_twist, UnitGroupModel};
use tamellc::dl::{cuspidal_table, table_json, verify_cuspidal, Gl2ClassData};
use tamellc::field::FieldParams;
use tamellc::local::{LocalField, PresentationKind, XiConvention};
use tamellc::scalar::RootOfUnity;
use tamellc::torus::{chi_phi, ChainOptions, TorusChar};
use tamellc::weil::induce_parameter;
use tamellc::workbench::factorization_demo;

/// Largest unit group the page will enumerate.
const PAGE_BUDGET: u64 = 20_000;

fn group(p: u32, ell: u32, r: u32) -> Result<UnitGroupModel, String> {
    let params = FieldParams::new_allowing_wild(p as u64, 1, ell as u64).map_err(|e| e.to_string())?;
    let field = LocalField::new(params, r + 1, PresentationKind::Auto, XiConvention::default()).map_err(|e| e.to_string())?;
    UnitGroupModel::build(&field, r, PAGE_BUDGET).map_err(|e| e.to_string())
}

/// Admissible pairs of level `r` with `chi(varpi)` in `mu_n`, with orbit labels.
pub fn enumerate_json(p: u32, ell: u32, r: u32, n: u32) -> Result<String, String> {
    let g = group(p, ell, r)?;
    let pairs = g.enumerate_admissible(n.max(1) as u64);
    let list: Vec<Value> = pairs
        .iter()
        .map(|pair| {
            let mut v = pair.to_json();
            v["orbit_representative"] = json!(g.orbit_representative(&pair.chi).unit_exponents);
            v
        })
        .collect();
    Ok(json!({
        "unit_group_order": g.order(),
        "radices": g.radices(),
        "orbits": g.orbit_representatives(&pairs).len(),
        "pairs": list,
    })
    .to_string())
}

/// Both sides for one pair. `exponents` is comma separated, `varpi` is `n/d`.
pub fn compare_json(p: u32, ell: u32, r: u32, exponents: &str, varpi: &str) -> Result<String, String> {
    let g = group(p, ell, r)?;
    let exps: Vec<u64> = exponents
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| format!("bad exponent {s:?}")))
        .collect::<Result<_, _>>()?;
    let a: RootOfUnity = varpi.parse().map_err(|e: tamellc::Error| e.to_string())?;
    let chi = g.character(exps, a).map_err(|e| e.to_string())?;
    let pair = g.admissible_pair(chi).map_err(|e| e.to_string())?;
    let phi = induce_parameter(&g, &pair).map_err(|e| e.to_string())?;
    let dbr = chi_phi(&g, &phi, ChainOptions::default()).map_err(|e| e.to_string())?;
    let target = TorusChar::from_level_char(&g.chi_times(&pair.chi, &delta_twist(&g, &pair)));
    let demo = factorization_demo(&g, &pair).map_err(|e| e.to_string())?;
    Ok(json!({
        "pair": pair.to_json(),
        "trselp": phi.to_json(),
        "chi_phi": dbr.chi_phi,
        "chi_tau": dbr.chi_tau,
        "path": dbr.path,
        "preimages_checked": dbr.preimages_checked,
        "moy_target": target,
        "agree": dbr.chi_phi == target,
        "factorization": demo,
    })
    .to_string())
}

/// The cuspidal table of `GL(2, f_q)` with per-row verification.
pub fn dl_table_json(q: u32) -> Result<String, String> {
    if q > 13 {
        return Err("the page shows tables for q <= 13".into());
    }
    let classes = Gl2ClassData::new(q as u64).map_err(|e| e.to_string())?;
    let rows = cuspidal_table(&classes).map_err(|e| e.to_string())?;
    let mut v = table_json(&classes, &rows);
    v["verified"] = json!(rows.iter().map(|r| verify_cuspidal(&classes, r)).collect::<Vec<_>>());
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn enumerate(p: u32, ell: u32, r: u32, n: u32) -> Result<String, JsValue> {
    enumerate_json(p, ell, r, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn compare(p: u32, ell: u32, r: u32, exponents: &str, varpi: &str) -> Result<String, JsValue> {
    compare_json(p, ell, r, exponents, varpi).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn dl_table(q: u32) -> Result<String, JsValue> {
    dl_table_json(q).map_err(|e| JsValue::from_str(&e))
}
