//! Three operations for the static page in `www/`. Each returns a JSON
//! string; the page draws it.

use gaplab::eigen::{eig_sym, spectral_radius};
use gaplab::ensemble::{EnsembleSpec, EntryDistribution};
use gaplab::error::Result;
use gaplab::geometry::{classify, partition_indices, GeometryParams, Verdict};
use gaplab::lcd::{regularized_lcd, regularized_lcd_lower_bound, LCDParams};
use gaplab::nodal::{nodal_report, Graph, ZetaRule};
use gaplab::stats::gap_report;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_N: usize = 400;

fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(gaplab::error::Error::Parameter {
            field: "n",
            reason: format!("the demo is limited to n <= {MAX_N}, got {n}"),
        });
    }
    Ok(())
}

pub fn spectrum_value(n: usize, p: f64, seed: u64) -> Result<Value> {
    check_n(n)?;
    let spec = EnsembleSpec::sparse(n, p, EntryDistribution::Rademacher, seed);
    let eig = eig_sym(&spec.generate()?)?;
    let gaps = gap_report(&eig, p)?;
    let scale = (p * n as f64).sqrt();
    Ok(json!({
        "n": n,
        "p": p,
        // normalized so the bulk fills [-2, 2]
        "eigenvalues": eig.eigenvalues().iter().map(|l| l / scale).collect::<Vec<_>>(),
        "gaps": gaps.gaps,
        "min_gap": gaps.min_gap,
        "min_gap_index": gaps.min_gap_index,
        "gap_unit": gaps.scale,
        "norm_ratio": spectral_radius(eig.eigenvalues()) / scale,
    }))
}

pub fn eigenvector_value(n: usize, p: f64, seed: u64, index: usize, omega: f64) -> Result<Value> {
    check_n(n)?;
    let spec = EnsembleSpec::sparse(n, p, EntryDistribution::Rademacher, seed);
    let eig = eig_sym(&spec.generate()?)?;
    let index = index.min(n - 1);
    let v = eig.vector(index);
    let geometry = GeometryParams::for_dimension(n, p, omega, 2.0)?;
    let class = classify(v, &geometry)?;
    let mut out = json!({
        "index": index,
        "vector": v,
        "verdict": class.verdict.as_str(),
        "level": class.level,
        "tail_norm": class.tail_norm,
        "m": geometry.m,
        "rho": geometry.rho,
    });
    if class.verdict == Verdict::Incompressible {
        if let Ok(partition) = partition_indices(v, &geometry) {
            let reg = regularized_lcd(v, &partition, &LCDParams::new(0.1, p, omega))?;
            out["k0"] = json!(partition.k0);
            out["blocks"] = json!(partition.blocks);
            out["regularized_lcd"] = json!(reg.value);
            out["lcd_block"] = json!(reg.block);
            out["lcd_lower_bound"] = json!(regularized_lcd_lower_bound(n, geometry.c_dom, omega));
        }
    }
    Ok(out)
}

pub fn nodal_value(n: usize, p: f64, seed: u64) -> Result<Value> {
    check_n(n)?;
    let spec = EnsembleSpec::erdos_renyi(n, p, seed);
    let a = spec.generate()?;
    let g = Graph::from_adjacency(&a);
    let eig = eig_sym(&a)?;
    let zeta = ZetaRule::default();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let v = eig.vector(i);
        let r = nodal_report(&g, v, zeta.resolve(v))?;
        rows.push(json!([r.strong_domains.len(), r.weak_domains.len(), r.weak_eq_strong]));
    }
    Ok(json!({ "n": n, "edges": g.edge_count(), "rows": rows }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn spectrum(n: usize, p: f64, seed: u64) -> std::result::Result<String, JsError> {
    to_js(spectrum_value(n, p, seed))
}

#[wasm_bindgen]
pub fn eigenvector(n: usize, p: f64, seed: u64, index: usize, omega: f64) -> std::result::Result<String, JsError> {
    to_js(eigenvector_value(n, p, seed, index, omega))
}

#[wasm_bindgen]
pub fn nodal(n: usize, p: f64, seed: u64) -> std::result::Result<String, JsError> {
    to_js(nodal_value(n, p, seed))
}
