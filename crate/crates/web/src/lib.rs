//! Browser bindings. Each export returns a JSON string; the plain functions
//! behind them are ordinary Rust and are tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use projrep::moduli::{self, FgAbelianGroup};
use projrep::skew::{self, SkewMatrixZm};
use projrep::unitary::{self, ConstructOptions};

/// Enumeration budget for one browser call.
pub const WEB_CAP: u64 = 300_000;
/// Largest tuple dimension rendered in the page.
pub const WEB_MAX_DIM: u64 = 64;

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// `N(n, m)` for `1 <= n <= n_max`, `1 <= m <= m_max`; cells over budget are
/// `null`.
pub fn count_table_json(n_max: usize, m_max: u64) -> Result<String, String> {
    if n_max == 0 || m_max == 0 || n_max > 6 || m_max > 16 {
        return Err("choose 1 <= n <= 6 and 1 <= m <= 16".into());
    }
    let rows: Vec<Value> = (1..=n_max)
        .map(|n| {
            let cells: Vec<Value> = (1..=m_max)
                .map(|m| skew::count_admissible(n, m, WEB_CAP).map_or(Value::Null, Value::from))
                .collect();
            json!({ "n": n, "counts": cells })
        })
        .collect();
    Ok(json!({ "m_max": m_max, "rows": rows }).to_string())
}

pub fn decompose_json(torsion: &[u64], rank: usize, m: u64) -> Result<String, String> {
    let gamma = FgAbelianGroup::new(torsion.to_vec(), rank).map_err(err)?;
    let report = moduli::decompose(&gamma, m, WEB_CAP).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

/// Builds the tuple for `D` and returns, per matrix, the modulus and phase
/// (in turns) of every entry, together with the commutator phases and the
/// checks read back off the tuple.
pub fn construct_json(n: usize, m: u64, upper: &[u64]) -> Result<String, String> {
    if m > WEB_MAX_DIM {
        return Err(format!("m is limited to {WEB_MAX_DIM} in the browser"));
    }
    let d = SkewMatrixZm::new(n, m, upper.to_vec()).map_err(err)?;
    let tuple = unitary::construct_tuple(&d, &ConstructOptions::default()).map_err(err)?;
    let dim = tuple.dim();
    let matrices: Vec<Value> = tuple
        .matrices()
        .iter()
        .map(|a| {
            let cells: Vec<Value> = (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            let z = a[(i, j)];
                            let r = z.norm();
                            if r < 1e-12 {
                                Value::Null
                            } else {
                                json!([r, (z.arg() / std::f64::consts::TAU).rem_euclid(1.0)])
                            }
                        })
                        .collect()
                })
                .collect();
            Value::Array(cells)
        })
        .collect();
    let report = unitary::verify_tuple(&tuple, m, unitary::DEFAULT_TOL).map_err(err)?;
    Ok(json!({
        "dim": dim,
        "sigma": report.sigma,
        "matrices": matrices,
        "extracted": report.d.upper(),
        "max_commutator_residual": report.max_commutator_residual,
        "commutant_dimension": report.commutant_dimension,
        "eigen": report.eigen,
        "pass": report.pass,
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn count_table(n_max: usize, m_max: u32) -> Result<String, JsValue> {
    js(count_table_json(n_max, m_max.into()))
}

#[wasm_bindgen]
pub fn decompose(torsion: Vec<u32>, rank: usize, m: u32) -> Result<String, JsValue> {
    let torsion: Vec<u64> = torsion.into_iter().map(u64::from).collect();
    js(decompose_json(&torsion, rank, m.into()))
}

#[wasm_bindgen]
pub fn construct(n: usize, m: u32, upper: Vec<u32>) -> Result<String, JsValue> {
    let upper: Vec<u64> = upper.into_iter().map(u64::from).collect();
    js(construct_json(n, m.into(), &upper))
}
