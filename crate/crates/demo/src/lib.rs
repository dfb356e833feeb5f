//! WebAssembly bindings for the browser demo.
//!
//! Every export returns a flat `Float64Array`; the page splits it into series.
//! Grids are capped at [`MAX_RESOLUTION`] to keep the page responsive.

use wasm_bindgen::prelude::*;

use walsh_summability::maximal::IndexSubsequence;
use walsh_summability::sampling::named_function_1d;
use walsh_summability::summability::{apply_mean, kernel_decomposition, kernel_v, parse_matrix, upsilon};
use walsh_summability::{GridFunction1D, GridSpec, MatrixFamily, TransformationMatrix};

pub const MAX_RESOLUTION: u32 = 12;
/// Largest index plotted on the υ curve.
pub const MAX_UPSILON_INDEX: u64 = 1 << 22;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn js(result: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    result.map_err(|e| JsError::new(&e))
}

fn spec(resolution: u32) -> Result<GridSpec, String> {
    if resolution > MAX_RESOLUTION {
        return Err(fail(format!("resolution is capped at {MAX_RESOLUTION} in the demo")));
    }
    GridSpec::new(resolution).map_err(fail)
}

/// Only closed-form families; file-backed matrices make no sense in a browser.
fn matrix(name: &str) -> Result<TransformationMatrix, String> {
    if name.contains('/') || name.starts_with("custom") || name.starts_with("cesaro-seq") {
        return Err(fail("the demo accepts fejer, cesaro:α, nlog and identity"));
    }
    parse_matrix(name).map_err(fail)
}

/// `[V_n | V₁ | V₂]`, each of length `2^K`. The parts are zero for `n = 0`.
pub fn kernel_parts(name: &str, n: u64, resolution: u32) -> Result<Vec<f64>, String> {
    let s = spec(resolution)?;
    let m = matrix(name)?;
    let v = kernel_v(&m, n, s).map_err(fail)?;
    let (v1, v2) = if n == 0 {
        (GridFunction1D::zeros(s), GridFunction1D::zeros(s))
    } else {
        kernel_decomposition(&m, n, s).map_err(fail)?
    };
    let mut out = v.into_samples();
    out.extend_from_slice(v1.samples());
    out.extend_from_slice(v2.samples());
    Ok(out)
}

/// `[f | T_n f]`, each of length `2^K`, for a named test function.
pub fn mean_of(name: &str, n: u64, resolution: u32, function: &str) -> Result<Vec<f64>, String> {
    let s = spec(resolution)?;
    let m = matrix(name)?;
    let f = named_function_1d(function, s).map_err(fail)?;
    let mean = apply_mean(&m, n, &f).map_err(fail)?;
    let mut out = f.into_samples();
    out.extend_from_slice(mean.samples());
    Ok(out)
}

/// `[n₀, υ(n₀), n₁, υ(n₁), …]` along a subsequence such as `alternating:0..8`.
pub fn upsilon_pairs(name: &str, subsequence: &str) -> Result<Vec<f64>, String> {
    let m = matrix(name)?;
    let seq: IndexSubsequence = subsequence.parse().map_err(fail)?;
    let tabled = matches!(m.family(), MatrixFamily::Cesaro { .. } | MatrixFamily::NorlundLog);
    if tabled && seq.max() > MAX_UPSILON_INDEX {
        return Err(fail(format!(
            "indices above {MAX_UPSILON_INDEX} are too slow for this family"
        )));
    }
    let mut out = Vec::with_capacity(2 * seq.indices().len());
    for &n in seq.indices().iter().filter(|&&n| n > 0) {
        out.push(n as f64);
        out.push(upsilon(&m, n).map_err(fail)?);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = kernelParts)]
pub fn kernel_parts_js(matrix: &str, n: u32, resolution: u32) -> Result<Vec<f64>, JsError> {
    js(kernel_parts(matrix, n as u64, resolution))
}

#[wasm_bindgen(js_name = meanOf)]
pub fn mean_of_js(matrix: &str, n: u32, resolution: u32, function: &str) -> Result<Vec<f64>, JsError> {
    js(mean_of(matrix, n as u64, resolution, function))
}

#[wasm_bindgen(js_name = upsilonPairs)]
pub fn upsilon_pairs_js(matrix: &str, subsequence: &str) -> Result<Vec<f64>, JsError> {
    js(upsilon_pairs(matrix, subsequence))
}
