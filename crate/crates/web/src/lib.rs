//! Browser bindings. Every export takes and returns JSON text; errors become
//! JS exceptions carrying the message.

pub mod api;

use wasm_bindgen::prelude::*;

fn to_js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Rate and NPV curves over rotation length for an ansatz cycle.
#[wasm_bindgen(js_name = cycleCurves)]
pub fn cycle_curves(params: &str) -> Result<String, JsError> {
    to_js(api::json_call(params, api::cycle_curves))
}

/// All real and complex IRRs of a `time,amount` CSV.
#[wasm_bindgen(js_name = irrRoots)]
pub fn irr_roots(csv: &str) -> Result<String, JsError> {
    to_js(api::irr_roots(csv).and_then(|r| serde_json::to_string(&r).map_err(|e| e.to_string())))
}

/// Estate capitalization and return for a linear age density.
#[wasm_bindgen(js_name = estateReport)]
pub fn estate_report(params: &str) -> Result<String, JsError> {
    to_js(api::json_call(params, api::estate_report))
}
