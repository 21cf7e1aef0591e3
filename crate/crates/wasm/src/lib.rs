//! Browser bindings. Every export takes plain numbers or JSON text and
//! returns JSON text; the page in `www/` draws the results.

use ftqc::channels::NoiseModel;
use ftqc::ftcalc::{self, FtParams};
use ftqc::io::{to_rounded_json, CircuitSpec, ComputationSpec};
use ftqc::qcc::{certify_combined_bound, LinkingMaps, QccError};
use ftqc::vote;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Staircase of required levels. Rows: `{eps0, levels, eps_qc, closed_form}`,
/// with `levels = -1` where no level fits.
pub fn tradeoff_json(
    eps_th: f64,
    gate_count: f64,
    p: f64,
    p_hat: f64,
    eps0_min: f64,
    eps0_max: f64,
    points: usize,
) -> Result<String, String> {
    if !(gate_count >= 1.0 && gate_count.fract() == 0.0) {
        return Err(format!("gate count must be a positive integer, got {gate_count}"));
    }
    let base = FtParams { eps0: f64::NAN, eps_th, gate_count: gate_count as u64, p, p_hat };
    let curve = ftcalc::tradeoff_curve(eps0_min, eps0_max, points, &base).map_err(|e| e.to_string())?;
    let rows: Vec<_> = curve
        .iter()
        .map(|pt| {
            json!({
                "eps0": pt.eps0,
                "levels": pt.levels.map_or(-1, i64::from),
                "eps_qc": pt.eps_qc,
                "closed_form": pt.closed_form,
            })
        })
        .collect();
    to_rounded_json(&rows).map_err(|e| e.to_string())
}

/// Majority-vote success for every odd `k` up to `k_max`, plus the smallest
/// `k` reaching `target` (null when none does within the cap).
pub fn vote_curve_json(per_run_failure: f64, k_max: u64, target: f64) -> Result<String, String> {
    let points = (1..=k_max.max(1))
        .step_by(2)
        .map(|k| {
            vote::majority_success(per_run_failure, k)
                .map(|s| json!({ "k": k, "success": s }))
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let needed = vote::min_repetitions(per_run_failure, target).ok();
    to_rounded_json(&json!({ "points": points, "target": target, "min_repetitions": needed }))
        .map_err(|e| e.to_string())
}

/// Runs the combined-bound check for a circuit under depolarizing noise.
/// A violated bound still returns the report, with `bound_holds = false`.
pub fn verify_json(circuit: &str, computation: &str, strength: f64) -> Result<String, String> {
    let circuit: CircuitSpec = serde_json::from_str(circuit).map_err(|e| format!("circuit: {e}"))?;
    let computation: ComputationSpec = serde_json::from_str(computation).map_err(|e| format!("computation: {e}"))?;
    let circuit = circuit.build().map_err(|e| format!("circuit: {e}"))?;
    let computation = computation.build(circuit.num_qubits()).map_err(|e| format!("computation: {e}"))?;
    let noise = NoiseModel::depolarizing(strength);
    noise.validate().map_err(|e| e.to_string())?;
    let report = match certify_combined_bound(&circuit, &noise, &computation, &LinkingMaps::identity()) {
        Ok(report) => report,
        Err(QccError::BoundViolated { report, .. }) => *report,
        Err(e) => return Err(e.to_string()),
    };
    to_rounded_json(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn tradeoff(
    eps_th: f64,
    gate_count: f64,
    p: f64,
    p_hat: f64,
    eps0_min: f64,
    eps0_max: f64,
    points: usize,
) -> Result<String, JsError> {
    tradeoff_json(eps_th, gate_count, p, p_hat, eps0_min, eps0_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = voteCurve)]
pub fn vote_curve(per_run_failure: f64, k_max: u32, target: f64) -> Result<String, JsError> {
    vote_curve_json(per_run_failure, k_max.into(), target).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify(circuit: &str, computation: &str, strength: f64) -> Result<String, JsError> {
    verify_json(circuit, computation, strength).map_err(|e| JsError::new(&e))
}
