//! Concatenation planning: how many levels of a concatenated code make the
//! whole circuit fail rarely enough that the overall computation still meets
//! its required failure bound.
//!
//! The relations used here:
//!
//! * gate budget `ε_QC ≤ (p̂ − p)/2`,
//! * per-gate logical error after `N` levels `ε_N = ε_th (ε_0/ε_th)^(2^N)`,
//! * circuit failure `ε_QC = min(1, 𝒩 ε_N)`.
//!
//! Everything is evaluated in log space. Budget comparisons accept a relative
//! slack of [`BUDGET_RTOL`] so that parameter choices landing exactly on the
//! budget (for instance `𝒩 = 10¹²`, `ε_N = 10⁻¹³`, budget `0.1`) are decided
//! the way exact arithmetic would decide them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Highest concatenation level the planner will try.
pub const MAX_LEVELS: u32 = 64;

/// Relative slack on `ε_QC ≤ budget`.
pub const BUDGET_RTOL: f64 = 1e-10;

/// Logical errors below this are flushed to zero.
pub const FLUSH_BELOW: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FtError {
    #[error("infeasible: p_hat must exceed p (p_hat = {p_hat}, p = {p})")]
    Infeasible { p_hat: f64, p: f64 },
    #[error("eps0 = {eps0} is not below the threshold {eps_th} and the circuit already exceeds the budget")]
    AboveThreshold { eps0: f64, eps_th: f64 },
    #[error("no concatenation level up to {MAX_LEVELS} meets the budget")]
    CapExceeded,
    #[error("parameter {name} = {value} is out of range ({expected})")]
    BadParameter { name: &'static str, value: f64, expected: &'static str },
    #[error("bad grid: {0}")]
    BadGrid(String),
}

fn check(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<(), FtError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(FtError::BadParameter { name, value, expected })
    }
}

/// Scalar inputs of the planner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtParams {
    /// Elementary gate failure probability `ε_0`.
    pub eps0: f64,
    /// Threshold `ε_th`.
    pub eps_th: f64,
    /// Number of logical gates `𝒩`.
    pub gate_count: u64,
    /// Intrinsic failure bound of the ideal algorithm.
    pub p: f64,
    /// Required failure bound of the overall computation.
    pub p_hat: f64,
}

impl FtParams {
    pub fn validate(&self) -> Result<(), FtError> {
        check("eps0", self.eps0, self.eps0 > 0.0 && self.eps0 < 1.0, "0 < eps0 < 1")?;
        check("eps_th", self.eps_th, self.eps_th > 0.0 && self.eps_th < 1.0, "0 < eps_th < 1")?;
        check("gate_count", self.gate_count as f64, self.gate_count >= 1, "gate_count >= 1")?;
        check("p", self.p, (0.0..1.0).contains(&self.p), "0 <= p < 1")?;
        check("p_hat", self.p_hat, self.p_hat > 0.0 && self.p_hat <= 1.0, "0 < p_hat <= 1")?;
        epsilon_budget(self.p_hat, self.p).map(|_| ())
    }

    pub fn budget(&self) -> Result<f64, FtError> {
        epsilon_budget(self.p_hat, self.p)
    }
}

/// `p̂` when the requirement is stated as a success probability.
pub fn p_hat_from_success_target(success: f64) -> f64 {
    1.0 - success
}

/// Allowed implementation inaccuracy `α = p̂ − p`.
pub fn required_alpha(p_hat: f64, p: f64) -> Result<f64, FtError> {
    // Also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(p_hat > p) {
        return Err(FtError::Infeasible { p_hat, p });
    }
    Ok(p_hat - p)
}

/// Allowed circuit failure `(p̂ − p)/2`.
pub fn epsilon_budget(p_hat: f64, p: f64) -> Result<f64, FtError> {
    Ok(required_alpha(p_hat, p)? / 2.0)
}

fn ln_logical_gate_error(eps0: f64, eps_th: f64, levels: u32) -> f64 {
    eps_th.ln() + 2f64.powi(levels as i32) * (eps0.ln() - eps_th.ln())
}

/// `ε_N = ε_th (ε_0/ε_th)^(2^N)`.
pub fn logical_gate_error(eps0: f64, eps_th: f64, levels: u32) -> Result<f64, FtError> {
    check("eps0", eps0, eps0 > 0.0 && eps0 < 1.0, "0 < eps0 < 1")?;
    check("eps_th", eps_th, eps_th > 0.0 && eps_th < 1.0, "0 < eps_th < 1")?;
    if levels == 0 || eps0 == eps_th {
        return Ok(eps0);
    }
    let value = ln_logical_gate_error(eps0, eps_th, levels).exp();
    Ok(if value < FLUSH_BELOW { 0.0 } else { value.min(1.0) })
}

/// `min(1, 𝒩 ε_N)`.
pub fn circuit_failure(eps_n: f64, gate_count: u64) -> f64 {
    if eps_n <= 0.0 {
        return 0.0;
    }
    (eps_n.ln() + (gate_count as f64).ln()).exp().min(1.0)
}

/// Budget test shared by the planner and its certificates.
pub fn within_budget(eps_qc: f64, budget: f64) -> bool {
    eps_qc <= budget * (1.0 + BUDGET_RTOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub levels: u32,
    pub eps_n: f64,
    pub eps_qc: f64,
    pub budget: f64,
    pub alpha_required: f64,
    /// The real-valued level estimate `log₂[ln(2𝒩ε_th/(p̂−p)) / ln(ε_th/ε_0)]`,
    /// reported as 0 where its logarithms are undefined.
    pub closed_form_levels: f64,
}

/// Real-valued closed-form level estimate.
pub fn closed_form_levels(params: &FtParams) -> Result<f64, FtError> {
    let alpha = required_alpha(params.p_hat, params.p)?;
    let numerator = (2.0 * params.gate_count as f64 * params.eps_th / alpha).ln();
    let denominator = (params.eps_th / params.eps0).ln();
    if numerator <= 0.0 || denominator <= 0.0 {
        return Ok(0.0);
    }
    Ok((numerator / denominator).log2())
}

/// Smallest `N` whose circuit failure fits the budget.
pub fn required_levels(params: &FtParams) -> Result<PlanResult, FtError> {
    params.validate()?;
    let budget = params.budget()?;
    let alpha_required = required_alpha(params.p_hat, params.p)?;
    for levels in 0..=MAX_LEVELS {
        let eps_n = logical_gate_error(params.eps0, params.eps_th, levels)?;
        let eps_qc = circuit_failure(eps_n, params.gate_count);
        if within_budget(eps_qc, budget) {
            return Ok(PlanResult {
                levels,
                eps_n,
                eps_qc,
                budget,
                alpha_required,
                closed_form_levels: closed_form_levels(params)?,
            });
        }
        if params.eps0 >= params.eps_th {
            return Err(FtError::AboveThreshold { eps0: params.eps0, eps_th: params.eps_th });
        }
    }
    Err(FtError::CapExceeded)
}

/// Largest `ε_0` that meets the budget at a fixed number of levels, capped
/// at `ε_th`.
pub fn max_gate_error(levels: u32, eps_th: f64, gate_count: u64, p_hat: f64, p: f64) -> Result<f64, FtError> {
    check("eps_th", eps_th, eps_th > 0.0 && eps_th < 1.0, "0 < eps_th < 1")?;
    check("gate_count", gate_count as f64, gate_count >= 1, "gate_count >= 1")?;
    if levels > MAX_LEVELS {
        return Err(FtError::CapExceeded);
    }
    let budget = epsilon_budget(p_hat, p)?;
    let ln_headroom = budget.ln() - (gate_count as f64).ln() - eps_th.ln();
    if ln_headroom >= 0.0 {
        return Ok(eps_th);
    }
    let ln_eps0 = eps_th.ln() + ln_headroom / 2f64.powi(levels as i32);
    Ok(ln_eps0.exp().min(eps_th))
}

/// One point of the levels-versus-`ε_0` staircase. `levels` is `None` where
/// the planner reported the point infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub eps0: f64,
    pub levels: Option<u32>,
    pub eps_qc: Option<f64>,
    pub closed_form: f64,
}

/// Log-spaced grid from `eps0_min` to `eps0_max` inclusive.
pub fn log_grid(eps0_min: f64, eps0_max: f64, points: usize) -> Vec<f64> {
    let (lo, hi) = (eps0_min.ln(), eps0_max.ln());
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| match i {
            0 => eps0_min,
            i if i == points - 1 => eps0_max,
            i => (lo + step * i as f64).exp(),
        })
        .collect()
}

/// Required levels over a log-spaced `ε_0` grid; `base.eps0` is ignored.
pub fn tradeoff_curve(eps0_min: f64, eps0_max: f64, points: usize, base: &FtParams) -> Result<Vec<CurvePoint>, FtError> {
    if points < 2 {
        return Err(FtError::BadGrid(format!("need at least 2 points, got {points}")));
    }
    if !(eps0_min > 0.0 && eps0_min < eps0_max && eps0_max < base.eps_th) {
        return Err(FtError::BadGrid(format!(
            "need 0 < eps0_min < eps0_max < eps_th, got {eps0_min}, {eps0_max}, {}",
            base.eps_th
        )));
    }
    log_grid(eps0_min, eps0_max, points)
        .into_iter()
        .map(|eps0| {
            let params = FtParams { eps0, ..*base };
            match required_levels(&params) {
                Ok(plan) => Ok(CurvePoint {
                    eps0,
                    levels: Some(plan.levels),
                    eps_qc: Some(plan.eps_qc),
                    closed_form: plan.closed_form_levels,
                }),
                Err(FtError::AboveThreshold { .. } | FtError::CapExceeded) => Ok(CurvePoint {
                    eps0,
                    levels: None,
                    eps_qc: None,
                    closed_form: closed_form_levels(&params)?,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn caption(eps0: f64, alpha: f64) -> FtParams {
        FtParams { eps0, eps_th: 1e-9, gate_count: 1_000_000_000_000, p: 0.2, p_hat: 0.2 + alpha }
    }

    /// Direct linear-space evaluation, independent of the log-space path.
    fn oracle_eps_qc(eps0: f64, eps_th: f64, gate_count: f64, levels: u32) -> f64 {
        let mut ratio = eps0 / eps_th;
        for _ in 0..levels {
            ratio *= ratio;
        }
        (gate_count * eps_th * ratio).min(1.0)
    }

    fn oracle_levels(params: &FtParams) -> u32 {
        let budget = (params.p_hat - params.p) / 2.0;
        (0..=MAX_LEVELS)
            .find(|&n| {
                let value = if n == 0 {
                    (params.gate_count as f64 * params.eps0).min(1.0)
                } else {
                    oracle_eps_qc(params.eps0, params.eps_th, params.gate_count as f64, n)
                };
                value <= budget * (1.0 + 1e-9)
            })
            .unwrap()
    }

    #[test]
    fn alpha_and_budget() {
        assert_relative_eq!(required_alpha(0.4, 0.2).unwrap(), 0.2);
        assert_eq!(required_alpha(1.0, 0.0).unwrap(), 1.0);
        assert!(matches!(required_alpha(0.3, 0.3), Err(FtError::Infeasible { .. })));
        assert_relative_eq!(epsilon_budget(0.4, 0.2).unwrap(), 0.1);
        assert_eq!(epsilon_budget(1.0, 0.0).unwrap(), 0.5);
        assert_relative_eq!(epsilon_budget(0.21, 0.2).unwrap(), 0.005, max_relative = 1e-12);
        assert!(matches!(epsilon_budget(0.1, 0.2), Err(FtError::Infeasible { .. })));
    }

    #[test]
    fn logical_gate_error_examples() {
        assert_eq!(logical_gate_error(3e-4, 1e-2, 0).unwrap(), 3e-4);
        for levels in 0..6 {
            assert_eq!(logical_gate_error(1e-3, 1e-3, levels).unwrap(), 1e-3);
        }
        assert_relative_eq!(logical_gate_error(1e-5, 1e-4, 2).unwrap(), 1e-8, max_relative = 1e-14);
        assert_eq!(logical_gate_error(1e-9, 1e-2, 40).unwrap(), 0.0);
        assert!(matches!(logical_gate_error(0.0, 1e-2, 1), Err(FtError::BadParameter { name: "eps0", .. })));
    }

    #[test]
    fn circuit_failure_examples() {
        assert_relative_eq!(circuit_failure(1e-13, 1_000_000_000_000), 0.1, max_relative = 1e-14);
        assert_eq!(circuit_failure(0.0, 17), 0.0);
        assert_eq!(circuit_failure(1e-3, 10_000), 1.0);
    }

    #[test]
    fn planner_anchor_points() {
        let plan = required_levels(&caption(1e-10, 0.2)).unwrap();
        assert_eq!(plan.levels, 2);
        assert_relative_eq!(plan.eps_qc, 0.1, max_relative = 1e-12);
        assert_relative_eq!(plan.budget, 0.1, max_relative = 1e-15);
        assert_relative_eq!(plan.alpha_required, 0.2, max_relative = 1e-15);
        assert_eq!(required_levels(&caption(1e-11, 0.2)).unwrap().levels, 1);
        assert_eq!(required_levels(&caption(1e-10, 0.4)).unwrap().levels, 2);
        assert_eq!(required_levels(&caption(1e-11, 0.4)).unwrap().levels, 1);
        assert_eq!(required_levels(&caption(1e-14, 0.2)).unwrap().levels, 0);
    }

    #[test]
    fn planner_matches_linear_space_oracle() {
        for eps0 in [3e-10, 1e-10, 5e-11, 1e-11, 2e-12, 1e-13] {
            for alpha in [0.2, 0.4, 0.01] {
                let params = caption(eps0, alpha);
                assert_eq!(required_levels(&params).unwrap().levels, oracle_levels(&params), "{params:?}");
            }
        }
    }

    #[test]
    fn planner_errors() {
        let mut params = caption(1e-10, 0.2);
        params.p_hat = 0.1;
        assert!(matches!(required_levels(&params), Err(FtError::Infeasible { .. })));
        let above = caption(2e-9, 0.2);
        assert!(matches!(required_levels(&above), Err(FtError::AboveThreshold { .. })));
        let at = caption(1e-9, 0.2);
        assert!(matches!(required_levels(&at), Err(FtError::AboveThreshold { .. })));
        // Above threshold but already inside the budget: no concatenation needed.
        let easy = FtParams { eps0: 0.02, eps_th: 0.01, gate_count: 1, p: 0.0, p_hat: 0.5 };
        assert_eq!(required_levels(&easy).unwrap().levels, 0);
    }

    #[test]
    fn closed_form_is_reported() {
        let cf = required_levels(&caption(1e-10, 0.2)).unwrap().closed_form_levels;
        // log2(ln(1e4) / ln(10)) = 2
        assert_relative_eq!(cf, 2.0, max_relative = 1e-12);
        let small = FtParams { eps0: 1e-6, eps_th: 1e-3, gate_count: 10, p: 0.0, p_hat: 0.5 };
        assert_eq!(closed_form_levels(&small).unwrap(), 0.0);
    }

    #[test]
    fn max_gate_error_examples() {
        let eps0 = max_gate_error(2, 1e-9, 1_000_000_000_000, 0.4, 0.2).unwrap();
        assert_relative_eq!(eps0, 1e-10, max_relative = 1e-12);
        assert_eq!(required_levels(&caption(eps0, 0.2)).unwrap().levels, 2);
        assert_eq!(required_levels(&caption(eps0 * 1.001, 0.2)).unwrap().levels, 3);

        assert_relative_eq!(max_gate_error(0, 1e-2, 1000, 0.4, 0.2).unwrap(), 0.1 / 1000.0, max_relative = 1e-12);
        assert_eq!(max_gate_error(3, 1e-3, 10, 0.4, 0.2).unwrap(), 1e-3);
        assert!(matches!(max_gate_error(1, 1e-3, 10, 0.2, 0.4), Err(FtError::Infeasible { .. })));
    }

    #[test]
    fn tradeoff_examples() {
        let curve = tradeoff_curve(1e-11, 1e-10, 2, &caption(0.0, 0.2)).unwrap();
        assert_eq!(curve.len(), 2);
        assert_eq!(curve[0].eps0, 1e-11);
        assert_eq!(curve[0].levels, Some(1));
        assert_eq!(curve[1].eps0, 1e-10);
        assert_eq!(curve[1].levels, Some(2));

        let flat = tradeoff_curve(1e-16, 1e-14, 5, &caption(0.0, 0.2)).unwrap();
        assert!(flat.iter().all(|pt| pt.levels == Some(0)));

        let fine = tradeoff_curve(1e-13, 9e-10, 60, &caption(0.0, 0.2)).unwrap();
        for pair in fine.windows(2) {
            assert!(pair[0].eps0 < pair[1].eps0);
            assert!(pair[0].levels.unwrap() <= pair[1].levels.unwrap());
        }
    }

    #[test]
    fn tradeoff_grid_errors() {
        let base = caption(0.0, 0.2);
        assert!(matches!(tradeoff_curve(1e-12, 1e-10, 1, &base), Err(FtError::BadGrid(_))));
        assert!(matches!(tradeoff_curve(1e-12, 1e-9, 10, &base), Err(FtError::BadGrid(_))));
        assert!(matches!(tradeoff_curve(1e-10, 1e-12, 10, &base), Err(FtError::BadGrid(_))));
    }

    #[test]
    fn scaling_law_monotonicity() {
        for &(eps0, eps_th) in &[(1e-5, 1e-4), (2e-3, 1e-2)] {
            let below: Vec<f64> = (0..5).map(|n| logical_gate_error(eps0, eps_th, n).unwrap()).collect();
            assert!(below.windows(2).all(|w| w[1] < w[0]));
            let above: Vec<f64> = (0..4).map(|n| logical_gate_error(eps_th * 1.5, eps_th, n).unwrap()).collect();
            assert!(above.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
