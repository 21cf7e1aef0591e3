//! Implementation inaccuracy and the combined failure bound `p′ = p + α`.
//!
//! For a computation whose ideal circuit fails on input `x` with probability
//! at most `p`, and whose implemented map is within trace distance `α` of
//! the ideal one on that input, the implemented computation fails with
//! probability at most `p + α`. [`certify_combined_bound`] checks this
//! per input on an explicit simulation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{compile_ideal, compile_noisy, ChannelError, Circuit, KrausChannel, NoiseModel};
use crate::densmat::{partial_trace, state_distance, tensor, DensityMatrix, LinalgError, MAX_DIM, TOL};
use crate::kitaev::{ideal_failure_bound, KitaevError, OverallComputation};
use crate::sample::{random_pure_state, stream_rng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QccError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Kitaev(#[from] KitaevError),
    #[error("probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("ancilla dimension must be at least 1")]
    BadAncilla,
    #[error("random search needs at least one trial")]
    NoTrials,
    #[error(
        "combined bound violated on input {input:?}: failure {failure} > p + alpha = {bound}; \
         the inequality is a theorem, so the numerics are broken"
    )]
    BoundViolated { input: String, failure: f64, bound: f64, report: Box<QccReport> },
}

/// Logical ↔ computational maps: append `|0⟩⟨0|` on an ancilla of dimension
/// `ancilla_dim`, and trace it out again.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingMaps {
    pub ancilla_dim: usize,
}

impl Default for LinkingMaps {
    fn default() -> Self {
        Self::identity()
    }
}

impl LinkingMaps {
    pub fn identity() -> Self {
        Self { ancilla_dim: 1 }
    }

    pub fn with_ancilla(ancilla_dim: usize) -> Result<Self, QccError> {
        if ancilla_dim == 0 {
            return Err(QccError::BadAncilla);
        }
        Ok(Self { ancilla_dim })
    }

    fn check(&self) -> Result<(), QccError> {
        if self.ancilla_dim == 0 {
            return Err(QccError::BadAncilla);
        }
        Ok(())
    }
}

/// Logical → computational.
pub fn lift(rho: &DensityMatrix, link: &LinkingMaps) -> Result<DensityMatrix, QccError> {
    link.check()?;
    if link.ancilla_dim == 1 {
        return Ok(rho.clone());
    }
    let dim = rho.dim() * link.ancilla_dim;
    if dim > MAX_DIM {
        return Err(LinalgError::TooLarge { dim }.into());
    }
    Ok(tensor(rho, &DensityMatrix::basis(link.ancilla_dim, 0))?)
}

/// Computational → logical.
pub fn lower(rho: &DensityMatrix, link: &LinkingMaps) -> Result<DensityMatrix, QccError> {
    link.check()?;
    if link.ancilla_dim == 1 {
        return Ok(rho.clone());
    }
    if !rho.dim().is_multiple_of(link.ancilla_dim) {
        return Err(LinalgError::DimensionMismatch { expected: link.ancilla_dim, found: rho.dim() }.into());
    }
    Ok(partial_trace(rho, rho.dim() / link.ancilla_dim, link.ancilla_dim)?)
}

/// `lower(P(lift(ρ)))`.
fn implemented_output(p: &KrausChannel, link: &LinkingMaps, rho: &DensityMatrix) -> Result<DensityMatrix, QccError> {
    lower(&p.apply(&lift(rho, link)?)?, link)
}

/// `‖lower(P(lift(ρ))) − G(ρ)‖₁` for one state.
pub fn implementation_inaccuracy(
    p: &KrausChannel,
    g: &KrausChannel,
    link: &LinkingMaps,
    rho: &DensityMatrix,
) -> Result<f64, QccError> {
    let actual = implemented_output(p, link, rho)?;
    let ideal = g.apply(rho)?;
    Ok(state_distance(&actual, &ideal)?)
}

/// `α`: the largest inaccuracy over the computation's initial states.
pub fn alpha_over_inputs(
    p: &KrausChannel,
    g: &KrausChannel,
    link: &LinkingMaps,
    comp: &OverallComputation,
) -> Result<f64, QccError> {
    comp.states()
        .iter()
        .try_fold(0.0_f64, |acc, rho| Ok(acc.max(implementation_inaccuracy(p, g, link, rho)?)))
}

/// Lower estimate of `sup_ρ` of the inaccuracy over Haar-random pure states.
/// Trial `i` draws from stream `i` of `seed`, so the result does not depend
/// on evaluation order.
pub fn alpha_random_search(
    p: &KrausChannel,
    g: &KrausChannel,
    link: &LinkingMaps,
    trials: usize,
    seed: u64,
) -> Result<f64, QccError> {
    if trials == 0 {
        return Err(QccError::NoTrials);
    }
    let dim = g.dim_in();
    let mut best = 0.0_f64;
    for trial in 0..trials {
        let rho = random_pure_state(dim, &mut stream_rng(seed, trial as u64));
        best = best.max(implementation_inaccuracy(p, g, link, &rho)?);
    }
    Ok(best.clamp(0.0, 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub x: String,
    pub ideal_success: f64,
    pub actual_success: f64,
    pub inaccuracy_x: f64,
}

impl InputRecord {
    pub fn failure(&self) -> f64 {
        1.0 - self.actual_success
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QccReport {
    pub per_input: Vec<InputRecord>,
    pub alpha: f64,
    pub p: f64,
    pub bound_holds: bool,
    pub worst_margin: f64,
}

/// Simulates the noisy circuit on every input and checks
/// `1 − Pr_x(F(x)) ≤ p + α` for each. A violation is returned as
/// [`QccError::BoundViolated`].
pub fn certify_combined_bound(
    circ: &Circuit,
    noise: &NoiseModel,
    comp: &OverallComputation,
    link: &LinkingMaps,
) -> Result<QccReport, QccError> {
    link.check()?;
    if comp.dim() != circ.dim() {
        return Err(LinalgError::DimensionMismatch { expected: circ.dim(), found: comp.dim() }.into());
    }
    let p = ideal_failure_bound(circ, comp)?;
    let ideal = compile_ideal(circ)?;
    let actual = compile_noisy(circ, noise)?.extend_with_identity(link.ancilla_dim)?;

    let mut per_input = Vec::with_capacity(comp.inputs().len());
    for (index, (x, rho)) in comp.inputs().iter().zip(comp.states()).enumerate() {
        let ideal_out = ideal.apply(rho)?;
        let actual_out = implemented_output(&actual, link, rho)?;
        per_input.push(InputRecord {
            x: x.clone(),
            ideal_success: comp.success_for_state(index, &ideal_out),
            actual_success: comp.success_for_state(index, &actual_out),
            inaccuracy_x: state_distance(&actual_out, &ideal_out)?.min(2.0),
        });
    }
    let alpha = per_input.iter().fold(0.0_f64, |acc, r| acc.max(r.inaccuracy_x));
    let bound = p + alpha;
    let worst_margin = per_input
        .iter()
        .map(|r| bound - r.failure())
        .fold(f64::INFINITY, f64::min);
    let violation = per_input.iter().find(|r| r.failure() > bound + TOL).cloned();
    let report = QccReport { per_input, alpha, p, bound_holds: violation.is_none(), worst_margin };
    match violation {
        None => Ok(report),
        Some(r) => Err(QccError::BoundViolated {
            input: r.x.clone(),
            failure: r.failure(),
            bound,
            report: Box::new(report),
        }),
    }
}

/// `(1−ε)·ideal + ε·ρ_err`.
pub fn mix_error_state(ideal_out: &DensityMatrix, rho_err: &DensityMatrix, eps_qc: f64) -> Result<DensityMatrix, QccError> {
    if !(0.0..=1.0).contains(&eps_qc) {
        return Err(QccError::BadProbability(eps_qc));
    }
    if ideal_out.dim() != rho_err.dim() {
        return Err(LinalgError::DimensionMismatch { expected: ideal_out.dim(), found: rho_err.dim() }.into());
    }
    let m = ideal_out.matrix().map(|z| z * (1.0 - eps_qc)) + rho_err.matrix().map(|z| z * eps_qc);
    Ok(DensityMatrix::from_cptp_output(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingCheck {
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Distance of the mixture from the ideal output against the `2ε` ceiling.
pub fn mixing_inaccuracy_bound_check(
    ideal_out: &DensityMatrix,
    rho_err: &DensityMatrix,
    eps_qc: f64,
) -> Result<MixingCheck, QccError> {
    let mixed = mix_error_state(ideal_out, rho_err, eps_qc)?;
    let measured = state_distance(&mixed, ideal_out)?;
    let bound = 2.0 * eps_qc;
    Ok(MixingCheck { measured, bound, holds: measured <= bound + TOL })
}
