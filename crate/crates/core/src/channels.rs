//! Kraus-operator channels, gate-list circuits, and their compilation into
//! ideal and noisy maps.
//!
//! A [`KrausChannel`] stores its operators as a sequence of stages. Applying
//! the channel runs the stages in order, so a long noisy circuit never needs
//! its (exponentially long) flat Kraus list. [`compose`] produces the flat
//! list `{K₂K₁}` explicitly and refuses when it would be too long.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::densmat::{check_unitary, CMatrix, DensityMatrix, LinalgError, MAX_DIM, ONE, TOL, ZERO};

/// Largest flat Kraus list [`compose`] will build.
pub const MAX_KRAUS: u128 = 1 << 32;

/// Largest register handled by [`Circuit`].
pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("noise strength {0} is outside [0, 1]")]
    BadStrength(f64),
    #[error("depolarizing noise acts on 1 or 2 qubits, not {0}")]
    BadArity(usize),
    #[error("Kraus operators are not trace preserving: ||sum K^dagger K - I||_F = {deviation:e}")]
    NotTracePreserving { deviation: f64 },
    #[error("Kraus operators have inconsistent shapes")]
    InconsistentShapes,
    #[error("composite channel would need {count} Kraus operators (limit {MAX_KRAUS})")]
    KrausExplosion { count: u128 },
    #[error("circuit needs between 1 and {MAX_QUBITS} qubits, got {0}")]
    BadQubitCount(usize),
    #[error("gate {gate} targets qubit {target} but the circuit has {num_qubits} qubits")]
    TargetOutOfRange { gate: usize, target: usize, num_qubits: usize },
    #[error("gate {0} lists the same qubit twice")]
    DuplicateTarget(usize),
    #[error("gate {gate} acts on {expected} qubit(s) but {found} target(s) were given")]
    WrongTargetCount { gate: usize, expected: usize, found: usize },
    #[error("unknown gate name {0:?}")]
    UnknownGate(String),
}

/// A completely positive trace-preserving map given by Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    stages: Vec<Vec<CMatrix>>,
}

fn completeness_deviation(ops: &[CMatrix]) -> f64 {
    let dim_in = ops[0].ncols();
    let mut sum = CMatrix::zeros(dim_in, dim_in);
    for k in ops {
        sum += k.adjoint() * k;
    }
    sum -= CMatrix::identity(dim_in, dim_in);
    sum.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl KrausChannel {
    /// Validates shapes and completeness `Σ K†K = I`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self, ChannelError> {
        let first = ops.first().ok_or(ChannelError::InconsistentShapes)?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 || ops.iter().any(|k| k.shape() != (dim_out, dim_in)) {
            return Err(ChannelError::InconsistentShapes);
        }
        for dim in [dim_in, dim_out] {
            if dim > MAX_DIM {
                return Err(LinalgError::TooLarge { dim }.into());
            }
        }
        let deviation = completeness_deviation(&ops);
        if deviation > TOL {
            return Err(ChannelError::NotTracePreserving { deviation });
        }
        Ok(Self { dim_in, dim_out, stages: vec![ops] })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, stages: vec![vec![CMatrix::identity(dim, dim)]] }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Length of the flat Kraus list, saturating at `u128::MAX`.
    pub fn kraus_len(&self) -> u128 {
        self.stages
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    /// The flat Kraus list. Fails when it would exceed [`MAX_KRAUS`] entries.
    pub fn kraus_ops(&self) -> Result<Vec<CMatrix>, ChannelError> {
        let count = self.kraus_len();
        if count > MAX_KRAUS {
            return Err(ChannelError::KrausExplosion { count });
        }
        let mut flat = self.stages[0].clone();
        for stage in &self.stages[1..] {
            flat = stage.iter().flat_map(|k2| flat.iter().map(move |k1| k2 * k1)).collect();
        }
        Ok(flat)
    }

    /// Sequential composition (`self` first) without flattening.
    pub fn then(mut self, next: KrausChannel) -> Result<Self, ChannelError> {
        if self.dim_out != next.dim_in {
            return Err(LinalgError::DimensionMismatch { expected: self.dim_out, found: next.dim_in }.into());
        }
        self.dim_out = next.dim_out;
        self.stages.extend(next.stages);
        Ok(self)
    }

    /// `K ⊗ I_ancilla` for every operator: the channel acting on the leading
    /// factor of a larger space.
    pub fn extend_with_identity(&self, ancilla_dim: usize) -> Result<Self, ChannelError> {
        if ancilla_dim == 1 {
            return Ok(self.clone());
        }
        let dim = self.dim_in.max(self.dim_out) * ancilla_dim;
        if dim > MAX_DIM {
            return Err(LinalgError::TooLarge { dim }.into());
        }
        let id = CMatrix::identity(ancilla_dim, ancilla_dim);
        Ok(Self {
            dim_in: self.dim_in * ancilla_dim,
            dim_out: self.dim_out * ancilla_dim,
            stages: self
                .stages
                .iter()
                .map(|s| s.iter().map(|k| k.kronecker(&id)).collect())
                .collect(),
        })
    }

    /// `Σ K ρ K†`, stage by stage.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
        if rho.dim() != self.dim_in {
            return Err(LinalgError::DimensionMismatch { expected: self.dim_in, found: rho.dim() }.into());
        }
        let mut current = rho.matrix().clone();
        for stage in &self.stages {
            let (rows, _) = stage[0].shape();
            let mut next = CMatrix::zeros(rows, rows);
            for k in stage {
                next += k * &current * k.adjoint();
            }
            current = next;
        }
        Ok(DensityMatrix::from_cptp_output(current))
    }
}

/// Applies `chan` to `rho`.
pub fn apply(chan: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
    chan.apply(rho)
}

/// Flat composite `{K₂K₁}`: `first` acts before `second`.
pub fn compose(first: &KrausChannel, second: &KrausChannel) -> Result<KrausChannel, ChannelError> {
    if first.dim_out != second.dim_in {
        return Err(LinalgError::DimensionMismatch { expected: first.dim_out, found: second.dim_in }.into());
    }
    let count = first.kraus_len().saturating_mul(second.kraus_len());
    if count > MAX_KRAUS {
        return Err(ChannelError::KrausExplosion { count });
    }
    let k1 = first.kraus_ops()?;
    let k2 = second.kraus_ops()?;
    let ops = k2.iter().flat_map(|b| k1.iter().map(move |a| b * a)).collect();
    Ok(KrausChannel { dim_in: first.dim_in, dim_out: second.dim_out, stages: vec![ops] })
}

pub fn unitary_channel(u: &CMatrix) -> Result<KrausChannel, ChannelError> {
    let dim = check_unitary(u)?;
    Ok(KrausChannel { dim_in: dim, dim_out: dim, stages: vec![vec![u.clone()]] })
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli(index: usize) -> CMatrix {
    match index {
        0 => CMatrix::identity(2, 2),
        1 => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        2 => CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
        3 => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)]),
        _ => unreachable!("pauli index"),
    }
}

/// Pauli strings on `n` qubits, identity first.
fn pauli_strings(n: usize) -> Vec<CMatrix> {
    let mut strings = vec![CMatrix::identity(1, 1)];
    for _ in 0..n {
        strings = strings
            .iter()
            .flat_map(|s| (0..4).map(move |p| s.kronecker(&pauli(p))))
            .collect();
    }
    strings
}

/// `ρ ↦ (1−λ)ρ + λ·tr(ρ)·I/d` on one or two qubits.
pub fn depolarizing(strength: f64, num_qubits_acted: usize) -> Result<KrausChannel, ChannelError> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(ChannelError::BadStrength(strength));
    }
    if !(1..=2).contains(&num_qubits_acted) {
        return Err(ChannelError::BadArity(num_qubits_acted));
    }
    let d = (1usize << num_qubits_acted) as f64;
    let strings = pauli_strings(num_qubits_acted);
    let mut ops = Vec::with_capacity(strings.len());
    let id_weight = (1.0 - strength + strength / (d * d)).sqrt();
    ops.push(strings[0].map(|z| z * id_weight));
    if strength > 0.0 {
        let weight = strength.sqrt() / d;
        ops.extend(strings[1..].iter().map(|p| p.map(|z| z * weight)));
    }
    KrausChannel::new(ops)
}

/// Fixed gate set accepted by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedGate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Cnot,
    Cz,
}

impl NamedGate {
    pub fn parse(name: &str) -> Result<Self, ChannelError> {
        Ok(match name.to_ascii_uppercase().as_str() {
            "I" | "ID" => Self::I,
            "X" => Self::X,
            "Y" => Self::Y,
            "Z" => Self::Z,
            "H" => Self::H,
            "S" => Self::S,
            "T" => Self::T,
            "CNOT" | "CX" => Self::Cnot,
            "CZ" => Self::Cz,
            _ => return Err(ChannelError::UnknownGate(name.to_string())),
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Self::Cnot | Self::Cz => 2,
            _ => 1,
        }
    }

    pub fn matrix(self) -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Self::I => pauli(0),
            Self::X => pauli(1),
            Self::Y => pauli(2),
            Self::Z => pauli(3),
            Self::H => CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
            Self::S => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(0.0, 1.0)]),
            Self::T => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(s, s)]),
            Self::Cnot => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(1, 1)] = ONE;
                m[(2, 3)] = ONE;
                m[(3, 2)] = ONE;
                m
            }
            Self::Cz => CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ONE, ONE, c(-1.0, 0.0)])),
        }
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::I => "I",
            Self::X => "X",
            Self::Y => "Y",
            Self::Z => "Z",
            Self::H => "H",
            Self::S => "S",
            Self::T => "T",
            Self::Cnot => "CNOT",
            Self::Cz => "CZ",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Named(NamedGate),
    Matrix(CMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Target qubits; for `CNOT` the first entry is the control.
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn named(gate: NamedGate, targets: &[usize]) -> Self {
        Self { kind: GateKind::Named(gate), targets: targets.to_vec() }
    }

    pub fn matrix(u: CMatrix, targets: &[usize]) -> Self {
        Self { kind: GateKind::Matrix(u), targets: targets.to_vec() }
    }

    pub fn local_unitary(&self) -> CMatrix {
        match &self.kind {
            GateKind::Named(g) => g.matrix(),
            GateKind::Matrix(m) => m.clone(),
        }
    }
}

/// An ordered gate list on `num_qubits` qubits. Qubit 0 is the most
/// significant tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, ChannelError> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(ChannelError::BadQubitCount(num_qubits));
        }
        for (index, gate) in gates.iter().enumerate() {
            let expected = match &gate.kind {
                GateKind::Named(g) => g.arity(),
                GateKind::Matrix(m) => {
                    let dim = check_unitary(m)?;
                    if !dim.is_power_of_two() || !(2..=4).contains(&dim) {
                        return Err(ChannelError::WrongTargetCount {
                            gate: index,
                            expected: dim.trailing_zeros() as usize,
                            found: gate.targets.len(),
                        });
                    }
                    dim.trailing_zeros() as usize
                }
            };
            if gate.targets.len() != expected {
                return Err(ChannelError::WrongTargetCount { gate: index, expected, found: gate.targets.len() });
            }
            for &target in &gate.targets {
                if target >= num_qubits {
                    return Err(ChannelError::TargetOutOfRange { gate: index, target, num_qubits });
                }
            }
            if gate.targets.len() == 2 && gate.targets[0] == gate.targets[1] {
                return Err(ChannelError::DuplicateTarget(index));
            }
        }
        Ok(Self { num_qubits, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

pub fn gate_count(circ: &Circuit) -> usize {
    circ.gates.len()
}

/// Embeds an operator on `targets` into the full `num_qubits` register.
pub fn embed(local: &CMatrix, targets: &[usize], num_qubits: usize) -> CMatrix {
    let dim = 1usize << num_qubits;
    let shifts: Vec<usize> = targets.iter().map(|&q| num_qubits - 1 - q).collect();
    let target_mask: usize = shifts.iter().map(|s| 1 << s).sum();
    let local_index = |i: usize| {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((i >> s) & 1))
    };
    let mut full = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            if row & !target_mask == col & !target_mask {
                full[(row, col)] = local[(local_index(row), local_index(col))];
            }
        }
    }
    full
}

/// The ideal map `ρ ↦ UρU†` with `U = U_L···U_1`.
pub fn compile_ideal(circ: &Circuit) -> Result<KrausChannel, ChannelError> {
    let n = circ.num_qubits;
    let dim = circ.dim();
    let u = circ
        .gates
        .iter()
        .fold(CMatrix::identity(dim, dim), |acc, g| embed(&g.local_unitary(), &g.targets, n) * acc);
    unitary_channel(&u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Depolarizing,
}

/// Per-gate noise: each gate is followed by this channel on its targets.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    #[serde(default)]
    pub strength: f64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, strength: 0.0 }
    }

    pub fn depolarizing(strength: f64) -> Self {
        Self { kind: NoiseKind::Depolarizing, strength }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(ChannelError::BadStrength(self.strength));
        }
        Ok(())
    }
}

/// The implemented map: every gate followed by its noise event. The result
/// holds one stage per gate.
pub fn compile_noisy(circ: &Circuit, noise: &NoiseModel) -> Result<KrausChannel, ChannelError> {
    noise.validate()?;
    let n = circ.num_qubits;
    let dim = circ.dim();
    let mut chan = KrausChannel::identity(dim);
    let mut first = true;
    for gate in &circ.gates {
        let u = embed(&gate.local_unitary(), &gate.targets, n);
        let stage = match noise.kind {
            NoiseKind::None => vec![u],
            NoiseKind::Depolarizing => {
                let local = depolarizing(noise.strength, gate.targets.len())?;
                local.stages[0]
                    .iter()
                    .map(|k| embed(k, &gate.targets, n) * &u)
                    .collect()
            }
        };
        let step = KrausChannel { dim_in: dim, dim_out: dim, stages: vec![stage] };
        chan = if first { step } else { chan.then(step)? };
        first = false;
    }
    Ok(chan)
}
