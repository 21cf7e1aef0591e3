//! The overall computation: classical input, initialisation, quantum map,
//! readout, classical output.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::channels::{compile_ideal, ChannelError, Circuit, KrausChannel};
use crate::densmat::{expectation, DensityMatrix, HermitianOperator, LinalgError, TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KitaevError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("{count} inputs do not fit in {num_qubits} qubits")]
    TooManyInputs { count: usize, num_qubits: usize },
    #[error("{0:?} is not a bit string of the expected length")]
    BadBitstring(String),
    #[error("unknown input {0:?}")]
    UnknownInput(String),
    #[error("truth table maps to unknown output {0:?}")]
    UnknownOutput(String),
    #[error("truth table has no entry for input {0:?}")]
    IncompleteTruthTable(String),
    #[error("label {0:?} appears twice")]
    DuplicateLabel(String),
    #[error("input and output sets must be non-empty")]
    Empty,
    #[error("expected {expected} {what}, found {found}")]
    CountMismatch { what: &'static str, expected: usize, found: usize },
    #[error("readout effects do not sum to the identity (worst entry deviation {deviation:e})")]
    PovmIncomplete { deviation: f64 },
    #[error("qubit {qubit} is out of range for a {num_qubits}-qubit register")]
    BadQubit { qubit: usize, num_qubits: usize },
}

fn parse_bits(label: &str, width: usize) -> Result<usize, KitaevError> {
    if label.len() != width || !label.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(KitaevError::BadBitstring(label.to_string()));
    }
    Ok(label.bytes().fold(0, |acc, b| (acc << 1) | (b - b'0') as usize))
}

/// `x ↦ |x⟩⟨x|` for bit-string labels; qubit 0 is the leftmost character.
pub fn basis_encoding(num_qubits: usize, inputs: &[String]) -> Result<Vec<DensityMatrix>, KitaevError> {
    if num_qubits < usize::BITS as usize && inputs.len() > 1usize << num_qubits {
        return Err(KitaevError::TooManyInputs { count: inputs.len(), num_qubits });
    }
    let dim = 1usize << num_qubits;
    inputs
        .iter()
        .map(|x| parse_bits(x, num_qubits).map(|i| DensityMatrix::basis(dim, i)))
        .collect()
}

/// Projective readout of `qubits`; the effect for label `y` projects onto
/// basis states whose measured bits spell `y`.
pub fn qubit_readout(num_qubits: usize, qubits: &[usize], outputs: &[String]) -> Result<Vec<HermitianOperator>, KitaevError> {
    for &qubit in qubits {
        if qubit >= num_qubits {
            return Err(KitaevError::BadQubit { qubit, num_qubits });
        }
    }
    let dim = 1usize << num_qubits;
    outputs
        .iter()
        .map(|y| {
            let wanted = parse_bits(y, qubits.len())?;
            let diag = (0..dim).map(|i| {
                let bits = qubits.iter().fold(0, |acc, &q| (acc << 1) | ((i >> (num_qubits - 1 - q)) & 1));
                if bits == wanted { 1.0 } else { 0.0 }
            });
            let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                dim,
                diag.map(|v| num_complex::Complex64::new(v, 0.0)),
            ));
            Ok(HermitianOperator::new(m)?)
        })
        .collect()
}

/// Projective readout of every qubit.
pub fn computational_basis_readout(num_qubits: usize, outputs: &[String]) -> Result<Vec<HermitianOperator>, KitaevError> {
    let all: Vec<usize> = (0..num_qubits).collect();
    qubit_readout(num_qubits, &all, outputs)
}

/// Two-outcome parity readout over all qubits; `"0"` is even, `"1"` odd.
pub fn parity_readout(num_qubits: usize, outputs: &[String]) -> Result<Vec<HermitianOperator>, KitaevError> {
    let dim = 1usize << num_qubits;
    outputs
        .iter()
        .map(|y| {
            let wanted = parse_bits(y, 1)? as u32;
            let diag = (0..dim).map(|i| if (i as u32).count_ones() % 2 == wanted { 1.0 } else { 0.0 });
            let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                dim,
                diag.map(|v| num_complex::Complex64::new(v, 0.0)),
            ));
            Ok(HermitianOperator::new(m)?)
        })
        .collect()
}

/// `(X, Y, F, I_dm, {E_y})`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverallComputation {
    inputs: Vec<String>,
    outputs: Vec<String>,
    /// `truth_table[i]` indexes `outputs`.
    truth_table: Vec<usize>,
    init: Vec<DensityMatrix>,
    effects: Vec<HermitianOperator>,
}

fn unique(labels: &[String]) -> Result<(), KitaevError> {
    let mut seen = HashSet::new();
    for label in labels {
        if !seen.insert(label) {
            return Err(KitaevError::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

impl OverallComputation {
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        truth_table: &BTreeMap<String, String>,
        init: Vec<DensityMatrix>,
        effects: Vec<HermitianOperator>,
    ) -> Result<Self, KitaevError> {
        if inputs.is_empty() || outputs.is_empty() {
            return Err(KitaevError::Empty);
        }
        unique(&inputs)?;
        unique(&outputs)?;
        if init.len() != inputs.len() {
            return Err(KitaevError::CountMismatch { what: "initial states", expected: inputs.len(), found: init.len() });
        }
        if effects.len() != outputs.len() {
            return Err(KitaevError::CountMismatch { what: "readout effects", expected: outputs.len(), found: effects.len() });
        }
        let table = inputs
            .iter()
            .map(|x| {
                let y = truth_table.get(x).ok_or_else(|| KitaevError::IncompleteTruthTable(x.clone()))?;
                outputs.iter().position(|o| o == y).ok_or_else(|| KitaevError::UnknownOutput(y.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(extra) = truth_table.keys().find(|k| !inputs.contains(k)) {
            return Err(KitaevError::UnknownInput(extra.clone()));
        }

        let dim = init[0].dim();
        for state in &init {
            if state.dim() != dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, found: state.dim() }.into());
            }
        }
        let mut total = HermitianOperator::identity(dim).scale(0.0);
        for effect in &effects {
            if effect.dim() != dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, found: effect.dim() }.into());
            }
            effect.check_effect()?;
            total = total.add(effect)?;
        }
        let deviation = (total.matrix() - HermitianOperator::identity(dim).matrix())
            .iter()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()));
        if deviation > TOL {
            return Err(KitaevError::PovmIncomplete { deviation });
        }
        Ok(Self { inputs, outputs, truth_table: table, init, effects })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn dim(&self) -> usize {
        self.init[0].dim()
    }

    pub fn initial_state(&self, x: &str) -> Result<&DensityMatrix, KitaevError> {
        Ok(&self.init[self.input_index(x)?])
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.init
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    /// `F(x)`.
    pub fn expected_output(&self, x: &str) -> Result<&str, KitaevError> {
        Ok(&self.outputs[self.truth_table[self.input_index(x)?]])
    }

    pub fn input_index(&self, x: &str) -> Result<usize, KitaevError> {
        self.inputs
            .iter()
            .position(|i| i == x)
            .ok_or_else(|| KitaevError::UnknownInput(x.to_string()))
    }

    /// `Pr_x(F(x))` for the input at `index` after the map `chan`.
    pub(crate) fn success_at(&self, chan: &KrausChannel, index: usize) -> Result<f64, KitaevError> {
        let out = chan.apply(&self.init[index])?;
        Ok(expectation(&out, &self.effects[self.truth_table[index]]))
    }

    /// `Pr_x(F(x))` for a final state already computed for the input at `index`.
    pub(crate) fn success_for_state(&self, index: usize, out: &DensityMatrix) -> f64 {
        expectation(out, &self.effects[self.truth_table[index]])
    }
}

/// `Pr_x(y)` over every output label, in the order of `comp.outputs()`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub probabilities: Vec<(String, f64)>,
}

impl OutcomeDistribution {
    pub fn get(&self, y: &str) -> Option<f64> {
        self.probabilities.iter().find(|(label, _)| label == y).map(|(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().map(|(_, p)| p).sum()
    }
}

pub fn outcome_distribution(chan: &KrausChannel, comp: &OverallComputation, x: &str) -> Result<OutcomeDistribution, KitaevError> {
    let state = comp.initial_state(x)?;
    let out = chan.apply(state)?;
    let probabilities = comp
        .outputs
        .iter()
        .zip(&comp.effects)
        .map(|(y, e)| (y.clone(), expectation(&out, e)))
        .collect();
    Ok(OutcomeDistribution { probabilities })
}

/// The tightest intrinsic failure bound `p = max_x (1 − Pr_x(F(x)))` of the
/// ideal circuit.
pub fn ideal_failure_bound(circ: &Circuit, comp: &OverallComputation) -> Result<f64, KitaevError> {
    let ideal = compile_ideal(circ)?;
    let mut worst = 0.0_f64;
    for index in 0..comp.inputs.len() {
        worst = worst.max(1.0 - comp.success_at(&ideal, index)?);
    }
    Ok(worst.clamp(0.0, 1.0))
}

/// `1 − Pr_x(F(x))` under the implemented map `chan`.
pub fn actual_failure_probability(chan: &KrausChannel, comp: &OverallComputation, x: &str) -> Result<f64, KitaevError> {
    let index = comp.input_index(x)?;
    Ok((1.0 - comp.success_at(chan, index)?).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, unitary_channel, Gate, NamedGate};
    use approx::assert_abs_diff_eq;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn table(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn one_qubit(pairs: &[(&str, &str)]) -> OverallComputation {
        let bits = labels(&["0", "1"]);
        OverallComputation::new(
            bits.clone(),
            bits.clone(),
            &table(pairs),
            basis_encoding(1, &bits).unwrap(),
            computational_basis_readout(1, &bits).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn basis_encoding_examples() {
        let states = basis_encoding(1, &labels(&["0", "1"])).unwrap();
        assert_eq!(states[0], DensityMatrix::basis(2, 0));
        assert_eq!(states[1], DensityMatrix::basis(2, 1));
        let states = basis_encoding(2, &labels(&["10"])).unwrap();
        assert_eq!(states[0], DensityMatrix::basis(4, 2));
    }

    #[test]
    fn basis_encoding_errors() {
        assert!(matches!(
            basis_encoding(1, &labels(&["0", "1", "0"])),
            Err(KitaevError::TooManyInputs { count: 3, num_qubits: 1 })
        ));
        assert!(matches!(basis_encoding(2, &labels(&["1"])), Err(KitaevError::BadBitstring(_))));
        assert!(matches!(basis_encoding(1, &labels(&["a"])), Err(KitaevError::BadBitstring(_))));
    }

    #[test]
    fn outcome_distribution_examples() {
        let comp = one_qubit(&[("0", "0"), ("1", "1")]);
        let d = outcome_distribution(&KrausChannel::identity(2), &comp, "0").unwrap();
        assert_eq!(d.get("0"), Some(1.0));
        assert_eq!(d.get("1"), Some(0.0));

        let x = unitary_channel(&NamedGate::X.matrix()).unwrap();
        assert_abs_diff_eq!(outcome_distribution(&x, &comp, "0").unwrap().get("1").unwrap(), 1.0);

        let h = unitary_channel(&NamedGate::H.matrix()).unwrap();
        let d = outcome_distribution(&h, &comp, "0").unwrap();
        assert_abs_diff_eq!(d.get("0").unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.get("1").unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-12);

        assert!(matches!(outcome_distribution(&h, &comp, "2"), Err(KitaevError::UnknownInput(_))));
        assert!(matches!(
            outcome_distribution(&KrausChannel::identity(4), &comp, "0"),
            Err(KitaevError::Channel(_))
        ));
    }

    #[test]
    fn ideal_failure_bound_examples() {
        let not = one_qubit(&[("0", "1"), ("1", "0")]);
        let x_circuit = Circuit::new(1, vec![Gate::named(NamedGate::X, &[0])]).unwrap();
        assert_eq!(ideal_failure_bound(&x_circuit, &not).unwrap(), 0.0);

        let id = one_qubit(&[("0", "0"), ("1", "1")]);
        assert_eq!(ideal_failure_bound(&Circuit::new(1, vec![]).unwrap(), &id).unwrap(), 0.0);

        let h_circuit = Circuit::new(1, vec![Gate::named(NamedGate::H, &[0])]).unwrap();
        assert_abs_diff_eq!(ideal_failure_bound(&h_circuit, &id).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn actual_failure_examples() {
        let id = one_qubit(&[("0", "0"), ("1", "1")]);
        let h = unitary_channel(&NamedGate::H.matrix()).unwrap();
        assert_abs_diff_eq!(actual_failure_probability(&h, &id, "1").unwrap(), 0.5, epsilon = 1e-12);
        let dep = depolarizing(0.3, 1).unwrap();
        assert_abs_diff_eq!(actual_failure_probability(&dep, &id, "0").unwrap(), 0.15, epsilon = 1e-12);
        let full = depolarizing(1.0, 1).unwrap();
        for x in ["0", "1"] {
            assert_abs_diff_eq!(actual_failure_probability(&full, &id, x).unwrap(), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn readouts_are_complete() {
        let outs = labels(&["0", "1"]);
        let single = qubit_readout(3, &[1], &outs).unwrap();
        let parity = parity_readout(3, &outs).unwrap();
        for povm in [single, parity] {
            let sum = povm[0].add(&povm[1]).unwrap();
            assert_eq!(sum, HermitianOperator::identity(8));
        }
        assert!(matches!(qubit_readout(2, &[2], &outs), Err(KitaevError::BadQubit { .. })));
    }

    #[test]
    fn computation_validation() {
        let bits = labels(&["0", "1"]);
        let init = basis_encoding(1, &bits).unwrap();
        let povm = computational_basis_readout(1, &bits).unwrap();
        let build = |t: &BTreeMap<String, String>, effects: Vec<HermitianOperator>| {
            OverallComputation::new(bits.clone(), bits.clone(), t, init.clone(), effects)
        };
        assert!(matches!(
            build(&table(&[("0", "0")]), povm.clone()),
            Err(KitaevError::IncompleteTruthTable(_))
        ));
        assert!(matches!(
            build(&table(&[("0", "0"), ("1", "2")]), povm.clone()),
            Err(KitaevError::UnknownOutput(_))
        ));
        assert!(matches!(
            build(&table(&[("0", "0"), ("1", "1")]), vec![povm[0].clone(), povm[0].clone()]),
            Err(KitaevError::PovmIncomplete { .. })
        ));
        assert!(matches!(
            OverallComputation::new(labels(&["0", "0"]), bits.clone(), &table(&[("0", "0")]), init.clone(), povm.clone()),
            Err(KitaevError::DuplicateLabel(_))
        ));
    }
}
