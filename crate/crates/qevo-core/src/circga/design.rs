//! Circuit design over lists of gate structures.
//!
//! A circuit is a variable-length list of structures, each holding a gate
//! type, operand-qubit bit-strings and a parameter bit-string. The GA scores
//! a circuit by running every input case through it and summing the
//! amplitude-wise distance to the desired outputs. Gate-level crossover swaps
//! tails after a random point in each parent; bit-string crossover only
//! pairs gates of the same category; mutation replaces a gate wholesale.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::qsim::{Gate, StateVector};

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("produced {got} states for {expected} cases")]
    CaseCountMismatch { expected: usize, got: usize },
    #[error("case {case}: produced dimension {got}, desired {expected}")]
    DimensionMismatch {
        case: usize,
        expected: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Identity,
    Cnot,
    Hadamard,
    L,
    R,
    S,
    T,
    Rotation,
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::Identity,
        GateKind::Cnot,
        GateKind::Hadamard,
        GateKind::L,
        GateKind::R,
        GateKind::S,
        GateKind::T,
        GateKind::Rotation,
        GateKind::Measure,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// Crossover category: bit-strings may only cross between gates whose
    /// operand layout matches.
    fn category(self) -> u8 {
        match self {
            GateKind::Cnot => 2,
            GateKind::Rotation => 1,
            _ => 0,
        }
    }
}

/// One evolvable gate slot: type plus raw operand/parameter bit-strings.
/// Operand bytes are decoded modulo the register width; the parameter byte
/// maps to an angle in [0, 2π).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateStructure {
    pub kind: GateKind,
    pub operand_bits: [u8; 2],
    pub parameter_bits: u8,
}

impl GateStructure {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        GateStructure {
            kind: GateKind::ALL[rng.gen_range(0..GateKind::ALL.len())],
            operand_bits: [rng.gen(), rng.gen()],
            parameter_bits: rng.gen(),
        }
    }

    fn theta(&self) -> f64 {
        self.parameter_bits as f64 / 256.0 * std::f64::consts::TAU
    }

    /// The concrete gate and target list on a `width`-qubit register;
    /// `None` for structures that do not act (Identity, Measure, or a CNOT
    /// whose operands collide).
    pub fn resolve(&self, width: usize) -> Option<(Gate, Vec<usize>)> {
        let q0 = self.operand_bits[0] as usize % width;
        match self.kind {
            GateKind::Identity | GateKind::Measure => None,
            GateKind::Hadamard => Some((Gate::hadamard(), vec![q0])),
            GateKind::L => Some((Gate::l(), vec![q0])),
            GateKind::R => Some((Gate::r(), vec![q0])),
            GateKind::S => Some((Gate::s(), vec![q0])),
            GateKind::T => Some((Gate::t(), vec![q0])),
            GateKind::Rotation => Some((Gate::rotation(self.theta()), vec![q0])),
            GateKind::Cnot => {
                let q1 = self.operand_bits[1] as usize % width;
                if q0 == q1 {
                    None
                } else {
                    Some((Gate::cnot(), vec![q0, q1]))
                }
            }
        }
    }
}

/// Runs a structure list on an input state.
pub fn apply_structures(circuit: &[GateStructure], input: &StateVector) -> StateVector {
    let width = input.num_qubits();
    let mut state = input.clone();
    for g in circuit {
        if let Some((gate, targets)) = g.resolve(width) {
            state = state
                .apply_gate(&gate, &targets)
                .expect("resolved targets are valid");
        }
    }
    state
}

/// Sum over cases and amplitude indices of |σ_ij − d_ij|.
pub fn design_error(
    produced: &[StateVector],
    desired: &[StateVector],
) -> Result<f64, DesignError> {
    if produced.len() != desired.len() {
        return Err(DesignError::CaseCountMismatch {
            expected: desired.len(),
            got: produced.len(),
        });
    }
    let mut total = 0.0;
    for (case, (got, want)) in produced.iter().zip(desired).enumerate() {
        if got.amplitudes().len() != want.amplitudes().len() {
            return Err(DesignError::DimensionMismatch {
                case,
                expected: want.amplitudes().len(),
                got: got.amplitudes().len(),
            });
        }
        for (a, b) in got.amplitudes().iter().zip(want.amplitudes()) {
            total += (a - b).norm();
        }
    }
    Ok(total)
}

fn circuit_error(circuit: &[GateStructure], cases: &[(StateVector, StateVector)]) -> f64 {
    let produced: Vec<StateVector> = cases
        .iter()
        .map(|(input, _)| apply_structures(circuit, input))
        .collect();
    let desired: Vec<StateVector> = cases.iter().map(|(_, d)| d.clone()).collect();
    design_error(&produced, &desired).expect("cases are dimension-consistent")
}

/// The Bell-state production case: |00⟩ ↦ (|00⟩ + |11⟩)/√2.
pub fn bell_design_case() -> (StateVector, StateVector) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = StateVector::from_amplitudes(vec![
        Complex64::new(s, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
    ])
    .expect("normalized");
    (StateVector::zero_state(2), bell)
}

#[derive(Debug, Clone)]
pub struct DesignParams {
    pub population_size: usize,
    pub generations: usize,
    pub max_gates: usize,
    pub crossover_prob: f64,
    /// Per-gate replacement probability.
    pub mutation_prob: f64,
    /// Copy the single best circuit into the next generation.
    pub elitism: bool,
}

impl Default for DesignParams {
    fn default() -> Self {
        DesignParams {
            population_size: 500,
            generations: 200,
            max_gates: 8,
            crossover_prob: 0.7,
            mutation_prob: 0.001,
            elitism: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DesignResult {
    pub best: Vec<GateStructure>,
    pub best_error: f64,
    /// Best-ever error per generation.
    pub history: Vec<f64>,
}

fn random_circuit<R: Rng>(max_gates: usize, rng: &mut R) -> Vec<GateStructure> {
    let len = rng.gen_range(1..=max_gates);
    (0..len).map(|_| GateStructure::random(rng)).collect()
}

fn gate_crossover<R: Rng>(
    a: &[GateStructure],
    b: &[GateStructure],
    max_gates: usize,
    rng: &mut R,
) -> (Vec<GateStructure>, Vec<GateStructure>) {
    let i = rng.gen_range(0..=a.len());
    let j = rng.gen_range(0..=b.len());
    let mut c1: Vec<GateStructure> = a[..i].iter().chain(&b[j..]).cloned().collect();
    let mut c2: Vec<GateStructure> = b[..j].iter().chain(&a[i..]).cloned().collect();
    c1.truncate(max_gates);
    c2.truncate(max_gates);
    (c1, c2)
}

/// One-point crossover between the bit-strings of two same-category gates.
fn parameter_crossover<R: Rng>(c1: &mut [GateStructure], c2: &mut [GateStructure], rng: &mut R) {
    if c1.is_empty() || c2.is_empty() {
        return;
    }
    let i = rng.gen_range(0..c1.len());
    let j = rng.gen_range(0..c2.len());
    if c1[i].kind.category() != c2[j].kind.category() {
        return;
    }
    let cut = rng.gen_range(0..8u32);
    let mask = if cut == 0 { 0u8 } else { 0xffu8 << (8 - cut) };
    for k in 0..2 {
        let (x, y) = (c1[i].operand_bits[k], c2[j].operand_bits[k]);
        c1[i].operand_bits[k] = (x & mask) | (y & !mask);
        c2[j].operand_bits[k] = (y & mask) | (x & !mask);
    }
    let (x, y) = (c1[i].parameter_bits, c2[j].parameter_bits);
    c1[i].parameter_bits = (x & mask) | (y & !mask);
    c2[j].parameter_bits = (y & mask) | (x & !mask);
}

/// Evolves gate-structure circuits toward the desired input/output cases.
pub fn run_design_ga(
    cases: &[(StateVector, StateVector)],
    params: &DesignParams,
    seed: u64,
) -> DesignResult {
    assert!(!cases.is_empty(), "need at least one design case");
    assert!(params.population_size >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pop: Vec<Vec<GateStructure>> = (0..params.population_size)
        .map(|_| random_circuit(params.max_gates, &mut rng))
        .collect();
    let mut best: Option<(f64, Vec<GateStructure>)> = None;
    let mut history = Vec::with_capacity(params.generations);

    for _ in 0..params.generations {
        let errors: Vec<f64> = pop.iter().map(|c| circuit_error(c, cases)).collect();
        let mut gen_best = 0usize;
        for (i, (c, &e)) in pop.iter().zip(&errors).enumerate() {
            if e < errors[gen_best] {
                gen_best = i;
            }
            if best.as_ref().map_or(true, |(be, _)| e < *be) {
                best = Some((e, c.clone()));
            }
        }
        history.push(best.as_ref().expect("evaluated").0);

        let mut cumulative = Vec::with_capacity(pop.len());
        let mut total = 0.0;
        for &e in &errors {
            total += 1.0 / (1.0 + e);
            cumulative.push(total);
        }
        let pick = |rng: &mut ChaCha8Rng| {
            let u: f64 = rng.gen::<f64>() * total;
            cumulative
                .iter()
                .position(|&c| u < c)
                .unwrap_or(pop.len() - 1)
        };
        let mut next = Vec::with_capacity(pop.len());
        if params.elitism {
            next.push(pop[gen_best].clone());
        }
        while next.len() < pop.len() {
            let pa = &pop[pick(&mut rng)];
            let pb = &pop[pick(&mut rng)];
            let (mut c1, mut c2) = if rng.gen::<f64>() < params.crossover_prob {
                let (mut c1, mut c2) = gate_crossover(pa, pb, params.max_gates, &mut rng);
                parameter_crossover(&mut c1, &mut c2, &mut rng);
                (c1, c2)
            } else {
                (pa.clone(), pb.clone())
            };
            for child in [&mut c1, &mut c2] {
                for gate in child.iter_mut() {
                    if rng.gen::<f64>() < params.mutation_prob {
                        *gate = GateStructure::random(&mut rng);
                    }
                }
            }
            next.push(c1);
            if next.len() < pop.len() {
                next.push(c2);
            }
        }
        pop = next;
    }

    let (best_error, best) = best.expect("at least one generation");
    DesignResult {
        best,
        best_error,
        history,
    }
}
