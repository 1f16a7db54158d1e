//! Exact state-vector simulation of small qubit registers.
//!
//! States are complex amplitude vectors over the computational basis of an
//! n-qubit register. Qubit 0 is the least significant bit of the basis index,
//! so basis label |i_{n-1} … i_1 i_0⟩ corresponds to index
//! `i_{n-1}*2^{n-1} + … + i_1*2 + i_0`.
//!
//! All operations are pure: they take immutable inputs and return fresh
//! states, so they can be called from many threads at once.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Tolerance used for all normalization and unitarity checks.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum QsimError {
    #[error("state is not normalized (|norm^2 - 1| = {0:.3e})")]
    NotNormalized(f64),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),
    #[error("gate {name} acts on {arity} qubit(s) but {got} target(s) were given")]
    ArityMismatch {
        name: String,
        arity: usize,
        got: usize,
    },
    #[error("{0}x{0} matrix is not unitary")]
    NotUnitary(usize),
    #[error("oracle table has {got} entries, expected {expected}")]
    OracleTableSize { expected: usize, got: usize },
    #[error("oracle value {value} does not fit in the {bits}-bit output register")]
    OracleRange { value: usize, bits: usize },
    #[error("expected a {expected}-qubit register, got {got} qubits")]
    WrongWidth { expected: usize, got: usize },
    #[error("qubits {0:?} must be in state |0…0⟩ for this circuit")]
    NotCleared(Vec<usize>),
}

/// A normalized pure state of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis_state(num_qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits >= 1, "register needs at least one qubit");
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { num_qubits, amps }
    }

    /// A single qubit α0|0⟩ + α1|1⟩.
    pub fn single_qubit(alpha0: Complex64, alpha1: Complex64) -> Result<Self, QsimError> {
        Self::from_amplitudes(vec![alpha0, alpha1])
    }

    /// Builds a state from raw amplitudes, checking length and normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let n = amps.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(QsimError::BadLength(n));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalized((norm2 - 1.0).abs()));
        }
        Ok(StateVector {
            num_qubits: n.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    /// Tensor product; `self` occupies the high-order qubits of the result,
    /// so the amplitude of |ij⟩ is `self_i * other_j`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let dim_b = other.amps.len();
        let mut amps = Vec::with_capacity(self.amps.len() * dim_b);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    /// Applies `gate` to the listed target qubits and returns the new state.
    ///
    /// `targets[0]` is the most significant bit of the gate's local basis
    /// index, so for CNOT the call is `apply_gate(&cnot, &[control, target])`.
    pub fn apply_gate(&self, gate: &Gate, targets: &[usize]) -> Result<StateVector, QsimError> {
        if targets.len() != gate.arity {
            return Err(QsimError::ArityMismatch {
                name: gate.name.clone(),
                arity: gate.arity,
                got: targets.len(),
            });
        }
        for (k, &t) in targets.iter().enumerate() {
            if t >= self.num_qubits {
                return Err(QsimError::QubitOutOfRange {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..k].contains(&t) {
                return Err(QsimError::DuplicateQubit(t));
            }
        }
        let dim = gate.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, &amp) in self.amps.iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let local = Self::local_index(i, targets);
            for row in 0..dim {
                let coeff = gate.matrix[row * dim + local];
                if coeff != Complex64::new(0.0, 0.0) {
                    out[Self::replace_bits(i, targets, row)] += coeff * amp;
                }
            }
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps: out,
        })
    }

    /// |x⟩|y⟩ ↦ |x⟩|y ⊕ f(x)⟩ for a function given as a lookup table over the
    /// x register values. Registers are listed most significant qubit first.
    pub fn apply_oracle(
        &self,
        table: &[usize],
        x_qubits: &[usize],
        y_qubits: &[usize],
    ) -> Result<StateVector, QsimError> {
        for &q in x_qubits.iter().chain(y_qubits) {
            if q >= self.num_qubits {
                return Err(QsimError::QubitOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        let mut seen = Vec::new();
        for &q in x_qubits.iter().chain(y_qubits) {
            if seen.contains(&q) {
                return Err(QsimError::DuplicateQubit(q));
            }
            seen.push(q);
        }
        let expected = 1usize << x_qubits.len();
        if table.len() != expected {
            return Err(QsimError::OracleTableSize {
                expected,
                got: table.len(),
            });
        }
        for &v in table {
            if v >= 1usize << y_qubits.len() {
                return Err(QsimError::OracleRange {
                    value: v,
                    bits: y_qubits.len(),
                });
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, &amp) in self.amps.iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let x = Self::local_index(i, x_qubits);
            let y = Self::local_index(i, y_qubits);
            out[Self::replace_bits(i, y_qubits, y ^ table[x])] += amp;
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps: out,
        })
    }

    /// Projective measurement of the listed qubits in the computational
    /// basis. Returns one outcome per bit pattern with nonzero probability,
    /// ordered by pattern value; each collapsed state is renormalized.
    ///
    /// The enumeration is deterministic. Use [`StateVector::sample_measurement`]
    /// to draw a single branch at random.
    pub fn measure(&self, qubits: &[usize]) -> Result<Vec<MeasurementOutcome>, QsimError> {
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(QsimError::QubitOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
            if qubits[..k].contains(&q) {
                return Err(QsimError::DuplicateQubit(q));
            }
        }
        let patterns = 1usize << qubits.len();
        let mut probs = vec![0.0f64; patterns];
        for (i, a) in self.amps.iter().enumerate() {
            probs[Self::local_index(i, qubits)] += a.norm_sqr();
        }
        let mut outcomes = Vec::new();
        for pattern in 0..patterns {
            let p = probs[pattern];
            if p <= 0.0 {
                continue;
            }
            let scale = 1.0 / p.sqrt();
            let amps = self
                .amps
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    if Self::local_index(i, qubits) == pattern {
                        a * scale
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            outcomes.push(MeasurementOutcome {
                outcome: pattern,
                probability: p,
                collapsed: StateVector {
                    num_qubits: self.num_qubits,
                    amps,
                },
            });
        }
        Ok(outcomes)
    }

    /// Samples a single measurement branch according to the Born rule.
    pub fn sample_measurement<R: Rng>(
        &self,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<MeasurementOutcome, QsimError> {
        let outcomes = self.measure(qubits)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for outcome in &outcomes {
            acc += outcome.probability;
            if u < acc {
                return Ok(outcome.clone());
            }
        }
        Ok(outcomes.last().expect("at least one outcome").clone())
    }

    /// Residual of the best product-state approximation across the cut
    /// between the high `high_qubits` qubits and the rest. Zero (up to
    /// numerics) exactly when the state factorizes; the Bell pair gives
    /// 1/√2 ≈ 0.707.
    pub fn product_residual(&self, high_qubits: usize) -> f64 {
        assert!(high_qubits >= 1 && high_qubits < self.num_qubits);
        let rows = 1usize << high_qubits;
        let cols = self.amps.len() / rows;
        // Largest singular value of the amplitude matrix via power iteration
        // on M†M; the residual is sqrt(1 - σ₁²) for a normalized state.
        let m = |r: usize, c: usize| self.amps[r * cols + c];
        let mut best = 0.0f64;
        for start in 0..2 {
            let mut v: Vec<Complex64> = (0..cols)
                .map(|c| Complex64::new(1.0 + (c == start % cols) as usize as f64, 0.0))
                .collect();
            for _ in 0..300 {
                // w = M v, v' = M† w
                let mut w = vec![Complex64::new(0.0, 0.0); rows];
                for r in 0..rows {
                    for c in 0..cols {
                        w[r] += m(r, c) * v[c];
                    }
                }
                let mut next = vec![Complex64::new(0.0, 0.0); cols];
                for c in 0..cols {
                    for r in 0..rows {
                        next[c] += m(r, c).conj() * w[r];
                    }
                }
                let norm: f64 = next.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-300 {
                    break;
                }
                for a in &mut next {
                    *a /= norm;
                }
                v = next;
            }
            let mut w = vec![Complex64::new(0.0, 0.0); rows];
            for r in 0..rows {
                for c in 0..cols {
                    w[r] += m(r, c) * v[c];
                }
            }
            let sigma2: f64 = w.iter().map(|a| a.norm_sqr()).sum();
            best = best.max(sigma2);
        }
        (1.0 - best).max(0.0).sqrt()
    }

    fn local_index(i: usize, qubits: &[usize]) -> usize {
        let mut v = 0usize;
        for &q in qubits {
            v = (v << 1) | ((i >> q) & 1);
        }
        v
    }

    fn replace_bits(i: usize, qubits: &[usize], value: usize) -> usize {
        let mut out = i;
        let k = qubits.len();
        for (pos, &q) in qubits.iter().enumerate() {
            let bit = (value >> (k - 1 - pos)) & 1;
            out = (out & !(1 << q)) | (bit << q);
        }
        out
    }
}

/// One branch of a projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    /// Measured bit pattern; the first listed qubit is the most significant bit.
    pub outcome: usize,
    pub probability: f64,
    pub collapsed: StateVector,
}

/// A named unitary gate on one or two qubits.
#[derive(Debug, Clone)]
pub struct Gate {
    name: String,
    arity: usize,
    /// Row-major dim×dim matrix, dim = 2^arity.
    matrix: Vec<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    /// Builds a gate from a row-major matrix, verifying unitarity.
    pub fn new(name: &str, arity: usize, matrix: Vec<Complex64>) -> Result<Self, QsimError> {
        let dim = 1usize << arity;
        assert_eq!(matrix.len(), dim * dim, "matrix has wrong size");
        // G†G = I within tolerance
        for i in 0..dim {
            for j in 0..dim {
                let mut dot = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    dot += matrix[k * dim + i].conj() * matrix[k * dim + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).norm() > NORM_TOL {
                    return Err(QsimError::NotUnitary(dim));
                }
            }
        }
        Ok(Gate {
            name: name.to_string(),
            arity,
            matrix,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1usize << self.arity
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn identity() -> Gate {
        Gate {
            name: "I".into(),
            arity: 1,
            matrix: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        }
    }

    pub fn hadamard() -> Gate {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Gate {
            name: "H".into(),
            arity: 1,
            matrix: vec![c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)],
        }
    }

    /// L = (1/√2) [[1, -1], [1, 1]]; maps |0⟩ to (|0⟩+|1⟩)/√2.
    pub fn l() -> Gate {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Gate {
            name: "L".into(),
            arity: 1,
            matrix: vec![c(s, 0.0), c(-s, 0.0), c(s, 0.0), c(s, 0.0)],
        }
    }

    /// R = (1/√2) [[1, 1], [-1, 1]]; the inverse of L.
    pub fn r() -> Gate {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Gate {
            name: "R".into(),
            arity: 1,
            matrix: vec![c(s, 0.0), c(s, 0.0), c(-s, 0.0), c(s, 0.0)],
        }
    }

    /// S = [[i, 0], [0, 1]].
    pub fn s() -> Gate {
        Gate {
            name: "S".into(),
            arity: 1,
            matrix: vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        }
    }

    /// T = [[-1, 0], [0, -i]].
    pub fn t() -> Gate {
        Gate {
            name: "T".into(),
            arity: 1,
            matrix: vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)],
        }
    }

    /// Real rotation U(θ) = [[cos θ, -sin θ], [sin θ, cos θ]].
    pub fn rotation(theta: f64) -> Gate {
        let (sin, cos) = theta.sin_cos();
        Gate {
            name: format!("U({theta})"),
            arity: 1,
            matrix: vec![c(cos, 0.0), c(-sin, 0.0), c(sin, 0.0), c(cos, 0.0)],
        }
    }

    /// CNOT with the first target qubit as control.
    pub fn cnot() -> Gate {
        let mut m = vec![c(0.0, 0.0); 16];
        m[0] = c(1.0, 0.0);
        m[5] = c(1.0, 0.0);
        m[3 * 4 + 2] = c(1.0, 0.0);
        m[2 * 4 + 3] = c(1.0, 0.0);
        Gate {
            name: "CNOT".into(),
            arity: 2,
            matrix: m,
        }
    }

    /// All named single- and two-qubit gates, for property tests.
    pub fn named_gates() -> Vec<Gate> {
        vec![
            Gate::identity(),
            Gate::hadamard(),
            Gate::l(),
            Gate::r(),
            Gate::s(),
            Gate::t(),
            Gate::rotation(0.025),
            Gate::rotation(1.234),
            Gate::cnot(),
        ]
    }
}

/// Turns |f⟩|0⟩|0⟩ into |f⟩ ⊗ (|00⟩+|11⟩)/√2 by applying L to qubit 1 and
/// then a CNOT with qubit 1 as control and qubit 0 as target.
///
/// The input must be a 3-qubit register whose qubits 1 and 0 are |0⟩.
pub fn bell_pair_circuit(input: &StateVector) -> Result<StateVector, QsimError> {
    if input.num_qubits() != 3 {
        return Err(QsimError::WrongWidth {
            expected: 3,
            got: input.num_qubits(),
        });
    }
    let dirty = (0..input.amps.len())
        .any(|i| i & 0b011 != 0 && input.amps[i].norm() > NORM_TOL);
    if dirty {
        return Err(QsimError::NotCleared(vec![1, 0]));
    }
    let state = input.apply_gate(&Gate::l(), &[1])?;
    state.apply_gate(&Gate::cnot(), &[1, 0])
}
