//! Branch-enumerating teleportation simulation and the ratio-based fitness.
//!
//! The register holds qubits 0..2 with qubit 0 as the least significant bit
//! of the amplitude index; the state to teleport rides on qubit 2 and must
//! end up on qubit 0. After Alice's stage, qubits 2 and 1 are measured and
//! all four branches are traced through Bob's stage, unnormalized, exactly
//! as the fitness needs them.

use num_complex::Complex64;
use rand::Rng;

use super::codon::{decode, CodonChromosome, DecodedCircuit, TeleportGate};

/// Amplitudes below this are treated as exact zeros by the ratio test.
pub const ZERO_AMP_TOL: f64 = 1e-12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn apply_rotation(amps: &mut [Complex64; 8], qubit: usize, m00: f64, m01: f64, m10: f64, m11: f64) {
    let step = 1usize << qubit;
    for base in 0..8usize {
        if base & step != 0 {
            continue;
        }
        let i0 = base;
        let i1 = base | step;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = m00 * a0 + m01 * a1;
        amps[i1] = m10 * a0 + m11 * a1;
    }
}

fn apply_gate(amps: &mut [Complex64; 8], gate: &TeleportGate) {
    match *gate {
        TeleportGate::L(q) => apply_rotation(
            amps,
            q,
            FRAC_1_SQRT_2,
            -FRAC_1_SQRT_2,
            FRAC_1_SQRT_2,
            FRAC_1_SQRT_2,
        ),
        TeleportGate::R(q) => apply_rotation(
            amps,
            q,
            FRAC_1_SQRT_2,
            FRAC_1_SQRT_2,
            -FRAC_1_SQRT_2,
            FRAC_1_SQRT_2,
        ),
        TeleportGate::Cnot { control, target } => {
            let cbit = 1usize << control;
            let tbit = 1usize << target;
            for i in 0..8usize {
                if i & cbit != 0 && i & tbit == 0 {
                    amps.swap(i, i | tbit);
                }
            }
        }
    }
}

fn run_stage(amps: &mut [Complex64; 8], gates: &[TeleportGate]) {
    for g in gates {
        apply_gate(amps, g);
    }
}

/// Runs the circuit on (p|0⟩ + q|1⟩) ⊗ |00⟩ and returns the four unnormalized
/// branch states left after measuring qubits 2 and 1 and applying Bob's
/// gates. Branch j corresponds to the measured pattern (q2,q1) = (j>>1, j&1).
pub fn simulate_teleport(
    circuit: &DecodedCircuit,
    p: Complex64,
    q: Complex64,
) -> [[Complex64; 8]; 4] {
    let zero = Complex64::new(0.0, 0.0);
    let mut state = [zero; 8];
    state[0] = p;
    state[4] = q;
    run_stage(&mut state, &circuit.epr);
    run_stage(&mut state, &circuit.alice);
    let mut branches = [[zero; 8]; 4];
    for (j, branch) in branches.iter_mut().enumerate() {
        let (q2, q1) = (j >> 1, j & 1);
        for q0 in 0..2 {
            let i = (q2 << 2) | (q1 << 1) | q0;
            branch[i] = state[i];
        }
        run_stage(branch, &circuit.bob);
    }
    branches
}

/// Per-branch error: mean of |a_i/a_{i+1} - p/q| over the pairs
/// (a_0,a_1), (a_2,a_3), (a_4,a_5), (a_6,a_7) that are not both zero.
/// A zero final state scores 100, as does any pair whose denominator
/// amplitude vanishes while the numerator does not.
pub fn branch_error(final_amps: &[Complex64; 8], p: Complex64, q: Complex64) -> f64 {
    if final_amps.iter().all(|a| a.norm() < ZERO_AMP_TOL) {
        return 100.0;
    }
    let target = p / q;
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in (0..8).step_by(2) {
        let a0 = final_amps[i];
        let a1 = final_amps[i + 1];
        let z0 = a0.norm() < ZERO_AMP_TOL;
        let z1 = a1.norm() < ZERO_AMP_TOL;
        if z0 && z1 {
            continue;
        }
        pairs += 1;
        if z1 {
            total += 100.0;
        } else {
            total += (a0 / a1 - target).norm();
        }
    }
    if pairs == 0 {
        100.0
    } else {
        total / pairs as f64
    }
}

/// Three random evaluation states (p, q) built from phases α, β, γ drawn
/// uniformly from [0, 2π):
/// (e^{iβ}cos α, e^{iγ}sin α), (e^{iγ}cos β, e^{iα}sin β),
/// (e^{iα}cos γ, e^{iβ}sin γ).
pub fn sample_eval_states<R: Rng>(rng: &mut R) -> [(Complex64, Complex64); 3] {
    let tau = std::f64::consts::TAU;
    let alpha = rng.gen_range(0.0..tau);
    let beta = rng.gen_range(0.0..tau);
    let gamma = rng.gen_range(0.0..tau);
    let polar = |phase: f64, mag: f64| Complex64::from_polar(mag, phase);
    [
        (polar(beta, alpha.cos()), polar(gamma, alpha.sin())),
        (polar(gamma, beta.cos()), polar(alpha, beta.sin())),
        (polar(alpha, gamma.cos()), polar(beta, gamma.sin())),
    ]
}

pub(crate) fn fitness_from_error_sum(error_sum: f64, gate_count: usize) -> f64 {
    let f = 1.0 / (1.0 + 10.0 * error_sum);
    if error_sum < 1e-9 {
        1.0 + 1.0 / gate_count as f64
    } else {
        f
    }
}

/// Fitness of a chromosome over the three evaluation states: all four
/// measured branches of each state are traced, f = 1/(1 + 10·Σ error_j), and
/// a perfect circuit earns the size bonus 1/gate_count on top of f = 1.
/// Invalid chromosomes (missing stage markers) score 0.
pub fn evaluate(chromosome: &CodonChromosome, states: &[(Complex64, Complex64); 3]) -> f64 {
    let circuit = match decode(chromosome) {
        Ok(c) => c,
        Err(_) => return 0.0,
    };
    evaluate_circuit(&circuit, states)
}

pub(crate) fn evaluate_circuit(
    circuit: &DecodedCircuit,
    states: &[(Complex64, Complex64); 3],
) -> f64 {
    let mut error_sum = 0.0;
    for &(p, q) in states {
        for branch in simulate_teleport(circuit, p, q) {
            error_sum += branch_error(&branch, p, q);
        }
    }
    fitness_from_error_sum(error_sum, circuit.gate_count())
}
