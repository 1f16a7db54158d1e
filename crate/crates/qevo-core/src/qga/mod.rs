//! Classical simulation of a quantum GA over entangled register pairs.
//!
//! A quantum individual is the two-register state Σ_x a_x |x⟩⊗|f(x)⟩: the
//! first register holds a candidate solution, the second its fitness, and
//! the joint state is supported only on correlated pairs. That correlation
//! is an invariant here, so the state is stored sparsely as the amplitude
//! vector a over x. Measuring the fitness register collapses an individual
//! to the renormalized restriction of a to one fitness fiber
//! {x : f(x) = y₀}; mutation conjugates a small rotation by the fitness
//! oracle (uncompute, rotate, recompute), which in the sparse encoding is
//! exactly one unitary on a.
//!
//! The [`dense`] submodule keeps an explicit two-register representation
//! around for cross-checks and for the product-state counterexample, which
//! shows why storing individuals and fitnesses in *unentangled* registers
//! loses the individual ↔ fitness correspondence.

pub mod dense;

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use dense::DenseJoint;

/// Amplitudes below this are not counted as support.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum QgaError {
    #[error("fitness landscape is empty")]
    EmptyLandscape,
    #[error("matrix of dimension {0} is not unitary")]
    NotUnitary(usize),
    #[error("operator dimension {op} does not match search space size {space}")]
    DimensionMismatch { op: usize, space: usize },
    #[error("per-qubit rotations need a power-of-two search space, got {0}")]
    NotPowerOfTwo(usize),
    #[error("state is not normalized (|norm^2 - 1| = {0:.3e})")]
    NotNormalized(f64),
    #[error("constant fitness function admits no counterexample")]
    ConstantFitness,
    #[error("malformed fitness table: {0}")]
    Parse(String),
}

/// A validated N×N unitary, row-major.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, QgaError> {
        assert_eq!(entries.len(), dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut dot = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    dot += entries[k * dim + i].conj() * entries[k * dim + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).norm() > 1e-9 {
                    return Err(QgaError::NotUnitary(dim));
                }
            }
        }
        Ok(UnitaryMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// A unitary acting on the individual register.
#[derive(Debug, Clone)]
pub enum RegisterOp {
    Identity,
    /// Tensor product of the real rotation U(θ) on every qubit of a
    /// power-of-two register.
    QubitRotations(f64),
    Matrix(UnitaryMatrix),
}

impl RegisterOp {
    fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>, QgaError> {
        let n = amps.len();
        match self {
            RegisterOp::Identity => Ok(amps.to_vec()),
            RegisterOp::QubitRotations(theta) => {
                if !n.is_power_of_two() {
                    return Err(QgaError::NotPowerOfTwo(n));
                }
                let mut out = amps.to_vec();
                let (sin, cos) = theta.sin_cos();
                let qubits = n.trailing_zeros() as usize;
                for q in 0..qubits {
                    let step = 1usize << q;
                    for base in 0..n {
                        if base & step != 0 {
                            continue;
                        }
                        let (a0, a1) = (out[base], out[base | step]);
                        out[base] = cos * a0 - sin * a1;
                        out[base | step] = sin * a0 + cos * a1;
                    }
                }
                Ok(out)
            }
            RegisterOp::Matrix(u) => {
                if u.dim != n {
                    return Err(QgaError::DimensionMismatch { op: u.dim, space: n });
                }
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (r, o) in out.iter_mut().enumerate() {
                    for c in 0..n {
                        *o += u.entries[r * n + c] * amps[c];
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Σ_x a_x |x⟩⊗|f(x)⟩, stored as the amplitudes a over x.
#[derive(Debug, Clone)]
pub struct QuantumIndividual {
    amps: Vec<Complex64>,
    fitness: Arc<Vec<f64>>,
}

impl QuantumIndividual {
    pub fn search_space_size(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn fitness_table(&self) -> &Arc<Vec<f64>> {
        &self.fitness
    }

    /// Indices with non-negligible amplitude.
    pub fn support(&self) -> Vec<usize> {
        (0..self.amps.len())
            .filter(|&x| self.amps[x].norm() > SUPPORT_TOL)
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.support().len()
    }

    /// The joint support as (x, f(x)) pairs.
    pub fn joint_support(&self) -> Vec<(usize, f64)> {
        self.support()
            .into_iter()
            .map(|x| (x, self.fitness[x]))
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Prepares Σ_x a_x |x⟩⊗|f(x)⟩ with a = W · (uniform vector): the register
/// pair starts as (1/√N) Σ |x⟩|0⟩, W shapes the individual register, and the
/// fitness oracle fills the second register.
pub fn init_individual(
    fitness: Arc<Vec<f64>>,
    w: &RegisterOp,
) -> Result<QuantumIndividual, QgaError> {
    let n = fitness.len();
    if n == 0 {
        return Err(QgaError::EmptyLandscape);
    }
    let uniform = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let amps = w.apply(&uniform)?;
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-9 {
        return Err(QgaError::NotNormalized((norm2 - 1.0).abs()));
    }
    Ok(QuantumIndividual { amps, fitness })
}

/// Outcome of measuring the fitness register of one individual.
#[derive(Debug, Clone)]
pub struct FitnessMeasurement {
    pub observed: f64,
    pub probability: f64,
    pub individual: QuantumIndividual,
}

/// Distinct fitness values with their probabilities, ordered by value.
fn fibers(ind: &QuantumIndividual) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut order: Vec<usize> = (0..ind.amps.len()).collect();
    order.sort_by(|&a, &b| {
        ind.fitness[a]
            .partial_cmp(&ind.fitness[b])
            .expect("finite fitness values")
    });
    for x in order {
        let p = ind.amps[x].norm_sqr();
        match pairs.last_mut() {
            Some((v, acc)) if *v == ind.fitness[x] => *acc += p,
            _ => pairs.push((ind.fitness[x], p)),
        }
    }
    pairs
}

fn collapse_to_fiber(ind: &QuantumIndividual, value: f64, probability: f64) -> QuantumIndividual {
    let scale = 1.0 / probability.sqrt();
    let amps = ind
        .amps
        .iter()
        .enumerate()
        .map(|(x, &a)| {
            if ind.fitness[x] == value {
                a * scale
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    QuantumIndividual {
        amps,
        fitness: Arc::clone(&ind.fitness),
    }
}

/// Measures the fitness register: y₀ is drawn with probability
/// Σ_{x : f(x)=y₀} |a_x|² and the state collapses to the renormalized
/// restriction of a to that fiber.
pub fn measure_fitness<R: Rng>(ind: &QuantumIndividual, rng: &mut R) -> FitnessMeasurement {
    let fibers = fibers(ind);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(value, p) in &fibers {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        if u < acc {
            return FitnessMeasurement {
                observed: value,
                probability: p,
                individual: collapse_to_fiber(ind, value, p),
            };
        }
    }
    let &(value, p) = fibers
        .iter()
        .rev()
        .find(|(_, p)| *p > 0.0)
        .expect("normalized state has a nonzero fiber");
    FitnessMeasurement {
        observed: value,
        probability: p,
        individual: collapse_to_fiber(ind, value, p),
    }
}

/// All measurement branches with nonzero probability, for deterministic
/// inspection; the collapsed states follow the same fiber restriction as
/// [`measure_fitness`].
pub fn fitness_branches(ind: &QuantumIndividual) -> Vec<FitnessMeasurement> {
    fibers(ind)
        .into_iter()
        .filter(|&(_, p)| p > 0.0)
        .map(|(value, p)| FitnessMeasurement {
            observed: value,
            probability: p,
            individual: collapse_to_fiber(ind, value, p),
        })
        .collect()
}

/// Mutation U_f P U_f⁻¹: uncomputes the fitness register, applies P to the
/// individual register, then recomputes the fitness. In the sparse encoding
/// the two oracle applications cancel bookkeeping-wise and the net effect is
/// a = P·a, with the correlated form restored by construction.
pub fn qga_mutate(ind: &QuantumIndividual, p: &RegisterOp) -> Result<QuantumIndividual, QgaError> {
    let amps = p.apply(&ind.amps)?;
    Ok(QuantumIndividual {
        amps,
        fitness: Arc::clone(&ind.fitness),
    })
}

/// What goes wrong without entanglement: the same population stored as a
/// *product* of an individual-register state and a fitness-register state.
#[derive(Debug, Clone)]
pub struct ProductStateCounterexample {
    /// Fitness value observed on the second register.
    pub observed_fitness: f64,
    /// An x that survives the collapse even though f(x) differs from the
    /// observed value.
    pub violating_x: usize,
    /// The offending pair (x, observed fitness).
    pub violating_pair: (usize, f64),
    /// Product state before the measurement.
    pub product_joint: DenseJoint,
    /// Product state after the fitness-register collapse.
    pub post_measurement: DenseJoint,
    /// The correlated individual over the same landscape, for contrast: its
    /// joint support never leaves the graph of f.
    pub correlated: QuantumIndividual,
}

/// Builds the uncorrelated product state (Σ_x a_x|x⟩) ⊗ (Σ_x b_x|f(x)⟩) with
/// uniform a and b, measures its fitness register (most probable outcome,
/// ties toward the smaller value), and exhibits a surviving pair (x, y₀)
/// with f(x) ≠ y₀. Fails only for constant f, where no violation exists.
pub fn product_state_counterexample(
    fitness: Arc<Vec<f64>>,
) -> Result<ProductStateCounterexample, QgaError> {
    let n = fitness.len();
    if n == 0 {
        return Err(QgaError::EmptyLandscape);
    }
    let first = fitness[0];
    if fitness.iter().all(|&v| v == first) {
        return Err(QgaError::ConstantFitness);
    }
    let product = DenseJoint::product_of_uniform(&fitness);
    let (observed_fitness, post_measurement) = product.measure_most_probable_fitness();
    let violating_x = (0..n)
        .find(|&x| fitness[x] != observed_fitness)
        .expect("non-constant f has an off-fiber x");
    let correlated = init_individual(Arc::clone(&fitness), &RegisterOp::Identity)?;
    Ok(ProductStateCounterexample {
        observed_fitness,
        violating_x,
        violating_pair: (violating_x, observed_fitness),
        product_joint: product,
        post_measurement,
        correlated,
    })
}

#[derive(Debug, Clone)]
pub struct QgaParams {
    /// Number of register pairs M.
    pub individuals: usize,
    pub generations: usize,
    /// Fraction of individuals whose collapsed states survive selection.
    pub selection_fraction: f64,
    /// Rotation angle of the default mutation operator.
    pub theta: f64,
}

impl Default for QgaParams {
    fn default() -> Self {
        QgaParams {
            individuals: 8,
            generations: 30,
            selection_fraction: 0.5,
            theta: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QgaRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_support_size: f64,
}

#[derive(Debug, Clone)]
pub struct QgaResult {
    pub best_fitness: f64,
    pub history: Vec<QgaRecord>,
}

/// Runs the register-pair GA. Each generation: individuals whose last
/// observed fitness ranks in the top `selection_fraction` keep their
/// collapsed states; the rest become uniform-amplitude copies of a
/// survivor's support; everyone is mutated and measured again. Register
/// pairs never exchange amplitudes. Crossover is not implemented.
pub fn run_qga(fitness: Arc<Vec<f64>>, params: &QgaParams, seed: u64) -> Result<QgaResult, QgaError> {
    assert!(params.individuals >= 1);
    assert!(
        params.selection_fraction > 0.0 && params.selection_fraction <= 1.0,
        "selection fraction must be in (0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mutation = RegisterOp::QubitRotations(params.theta);

    let mut population: Vec<QuantumIndividual> = (0..params.individuals)
        .map(|_| init_individual(Arc::clone(&fitness), &RegisterOp::Identity))
        .collect::<Result<_, _>>()?;
    let mut observed: Vec<f64> = Vec::with_capacity(params.individuals);
    for ind in population.iter_mut() {
        let m = measure_fitness(ind, &mut rng);
        observed.push(m.observed);
        *ind = m.individual;
    }
    let mut best = observed.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let survivors = ((params.selection_fraction * params.individuals as f64).ceil() as usize)
        .clamp(1, params.individuals);
    let mut history = Vec::with_capacity(params.generations);
    for generation in 0..params.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| observed[b].partial_cmp(&observed[a]).expect("finite"));
        let keep = &order[..survivors];
        let mut next: Vec<QuantumIndividual> = Vec::with_capacity(population.len());
        for i in 0..population.len() {
            if keep.contains(&i) {
                next.push(population[i].clone());
            } else {
                // fresh copy: uniform amplitudes over a survivor's support
                let donor = &population[keep[i % survivors]];
                let support = donor.support();
                let w = 1.0 / (support.len() as f64).sqrt();
                let mut amps = vec![Complex64::new(0.0, 0.0); donor.amps.len()];
                for x in support {
                    amps[x] = Complex64::new(w, 0.0);
                }
                next.push(QuantumIndividual {
                    amps,
                    fitness: Arc::clone(&fitness),
                });
            }
        }
        population = next;
        for ind in population.iter_mut() {
            *ind = qga_mutate(ind, &mutation)?;
        }
        let mean_support_size = population
            .iter()
            .map(|ind| ind.support_size() as f64)
            .sum::<f64>()
            / population.len() as f64;
        observed.clear();
        for ind in population.iter_mut() {
            let m = measure_fitness(ind, &mut rng);
            observed.push(m.observed);
            *ind = m.individual;
        }
        best = observed.iter().copied().fold(best, f64::max);
        history.push(QgaRecord {
            generation,
            best_fitness: best,
            mean_support_size,
        });
    }
    Ok(QgaResult {
        best_fitness: best,
        history,
    })
}

/// f(x) = −(number of set bits of x) over a 2^bits search space; the global
/// maximum is 0, at x = 0.
pub fn negated_hamming_weight(bits: usize) -> Vec<f64> {
    (0..1usize << bits)
        .map(|x| -((x.count_ones()) as f64))
        .collect()
}

/// Parses a fitness table: one value per line, index order.
pub fn parse_fitness_table(text: &str) -> Result<Vec<f64>, QgaError> {
    let values: Result<Vec<f64>, _> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>())
        .collect();
    let values = values.map_err(|e| QgaError::Parse(e.to_string()))?;
    if values.is_empty() {
        return Err(QgaError::EmptyLandscape);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn four_point_table() -> Arc<Vec<f64>> {
        Arc::new(vec![1.0, 0.0, 1.0, 0.0])
    }

    #[test]
    fn init_with_identity_is_uniform() {
        let f = four_point_table();
        let ind = init_individual(f, &RegisterOp::Identity).unwrap();
        for &a in ind.amplitudes() {
            assert!((a - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        }
        assert!((ind.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(
            ind.joint_support(),
            vec![(0, 1.0), (1, 0.0), (2, 1.0), (3, 0.0)]
        );
    }

    #[test]
    fn init_normalization_holds_for_any_unitary() {
        let f = four_point_table();
        let ind = init_individual(f.clone(), &RegisterOp::QubitRotations(0.4)).unwrap();
        assert!((ind.norm_sqr() - 1.0).abs() < 1e-9);
        // a non-unitary matrix is rejected up front
        let bad = UnitaryMatrix::new(
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(bad, Err(QgaError::NotUnitary(2))));
    }

    #[test]
    fn measurement_collapses_to_the_fiber() {
        let f = four_point_table();
        let ind = init_individual(f, &RegisterOp::Identity).unwrap();
        for branch in fitness_branches(&ind) {
            assert!((branch.probability - 0.5).abs() < 1e-12);
            let expected: Vec<usize> = if branch.observed == 1.0 {
                vec![0, 2]
            } else {
                vec![1, 3]
            };
            assert_eq!(branch.individual.support(), expected);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for x in branch.individual.support() {
                assert!((branch.individual.amplitudes()[x].norm() - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_fitness_measurement_is_a_noop() {
        let f = Arc::new(vec![2.5; 8]);
        let ind = init_individual(f, &RegisterOp::QubitRotations(0.3)).unwrap();
        let mut r = rng(1);
        let m = measure_fitness(&ind, &mut r);
        assert_eq!(m.observed, 2.5);
        assert!((m.probability - 1.0).abs() < 1e-12);
        for (a, b) in m.individual.amplitudes().iter().zip(ind.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn measurement_frequencies_match_fiber_probabilities() {
        // 3σ binomial check over 10⁴ seeded measurements
        let f = four_point_table();
        let ind = init_individual(f, &RegisterOp::Identity).unwrap();
        let mut r = rng(2);
        let n = 10_000;
        let ones = (0..n)
            .filter(|_| measure_fitness(&ind, &mut r).observed == 1.0)
            .count() as f64;
        let expected = n as f64 * 0.5;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones - expected).abs() < 3.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn mutate_with_identity_is_identity() {
        let f = four_point_table();
        let ind = init_individual(f, &RegisterOp::Identity).unwrap();
        let out = qga_mutate(&ind, &RegisterOp::Identity).unwrap();
        assert_eq!(out.amplitudes(), ind.amplitudes());
    }

    #[test]
    fn mutation_recovers_support_after_collapse() {
        let f = four_point_table();
        let ind = init_individual(f, &RegisterOp::Identity).unwrap();
        let branch = &fitness_branches(&ind)[1]; // fiber of value 1.0
        assert_eq!(branch.individual.support_size(), 2);
        let mutated = qga_mutate(&branch.individual, &RegisterOp::QubitRotations(0.05)).unwrap();
        assert!(mutated.support_size() > 2, "diversity did not grow");
        // correlation is structural: every support pair sits on the graph of f
        for (x, y) in mutated.joint_support() {
            assert_eq!(y, mutated.fitness_table()[x]);
        }
    }

    #[test]
    fn product_state_counterexample_yields_a_violation() {
        let f = Arc::new(vec![0.0, 1.0]);
        let ce = product_state_counterexample(f.clone()).unwrap();
        let (x, y) = ce.violating_pair;
        assert_ne!(f[x], y, "pair does not violate the correlation");
        // the violating pair really is in the post-measurement support
        assert!(ce
            .post_measurement
            .support()
            .iter()
            .any(|&(sx, sv)| sx == x && sv == y));
        // while the correlated individual never leaves the graph of f
        for (x, y) in ce.correlated.joint_support() {
            assert_eq!(y, f[x]);
        }
    }

    #[test]
    fn constant_fitness_has_no_counterexample() {
        let f = Arc::new(vec![3.0, 3.0, 3.0, 3.0]);
        assert!(matches!(
            product_state_counterexample(f),
            Err(QgaError::ConstantFitness)
        ));
    }

    #[test]
    fn qga_best_history_is_monotone() {
        let f = Arc::new(negated_hamming_weight(6));
        let params = QgaParams::default();
        let result = run_qga(f, &params, 3).unwrap();
        assert_eq!(result.history.len(), params.generations);
        for w in result.history.windows(2) {
            assert!(w[1].best_fitness >= w[0].best_fitness);
        }
        assert_eq!(
            result.best_fitness,
            result.history.last().unwrap().best_fitness
        );
    }

    #[test]
    fn qga_finds_the_hamming_optimum_reliably() {
        // N = 64, M = 8, 30 generations; global max is 0 at x = 0
        let f = Arc::new(negated_hamming_weight(6));
        let params = QgaParams::default();
        let hits = (0..25)
            .filter(|&s| run_qga(f.clone(), &params, 100 + s).unwrap().best_fitness == 0.0)
            .count();
        assert!(hits >= 20, "only {hits}/25 runs reached the optimum");
    }

    #[test]
    fn landscape_helpers() {
        let f = negated_hamming_weight(3);
        assert_eq!(f.len(), 8);
        assert_eq!(f[0], 0.0);
        assert_eq!(f[0b111], -3.0);
        let parsed = parse_fitness_table("1.5\n-2\n0\n").unwrap();
        assert_eq!(parsed, vec![1.5, -2.0, 0.0]);
        assert!(parse_fitness_table("abc").is_err());
        assert!(matches!(
            parse_fitness_table(""),
            Err(QgaError::EmptyLandscape)
        ));
    }
}
