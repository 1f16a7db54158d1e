//! Real-coded GA that learns an n×n linear operator from functional points.
//!
//! Each individual is a real matrix whose entries (alleles) live in [-1, 1].
//! Fitness is exp(-error), with the error averaged over the learning set in
//! the 1-norm. Selection is elitist: the best `elite_count` matrices survive
//! unchanged and the rest of the next generation is bred from the top
//! `selection_pressure` fraction of the sorted population.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OpgaError {
    #[error("learning set is empty")]
    EmptySet,
    #[error("vector dimension {got} does not match set dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vectors must be finite-valued")]
    NonFinite,
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("malformed learning set: {0}")]
    Parse(String),
}

/// A learning sequence of (input, target) vector pairs, all of dimension n.
#[derive(Debug, Clone)]
pub struct LearningSet {
    dim: usize,
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

impl LearningSet {
    pub fn new(pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self, OpgaError> {
        let dim = pairs.first().ok_or(OpgaError::EmptySet)?.0.len();
        for (x, y) in &pairs {
            for v in x.iter().chain(y) {
                if !v.is_finite() {
                    return Err(OpgaError::NonFinite);
                }
            }
            if x.len() != dim || y.len() != dim {
                return Err(OpgaError::DimensionMismatch {
                    expected: dim,
                    got: x.len().max(y.len()),
                });
            }
        }
        Ok(LearningSet { dim, pairs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.pairs
    }

    /// Built-in 2×2 set with orthonormal inputs; the exact solution is the
    /// Hadamard transform.
    pub fn hadamard_orthonormal() -> LearningSet {
        let s5 = 5.0f64.sqrt();
        let s10 = 10.0f64.sqrt();
        let s20 = 20.0f64.sqrt();
        let s40 = 40.0f64.sqrt();
        LearningSet::new(vec![
            (vec![2.0 / s5, 1.0 / s5], vec![3.0 / s10, 1.0 / s10]),
            (vec![-2.0 / s20, 4.0 / s20], vec![2.0 / s40, -6.0 / s40]),
        ])
        .expect("valid built-in set")
    }

    /// Built-in 2×2 set whose inputs are *not* orthonormal; the exact
    /// solution is still the Hadamard transform, but gradient-free single
    /// pass methods fail on it.
    pub fn hadamard_skew() -> LearningSet {
        let s5 = 5.0f64.sqrt();
        let s10 = 10.0f64.sqrt();
        let s2 = 2.0f64.sqrt();
        LearningSet::new(vec![
            (vec![1.0 / s5, 2.0 / s5], vec![3.0 / s10, -1.0 / s10]),
            (vec![1.0 / s2, 1.0 / s2], vec![1.0, 0.0]),
        ])
        .expect("valid built-in set")
    }

    /// Parses the plain-text exchange format: first line `n m`, then m lines
    /// of 2n reals (input vector followed by target vector).
    pub fn parse(text: &str) -> Result<Self, OpgaError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(OpgaError::EmptySet)?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| OpgaError::Parse("expected 'n m' header".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| OpgaError::Parse("expected 'n m' header".into()))?;
        let mut pairs = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| OpgaError::Parse(format!("expected {m} data lines")))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| OpgaError::Parse(e.to_string()))?;
            if vals.len() != 2 * n {
                return Err(OpgaError::Parse(format!(
                    "expected {} reals per line, got {}",
                    2 * n,
                    vals.len()
                )));
            }
            pairs.push((vals[..n].to_vec(), vals[n..].to_vec()));
        }
        LearningSet::new(pairs)
    }

    /// Serializes to the plain-text exchange format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.dim, self.pairs.len());
        for (x, y) in &self.pairs {
            let row: Vec<String> = x.iter().chain(y).map(|v| format!("{v}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// A real n×n matrix individual.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixChromosome {
    n: usize,
    /// Row-major entries.
    entries: Vec<f64>,
}

impl MatrixChromosome {
    pub fn new(n: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), n * n);
        MatrixChromosome { n, entries }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let entries = (0..n * n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        MatrixChromosome { n, entries }
    }

    /// The 2×2 Hadamard transform, handy as a reference solution in tests.
    pub fn hadamard2() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        MatrixChromosome::new(2, vec![s, s, s, -s])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }
}

/// Mean 1-norm residual over the learning set:
/// (1/(n·m)) Σ_i ‖A χ_i − ψ_i‖₁.
pub fn error(a: &MatrixChromosome, set: &LearningSet) -> Result<f64, OpgaError> {
    if a.dim() != set.dim() {
        return Err(OpgaError::DimensionMismatch {
            expected: set.dim(),
            got: a.dim(),
        });
    }
    let mut total = 0.0;
    for (x, y) in set.pairs() {
        let ax = a.apply(x);
        total += ax.iter().zip(y).map(|(u, v)| (u - v).abs()).sum::<f64>();
    }
    Ok(total / (a.dim() as f64 * set.len() as f64))
}

/// fitness(A) = exp(-error(A)); equals 1 exactly when the error is 0.
pub fn fitness(a: &MatrixChromosome, set: &LearningSet) -> Result<f64, OpgaError> {
    Ok((-error(a, set)?).exp())
}

/// Uniform per-entry crossover: every entry of each child is copied from a
/// uniformly chosen parent, independently.
pub fn crossover<R: Rng>(
    a: &MatrixChromosome,
    b: &MatrixChromosome,
    rng: &mut R,
) -> (MatrixChromosome, MatrixChromosome) {
    assert_eq!(a.dim(), b.dim());
    let make_child = |rng: &mut R| {
        let entries = a
            .entries
            .iter()
            .zip(&b.entries)
            .map(|(&x, &y)| if rng.gen::<f64>() < 0.5 { x } else { y })
            .collect();
        MatrixChromosome {
            n: a.n,
            entries,
        }
    };
    let c1 = make_child(rng);
    let c2 = make_child(rng);
    (c1, c2)
}

/// Perturbation mutation A → A + Δ. Up to `mutation_number` randomly chosen
/// entries are perturbed, each with probability `mutation_prob`, by a
/// magnitude drawn uniformly from the perturbation range with a random sign.
/// Results are clamped back into [-1, 1].
pub fn mutate<R: Rng>(a: &MatrixChromosome, params: &GaParams, rng: &mut R) -> MatrixChromosome {
    let mut out = a.clone();
    let cells = out.entries.len();
    for _ in 0..params.mutation_number {
        let pos = rng.gen_range(0..cells);
        if rng.gen::<f64>() < params.mutation_prob {
            let (lo, hi) = params.perturbation_range;
            let magnitude = rng.gen_range(lo..=hi);
            let delta = if rng.gen::<f64>() < 0.5 {
                magnitude
            } else {
                -magnitude
            };
            out.entries[pos] = (out.entries[pos] + delta).clamp(-1.0, 1.0);
        }
    }
    out
}

/// GA parameters. The defaults are the settings used for the 2×2 learning
/// experiments: N=200, 100 generations, Pc=0.85, Pm=0.95, Ps=0.30, Ne=30,
/// Nm=1, perturbations in [0.001, 0.1].
#[derive(Debug, Clone)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub selection_pressure: f64,
    pub elite_count: usize,
    pub mutation_number: usize,
    pub perturbation_range: (f64, f64),
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 200,
            generations: 100,
            crossover_prob: 0.85,
            mutation_prob: 0.95,
            selection_pressure: 0.30,
            elite_count: 30,
            mutation_number: 1,
            perturbation_range: (0.001, 0.1),
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), OpgaError> {
        let bad = |name: &'static str, reason: String| Err(OpgaError::InvalidParam { name, reason });
        if self.population_size == 0 {
            return bad("population_size", "must be positive".into());
        }
        if self.elite_count >= self.population_size {
            return bad(
                "elite_count",
                format!(
                    "must be smaller than population_size ({})",
                    self.population_size
                ),
            );
        }
        for (name, v) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("selection_pressure", self.selection_pressure),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(name, format!("{v} is outside [0, 1]"));
            }
        }
        if self.mutation_number == 0 {
            return bad("mutation_number", "must be at least 1".into());
        }
        let (lo, hi) = self.perturbation_range;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return bad("perturbation_range", format!("[{lo}, {hi}] is not a range"));
        }
        if self.generations == 0 {
            return bad("generations", "must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GenerationRecord {
    pub best_error: f64,
    pub best_fitness: f64,
}

#[derive(Debug, Clone)]
pub struct LearningResult {
    pub best: MatrixChromosome,
    pub best_error: f64,
    /// One record per generation, taken right after evaluation.
    pub history: Vec<GenerationRecord>,
}

/// Evaluates and sorts a population by ascending error (descending fitness).
/// The sort is stable, so equal-error individuals keep their order.
fn evaluate_sort(
    pop: &mut Vec<MatrixChromosome>,
    set: &LearningSet,
) -> Vec<f64> {
    let mut scored: Vec<(f64, MatrixChromosome)> = pop
        .drain(..)
        .map(|m| (error(&m, set).expect("dimensions checked at entry"), m))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite errors"));
    let errors = scored.iter().map(|(e, _)| *e).collect();
    *pop = scored.into_iter().map(|(_, m)| m).collect();
    errors
}

/// One generational step: keeps the `elite_count` best individuals and fills
/// the rest by crossover/mutation over the top `selection_pressure` fraction.
/// `pop` must already be sorted by ascending error.
fn breed_next<R: Rng>(
    pop: &[MatrixChromosome],
    params: &GaParams,
    rng: &mut R,
) -> Vec<MatrixChromosome> {
    let n = params.population_size;
    let mut next: Vec<MatrixChromosome> = pop[..params.elite_count].to_vec();
    let pool = ((params.selection_pressure * n as f64).floor() as usize).max(1);
    while next.len() < n {
        let pa = &pop[rng.gen_range(0..pool)];
        let pb = &pop[rng.gen_range(0..pool)];
        let (mut c1, mut c2) = if rng.gen::<f64>() < params.crossover_prob {
            crossover(pa, pb, rng)
        } else {
            (pa.clone(), pb.clone())
        };
        c1 = mutate(&c1, params, rng);
        c2 = mutate(&c2, params, rng);
        next.push(c1);
        if next.len() < n {
            next.push(c2);
        }
    }
    next
}

/// Runs the learning GA: random initialization in [-1,1]^{n×n}, then
/// `generations` rounds of evaluate-sort, elitism and breeding. Returns the
/// best individual of the final evaluation and the per-generation history.
pub fn run_learning_ga(
    set: &LearningSet,
    params: &GaParams,
    seed: u64,
) -> Result<LearningResult, OpgaError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = set.dim();
    let mut pop: Vec<MatrixChromosome> = (0..params.population_size)
        .map(|_| MatrixChromosome::random(n, &mut rng))
        .collect();
    let mut history = Vec::with_capacity(params.generations);
    let mut best: Option<(f64, MatrixChromosome)> = None;
    for _ in 0..params.generations {
        let errors = evaluate_sort(&mut pop, set);
        let best_error = errors[0];
        history.push(GenerationRecord {
            best_error,
            best_fitness: (-best_error).exp(),
        });
        if best.as_ref().map_or(true, |(e, _)| best_error < *e) {
            best = Some((best_error, pop[0].clone()));
        }
        pop = breed_next(&pop, params, &mut rng);
    }
    let (best_error, best) = best.expect("at least one generation");
    Ok(LearningResult {
        best,
        best_error,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    /// RNG that always returns zero; `gen::<f64>()` then yields 0.0, which
    /// makes every uniform-parent choice pick the first parent.
    struct ZeroRng;
    impl RngCore for ZeroRng {
        fn next_u32(&mut self) -> u32 {
            0
        }
        fn next_u64(&mut self) -> u64 {
            0
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            dest.fill(0);
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
            dest.fill(0);
            Ok(())
        }
    }

    fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn hadamard_solves_the_orthonormal_set() {
        let set = LearningSet::hadamard_orthonormal();
        let err = error(&MatrixChromosome::hadamard2(), &set).unwrap();
        assert!(err < 1e-9, "err = {err}");
    }

    #[test]
    fn hadamard_solves_the_skew_set() {
        let set = LearningSet::hadamard_skew();
        let err = error(&MatrixChromosome::hadamard2(), &set).unwrap();
        assert!(err < 1e-9, "err = {err}");
    }

    #[test]
    fn target_operator_has_zero_error_on_its_own_set() {
        let mut rng = seeded(3);
        let a = MatrixChromosome::random(3, &mut rng);
        let xs: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let pairs = xs.iter().map(|x| (x.clone(), a.apply(x))).collect();
        let set = LearningSet::new(pairs).unwrap();
        assert!(error(&a, &set).unwrap() < 1e-12);
        assert!((fitness(&a, &set).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_of_identity_on_swapped_basis_pair() {
        // n=2, m=1, A=I, χ=(1,0), ψ=(0,1): (1/2)(|1-0| + |0-1|) = 1
        let set = LearningSet::new(vec![(vec![1.0, 0.0], vec![0.0, 1.0])]).unwrap();
        let identity = MatrixChromosome::new(2, vec![1.0, 0.0, 0.0, 1.0]);
        let err = error(&identity, &set).unwrap();
        assert!((err - 1.0).abs() < 1e-12);
        let fit = fitness(&identity, &set).unwrap();
        assert!((fit - (-1.0f64).exp()).abs() < 1e-12);
        assert!((fit - 0.36787944117144233).abs() < 1e-12);
    }

    #[test]
    fn error_rejects_dimension_mismatch() {
        let set = LearningSet::new(vec![(vec![1.0, 0.0], vec![0.0, 1.0])]).unwrap();
        let a = MatrixChromosome::new(3, vec![0.0; 9]);
        assert!(matches!(
            error(&a, &set),
            Err(OpgaError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fitness_is_monotone_in_error() {
        let set = LearningSet::hadamard_orthonormal();
        let mut rng = seeded(11);
        let mut scored: Vec<(f64, f64)> = (0..50)
            .map(|_| {
                let a = MatrixChromosome::random(2, &mut rng);
                (error(&a, &set).unwrap(), fitness(&a, &set).unwrap())
            })
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for pair in scored.windows(2) {
            assert!(pair[0].1 >= pair[1].1);
        }
    }

    #[test]
    fn crossover_of_identical_parents_is_identity() {
        let mut rng = seeded(5);
        let a = MatrixChromosome::random(2, &mut rng);
        let (c1, c2) = crossover(&a, &a.clone(), &mut rng);
        assert_eq!(c1, a);
        assert_eq!(c2, a);
    }

    #[test]
    fn crossover_with_degenerate_rng_clones_first_parent() {
        let a = MatrixChromosome::new(2, vec![0.1, 0.2, 0.3, 0.4]);
        let b = MatrixChromosome::new(2, vec![-0.1, -0.2, -0.3, -0.4]);
        let (c1, c2) = crossover(&a, &b, &mut ZeroRng);
        assert_eq!(c1, a);
        assert_eq!(c2, a);
    }

    #[test]
    fn crossover_children_take_alleles_from_parents() {
        let mut rng = seeded(7);
        for _ in 0..20 {
            let a = MatrixChromosome::random(3, &mut rng);
            let b = MatrixChromosome::random(3, &mut rng);
            let (c1, c2) = crossover(&a, &b, &mut rng);
            for child in [&c1, &c2] {
                for (i, &v) in child.entries().iter().enumerate() {
                    assert!(v == a.entries()[i] || v == b.entries()[i]);
                }
            }
        }
    }

    #[test]
    fn mutate_with_zero_mutation_number_is_identity() {
        let mut rng = seeded(9);
        let a = MatrixChromosome::random(2, &mut rng);
        let params = GaParams {
            mutation_number: 0,
            ..GaParams::default()
        };
        assert_eq!(mutate(&a, &params, &mut rng), a);
    }

    #[test]
    fn mutate_changes_at_most_one_entry_within_range() {
        let mut rng = seeded(13);
        let params = GaParams {
            mutation_number: 1,
            mutation_prob: 1.0,
            perturbation_range: (0.001, 0.1),
            ..GaParams::default()
        };
        for _ in 0..200 {
            let a = MatrixChromosome::new(2, vec![0.0; 4]);
            let m = mutate(&a, &params, &mut rng);
            let changed: Vec<f64> = m
                .entries()
                .iter()
                .zip(a.entries())
                .filter(|(x, y)| x != y)
                .map(|(x, _)| x.abs())
                .collect();
            assert!(changed.len() <= 1);
            for mag in changed {
                assert!((0.001..=0.1).contains(&mag), "|Δ| = {mag}");
            }
        }
    }

    #[test]
    fn mutate_clamps_to_allele_range() {
        // Saturated matrix + a large perturbation range: positive deltas are
        // clamped (entry stays 1.0), negative ones land in [0.1, 0.5].
        let mut rng = seeded(17);
        let params = GaParams {
            mutation_number: 4,
            mutation_prob: 1.0,
            perturbation_range: (0.5, 0.9),
            ..GaParams::default()
        };
        for _ in 0..100 {
            let a = MatrixChromosome::new(2, vec![1.0; 4]);
            let m = mutate(&a, &params, &mut rng);
            for &v in m.entries() {
                assert!(v == 1.0 || (0.1..=0.5).contains(&v), "entry = {v}");
            }
        }
    }

    #[test]
    fn evaluate_sort_orders_by_ascending_error() {
        let set = LearningSet::hadamard_orthonormal();
        let mut rng = seeded(19);
        let mut pop: Vec<MatrixChromosome> =
            (0..30).map(|_| MatrixChromosome::random(2, &mut rng)).collect();
        let errors = evaluate_sort(&mut pop, &set);
        for w in errors.windows(2) {
            assert!(w[0] <= w[1]);
        }
        // fitness descending follows from exp(-e) monotonicity
        for w in errors.windows(2) {
            assert!((-w[0]).exp() >= (-w[1]).exp());
        }
    }

    #[test]
    fn breed_keeps_population_size_and_elites() {
        let set = LearningSet::hadamard_orthonormal();
        let params = GaParams {
            population_size: 40,
            elite_count: 7,
            ..GaParams::default()
        };
        let mut rng = seeded(23);
        let mut pop: Vec<MatrixChromosome> = (0..params.population_size)
            .map(|_| MatrixChromosome::random(2, &mut rng))
            .collect();
        evaluate_sort(&mut pop, &set);
        let next = breed_next(&pop, &params, &mut rng);
        assert_eq!(next.len(), params.population_size);
        for i in 0..params.elite_count {
            assert_eq!(next[i], pop[i], "elite {i} must be a bitwise copy");
        }
    }

    #[test]
    fn learning_ga_finds_the_identity() {
        let set = LearningSet::new(vec![
            (vec![1.0, 0.0], vec![1.0, 0.0]),
            (vec![0.0, 1.0], vec![0.0, 1.0]),
        ])
        .unwrap();
        let result = run_learning_ga(&set, &GaParams::default(), 42).unwrap();
        assert!(result.best_error < 0.05, "error = {}", result.best_error);
    }

    #[test]
    fn history_is_monotone_and_full_length() {
        let set = LearningSet::hadamard_orthonormal();
        let params = GaParams {
            generations: 40,
            ..GaParams::default()
        };
        let result = run_learning_ga(&set, &params, 1).unwrap();
        assert_eq!(result.history.len(), 40);
        for w in result.history.windows(2) {
            assert!(w[1].best_error <= w[0].best_error);
        }
        for rec in &result.history {
            assert!((rec.best_fitness - (-rec.best_error).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_params_are_rejected() {
        let set = LearningSet::hadamard_orthonormal();
        let params = GaParams {
            elite_count: 300,
            ..GaParams::default()
        };
        assert!(matches!(
            run_learning_ga(&set, &params, 0),
            Err(OpgaError::InvalidParam { name: "elite_count", .. })
        ));
    }

    #[test]
    fn learning_set_round_trips_through_text() {
        let set = LearningSet::hadamard_skew();
        let parsed = LearningSet::parse(&set.to_text()).unwrap();
        assert_eq!(parsed.dim(), set.dim());
        assert_eq!(parsed.pairs(), set.pairs());
        assert!(LearningSet::parse("garbage").is_err());
    }
}
