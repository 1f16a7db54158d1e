//! Quantum-inspired GA for the 0-1 knapsack plus conventional-GA baselines.
//!
//! A QIGA individual is a chromosome of m amplitude pairs (α_i0, α_i1) with
//! α_i0² + α_i1² = 1. Observation samples a bit string from the squared
//! amplitudes, a repair step restores feasibility, and a per-qubit rotation
//! nudges every amplitude pair toward the bit the better of (observation,
//! stored best) carries. There is no crossover or mutation by default; an
//! optional one-point crossover over amplitude pairs sits behind a parameter.

mod cga;
mod knapsack;

pub use cga::{run_cga, CgaParams, CgaResult, CgaVariant};
pub use knapsack::{
    decode_ordinal, exhaustive_optimum, greedy_by_ratio, penalty_fitness, profit, repair,
    BinarySolution, DecodeOrder, KnapsackError, KnapsackInstance, OrdinalChromosome, PenaltyKind,
    RepairMode,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Rotation step Δθ used by the amplitude update.
pub const DELTA_THETA: f64 = 0.025;

/// Tolerance for the per-qubit normalization invariant.
pub const QUBIT_NORM_TOL: f64 = 1e-9;

/// A sequence of m real amplitude pairs, one per item.
#[derive(Debug, Clone, PartialEq)]
pub struct MQubitChromosome {
    pairs: Vec<(f64, f64)>,
}

impl MQubitChromosome {
    /// Every qubit in the even superposition (1/√2, 1/√2).
    pub fn uniform(m: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        MQubitChromosome {
            pairs: vec![(s, s); m],
        }
    }

    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Self {
        let c = MQubitChromosome { pairs };
        debug_assert!(c.is_normalized());
        c
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn is_normalized(&self) -> bool {
        self.pairs
            .iter()
            .all(|(a0, a1)| (a0 * a0 + a1 * a1 - 1.0).abs() <= QUBIT_NORM_TOL)
    }

    /// Samples a bit string: x_i = 1 when a uniform draw exceeds |α_i0|².
    pub fn observe<R: Rng>(&self, rng: &mut R) -> Vec<bool> {
        self.pairs
            .iter()
            .map(|(a0, _)| rng.gen::<f64>() > a0 * a0)
            .collect()
    }

    /// Deterministic rule: x_i = 1 iff |α_i1|² > |α_i0|²; ties give 0.
    /// The resulting string indexes the largest-probability term of the
    /// tensor-product expansion of the chromosome.
    pub fn observe_argmax(&self) -> Vec<bool> {
        self.pairs
            .iter()
            .map(|(a0, a1)| a1 * a1 > a0 * a0)
            .collect()
    }
}

/// Rotates every amplitude pair of `q` where the observed string and the
/// best string disagree, increasing the amplitude of the bit value held by
/// the better of the two (`observed` when `observed_is_fitter`, otherwise
/// `best`). The rotation angle is ±Δθ with the sign of α_i0·α_i1 chosen so
/// the desired probability grows; a zero product leaves the qubit alone.
pub fn update(
    q: &MQubitChromosome,
    observed: &[bool],
    best: &[bool],
    observed_is_fitter: bool,
    delta_theta: f64,
) -> MQubitChromosome {
    assert_eq!(q.len(), observed.len());
    assert_eq!(q.len(), best.len());
    let pairs = q
        .pairs
        .iter()
        .zip(observed.iter().zip(best))
        .map(|(&(a0, a1), (&xi, &bi))| {
            if xi == bi {
                return (a0, a1);
            }
            let product = a0 * a1;
            if product == 0.0 {
                return (a0, a1);
            }
            let desired_one = if observed_is_fitter { xi } else { bi };
            let grow_one = product.signum() * delta_theta;
            let theta = if desired_one { grow_one } else { -grow_one };
            let (sin, cos) = theta.sin_cos();
            (cos * a0 - sin * a1, sin * a0 + cos * a1)
        })
        .collect();
    MQubitChromosome { pairs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObserveRule {
    /// Born-rule sampling (procedure `make`).
    Sample,
    /// Deterministic largest-amplitude rule.
    Argmax,
}

#[derive(Debug, Clone)]
pub struct QigaParams {
    pub population_size: usize,
    pub generations: usize,
    pub observe_rule: ObserveRule,
    pub delta_theta: f64,
    /// Probability of a one-point crossover over amplitude pairs between
    /// random chromosome pairs each generation; 0 disables it (default).
    pub crossover_prob: f64,
}

impl Default for QigaParams {
    fn default() -> Self {
        QigaParams {
            population_size: 10,
            generations: 500,
            observe_rule: ObserveRule::Sample,
            delta_theta: DELTA_THETA,
            crossover_prob: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QigaResult {
    pub best: BinarySolution,
    /// Stored-best profit after each generation.
    pub history: Vec<f64>,
}

/// Runs the QIGA: observe each chromosome, repair with random item
/// selection, evaluate, rotate toward the stored best, then update the
/// stored best. Binary strings are discarded at the end of each loop.
pub fn run_qiga(instance: &KnapsackInstance, params: &QigaParams, seed: u64) -> QigaResult {
    assert!(params.population_size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = instance.len();
    let mut population: Vec<MQubitChromosome> = (0..params.population_size)
        .map(|_| MQubitChromosome::uniform(m))
        .collect();

    let observe = |q: &MQubitChromosome, rng: &mut ChaCha8Rng, rule: ObserveRule| match rule {
        ObserveRule::Sample => q.observe(rng),
        ObserveRule::Argmax => q.observe_argmax(),
    };

    // initial observation fixes the starting best
    let mut best: Option<BinarySolution> = None;
    for q in &population {
        let x = observe(q, &mut rng, params.observe_rule);
        let repaired = repair(&x, instance, RepairMode::Random, &mut rng);
        let sol = BinarySolution::evaluate(repaired, instance);
        if best.as_ref().map_or(true, |b| sol.profit > b.profit) {
            best = Some(sol);
        }
    }
    let mut best = best.expect("population is nonempty");

    let mut history = Vec::with_capacity(params.generations);
    for _ in 0..params.generations {
        let mut generation_best: Option<BinarySolution> = None;
        for q in population.iter_mut() {
            let x = observe(q, &mut rng, params.observe_rule);
            let repaired = repair(&x, instance, RepairMode::Random, &mut rng);
            let sol = BinarySolution::evaluate(repaired, instance);
            *q = update(
                q,
                &sol.bits,
                &best.bits,
                sol.profit > best.profit,
                params.delta_theta,
            );
            if generation_best
                .as_ref()
                .map_or(true, |g| sol.profit > g.profit)
            {
                generation_best = Some(sol);
            }
        }
        if params.crossover_prob > 0.0 && population.len() >= 2 {
            let i = rng.gen_range(0..population.len());
            let mut j = rng.gen_range(0..population.len() - 1);
            if j >= i {
                j += 1;
            }
            if rng.gen::<f64>() < params.crossover_prob {
                let cut = rng.gen_range(0..=m);
                for k in cut..m {
                    let tmp = population[i].pairs[k];
                    population[i].pairs[k] = population[j].pairs[k];
                    population[j].pairs[k] = tmp;
                }
            }
        }
        let generation_best = generation_best.expect("population is nonempty");
        if generation_best.profit > best.profit {
            best = generation_best;
        }
        history.push(best.profit);
    }
    QigaResult { best, history }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn observe_extremes() {
        let mut r = rng(1);
        let zeros = MQubitChromosome::from_pairs(vec![(1.0, 0.0); 8]);
        assert_eq!(zeros.observe(&mut r), vec![false; 8]);
        let ones = MQubitChromosome::from_pairs(vec![(0.0, 1.0); 8]);
        assert_eq!(ones.observe(&mut r), vec![true; 8]);
    }

    #[test]
    fn observe_marginals_match_amplitudes() {
        let mut r = rng(2);
        let q = MQubitChromosome::uniform(1);
        let draws = 10_000;
        let ones = (0..draws)
            .filter(|_| q.observe(&mut r)[0])
            .count() as f64;
        let freq = ones / draws as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq = {freq}");

        // and a biased qubit: P(1) = 0.64
        let q = MQubitChromosome::from_pairs(vec![(0.6, 0.8)]);
        let ones = (0..draws).filter(|_| q.observe(&mut r)[0]).count() as f64;
        let freq = ones / draws as f64;
        assert!((freq - 0.64).abs() < 0.02, "freq = {freq}");
    }

    #[test]
    fn argmax_rule_and_tie_break() {
        let q = MQubitChromosome::from_pairs(vec![(0.6, 0.8)]);
        assert_eq!(q.observe_argmax(), vec![true]);
        let q = MQubitChromosome::uniform(5);
        assert_eq!(q.observe_argmax(), vec![false; 5]);
    }

    /// The argmax string indexes a largest-|amplitude| term of the full
    /// tensor-product expansion.
    #[test]
    fn argmax_indexes_the_largest_product_term() {
        let mut r = rng(3);
        for _ in 0..50 {
            let m = 8;
            let pairs: Vec<(f64, f64)> = (0..m)
                .map(|_| {
                    let t = r.gen_range(0.0..std::f64::consts::TAU);
                    (t.cos(), t.sin())
                })
                .collect();
            let q = MQubitChromosome::from_pairs(pairs.clone());
            let x = q.observe_argmax();
            let amp = |bits: &[bool]| -> f64 {
                bits.iter()
                    .zip(&pairs)
                    .map(|(&b, &(a0, a1))| if b { a1 } else { a0 })
                    .product::<f64>()
                    .abs()
            };
            let chosen = amp(&x);
            for mask in 0..(1usize << m) {
                let bits: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
                assert!(chosen >= amp(&bits) - 1e-12);
            }
        }
    }

    #[test]
    fn update_leaves_matching_bits_alone() {
        let q = MQubitChromosome::uniform(3);
        let x = vec![true, false, true];
        let out = update(&q, &x, &x, false, DELTA_THETA);
        assert_eq!(out, q);
    }

    #[test]
    fn update_grows_the_desired_amplitude() {
        let q = MQubitChromosome::uniform(1);
        // best solution holds bit 1, observation holds 0, best is fitter
        let out = update(&q, &[false], &[true], false, DELTA_THETA);
        let (a0, a1) = out.pairs()[0];
        assert!(a1 * a1 > 0.5, "|α1|² = {}", a1 * a1);
        assert!(a0 * a0 < 0.5);

        // mirrored: desired bit 0
        let out = update(&q, &[true], &[false], false, DELTA_THETA);
        let (a0, a1) = out.pairs()[0];
        assert!(a0 * a0 > 0.5);
        assert!(a1 * a1 < 0.5);

        // when the observation is fitter the rotation tracks the observation
        let out = update(&q, &[true], &[false], true, DELTA_THETA);
        let (_, a1) = out.pairs()[0];
        assert!(a1 * a1 > 0.5);
    }

    #[test]
    fn update_skips_zero_product_qubits() {
        let q = MQubitChromosome::from_pairs(vec![(1.0, 0.0)]);
        let out = update(&q, &[false], &[true], false, DELTA_THETA);
        assert_eq!(out.pairs()[0], (1.0, 0.0));
    }

    #[test]
    fn update_preserves_normalization_exactly() {
        let mut r = rng(4);
        let mut q = MQubitChromosome::uniform(20);
        for _ in 0..1000 {
            let x: Vec<bool> = (0..20).map(|_| r.gen_bool(0.5)).collect();
            let b: Vec<bool> = (0..20).map(|_| r.gen_bool(0.5)).collect();
            q = update(&q, &x, &b, r.gen_bool(0.5), DELTA_THETA);
            for &(a0, a1) in q.pairs() {
                assert!((a0 * a0 + a1 * a1 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn qiga_best_history_is_monotone() {
        let mut r = rng(5);
        let inst = KnapsackInstance::generate(40, &mut r);
        let params = QigaParams {
            population_size: 4,
            generations: 80,
            ..QigaParams::default()
        };
        let result = run_qiga(&inst, &params, 9);
        assert_eq!(result.history.len(), 80);
        for w in result.history.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(inst.is_feasible(&result.best.bits));
        assert_eq!(result.best.profit, *result.history.last().unwrap());
    }

    #[test]
    fn qiga_with_argmax_rule_still_improves() {
        let mut r = rng(6);
        let inst = KnapsackInstance::generate(40, &mut r);
        let params = QigaParams {
            population_size: 2,
            generations: 150,
            observe_rule: ObserveRule::Argmax,
            ..QigaParams::default()
        };
        let result = run_qiga(&inst, &params, 10);
        assert!(result.best.profit > 0.0);
        assert!(inst.is_feasible(&result.best.bits));
    }

    #[test]
    fn single_member_qiga_tracks_the_greedy_heuristic() {
        // pop 1, 500 generations vs greedy-by-ratio over 25 seeded runs
        let mut r = rng(7);
        let inst = KnapsackInstance::generate(100, &mut r);
        let greedy = greedy_by_ratio(&inst).profit;
        let params = QigaParams {
            population_size: 1,
            generations: 500,
            ..QigaParams::default()
        };
        let wins = (0..25)
            .filter(|&s| run_qiga(&inst, &params, 1000 + s).best.profit >= greedy)
            .count();
        assert!(wins >= 20, "only {wins}/25 runs matched the greedy packing");
    }

    #[test]
    fn qiga_crossover_flag_keeps_normalization() {
        let mut r = rng(8);
        let inst = KnapsackInstance::generate(20, &mut r);
        let params = QigaParams {
            population_size: 4,
            generations: 50,
            crossover_prob: 0.8,
            ..QigaParams::default()
        };
        let result = run_qiga(&inst, &params, 11);
        assert!(inst.is_feasible(&result.best.bits));
    }
}
