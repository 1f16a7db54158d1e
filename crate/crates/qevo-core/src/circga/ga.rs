//! Generational GA over codon chromosomes for teleportation circuits.
//!
//! Roulette-wheel selection proportional to fitness, two-point crossover on
//! the letter string, per-letter mutation, full replacement every generation
//! (no elitism — the best chromosome ever seen is tracked outside the
//! population). The three evaluation states are resampled every 50
//! generations.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::codon::{decode, CodonChromosome};
use super::teleport::{evaluate, sample_eval_states};

/// How the initial population is built.
#[derive(Debug, Clone)]
pub enum CircuitInit {
    /// Uniformly random chromosomes of `codon_count` codons.
    Random { codon_count: usize },
    /// Copies of a known chromosome; mutation diversifies them immediately.
    Seeded(CodonChromosome),
}

#[derive(Debug, Clone)]
pub struct CircuitGaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// Per-letter mutation probability; `None` selects 1/(letter count).
    pub mutation_prob: Option<f64>,
    pub init: CircuitInit,
    /// Stop early once a chromosome reaches at least this fitness.
    pub stop_at_fitness: Option<f64>,
}

impl Default for CircuitGaParams {
    fn default() -> Self {
        CircuitGaParams {
            population_size: 5000,
            generations: 1000,
            crossover_prob: 0.7,
            mutation_prob: None,
            init: CircuitInit::Random { codon_count: 12 },
            stop_at_fitness: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GaRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub best_gate_count: usize,
}

#[derive(Debug, Clone)]
pub struct CircuitGaResult {
    pub best: CodonChromosome,
    pub best_fitness: f64,
    pub best_gate_count: usize,
    /// One record per executed generation; best-ever values, non-decreasing.
    pub history: Vec<GaRecord>,
}

fn roulette_pick<R: Rng>(cumulative: &[f64], total: f64, rng: &mut R) -> usize {
    if total <= 0.0 {
        return rng.gen_range(0..cumulative.len());
    }
    let u: f64 = rng.gen::<f64>() * total;
    match cumulative.binary_search_by(|c| c.partial_cmp(&u).expect("finite fitness")) {
        Ok(i) => (i + 1).min(cumulative.len() - 1),
        Err(i) => i.min(cumulative.len() - 1),
    }
}

/// Two-point crossover: two cut points on the letter string, middle segments
/// swapped. Lengths and alphabet are preserved.
pub(crate) fn two_point_crossover<R: Rng>(
    a: &CodonChromosome,
    b: &CodonChromosome,
    rng: &mut R,
) -> (CodonChromosome, CodonChromosome) {
    let len = a.letters().len();
    let mut i = rng.gen_range(0..=len);
    let mut j = rng.gen_range(0..=len);
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    let mut la = a.letters().to_vec();
    let mut lb = b.letters().to_vec();
    for k in i..j {
        std::mem::swap(&mut la[k], &mut lb[k]);
    }
    (
        CodonChromosome::from_letters(la).expect("lengths preserved"),
        CodonChromosome::from_letters(lb).expect("lengths preserved"),
    )
}

fn mutate_letters<R: Rng>(c: &mut CodonChromosome, prob: f64, rng: &mut R) {
    for letter in c.letters_mut() {
        if rng.gen::<f64>() < prob {
            *letter = rng.gen_range(0..4u8);
        }
    }
}

pub fn run_circuit_ga(params: &CircuitGaParams, seed: u64) -> CircuitGaResult {
    assert!(params.population_size >= 2, "population needs two parents");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pop: Vec<CodonChromosome> = match &params.init {
        CircuitInit::Random { codon_count } => (0..params.population_size)
            .map(|_| CodonChromosome::random(*codon_count, &mut rng))
            .collect(),
        CircuitInit::Seeded(seed_chromosome) => {
            vec![seed_chromosome.clone(); params.population_size]
        }
    };
    let letter_count = pop[0].letters().len();
    let mutation_prob = params
        .mutation_prob
        .unwrap_or(1.0 / letter_count as f64);

    let mut best: Option<(f64, usize, CodonChromosome)> = None;
    let mut history = Vec::new();
    let mut states: [(Complex64, Complex64); 3] = sample_eval_states(&mut rng);

    for generation in 0..params.generations {
        if generation > 0 && generation % 50 == 0 {
            states = sample_eval_states(&mut rng);
        }
        let fitnesses: Vec<f64> = pop.par_iter().map(|c| evaluate(c, &states)).collect();

        for (c, &f) in pop.iter().zip(&fitnesses) {
            if best.as_ref().map_or(true, |(bf, _, _)| f > *bf) {
                let gates = decode(c).map(|d| d.gate_count()).unwrap_or(0);
                best = Some((f, gates, c.clone()));
            }
        }
        let (best_fitness, best_gate_count, _) = best.as_ref().expect("population evaluated");
        history.push(GaRecord {
            generation,
            best_fitness: *best_fitness,
            best_gate_count: *best_gate_count,
        });
        if params
            .stop_at_fitness
            .map_or(false, |target| *best_fitness >= target)
        {
            break;
        }

        let mut cumulative = Vec::with_capacity(pop.len());
        let mut total = 0.0;
        for &f in &fitnesses {
            total += f;
            cumulative.push(total);
        }
        let mut next = Vec::with_capacity(pop.len());
        while next.len() < pop.len() {
            let pa = &pop[roulette_pick(&cumulative, total, &mut rng)];
            let pb = &pop[roulette_pick(&cumulative, total, &mut rng)];
            let (mut c1, mut c2) = if rng.gen::<f64>() < params.crossover_prob {
                two_point_crossover(pa, pb, &mut rng)
            } else {
                (pa.clone(), pb.clone())
            };
            mutate_letters(&mut c1, mutation_prob, &mut rng);
            mutate_letters(&mut c2, mutation_prob, &mut rng);
            next.push(c1);
            if next.len() < pop.len() {
                next.push(c2);
            }
        }
        pop = next;
    }

    let (best_fitness, best_gate_count, best) = best.expect("at least one generation");
    CircuitGaResult {
        best,
        best_fitness,
        best_gate_count,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn crossover_preserves_length_and_alphabet() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let a = CodonChromosome::random(12, &mut rng);
            let b = CodonChromosome::random(12, &mut rng);
            let (c1, c2) = two_point_crossover(&a, &b, &mut rng);
            assert_eq!(c1.letters().len(), 36);
            assert_eq!(c2.letters().len(), 36);
            for &l in c1.letters().iter().chain(c2.letters()) {
                assert!(l <= 3);
            }
            // multiset of letters is preserved position-wise
            for k in 0..36 {
                let mut got = [c1.letters()[k], c2.letters()[k]];
                let mut want = [a.letters()[k], b.letters()[k]];
                got.sort_unstable();
                want.sort_unstable();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn roulette_frequencies_track_fitness() {
        // χ² over 10^5 draws on a fixed fitness vector; df = 3,
        // comfortably under the 99.9% quantile (16.27).
        let fitness = [1.0, 2.0, 3.0, 4.0];
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for f in fitness {
            total += f;
            cumulative.push(total);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 100_000usize;
        let mut counts = HashMap::new();
        for _ in 0..draws {
            *counts
                .entry(roulette_pick(&cumulative, total, &mut rng))
                .or_insert(0usize) += 1;
        }
        let mut chi2 = 0.0;
        for (i, f) in fitness.iter().enumerate() {
            let expected = draws as f64 * f / total;
            let observed = counts.get(&i).copied().unwrap_or(0) as f64;
            chi2 += (observed - expected).powi(2) / expected;
        }
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }

    #[test]
    fn seeded_run_keeps_population_size_and_monotone_best() {
        let params = CircuitGaParams {
            population_size: 60,
            generations: 12,
            init: CircuitInit::Seeded(CodonChromosome::reference_teleporter()),
            ..CircuitGaParams::default()
        };
        let result = run_circuit_ga(&params, 11);
        assert_eq!(result.history.len(), 12);
        for w in result.history.windows(2) {
            assert!(w[1].best_fitness >= w[0].best_fitness);
        }
        // the seed is already a perfect 11-gate circuit
        assert!(result.best_fitness >= 1.0 + 1.0 / 11.0 - 1e-12);
    }

    #[test]
    fn same_seed_reproduces_the_run() {
        let params = CircuitGaParams {
            population_size: 40,
            generations: 6,
            init: CircuitInit::Random { codon_count: 12 },
            ..CircuitGaParams::default()
        };
        let a = run_circuit_ga(&params, 99);
        let b = run_circuit_ga(&params, 99);
        assert_eq!(a.best, b.best);
        assert_eq!(a.best_fitness, b.best_fitness);
    }
}
