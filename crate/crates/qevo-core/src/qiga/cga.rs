//! Conventional GA baselines for the knapsack: penalty functions, repair
//! methods and ordinal decoders.
//!
//! All eight variants share the same engine: population 100, roulette
//! selection, one-point crossover with probability 0.65, per-gene mutation
//! 0.05, full generational replacement. Penalty variants evolve raw bit
//! strings and may visit infeasible points, so the reported best tracks the
//! best *feasible* solution seen while the penalized fitness drives
//! selection. Repair variants write the repaired string back into the
//! chromosome with 5% probability.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::knapsack::{
    decode_ordinal, penalty_fitness, profit, repair, BinarySolution, DecodeOrder,
    KnapsackInstance, OrdinalChromosome, PenaltyKind, RepairMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgaVariant {
    Penalty(PenaltyKind),
    Repair(RepairMode),
    Decoder(DecodeOrder),
    /// Linear penalty fitness combined with random repair write-back.
    PenaltyRepair,
}

impl CgaVariant {
    pub const ALL: [CgaVariant; 8] = [
        CgaVariant::Penalty(PenaltyKind::Logarithmic),
        CgaVariant::Penalty(PenaltyKind::Linear),
        CgaVariant::Penalty(PenaltyKind::Quadratic),
        CgaVariant::Repair(RepairMode::Random),
        CgaVariant::Repair(RepairMode::Greedy),
        CgaVariant::Decoder(DecodeOrder::InstanceOrder),
        CgaVariant::Decoder(DecodeOrder::GreedyOrder),
        CgaVariant::PenaltyRepair,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CgaVariant::Penalty(PenaltyKind::Logarithmic) => "pen1",
            CgaVariant::Penalty(PenaltyKind::Linear) => "pen2",
            CgaVariant::Penalty(PenaltyKind::Quadratic) => "pen3",
            CgaVariant::Repair(RepairMode::Random) => "rep1",
            CgaVariant::Repair(RepairMode::Greedy) => "rep2",
            CgaVariant::Decoder(DecodeOrder::InstanceOrder) => "dec1",
            CgaVariant::Decoder(DecodeOrder::GreedyOrder) => "dec2",
            CgaVariant::PenaltyRepair => "pen2rep1",
        }
    }

    pub fn from_name(name: &str) -> Option<CgaVariant> {
        CgaVariant::ALL.iter().copied().find(|v| v.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct CgaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// Probability of writing a repaired string back into its chromosome.
    pub repair_write_back: f64,
}

impl Default for CgaParams {
    fn default() -> Self {
        CgaParams {
            population_size: 100,
            generations: 500,
            crossover_prob: 0.65,
            mutation_prob: 0.05,
            repair_write_back: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CgaResult {
    /// Best feasible solution found over the whole run.
    pub best: BinarySolution,
    /// Best feasible profit after each generation.
    pub history: Vec<f64>,
}

fn roulette<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    // shift into nonnegative territory; penalties can push fitness below zero
    let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = if min < 0.0 { -min } else { 0.0 };
    let total: f64 = weights.iter().map(|w| w + shift).sum();
    if total <= 0.0 {
        return rng.gen_range(0..weights.len());
    }
    let mut u: f64 = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w + shift;
        if u < 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

fn one_point_bits<R: Rng>(a: &[bool], b: &[bool], rng: &mut R) -> (Vec<bool>, Vec<bool>) {
    let cut = rng.gen_range(0..=a.len());
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    for k in cut..a.len() {
        c1[k] = b[k];
        c2[k] = a[k];
    }
    (c1, c2)
}

fn run_binary_cga(
    instance: &KnapsackInstance,
    variant: CgaVariant,
    params: &CgaParams,
    rng: &mut ChaCha8Rng,
) -> CgaResult {
    let m = instance.len();
    let mut pop: Vec<Vec<bool>> = (0..params.population_size)
        .map(|_| (0..m).map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let mut best: Option<BinarySolution> = None;
    let mut history = Vec::with_capacity(params.generations);

    for _ in 0..params.generations {
        let mut fitnesses = Vec::with_capacity(pop.len());
        for chromosome in pop.iter_mut() {
            let fitness = match variant {
                CgaVariant::Penalty(kind) => {
                    if instance.is_feasible(chromosome) {
                        let sol = BinarySolution::evaluate(chromosome.clone(), instance);
                        if best.as_ref().map_or(true, |b| sol.profit > b.profit) {
                            best = Some(sol);
                        }
                    }
                    penalty_fitness(chromosome, instance, kind)
                }
                CgaVariant::Repair(mode) => {
                    let repaired = repair(chromosome, instance, mode, rng);
                    let value = profit(&repaired, instance);
                    let sol = BinarySolution::evaluate(repaired.clone(), instance);
                    if best.as_ref().map_or(true, |b| sol.profit > b.profit) {
                        best = Some(sol);
                    }
                    if rng.gen::<f64>() < params.repair_write_back {
                        *chromosome = repaired;
                    }
                    value
                }
                CgaVariant::PenaltyRepair => {
                    let repaired = repair(chromosome, instance, RepairMode::Random, rng);
                    let sol = BinarySolution::evaluate(repaired.clone(), instance);
                    if best.as_ref().map_or(true, |b| sol.profit > b.profit) {
                        best = Some(sol);
                    }
                    if rng.gen::<f64>() < params.repair_write_back {
                        *chromosome = repaired;
                    }
                    penalty_fitness(chromosome, instance, PenaltyKind::Linear)
                }
                CgaVariant::Decoder(_) => unreachable!("handled by run_ordinal_cga"),
            };
            fitnesses.push(fitness);
        }
        history.push(best.as_ref().map_or(0.0, |b| b.profit));

        let mut next = Vec::with_capacity(pop.len());
        while next.len() < pop.len() {
            let pa = &pop[roulette(&fitnesses, rng)];
            let pb = &pop[roulette(&fitnesses, rng)];
            let (mut c1, mut c2) = if rng.gen::<f64>() < params.crossover_prob {
                one_point_bits(pa, pb, rng)
            } else {
                (pa.clone(), pb.clone())
            };
            for child in [&mut c1, &mut c2] {
                for bit in child.iter_mut() {
                    if rng.gen::<f64>() < params.mutation_prob {
                        *bit = !*bit;
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

    let best = best.unwrap_or_else(|| BinarySolution::evaluate(vec![false; m], instance));
    CgaResult { best, history }
}

fn run_ordinal_cga(
    instance: &KnapsackInstance,
    order: DecodeOrder,
    params: &CgaParams,
    rng: &mut ChaCha8Rng,
) -> CgaResult {
    let m = instance.len();
    let mut pop: Vec<OrdinalChromosome> = (0..params.population_size)
        .map(|_| OrdinalChromosome::random(m, rng))
        .collect();
    let mut best: Option<BinarySolution> = None;
    let mut history = Vec::with_capacity(params.generations);

    for _ in 0..params.generations {
        let mut fitnesses = Vec::with_capacity(pop.len());
        for chromosome in &pop {
            let bits = decode_ordinal(chromosome, instance, order);
            let sol = BinarySolution::evaluate(bits, instance);
            fitnesses.push(sol.profit);
            if best.as_ref().map_or(true, |b| sol.profit > b.profit) {
                best = Some(sol);
            }
        }
        history.push(best.as_ref().map_or(0.0, |b| b.profit));

        let mut next = Vec::with_capacity(pop.len());
        while next.len() < pop.len() {
            let pa = &pop[roulette(&fitnesses, rng)];
            let pb = &pop[roulette(&fitnesses, rng)];
            let cut = rng.gen_range(0..=m);
            let mut v1 = pa.values().to_vec();
            let mut v2 = pb.values().to_vec();
            if rng.gen::<f64>() < params.crossover_prob {
                for k in cut..m {
                    std::mem::swap(&mut v1[k], &mut v2[k]);
                }
            }
            for v in [&mut v1, &mut v2] {
                for (i, g) in v.iter_mut().enumerate() {
                    if rng.gen::<f64>() < params.mutation_prob {
                        *g = rng.gen_range(1..=m - i);
                    }
                }
            }
            next.push(OrdinalChromosome::new(v1).expect("ranges preserved"));
            if next.len() < pop.len() {
                next.push(OrdinalChromosome::new(v2).expect("ranges preserved"));
            }
        }
        pop = next;
    }

    let best = best.unwrap_or_else(|| BinarySolution::evaluate(vec![false; m], instance));
    CgaResult { best, history }
}

/// Runs one conventional-GA baseline on the instance.
pub fn run_cga(
    instance: &KnapsackInstance,
    variant: CgaVariant,
    params: &CgaParams,
    seed: u64,
) -> CgaResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match variant {
        CgaVariant::Decoder(order) => run_ordinal_cga(instance, order, params, &mut rng),
        _ => run_binary_cga(instance, variant, params, &mut rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qiga::exhaustive_optimum;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn variant_names_round_trip() {
        for v in CgaVariant::ALL {
            assert_eq!(CgaVariant::from_name(v.name()), Some(v));
        }
        assert_eq!(CgaVariant::from_name("nope"), None);
    }

    #[test]
    fn every_variant_reports_a_feasible_best() {
        let mut r = rng(1);
        let inst = KnapsackInstance::generate(25, &mut r);
        let params = CgaParams {
            generations: 60,
            ..CgaParams::default()
        };
        for variant in CgaVariant::ALL {
            let result = run_cga(&inst, variant, &params, 7);
            assert!(
                inst.is_feasible(&result.best.bits),
                "{} reported an infeasible best",
                variant.name()
            );
            assert_eq!(result.history.len(), 60);
            for w in result.history.windows(2) {
                assert!(w[1] >= w[0]);
            }
        }
    }

    #[test]
    fn repair_variant_finds_the_small_instance_optimum() {
        let mut r = rng(2);
        let inst = KnapsackInstance::generate(12, &mut r);
        let optimum = exhaustive_optimum(&inst);
        let params = CgaParams {
            generations: 200,
            ..CgaParams::default()
        };
        let hit = (0..5).any(|s| {
            let res = run_cga(&inst, CgaVariant::Repair(RepairMode::Greedy), &params, s);
            (res.best.profit - optimum).abs() < 1e-9
        });
        assert!(hit, "greedy-repair CGA never reached the optimum {optimum}");
    }

    #[test]
    fn runs_are_reproducible() {
        let mut r = rng(3);
        let inst = KnapsackInstance::generate(20, &mut r);
        let params = CgaParams {
            generations: 30,
            ..CgaParams::default()
        };
        let a = run_cga(&inst, CgaVariant::PenaltyRepair, &params, 5);
        let b = run_cga(&inst, CgaVariant::PenaltyRepair, &params, 5);
        assert_eq!(a.best, b.best);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn roulette_handles_negative_and_flat_weights() {
        let mut r = rng(4);
        let weights = vec![-5.0, -1.0, -3.0];
        let mut counts = [0usize; 3];
        for _ in 0..3000 {
            counts[roulette(&weights, &mut r)] += 1;
        }
        // index 1 has the largest shifted weight
        assert!(counts[1] > counts[0]);
        assert!(counts[1] > counts[2]);
        // all-equal weights degenerate to uniform choice without panicking
        let flat = vec![0.0, 0.0];
        let _ = roulette(&flat, &mut r);
    }
}
