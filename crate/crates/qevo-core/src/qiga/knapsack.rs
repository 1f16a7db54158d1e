//! 0-1 knapsack instances, feasibility repair, penalty functions and the
//! ordinal decoder used by the baseline GAs.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KnapsackError {
    #[error("instance must have at least one item")]
    Empty,
    #[error("weights must be positive (item {0})")]
    BadWeight(usize),
    #[error("capacity must be positive")]
    BadCapacity,
    #[error("malformed instance: {0}")]
    Parse(String),
    #[error("ordinal value {value} at position {position} outside 1..={max}")]
    OrdinalRange {
        position: usize,
        value: usize,
        max: usize,
    },
}

/// A knapsack instance: m items with weights, profits, and a capacity.
#[derive(Debug, Clone)]
pub struct KnapsackInstance {
    weights: Vec<f64>,
    profits: Vec<f64>,
    capacity: f64,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<f64>, profits: Vec<f64>, capacity: f64) -> Result<Self, KnapsackError> {
        if weights.is_empty() || weights.len() != profits.len() {
            return Err(KnapsackError::Empty);
        }
        if let Some(i) = weights.iter().position(|&w| !(w > 0.0)) {
            return Err(KnapsackError::BadWeight(i));
        }
        if !(capacity > 0.0) {
            return Err(KnapsackError::BadCapacity);
        }
        Ok(KnapsackInstance {
            weights,
            profits,
            capacity,
        })
    }

    /// Random instance in the standard benchmark family: weights uniform in
    /// [1, 10), profits w_i + 5, capacity half the total weight. Item order
    /// is left as drawn.
    pub fn generate<R: Rng>(items: usize, rng: &mut R) -> Self {
        let weights: Vec<f64> = (0..items).map(|_| rng.gen_range(1.0..10.0)).collect();
        let profits: Vec<f64> = weights.iter().map(|w| w + 5.0).collect();
        let capacity = weights.iter().sum::<f64>() / 2.0;
        KnapsackInstance {
            weights,
            profits,
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn profits(&self) -> &[f64] {
        &self.profits
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn total_weight(&self, bits: &[bool]) -> f64 {
        bits.iter()
            .zip(&self.weights)
            .filter(|(&b, _)| b)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn is_feasible(&self, bits: &[bool]) -> bool {
        self.total_weight(bits) <= self.capacity
    }

    /// Largest profit/weight ratio, the penalty coefficient ρ.
    pub fn max_ratio(&self) -> f64 {
        self.profits
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| p / w)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Item indices sorted by decreasing profit/weight ratio (stable).
    pub fn by_ratio_desc(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            let ra = self.profits[a] / self.weights[a];
            let rb = self.profits[b] / self.weights[b];
            rb.partial_cmp(&ra).expect("finite ratios")
        });
        idx
    }

    /// Plain-text exchange format: line 1 `m C`, then `w_i p_i` per item.
    pub fn parse(text: &str) -> Result<Self, KnapsackError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(KnapsackError::Empty)?;
        let mut it = header.split_whitespace();
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| KnapsackError::Parse("expected 'm C' header".into()))?;
        let capacity: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| KnapsackError::Parse("expected 'm C' header".into()))?;
        let mut weights = Vec::with_capacity(m);
        let mut profits = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| KnapsackError::Parse(format!("expected {m} item lines")))?;
            let mut it = line.split_whitespace();
            let w: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| KnapsackError::Parse("expected 'w p' per line".into()))?;
            let p: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| KnapsackError::Parse("expected 'w p' per line".into()))?;
            weights.push(w);
            profits.push(p);
        }
        KnapsackInstance::new(weights, profits, capacity)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.len(), self.capacity);
        for (w, p) in self.weights.iter().zip(&self.profits) {
            out.push_str(&format!("{w} {p}\n"));
        }
        out
    }
}

/// A bit vector with its evaluation against an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution {
    pub bits: Vec<bool>,
    pub feasible: bool,
    pub profit: f64,
}

impl BinarySolution {
    pub fn evaluate(bits: Vec<bool>, instance: &KnapsackInstance) -> Self {
        let feasible = instance.is_feasible(&bits);
        let profit = profit(&bits, instance);
        BinarySolution {
            bits,
            feasible,
            profit,
        }
    }
}

/// Σ p_i x_i.
pub fn profit(bits: &[bool], instance: &KnapsackInstance) -> f64 {
    bits.iter()
        .zip(instance.profits())
        .filter(|(&b, _)| b)
        .map(|(_, p)| p)
        .sum()
}

/// Item-removal policy used by the repair procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairMode {
    /// Remove/insert in uniformly random order.
    Random,
    /// Remove the worst profit/weight item first; insert best first.
    Greedy,
}

/// Knapsack repair: while the load exceeds capacity, drop items (selection
/// per `mode`); then re-add left-out items one at a time, rolling back the
/// first addition that overflows. The result is always feasible.
pub fn repair<R: Rng>(
    bits: &[bool],
    instance: &KnapsackInstance,
    mode: RepairMode,
    rng: &mut R,
) -> Vec<bool> {
    let mut x = bits.to_vec();
    let mut load = instance.total_weight(&x);

    while load > instance.capacity() {
        let selected: Vec<usize> = (0..x.len()).filter(|&i| x[i]).collect();
        let victim = match mode {
            RepairMode::Random => selected[rng.gen_range(0..selected.len())],
            RepairMode::Greedy => *selected
                .iter()
                .min_by(|&&a, &&b| {
                    let ra = instance.profits()[a] / instance.weights()[a];
                    let rb = instance.profits()[b] / instance.weights()[b];
                    ra.partial_cmp(&rb).expect("finite ratios")
                })
                .expect("overweight set is nonempty"),
        };
        x[victim] = false;
        load -= instance.weights()[victim];
    }

    let mut candidates: Vec<usize> = (0..x.len()).filter(|&i| !x[i]).collect();
    match mode {
        RepairMode::Random => candidates.shuffle(rng),
        RepairMode::Greedy => candidates.sort_by(|&a, &b| {
            let ra = instance.profits()[a] / instance.weights()[a];
            let rb = instance.profits()[b] / instance.weights()[b];
            rb.partial_cmp(&ra).expect("finite ratios")
        }),
    }
    for i in candidates {
        x[i] = true;
        load += instance.weights()[i];
        if load > instance.capacity() {
            x[i] = false;
            break;
        }
    }
    x
}

/// Penalty flavor subtracted from the raw profit of an overweight solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    /// log₂(1 + ρ·overflow)
    Logarithmic,
    /// ρ·overflow
    Linear,
    /// (ρ·overflow)²
    Quadratic,
}

/// Penalized profit Σ p_i x_i − Pen(x); the penalty applies only when the
/// load exceeds the capacity, with ρ the largest profit/weight ratio.
pub fn penalty_fitness(bits: &[bool], instance: &KnapsackInstance, kind: PenaltyKind) -> f64 {
    let raw = profit(bits, instance);
    let overflow = instance.total_weight(bits) - instance.capacity();
    if overflow <= 0.0 {
        return raw;
    }
    let rho = instance.max_ratio();
    let pen = match kind {
        PenaltyKind::Logarithmic => (1.0 + rho * overflow).log2(),
        PenaltyKind::Linear => rho * overflow,
        PenaltyKind::Quadratic => (rho * overflow).powi(2),
    };
    raw - pen
}

/// Item-list ordering used when decoding ordinal chromosomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOrder {
    /// Items in instance (file) order.
    InstanceOrder,
    /// Items in decreasing profit/weight order.
    GreedyOrder,
}

/// Integer vector v with 1 ≤ v_i ≤ m−i+1, decoded against a shrinking list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalChromosome {
    values: Vec<usize>,
}

impl OrdinalChromosome {
    pub fn new(values: Vec<usize>) -> Result<Self, KnapsackError> {
        let m = values.len();
        for (i, &v) in values.iter().enumerate() {
            let max = m - i;
            if v < 1 || v > max {
                return Err(KnapsackError::OrdinalRange {
                    position: i,
                    value: v,
                    max,
                });
            }
        }
        Ok(OrdinalChromosome { values })
    }

    pub fn random<R: Rng>(m: usize, rng: &mut R) -> Self {
        let values = (0..m).map(|i| rng.gen_range(1..=m - i)).collect();
        OrdinalChromosome { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [usize] {
        &mut self.values
    }
}

/// Decodes an ordinal chromosome: repeatedly removes the v_i-th element of
/// the current item list and packs it if it still fits. Always feasible.
pub fn decode_ordinal(
    v: &OrdinalChromosome,
    instance: &KnapsackInstance,
    order: DecodeOrder,
) -> Vec<bool> {
    let mut list: Vec<usize> = match order {
        DecodeOrder::InstanceOrder => (0..instance.len()).collect(),
        DecodeOrder::GreedyOrder => instance.by_ratio_desc(),
    };
    let mut bits = vec![false; instance.len()];
    let mut load = 0.0;
    for &vi in &v.values {
        let item = list.remove(vi - 1);
        if load + instance.weights()[item] <= instance.capacity() {
            bits[item] = true;
            load += instance.weights()[item];
        }
    }
    bits
}

/// Greedy by-ratio packing, the usual quick lower bound.
pub fn greedy_by_ratio(instance: &KnapsackInstance) -> BinarySolution {
    let mut bits = vec![false; instance.len()];
    let mut load = 0.0;
    for i in instance.by_ratio_desc() {
        if load + instance.weights()[i] <= instance.capacity() {
            bits[i] = true;
            load += instance.weights()[i];
        }
    }
    BinarySolution::evaluate(bits, instance)
}

/// Exact optimum by subset enumeration; only sensible for small m.
pub fn exhaustive_optimum(instance: &KnapsackInstance) -> f64 {
    let m = instance.len();
    assert!(m <= 25, "enumeration over 2^{m} subsets is not reasonable");
    let mut best = 0.0f64;
    for mask in 0u64..(1u64 << m) {
        let mut load = 0.0;
        let mut value = 0.0;
        for i in 0..m {
            if mask & (1 << i) != 0 {
                load += instance.weights()[i];
                value += instance.profits()[i];
            }
        }
        if load <= instance.capacity() && value > best {
            best = value;
        }
    }
    best
}
