//! Explicit two-register joint states.
//!
//! The sparse encoding in the parent module is only valid because the joint
//! state never leaves the correlated form Σ a_x |x⟩|f(x)⟩. This module keeps
//! the full individual ⊗ fitness amplitude grid so that claim can be checked
//! against brute-force projectors, and so the product-state counterexample
//! has a representation at all (an uncorrelated state has no sparse form).

use num_complex::Complex64;

use super::QuantumIndividual;

/// Joint state over |x⟩ ⊗ |v⟩ where v runs over the distinct fitness values
/// of the landscape, in ascending order. Amplitudes are x-major.
#[derive(Debug, Clone)]
pub struct DenseJoint {
    n_x: usize,
    values: Vec<f64>,
    amps: Vec<Complex64>,
}

impl DenseJoint {
    fn distinct_values(fitness: &[f64]) -> Vec<f64> {
        let mut values = fitness.to_vec();
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite fitness values"));
        values.dedup();
        values
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn amplitude(&self, x: usize, value_index: usize) -> Complex64 {
        self.amps[x * self.values.len() + value_index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Joint support as (x, fitness value) pairs.
    pub fn support(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for x in 0..self.n_x {
            for (vi, &v) in self.values.iter().enumerate() {
                if self.amplitude(x, vi).norm() > super::SUPPORT_TOL {
                    out.push((x, v));
                }
            }
        }
        out
    }

    /// Embeds a correlated individual: amplitude a_x lands on (x, f(x)).
    pub fn from_correlated(ind: &QuantumIndividual) -> DenseJoint {
        let fitness = ind.fitness_table();
        let values = Self::distinct_values(fitness);
        let n_x = ind.search_space_size();
        let mut amps = vec![Complex64::new(0.0, 0.0); n_x * values.len()];
        for x in 0..n_x {
            let vi = values
                .iter()
                .position(|&v| v == fitness[x])
                .expect("value present");
            amps[x * values.len() + vi] = ind.amplitudes()[x];
        }
        DenseJoint { n_x, values, amps }
    }

    /// The uncorrelated product (Σ_x |x⟩/√N) ⊗ (Σ_x |f(x)⟩/√N), with the
    /// second factor renormalized after duplicate fitness values merge.
    pub fn product_of_uniform(fitness: &[f64]) -> DenseJoint {
        let n = fitness.len();
        let values = Self::distinct_values(fitness);
        let mut weights = vec![0.0f64; values.len()];
        for &f in fitness {
            let vi = values.iter().position(|&v| v == f).expect("value present");
            weights[vi] += 1.0 / (n as f64).sqrt();
        }
        let norm: f64 = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        let a = 1.0 / (n as f64).sqrt();
        let mut amps = Vec::with_capacity(n * values.len());
        for _x in 0..n {
            for w in &weights {
                amps.push(Complex64::new(a * w / norm, 0.0));
            }
        }
        DenseJoint {
            n_x: n,
            values,
            amps,
        }
    }

    /// Probability of observing `value_index` on the fitness register:
    /// ⟨Ψ| I⊗|v⟩⟨v| |Ψ⟩, the brute-force projector route.
    pub fn fitness_probability(&self, value_index: usize) -> f64 {
        (0..self.n_x)
            .map(|x| self.amplitude(x, value_index).norm_sqr())
            .sum()
    }

    /// Applies the projector I⊗|v⟩⟨v| and renormalizes.
    pub fn project_fitness(&self, value_index: usize) -> (f64, DenseJoint) {
        let p = self.fitness_probability(value_index);
        assert!(p > 0.0, "projecting onto a zero-probability value");
        let scale = 1.0 / p.sqrt();
        let mut out = self.clone();
        for x in 0..self.n_x {
            for vi in 0..self.values.len() {
                let idx = x * self.values.len() + vi;
                out.amps[idx] = if vi == value_index {
                    self.amps[idx] * scale
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
        }
        (p, out)
    }

    /// Measures the fitness register, deterministically picking the most
    /// probable value (ties toward the smaller one).
    pub fn measure_most_probable_fitness(&self) -> (f64, DenseJoint) {
        let mut best = 0usize;
        for vi in 1..self.values.len() {
            if self.fitness_probability(vi) > self.fitness_probability(best) + 1e-15 {
                best = vi;
            }
        }
        let (_, post) = self.project_fitness(best);
        (self.values[best], post)
    }
}

/// A two-register state |x⟩|y⟩ with an integer y register of `y_bits` bits,
/// for exercising the XOR oracle directly.
#[derive(Debug, Clone)]
pub struct XorRegisterPair {
    n_x: usize,
    n_y: usize,
    /// x-major amplitudes.
    pub amps: Vec<Complex64>,
}

impl XorRegisterPair {
    /// (1/√N) Σ_x |x⟩|0⟩.
    pub fn uniform_with_cleared_y(n_x: usize, y_bits: usize) -> Self {
        let n_y = 1usize << y_bits;
        let mut amps = vec![Complex64::new(0.0, 0.0); n_x * n_y];
        let a = 1.0 / (n_x as f64).sqrt();
        for x in 0..n_x {
            amps[x * n_y] = Complex64::new(a, 0.0);
        }
        XorRegisterPair { n_x, n_y, amps }
    }

    pub fn amplitude(&self, x: usize, y: usize) -> Complex64 {
        self.amps[x * self.n_y + y]
    }

    /// |x⟩|y⟩ ↦ |x⟩|y ⊕ f(x)⟩.
    pub fn apply_oracle(&self, table: &[usize]) -> XorRegisterPair {
        assert_eq!(table.len(), self.n_x);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for x in 0..self.n_x {
            for y in 0..self.n_y {
                out[x * self.n_y + (y ^ table[x])] += self.amplitude(x, y);
            }
        }
        XorRegisterPair {
            n_x: self.n_x,
            n_y: self.n_y,
            amps: out,
        }
    }
}
