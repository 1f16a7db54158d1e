//! Codon chromosomes and their decoding into three-stage teleportation
//! circuits.
//!
//! A chromosome is a string of letters in {0,1,2,3}, read as 3-letter codons
//! `(kind, a, b)`. The first codon whose kind letter is 3 separates EPR-pair
//! generation from Alice's part; the second one is Alice's measurement and
//! opens Bob's part. Within a stage the codon decodes against that stage's
//! table:
//!
//! * kind 0 — CNOT. In the EPR stage letter `a` picks the target among
//!   qubits {0,1} and the other one is the control; in Alice's stage the same
//!   rule runs over {1,2}. In Bob's stage `a` is the target and `b` the
//!   control, with the diagonal left blank. Cells outside a stage's qubit set
//!   decode to no gate.
//! * kind 1 — L on qubit `a`; kind 2 — R on qubit `a`. Out-of-stage qubits
//!   decode to no gate, as does `b = 3`.
//!
//! Extra kind-3 codons inside Bob's part decode to no gate. Chromosomes with
//! fewer than two kind-3 codons are invalid and are scored zero by the GA.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CodonError {
    #[error("letter {0} is outside the alphabet {{0,1,2,3}}")]
    BadLetter(u8),
    #[error("length {0} is not a multiple of three")]
    BadLength(usize),
    #[error("chromosome has {0} stage markers, needs at least two")]
    MissingMarkers(usize),
    #[error("empty chromosome")]
    Empty,
    #[error("malformed codon string: {0}")]
    Parse(String),
}

/// Fixed-length string of letters in {0,1,2,3}, grouped into codons.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodonChromosome {
    letters: Vec<u8>,
}

impl CodonChromosome {
    pub fn from_letters(letters: Vec<u8>) -> Result<Self, CodonError> {
        if letters.is_empty() {
            return Err(CodonError::Empty);
        }
        if letters.len() % 3 != 0 {
            return Err(CodonError::BadLength(letters.len()));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l > 3) {
            return Err(CodonError::BadLetter(bad));
        }
        Ok(CodonChromosome { letters })
    }

    /// Uniformly random chromosome with the given codon count.
    pub fn random<R: Rng>(codon_count: usize, rng: &mut R) -> Self {
        let letters = (0..codon_count * 3).map(|_| rng.gen_range(0..4u8)).collect();
        CodonChromosome { letters }
    }

    /// Hand-built 11-gate teleportation circuit (ten unitary gates plus the
    /// measurement): the canonical EPR stage, a CNOT/R Alice stage, Bob
    /// corrections with an L/R-conjugated CNOT for the sign fix, and an
    /// inert L1,R1 pair. Used to seed optimization runs.
    pub fn reference_teleporter() -> Self {
        "110.000.300.010.220.300.100.002.200.001.110.210"
            .parse()
            .expect("valid built-in chromosome")
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn letters_mut(&mut self) -> &mut [u8] {
        &mut self.letters
    }

    pub fn codon_count(&self) -> usize {
        self.letters.len() / 3
    }

    pub fn codons(&self) -> impl Iterator<Item = (u8, u8, u8)> + '_ {
        self.letters.chunks_exact(3).map(|c| (c[0], c[1], c[2]))
    }
}

impl FromStr for CodonChromosome {
    type Err = CodonError;

    /// Parses the dot-separated form, e.g. `112.231.001`.
    fn from_str(s: &str) -> Result<Self, CodonError> {
        let mut letters = Vec::new();
        for group in s.trim().split('.') {
            if group.len() != 3 {
                return Err(CodonError::Parse(format!(
                    "codon '{group}' must have exactly three letters"
                )));
            }
            for ch in group.chars() {
                let d = ch
                    .to_digit(10)
                    .ok_or_else(|| CodonError::Parse(format!("bad letter '{ch}'")))?;
                if d > 3 {
                    return Err(CodonError::BadLetter(d as u8));
                }
                letters.push(d as u8);
            }
        }
        CodonChromosome::from_letters(letters)
    }
}

impl fmt::Display for CodonChromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups: Vec<String> = self
            .letters
            .chunks_exact(3)
            .map(|c| format!("{}{}{}", c[0], c[1], c[2]))
            .collect();
        write!(f, "{}", groups.join("."))
    }
}

/// A single decoded gate on the 3-qubit teleport register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeleportGate {
    L(usize),
    R(usize),
    Cnot { control: usize, target: usize },
}

impl fmt::Display for TeleportGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TeleportGate::L(q) => write!(f, "L{q}"),
            TeleportGate::R(q) => write!(f, "R{q}"),
            TeleportGate::Cnot { control, target } => write!(f, "CNOT(c{control},t{target})"),
        }
    }
}

/// The three gate stages of a decoded teleportation circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedCircuit {
    pub epr: Vec<TeleportGate>,
    pub alice: Vec<TeleportGate>,
    pub bob: Vec<TeleportGate>,
}

impl DecodedCircuit {
    /// Number of decoded unitary gates across all stages.
    pub fn unitary_gate_count(&self) -> usize {
        self.epr.len() + self.alice.len() + self.bob.len()
    }

    /// Circuit size used for the fitness bonus. Alice's mid-circuit
    /// measurement counts as one gate, matching the circuit-size convention
    /// under which the optimized teleporter has 8 gates and the reference
    /// one 11.
    pub fn gate_count(&self) -> usize {
        self.unitary_gate_count() + 1
    }

    pub fn all_gates(&self) -> impl Iterator<Item = &TeleportGate> {
        self.epr.iter().chain(&self.alice).chain(&self.bob)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Epr,
    Alice,
    Bob,
}

impl Stage {
    fn qubits(self) -> &'static [usize] {
        match self {
            Stage::Epr => &[0, 1],
            Stage::Alice => &[1, 2],
            Stage::Bob => &[0, 1, 2],
        }
    }
}

fn decode_codon(stage: Stage, kind: u8, a: u8, b: u8) -> Option<TeleportGate> {
    let a = a as usize;
    let b = b as usize;
    match kind {
        1 | 2 => {
            if b == 3 || !stage.qubits().contains(&a) {
                return None;
            }
            Some(if kind == 1 {
                TeleportGate::L(a)
            } else {
                TeleportGate::R(a)
            })
        }
        0 => match stage {
            // letter `a` is the target; the stage's other qubit controls
            Stage::Epr => {
                if b == 3 || !(a == 0 || a == 1) {
                    return None;
                }
                Some(TeleportGate::Cnot {
                    control: 1 - a,
                    target: a,
                })
            }
            Stage::Alice => {
                if b == 3 || !(a == 1 || a == 2) {
                    return None;
                }
                Some(TeleportGate::Cnot {
                    control: 3 - a,
                    target: a,
                })
            }
            Stage::Bob => {
                if a == b || a == 3 || b == 3 {
                    return None;
                }
                Some(TeleportGate::Cnot {
                    control: b,
                    target: a,
                })
            }
        },
        _ => None,
    }
}

/// Decodes a chromosome into its three gate stages.
///
/// Fails with [`CodonError::MissingMarkers`] when fewer than two kind-3
/// codons are present; the GA maps that failure to fitness 0.
pub fn decode(chromosome: &CodonChromosome) -> Result<DecodedCircuit, CodonError> {
    let mut circuit = DecodedCircuit {
        epr: Vec::new(),
        alice: Vec::new(),
        bob: Vec::new(),
    };
    let mut stage = Stage::Epr;
    let mut markers = 0usize;
    for (kind, a, b) in chromosome.codons() {
        if kind == 3 {
            match stage {
                Stage::Epr => {
                    stage = Stage::Alice;
                    markers += 1;
                }
                Stage::Alice => {
                    stage = Stage::Bob;
                    markers += 1;
                }
                Stage::Bob => {}
            }
            continue;
        }
        if let Some(gate) = decode_codon(stage, kind, a, b) {
            match stage {
                Stage::Epr => circuit.epr.push(gate),
                Stage::Alice => circuit.alice.push(gate),
                Stage::Bob => circuit.bob.push(gate),
            }
        }
    }
    if markers < 2 {
        return Err(CodonError::MissingMarkers(markers));
    }
    Ok(circuit)
}

fn encode_gate(stage: Stage, gate: &TeleportGate) -> [u8; 3] {
    match (stage, gate) {
        (_, TeleportGate::L(q)) => [1, *q as u8, 0],
        (_, TeleportGate::R(q)) => [2, *q as u8, 0],
        (Stage::Bob, TeleportGate::Cnot { control, target }) => [0, *target as u8, *control as u8],
        (_, TeleportGate::Cnot { target, .. }) => [0, *target as u8, 0],
    }
}

/// Canonical chromosome for a decoded circuit: one codon per gate plus the
/// two stage markers. `decode(encode(decode(c)))` equals `decode(c)`.
pub fn encode(circuit: &DecodedCircuit) -> CodonChromosome {
    let mut letters = Vec::new();
    for gate in &circuit.epr {
        letters.extend_from_slice(&encode_gate(Stage::Epr, gate));
    }
    letters.extend_from_slice(&[3, 0, 0]);
    for gate in &circuit.alice {
        letters.extend_from_slice(&encode_gate(Stage::Alice, gate));
    }
    letters.extend_from_slice(&[3, 0, 0]);
    for gate in &circuit.bob {
        letters.extend_from_slice(&encode_gate(Stage::Bob, gate));
    }
    CodonChromosome::from_letters(letters).expect("encoded chromosome is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const OPTIMIZED: &str = "112.231.001.331.132.012.122.302.203.220.020.001";

    #[test]
    fn decodes_the_optimized_teleporter() {
        let c: CodonChromosome = OPTIMIZED.parse().unwrap();
        let circuit = decode(&c).unwrap();
        assert_eq!(
            circuit.epr,
            vec![
                TeleportGate::L(1),
                TeleportGate::Cnot { control: 1, target: 0 },
            ]
        );
        assert_eq!(
            circuit.alice,
            vec![
                TeleportGate::Cnot { control: 2, target: 1 },
                TeleportGate::L(2),
            ]
        );
        assert_eq!(
            circuit.bob,
            vec![
                TeleportGate::R(2),
                TeleportGate::Cnot { control: 0, target: 2 },
                TeleportGate::Cnot { control: 1, target: 0 },
            ]
        );
        assert_eq!(circuit.unitary_gate_count(), 7);
        assert_eq!(circuit.gate_count(), 8);
    }

    #[test]
    fn all_marker_chromosome_has_no_unitary_gates() {
        let c: CodonChromosome = "300.311.322.333".parse().unwrap();
        let circuit = decode(&c).unwrap();
        assert_eq!(circuit.unitary_gate_count(), 0);
        assert!(circuit.epr.is_empty() && circuit.alice.is_empty() && circuit.bob.is_empty());
    }

    #[test]
    fn epr_codon_001_is_the_bell_cnot() {
        let c: CodonChromosome = "001.300.300".parse().unwrap();
        let circuit = decode(&c).unwrap();
        assert_eq!(
            circuit.epr,
            vec![TeleportGate::Cnot { control: 1, target: 0 }]
        );
    }

    #[test]
    fn missing_markers_is_an_error() {
        let c: CodonChromosome = "001.112".parse().unwrap();
        assert_eq!(decode(&c), Err(CodonError::MissingMarkers(0)));
        let c: CodonChromosome = "001.300.112".parse().unwrap();
        assert_eq!(decode(&c), Err(CodonError::MissingMarkers(1)));
    }

    #[test]
    fn out_of_stage_codons_decode_to_nothing() {
        // L2 in the EPR stage and L0 in Alice's stage are both blanks.
        let c: CodonChromosome = "120.300.100.300".parse().unwrap();
        let circuit = decode(&c).unwrap();
        assert_eq!(circuit.unitary_gate_count(), 0);
        // Bob's diagonal CNOT cells are blank.
        let c: CodonChromosome = "300.300.000.011.022".parse().unwrap();
        assert_eq!(decode(&c).unwrap().unitary_gate_count(), 0);
    }

    #[test]
    fn display_round_trips() {
        let c: CodonChromosome = OPTIMIZED.parse().unwrap();
        assert_eq!(c.to_string(), OPTIMIZED);
        let again: CodonChromosome = c.to_string().parse().unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn decode_encode_decode_is_stable() {
        for s in [OPTIMIZED, "110.000.300.010.220.300.100.002.200.001.110.210"] {
            let c: CodonChromosome = s.parse().unwrap();
            let circuit = decode(&c).unwrap();
            let recoded = encode(&circuit);
            assert_eq!(decode(&recoded).unwrap(), circuit);
        }
    }

    #[test]
    fn rejects_bad_strings() {
        assert!("451.300.300".parse::<CodonChromosome>().is_err());
        assert!("12.300.300".parse::<CodonChromosome>().is_err());
        assert!(CodonChromosome::from_letters(vec![0, 1]).is_err());
        assert!(CodonChromosome::from_letters(vec![]).is_err());
    }
}
