use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};

use crate::error::{Error, Result};

/// Histogram of measured bitstrings (qubit `q` = bit `q`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    counts: BTreeMap<usize, u64>,
}

impl Counts {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            counts: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add(&mut self, outcome: usize, k: u64) {
        if k > 0 {
            *self.counts.entry(outcome).or_default() += k;
        }
    }

    pub fn get(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn shots(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&b, &k)| (b, k))
    }

    /// Keeps only outcomes satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> Counts {
        Counts {
            n_qubits: self.n_qubits,
            counts: self
                .counts
                .iter()
                .filter(|(&b, _)| keep(b))
                .map(|(&b, &k)| (b, k))
                .collect(),
        }
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        let total = self.shots();
        if total == 0 {
            return Err(Error::Empty("histogram"));
        }
        let mut probs = vec![0.0; 1usize << self.n_qubits];
        for (b, k) in self.iter() {
            probs[b] = k as f64 / total as f64;
        }
        Ok(Distribution {
            n_qubits: self.n_qubits,
            probs,
        })
    }
}

/// Dense probability vector over `2^n` outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    n_qubits: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(n_qubits: usize, probs: Vec<f64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if probs.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: probs.len(),
            });
        }
        Ok(Self { n_qubits, probs })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn probs_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    pub fn sample(&self, shots: u64, seed: u64) -> Result<Counts> {
        sample_distribution(self.n_qubits, &self.probs, shots, seed)
    }
}

/// Multinomial draw by a chain of binomials, driven by a ChaCha8 stream.
/// Negative entries (round-off) are treated as zero.
pub fn sample_distribution(n_qubits: usize, probs: &[f64], shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::Empty("shot budget"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Counts::new(n_qubits);
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if mass <= 0.0 || !mass.is_finite() {
        return Err(Error::Empty("probability mass"));
    }
    let mut remaining = shots;
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (b, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if p == 0.0 {
            continue;
        }
        if b == last {
            counts.add(b, remaining);
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, q)
            .expect("probability in [0, 1]")
            .sample(&mut rng);
        counts.add(b, k);
        remaining -= k;
        mass -= p;
    }
    Ok(counts)
}
