//! Shannon and von Neumann entropies and the bipartite functionals built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::DensityOperator;

/// Probability vector; entries down to `-1e-12` are clamped to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        for p in probs.iter_mut() {
            if *p < -1e-12 || !p.is_finite() {
                return Err(Error::Domain(format!("probability {p} is negative")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }
}

/// `-sum p log2 p` over raw values, with `0 log 0 = 0`.
pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

pub fn shannon_entropy(p: &ProbDist) -> f64 {
    entropy_bits(&p.0)
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(entropy_bits(&[x, 1.0 - x]))
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_bits(&rho.spectrum())
}

/// Entropy of a Hermitian PSD matrix after normalizing it to unit trace.
pub(crate) fn matrix_entropy(m: &crate::linalg::CMat) -> f64 {
    let mut vals = crate::linalg::eigvalsh(m);
    crate::linalg::normalize_spectrum(&mut vals);
    entropy_bits(&vals)
}

/// A state together with a two-way partition of its labels.
#[derive(Debug, Clone)]
pub struct BipartiteSplit<'a> {
    state: &'a DensityOperator,
    first: Vec<String>,
    second: Vec<String>,
}

impl<'a> BipartiteSplit<'a> {
    pub fn new(state: &'a DensityOperator, first: &[&str], second: &[&str]) -> Result<Self> {
        if first.is_empty() || second.is_empty() {
            return Err(Error::Dimension("both sides of a split must be nonempty".into()));
        }
        for l in first.iter().chain(second) {
            state.layout().position(l)?;
        }
        if let Some(l) = first.iter().find(|l| second.contains(l)) {
            return Err(Error::LabelCollision(l.to_string()));
        }
        let mut all: Vec<&str> = first.iter().chain(second).copied().collect();
        all.sort_unstable();
        all.dedup();
        if all.len() != state.layout().len() || all.len() != first.len() + second.len() {
            return Err(Error::Dimension("split must cover every label exactly once".into()));
        }
        Ok(Self {
            state,
            first: first.iter().map(|s| s.to_string()).collect(),
            second: second.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Split of the marginal of `state` on `first` and `second`.
    pub fn of_marginal(state: &DensityOperator, first: &[&str], second: &[&str]) -> Result<(DensityOperator, Vec<String>, Vec<String>)> {
        let keep: Vec<&str> = first.iter().chain(second).copied().collect();
        let rho = state.partial_trace(&keep)?;
        BipartiteSplit::new(&rho, first, second)?;
        Ok((
            rho,
            first.iter().map(|s| s.to_string()).collect(),
            second.iter().map(|s| s.to_string()).collect(),
        ))
    }

    pub fn state(&self) -> &DensityOperator {
        self.state
    }

    pub fn first(&self) -> Vec<&str> {
        self.first.iter().map(String::as_str).collect()
    }

    pub fn second(&self) -> Vec<&str> {
        self.second.iter().map(String::as_str).collect()
    }

    fn entropy_of(&self, labels: &[&str]) -> f64 {
        von_neumann_entropy(&self.state.partial_trace(labels).expect("labels validated"))
    }

    pub fn entropy_first(&self) -> f64 {
        self.entropy_of(&self.first())
    }

    pub fn entropy_second(&self) -> f64 {
        self.entropy_of(&self.second())
    }

    pub fn entropy_joint(&self) -> f64 {
        von_neumann_entropy(self.state)
    }
}

/// `S(first | second) = S(first, second) - S(second)`.
pub fn conditional_entropy(split: &BipartiteSplit) -> f64 {
    split.entropy_joint() - split.entropy_second()
}

pub fn mutual_information(split: &BipartiteSplit) -> f64 {
    split.entropy_first() + split.entropy_second() - split.entropy_joint()
}

/// `I(first > second) = -S(first | second)`.
pub fn coherent_information(split: &BipartiteSplit) -> f64 {
    -conditional_entropy(split)
}

/// Entropy of the marginal of `rho` on `labels`.
pub fn entropy_of(rho: &DensityOperator, labels: &[&str]) -> Result<f64> {
    Ok(von_neumann_entropy(&rho.partial_trace(labels)?))
}

/// `S(a | b)` evaluated on the marginal of `rho` on `a` and `b`.
pub fn conditional_entropy_of(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let (m, f, s) = BipartiteSplit::of_marginal(rho, a, b)?;
    let f: Vec<&str> = f.iter().map(String::as_str).collect();
    let s: Vec<&str> = s.iter().map(String::as_str).collect();
    Ok(conditional_entropy(&BipartiteSplit::new(&m, &f, &s)?))
}

pub fn mutual_information_of(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let (m, f, s) = BipartiteSplit::of_marginal(rho, a, b)?;
    let f: Vec<&str> = f.iter().map(String::as_str).collect();
    let s: Vec<&str> = s.iter().map(String::as_str).collect();
    Ok(mutual_information(&BipartiteSplit::new(&m, &f, &s)?))
}
