use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered, labelled tensor factors. Amplitude indices are row-major over
/// the parts in this order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLayout {
    parts: Vec<Subsystem>,
    total_dim: usize,
}

impl SystemLayout {
    pub fn new<S: Into<String>>(parts: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parts: Vec<Subsystem> = parts
            .into_iter()
            .map(|(label, dim)| Subsystem { label: label.into(), dim })
            .collect();
        for (i, p) in parts.iter().enumerate() {
            if p.dim == 0 {
                return Err(Error::Dimension(format!("subsystem `{}` has dimension 0", p.label)));
            }
            if parts[..i].iter().any(|q| q.label == p.label) {
                return Err(Error::LabelCollision(p.label.clone()));
            }
        }
        let total_dim = parts.iter().map(|p| p.dim).product();
        Ok(Self { parts, total_dim })
    }

    /// Layout with labels `A`, `B`, `C`, ... for the given dimensions.
    pub fn lettered(dims: &[usize]) -> Result<Self> {
        Self::new(
            dims.iter()
                .enumerate()
                .map(|(i, &d)| (((b'A' + i as u8) as char).to_string(), d)),
        )
    }

    pub fn parts(&self) -> &[Subsystem] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parts.iter().map(|p| p.label.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.parts[self.position(label)?].dim)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.parts.iter().any(|p| p.label == label)
    }

    pub fn concat(&self, other: &SystemLayout) -> Result<Self> {
        Self::new(
            self.parts
                .iter()
                .chain(other.parts.iter())
                .map(|p| (p.label.clone(), p.dim)),
        )
    }

    /// Copy with the dimension of `label` replaced.
    pub fn with_dim(&self, label: &str, dim: usize) -> Result<Self> {
        let pos = self.position(label)?;
        Self::new(self.parts.iter().enumerate().map(|(i, p)| {
            (p.label.clone(), if i == pos { dim } else { p.dim })
        }))
    }

    /// Positions of `labels` in layout order; errors on unknown or repeated labels.
    pub(crate) fn positions_sorted(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l)?;
            if pos.contains(&p) {
                return Err(Error::LabelCollision(l.to_string()));
            }
            pos.push(p);
        }
        pos.sort_unstable();
        Ok(pos)
    }

    pub(crate) fn sub_layout(&self, positions: &[usize]) -> Self {
        Self::new(positions.iter().map(|&i| (self.parts[i].label.clone(), self.parts[i].dim)))
            .expect("sub-layout of a valid layout")
    }

    /// Multi-index digits of a flat index.
    pub(crate) fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.parts.len()];
        for (k, p) in self.parts.iter().enumerate().rev() {
            out[k] = index % p.dim;
            index /= p.dim;
        }
        out
    }

    /// For every flat index, its flat index inside the sub-layout formed by
    /// `positions` (in the given order) and inside the complement (in layout order).
    pub(crate) fn split_indices(&self, positions: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let rest: Vec<usize> = (0..self.parts.len()).filter(|i| !positions.contains(i)).collect();
        let mut first = Vec::with_capacity(self.total_dim);
        let mut second = Vec::with_capacity(self.total_dim);
        for x in 0..self.total_dim {
            let d = self.digits(x);
            let flat = |sel: &[usize]| sel.iter().fold(0, |acc, &k| acc * self.parts[k].dim + d[k]);
            first.push(flat(positions));
            second.push(flat(&rest));
        }
        (first, second)
    }
}
