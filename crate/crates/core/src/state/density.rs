use crate::error::{Error, Result};
use crate::linalg::{self, c, eigh, eigvalsh, CMat, CVec, EIG_CLAMP};

use super::{PureState, SystemLayout};

/// Validation tolerance for Hermiticity, positivity and trace.
pub const STATE_TOL: f64 = 1e-9;

/// Hermitian, positive semidefinite, unit-trace operator over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: SystemLayout,
    matrix: CMat,
}

impl DensityOperator {
    pub fn new(layout: SystemLayout, matrix: CMat) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.shape() != (d, d) {
            return Err(Error::Dimension(format!(
                "matrix is {:?}, layout needs {d}x{d}",
                matrix.shape()
            )));
        }
        let herm = linalg::hermitian_deviation(&matrix);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = eigvalsh(&matrix).last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { layout, matrix })
    }

    pub(crate) fn new_unchecked(layout: SystemLayout, matrix: CMat) -> Self {
        Self { layout, matrix }
    }

    pub fn maximally_mixed(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        Self::new_unchecked(layout, linalg::identity(d).unscale(d as f64))
    }

    /// Diagonal operator `sum_i p_i |i><i|` in the product basis.
    pub fn diagonal(layout: SystemLayout, probs: &[f64]) -> Result<Self> {
        if probs.len() != layout.total_dim() {
            return Err(Error::Dimension("one probability per basis state expected".into()));
        }
        let m = CMat::from_diagonal(&CVec::from_iterator(probs.len(), probs.iter().map(|&p| c(p, 0.0))));
        Self::new(layout, m)
    }

    /// Convex mixture `sum_k w_k rho_k`; all members must share one layout.
    pub fn mixture(terms: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?
            .1;
        let mut m = CMat::zeros(first.dim(), first.dim());
        for (w, rho) in terms {
            if rho.layout != first.layout {
                return Err(Error::Dimension("mixture members have different layouts".into()));
            }
            m += rho.matrix.scale(*w);
        }
        Self::new(first.layout.clone(), m)
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self::new_unchecked(layout, linalg::kron(&self.matrix, &other.matrix)))
    }

    /// Traces out every part not named in `keep`. The result lists the kept
    /// parts in their original order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::Dimension("partial trace must keep at least one subsystem".into()));
        }
        let pos = self.layout.positions_sorted(keep)?;
        let layout = self.layout.sub_layout(&pos);
        if pos.len() == self.layout.len() {
            return Ok(self.clone());
        }
        let (ki, ti) = self.layout.split_indices(&pos);
        let d = layout.total_dim();
        let mut out = CMat::zeros(d, d);
        let n = self.dim();
        for x in 0..n {
            for y in 0..n {
                if ti[x] == ti[y] {
                    out[(ki[x], ki[y])] += self.matrix[(x, y)];
                }
            }
        }
        Ok(Self::new_unchecked(layout, out))
    }

    /// Same operator with parts reordered to `order`.
    pub fn reorder(&self, order: &[&str]) -> Result<DensityOperator> {
        if order.len() != self.layout.len() {
            return Err(Error::Dimension("reorder needs every label exactly once".into()));
        }
        let pos = order
            .iter()
            .map(|l| self.layout.position(l))
            .collect::<Result<Vec<_>>>()?;
        let (perm, _) = self.layout.split_indices(&pos);
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                out[(perm[x], perm[y])] = self.matrix[(x, y)];
            }
        }
        Ok(Self::new_unchecked(self.layout.sub_layout(&pos), out))
    }

    /// Marginal on `labels`, with parts in exactly the given order.
    pub fn marginal(&self, labels: &[&str]) -> Result<DensityOperator> {
        self.partial_trace(labels)?.reorder(labels)
    }

    /// Eigenvalues descending, tiny negatives clamped, renormalized to sum 1.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut vals = eigvalsh(&self.matrix);
        linalg::normalize_spectrum(&mut vals);
        vals
    }

    pub fn rank(&self) -> usize {
        self.spectrum().iter().filter(|&&v| v > EIG_CLAMP).count()
    }

    /// Conjugates subsystem `label` by `u`.
    pub fn apply_local(&self, label: &str, u: &CMat) -> Result<DensityOperator> {
        let op = super::embed_operator(&self.layout, label, u)?;
        let layout = self.layout.with_dim(label, u.nrows())?;
        Ok(Self::new_unchecked(layout, &op * &self.matrix * op.adjoint()))
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<DensityOperator> {
        if labels.len() != self.layout.len() {
            return Err(Error::Dimension("one label per subsystem expected".into()));
        }
        let layout = SystemLayout::new(labels.iter().zip(self.layout.dims()).map(|(l, d)| (*l, d)))?;
        Ok(Self::new_unchecked(layout, self.matrix.clone()))
    }

    /// Canonical purification `sum_i sqrt(l_i) |e_i>|i>_R` with eigenvalues
    /// descending and each eigenvector's first nonzero entry real positive.
    /// The ancilla is labelled `R` (primed until the label is free).
    pub fn purify(&self) -> PureState {
        let (vals, vecs) = eigh(&self.matrix);
        let mut kept: Vec<(f64, usize)> = vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > EIG_CLAMP)
            .map(|(i, &v)| (v, i))
            .collect();
        if kept.is_empty() {
            kept.push((1.0, 0));
        }
        let total: f64 = kept.iter().map(|k| k.0).sum();
        let rank = kept.len();
        let mut label = String::from("R");
        while self.layout.contains(&label) {
            label.push('\'');
        }
        let layout = self
            .layout
            .concat(&SystemLayout::new([(label, rank)]).expect("rank >= 1"))
            .expect("fresh ancilla label");
        let n = self.dim();
        let mut amps = CVec::zeros(n * rank);
        for (j, &(lambda, col)) in kept.iter().enumerate() {
            let v = vecs.column(col);
            let lead = v.iter().find(|z| z.norm() > 1e-12).copied().unwrap_or(c(1.0, 0.0));
            let phase = lead.conj() / lead.norm();
            let w = (lambda / total).sqrt();
            for x in 0..n {
                amps[x * rank + j] = v[x] * phase * w;
            }
        }
        PureState::normalized(layout, amps).expect("purification has unit norm")
    }
}

impl From<&PureState> for DensityOperator {
    fn from(psi: &PureState) -> Self {
        psi.density()
    }
}
