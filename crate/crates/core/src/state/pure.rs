use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64, ONE};

use super::{DensityOperator, SystemLayout};

pub const NORM_TOL: f64 = 1e-9;

/// Normalized state vector over a labelled layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SystemLayout,
    amplitudes: CVec,
}

impl PureState {
    pub fn new(layout: SystemLayout, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a layout of dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(layout: SystemLayout, amplitudes: CVec) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm.is_nan() || norm <= 0.0 || norm.is_infinite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(layout, amplitudes.unscale(norm))
    }

    /// Product basis state `|digits>`.
    pub fn basis(layout: SystemLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.len() {
            return Err(Error::Dimension("one digit per subsystem expected".into()));
        }
        let mut index = 0;
        for (d, p) in digits.iter().zip(layout.parts()) {
            if *d >= p.dim {
                return Err(Error::Dimension(format!("digit {d} out of range for `{}`", p.label)));
            }
            index = index * p.dim + d;
        }
        let mut amps = CVec::zeros(layout.total_dim());
        amps[index] = ONE;
        Self::new(layout, amps)
    }

    /// Normalized superposition `sum_k w_k |digits_k>` over product basis states.
    pub fn superposition(layout: SystemLayout, terms: &[(C64, &[usize])]) -> Result<Self> {
        let mut amps = CVec::zeros(layout.total_dim());
        for (w, digits) in terms {
            let b = Self::basis(layout.clone(), digits)?;
            amps += b.amplitudes * *w;
        }
        Self::normalized(layout, amps)
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::new_unchecked(self.layout.clone(), m)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let layout = self.layout.concat(&other.layout)?;
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        Ok(Self { layout, amplitudes: amps })
    }

    /// Amplitudes as a matrix with rows indexed by `rows` (in that order) and
    /// columns by the remaining parts (layout order).
    pub(crate) fn reshape(&self, rows: &[&str]) -> Result<CMat> {
        let pos = rows
            .iter()
            .map(|l| self.layout.position(l))
            .collect::<Result<Vec<_>>>()?;
        let rdim: usize = pos.iter().map(|&p| self.layout.parts()[p].dim).product();
        let cdim = self.layout.total_dim() / rdim;
        let (ri, ci) = self.layout.split_indices(&pos);
        let mut m = CMat::zeros(rdim, cdim);
        for x in 0..self.layout.total_dim() {
            m[(ri[x], ci[x])] = self.amplitudes[x];
        }
        Ok(m)
    }

    /// Reduced density operator on `keep` (returned in layout order).
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::Dimension("partial trace must keep at least one subsystem".into()));
        }
        let pos = self.layout.positions_sorted(keep)?;
        let labels: Vec<&str> = pos.iter().map(|&p| self.layout.parts()[p].label.as_str()).collect();
        let m = self.reshape(&labels)?;
        let layout = self.layout.sub_layout(&pos);
        Ok(DensityOperator::new_unchecked(layout, &m * m.adjoint()))
    }

    /// Same state with parts reordered to `order`.
    pub fn reorder(&self, order: &[&str]) -> Result<PureState> {
        if order.len() != self.layout.len() {
            return Err(Error::Dimension("reorder needs every label exactly once".into()));
        }
        let m = self.reshape(order)?;
        let pos = order
            .iter()
            .map(|l| self.layout.position(l))
            .collect::<Result<Vec<_>>>()?;
        let layout = self.layout.sub_layout(&pos);
        Ok(Self {
            layout,
            amplitudes: CVec::from_iterator(m.nrows(), m.column(0).iter().copied()),
        })
    }

    /// Applies the unitary `u` to subsystem `label`.
    pub fn apply_local(&self, label: &str, u: &CMat) -> Result<PureState> {
        let op = super::embed_operator(&self.layout, label, u)?;
        let amps = op * &self.amplitudes;
        Self::normalized(self.layout.clone(), amps)
    }

    /// Renames parts, keeping dimensions and order.
    pub fn relabel(&self, labels: &[&str]) -> Result<PureState> {
        if labels.len() != self.layout.len() {
            return Err(Error::Dimension("one label per subsystem expected".into()));
        }
        let layout = SystemLayout::new(labels.iter().zip(self.layout.dims()).map(|(l, d)| (*l, d)))?;
        Ok(Self { layout, amplitudes: self.amplitudes.clone() })
    }
}
