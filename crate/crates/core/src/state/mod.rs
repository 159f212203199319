//! Finite-dimensional states, channels and seeded sampling.

mod channel;
mod density;
mod io;
mod layout;
mod pure;
mod random;

pub use channel::{apply_channel, QuantumChannel};
pub use density::{DensityOperator, STATE_TOL};
pub use io::{StateFile, StateInput};
pub use layout::{Subsystem, SystemLayout};
pub use pure::{PureState, NORM_TOL};
pub use random::{haar_random_pure, haar_random_unitary, random_isometry};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Kronecker composition of two states of the same kind.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Result<Self> {
        PureState::tensor(self, other)
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        DensityOperator::tensor(self, other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

/// `I (x) op (x) I` with `op` on `label`; `op` may change that factor's dimension.
pub(crate) fn embed_operator(layout: &SystemLayout, label: &str, op: &CMat) -> Result<CMat> {
    let pos = layout.position(label)?;
    let dims = layout.dims();
    if op.ncols() != dims[pos] {
        return Err(Error::Dimension(format!(
            "operator acts on dimension {}, `{label}` has {}",
            op.ncols(),
            dims[pos]
        )));
    }
    let before: usize = dims[..pos].iter().product();
    let after: usize = dims[pos + 1..].iter().product();
    Ok(linalg::kron(&linalg::kron(&linalg::identity(before), op), &linalg::identity(after)))
}
