use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

use super::{embed_operator, DensityOperator};

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMat>,
}

impl QuantumChannel {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<CMat>) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 || kraus.is_empty() {
            return Err(Error::Dimension("channel needs positive dimensions and Kraus operators".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::Dimension(format!(
                "Kraus operator is {:?}, expected {dim_out}x{dim_in}",
                k.shape()
            )));
        }
        let mut sum = CMat::zeros(dim_in, dim_in);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let defect = linalg::max_abs_diff(&sum, &linalg::identity(dim_in));
        if defect > 1e-9 {
            return Err(Error::InvalidState(format!("Kraus operators not trace preserving ({defect:e})")));
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, kraus: vec![linalg::identity(d)] }
    }

    /// Discards the input and prepares `|0>` on a `dim_out`-dimensional output.
    pub fn replace_with_zero(dim_in: usize, dim_out: usize) -> Self {
        let kraus = (0..dim_in)
            .map(|i| {
                let mut k = CMat::zeros(dim_out, dim_in);
                k[(0, i)] = linalg::ONE;
                k
            })
            .collect();
        Self { dim_in, dim_out, kraus }
    }

    /// Splits a Stinespring isometry with rows ordered `(output, environment)`.
    pub fn from_stinespring(v: &CMat, dim_out: usize) -> Result<Self> {
        let (rows, dim_in) = v.shape();
        if dim_out == 0 || rows % dim_out != 0 {
            return Err(Error::Dimension(format!("{rows} rows do not factor through output {dim_out}")));
        }
        let env = rows / dim_out;
        let kraus = (0..env)
            .map(|e| CMat::from_fn(dim_out, dim_in, |o, i| v[(o * env + e, i)]))
            .collect();
        Self::new(dim_in, dim_out, kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    /// Stinespring isometry `V|i> = sum_k K_k|i> (x) |k>`, rows ordered `(output, environment)`.
    pub fn stinespring(&self) -> CMat {
        let env = self.kraus.len();
        CMat::from_fn(self.dim_out * env, self.dim_in, |r, i| {
            self.kraus[r % env][(r / env, i)]
        })
    }
}

/// `sum_k (K_k (x) I) rho (K_k (x) I)^dag` with the channel acting on `target`.
pub fn apply_channel(rho: &DensityOperator, ch: &QuantumChannel, target: &str) -> Result<DensityOperator> {
    let d = rho.layout().dim_of(target)?;
    if d != ch.dim_in() {
        return Err(Error::Dimension(format!(
            "channel input {} does not match `{target}` of dimension {d}",
            ch.dim_in()
        )));
    }
    let layout = rho.layout().with_dim(target, ch.dim_out())?;
    let n = layout.total_dim();
    let mut out = CMat::zeros(n, n);
    for k in ch.kraus() {
        let op = embed_operator(rho.layout(), target, k)?;
        out += &op * rho.matrix() * op.adjoint();
    }
    Ok(DensityOperator::new_unchecked(layout, out))
}
