use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec};

use super::{DensityOperator, PureState, SystemLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

/// On-disk state: `data` holds `[re, im]` pairs, the vector for pure states
/// or the matrix rows concatenated for mixed ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
}

/// A state read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum StateInput {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl StateInput {
    pub fn layout(&self) -> &SystemLayout {
        match self {
            StateInput::Pure(p) => p.layout(),
            StateInput::Mixed(r) => r.layout(),
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            StateInput::Pure(p) => p.density(),
            StateInput::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            StateInput::Pure(p) => Some(p),
            StateInput::Mixed(_) => None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        file.into_state()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateFile::from(self)).expect("state serializes")
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl StateFile {
    pub fn into_state(self) -> Result<StateInput> {
        if self.dims.len() != self.labels.len() {
            return Err(Error::Parse(format!(
                "{} dims but {} labels",
                self.dims.len(),
                self.labels.len()
            )));
        }
        let layout = SystemLayout::new(self.labels.into_iter().zip(self.dims))?;
        let d = layout.total_dim();
        let values: Vec<_> = self.data.iter().map(|[re, im]| c(*re, *im)).collect();
        match self.kind {
            StateKind::Pure => {
                if values.len() != d {
                    return Err(Error::Parse(format!("pure state needs {d} amplitudes, found {}", values.len())));
                }
                Ok(StateInput::Pure(PureState::new(layout, CVec::from_vec(values))?))
            }
            StateKind::Mixed => {
                if values.len() != d * d {
                    return Err(Error::Parse(format!("mixed state needs {} entries, found {}", d * d, values.len())));
                }
                Ok(StateInput::Mixed(DensityOperator::new(layout, CMat::from_row_slice(d, d, &values))?))
            }
        }
    }
}

impl From<&StateInput> for StateFile {
    fn from(state: &StateInput) -> Self {
        let layout = state.layout();
        let (kind, data) = match state {
            StateInput::Pure(p) => (StateKind::Pure, p.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
            StateInput::Mixed(r) => {
                let m = r.matrix();
                let d = m.nrows();
                let data = (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
                    .collect();
                (StateKind::Mixed, data)
            }
        };
        StateFile {
            dims: layout.dims(),
            labels: layout.labels().iter().map(|s| s.to_string()).collect(),
            kind,
            data,
        }
    }
}
