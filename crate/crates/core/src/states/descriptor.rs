//! JSON state descriptors.
//!
//! Either a named state with optional white noise:
//!
//! ```json
//! {"dims": [2, 2, 2, 2], "named": {"name": "ghz", "n": 4}, "noise_x": 0.95}
//! ```
//!
//! or an explicit row-major matrix:
//!
//! ```json
//! {"dims": [2], "matrix_re": [[1, 0], [0, 0]], "matrix_im": [[0, 0], [0, 0]]}
//! ```

use serde::{Deserialize, Serialize};

use super::{check_unit_interval, from_ket, named_state, DensityMatrix, NamedState, PartySystem};
use crate::{CMatrix, Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum NamedSpec {
    Ghz {
        n: usize,
        #[serde(default = "default_local_dim")]
        d: usize,
    },
    W {
        n: usize,
    },
    #[serde(rename = "paper_332")]
    Example332,
}

fn default_local_dim() -> usize {
    2
}

impl From<NamedSpec> for NamedState {
    fn from(spec: NamedSpec) -> Self {
        match spec {
            NamedSpec::Ghz { n, d } => NamedState::Ghz { n, d },
            NamedSpec::W { n } => NamedState::W { n },
            NamedSpec::Example332 => NamedState::Example332,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDescriptor {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<NamedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_im: Option<Vec<Vec<f64>>>,
}

impl StateDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))
    }

    /// Builds the described matrix. Physicality is not checked here; callers
    /// run [`DensityMatrix::validate`] on the result.
    pub fn resolve(&self) -> Result<DensityMatrix> {
        let system = PartySystem::new(self.dims.clone())?;
        match (&self.named, &self.matrix_re) {
            (Some(named), None) => {
                if self.matrix_im.is_some() {
                    return Err(Error::Descriptor(
                        "matrix_im given together with a named state".into(),
                    ));
                }
                let state: NamedState = named.clone().into();
                let ket = named_state(state)?;
                if ket.system() != &system {
                    return Err(Error::Descriptor(format!(
                        "dims {:?} do not match the named state's dims {:?}",
                        self.dims,
                        ket.system().dims()
                    )));
                }
                let pure = from_ket(&ket)?;
                match self.noise_x {
                    Some(x) => {
                        check_unit_interval("noise_x", x)?;
                        pure.with_white_noise(x)
                    }
                    None => Ok(pure),
                }
            }
            (None, Some(re)) => {
                if self.noise_x.is_some() {
                    return Err(Error::Descriptor(
                        "noise_x applies only to named states".into(),
                    ));
                }
                let dim = system.total();
                check_square("matrix_re", re, dim)?;
                if let Some(im) = &self.matrix_im {
                    check_square("matrix_im", im, dim)?;
                }
                let m = CMatrix::from_fn(dim, dim, |r, c| {
                    let im = self.matrix_im.as_ref().map_or(0.0, |im| im[r][c]);
                    C64::new(re[r][c], im)
                });
                DensityMatrix::from_matrix(system, m)
            }
            (Some(_), Some(_)) => Err(Error::Descriptor(
                "give either `named` or `matrix_re`, not both".into(),
            )),
            (None, None) => Err(Error::Descriptor(
                "one of `named` or `matrix_re` is required".into(),
            )),
        }
    }
}

fn check_square(field: &str, rows: &[Vec<f64>], dim: usize) -> Result<()> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Descriptor(format!(
            "{field} must be {dim}x{dim} to match the product of dims"
        )));
    }
    Ok(())
}
