//! JSON file formats. Every top-level document carries `"schema": 1`;
//! matrices are arrays of rows.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{CurvatureError, CurvatureTensor};
use crate::probe::PlaneRecord;
use crate::pseudo::{InnerProductSpace, LinalgError, Matrix, OrientedPlane, SelfAdjointMap};
use crate::zoo::{Construction, ZooEntry};

pub const SCHEMA: u32 = 1;

/// Index order of dense components.
pub const DENSE_ORDER: &str = "R(e_i,e_j,e_k,e_l) at i*n^3 + j*n^2 + k*n + l";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {found} (this build reads schema {SCHEMA})")]
    Schema { found: u32 },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<Matrix, IoError> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(IoError::Shape(format!(
            "{what}: rows have different lengths"
        )));
    }
    Ok(Matrix::from_fn(n, m, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub p: usize,
    pub q: usize,
    #[serde(rename = "G")]
    pub g: Vec<Vec<f64>>,
}

impl From<&InnerProductSpace> for SpaceJson {
    fn from(s: &InnerProductSpace) -> Self {
        Self {
            p: s.p(),
            q: s.q(),
            g: matrix_rows(s.gram()),
        }
    }
}

impl SpaceJson {
    pub fn to_space(&self) -> Result<InnerProductSpace, IoError> {
        let g = matrix_from_rows(&self.g, "G")?;
        if g.nrows() != self.p + self.q || g.ncols() != self.p + self.q {
            return Err(IoError::Shape(format!(
                "G is {}×{}, signature ({},{}) needs {}×{}",
                g.nrows(),
                g.ncols(),
                self.p,
                self.q,
                self.p + self.q,
                self.p + self.q
            )));
        }
        Ok(InnerProductSpace::with_signature(self.p, self.q, g)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
}

impl From<&SelfAdjointMap> for MapJson {
    fn from(m: &SelfAdjointMap) -> Self {
        Self {
            a: matrix_rows(m.matrix()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(rename = "C")]
    pub c: f64,
    pub phi_matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TensorBody {
    Dense {
        #[serde(default = "dense_order")]
        index_order: String,
        components: Vec<f64>,
    },
    Phi {
        phi_matrix: Vec<Vec<f64>>,
        #[serde(rename = "C")]
        c: f64,
    },
    Combination {
        terms: Vec<TermJson>,
    },
}

fn dense_order() -> String {
    DENSE_ORDER.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub space: SpaceJson,
    #[serde(flatten)]
    pub body: TensorBody,
    /// Planes on which the rank or Jordan form is known to jump; probes
    /// inject them ahead of the random draws.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<PlaneRecord>,
}

/// A tensor read from a file, keeping `(φ, C)` when the file states it.
#[derive(Debug, Clone)]
pub struct LoadedTensor {
    pub name: Option<String>,
    pub tensor: CurvatureTensor,
    pub phi: Option<(SelfAdjointMap, f64)>,
    pub witnesses: Vec<OrientedPlane>,
}

fn phi_map(space: &InnerProductSpace, rows: &[Vec<f64>]) -> Result<SelfAdjointMap, IoError> {
    let m = matrix_from_rows(rows, "phi_matrix")?;
    if m.nrows() != space.dim() || m.ncols() != space.dim() {
        return Err(IoError::Shape(format!(
            "phi_matrix is {}×{}, the space has dimension {}",
            m.nrows(),
            m.ncols(),
            space.dim()
        )));
    }
    Ok(SelfAdjointMap::new(space.clone(), m)?)
}

impl TensorFile {
    pub fn dense(tensor: &CurvatureTensor) -> Self {
        Self {
            schema: SCHEMA,
            name: None,
            space: SpaceJson::from(tensor.space()),
            body: TensorBody::Dense {
                index_order: dense_order(),
                components: tensor.components().to_vec(),
            },
            witnesses: Vec::new(),
        }
    }

    pub fn phi(phi: &SelfAdjointMap, c: f64) -> Self {
        Self {
            schema: SCHEMA,
            name: None,
            space: SpaceJson::from(phi.space()),
            body: TensorBody::Phi {
                phi_matrix: matrix_rows(phi.matrix()),
                c,
            },
            witnesses: Vec::new(),
        }
    }

    pub fn from_entry(e: &ZooEntry) -> Self {
        let mut f = match &e.construction {
            Construction::Phi { phi, c } => Self::phi(phi, *c),
            Construction::Combination(terms) => Self {
                schema: SCHEMA,
                name: None,
                space: SpaceJson::from(e.tensor.space()),
                body: TensorBody::Combination {
                    terms: terms
                        .iter()
                        .map(|(c, phi)| TermJson {
                            c: *c,
                            phi_matrix: matrix_rows(phi.matrix()),
                        })
                        .collect(),
                },
                witnesses: Vec::new(),
            },
        };
        f.name = Some(e.name.to_string());
        f.witnesses = e.witnesses.iter().map(PlaneRecord::from).collect();
        f
    }

    pub fn load(&self) -> Result<LoadedTensor, IoError> {
        if self.schema != SCHEMA {
            return Err(IoError::Schema { found: self.schema });
        }
        let space = self.space.to_space()?;
        let (tensor, phi) = match &self.body {
            TensorBody::Dense { components, .. } => (
                CurvatureTensor::from_components(space.clone(), components.clone())?,
                None,
            ),
            TensorBody::Phi { phi_matrix, c } => {
                let phi = phi_map(&space, phi_matrix)?;
                (CurvatureTensor::from_phi(&phi).scaled(*c), Some((phi, *c)))
            }
            TensorBody::Combination { terms } => {
                if terms.is_empty() {
                    return Err(IoError::Shape("combination has no terms".into()));
                }
                let parts: Vec<CurvatureTensor> = terms
                    .iter()
                    .map(|t| phi_map(&space, &t.phi_matrix).map(|p| CurvatureTensor::from_phi(&p)))
                    .collect::<Result<_, _>>()?;
                let coeffs: Vec<f64> = terms.iter().map(|t| t.c).collect();
                let refs: Vec<&CurvatureTensor> = parts.iter().collect();
                (CurvatureTensor::linear_combine(&coeffs, &refs)?, None)
            }
        };
        let witnesses = self
            .witnesses
            .iter()
            .map(|w| {
                if w.u.len() != space.dim() || w.v.len() != space.dim() {
                    return Err(IoError::Shape(format!(
                        "witness plane has {} coordinates, the space has dimension {}",
                        w.u.len(),
                        space.dim()
                    )));
                }
                Ok(w.to_plane()?)
            })
            .collect::<Result<_, IoError>>()?;
        Ok(LoadedTensor {
            name: self.name.clone(),
            tensor,
            phi,
            witnesses,
        })
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_tensor(path: &Path) -> Result<LoadedTensor, IoError> {
    let file: TensorFile = serde_json::from_str(&read_text(path)?)?;
    file.load()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::example_zoo;

    fn round_trip(f: &TensorFile) -> TensorFile {
        serde_json::from_str(&to_json(f)).unwrap()
    }

    #[test]
    fn zoo_files_round_trip() {
        for (name, p, q) in [
            ("projection", 2, 5),
            ("rank4", 3, 3),
            ("nilpotent-phik", 5, 5),
        ] {
            let e = example_zoo(name, p, q, None).unwrap();
            let f = TensorFile::from_entry(&e);
            let back = round_trip(&f);
            assert_eq!(back, f);
            let loaded = back.load().unwrap();
            assert_eq!(loaded.tensor.max_abs_diff(&e.tensor).unwrap(), 0.0);
            assert_eq!(loaded.witnesses, e.witnesses);
            assert_eq!(loaded.name.as_deref(), Some(e.name));
        }
    }

    #[test]
    fn kinds_are_tagged() {
        let e = example_zoo("nilpotent-phik", 5, 5, Some(5)).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&to_json(&TensorFile::from_entry(&e))).unwrap();
        assert_eq!(v["kind"], "phi");
        assert_eq!(v["schema"], 1);
        assert_eq!(v["C"], 1.0);
        let r4 = example_zoo("rank4", 3, 3, None).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&to_json(&TensorFile::from_entry(&r4))).unwrap();
        assert_eq!(v["kind"], "combination");
        assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn dense_round_trip_is_exact() {
        let e = example_zoo("rank4", 3, 3, None).unwrap();
        let f = round_trip(&TensorFile::dense(&e.tensor));
        let t = f.load().unwrap().tensor;
        assert_eq!(t.components(), e.tensor.components());
        assert_eq!(t.space(), e.tensor.space());
    }

    #[test]
    fn malformed_files_are_rejected() {
        let e = example_zoo("projection", 2, 2, None).unwrap();
        let mut f = TensorFile::from_entry(&e);
        f.schema = 2;
        assert!(matches!(f.load(), Err(IoError::Schema { found: 2 })));

        let mut f = TensorFile::dense(&e.tensor);
        if let TensorBody::Dense { components, .. } = &mut f.body {
            components.pop();
        }
        assert!(f.load().is_err());

        let mut f = TensorFile::from_entry(&e);
        f.space.g[0][1] = 0.5;
        assert!(f.load().is_err());

        let asym = TensorFile {
            body: TensorBody::Phi {
                phi_matrix: vec![
                    vec![0.0, 1.0, 0.0, 0.0],
                    vec![0.0, 0.0, 0.0, 0.0],
                    vec![0.0, 0.0, 0.0, 0.0],
                    vec![0.0, 0.0, 0.0, 0.0],
                ],
                c: 1.0,
            },
            ..TensorFile::from_entry(&e)
        };
        assert!(asym.load().is_err());
        assert!(serde_json::from_str::<TensorFile>("{\"schema\": 1, \"kind\": \"dense\"").is_err());
        assert!(serde_json::from_str::<TensorFile>(
            "{\"schema\": 1, \"kind\": \"sparse\", \"space\": {\"p\":0,\"q\":1,\"G\":[[1]]}}"
        )
        .is_err());
    }
}
