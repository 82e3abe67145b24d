//! Named example tensors together with planes on which their rank or Jordan
//! form is known to jump.

use thiserror::Error;

use crate::curvature::CurvatureTensor;
use crate::pseudo::{InnerProductSpace, Matrix, OrientedPlane, SelfAdjointMap, Vector};
use crate::random::standard_para_isometry;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("unknown example `{0}`; known names: {names}", names = canonical_names().join(", "))]
    UnknownName(String),
    #[error("`{name}` requires {requirement}, got p = {p}, q = {q}")]
    Signature {
        name: &'static str,
        requirement: &'static str,
        p: usize,
        q: usize,
    },
    #[error("`{name}`: {message}")]
    Parameter { name: &'static str, message: String },
}

/// How an example is assembled, kept for serialization.
#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    /// `C·R_φ`.
    Phi { phi: SelfAdjointMap, c: f64 },
    /// `Σ c_i·R_{φ_i}`.
    Combination(Vec<(f64, SelfAdjointMap)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZooEntry {
    pub name: &'static str,
    pub tensor: CurvatureTensor,
    pub construction: Construction,
    /// Planes on which the operator rank differs from a generic plane of the
    /// same class, paired with planes of the generic rank.
    pub witnesses: Vec<OrientedPlane>,
}

impl ZooEntry {
    pub fn phi(&self) -> Option<&SelfAdjointMap> {
        match &self.construction {
            Construction::Phi { phi, .. } => Some(phi),
            Construction::Combination(_) => None,
        }
    }
}

struct Spec {
    name: &'static str,
    aliases: &'static [&'static str],
    summary: &'static str,
}

const SPECS: &[Spec] = &[
    Spec {
        name: "identity",
        aliases: &[],
        summary: "R_id, constant curvature 1",
    },
    Spec {
        name: "projection",
        aliases: &["lemma2.2-projection"],
        summary: "R_φ with φ the orthogonal projection on V⁺ (p, q ≥ 2)",
    },
    Spec {
        name: "timelike-projection",
        aliases: &[],
        summary: "R_φ with φ the orthogonal projection on V⁻ (p, q ≥ 2)",
    },
    Spec {
        name: "isotropic-kernel",
        aliases: &[],
        summary: "R_φ with ker φ = span{e₁⁻ + e₁⁺} totally isotropic (p, q ≥ 2)",
    },
    Spec {
        name: "rank4",
        aliases: &["lemma2.3-rank4"],
        summary: "R_id + R_φ with φe_i⁻ = −e_i⁺, φe_j⁺ = e_j⁻ (p ≥ q ≥ 2)",
    },
    Spec {
        name: "nilpotent-phik",
        aliases: &["lemma2.5-phik"],
        summary: "R_φ with φ_k² = 0 and totally isotropic range, parameter k ≤ q (p, q ≥ 3)",
    },
];

pub fn canonical_names() -> Vec<&'static str> {
    SPECS.iter().map(|s| s.name).collect()
}

/// `(name, aliases, summary)` for help texts.
pub fn catalogue() -> Vec<(&'static str, &'static [&'static str], &'static str)> {
    SPECS
        .iter()
        .map(|s| (s.name, s.aliases, s.summary))
        .collect()
}

pub fn resolve(name: &str) -> Option<&'static str> {
    SPECS
        .iter()
        .find(|s| s.name == name || s.aliases.contains(&name))
        .map(|s| s.name)
}

fn require(
    name: &'static str,
    ok: bool,
    requirement: &'static str,
    p: usize,
    q: usize,
) -> Result<(), ZooError> {
    if ok {
        Ok(())
    } else {
        Err(ZooError::Signature {
            name,
            requirement,
            p,
            q,
        })
    }
}

fn plane(u: Vector, v: Vector) -> OrientedPlane {
    OrientedPlane::new(u, v).expect("witness vectors are independent")
}

fn phi_entry(name: &'static str, phi: SelfAdjointMap, witnesses: Vec<OrientedPlane>) -> ZooEntry {
    ZooEntry {
        name,
        tensor: CurvatureTensor::from_phi(&phi),
        construction: Construction::Phi { phi, c: 1.0 },
        witnesses,
    }
}

/// Builds the named example on the canonical space of signature `(p, q)`.
/// `k` is only read by `nilpotent-phik` (default `q`).
pub fn example_zoo(name: &str, p: usize, q: usize, k: Option<usize>) -> Result<ZooEntry, ZooError> {
    let name = resolve(name).ok_or_else(|| ZooError::UnknownName(name.to_string()))?;
    let s = InnerProductSpace::canonical(p, q);
    let n = p + q;
    let m = |i: usize| s.e_minus(i);
    let pl = |j: usize| s.e_plus(j);
    match name {
        "identity" => Ok(ZooEntry {
            name,
            tensor: CurvatureTensor::identity(s.clone()),
            construction: Construction::Phi {
                phi: SelfAdjointMap::identity(s),
                c: 1.0,
            },
            witnesses: Vec::new(),
        }),
        "projection" | "timelike-projection" => {
            require(name, p >= 2 && q >= 2, "p ≥ 2 and q ≥ 2", p, q)?;
            let onto_plus = name == "projection";
            let mut mat = Matrix::zeros(n, n);
            for i in 0..n {
                if (i >= p) == onto_plus {
                    mat[(i, i)] = 1.0;
                }
            }
            let phi = SelfAdjointMap::new(s.clone(), mat).expect("diagonal maps are self-adjoint");
            // `a` spans the kernel, `b` the image.
            let (a, b): (Box<dyn Fn(usize) -> Vector>, Box<dyn Fn(usize) -> Vector>) = if onto_plus
            {
                (Box::new(m), Box::new(pl))
            } else {
                (Box::new(pl), Box::new(m))
            };
            let witnesses = vec![
                plane(a(0) * 2.0 + b(0), a(1) * 2.0 + b(1)),
                plane(a(0), a(1)),
                plane(a(0) * 2.0 + b(0), b(1)),
                plane(a(0), b(1)),
            ];
            Ok(phi_entry(name, phi, witnesses))
        }
        "isotropic-kernel" => {
            require(name, p >= 2 && q >= 2, "p ≥ 2 and q ≥ 2", p, q)?;
            let mut mat = Matrix::identity(n, n);
            // e₁⁻ ↦ e₁⁻ + e₁⁺, e₁⁺ ↦ −e₁⁻ − e₁⁺
            mat[(0, 0)] = 1.0;
            mat[(p, 0)] = 1.0;
            mat[(0, p)] = -1.0;
            mat[(p, p)] = -1.0;
            let phi = SelfAdjointMap::new(s.clone(), mat).expect("self-adjoint by construction");
            let witnesses = vec![plane(m(0), pl(0)), plane(m(1), pl(1))];
            Ok(phi_entry(name, phi, witnesses))
        }
        "rank4" => {
            require(name, p >= q && q >= 2, "p ≥ q ≥ 2", p, q)?;
            let mut mat = Matrix::zeros(n, n);
            for i in 0..q {
                mat[(p + i, i)] = -1.0;
                mat[(i, p + i)] = 1.0;
            }
            let phi = SelfAdjointMap::new(s.clone(), mat).expect("self-adjoint by construction");
            let id = SelfAdjointMap::identity(s.clone());
            let tensor = CurvatureTensor::linear_combine(
                &[1.0, 1.0],
                &[
                    &CurvatureTensor::identity(s.clone()),
                    &CurvatureTensor::from_phi(&phi),
                ],
            )
            .expect("same space");
            let mut witnesses = vec![plane(m(0), pl(0)), plane(m(0), pl(1))];
            if p > q {
                witnesses.push(plane(m(q), m(0)));
                witnesses.push(plane(m(0), m(1)));
            }
            Ok(ZooEntry {
                name,
                tensor,
                construction: Construction::Combination(vec![(1.0, id), (1.0, phi)]),
                witnesses,
            })
        }
        "nilpotent-phik" => {
            require(name, p >= 3 && q >= 3, "p ≥ 3 and q ≥ 3", p, q)?;
            let k = k.unwrap_or(q);
            if k == 0 || k > q {
                return Err(ZooError::Parameter {
                    name,
                    message: format!("parameter k = {k} must satisfy 1 ≤ k ≤ q = {q}"),
                });
            }
            let mut mat = Matrix::zeros(n, n);
            for i in 0..k {
                mat[(i, i)] = 1.0;
                mat[(p + i, i)] = 1.0;
                mat[(i, p + i)] = -1.0;
                mat[(p + i, p + i)] = -1.0;
            }
            let phi = SelfAdjointMap::new(s.clone(), mat).expect("self-adjoint by construction");
            let mut witnesses = vec![
                plane(m(0), m(1)),
                plane(pl(0), pl(1)),
                plane(m(0), pl(1)),
                plane(m(0), pl(0)),
            ];
            if k < p {
                witnesses.push(plane(m(0), m(k)));
            }
            if k < q {
                witnesses.push(plane(pl(0), pl(k)));
                witnesses.push(plane(m(0), pl(k)));
            }
            Ok(phi_entry(name, phi, witnesses))
        }
        _ => unreachable!("resolve only returns catalogued names"),
    }
}

/// The balanced-signature map `e_i⁻ ↦ −e_i⁺`, `e_i⁺ ↦ e_i⁻`.
pub fn para_isometry(p: usize) -> SelfAdjointMap {
    let s = InnerProductSpace::canonical(p, p);
    let m = standard_para_isometry(&s);
    SelfAdjointMap::new(s, m).expect("self-adjoint by construction")
}
