//! Monte-Carlo constancy probes of `R(π)` over a causal class of planes.
//!
//! A verdict of constancy means "no counterexample among the sampled
//! planes". Known witness planes are injected ahead of the random draws so
//! that thin regions of the Grassmannian are always exercised.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{CurvatureError, CurvatureTensor};
use crate::pseudo::{CausalType, InnerProductSpace, LinalgError, Matrix, OrientedPlane, Vector};
use crate::random::{gaussian_vector, seeded, stream_seed};
use crate::spectral::{
    jordan_structure_scaled, numerical_rank_scaled, JordanStructure, SpectralConfig, SpectralError,
};
use crate::tol::Tolerances;
use crate::util::max_abs;

/// Rejections allowed before a sampler gives up.
pub const MAX_REJECTIONS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbeError {
    #[error("no {class} planes exist in signature ({p},{q}) (spacelike needs q ≥ 2, timelike p ≥ 2, mixed p, q ≥ 1)")]
    UnachievableClass {
        class: CausalType,
        p: usize,
        q: usize,
    },
    #[error("gave up after {MAX_REJECTIONS} rejected draws for a {class} plane")]
    RetryExhausted { class: CausalType },
    #[error("at least one sample is required")]
    NoSamples,
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeMode {
    Rank,
    Jordan,
}

impl std::str::FromStr for ProbeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rank" => Ok(ProbeMode::Rank),
            "jordan" => Ok(ProbeMode::Jordan),
            other => Err(format!(
                "unknown probe mode `{other}` (expected rank or jordan)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    ConstantRank { rank: usize },
    NonConstantRank,
    JordanConstant { structure: JordanStructure },
    JordanNonConstant,
    Unreliable { reason: String },
}

impl Verdict {
    pub fn is_constant(&self) -> bool {
        matches!(
            self,
            Verdict::ConstantRank { .. } | Verdict::JordanConstant { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ConstantRank { .. } => "ConstantRank",
            Verdict::NonConstantRank => "NonConstantRank",
            Verdict::JordanConstant { .. } => "JordanConstant",
            Verdict::JordanNonConstant => "JordanNonConstant",
            Verdict::Unreliable { .. } => "Unreliable",
        }
    }
}

/// Coordinates of a plane's spanning pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneRecord {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl From<&OrientedPlane> for PlaneRecord {
    fn from(p: &OrientedPlane) -> Self {
        Self {
            u: p.u.iter().copied().collect(),
            v: p.v.iter().copied().collect(),
        }
    }
}

impl PlaneRecord {
    pub fn to_plane(&self) -> Result<OrientedPlane, LinalgError> {
        OrientedPlane::new(
            Vector::from_vec(self.u.clone()),
            Vector::from_vec(self.v.clone()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub plane: PlaneRecord,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jordan: Option<JordanStructure>,
    /// Whether the plane was supplied rather than drawn.
    pub injected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub random_samples: usize,
    pub injected_samples: usize,
    pub mode: ProbeMode,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub causal_class: CausalType,
    pub samples: usize,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub representative_jordan: Option<JordanStructure>,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub provenance: Provenance,
}

impl ProbeReport {
    /// Ranks that occurred at least once, ascending.
    pub fn observed_ranks(&self) -> Vec<usize> {
        self.rank_histogram.keys().copied().collect()
    }
}

fn achievable(space: &InnerProductSpace, class: CausalType) -> bool {
    match class {
        CausalType::Spacelike => space.q() >= 2,
        CausalType::Timelike => space.p() >= 2,
        CausalType::Mixed => space.p() >= 1 && space.q() >= 1,
        CausalType::Degenerate => false,
    }
}

/// Draws Gaussian pairs until one spans a plane of the requested class.
pub fn sample_plane(
    space: &InnerProductSpace,
    class: CausalType,
    seed: u64,
    tol: &Tolerances,
) -> Result<OrientedPlane, ProbeError> {
    if !achievable(space, class) {
        return Err(ProbeError::UnachievableClass {
            class,
            p: space.p(),
            q: space.q(),
        });
    }
    let mut rng = seeded(seed);
    let n = space.dim();
    for _ in 0..MAX_REJECTIONS {
        let plane = OrientedPlane {
            u: gaussian_vector(&mut rng, n),
            v: gaussian_vector(&mut rng, n),
        };
        if let Ok(t) = space.plane_type(&plane, tol) {
            if t == class {
                return Ok(plane);
            }
        }
    }
    Err(ProbeError::RetryExhausted { class })
}

/// Scale of the normalized operator of `plane`, used as the reference for
/// rank cutoffs so that operators which vanish up to rounding count as rank 0.
fn operator_scale(r: &CurvatureTensor, plane: &OrientedPlane) -> f64 {
    let det = r.space().plane_gram(plane).det().abs();
    if det == 0.0 {
        return 0.0;
    }
    let n = r.dim() as f64;
    r.max_abs() * plane.u.norm() * plane.v.norm() * n * max_abs(r.space().gram_inv()) / det.sqrt()
}

/// Same oriented plane spanned by a Euclidean-orthonormal pair, so nearly
/// parallel spanning vectors do not inflate rounding or the scale estimate.
fn euclidean_frame(plane: &OrientedPlane) -> OrientedPlane {
    let nu = plane.u.norm();
    if nu == 0.0 {
        return plane.clone();
    }
    let u = &plane.u / nu;
    let w = &plane.v - &u * u.dot(&plane.v);
    let nw = w.norm();
    if nw == 0.0 {
        return plane.clone();
    }
    OrientedPlane { u, v: w / nw }
}

/// Normalized operator of a plane together with its rank and, on request,
/// its Jordan structure.
#[derive(Debug, Clone)]
pub struct PlaneSample {
    pub plane: OrientedPlane,
    pub operator: Matrix,
    pub rank: usize,
    pub jordan: Option<Result<JordanStructure, SpectralError>>,
    /// Reference magnitude of the operator, see `operator_scale`.
    pub scale: f64,
    pub injected: bool,
}

pub fn evaluate_plane(
    r: &CurvatureTensor,
    plane: &OrientedPlane,
    mode: ProbeMode,
    tol: &Tolerances,
) -> Result<PlaneSample, ProbeError> {
    let basis = euclidean_frame(plane);
    let op = r.curvature_operator(&basis, tol)?;
    let cfg = SpectralConfig::from(tol);
    let scale = operator_scale(r, &basis);
    let rank = numerical_rank_scaled(&op.matrix, scale, &cfg);
    let jordan = match mode {
        ProbeMode::Rank => None,
        ProbeMode::Jordan => Some(jordan_structure_scaled(&op.matrix, scale, &cfg)),
    };
    Ok(PlaneSample {
        plane: plane.clone(),
        operator: op.matrix,
        rank,
        jordan,
        scale,
        injected: false,
    })
}

/// Planes of the probe: the injected planes of the right class followed by
/// `n_samples` draws with per-sample seeds derived from `seed`.
pub fn probe_planes(
    space: &InnerProductSpace,
    class: CausalType,
    n_samples: usize,
    seed: u64,
    tol: &Tolerances,
    injected: &[OrientedPlane],
) -> Result<(Vec<OrientedPlane>, usize), ProbeError> {
    if !achievable(space, class) {
        return Err(ProbeError::UnachievableClass {
            class,
            p: space.p(),
            q: space.q(),
        });
    }
    let mut planes: Vec<OrientedPlane> = injected
        .iter()
        .filter(|p| matches!(space.plane_type(p, tol), Ok(t) if t == class))
        .cloned()
        .collect();
    let n_injected = planes.len();
    let drawn: Result<Vec<_>, _> = (0..n_samples)
        .into_par_iter()
        .map(|i| sample_plane(space, class, stream_seed(seed, i as u64), tol))
        .collect();
    planes.extend(drawn?);
    Ok((planes, n_injected))
}

/// Probe over `n_samples` random planes of `class`, plus every plane of
/// `injected` that belongs to the class.
pub fn probe(
    r: &CurvatureTensor,
    class: CausalType,
    n_samples: usize,
    mode: ProbeMode,
    seed: u64,
    tol: &Tolerances,
    injected: &[OrientedPlane],
) -> Result<ProbeReport, ProbeError> {
    if n_samples == 0 && injected.is_empty() {
        return Err(ProbeError::NoSamples);
    }
    let (planes, n_injected) = probe_planes(r.space(), class, n_samples, seed, tol, injected)?;
    if planes.is_empty() {
        return Err(ProbeError::NoSamples);
    }
    let samples: Result<Vec<PlaneSample>, ProbeError> = planes
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            evaluate_plane(r, p, mode, tol).map(|mut s| {
                s.injected = i < n_injected;
                s
            })
        })
        .collect();
    let samples = samples?;

    let mut histogram = BTreeMap::new();
    for s in &samples {
        *histogram.entry(s.rank).or_insert(0) += 1;
    }
    let provenance = Provenance {
        seed,
        random_samples: n_samples,
        injected_samples: n_injected,
        mode,
        tolerances: *tol,
    };
    let witness = |s: &PlaneSample| Witness {
        plane: PlaneRecord::from(&s.plane),
        rank: s.rank,
        jordan: s.jordan.as_ref().and_then(|j| j.as_ref().ok().cloned()),
        injected: s.injected,
    };

    // Outcome classes: by rank, then (in Jordan mode) by structure, with
    // eigenvalues compared at the cluster tolerance of the larger scale.
    let mut structures: Vec<(JordanStructure, f64)> = Vec::new();
    let mut outcome = Vec::with_capacity(samples.len());
    let mut unreliable = None;
    for s in &samples {
        match &s.jordan {
            None => outcome.push(s.rank),
            Some(Err(e)) => {
                unreliable.get_or_insert_with(|| e.to_string());
                outcome.push(usize::MAX);
            }
            Some(Ok(j)) => {
                let idx = structures
                    .iter()
                    .position(|(k, sc)| k.matches(j, 10.0 * tol.cluster * sc.max(s.scale).max(1.0)))
                    .unwrap_or_else(|| {
                        structures.push((j.clone(), s.scale));
                        structures.len() - 1
                    });
                outcome.push(idx);
            }
        }
    }
    let mut witnesses = Vec::new();
    let mut per_outcome: BTreeMap<usize, usize> = BTreeMap::new();
    for (s, &o) in samples.iter().zip(&outcome) {
        let seen = per_outcome.entry(o).or_insert(0);
        if *seen < 2 {
            *seen += 1;
            witnesses.push(witness(s));
        }
    }

    let verdict = if let Some(reason) = unreliable {
        Verdict::Unreliable { reason }
    } else if histogram.len() > 1 {
        Verdict::NonConstantRank
    } else {
        match mode {
            ProbeMode::Rank => Verdict::ConstantRank {
                rank: *histogram.keys().next().expect("nonempty"),
            },
            ProbeMode::Jordan if structures.len() == 1 => Verdict::JordanConstant {
                structure: structures[0].0.clone(),
            },
            ProbeMode::Jordan => Verdict::JordanNonConstant,
        }
    };
    // A constant verdict needs no witnesses beyond the first representative.
    if verdict.is_constant() {
        witnesses.truncate(1);
    }

    Ok(ProbeReport {
        causal_class: class,
        samples: samples.len(),
        rank_histogram: histogram,
        representative_jordan: structures.first().map(|(j, _)| j.clone()),
        verdict,
        witnesses,
        provenance,
    })
}
