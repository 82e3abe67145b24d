//! Recognising tensors of the form `C·R_φ`: the rank-2 trichotomy, the
//! constant `C` and the map `φ` itself.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::CurvatureTensor;
use crate::probe::{sample_plane, ProbeError};
use crate::pseudo::{CausalType, InnerProductSpace, Matrix, SelfAdjointMap, Vector};
use crate::random::{gaussian_vector, seeded, stream_seed};
use crate::tol::Tolerances;
use crate::util::{leading_left_vectors, max_abs};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(
        "−Tr(R(π)²) = {value:e} < 0 on sample {sample}; the tensor is not C·R_φ with φ² = ±id"
    )]
    NegativeTraceSquare { sample: usize, value: f64 },
    #[error("tensor is not of the form C·R_φ with φ² = ±id: {0}")]
    NotDecomposable(String),
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Rank2Class {
    Isometry {
        c: f64,
    },
    ParaIsometry {
        c: f64,
    },
    Nilpotent,
    #[serde(rename = "NotRank2JordanIP")]
    NotRank2JordanIp {
        reason: String,
    },
}

impl Rank2Class {
    pub fn name(&self) -> &'static str {
        match self {
            Rank2Class::Isometry { .. } => "Isometry",
            Rank2Class::ParaIsometry { .. } => "ParaIsometry",
            Rank2Class::Nilpotent => "Nilpotent",
            Rank2Class::NotRank2JordanIp { .. } => "NotRank2JordanIP",
        }
    }
}

/// Sorts `(φ, C)` into the three rank-2 Jordan-IP types.
pub fn classify_rank2(phi: &SelfAdjointMap, c: f64, tol: &Tolerances) -> Rank2Class {
    let space = phi.space();
    let n = space.dim();
    let sq = phi.square();
    let scale = max_abs(phi.matrix()).max(1.0).powi(2);
    let thresh = tol.rank * scale;
    let id = Matrix::identity(n, n);
    let res_iso = max_abs(&(&sq - &id));
    let res_para = max_abs(&(&sq + &id));
    let res_nil = max_abs(&sq);
    if res_iso <= thresh {
        if c == 0.0 {
            return Rank2Class::NotRank2JordanIp {
                reason: "φ² = id but C = 0".into(),
            };
        }
        return Rank2Class::Isometry { c };
    }
    if res_para <= thresh {
        if space.p() != space.q() {
            return Rank2Class::NotRank2JordanIp {
                reason: format!(
                    "φ² = −id requires p = q, signature is ({},{})",
                    space.p(),
                    space.q()
                ),
            };
        }
        if c == 0.0 {
            return Rank2Class::NotRank2JordanIp {
                reason: "φ² = −id but C = 0".into(),
            };
        }
        return Rank2Class::ParaIsometry { c };
    }
    if res_nil <= thresh {
        let content = phi.kernel_causal_content(tol);
        if content.has_spacelike {
            return Rank2Class::NotRank2JordanIp {
                reason: "φ² = 0 but ker φ contains spacelike vectors".into(),
            };
        }
        return Rank2Class::Nilpotent;
    }
    Rank2Class::NotRank2JordanIp {
        reason: format!(
            "φ² is none of id, −id, 0 (residuals {res_iso:.3e}, {res_para:.3e}, {res_nil:.3e})"
        ),
    }
}

/// Fitted `C` with the spread of the per-plane estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub c: f64,
    pub std_dev: f64,
    pub samples: usize,
    pub plane_class: CausalType,
}

impl FitReport {
    /// Per-plane estimates agree to `1e-6·C`, as they must for `C·R_φ`.
    pub fn is_consistent(&self) -> bool {
        self.std_dev <= 1e-6 * self.c.abs().max(f64::MIN_POSITIVE)
    }
}

/// `C ≥ 0` with `Tr(R(π)²) = −2C²` on spacelike planes (timelike planes when
/// the space has no spacelike ones).
#[allow(non_snake_case)]
pub fn fit_C(
    r: &CurvatureTensor,
    n_samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<FitReport, ClassifyError> {
    let space = r.space();
    let class = if space.q() >= 2 {
        CausalType::Spacelike
    } else {
        CausalType::Timelike
    };
    let scale = r.max_abs().powi(2);
    let mut halves = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let plane = sample_plane(space, class, stream_seed(seed, i as u64), tol)?;
        let m = r
            .curvature_operator(&plane, tol)
            .map_err(ProbeError::from)?
            .matrix;
        let tr = (&m * &m).trace();
        let half = -0.5 * tr;
        if half < -tol.rank * scale.max(f64::MIN_POSITIVE) * 100.0 {
            return Err(ClassifyError::NegativeTraceSquare {
                sample: i,
                value: -tr,
            });
        }
        halves.push(half.max(0.0));
    }
    if halves.is_empty() {
        return Err(ProbeError::NoSamples.into());
    }
    let k = halves.len() as f64;
    let c = (halves.iter().sum::<f64>() / k).sqrt();
    let per: Vec<f64> = halves.iter().map(|h| h.sqrt()).collect();
    let mean = per.iter().sum::<f64>() / k;
    let var = per.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k;
    Ok(FitReport {
        c,
        std_dev: var.sqrt(),
        samples: halves.len(),
        plane_class: class,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructConfig {
    /// Accepted `max|R − C·R_φ| / max|R|`.
    pub residual_tol: f64,
    pub tol: Tolerances,
    pub seed: u64,
    pub fit_samples: usize,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            tol: Tolerances::default(),
            seed: 0x5eed,
            fit_samples: 16,
        }
    }
}

impl ReconstructConfig {
    pub fn finite_difference() -> Self {
        Self {
            residual_tol: 1e-5,
            tol: Tolerances::finite_difference(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub phi: SelfAdjointMap,
    pub c: f64,
    pub residual: f64,
    /// `"trace"` for the closed form, `"ranges"` for the range-intersection route.
    pub method: &'static str,
}

fn relative_residual(r: &CurvatureTensor, phi: &SelfAdjointMap, c: f64) -> f64 {
    let model = CurvatureTensor::from_phi(phi).scaled(c);
    r.max_abs_diff(&model).unwrap_or(f64::INFINITY) / r.max_abs()
}

/// Least-squares `C` for a given `φ`.
fn best_c(r: &CurvatureTensor, phi: &SelfAdjointMap) -> f64 {
    let rp = CurvatureTensor::from_phi(phi);
    let den = rp.dot(&rp);
    if den == 0.0 {
        0.0
    } else {
        r.dot(&rp) / den
    }
}

fn symmetrized(space: &InnerProductSpace, m: Matrix) -> SelfAdjointMap {
    let sym = (&m + space.gram_inv() * m.transpose() * space.gram()) * 0.5;
    SelfAdjointMap::from_bilinear(space.clone(), &(space.gram() * sym)).expect("dimension matches")
}

/// Fixes the sign: nonnegative trace, else first nonzero diagonal entry
/// positive, else first nonzero entry positive.
pub fn canonical_sign(phi: SelfAdjointMap) -> SelfAdjointMap {
    let m = phi.matrix();
    let n = m.nrows();
    let eps = 1e-8 * max_abs(m).max(f64::MIN_POSITIVE);
    let tr = m.trace();
    let flip = if tr.abs() > eps * n as f64 {
        tr < 0.0
    } else if let Some(d) = (0..n).map(|i| m[(i, i)]).find(|d| d.abs() > eps) {
        d < 0.0
    } else {
        m.iter().find(|x| x.abs() > eps).is_some_and(|x| *x < 0.0)
    };
    if flip {
        phi.scaled(-1.0)
    } else {
        phi
    }
}

/// Closed form from the contraction `A(x,w) = Σ G^{jk} R(x,e_j,e_k,w)`,
/// which equals `C(τ·(φx,w) − s·(x,w))` for `φ² = s·id`, `τ = Tr φ`.
fn by_trace(r: &CurvatureTensor, c_abs: f64) -> Vec<SelfAdjointMap> {
    let space = r.space();
    let n = space.dim();
    let gi = space.gram_inv();
    let mut a = Matrix::zeros(n, n);
    for x in 0..n {
        for w in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    if gi[(j, k)] != 0.0 {
                        acc += gi[(j, k)] * r.get(x, j, k, w);
                    }
                }
            }
            a[(x, w)] = acc;
        }
    }
    let tr_a = (gi * &a).trace();
    let mut out = Vec::new();
    for sigma in [1.0, -1.0] {
        for s in [1.0, -1.0] {
            let c = sigma * c_abs;
            let tau2 = tr_a / c + s * n as f64;
            if tau2 < 0.25 {
                continue;
            }
            let tau = tau2.sqrt();
            let b = (&a / c + space.gram() * s) / tau;
            out.push(symmetrized(space, gi * b));
        }
    }
    out
}

/// Orthonormal basis of the range of `R(x, y)` (at most two vectors).
fn operator_range(r: &CurvatureTensor, x: &Vector, y: &Vector) -> Matrix {
    let m = r.operator_matrix(x, y);
    let (u, sv) = leading_left_vectors(&m, 2);
    let top = sv.first().copied().unwrap_or(0.0);
    let keep = sv.iter().filter(|&&s| s > 1e-6 * top && top > 0.0).count();
    u.columns(0, keep).into_owned()
}

/// Range-intersection route for trace-free `φ`: `φe_i` spans
/// `range R(e_i, y₁) ∩ range R(e_i, y₂)`; the scales follow from
/// `R_{ijkl} = Cα_iα_j (E_{kj}E_{li} − E_{ki}E_{lj})` with `E = G·D`.
fn by_ranges(r: &CurvatureTensor, seed: u64) -> Result<Vec<SelfAdjointMap>, String> {
    let space = r.space();
    let n = space.dim();
    let mut rng = seeded(seed);
    let y1 = gaussian_vector(&mut rng, n);
    let y2 = gaussian_vector(&mut rng, n);
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        let ei = space.basis(i);
        let u1 = operator_range(r, &ei, &y1);
        let u2 = operator_range(r, &ei, &y2);
        if u1.ncols() < 2 || u2.ncols() < 2 {
            return Err(format!("R(e_{i}, ·) does not have rank 2"));
        }
        let cross = u1.transpose() * &u2;
        let svd = cross.svd(true, false);
        let (k, s) = svd
            .singular_values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("2×2");
        if *s < 1.0 - 1e-6 {
            return Err(format!("ranges through e_{i} do not share a direction"));
        }
        let dir = &u1 * svd.u.expect("requested U").column(k);
        d.set_column(i, &dir);
    }
    let e = space.gram() * &d;
    let mut gamma = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (mut num, mut den) = (0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    let p = e[(k, j)] * e[(l, i)] - e[(k, i)] * e[(l, j)];
                    num += r.get(i, j, k, l) * p;
                    den += p * p;
                }
            }
            gamma[(i, j)] = if den > 0.0 { num / den } else { 0.0 };
        }
    }
    let gmax = max_abs(&gamma);
    if gmax == 0.0 || n < 3 {
        return Err("too few directions to fix the scales".into());
    }
    // |C|·α_i² = |γ_ij γ_ik / γ_jk| with the best-conditioned pair (j, k).
    let mut mag = vec![0.0; n];
    for (i, m) in mag.iter_mut().enumerate() {
        let mut best = (0.0, 0, 0);
        for j in 0..n {
            for k in (j + 1)..n {
                if j == i || k == i {
                    continue;
                }
                let w = gamma[(i, j)]
                    .abs()
                    .min(gamma[(i, k)].abs())
                    .min(gamma[(j, k)].abs());
                if w > best.0 {
                    best = (w, j, k);
                }
            }
        }
        let (w, j, k) = best;
        if w <= 1e-9 * gmax {
            return Err(format!("no usable triangle through e_{i}"));
        }
        *m = (gamma[(i, j)] * gamma[(i, k)] / gamma[(j, k)]).abs().sqrt();
    }
    let mut out = Vec::new();
    for sigma in [1.0, -1.0] {
        // Relative signs: sign(α_iα_j) = sign(σγ_ij), propagated from e_0.
        let mut sign = vec![0.0; n];
        sign[0] = 1.0;
        let mut frontier = vec![0];
        while let Some(i) = frontier.pop() {
            for j in 0..n {
                if sign[j] == 0.0 && gamma[(i, j)].abs() > 1e-9 * gmax {
                    sign[j] = sign[i] * (sigma * gamma[(i, j)]).signum();
                    frontier.push(j);
                }
            }
        }
        if sign.contains(&0.0) {
            return Err("sign graph is disconnected".into());
        }
        let alpha = Vector::from_fn(n, |i, _| sign[i] * mag[i]);
        let psi = &d * Matrix::from_diagonal(&alpha);
        let c = (&psi * &psi).trace() / n as f64;
        if c == 0.0 {
            continue;
        }
        out.push(symmetrized(space, psi / c.abs().sqrt()));
    }
    Ok(out)
}

/// Recovers `(φ, C)` with `R = C·R_φ` and `φ² = ±id`, `φ` up to its sign
/// normalized by [`canonical_sign`].
pub fn reconstruct_phi(
    r: &CurvatureTensor,
    cfg: &ReconstructConfig,
) -> Result<Reconstruction, ClassifyError> {
    if r.max_abs() == 0.0 {
        return Err(ClassifyError::NotDecomposable("zero tensor".into()));
    }
    let fit = fit_C(r, cfg.fit_samples, cfg.seed, &cfg.tol).map_err(|e| match e {
        ClassifyError::NegativeTraceSquare { sample, value } => {
            ClassifyError::NotDecomposable(format!("−Tr(R(π)²) = {value:e} < 0 on sample {sample}"))
        }
        other => other,
    })?;
    if fit.c <= 0.0 {
        return Err(ClassifyError::NotDecomposable("fitted C is zero".into()));
    }
    let n = r.dim();
    let id = Matrix::identity(n, n);
    let square_ok = |phi: &SelfAdjointMap| {
        let sq = phi.square();
        max_abs(&(&sq - &id)).min(max_abs(&(&sq + &id))) <= cfg.residual_tol.sqrt()
    };
    let evaluate = |phi: SelfAdjointMap, method: &'static str| -> Option<Reconstruction> {
        if !square_ok(&phi) {
            return None;
        }
        let c = best_c(r, &phi);
        let residual = relative_residual(r, &phi, c);
        Some(Reconstruction {
            phi: canonical_sign(phi),
            c,
            residual,
            method,
        })
    };
    let pick = |cands: Vec<Reconstruction>| {
        cands
            .into_iter()
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
    };
    let mut best = pick(
        by_trace(r, fit.c)
            .into_iter()
            .filter_map(|p| evaluate(p, "trace"))
            .collect(),
    );
    if best.as_ref().is_none_or(|b| b.residual > cfg.residual_tol) {
        if let Ok(cands) = by_ranges(r, stream_seed(cfg.seed, 1)) {
            let alt = pick(
                cands
                    .into_iter()
                    .filter_map(|p| evaluate(p, "ranges"))
                    .collect(),
            );
            if alt
                .as_ref()
                .is_some_and(|a| best.as_ref().is_none_or(|b| a.residual < b.residual))
            {
                best = alt;
            }
        }
    }
    match best {
        Some(b) if b.residual <= cfg.residual_tol => Ok(b),
        Some(b) => Err(ClassifyError::NotDecomposable(format!(
            "best candidate leaves relative residual {:.3e}",
            b.residual
        ))),
        None => Err(ClassifyError::NotDecomposable(
            "no candidate with φ² = ±id".into(),
        )),
    }
}
