//! Linear algebra on a real vector space carrying an inner product of
//! signature `(p, q)`.
//!
//! Coordinates are always taken relative to a working frame whose Gram matrix
//! is `G`. Every constructor in this crate emits the normalized frame
//! `{e₁⁻,…,e_p⁻, e₁⁺,…,e_q⁺}` with `G = diag(−1,…,−1, +1,…,+1)`, but a general
//! symmetric nondegenerate `G` is accepted (tangent spaces of coordinate
//! metrics, hyperbolic-pair bases).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol::Tolerances;
use crate::util::{max_abs, null_space, singular_values};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the zero vector has no causal character")]
    ZeroVector,
    #[error("vectors are linearly dependent")]
    DependentVectors,
    #[error("Gram matrix is not symmetric (residual {0:e})")]
    AsymmetricMetric(f64),
    #[error("Gram matrix is degenerate (smallest singular value {0:e})")]
    DegenerateMetric(f64),
    #[error(
        "declared signature ({p},{q}) does not match the Gram matrix inertia ({found_p},{found_q})"
    )]
    SignatureMismatch {
        p: usize,
        q: usize,
        found_p: usize,
        found_q: usize,
    },
    #[error("map is not self-adjoint (residual {0:e})")]
    NotSelfAdjoint(f64),
    #[error("linear system is singular")]
    SingularSystem,
}

/// Causal character of a vector or of a 2-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalType {
    Spacelike,
    Timelike,
    /// Null vector, or a mixed (Lorentzian) plane.
    Mixed,
    Degenerate,
}

impl CausalType {
    pub fn as_str(self) -> &'static str {
        match self {
            CausalType::Spacelike => "spacelike",
            CausalType::Timelike => "timelike",
            CausalType::Mixed => "mixed",
            CausalType::Degenerate => "degenerate",
        }
    }
}

impl std::str::FromStr for CausalType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spacelike" => Ok(CausalType::Spacelike),
            "timelike" => Ok(CausalType::Timelike),
            "mixed" | "null" => Ok(CausalType::Mixed),
            "degenerate" => Ok(CausalType::Degenerate),
            other => Err(format!("unknown causal class `{other}`")),
        }
    }
}

impl std::fmt::Display for CausalType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A finite-dimensional real inner-product space of signature `(p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductSpace {
    p: usize,
    q: usize,
    gram: Matrix,
    gram_inv: Matrix,
}

impl InnerProductSpace {
    /// The normalized frame: `p` timelike vectors followed by `q` spacelike ones.
    pub fn canonical(p: usize, q: usize) -> Self {
        let n = p + q;
        let gram = Matrix::from_fn(n, n, |i, j| match (i == j, i < p) {
            (true, true) => -1.0,
            (true, false) => 1.0,
            _ => 0.0,
        });
        Self {
            p,
            q,
            gram_inv: gram.clone(),
            gram,
        }
    }

    /// Accepts any symmetric nondegenerate Gram matrix; the signature is read
    /// off its eigenvalues.
    pub fn from_gram(gram: Matrix) -> Result<Self, LinalgError> {
        let n = gram.nrows();
        if gram.ncols() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: gram.ncols(),
            });
        }
        let scale = max_abs(&gram).max(f64::MIN_POSITIVE);
        let asym = max_abs(&(&gram - gram.transpose()));
        if asym > 1e-12 * scale {
            return Err(LinalgError::AsymmetricMetric(asym));
        }
        // Exactly symmetric storage keeps `inner` exactly symmetric.
        let gram = (&gram + gram.transpose()) * 0.5;
        let sv = singular_values(&gram);
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if n > 0 && (smax == 0.0 || smin <= 1e-8 * smax) {
            return Err(LinalgError::DegenerateMetric(if n == 0 {
                0.0
            } else {
                smin
            }));
        }
        let eig = gram.clone().symmetric_eigen();
        let p = eig.eigenvalues.iter().filter(|&&x| x < 0.0).count();
        let gram_inv = gram
            .clone()
            .try_inverse()
            .ok_or(LinalgError::DegenerateMetric(smin))?;
        let gram_inv = (&gram_inv + gram_inv.transpose()) * 0.5;
        Ok(Self {
            p,
            q: n - p,
            gram,
            gram_inv,
        })
    }

    /// Like [`from_gram`](Self::from_gram) but also checks the declared signature.
    pub fn with_signature(p: usize, q: usize, gram: Matrix) -> Result<Self, LinalgError> {
        let space = Self::from_gram(gram)?;
        if space.p != p || space.q != q {
            return Err(LinalgError::SignatureMismatch {
                p,
                q,
                found_p: space.p,
                found_q: space.q,
            });
        }
        Ok(space)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn gram_inv(&self) -> &Matrix {
        &self.gram_inv
    }

    /// True when `G` is the normalized diagonal form.
    pub fn is_canonical(&self) -> bool {
        self.gram == Self::canonical(self.p, self.q).gram
    }

    /// Coordinate basis vector `e_i` of the working frame.
    pub fn basis(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    /// `e_{i+1}⁻` in the normalized frame (0-based `i < p`).
    pub fn e_minus(&self, i: usize) -> Vector {
        assert!(
            i < self.p,
            "timelike index {i} out of range for p = {}",
            self.p
        );
        self.basis(i)
    }

    /// `e_{j+1}⁺` in the normalized frame (0-based `j < q`).
    pub fn e_plus(&self, j: usize) -> Vector {
        assert!(
            j < self.q,
            "spacelike index {j} out of range for q = {}",
            self.q
        );
        self.basis(self.p + j)
    }

    fn check_len(&self, x: &Vector) -> Result<(), LinalgError> {
        if x.len() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `(x, y) = xᵀ G y`, evaluated so that swapping the arguments gives a
    /// bit-identical result.
    pub fn inner(&self, x: &Vector, y: &Vector) -> Result<f64, LinalgError> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.inner_unchecked(x, y))
    }

    pub(crate) fn inner_unchecked(&self, x: &Vector, y: &Vector) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.gram[(i, i)] * (x[i] * y[i]);
            for j in (i + 1)..n {
                let g = self.gram[(i, j)];
                if g != 0.0 {
                    acc += g * (x[i] * y[j] + x[j] * y[i]);
                }
            }
        }
        acc
    }

    /// Spacelike, Timelike, or Null (reported as [`CausalType::Mixed`]).
    pub fn causal_character(
        &self,
        x: &Vector,
        tol: &Tolerances,
    ) -> Result<CausalType, LinalgError> {
        self.check_len(x)?;
        let norm2 = x.norm_squared();
        if norm2 == 0.0 {
            return Err(LinalgError::ZeroVector);
        }
        let val = self.inner_unchecked(x, x);
        let thresh = tol.null * norm2 * max_abs(&self.gram);
        Ok(if val > thresh {
            CausalType::Spacelike
        } else if val < -thresh {
            CausalType::Timelike
        } else {
            CausalType::Mixed
        })
    }

    /// Classifies the plane by its induced 2×2 Gram matrix.
    ///
    /// The determinant is compared after dividing by the Euclidean Gram
    /// determinant of the same basis, so the verdict does not depend on which
    /// basis of the plane is supplied.
    pub fn plane_type(
        &self,
        plane: &OrientedPlane,
        tol: &Tolerances,
    ) -> Result<CausalType, LinalgError> {
        self.check_len(&plane.u)?;
        self.check_len(&plane.v)?;
        let edet = plane.euclidean_det();
        if edet <= 1e-16 * plane.u.norm_squared() * plane.v.norm_squared() {
            return Err(LinalgError::DependentVectors);
        }
        let gram = self.plane_gram(plane);
        let ratio = gram.det() / edet / max_abs(&self.gram).powi(2);
        Ok(if ratio > tol.null {
            if gram.uu > 0.0 {
                CausalType::Spacelike
            } else {
                CausalType::Timelike
            }
        } else if ratio < -tol.null {
            CausalType::Mixed
        } else {
            CausalType::Degenerate
        })
    }

    pub fn plane_gram(&self, plane: &OrientedPlane) -> PlaneGram {
        PlaneGram {
            uu: self.inner_unchecked(&plane.u, &plane.u),
            uv: self.inner_unchecked(&plane.u, &plane.v),
            vv: self.inner_unchecked(&plane.v, &plane.v),
        }
    }

    /// Returns `w₁,…,w_k` with `(v_i, w_j) = δ_ij`.
    ///
    /// The inputs are completed to a basis `V` with coordinate vectors; the
    /// dual basis of `V*` is pulled back through `w ↦ (·, w)`, giving
    /// `W = G⁻¹ V⁻ᵀ`.
    pub fn dual_frame(&self, vs: &[Vector], tol: &Tolerances) -> Result<Vec<Vector>, LinalgError> {
        let n = self.dim();
        for v in vs {
            self.check_len(v)?;
        }
        if vs.is_empty() {
            return Ok(Vec::new());
        }
        if vs.len() > n || numerical_rank_of_columns(vs, tol.rank) < vs.len() {
            return Err(LinalgError::DependentVectors);
        }
        let mut cols: Vec<Vector> = vs.to_vec();
        for i in 0..n {
            if cols.len() == n {
                break;
            }
            let mut trial = cols.clone();
            trial.push(self.basis(i));
            if numerical_rank_of_columns(&trial, tol.rank) == trial.len() {
                cols = trial;
            }
        }
        let basis = Matrix::from_columns(&cols);
        let inv_t = basis
            .transpose()
            .lu()
            .try_inverse()
            .ok_or(LinalgError::SingularSystem)?;
        let w = &self.gram_inv * inv_t;
        Ok((0..vs.len()).map(|j| w.column(j).into_owned()).collect())
    }
}

fn numerical_rank_of_columns(cols: &[Vector], rel: f64) -> usize {
    let m = Matrix::from_columns(cols);
    let sv = singular_values(&m);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * smax).count()
}

/// Entries of the induced Gram matrix of an ordered pair `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneGram {
    pub uu: f64,
    pub uv: f64,
    pub vv: f64,
}

impl PlaneGram {
    pub fn det(&self) -> f64 {
        self.uu * self.vv - self.uv * self.uv
    }
}

/// An ordered pair of independent vectors; the order fixes the orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedPlane {
    pub u: Vector,
    pub v: Vector,
}

impl OrientedPlane {
    pub fn new(u: Vector, v: Vector) -> Result<Self, LinalgError> {
        if u.len() != v.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        if numerical_rank_of_columns(&[u.clone(), v.clone()], Tolerances::default().rank) < 2 {
            return Err(LinalgError::DependentVectors);
        }
        Ok(Self { u, v })
    }

    /// `|u|²|v|² − (u·v)²` in coordinates.
    pub fn euclidean_det(&self) -> f64 {
        self.u.norm_squared() * self.v.norm_squared() - self.u.dot(&self.v).powi(2)
    }

    /// Same plane with the opposite orientation.
    pub fn reversed(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    /// `(a u + b v, c u + d v)`; orientation is kept when `ad − bc > 0`.
    pub fn rebased(&self, a: f64, b: f64, c: f64, d: f64) -> Result<Self, LinalgError> {
        Self::new(&self.u * a + &self.v * b, &self.u * c + &self.v * d)
    }
}

/// A linear map `A` with `(Ax, y) = (x, Ay)`, i.e. `AᵀG = GA`.
///
/// Columns of the matrix are the images of the frame vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdjointMap {
    space: InnerProductSpace,
    matrix: Matrix,
}

/// What the metric looks like on the kernel of a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelCausalContent {
    pub has_spacelike: bool,
    pub has_timelike: bool,
    pub totally_isotropic: bool,
}

impl SelfAdjointMap {
    pub fn new(space: InnerProductSpace, matrix: Matrix) -> Result<Self, LinalgError> {
        Self::with_tolerance(space, matrix, &Tolerances::default())
    }

    pub fn with_tolerance(
        space: InnerProductSpace,
        matrix: Matrix,
        tol: &Tolerances,
    ) -> Result<Self, LinalgError> {
        let n = space.dim();
        if matrix.shape() != (n, n) {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        let map = Self { space, matrix };
        let res = map.adjointness_residual();
        let scale = max_abs(&map.matrix).max(1.0) * max_abs(map.space.gram());
        if res > tol.self_adjoint * scale {
            return Err(LinalgError::NotSelfAdjoint(res));
        }
        Ok(map)
    }

    pub fn identity(space: InnerProductSpace) -> Self {
        let n = space.dim();
        Self {
            space,
            matrix: Matrix::identity(n, n),
        }
    }

    pub fn zero(space: InnerProductSpace) -> Self {
        let n = space.dim();
        Self {
            space,
            matrix: Matrix::zeros(n, n),
        }
    }

    /// Builds the map whose metric-lowered form `GA` is the given symmetric
    /// bilinear form; always self-adjoint.
    pub fn from_bilinear(space: InnerProductSpace, form: &Matrix) -> Result<Self, LinalgError> {
        let n = space.dim();
        if form.shape() != (n, n) {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: form.nrows(),
            });
        }
        let sym = (form + form.transpose()) * 0.5;
        let matrix = space.gram_inv() * sym;
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// `max |AᵀG − GA|`.
    pub fn adjointness_residual(&self) -> f64 {
        let g = self.space.gram();
        max_abs(&(self.matrix.transpose() * g - g * &self.matrix))
    }

    /// Symmetric matrix `B = GA`, so that `(Ax, y) = xᵀ B y`.
    pub fn lowered(&self) -> Matrix {
        let b = self.space.gram() * &self.matrix;
        (&b + b.transpose()) * 0.5
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x
    }

    pub fn square(&self) -> Matrix {
        &self.matrix * &self.matrix
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * c,
        }
    }

    /// Orthonormal (in coordinates) basis of the numerical null space; singular
    /// values at or below `rel_tol · σ_max` count as zero.
    pub fn kernel_basis(&self, rel_tol: f64) -> Vec<Vector> {
        kernel_basis(&self.matrix, rel_tol)
    }

    /// Restricts the metric to the kernel and reports its causal content.
    /// An empty kernel is vacuously totally isotropic.
    pub fn kernel_causal_content(&self, tol: &Tolerances) -> KernelCausalContent {
        let basis = self.kernel_basis(tol.rank);
        if basis.is_empty() {
            return KernelCausalContent {
                has_spacelike: false,
                has_timelike: false,
                totally_isotropic: true,
            };
        }
        let k = Matrix::from_columns(&basis);
        let restricted = k.transpose() * self.space.gram() * &k;
        let restricted = (&restricted + restricted.transpose()) * 0.5;
        let eig = restricted.symmetric_eigen();
        let thresh = tol.rank * max_abs(self.space.gram());
        let has_spacelike = eig.eigenvalues.iter().any(|&e| e > thresh);
        let has_timelike = eig.eigenvalues.iter().any(|&e| e < -thresh);
        KernelCausalContent {
            has_spacelike,
            has_timelike,
            totally_isotropic: !has_spacelike && !has_timelike,
        }
    }
}

/// Numerical null space of a square matrix as a list of vectors.
pub fn kernel_basis(m: &Matrix, rel_tol: f64) -> Vec<Vector> {
    let smax = singular_values(m).into_iter().fold(0.0, f64::max);
    let ns = null_space(m, rel_tol * smax);
    (0..ns.ncols()).map(|c| ns.column(c).into_owned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn inner_examples() {
        let s = InnerProductSpace::canonical(1, 1);
        let e = s.e_minus(0);
        assert_eq!(s.inner(&e, &e).unwrap(), -1.0);

        let s = InnerProductSpace::canonical(0, 3);
        let x = Vector::from_vec(vec![1.0, 2.0, 0.0]);
        let y = Vector::from_vec(vec![0.0, 1.0, 1.0]);
        assert_eq!(s.inner(&x, &y).unwrap(), 2.0);

        let s = InnerProductSpace::canonical(2, 2);
        let n = s.e_minus(0) + s.e_plus(0);
        assert_eq!(s.inner(&n, &n).unwrap(), 0.0);
    }

    #[test]
    fn inner_rejects_wrong_length() {
        let s = InnerProductSpace::canonical(1, 2);
        let err = s.inner(&Vector::zeros(2), &Vector::zeros(3)).unwrap_err();
        assert_eq!(
            err,
            LinalgError::DimensionMismatch {
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn causal_character_examples() {
        let s = InnerProductSpace::canonical(1, 2);
        assert_eq!(
            s.causal_character(&s.e_plus(0), &tol()).unwrap(),
            CausalType::Spacelike
        );
        assert_eq!(
            s.causal_character(&s.e_minus(0), &tol()).unwrap(),
            CausalType::Timelike
        );
        let null = s.e_minus(0) + s.e_plus(0);
        assert_eq!(
            s.causal_character(&null, &tol()).unwrap(),
            CausalType::Mixed
        );
        assert_eq!(
            s.causal_character(&Vector::zeros(3), &tol()),
            Err(LinalgError::ZeroVector)
        );
    }

    #[test]
    fn plane_type_examples() {
        let s = InnerProductSpace::canonical(2, 2);
        let sp = OrientedPlane::new(s.e_plus(0), s.e_plus(1)).unwrap();
        assert_eq!(s.plane_type(&sp, &tol()).unwrap(), CausalType::Spacelike);
        let tl = OrientedPlane::new(s.e_minus(0), s.e_minus(1)).unwrap();
        assert_eq!(s.plane_type(&tl, &tol()).unwrap(), CausalType::Timelike);
        let mx = OrientedPlane::new(s.e_minus(0), s.e_plus(0)).unwrap();
        assert_eq!(s.plane_type(&mx, &tol()).unwrap(), CausalType::Mixed);

        // Gram matrix [[0, 0], [0, 1]] has determinant 0.
        let s = InnerProductSpace::canonical(1, 2);
        let dg = OrientedPlane::new(s.e_minus(0) + s.e_plus(0), s.e_plus(1)).unwrap();
        assert_eq!(s.plane_gram(&dg).det(), 0.0);
        assert_eq!(s.plane_type(&dg, &tol()).unwrap(), CausalType::Degenerate);
    }

    #[test]
    fn dependent_plane_is_rejected() {
        let u = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(
            OrientedPlane::new(u.clone(), &u * -2.0),
            Err(LinalgError::DependentVectors)
        );
    }

    #[test]
    fn dual_frame_examples() {
        let s = InnerProductSpace::canonical(0, 2);
        let w = s.dual_frame(&[s.basis(0), s.basis(1)], &tol()).unwrap();
        assert_eq!(w, vec![s.basis(0), s.basis(1)]);

        let s = InnerProductSpace::canonical(1, 1);
        let w = s.dual_frame(&[s.e_minus(0)], &tol()).unwrap();
        assert_eq!(w[0], -s.e_minus(0));
        assert_eq!(s.inner(&s.e_minus(0), &w[0]).unwrap(), 1.0);

        // A null vector still has a dual: any w with (v, w) = 1.
        let v = s.e_minus(0) + s.e_plus(0);
        let w = s.dual_frame(&[v.clone()], &tol()).unwrap();
        assert!((s.inner(&v, &w[0]).unwrap() - 1.0).abs() < 1e-14);
        // The 2×2 hand solution w = ½(−e⁻ + e⁺) pairs to 1 as well.
        let hand = (s.e_plus(0) - s.e_minus(0)) * 0.5;
        assert_eq!(s.inner(&v, &hand).unwrap(), 1.0);
    }

    #[test]
    fn dual_frame_rejects_dependent_inputs() {
        let s = InnerProductSpace::canonical(1, 2);
        let v = s.e_plus(0);
        assert_eq!(
            s.dual_frame(&[v.clone(), v * 3.0], &tol()),
            Err(LinalgError::DependentVectors)
        );
    }

    #[test]
    fn from_gram_reads_signature() {
        // Hyperbolic pair plus one positive direction.
        let g = Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let s = InnerProductSpace::from_gram(g).unwrap();
        assert_eq!((s.p(), s.q()), (1, 2));
        assert!(!s.is_canonical());
        assert!(InnerProductSpace::canonical(1, 2).is_canonical());
    }

    #[test]
    fn from_gram_rejects_bad_input() {
        let g = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            InnerProductSpace::from_gram(g),
            Err(LinalgError::DegenerateMetric(_))
        ));
        let g = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            InnerProductSpace::from_gram(g),
            Err(LinalgError::AsymmetricMetric(_))
        ));
        let g = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            InnerProductSpace::with_signature(1, 1, g),
            Err(LinalgError::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn self_adjoint_validation() {
        let s = InnerProductSpace::canonical(1, 1);
        // Symmetric in coordinates but not G-self-adjoint.
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            SelfAdjointMap::new(s.clone(), a),
            Err(LinalgError::NotSelfAdjoint(_))
        ));
        let a = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(SelfAdjointMap::new(s, a).is_ok());
    }

    #[test]
    fn kernel_basis_examples() {
        let s = InnerProductSpace::canonical(1, 2);
        assert_eq!(SelfAdjointMap::zero(s.clone()).kernel_basis(1e-8).len(), 3);
        assert!(SelfAdjointMap::identity(s).kernel_basis(1e-8).is_empty());
    }

    #[test]
    fn kernel_content_of_projection_onto_spacelike_part() {
        let s = InnerProductSpace::canonical(2, 5);
        let a = Matrix::from_fn(7, 7, |i, j| if i == j && i >= 2 { 1.0 } else { 0.0 });
        let phi = SelfAdjointMap::new(s.clone(), a).unwrap();
        let ker = phi.kernel_basis(1e-8);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            // Spans V⁻: no spacelike components.
            assert!(v.rows(2, 5).norm() < 1e-12);
        }
        let c = phi.kernel_causal_content(&tol());
        assert_eq!(
            c,
            KernelCausalContent {
                has_spacelike: false,
                has_timelike: true,
                totally_isotropic: false
            }
        );
    }

    #[test]
    fn empty_kernel_is_vacuously_isotropic() {
        let s = InnerProductSpace::canonical(1, 2);
        let c = SelfAdjointMap::identity(s).kernel_causal_content(&tol());
        assert_eq!(
            c,
            KernelCausalContent {
                has_spacelike: false,
                has_timelike: false,
                totally_isotropic: true
            }
        );
    }
}
