//! Algebraic curvature tensors and the skew-symmetric curvature operator.
//!
//! Components are stored densely with `R[i][j][k][l] = R(e_i, e_j, e_k, e_l)`
//! and `R(x, y, z, w) = (R(x, y)z, w)`, so the operator matrix is obtained by
//! raising the last slot with `G⁻¹`.

use thiserror::Error;

use crate::pseudo::{
    CausalType, InnerProductSpace, LinalgError, Matrix, OrientedPlane, SelfAdjointMap, Vector,
};
use crate::tol::Tolerances;
use crate::util::max_abs_slice;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error("plane is degenerate; the normalized operator is undefined")]
    DegeneratePlane,
    #[error("tensors live on different spaces")]
    MixedSpaces,
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("coefficient list has {coeffs} entries for {tensors} tensors")]
    CoefficientCount { coeffs: usize, tensors: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Dense rank-4 tensor on an inner-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    space: InnerProductSpace,
    data: Vec<f64>,
}

/// Largest residual of each curvature identity over all index quadruples.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SymmetryReport {
    pub pair_symmetry: f64,
    pub antisymmetry: f64,
    pub bianchi1: f64,
    /// `max |R|`, for turning the residuals into relative ones.
    pub scale: f64,
}

impl SymmetryReport {
    pub fn max_residual(&self) -> f64 {
        self.pair_symmetry.max(self.antisymmetry).max(self.bianchi1)
    }

    /// Worst residual divided by `max |R|` (zero for the zero tensor).
    pub fn max_relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.max_residual()
        } else {
            self.max_residual() / self.scale
        }
    }
}

/// Matrix of `z ↦ R(π)z` in the working frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureOperator {
    pub matrix: Matrix,
    pub plane: OrientedPlane,
}

impl CurvatureOperator {
    /// `max |MᵀG + GM|`, zero for a skew-adjoint operator.
    pub fn skew_residual(&self, space: &InnerProductSpace) -> f64 {
        let g = space.gram();
        let r = self.matrix.transpose() * g + g * &self.matrix;
        r.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
    }
}

impl CurvatureTensor {
    pub fn zeros(space: InnerProductSpace) -> Self {
        let n = space.dim();
        Self {
            space,
            data: vec![0.0; n * n * n * n],
        }
    }

    /// Wraps raw components in `ijkl` row-major order. No symmetry check is
    /// done here; see [`validate`](Self::validate).
    pub fn from_components(
        space: InnerProductSpace,
        data: Vec<f64>,
    ) -> Result<Self, CurvatureError> {
        let n = space.dim();
        if data.len() != n * n * n * n {
            return Err(CurvatureError::ComponentCount {
                expected: n * n * n * n,
                found: data.len(),
            });
        }
        Ok(Self { space, data })
    }

    /// `R_φ(x,y,z,w) = (φy,z)(φx,w) − (φx,z)(φy,w)`.
    pub fn from_phi(phi: &SelfAdjointMap) -> Self {
        let space = phi.space().clone();
        let n = space.dim();
        let b = phi.lowered();
        let sign = if cfg!(feature = "mutation-sign-flip") {
            1.0
        } else {
            -1.0
        };
        let mut data = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data[((i * n + j) * n + k) * n + l] =
                            b[(j, k)] * b[(i, l)] + sign * b[(i, k)] * b[(j, l)];
                    }
                }
            }
        }
        Self { space, data }
    }

    /// `R_id`, the constant-curvature-one tensor.
    pub fn identity(space: InnerProductSpace) -> Self {
        Self::from_phi(&SelfAdjointMap::identity(space))
    }

    /// `Σ c_i R_i` over tensors sharing one space.
    pub fn linear_combine(
        coeffs: &[f64],
        tensors: &[&CurvatureTensor],
    ) -> Result<Self, CurvatureError> {
        if coeffs.len() != tensors.len() {
            return Err(CurvatureError::CoefficientCount {
                coeffs: coeffs.len(),
                tensors: tensors.len(),
            });
        }
        let first = tensors.first().ok_or(CurvatureError::CoefficientCount {
            coeffs: 0,
            tensors: 0,
        })?;
        let mut out = Self::zeros(first.space.clone());
        for (c, t) in coeffs.iter().zip(tensors) {
            if t.space != out.space {
                return Err(CurvatureError::MixedSpaces);
            }
            for (o, x) in out.data.iter_mut().zip(&t.data) {
                *o += c * x;
            }
        }
        Ok(out)
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn components(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim();
        self.data[((i * n + j) * n + k) * n + l]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_slice(&self.data)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            space: self.space.clone(),
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// `max |self − other|`, componentwise.
    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> Result<f64, CurvatureError> {
        if self.data.len() != other.data.len() {
            return Err(CurvatureError::MixedSpaces);
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs())))
    }

    /// Frobenius inner product of the component arrays.
    pub fn dot(&self, other: &CurvatureTensor) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Same components on a different space of the same dimension.
    pub fn with_space(self, space: InnerProductSpace) -> Result<Self, CurvatureError> {
        if space.dim() != self.dim() {
            return Err(CurvatureError::MixedSpaces);
        }
        Ok(Self {
            space,
            data: self.data,
        })
    }

    /// Multilinear evaluation `R(x, y, z, w)`.
    pub fn eval(&self, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let xyz = xy * z[k];
                    if xyz == 0.0 {
                        continue;
                    }
                    let base = ((i * n + j) * n + k) * n;
                    for l in 0..n {
                        acc += xyz * w[l] * self.data[base + l];
                    }
                }
            }
        }
        acc
    }

    /// Matrix of `z ↦ R(x, y)z` (unnormalized).
    pub fn operator_matrix(&self, x: &Vector, y: &Vector) -> Matrix {
        let n = self.dim();
        // lowered[m][k] = R(x, y, e_k, e_m)
        let mut lowered = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let base = ((i * n + j) * n + k) * n;
                    for m in 0..n {
                        lowered[(m, k)] += xy * self.data[base + m];
                    }
                }
            }
        }
        self.space.gram_inv() * lowered
    }

    /// The skew-symmetric curvature operator
    /// `R(π) = |(u,u)(v,v) − (u,v)²|^{−1/2} R(u, v)`.
    pub fn curvature_operator(
        &self,
        plane: &OrientedPlane,
        tol: &Tolerances,
    ) -> Result<CurvatureOperator, CurvatureError> {
        if self.space.plane_type(plane, tol)? == CausalType::Degenerate {
            return Err(CurvatureError::DegeneratePlane);
        }
        let det = self.space.plane_gram(plane).det();
        let matrix = self.operator_matrix(&plane.u, &plane.v) / det.abs().sqrt();
        Ok(CurvatureOperator {
            matrix,
            plane: plane.clone(),
        })
    }

    /// `R(u, v, v, u) / ((u,u)(v,v) − (u,v)²)`.
    pub fn sectional_curvature(
        &self,
        plane: &OrientedPlane,
        tol: &Tolerances,
    ) -> Result<f64, CurvatureError> {
        if self.space.plane_type(plane, tol)? == CausalType::Degenerate {
            return Err(CurvatureError::DegeneratePlane);
        }
        let det = self.space.plane_gram(plane).det();
        Ok(self.eval(&plane.u, &plane.v, &plane.v, &plane.u) / det)
    }

    pub fn validate(&self) -> SymmetryReport {
        let n = self.dim();
        let mut pair = 0.0_f64;
        let mut anti = 0.0_f64;
        let mut bianchi = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        pair = pair.max((r - self.get(k, l, i, j)).abs());
                        anti = anti
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs());
                        bianchi =
                            bianchi.max((r + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        SymmetryReport {
            pair_symmetry: pair,
            antisymmetry: anti,
            bianchi1: bianchi,
            scale: self.max_abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudo::Matrix;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// `R_φ(x,y)z = (φy,z)φx − (φx,z)φy`, straight from the vector formula.
    fn phi_operator_oracle(phi: &SelfAdjointMap, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let s = phi.space();
        let px = phi.apply(x);
        let py = phi.apply(y);
        &px * s.inner(&py, z).unwrap() - &py * s.inner(&px, z).unwrap()
    }

    #[test]
    fn identity_tensor_entry() {
        let r = CurvatureTensor::identity(InnerProductSpace::canonical(0, 3));
        assert_eq!(r.get(0, 1, 1, 0), 1.0);
        assert_eq!(r.get(0, 1, 0, 1), -1.0);
        assert_eq!(r.get(0, 0, 1, 1), 0.0);
    }

    #[test]
    fn zero_phi_gives_zero_tensor() {
        let r =
            CurvatureTensor::from_phi(&SelfAdjointMap::zero(InnerProductSpace::canonical(1, 2)));
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn operator_matches_vector_formula() {
        let s = InnerProductSpace::canonical(2, 3);
        let b = Matrix::from_fn(5, 5, |i, j| {
            ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 0.5 } else { 0.0 }
        });
        let b = &b + b.transpose();
        let phi = SelfAdjointMap::from_bilinear(s.clone(), &b).unwrap();
        let r = CurvatureTensor::from_phi(&phi);
        let x = Vector::from_vec(vec![1.0, -0.5, 0.3, 2.0, 0.1]);
        let y = Vector::from_vec(vec![0.2, 1.0, -1.0, 0.0, 0.7]);
        let m = r.operator_matrix(&x, &y);
        for k in 0..5 {
            let z = s.basis(k);
            let expected = phi_operator_oracle(&phi, &x, &y, &z);
            assert!((m.column(k) - expected).amax() < 1e-12);
        }
    }

    #[test]
    fn linear_combination_examples() {
        let s = InnerProductSpace::canonical(3, 3);
        let id = CurvatureTensor::identity(s.clone());
        let zero = CurvatureTensor::linear_combine(&[0.0], &[&id]).unwrap();
        assert_eq!(zero.max_abs(), 0.0);

        let b = Matrix::from_fn(6, 6, |i, j| if i + j == 5 { 1.0 } else { 0.0 });
        let phi = SelfAdjointMap::from_bilinear(s.clone(), &b).unwrap();
        let r = CurvatureTensor::from_phi(&phi);
        // R_φ is quadratic in φ: R_{−φ} = R_φ, while −1·R_φ flips every component.
        let neg = CurvatureTensor::linear_combine(&[-1.0], &[&r]).unwrap();
        let r_neg_phi = CurvatureTensor::from_phi(&phi.scaled(-1.0));
        assert_eq!(r_neg_phi, r);
        assert!(neg.max_abs_diff(&r_neg_phi).unwrap() > 0.5);

        let other = CurvatureTensor::identity(InnerProductSpace::canonical(2, 4));
        assert_eq!(
            CurvatureTensor::linear_combine(&[1.0, 1.0], &[&id, &other]),
            Err(CurvatureError::MixedSpaces)
        );
    }

    #[test]
    fn rotation_generator_on_euclidean_plane() {
        let s = InnerProductSpace::canonical(0, 3);
        let r = CurvatureTensor::identity(s.clone());
        let plane = OrientedPlane::new(s.basis(0), s.basis(1)).unwrap();
        let op = r.curvature_operator(&plane, &tol()).unwrap();
        let expected =
            Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(op.matrix, expected);

        let rev = r.curvature_operator(&plane.reversed(), &tol()).unwrap();
        assert_eq!(rev.matrix, -expected);
    }

    #[test]
    fn degenerate_plane_is_an_error() {
        let s = InnerProductSpace::canonical(1, 5);
        let r = CurvatureTensor::identity(s.clone());
        let plane = OrientedPlane::new(s.e_minus(0) + s.e_plus(0), s.e_plus(1)).unwrap();
        assert_eq!(
            r.curvature_operator(&plane, &tol()),
            Err(CurvatureError::DegeneratePlane)
        );
        assert_eq!(
            r.sectional_curvature(&plane, &tol()),
            Err(CurvatureError::DegeneratePlane)
        );
    }

    #[test]
    fn sectional_curvature_examples() {
        let s = InnerProductSpace::canonical(2, 2);
        let r = CurvatureTensor::identity(s.clone());
        // Mixed plane: R(u,v,v,u) = −1 over Gram determinant −1.
        let mixed = OrientedPlane::new(s.e_minus(0), s.e_plus(0)).unwrap();
        assert_eq!(r.sectional_curvature(&mixed, &tol()).unwrap(), 1.0);

        let k = r.scaled(-2.5);
        let plane = OrientedPlane::new(s.e_plus(0) + s.e_minus(1) * 0.3, s.e_plus(1)).unwrap();
        assert!((k.sectional_curvature(&plane, &tol()).unwrap() + 2.5).abs() < 1e-14);

        let z = CurvatureTensor::zeros(s);
        assert_eq!(z.sectional_curvature(&plane, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn validate_detects_corruption() {
        let s = InnerProductSpace::canonical(1, 2);
        assert_eq!(
            CurvatureTensor::zeros(s.clone()).validate().max_residual(),
            0.0
        );

        let r = CurvatureTensor::identity(s.clone());
        assert!(r.validate().max_relative() <= 1e-12);
        let mut data = r.components().to_vec();
        data[((0 * 3 + 1) * 3 + 1) * 3] += 1.0;
        let r = CurvatureTensor::from_components(s, data).unwrap();
        assert!(r.validate().antisymmetry >= 0.5);
    }

    #[test]
    fn component_count_checked() {
        let s = InnerProductSpace::canonical(0, 2);
        assert_eq!(
            CurvatureTensor::from_components(s, vec![0.0; 3]),
            Err(CurvatureError::ComponentCount {
                expected: 16,
                found: 3
            })
        );
    }
}
