//! Coordinate metrics, finite-difference curvature and hypersurfaces.
//!
//! All derivatives are second-order central differences. Christoffel symbols
//! use one level of differencing of `g`, the curvature tensor differences the
//! Christoffel symbols once more, so its stencil reaches `2h` from the point.

mod models;
mod verify;

use thiserror::Error;

use crate::classify::ClassifyError;
use crate::curvature::{CurvatureError, CurvatureTensor};
use crate::probe::ProbeError;
use crate::pseudo::{InnerProductSpace, LinalgError, Matrix, SelfAdjointMap, Vector};

pub use models::{
    graph_hypersurface, pseudo_sphere_chart, warped_metric, GraphHypersurface, PseudoSphereChart,
    WarpedConfig, WarpedMetric,
};
pub use verify::{
    verify_model, HypersurfaceConfig, ModelConfig, ModelReport, Normalization, PointReport,
    ProbeSummary, PseudoSphereConfig, StepHalving, SurfaceSpec, VerifyOptions,
};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point {point:?} is outside the domain (needs a margin of {margin})")]
    Domain { point: Vec<f64>, margin: f64 },
    #[error("metric at {point:?}: {source}")]
    Metric {
        point: Vec<f64>,
        source: LinalgError,
    },
    #[error("invalid model: {0}")]
    Config(String),
    #[error("Hessian is singular (smallest singular value {0:e})")]
    SingularHessian(f64),
    #[error("finite-difference step must be positive and finite, got {0}")]
    Step(f64),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

/// A smooth field of symmetric nondegenerate matrices on an open set of
/// coordinate space.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;

    fn in_domain(&self, x: &[f64]) -> bool;

    /// `g(x)`; only called at points inside the domain.
    fn eval(&self, x: &[f64]) -> Matrix;

    /// `g(x)` as an inner-product space, after the domain and
    /// nondegeneracy checks.
    fn metric(&self, x: &[f64]) -> Result<InnerProductSpace, GeometryError> {
        if x.len() != self.dim() || !self.in_domain(x) {
            return Err(GeometryError::Domain {
                point: x.to_vec(),
                margin: 0.0,
            });
        }
        InnerProductSpace::from_gram(self.eval(x)).map_err(|source| GeometryError::Metric {
            point: x.to_vec(),
            source,
        })
    }
}

/// The constant metric of an inner-product space, defined everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantMetric(pub InnerProductSpace);

impl MetricField for ConstantMetric {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.iter().all(|v| v.is_finite())
    }

    fn eval(&self, _x: &[f64]) -> Matrix {
        self.0.gram().clone()
    }
}

/// `Γ_ij^k`, stored with `k` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn max_abs(&self) -> f64 {
        crate::util::max_abs_slice(&self.data)
    }

    /// Largest `|Γ_ij^k − Γ_ji^k|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) - self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }
}

fn check_step(h: f64) -> Result<(), GeometryError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::Step(h))
    }
}

fn shifted(x: &[f64], i: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += d;
    y
}

fn check_margin<M: MetricField + ?Sized>(
    m: &M,
    x: &[f64],
    margin: f64,
) -> Result<(), GeometryError> {
    let ok = x.len() == m.dim()
        && m.in_domain(x)
        && (0..x.len())
            .all(|i| m.in_domain(&shifted(x, i, margin)) && m.in_domain(&shifted(x, i, -margin)));
    if ok {
        Ok(())
    } else {
        Err(GeometryError::Domain {
            point: x.to_vec(),
            margin,
        })
    }
}

fn christoffel_unchecked<M: MetricField + ?Sized>(
    m: &M,
    x: &[f64],
    h: f64,
) -> Result<Christoffel, GeometryError> {
    let n = m.dim();
    let space = m.metric(x)?;
    let mut dg = Vec::with_capacity(n);
    for k in 0..n {
        let plus = m.metric(&shifted(x, k, h))?;
        let minus = m.metric(&shifted(x, k, -h))?;
        dg.push((plus.gram() - minus.gram()) / (2.0 * h));
    }
    // Γ_ijl = ½(∂_j g_il + ∂_i g_jl − ∂_l g_ij), then raise l.
    let ginv = space.gram_inv();
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    let low = 0.5 * (dg[j][(i, l)] + dg[i][(j, l)] - dg[l][(i, j)]);
                    s += low * ginv[(l, k)];
                }
                data[(i * n + j) * n + k] = s;
            }
        }
    }
    Ok(Christoffel { dim: n, data })
}

/// Christoffel symbols of the second kind at `x`.
pub fn christoffel_fd<M: MetricField + ?Sized>(
    m: &M,
    x: &[f64],
    h: f64,
) -> Result<Christoffel, GeometryError> {
    check_step(h)?;
    check_margin(m, x, 2.0 * h)?;
    christoffel_unchecked(m, x, h)
}

/// `R_ijkl = (R(∂_i, ∂_j)∂_k, ∂_l)` at `x`, on the space `(T_xM, g(x))`.
pub fn riemann_fd<M: MetricField + ?Sized>(
    m: &M,
    x: &[f64],
    h: f64,
) -> Result<CurvatureTensor, GeometryError> {
    check_step(h)?;
    check_margin(m, x, 4.0 * h)?;
    let n = m.dim();
    let space = m.metric(x)?;
    let gamma = christoffel_unchecked(m, x, h)?;
    let mut d_gamma = Vec::with_capacity(n);
    for i in 0..n {
        let plus = christoffel_unchecked(m, &shifted(x, i, h), h)?;
        let minus = christoffel_unchecked(m, &shifted(x, i, -h), h)?;
        let d: Vec<f64> = plus
            .data
            .iter()
            .zip(&minus.data)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        d_gamma.push(d);
    }
    let dg = |i: usize, j: usize, k: usize, l: usize| d_gamma[i][(j * n + k) * n + l];
    let g = space.gram().clone();
    let mut up = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut r = dg(i, j, k, l) - dg(j, i, k, l);
                    for s in 0..n {
                        r += gamma.get(i, s, l) * gamma.get(j, k, s)
                            - gamma.get(j, s, l) * gamma.get(i, k, s);
                    }
                    up[((i * n + j) * n + k) * n + l] = r;
                }
            }
        }
    }
    let mut low = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    low[((i * n + j) * n + k) * n + l] = (0..n)
                        .map(|s| up[((i * n + j) * n + k) * n + s] * g[(s, l)])
                        .sum();
                }
            }
        }
    }
    Ok(CurvatureTensor::from_components(space, low)?)
}

/// Fourth-order Richardson combination `(4R(h/2) − R(h))/3` of
/// [`riemann_fd`].
pub fn riemann_richardson<M: MetricField + ?Sized>(
    m: &M,
    x: &[f64],
    h: f64,
) -> Result<CurvatureTensor, GeometryError> {
    let coarse = riemann_fd(m, x, h)?;
    let fine = riemann_fd(m, x, 0.5 * h)?;
    Ok(CurvatureTensor::linear_combine(
        &[4.0 / 3.0, -1.0 / 3.0],
        &[&fine, &coarse],
    )?)
}

/// A hypersurface `F` of a pseudo-Euclidean space with a unit normal.
pub trait Immersion: Sync {
    fn ambient(&self) -> &InnerProductSpace;

    /// Number of coordinates, one less than the ambient dimension.
    fn dim(&self) -> usize;

    fn in_domain(&self, x: &[f64]) -> bool;

    fn embed(&self, x: &[f64]) -> Vector;

    /// Columns `∂_i F`.
    fn tangent(&self, x: &[f64]) -> Matrix;

    /// `ν(x)` with `(ν, ν) = ±1`.
    fn normal(&self, x: &[f64]) -> Vector;
}

/// The pulled-back metric `g = (∂F)ᵀ G (∂F)` of an immersion.
#[derive(Debug, Clone, Copy)]
pub struct InducedMetric<'a, I: Immersion + ?Sized>(pub &'a I);

impl<I: Immersion + ?Sized> MetricField for InducedMetric<'_, I> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.0.in_domain(x)
    }

    fn eval(&self, x: &[f64]) -> Matrix {
        let j = self.0.tangent(x);
        let g = j.transpose() * self.0.ambient().gram() * &j;
        (&g + g.transpose()) * 0.5
    }
}

/// Output of [`hypersurface_curvature`].
#[derive(Debug, Clone)]
pub struct HypersurfaceCurvature {
    /// `(ν, ν)·R_S`.
    pub tensor: CurvatureTensor,
    pub shape: SelfAdjointMap,
    pub nu_nu: f64,
    /// Largest `|(ν, ∂_iF)|`.
    pub normal_residual: f64,
}

/// Curvature through the shape operator: `L_ij = (∂_i∂_jF, ν)` by central
/// differences, `S = g⁻¹L`, and `(ν, ν)·R_S`.
pub fn hypersurface_curvature<I: Immersion + ?Sized>(
    im: &I,
    x: &[f64],
    h: f64,
) -> Result<HypersurfaceCurvature, GeometryError> {
    check_step(h)?;
    let induced = InducedMetric(im);
    check_margin(&induced, x, 2.0 * h)?;
    let space = induced.metric(x)?;
    let n = im.dim();
    let ambient = im.ambient();
    let nu = im.normal(x);
    let nu_nu = ambient
        .inner(&nu, &nu)
        .map_err(|source| GeometryError::Metric {
            point: x.to_vec(),
            source,
        })?;
    let tangent = im.tangent(x);
    let gnu = ambient.gram() * &nu;
    let normal_residual = (tangent.transpose() * &gnu).amax();

    let f = |y: Vec<f64>| im.embed(&y);
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let second = if i == j {
                (f(shifted(x, i, h)) - im.embed(x) * 2.0 + f(shifted(x, i, -h))) / (h * h)
            } else {
                let pp = f(shifted(&shifted(x, i, h), j, h));
                let pm = f(shifted(&shifted(x, i, h), j, -h));
                let mp = f(shifted(&shifted(x, i, -h), j, h));
                let mm = f(shifted(&shifted(x, i, -h), j, -h));
                (pp - pm - mp + mm) / (4.0 * h * h)
            };
            let v = second.dot(&gnu);
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    let shape =
        SelfAdjointMap::from_bilinear(space, &l).map_err(|source| GeometryError::Metric {
            point: x.to_vec(),
            source,
        })?;
    let tensor = CurvatureTensor::from_phi(&shape).scaled(nu_nu);
    Ok(HypersurfaceCurvature {
        tensor,
        shape,
        nu_nu,
        normal_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(r: usize, s: usize, rho: f64) -> PseudoSphereChart {
        pseudo_sphere_chart(r, s, rho, 1, None).unwrap()
    }

    /// `Γ_ab^c = σ ∂_a∂_b v (g⁻¹∇v)^c` for a graph `v_k = v(y)` over the
    /// other coordinates, with `σ = G_kk`.
    fn graph_christoffel(r: usize, s: usize, rho: f64, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        let amb = InnerProductSpace::canonical(r, s);
        let big: Vec<f64> = (0..=n).map(|i| amb.gram()[(i, i)]).collect();
        let (ga, sigma) = (&big[..n], big[n]);
        let rest: f64 = (0..n).map(|a| ga[a] * y[a] * y[a]).sum();
        let v = ((1.0 / (rho * rho) - rest) / sigma).sqrt();
        let dv: Vec<f64> = (0..n).map(|a| -ga[a] * y[a] / (sigma * v)).collect();
        let ddv = |a: usize, b: usize| {
            let diag = if a == b { -ga[a] / (sigma * v) } else { 0.0 };
            diag + ga[a] * y[a] * dv[b] / (sigma * v * v)
        };
        let g = Matrix::from_fn(n, n, |a, b| {
            (if a == b { ga[a] } else { 0.0 }) + sigma * dv[a] * dv[b]
        });
        let up = g.try_inverse().unwrap() * Vector::from_vec(dv.clone());
        let mut out = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out[(a * n + b) * n + c] = sigma * ddv(a, b) * up[c];
                }
            }
        }
        out
    }

    #[test]
    fn flat_metric_has_no_connection_or_curvature() {
        let m = ConstantMetric(InnerProductSpace::canonical(1, 3));
        let x = [0.3, -0.2, 0.1, 0.5];
        assert!(christoffel_fd(&m, &x, 1e-3).unwrap().max_abs() <= 1e-12);
        assert!(riemann_fd(&m, &x, 1e-3).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn sphere_christoffels_match_graph_formula() {
        for (r, s, rho) in [(0, 3, 1.0), (1, 2, 1.0), (2, 3, 2.0)] {
            let chart = sphere(r, s, rho);
            let n = r + s - 1;
            let y: Vec<f64> = (0..n).map(|a| 0.1 / rho * (1.0 - 0.4 * a as f64)).collect();
            let fd = christoffel_fd(&chart, &y, 1e-4).unwrap();
            let exact = graph_christoffel(r, s, rho, &y);
            let scale = exact.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
            for (i, e) in exact.iter().enumerate() {
                assert!(
                    (fd.data[i] - e).abs() <= 1e-6 * scale,
                    "({r},{s}) index {i}"
                );
            }
            assert!(fd.asymmetry() <= 1e-12);
        }
    }

    #[test]
    fn sphere_curvature_is_constant() {
        let chart = sphere(1, 2, 1.0);
        let r = riemann_fd(&chart, &[0.1, -0.05], 1e-3).unwrap();
        let id = CurvatureTensor::identity(r.space().clone());
        assert!(r.max_abs_diff(&id).unwrap() <= 1e-5);
    }

    #[test]
    fn riemann_error_is_second_order() {
        let chart = sphere(1, 2, 1.0);
        let x = [0.12, -0.07];
        let err = |h: f64| {
            let r = riemann_fd(&chart, &x, h).unwrap();
            r.max_abs_diff(&CurvatureTensor::identity(r.space().clone()))
                .unwrap()
        };
        let ratio = err(4e-3) / err(2e-3);
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
        let rich = riemann_richardson(&chart, &x, 4e-3).unwrap();
        let rich_err = rich
            .max_abs_diff(&CurvatureTensor::identity(rich.space().clone()))
            .unwrap();
        assert!(rich_err < err(2e-3) / 10.0);
    }

    #[test]
    fn bad_steps_and_margins_are_rejected() {
        let chart = sphere(0, 3, 1.0);
        for h in [0.0, -1e-3, f64::NAN] {
            assert!(matches!(
                riemann_fd(&chart, &[0.0, 0.0], h),
                Err(GeometryError::Step(_))
            ));
        }
        assert!(matches!(
            riemann_fd(&chart, &[0.99, 0.0], 1e-2),
            Err(GeometryError::Domain { .. })
        ));
        assert!(matches!(
            riemann_fd(&chart, &[0.0], 1e-3),
            Err(GeometryError::Domain { .. })
        ));
    }

    struct AffinePlane(InnerProductSpace);

    impl Immersion for AffinePlane {
        fn ambient(&self) -> &InnerProductSpace {
            &self.0
        }
        fn dim(&self) -> usize {
            2
        }
        fn in_domain(&self, _x: &[f64]) -> bool {
            true
        }
        fn embed(&self, x: &[f64]) -> Vector {
            Vector::from_vec(vec![x[0] + 0.5 * x[1], x[1], 2.0])
        }
        fn tangent(&self, _x: &[f64]) -> Matrix {
            Matrix::from_row_slice(3, 2, &[1.0, 0.5, 0.0, 1.0, 0.0, 0.0])
        }
        fn normal(&self, _x: &[f64]) -> Vector {
            Vector::from_vec(vec![0.0, 0.0, 1.0])
        }
    }

    #[test]
    fn affine_plane_is_totally_geodesic() {
        let plane = AffinePlane(InnerProductSpace::canonical(1, 2));
        let hc = hypersurface_curvature(&plane, &[0.3, 0.4], 1e-3).unwrap();
        assert!(hc.shape.matrix().amax() <= 1e-9);
        assert!(hc.tensor.max_abs() <= 1e-12);
        assert_eq!(hc.nu_nu, 1.0);
        assert_eq!(hc.normal_residual, 0.0);
    }

    #[test]
    fn sphere_gauss_equation_holds() {
        let chart = sphere(2, 2, 1.0);
        let x = [0.05, -0.1, 0.08];
        let hc = hypersurface_curvature(&chart, &x, 1e-3).unwrap();
        let intrinsic = riemann_fd(&InducedMetric(&chart), &x, 1e-3).unwrap();
        assert!(intrinsic.max_abs_diff(&hc.tensor).unwrap() <= 1e-5);
        assert!(hc.normal_residual <= 1e-12);
    }
}
