//! Pseudo-spheres, quadratic warped products and the nilpotent graph
//! hypersurface.

use serde::{Deserialize, Serialize};

use super::{GeometryError, Immersion, MetricField};
use crate::pseudo::{InnerProductSpace, Matrix, SelfAdjointMap, Vector};
use crate::util::singular_values;

/// The radicand must stay above this fraction of `ϱ⁻²` inside the chart.
const HORIZON: f64 = 1e-2;

/// Graph chart of `S^δ(r,s;ϱ) = {(v,v) = δϱ⁻²}` in the canonical space of
/// signature `(r,s)`: coordinate `solve_index` is solved for (positive
/// branch), the other `r + s − 1` ambient coordinates are the chart
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSphereChart {
    ambient: InnerProductSpace,
    rho: f64,
    delta: f64,
    solve: usize,
}

pub fn pseudo_sphere_chart(
    r: usize,
    s: usize,
    rho: f64,
    delta: i8,
    solve_index: Option<usize>,
) -> Result<PseudoSphereChart, GeometryError> {
    if r + s < 2 {
        return Err(GeometryError::Config(format!(
            "pseudo-sphere needs r + s ≥ 2, got ({r},{s})"
        )));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(GeometryError::Config(format!(
            "rho must be positive, got {rho}"
        )));
    }
    let delta = sign(delta, "delta")?;
    let solve = solve_index.unwrap_or(if delta > 0.0 { r + s - 1 } else { 0 });
    if solve >= r + s {
        return Err(GeometryError::Config(format!(
            "solve_index {solve} out of range for dimension {}",
            r + s
        )));
    }
    let chart = PseudoSphereChart {
        ambient: InnerProductSpace::canonical(r, s),
        rho,
        delta,
        solve,
    };
    let centre = vec![0.0; r + s - 1];
    if chart.radicand(&centre) <= HORIZON / (rho * rho) {
        return Err(GeometryError::Config(format!(
            "the quadric (v,v) = {}ϱ⁻² cannot be solved for coordinate {solve} near the chart centre",
            if delta > 0.0 { "+" } else { "−" }
        )));
    }
    Ok(chart)
}

pub(crate) fn sign(v: i8, name: &str) -> Result<f64, GeometryError> {
    match v {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(GeometryError::Config(format!("{name} must be ±1, got {v}"))),
    }
}

impl PseudoSphereChart {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Curvature of the quadric in the convention `R = κ·R_id`.
    pub fn curvature(&self) -> f64 {
        self.delta * self.rho * self.rho
    }

    fn ambient_index(&self, a: usize) -> usize {
        if a < self.solve {
            a
        } else {
            a + 1
        }
    }

    fn g(&self, i: usize) -> f64 {
        self.ambient.gram()[(i, i)]
    }

    /// `v_k²` for the solved coordinate `k`.
    fn radicand(&self, x: &[f64]) -> f64 {
        let rest: f64 = x
            .iter()
            .enumerate()
            .map(|(a, &y)| self.g(self.ambient_index(a)) * y * y)
            .sum();
        (self.delta / (self.rho * self.rho) - rest) / self.g(self.solve)
    }

    fn solved(&self, x: &[f64]) -> f64 {
        self.radicand(x).sqrt()
    }
}

impl Immersion for PseudoSphereChart {
    fn ambient(&self) -> &InnerProductSpace {
        &self.ambient
    }

    fn dim(&self) -> usize {
        self.ambient.dim() - 1
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == Immersion::dim(self)
            && x.iter().all(|v| v.is_finite())
            && self.radicand(x) > HORIZON / (self.rho * self.rho)
    }

    fn embed(&self, x: &[f64]) -> Vector {
        let mut v = Vector::zeros(self.ambient.dim());
        for (a, &y) in x.iter().enumerate() {
            v[self.ambient_index(a)] = y;
        }
        v[self.solve] = self.solved(x);
        v
    }

    fn tangent(&self, x: &[f64]) -> Matrix {
        let m = Immersion::dim(self);
        let vk = self.solved(x);
        let gk = self.g(self.solve);
        let mut t = Matrix::zeros(m + 1, m);
        for (a, &y) in x.iter().enumerate() {
            let i = self.ambient_index(a);
            t[(i, a)] = 1.0;
            t[(self.solve, a)] = -self.g(i) * y / (gk * vk);
        }
        t
    }

    /// `ϱ·F`, so that `(ν, ν) = δ`.
    fn normal(&self, x: &[f64]) -> Vector {
        self.embed(x) * self.rho
    }
}

impl MetricField for PseudoSphereChart {
    fn dim(&self) -> usize {
        Immersion::dim(self)
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        Immersion::in_domain(self, x)
    }

    fn eval(&self, x: &[f64]) -> Matrix {
        super::InducedMetric(self).eval(x)
    }
}

/// `ds² = ε dt² + f(t)·ds²_{S^δ(r,s;ϱ)}` with `f(t) = εκt² + At + B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpedConfig {
    pub eps: i8,
    pub delta: i8,
    pub kappa: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub fiber: [usize; 2],
    pub rho: f64,
    /// Working interval; every verification point must lie in it.
    pub interval: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve_index: Option<usize>,
    /// Fiber chart coordinates of the verification points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_point: Option<Vec<f64>>,
    /// Values of `t` at which to verify.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
}

impl WarpedConfig {
    /// `ε = δ = κ = B = 1`, `A = 0` over the fiber `S⁺(1,2;1)`.
    pub fn demo() -> Self {
        Self {
            eps: 1,
            delta: 1,
            kappa: 1.0,
            a: 0.0,
            b: 1.0,
            fiber: [1, 2],
            rho: 1.0,
            interval: [-1.0, 1.0],
            solve_index: None,
            fiber_point: None,
            t: Some(vec![0.0, 0.5, 1.0]),
        }
    }
}

/// The warped product as a single coordinate metric in `(t, x_1, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedMetric {
    cfg: WarpedConfig,
    eps: f64,
    fiber: PseudoSphereChart,
    /// Largest open interval around the working interval where `f ≠ 0`.
    domain: (f64, f64),
}

pub fn warped_metric(cfg: &WarpedConfig) -> Result<WarpedMetric, GeometryError> {
    let eps = sign(cfg.eps, "eps")?;
    let [r, s] = cfg.fiber;
    let fiber = pseudo_sphere_chart(r, s, cfg.rho, cfg.delta, cfg.solve_index)?;
    let fiber_kappa = fiber.curvature();
    if (cfg.kappa - fiber_kappa).abs() > 1e-12 * cfg.kappa.abs().max(1.0) {
        return Err(GeometryError::Config(format!(
            "kappa = {} must equal the fiber curvature δϱ² = {fiber_kappa}",
            cfg.kappa
        )));
    }
    let disc = cfg.a * cfg.a - 4.0 * eps * cfg.kappa * cfg.b;
    let scale = (cfg.a * cfg.a)
        .max((4.0 * cfg.kappa * cfg.b).abs())
        .max(f64::MIN_POSITIVE);
    if disc.abs() <= 1e-12 * scale {
        return Err(GeometryError::Config(format!(
            "A² − 4εκB = {disc}; the metric has constant curvature"
        )));
    }
    let [t0, t1] = cfg.interval;
    if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
        return Err(GeometryError::Config(format!(
            "interval [{t0}, {t1}] is empty"
        )));
    }
    let lead = eps * cfg.kappa;
    let mut roots = Vec::new();
    if lead == 0.0 {
        if cfg.a != 0.0 {
            roots.push(-cfg.b / cfg.a);
        }
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        roots.push((-cfg.a - sq) / (2.0 * lead));
        roots.push((-cfg.a + sq) / (2.0 * lead));
    }
    if let Some(z) = roots.iter().find(|&&z| z >= t0 && z <= t1) {
        return Err(GeometryError::Config(format!(
            "f vanishes at t = {z} inside the working interval"
        )));
    }
    let lo = roots
        .iter()
        .copied()
        .filter(|&z| z < t0)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = roots
        .iter()
        .copied()
        .filter(|&z| z > t1)
        .fold(f64::INFINITY, f64::min);
    Ok(WarpedMetric {
        cfg: cfg.clone(),
        eps,
        fiber,
        domain: (lo, hi),
    })
}

impl WarpedMetric {
    pub fn config(&self) -> &WarpedConfig {
        &self.cfg
    }

    pub fn fiber(&self) -> &PseudoSphereChart {
        &self.fiber
    }

    pub fn f(&self, t: f64) -> f64 {
        (self.eps * self.cfg.kappa * t + self.cfg.a) * t + self.cfg.b
    }

    pub fn f_t(&self, t: f64) -> f64 {
        2.0 * self.eps * self.cfg.kappa * t + self.cfg.a
    }

    /// `C(t) = f⁻²(fκ − ¼εf_t²)`.
    pub fn c(&self, t: f64) -> f64 {
        let f = self.f(t);
        let ft = self.f_t(t);
        (f * self.cfg.kappa - 0.25 * self.eps * ft * ft) / (f * f)
    }

    /// `φ(∂_t) = ∂_t`, `φ = −id` on the fiber, on `(T_xM, g(x))`.
    pub fn phi(&self, x: &[f64]) -> Result<SelfAdjointMap, GeometryError> {
        let space = self.metric(x)?;
        let n = space.dim();
        let d = Vector::from_fn(n, |i, _| if i == 0 { 1.0 } else { -1.0 });
        let form = space.gram() * Matrix::from_diagonal(&d);
        SelfAdjointMap::from_bilinear(space, &form).map_err(|source| GeometryError::Metric {
            point: x.to_vec(),
            source,
        })
    }

    /// Whether `t` lies in the closed working interval.
    pub fn in_interval(&self, t: f64) -> bool {
        t >= self.cfg.interval[0] && t <= self.cfg.interval[1]
    }
}

impl MetricField for WarpedMetric {
    fn dim(&self) -> usize {
        self.cfg.fiber[0] + self.cfg.fiber[1]
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == MetricField::dim(self)
            && x[0] > self.domain.0
            && x[0] < self.domain.1
            && MetricField::in_domain(&self.fiber, &x[1..])
    }

    fn eval(&self, x: &[f64]) -> Matrix {
        let n = MetricField::dim(self);
        let mut g = Matrix::zeros(n, n);
        g[(0, 0)] = self.eps;
        let f = self.f(x[0]);
        let fib = self.fiber.eval(&x[1..]);
        g.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(fib * f));
        g
    }
}

/// `F(x, x̃) = (x, x̃, f(x̃))` with `f(x̃) = ½ x̃ᵀHx̃`, in the space with
/// `(e_i, ẽ_j) = δ_ij`, `(e_i, e_j) = (ẽ_i, ẽ_j) = 0` and one extra unit
/// spacelike direction. Coordinates are ordered `(x_1…x_p, x̃_1…x̃_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphHypersurface {
    ambient: InnerProductSpace,
    hessian: Matrix,
}

pub fn graph_hypersurface(p: usize, hessian: &Matrix) -> Result<GraphHypersurface, GeometryError> {
    if p == 0 {
        return Err(GeometryError::Config(
            "graph hypersurface needs p ≥ 1".into(),
        ));
    }
    if hessian.shape() != (p, p) {
        return Err(GeometryError::Config(format!(
            "Hessian must be {p}×{p}, got {}×{}",
            hessian.nrows(),
            hessian.ncols()
        )));
    }
    let asym = (hessian - hessian.transpose()).amax();
    if asym > 1e-12 * hessian.amax().max(1.0) {
        return Err(GeometryError::Config(format!(
            "Hessian is not symmetric (residual {asym:e})"
        )));
    }
    let sv = singular_values(hessian);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin <= 1e-10 * smax {
        return Err(GeometryError::SingularHessian(smin));
    }
    let n = 2 * p + 1;
    let mut g = Matrix::zeros(n, n);
    for i in 0..p {
        g[(i, p + i)] = 1.0;
        g[(p + i, i)] = 1.0;
    }
    g[(n - 1, n - 1)] = 1.0;
    let ambient = InnerProductSpace::with_signature(p, p + 1, g)
        .map_err(|e| GeometryError::Config(e.to_string()))?;
    Ok(GraphHypersurface {
        ambient,
        hessian: (hessian + hessian.transpose()) * 0.5,
    })
}

impl GraphHypersurface {
    pub fn p(&self) -> usize {
        self.hessian.nrows()
    }

    pub fn hessian(&self) -> &Matrix {
        &self.hessian
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let p = self.p();
        &self.hessian * Vector::from_column_slice(&x[p..])
    }
}

impl Immersion for GraphHypersurface {
    fn ambient(&self) -> &InnerProductSpace {
        &self.ambient
    }

    fn dim(&self) -> usize {
        2 * self.p()
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == 2 * self.p() && x.iter().all(|v| v.is_finite())
    }

    fn embed(&self, x: &[f64]) -> Vector {
        let p = self.p();
        let xt = Vector::from_column_slice(&x[p..]);
        let f = 0.5 * xt.dot(&(&self.hessian * &xt));
        let mut v = Vector::zeros(2 * p + 1);
        v.rows_mut(0, 2 * p).copy_from_slice(x);
        v[2 * p] = f;
        v
    }

    fn tangent(&self, x: &[f64]) -> Matrix {
        let p = self.p();
        let grad = self.gradient(x);
        let mut t = Matrix::zeros(2 * p + 1, 2 * p);
        for i in 0..2 * p {
            t[(i, i)] = 1.0;
        }
        for j in 0..p {
            t[(2 * p, p + j)] = grad[j];
        }
        t
    }

    /// `ν = −Σ ∂_jf·e_j + e₀`, with `(ν, ν) = 1`.
    fn normal(&self, x: &[f64]) -> Vector {
        let p = self.p();
        let grad = self.gradient(x);
        let mut v = Vector::zeros(2 * p + 1);
        for j in 0..p {
            v[j] = -grad[j];
        }
        v[2 * p] = 1.0;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::CurvatureTensor;
    use crate::geometry::{christoffel_fd, hypersurface_curvature, riemann_fd};

    #[test]
    fn demo_coefficient_values() {
        let m = warped_metric(&WarpedConfig::demo()).unwrap();
        assert_eq!(m.f(1.0), 2.0);
        assert!((m.c(0.0) - 1.0).abs() <= 1e-15);
        assert!((m.c(1.0) - 0.25).abs() <= 1e-15);
        assert!((m.c(0.5) - 0.64).abs() <= 1e-15);
    }

    #[test]
    fn warping_christoffels() {
        // f = t² + 1 so Γ_ta^b = f_t/(2f) δ_a^b = ½ at t = 1.
        let m = warped_metric(&WarpedConfig::demo()).unwrap();
        let g = christoffel_fd(&m, &[1.0, 0.05, -0.03], 1e-4).unwrap();
        for a in 1..3 {
            for b in 1..3 {
                let want = if a == b { 0.5 } else { 0.0 };
                assert!((g.get(0, a, b) - want).abs() <= 1e-7);
                assert!((g.get(a, 0, b) - want).abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn warped_curvature_matches_coefficient() {
        let cfg = WarpedConfig {
            eps: -1,
            a: 0.5,
            b: 2.0,
            fiber: [2, 1],
            interval: [0.0, 1.0],
            ..WarpedConfig::demo()
        };
        let m = warped_metric(&cfg).unwrap();
        let x = [0.4, 0.02, -0.04];
        let r = riemann_fd(&m, &x, 1e-3).unwrap();
        let model = CurvatureTensor::from_phi(&m.phi(&x).unwrap()).scaled(m.c(0.4));
        assert!(r.max_abs_diff(&model).unwrap() <= 1e-5 * model.max_abs());
    }

    #[test]
    fn warped_config_validation() {
        let demo = WarpedConfig::demo();
        let reject = |cfg: WarpedConfig| assert!(warped_metric(&cfg).is_err(), "{cfg:?}");
        reject(WarpedConfig {
            a: 2.0,
            ..demo.clone()
        });
        reject(WarpedConfig {
            kappa: 2.0,
            ..demo.clone()
        });
        reject(WarpedConfig {
            eps: 0,
            ..demo.clone()
        });
        reject(WarpedConfig {
            interval: [1.0, 1.0],
            ..demo.clone()
        });
        // f = −t² + 1 vanishes at ±1.
        reject(WarpedConfig {
            eps: -1,
            ..demo.clone()
        });
        let ok = warped_metric(&WarpedConfig {
            eps: -1,
            interval: [-0.5, 0.5],
            ..demo
        })
        .unwrap();
        assert_eq!(ok.domain, (-1.0, 1.0));
        assert!(ok.in_domain(&[0.9, 0.0, 0.0]));
        assert!(!ok.in_domain(&[1.0, 0.0, 0.0]));
    }

    #[test]
    fn pseudo_sphere_chart_validation() {
        assert!(pseudo_sphere_chart(0, 3, 1.0, -1, None).is_err());
        assert!(pseudo_sphere_chart(1, 2, 0.0, 1, None).is_err());
        assert!(pseudo_sphere_chart(1, 2, 1.0, 2, None).is_err());
        assert!(pseudo_sphere_chart(1, 2, 1.0, 1, Some(3)).is_err());
        assert!(pseudo_sphere_chart(1, 0, 1.0, 1, None).is_err());
        let c = pseudo_sphere_chart(2, 1, 2.0, -1, None).unwrap();
        assert_eq!(c.curvature(), -4.0);
        let x = [0.1, -0.2];
        let v = c.embed(&x);
        assert!((c.ambient.inner(&v, &v).unwrap() + 0.25).abs() <= 1e-14);
    }

    #[test]
    fn graph_shape_operator_is_square_zero() {
        let h = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, -1.0]);
        let g = graph_hypersurface(2, &h).unwrap();
        let hc = hypersurface_curvature(&g, &[0.1, -0.2, 0.3, 0.05], 1e-3).unwrap();
        let s = hc.shape.matrix();
        let mut exact = Matrix::zeros(4, 4);
        exact.view_mut((0, 2), (2, 2)).copy_from(&h);
        assert!((s - &exact).amax() <= 1e-8);
        assert!((s * s).amax() <= 1e-8);
        assert_eq!(hc.nu_nu, 1.0);
    }

    #[test]
    fn degenerate_graphs_are_rejected() {
        for h in [
            Matrix::zeros(2, 2),
            Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
        ] {
            assert!(matches!(
                graph_hypersurface(2, &h),
                Err(GeometryError::SingularHessian(_))
            ));
        }
        let asym = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(graph_hypersurface(2, &asym).is_err());
        assert!(graph_hypersurface(3, &Matrix::identity(2, 2)).is_err());
    }
}
