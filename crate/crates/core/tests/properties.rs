use curvlab::classify::{reconstruct_phi, ReconstructConfig};
use curvlab::curvature::CurvatureTensor;
use curvlab::probe::{probe, sample_plane, ProbeMode, Verdict};
use curvlab::pseudo::{CausalType, InnerProductSpace, Matrix, OrientedPlane, SelfAdjointMap};
use curvlab::random::{self, gaussian_vector, seeded};
use curvlab::spectral::{jordan_structure, spectrum, JordanStructure, SpectralConfig};
use curvlab::tol::Tolerances;
use proptest::prelude::*;

fn signature() -> impl Strategy<Value = (usize, usize)> {
    (0usize..4, 0usize..4).prop_filter("dimension at least 2", |(p, q)| p + q >= 2)
}

fn svd_rank(m: &Matrix, cutoff: f64) -> usize {
    m.clone()
        .singular_values()
        .iter()
        .filter(|&&s| s > cutoff)
        .count()
}

/// `M − λ` for a real eigenvalue, `(M − a)² + b²` for a conjugate pair.
fn shifted(m: &Matrix, re: f64, im: f64) -> Matrix {
    let n = m.nrows();
    let a = m - Matrix::identity(n, n) * re;
    if im > 0.0 {
        &a * &a + Matrix::identity(n, n) * (im * im)
    } else {
        a
    }
}

/// Ranks of the powers of the shifted matrix predicted by a structure.
fn predicted_ranks(s: &JordanStructure, re: f64, im: f64, tol: f64, k: usize) -> usize {
    let per = if im > 0.0 { 2 } else { 1 };
    let lost: usize = s
        .blocks
        .iter()
        .filter(|b| (b.re - re).hypot(b.im - im) <= tol)
        .map(|b| per * b.size.min(k) * b.count)
        .sum();
    s.dim - lost
}

fn sorted_spectrum(m: &Matrix) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = spectrum(m).iter().map(|z| (z.re, z.im)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

fn plane_of(space: &InnerProductSpace, seed: u64, class: CausalType) -> Option<OrientedPlane> {
    sample_plane(space, class, seed, &Tolerances::default()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jordan_structure_survives_conjugation(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let s = random::jordan_structure(&mut rng, 6, 0.5);
        let q = random::well_conditioned(&mut rng, s.dim, 10.0);
        let qi = q.clone().try_inverse().unwrap();
        let m = &q * random::real_jordan_matrix(&s) * qi;
        let got = jordan_structure(&m, &SpectralConfig::default()).unwrap();
        let norm = m.norm().max(1.0);
        prop_assert!(got.matches(&s, 1e-4 * norm), "expected {:?}, got {:?}", s, got);
    }

    #[test]
    fn jordan_structure_agrees_with_svd_ranks_of_powers(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let s = random::jordan_structure(&mut rng, 6, 0.5);
        let q = random::well_conditioned(&mut rng, s.dim, 10.0);
        let qi = q.clone().try_inverse().unwrap();
        let m = &q * random::real_jordan_matrix(&s) * qi;
        let got = jordan_structure(&m, &SpectralConfig::default()).unwrap();
        prop_assert_eq!(got.block_dim(), s.dim);
        for b in &got.blocks {
            let a = shifted(&m, b.re, b.im);
            let deg = if b.im > 0.0 { 2 } else { 1 };
            let base = (m.norm() + b.re.hypot(b.im)).powi(deg);
            let mut power = a.clone();
            for k in 1..=b.size + 1 {
                let want = predicted_ranks(&got, b.re, b.im, 1e-3, k);
                let cutoff = 1e-8 * base.powi(k as i32);
                prop_assert_eq!(svd_rank(&power, cutoff), want, "eigenvalue {} {} power {}", b.re, b.im, k);
                power = &power * &a;
            }
        }
    }

    #[test]
    fn spectrum_is_similarity_invariant(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = seeded(seed);
        let m = random::gaussian_matrix(&mut rng, n, n);
        let q = random::well_conditioned(&mut rng, n, 10.0);
        let qi = q.clone().try_inverse().unwrap();
        let a = sorted_spectrum(&m);
        let b = sorted_spectrum(&(&q * &m * qi));
        let scale = m.norm().max(1.0);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.0 - y.0).hypot(x.1 - y.1) <= 1e-7 * scale, "{:?} vs {:?}", a, b);
        }
        let trace: f64 = a.iter().map(|z| z.0).sum();
        prop_assert!((trace - m.trace()).abs() <= 1e-9 * scale * n as f64);
    }

    #[test]
    fn r_phi_has_curvature_symmetries((p, q) in signature(), seed in any::<u64>()) {
        let space = InnerProductSpace::canonical(p, q);
        let phi = random::self_adjoint(&mut seeded(seed), &space);
        let r = CurvatureTensor::from_phi(&phi);
        prop_assert!(r.validate().max_relative() <= 1e-12);
    }

    #[test]
    fn r_phi_is_quadratic_and_even((p, q) in signature(), seed in any::<u64>(), c in -3.0f64..3.0) {
        let space = InnerProductSpace::canonical(p, q);
        let phi = random::self_adjoint(&mut seeded(seed), &space);
        let r = CurvatureTensor::from_phi(&phi);
        let rc = CurvatureTensor::from_phi(&phi.scaled(c));
        let diff = rc.max_abs_diff(&r.scaled(c * c)).unwrap();
        prop_assert!(diff <= 1e-12 * r.max_abs().max(1.0) * c * c + 1e-15);
    }

    #[test]
    fn r_phi_matches_its_defining_formula((p, q) in signature(), seed in any::<u64>()) {
        let space = InnerProductSpace::canonical(p, q);
        let mut rng = seeded(seed);
        let phi = random::self_adjoint(&mut rng, &space);
        let r = CurvatureTensor::from_phi(&phi);
        let n = space.dim();
        let [x, y, z, w] = [0, 1, 2, 3].map(|_| gaussian_vector(&mut rng, n));
        let ip = |a: &_, b: &_| space.inner(a, b).unwrap();
        let want = ip(&phi.apply(&y), &z) * ip(&phi.apply(&x), &w)
            - ip(&phi.apply(&x), &z) * ip(&phi.apply(&y), &w);
        let got = r.eval(&x, &y, &z, &w);
        prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0));
    }

    #[test]
    fn curvature_operator_is_skew_and_basis_independent(seed in any::<u64>(), (a, b, c) in (0.2f64..3.0, -2.0f64..2.0, 0.2f64..3.0)) {
        let space = InnerProductSpace::canonical(2, 3);
        let tol = Tolerances::default();
        let phi = random::self_adjoint(&mut seeded(seed), &space);
        let r = CurvatureTensor::from_phi(&phi);
        let Some(plane) = plane_of(&space, seed, CausalType::Mixed) else { return Ok(()) };
        let op = r.curvature_operator(&plane, &tol).unwrap();
        let scale = op.matrix.norm().max(1.0);
        prop_assert!(op.skew_residual(&space) <= 1e-10 * scale);
        // Upper-triangular change of basis with positive determinant.
        let other = plane.rebased(a, 0.0, b, c).unwrap();
        let op2 = r.curvature_operator(&other, &tol).unwrap();
        prop_assert!((&op.matrix - &op2.matrix).norm() <= 1e-9 * scale);
        let rev = r.curvature_operator(&plane.reversed(), &tol).unwrap();
        prop_assert!((&op.matrix + &rev.matrix).norm() <= 1e-9 * scale);
    }

    #[test]
    fn plane_type_ignores_the_choice_of_basis(
        (p, q) in signature(),
        seed in any::<u64>(),
        m in prop::array::uniform4(-3.0f64..3.0),
    ) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det.abs() > 0.1);
        let space = InnerProductSpace::canonical(p, q);
        let tol = Tolerances::default();
        let mut rng = seeded(seed);
        let n = space.dim();
        let plane = OrientedPlane::new(gaussian_vector(&mut rng, n), gaussian_vector(&mut rng, n)).unwrap();
        let other = plane.rebased(m[0], m[1], m[2], m[3]).unwrap();
        prop_assert_eq!(space.plane_type(&plane, &tol).unwrap(), space.plane_type(&other, &tol).unwrap());
    }

    #[test]
    fn sampled_planes_have_the_requested_class((p, q) in signature(), seed in any::<u64>(), which in 0usize..3) {
        let class = [CausalType::Spacelike, CausalType::Timelike, CausalType::Mixed][which];
        let space = InnerProductSpace::canonical(p, q);
        let tol = Tolerances::default();
        let achievable = match class {
            CausalType::Spacelike => q >= 2,
            CausalType::Timelike => p >= 2,
            _ => p >= 1 && q >= 1,
        };
        match sample_plane(&space, class, seed, &tol) {
            Ok(plane) => {
                prop_assert!(achievable);
                prop_assert_eq!(space.plane_type(&plane, &tol).unwrap(), class);
                prop_assert_eq!(sample_plane(&space, class, seed, &tol).unwrap(), plane);
            }
            Err(_) => prop_assert!(!achievable),
        }
    }

    #[test]
    fn dual_frame_is_biorthogonal((p, q) in signature(), seed in any::<u64>(), k in 1usize..7) {
        let space = InnerProductSpace::canonical(p, q);
        let n = space.dim();
        let k = k.min(n);
        let mut rng = seeded(seed);
        let vs: Vec<_> = (0..k).map(|_| gaussian_vector(&mut rng, n)).collect();
        let ws = space.dual_frame(&vs, &Tolerances::default()).unwrap();
        for (i, v) in vs.iter().enumerate() {
            for (j, w) in ws.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((space.inner(v, w).unwrap() - want).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn invertible_phi_has_spacelike_rank_two(seed in any::<u64>(), p in 0usize..3, q in 2usize..4) {
        let space = InnerProductSpace::canonical(p, q);
        let none = Matrix::zeros(space.dim(), 0);
        let phi = random::self_adjoint_with_kernel(&mut seeded(seed), &space, &none);
        let r = CurvatureTensor::from_phi(&phi);
        let rep = probe(&r, CausalType::Spacelike, 40, ProbeMode::Rank, seed, &Tolerances::default(), &[]).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::ConstantRank { rank: 2 });
    }

    #[test]
    fn reconstruction_inverts_r_phi(seed in any::<u64>(), (p, q) in (0usize..4, 1usize..4).prop_filter("dimension at least 3", |(p, q)| p + q >= 3), c in 0.1f64..10.0) {
        let space = InnerProductSpace::canonical(p, q);
        let phi = random::isometry(&mut seeded(seed), &space);
        let r = CurvatureTensor::from_phi(&phi).scaled(c);
        let rec = reconstruct_phi(&r, &ReconstructConfig::default()).unwrap();
        prop_assert!((rec.c - c).abs() <= 1e-6 * c);
        let d = (rec.phi.matrix() - phi.matrix()).norm().min((rec.phi.matrix() + phi.matrix()).norm());
        prop_assert!(d <= 1e-6 * phi.matrix().norm(), "φ off by {}", d);
        prop_assert!(rec.residual <= 1e-8);
    }

    #[test]
    fn probe_reports_are_reproducible(seed in any::<u64>()) {
        let space = InnerProductSpace::canonical(2, 3);
        let phi = random::self_adjoint(&mut seeded(seed), &space);
        let r = CurvatureTensor::from_phi(&phi);
        let tol = Tolerances::default();
        let run = || probe(&r, CausalType::Mixed, 30, ProbeMode::Jordan, seed, &tol, &[]).unwrap();
        let a = serde_json::to_string(&run()).unwrap();
        let b = serde_json::to_string(&run()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn identity_reconstructs_with_its_constant() {
    let space = InnerProductSpace::canonical(2, 3);
    let r = CurvatureTensor::identity(space.clone()).scaled(2.0);
    let rec = reconstruct_phi(&r, &ReconstructConfig::default()).unwrap();
    assert!((rec.c - 2.0).abs() < 1e-10);
    let id = SelfAdjointMap::identity(space);
    assert!((rec.phi.matrix() - id.matrix()).norm() < 1e-8);
}
