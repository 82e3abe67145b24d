//! Seeded generators for the structured random inputs used by probes,
//! property tests and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::pseudo::{InnerProductSpace, Matrix, SelfAdjointMap, Vector};
use crate::spectral::{JordanBlock, JordanStructure};
use crate::util::null_space;

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th independent stream derived from `seed`.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    crate::util::mix_seed(seed, index)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = Matrix::from_diagonal(&Vector::from_fn(n, |i, _| {
        if r[(i, i)] < 0.0 {
            -1.0
        } else {
            1.0
        }
    }));
    q * signs
}

/// `U·diag(s)·Vᵀ` with log-uniform singular values, so that the condition
/// number lies below `max_cond`.
pub fn well_conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize, max_cond: f64) -> Matrix {
    let u = orthogonal(rng, n);
    let v = orthogonal(rng, n);
    let top = max_cond.ln() * 0.999;
    let s = Vector::from_fn(n, |_, _| (rng.random::<f64>() * top).exp());
    u * Matrix::from_diagonal(&s) * v.transpose()
}

/// A random real Jordan structure of dimension at most `max_dim` whose
/// distinct eigenvalues (and conjugates) are at least `separation` apart.
pub fn jordan_structure<R: Rng + ?Sized>(
    rng: &mut R,
    max_dim: usize,
    separation: f64,
) -> JordanStructure {
    let n = rng.random_range(1..=max_dim);
    let mut eigenvalues: Vec<(f64, f64)> = Vec::new();
    let mut blocks: Vec<JordanBlock> = Vec::new();
    let mut remaining = n;
    while remaining > 0 {
        let reuse = !eigenvalues.is_empty() && rng.random::<f64>() < 0.3;
        let (re, im) = if reuse {
            let cands: Vec<_> = eigenvalues
                .iter()
                .filter(|e| remaining >= if e.1 > 0.0 { 2 } else { 1 })
                .collect();
            if cands.is_empty() {
                fresh_eigenvalue(rng, &eigenvalues, remaining, separation)
            } else {
                *cands[rng.random_range(0..cands.len())]
            }
        } else {
            fresh_eigenvalue(rng, &eigenvalues, remaining, separation)
        };
        if !eigenvalues.contains(&(re, im)) {
            eigenvalues.push((re, im));
        }
        let per = if im > 0.0 { 2 } else { 1 };
        let size = rng.random_range(1..=remaining / per);
        remaining -= per * size;
        match blocks
            .iter_mut()
            .find(|b| b.re == re && b.im == im && b.size == size)
        {
            Some(b) => b.count += 1,
            None => blocks.push(JordanBlock {
                re,
                im,
                size,
                count: 1,
            }),
        }
    }
    JordanStructure::new(blocks, n)
}

fn fresh_eigenvalue<R: Rng + ?Sized>(
    rng: &mut R,
    taken: &[(f64, f64)],
    remaining: usize,
    sep: f64,
) -> (f64, f64) {
    loop {
        let complex = remaining >= 2 && rng.random::<f64>() < 0.35;
        let re = (rng.random::<f64>() * 6.0 - 3.0) * sep.max(1.0);
        let im = if complex {
            sep * 0.5 + rng.random::<f64>() * 2.0
        } else {
            0.0
        };
        let far = taken
            .iter()
            .all(|&(a, b)| (re - a).hypot(im - b) >= sep && (re - a).hypot(im + b) >= sep);
        if far {
            return (re, im);
        }
    }
}

/// Block-diagonal real Jordan matrix; a complex block of size `k` is
/// `2k × 2k` with `[[a, b], [−b, a]]` on the diagonal and `I₂` above it.
pub fn real_jordan_matrix(s: &JordanStructure) -> Matrix {
    let mut m = Matrix::zeros(s.dim, s.dim);
    let mut at = 0;
    for b in &s.blocks {
        for _ in 0..b.count {
            if b.im > 0.0 {
                for k in 0..b.size {
                    let o = at + 2 * k;
                    m[(o, o)] = b.re;
                    m[(o + 1, o + 1)] = b.re;
                    m[(o, o + 1)] = b.im;
                    m[(o + 1, o)] = -b.im;
                    if k + 1 < b.size {
                        m[(o, o + 2)] = 1.0;
                        m[(o + 1, o + 3)] = 1.0;
                    }
                }
                at += 2 * b.size;
            } else {
                for k in 0..b.size {
                    m[(at + k, at + k)] = b.re;
                    if k + 1 < b.size {
                        m[(at + k, at + k + 1)] = 1.0;
                    }
                }
                at += b.size;
            }
        }
    }
    m
}

fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let a = gaussian_matrix(rng, n, n);
    (&a + a.transpose()) * 0.5
}

/// `G⁻¹S` for a Gaussian symmetric `S`.
pub fn self_adjoint<R: Rng + ?Sized>(rng: &mut R, space: &InnerProductSpace) -> SelfAdjointMap {
    let s = random_symmetric(rng, space.dim());
    SelfAdjointMap::from_bilinear(space.clone(), &s).expect("dimension matches")
}

/// A self-adjoint map whose null space is exactly the column span of
/// `kernel`, with well-conditioned nonzero part.
pub fn self_adjoint_with_kernel<R: Rng + ?Sized>(
    rng: &mut R,
    space: &InnerProductSpace,
    kernel: &Matrix,
) -> SelfAdjointMap {
    let n = space.dim();
    let complement = if kernel.ncols() == 0 {
        Matrix::identity(n, n)
    } else {
        null_space(&kernel.transpose(), 1e-12 * kernel.norm())
    };
    let m = complement.ncols();
    let o = orthogonal(rng, m);
    let d = Vector::from_fn(m, |_, _| {
        let mag = 0.5 + 2.5 * rng.random::<f64>();
        if rng.random::<bool>() {
            mag
        } else {
            -mag
        }
    });
    let s = &o * Matrix::from_diagonal(&d) * o.transpose();
    let b = &complement * s * complement.transpose();
    SelfAdjointMap::from_bilinear(space.clone(), &b).expect("dimension matches")
}

/// `P_W − P_{W⊥}` for a random nondegenerate subspace `W`; squares to the
/// identity.
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, space: &InnerProductSpace) -> SelfAdjointMap {
    let n = space.dim();
    let g = space.gram();
    let k = rng.random_range(0..=n);
    let proj = loop {
        if k == 0 {
            break Matrix::zeros(n, n);
        }
        let w = gaussian_matrix(rng, n, k);
        let wgw = w.transpose() * g * &w;
        let sv = wgw.singular_values();
        if sv.min() < 0.05 * sv.max() {
            continue;
        }
        let inv = wgw.try_inverse().expect("checked conditioning");
        break &w * inv * w.transpose() * g;
    };
    let phi = proj * 2.0 - Matrix::identity(n, n);
    SelfAdjointMap::with_tolerance(
        space.clone(),
        phi,
        &crate::tol::Tolerances::finite_difference(),
    )
    .expect("projection is self-adjoint")
}

/// The map `e_i⁻ ↦ −e_i⁺`, `e_i⁺ ↦ e_i⁻` on a balanced canonical space.
pub fn standard_para_isometry(space: &InnerProductSpace) -> Matrix {
    let p = space.p();
    let mut m = Matrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        m[(p + i, i)] = -1.0;
        m[(i, p + i)] = 1.0;
    }
    m
}

/// A metric reflection `x ↦ x − 2(x,v)/(v,v)·v` in a vector with
/// `|(v,v)| ≥ ½|v|²`.
pub fn reflection<R: Rng + ?Sized>(rng: &mut R, space: &InnerProductSpace) -> Matrix {
    let g = space.gram();
    loop {
        let v = gaussian_vector(rng, space.dim());
        let vv = (v.transpose() * g * &v)[(0, 0)];
        if vv.abs() >= 0.5 * v.norm_squared() {
            return Matrix::identity(space.dim(), space.dim())
                - (&v * (v.transpose() * g)) * (2.0 / vv);
        }
    }
}

/// `Θ J Θ⁻¹` with `J` the standard para-isometry and `Θ` a product of
/// reflections; requires `p = q`.
pub fn para_isometry<R: Rng + ?Sized>(rng: &mut R, space: &InnerProductSpace) -> SelfAdjointMap {
    assert_eq!(
        space.p(),
        space.q(),
        "para-isometries need a balanced signature"
    );
    let mut theta = Matrix::identity(space.dim(), space.dim());
    let count = rng.random_range(2..=6);
    for _ in 0..count {
        theta = reflection(rng, space) * theta;
    }
    let inv = theta
        .clone()
        .try_inverse()
        .expect("reflections are invertible");
    let phi = &theta * standard_para_isometry(space) * inv;
    let phi = (&phi + space.gram_inv() * phi.transpose() * space.gram()) * 0.5;
    SelfAdjointMap::with_tolerance(
        space.clone(),
        phi,
        &crate::tol::Tolerances::finite_difference(),
    )
    .expect("conjugation by an isometry keeps self-adjointness")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometries_square_to_identity() {
        let mut rng = seeded(1);
        for (p, q) in [(0, 5), (2, 3), (3, 3)] {
            let s = InnerProductSpace::canonical(p, q);
            for _ in 0..20 {
                let phi = isometry(&mut rng, &s);
                let n = s.dim();
                assert!((phi.square() - Matrix::identity(n, n)).amax() < 1e-9);
                assert!(phi.adjointness_residual() < 1e-9);
            }
        }
    }

    #[test]
    fn para_isometries_square_to_minus_identity() {
        let mut rng = seeded(2);
        let s = InnerProductSpace::canonical(3, 3);
        for _ in 0..20 {
            let phi = para_isometry(&mut rng, &s);
            assert!((phi.square() + Matrix::identity(6, 6)).amax() < 1e-8);
        }
    }

    #[test]
    fn jordan_matrices_have_the_declared_dimension() {
        let mut rng = seeded(3);
        for _ in 0..100 {
            let s = jordan_structure(&mut rng, 8, 0.5);
            assert_eq!(s.block_dim(), s.dim);
            let m = real_jordan_matrix(&s);
            assert_eq!(m.nrows(), s.dim);
        }
    }

    #[test]
    fn prescribed_kernel_is_the_kernel() {
        let mut rng = seeded(4);
        let s = InnerProductSpace::canonical(2, 3);
        let k = Matrix::from_columns(&[s.e_minus(0), s.e_minus(1)]);
        let phi = self_adjoint_with_kernel(&mut rng, &s, &k);
        assert_eq!(phi.kernel_basis(1e-10).len(), 2);
        assert!((phi.matrix() * &k).amax() < 1e-12);
    }
}
