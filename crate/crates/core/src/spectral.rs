//! Conjugacy invariants of real square matrices: numerical rank, spectrum,
//! real Jordan structure, Jordan equivalence and nilpotency.
//!
//! Block sizes come from the nullity sequence `d_k = dim ker (M − λ)^k`
//! (the number of blocks of size `≥ k` is `d_k − d_{k−1}`). The kernels are
//! grown one step at a time, `ker (M−λ)^k = ker((I − P_{k−1})(M − λ))` with
//! `P_{k−1}` the orthogonal projector onto the previous kernel, so no matrix
//! power is ever formed. Complex pairs use the real quadratic factor
//! `M² − 2 Re(λ) M + |λ|² I`.
//!
//! Eigenvalues of a defective block scatter around the true value by roughly
//! `ε^{1/size}`, so clustering starts at `cluster_tol` and keeps merging the
//! closest clusters (single linkage) until every cluster's algebraic
//! multiplicity, measured at its centroid, equals its member count and the
//! clusters are well separated.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pseudo::Matrix;
use crate::tol::Tolerances;
use crate::util::{null_space, singular_values};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigenvalue clustering is ambiguous: {0}")]
    IllConditioned(String),
    #[error("matrices have different sizes ({0} vs {1})")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub cluster_tol: f64,
    pub rank_tol: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-6,
            rank_tol: 1e-8,
        }
    }
}

impl From<&Tolerances> for SpectralConfig {
    fn from(t: &Tolerances) -> Self {
        Self {
            cluster_tol: t.cluster,
            rank_tol: t.rank,
        }
    }
}

/// `count` real Jordan blocks of the given size for the eigenvalue
/// `re + i·im`. With `im > 0` each block stands for a conjugate pair and
/// occupies `2·size` real dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JordanBlock {
    pub re: f64,
    pub im: f64,
    pub size: usize,
    pub count: usize,
}

impl JordanBlock {
    pub fn real_dim(&self) -> usize {
        let per = if self.im > 0.0 { 2 } else { 1 };
        per * self.size * self.count
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanStructure {
    pub blocks: Vec<JordanBlock>,
    pub dim: usize,
}

impl JordanStructure {
    pub fn new(mut blocks: Vec<JordanBlock>, dim: usize) -> Self {
        blocks.retain(|b| b.count > 0);
        blocks.sort_by(|a, b| {
            a.re.total_cmp(&b.re)
                .then(a.im.total_cmp(&b.im))
                .then(a.size.cmp(&b.size))
        });
        Self { blocks, dim }
    }

    /// Sum of the real dimensions of all blocks; equals `dim` for any output
    /// of [`jordan_structure`].
    pub fn block_dim(&self) -> usize {
        self.blocks.iter().map(JordanBlock::real_dim).sum()
    }

    /// Equal as multisets with eigenvalues compared within `tol`.
    pub fn matches(&self, other: &JordanStructure, tol: f64) -> bool {
        if self.dim != other.dim || self.blocks.len() != other.blocks.len() {
            return false;
        }
        let mut used = vec![false; other.blocks.len()];
        self.blocks.iter().all(|a| {
            let hit = other.blocks.iter().enumerate().position(|(i, b)| {
                !used[i]
                    && a.size == b.size
                    && a.count == b.count
                    && (a.re - b.re).hypot(a.im - b.im) <= tol
            });
            match hit {
                Some(i) => {
                    used[i] = true;
                    true
                }
                None => false,
            }
        })
    }

    /// Eigenvalue 0 only.
    pub fn is_nilpotent(&self, tol: f64) -> bool {
        self.blocks.iter().all(|b| b.re.hypot(b.im) <= tol)
    }

    /// Rank of any matrix with this structure.
    pub fn rank(&self, tol: f64) -> usize {
        self.blocks
            .iter()
            .map(|b| {
                if b.re.hypot(b.im) <= tol {
                    (b.size - 1) * b.count
                } else {
                    b.real_dim()
                }
            })
            .sum()
    }
}

fn spectral_norm(m: &Matrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Number of singular values above `rank_tol · σ_max`.
pub fn numerical_rank(m: &Matrix, cfg: &SpectralConfig) -> usize {
    numerical_rank_scaled(m, 0.0, cfg)
}

/// Like [`numerical_rank`] with the cutoff taken relative to
/// `max(σ_max, scale)`; use when a matrix that should vanish may consist of
/// rounding noise only.
pub fn numerical_rank_scaled(m: &Matrix, scale: f64, cfg: &SpectralConfig) -> usize {
    let sv = singular_values(m);
    let smax = sv.iter().cloned().fold(0.0, f64::max).max(scale);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cfg.rank_tol * smax).count()
}

/// Eigenvalues with multiplicity, conjugate-closed, sorted by real then
/// imaginary part.
pub fn spectrum(m: &Matrix) -> Vec<Complex<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let scale = spectral_norm(m).max(f64::MIN_POSITIVE);
    canonical_pairs(raw_eigenvalues(m), 64.0 * f64::EPSILON * scale)
}

/// Eigenvalues by Hessenberg reduction and Francis double-shift QR with
/// exceptional shifts. If the iteration stalls, the matrix is rotated by a
/// fixed orthogonal similarity and retried.
fn raw_eigenvalues(m: &Matrix) -> Vec<Complex<f64>> {
    let n = m.nrows();
    if m.norm() == 0.0 {
        return vec![Complex::new(0.0, 0.0); n];
    }
    let mut work = m.clone();
    for attempt in 0..8u64 {
        if let Some(ev) = hessenberg_qr(work.clone().hessenberg().h()) {
            return ev;
        }
        let mut rng = crate::random::seeded(attempt);
        let o = crate::random::orthogonal(&mut rng, n);
        work = o.transpose() * m * o;
    }
    panic!("QR iteration failed to converge on a {n}×{n} matrix after 8 similarity restarts");
}

fn sign_of(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix; `None` when some eigenvalue
/// needs more than 60 iterations.
fn hessenberg_qr(h: Matrix) -> Option<Vec<Complex<f64>>> {
    let n = h.nrows();
    // One-based copy keeps the classical index arithmetic readable.
    let mut a = vec![vec![0.0_f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            if i <= j + 1 {
                a[i + 1][j + 1] = h[(i, j)];
            }
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign_of(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = if z != 0.0 { x - w / z } else { x + z };
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return None;
                    }
                    if its % 10 == 0 && its > 0 {
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = if k != nn - 1 { a[k + 2][k - 1] } else { 0.0 };
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = sign_of((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Some((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}

fn canonical_pairs(raw: Vec<Complex<f64>>, real_tol: f64) -> Vec<Complex<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in raw {
        if z.im.abs() <= real_tol {
            out.push(Complex::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    for z in upper {
        let partner = lower
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - z.conj()).norm().total_cmp(&(*b - z.conj()).norm()))
            .map(|(i, _)| i);
        match partner {
            Some(i) => {
                let w = lower.swap_remove(i);
                let re = 0.5 * (z.re + w.re);
                let im = 0.5 * (z.im - w.im);
                out.push(Complex::new(re, im));
                out.push(Complex::new(re, -im));
            }
            None => out.push(Complex::new(z.re, 0.0)),
        }
    }
    // An unpaired lower eigenvalue cannot occur for real input; keep it real.
    out.extend(lower.into_iter().map(|z| Complex::new(z.re, 0.0)));
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// Dimensions of `ker A, ker A², …` until they stop growing.
fn nullity_sequence(a: &Matrix, threshold: f64) -> Vec<usize> {
    let n = a.nrows();
    let mut seq = Vec::new();
    let mut basis = Matrix::zeros(n, 0);
    loop {
        let proj = Matrix::identity(n, n) - &basis * basis.transpose();
        let ns = null_space(&(proj * a), threshold);
        if ns.ncols() <= basis.ncols() {
            break;
        }
        seq.push(ns.ncols());
        basis = ns;
        if basis.ncols() == n {
            break;
        }
    }
    seq
}

/// Block counts `[#size 1, #size 2, …]` from a nullity sequence, where each
/// block accounts for `per_block` dimensions per size step.
fn blocks_from_nullities(seq: &[usize], per_block: usize) -> Option<Vec<usize>> {
    let mut at_least = Vec::with_capacity(seq.len());
    let mut prev = 0;
    for &d in seq {
        let diff = d - prev;
        if diff % per_block != 0 {
            return None;
        }
        at_least.push(diff / per_block);
        prev = d;
    }
    let mut exact = Vec::with_capacity(at_least.len());
    for k in 0..at_least.len() {
        let next = at_least.get(k + 1).copied().unwrap_or(0);
        if next > at_least[k] {
            return None;
        }
        exact.push(at_least[k] - next);
    }
    Some(exact)
}

/// Complex counterpart of [`nullity_sequence`] for `M − λI` with complex `λ`.
fn complex_nullity_sequence(a: &DMatrix<Complex<f64>>, threshold: f64) -> Vec<usize> {
    let n = a.nrows();
    let mut seq = Vec::new();
    let mut basis = DMatrix::<Complex<f64>>::zeros(n, 0);
    loop {
        let proj = DMatrix::<Complex<f64>>::identity(n, n) - &basis * basis.adjoint();
        let svd = (proj * a).svd(false, true);
        let v = svd.v_t.expect("requested V").adjoint();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| svd.singular_values[i] <= threshold)
            .collect();
        if keep.len() <= basis.ncols() {
            break;
        }
        seq.push(keep.len());
        basis = DMatrix::from_fn(n, keep.len(), |r, c| v[(r, keep[c])]);
        if basis.ncols() == n {
            break;
        }
    }
    seq
}

/// Block counts for one eigenvalue cluster of `members` eigenvalues. Noise
/// grows along long chains under ill-conditioned similarities, so the cutoff
/// is relaxed in decades (at most 1000×) until the kernels account for the
/// whole cluster.
fn block_counts(
    a: &Matrix,
    threshold: f64,
    members: usize,
    per_block: usize,
) -> Option<Vec<usize>> {
    [1.0, 10.0, 100.0, 1000.0].iter().find_map(|boost| {
        let seq = nullity_sequence(a, threshold * boost);
        if seq.last().copied().unwrap_or(0) != per_block * members {
            return None;
        }
        blocks_from_nullities(&seq, per_block)
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = i;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

struct Cluster {
    center: Complex<f64>,
    radius: f64,
    members: usize,
}

fn clusters_of(eigs: &[Complex<f64>], uf: &mut UnionFind) -> Vec<Cluster> {
    let mut groups: std::collections::BTreeMap<usize, Vec<Complex<f64>>> = Default::default();
    for (i, z) in eigs.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(*z);
    }
    groups
        .into_values()
        .map(|zs| {
            let center = zs.iter().sum::<Complex<f64>>() / zs.len() as f64;
            let radius = zs.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
            Cluster {
                center,
                radius,
                members: zs.len(),
            }
        })
        .collect()
}

enum Evaluation {
    Accepted(JordanStructure),
    Inconsistent,
}

fn evaluate(
    m: &Matrix,
    scale: f64,
    clusters: &[Cluster],
    cfg: &SpectralConfig,
    base_radius: f64,
) -> Evaluation {
    let n = m.nrows();
    // Separation between every pair of clusters.
    for (a, ca) in clusters.iter().enumerate() {
        for cb in clusters.iter().skip(a + 1) {
            let reach = 10.0 * base_radius.max(ca.radius).max(cb.radius);
            if (ca.center - cb.center).norm() <= reach {
                return Evaluation::Inconsistent;
            }
        }
    }
    let mut blocks = Vec::new();
    for c in clusters {
        let near_axis = c.center.im.abs() <= c.radius + base_radius;
        if near_axis {
            let lambda = if c.center.re.abs() <= base_radius.max(1e3 * f64::EPSILON * scale) {
                0.0
            } else {
                c.center.re
            };
            let a = m - Matrix::identity(n, n) * lambda;
            let Some(counts) =
                block_counts(&a, cfg.rank_tol * (scale + lambda.abs()), c.members, 1)
            else {
                return Evaluation::Inconsistent;
            };
            for (k, &count) in counts.iter().enumerate() {
                blocks.push(JordanBlock {
                    re: lambda,
                    im: 0.0,
                    size: k + 1,
                    count,
                });
            }
        } else if c.center.im > 0.0 {
            let mirror = clusters.iter().any(|o| {
                o.members == c.members
                    && (o.center - c.center.conj()).norm() <= base_radius.max(c.radius)
            });
            if !mirror {
                return Evaluation::Inconsistent;
            }
            let (re, abs2) = (c.center.re, c.center.norm_sqr());
            let quad = m * m - m * (2.0 * re) + Matrix::identity(n, n) * abs2;
            let s = scale + c.center.norm();
            // The quadratic factor squares the conditioning; the complex
            // linear factor recovers the same counts when it is too blurred.
            let counts = block_counts(&quad, cfg.rank_tol * s * s, c.members, 2).or_else(|| {
                let shifted = m.map(|x| Complex::new(x, 0.0)) - DMatrix::identity(n, n) * c.center;
                [1.0, 10.0, 100.0, 1000.0].iter().find_map(|boost| {
                    let seq = complex_nullity_sequence(&shifted, cfg.rank_tol * s * boost);
                    if seq.last().copied().unwrap_or(0) != c.members {
                        return None;
                    }
                    blocks_from_nullities(&seq, 1)
                })
            });
            let Some(counts) = counts else {
                return Evaluation::Inconsistent;
            };
            for (k, &count) in counts.iter().enumerate() {
                blocks.push(JordanBlock {
                    re,
                    im: c.center.im,
                    size: k + 1,
                    count,
                });
            }
        }
    }
    let s = JordanStructure::new(blocks, n);
    if s.block_dim() != n {
        return Evaluation::Inconsistent;
    }
    Evaluation::Accepted(s)
}

/// Real Jordan normal form of `m`, up to the ordering of blocks.
pub fn jordan_structure(
    m: &Matrix,
    cfg: &SpectralConfig,
) -> Result<JordanStructure, SpectralError> {
    jordan_structure_scaled(m, 0.0, cfg)
}

/// Like [`jordan_structure`], with rank cutoffs taken relative to
/// `max(‖m‖₂, scale)`.
pub fn jordan_structure_scaled(
    m: &Matrix,
    scale: f64,
    cfg: &SpectralConfig,
) -> Result<JordanStructure, SpectralError> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(SpectralError::DimensionMismatch(n, m.ncols()));
    }
    if n == 0 {
        return Ok(JordanStructure::new(Vec::new(), 0));
    }
    let norm = spectral_norm(m);
    let s = norm.max(scale);
    if s == 0.0 || norm <= cfg.rank_tol * s {
        return Ok(JordanStructure::new(
            vec![JordanBlock {
                re: 0.0,
                im: 0.0,
                size: 1,
                count: n,
            }],
            n,
        ));
    }
    let eigs = spectrum(m);
    let base_radius = cfg.cluster_tol * s.max(1.0);

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push(((eigs[i] - eigs[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut uf = UnionFind((0..n).collect());
    let mut next = 0;
    while next < pairs.len() && pairs[next].0 <= base_radius {
        uf.union(pairs[next].1, pairs[next].2);
        next += 1;
    }
    loop {
        let clusters = clusters_of(&eigs, &mut uf);
        if let Evaluation::Accepted(s) = evaluate(m, s, &clusters, cfg, base_radius) {
            return Ok(s);
        }
        // Merge the next linkage level (all pairs at the same distance).
        let mut merged = false;
        while next < pairs.len() && !merged {
            let (d, i, j) = pairs[next];
            next += 1;
            if uf.union(i, j) {
                merged = true;
                while next < pairs.len() && pairs[next].0 <= d * (1.0 + 1e-12) {
                    uf.union(pairs[next].1, pairs[next].2);
                    next += 1;
                }
            }
        }
        if !merged {
            return Err(SpectralError::IllConditioned(format!(
                "no eigenvalue grouping of this {n}×{n} matrix is consistent with its kernel dimensions"
            )));
        }
    }
}

/// Whether the two matrices are conjugate.
pub fn jordan_equivalent(
    m1: &Matrix,
    m2: &Matrix,
    cfg: &SpectralConfig,
) -> Result<bool, SpectralError> {
    if m1.shape() != m2.shape() {
        return Err(SpectralError::DimensionMismatch(m1.nrows(), m2.nrows()));
    }
    let a = jordan_structure(m1, cfg)?;
    let b = jordan_structure(m2, cfg)?;
    Ok(a.matches(
        &b,
        cfg.cluster_tol * spectral_norm(m1).max(spectral_norm(m2)).max(1.0),
    ))
}

/// `M^k ≈ 0` relative to `‖M‖^k` for some `k ≤ n`.
pub fn is_nilpotent(m: &Matrix, cfg: &SpectralConfig) -> bool {
    let n = m.nrows();
    let s = spectral_norm(m);
    if s == 0.0 {
        return true;
    }
    let mut power = m.clone();
    let mut scale = s;
    for _ in 0..n {
        if power.norm() <= cfg.rank_tol * scale {
            return true;
        }
        power = &power * m;
        scale *= s;
    }
    power.norm() <= cfg.rank_tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SpectralConfig {
        SpectralConfig::default()
    }

    fn rotation_generator() -> Matrix {
        Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    /// Two 2×2 nilpotent blocks plus two zeros, in a scrambled basis.
    fn square_zero_rank_two() -> Matrix {
        let mut j = Matrix::zeros(6, 6);
        j[(0, 1)] = 1.0;
        j[(2, 3)] = 1.0;
        let q = Matrix::from_fn(6, 6, |i, k| {
            if i == k {
                2.0
            } else {
                0.1 * ((i * 5 + k * 3) % 7) as f64 - 0.3
            }
        });
        let qi = q.clone().try_inverse().unwrap();
        q * j * qi
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&Matrix::zeros(5, 5), &cfg()), 0);
        assert_eq!(numerical_rank(&rotation_generator(), &cfg()), 2);
        // Rounding noise is not rank once an external scale is supplied.
        let noise = Matrix::from_element(3, 3, 1e-17);
        assert_eq!(numerical_rank(&noise, &cfg()), 1);
        assert_eq!(numerical_rank_scaled(&noise, 1.0, &cfg()), 0);
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&rotation_generator());
        assert_eq!(s.len(), 3);
        assert!((s[0] - Complex::new(0.0, -1.0)).norm() < 1e-12);
        assert!((s[1] - Complex::new(0.0, 0.0)).norm() < 1e-12);
        assert!((s[2] - Complex::new(0.0, 1.0)).norm() < 1e-12);

        let s = spectrum(&square_zero_rank_two());
        assert!(s.iter().all(|z| z.norm() < 1e-6));

        let s = spectrum(&Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            2.0, 3.0,
        ])));
        assert_eq!(s.len(), 2);
        assert!((s[0] - Complex::new(2.0, 0.0)).norm() < 1e-12);
        assert!((s[1] - Complex::new(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn jordan_of_zero_matrix() {
        let s = jordan_structure(&Matrix::zeros(4, 4), &cfg()).unwrap();
        assert_eq!(
            s.blocks,
            vec![JordanBlock {
                re: 0.0,
                im: 0.0,
                size: 1,
                count: 4
            }]
        );
    }

    #[test]
    fn jordan_of_square_zero_matrix_follows_rank() {
        let s = jordan_structure(&square_zero_rank_two(), &cfg()).unwrap();
        assert_eq!(s.dim, 6);
        assert_eq!(s.blocks.len(), 2);
        assert_eq!((s.blocks[0].size, s.blocks[0].count), (1, 2));
        assert_eq!((s.blocks[1].size, s.blocks[1].count), (2, 2));
        assert!(s.is_nilpotent(1e-6));
        assert_eq!(s.rank(1e-6), 2);
    }

    #[test]
    fn jordan_of_rotation_generator() {
        // Rank-sequence oracle by hand: M + 0 has nullity 1 (one zero block);
        // M² + I = diag(0, 0, 1) has nullity 2 (one pair block of size 1).
        let m = rotation_generator();
        let quad = &m * &m + Matrix::identity(3, 3);
        assert_eq!(
            quad,
            Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 0.0, 1.0]))
        );
        let s = jordan_structure(&m, &cfg()).unwrap();
        assert_eq!(
            s.blocks,
            vec![
                JordanBlock {
                    re: 0.0,
                    im: 0.0,
                    size: 1,
                    count: 1
                },
                JordanBlock {
                    re: 0.0,
                    im: 1.0,
                    size: 1,
                    count: 1
                },
            ]
        );
        assert_eq!(s.block_dim(), 3);
    }

    #[test]
    fn single_large_block_is_recovered() {
        let mut j = Matrix::identity(6, 6) * 1.5;
        for i in 0..5 {
            j[(i, i + 1)] = 1.0;
        }
        let q = Matrix::from_fn(6, 6, |i, k| {
            if i == k {
                1.0
            } else {
                0.2 * ((i * 3 + k) % 5) as f64 - 0.4
            }
        });
        let m = &q * j * q.clone().try_inverse().unwrap();
        let s = jordan_structure(&m, &cfg()).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert_eq!((s.blocks[0].size, s.blocks[0].count), (6, 1));
        assert!((s.blocks[0].re - 1.5).abs() < 1e-8);
    }

    #[test]
    fn equivalence_examples() {
        let m = square_zero_rank_two();
        let mut other = Matrix::zeros(6, 6);
        other[(5, 0)] = 3.0;
        other[(4, 1)] = -1.0;
        assert!(jordan_equivalent(&m, &other, &cfg()).unwrap());

        let a = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
        let b = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.0]));
        assert!(!jordan_equivalent(&a, &b, &cfg()).unwrap());
        assert!(jordan_equivalent(&a, &Matrix::zeros(3, 3), &cfg()).is_err());
    }

    #[test]
    fn nilpotency_examples() {
        let mut upper = Matrix::zeros(4, 4);
        for i in 0..4 {
            for k in (i + 1)..4 {
                upper[(i, k)] = (i + k) as f64;
            }
        }
        assert!(is_nilpotent(&upper, &cfg()));
        assert!(!is_nilpotent(&Matrix::identity(3, 3), &cfg()));
        assert!(is_nilpotent(&square_zero_rank_two(), &cfg()));
        assert!(is_nilpotent(&Matrix::zeros(2, 2), &cfg()));
    }

    #[test]
    fn nullity_partition_recovery() {
        // Blocks of sizes 3, 1, 1: nullities 3, 4, 5.
        assert_eq!(blocks_from_nullities(&[3, 4, 5], 1), Some(vec![2, 0, 1]));
        assert_eq!(blocks_from_nullities(&[2, 4], 2), Some(vec![0, 1]));
        assert_eq!(blocks_from_nullities(&[1, 3], 1), None);
    }
}
