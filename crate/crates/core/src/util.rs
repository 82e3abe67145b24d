use nalgebra::DMatrix;

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub(crate) fn max_abs_slice(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Singular values together with the right singular vectors, with short-wide
/// inputs padded by zero rows so that `V` spans the full domain.
fn full_svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    (
        svd.singular_values.iter().copied().collect(),
        v_t.transpose(),
    )
}

pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Orthonormal basis (columns) of `{x : m x ≈ 0}` where singular values at or
/// below `threshold` count as zero.
pub(crate) fn null_space(m: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    let (sv, v) = full_svd(m);
    let keep: Vec<usize> = (0..cols).filter(|&i| sv[i] <= threshold).collect();
    let mut out = DMatrix::zeros(cols, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &v.column(i));
    }
    out
}

/// The `k` leading left singular vectors.
pub(crate) fn leading_left_vectors(m: &DMatrix<f64>, k: usize) -> (DMatrix<f64>, Vec<f64>) {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let k = k.min(order.len());
    let mut out = DMatrix::zeros(m.nrows(), k);
    let mut sv = Vec::with_capacity(k);
    for (c, &i) in order.iter().take(k).enumerate() {
        out.set_column(c, &u.column(i));
        sv.push(svd.singular_values[i]);
    }
    (out, sv)
}

/// SplitMix64 finaliser, used to derive independent per-sample seeds.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
