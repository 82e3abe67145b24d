//! The acceptance suite: ten criteria, each a list of named checks. Shared
//! by `curvlab selftest` and the `acceptance` test target.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::classify::{reconstruct_phi, ClassifyError, ReconstructConfig};
use crate::curvature::CurvatureTensor;
use crate::geometry::{
    hypersurface_curvature, verify_model, HypersurfaceConfig, ModelConfig, ModelReport,
    PseudoSphereConfig, SurfaceSpec, VerifyOptions, WarpedConfig,
};
use crate::probe::{evaluate_plane, probe, probe_planes, ProbeMode, ProbeReport, Verdict};
use crate::pseudo::{CausalType, InnerProductSpace, Matrix, OrientedPlane, SelfAdjointMap};
use crate::random::{self, gaussian_matrix, gaussian_vector, seeded, stream_seed};
use crate::spectral::{jordan_structure, numerical_rank, JordanBlock, SpectralConfig};
use crate::tol::Tolerances;
use crate::zoo::{example_zoo, ZooEntry};

/// Every numerical limit of the suite.
pub mod limits {
    pub const SYMMETRY: f64 = 1e-12;
    pub const SYMMETRY_SECONDS: f64 = 5.0;
    pub const SYMMETRY_MAPS: usize = 200;
    pub const FORWARD_MAPS: usize = 50;
    pub const FORWARD_SAMPLES: usize = 500;
    pub const CONVERSE_MAPS: usize = 50;
    pub const PROBE_SAMPLES: usize = 1000;
    pub const NILPOTENT: f64 = 1e-10;
    pub const ORACLE_TRIALS: usize = 500;
    pub const ORACLE_MAX_DIM: usize = 8;
    pub const ORACLE_SEPARATION: f64 = 0.5;
    pub const ORACLE_CONDITION: f64 = 1e3;
    pub const FD_RESIDUAL: f64 = 1e-5;
    pub const CURVATURE: f64 = 1e-5;
    pub const HALVING_RATIO: (f64, f64) = (3.5, 4.5);
    pub const PHI_SQUARE: f64 = 1e-6;
    pub const SHAPE_SQUARE: f64 = 1e-8;
    pub const ROUND_TRIP: f64 = 1e-8;
    pub const ISOMETRIES: usize = 100;
    pub const PARA_ISOMETRIES: usize = 20;
}

const SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub group: &'static str,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        name: "curvature-symmetries",
        group: "algebra",
    },
    Criterion {
        id: 2,
        name: "spacelike-rank-two",
        group: "probes",
    },
    Criterion {
        id: 3,
        name: "projection-ranks",
        group: "probes",
    },
    Criterion {
        id: 4,
        name: "rank-four",
        group: "probes",
    },
    Criterion {
        id: 5,
        name: "nilpotent-family",
        group: "probes",
    },
    Criterion {
        id: 6,
        name: "jordan-oracle",
        group: "spectral",
    },
    Criterion {
        id: 7,
        name: "pseudo-spheres",
        group: "geometry",
    },
    Criterion {
        id: 8,
        name: "warped-product",
        group: "geometry",
    },
    Criterion {
        id: 9,
        name: "hypersurfaces",
        group: "geometry",
    },
    Criterion {
        id: 10,
        name: "reconstruction",
        group: "algebra",
    },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub group: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn check(&mut self, label: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.0.push(Check {
            label: label.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn error(&mut self, label: impl Into<String>, e: impl std::fmt::Display) {
        self.check(label, false, format!("error: {e}"));
    }
}

/// Whether `filter` selects the criterion: an id, a name, a group, or a
/// substring of the name.
pub fn selects(c: &Criterion, filter: &str) -> bool {
    let f = filter.trim().to_ascii_lowercase();
    f == c.id.to_string() || f == c.group || c.name.contains(f.as_str())
}

pub fn run_criterion(c: &Criterion) -> Outcome {
    let start = Instant::now();
    let mut k = Checks::default();
    match c.id {
        1 => symmetries(&mut k),
        2 => spacelike_rank_two(&mut k),
        3 => projection_ranks(&mut k),
        4 => rank_four(&mut k),
        5 => nilpotent_family(&mut k),
        6 => jordan_oracle(&mut k),
        7 => pseudo_spheres(&mut k),
        8 => warped_product(&mut k),
        9 => hypersurfaces(&mut k),
        10 => reconstruction(&mut k),
        _ => k.check("known criterion", false, format!("no criterion {}", c.id)),
    }
    if c.id == 1 {
        let secs = start.elapsed().as_secs_f64();
        k.check(
            "runtime",
            secs < limits::SYMMETRY_SECONDS,
            format!("{secs:.2} s (limit {} s)", limits::SYMMETRY_SECONDS),
        );
    }
    Outcome {
        id: c.id,
        name: c.name,
        group: c.group,
        pass: !k.0.is_empty() && k.0.iter().all(|c| c.pass),
        seconds: start.elapsed().as_secs_f64(),
        checks: k.0,
    }
}

/// Runs the selected criteria in order.
pub fn run(filter: Option<&str>) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter(|c| filter.is_none_or(|f| selects(c, f)))
        .map(run_criterion)
        .collect()
}

fn symmetries(k: &mut Checks) {
    let sigs = [(0, 5), (1, 5), (2, 5), (3, 3), (5, 5)];
    let per = limits::SYMMETRY_MAPS / sigs.len();
    let mut worst = 0.0_f64;
    for (si, &(p, q)) in sigs.iter().enumerate() {
        let space = InnerProductSpace::canonical(p, q);
        for i in 0..per {
            let mut rng = seeded(stream_seed(SEED, (si * 1000 + i) as u64));
            let phi = random::self_adjoint(&mut rng, &space);
            worst = worst.max(CurvatureTensor::from_phi(&phi).validate().max_relative());
        }
    }
    k.check(
        "curvature identities of R_φ",
        worst <= limits::SYMMETRY,
        format!(
            "{} maps, worst relative residual {worst:.2e}",
            per * sigs.len()
        ),
    );
}

fn rank_verdict(rep: &ProbeReport) -> String {
    format!("{} {:?}", rep.verdict.name(), rep.rank_histogram)
}

fn is_constant_rank(rep: &ProbeReport, r: usize) -> bool {
    rep.verdict == Verdict::ConstantRank { rank: r }
}

/// Random plane spanned by a given vector and a Gaussian one, of the
/// requested class.
fn plane_through<R: Rng>(
    rng: &mut R,
    space: &InnerProductSpace,
    v: &crate::pseudo::Vector,
    class: CausalType,
    tol: &Tolerances,
) -> Option<OrientedPlane> {
    for _ in 0..10_000 {
        let w = gaussian_vector(rng, space.dim());
        if let Ok(pl) = OrientedPlane::new(v.clone(), w) {
            if space.plane_type(&pl, tol).ok() == Some(class) {
                return Some(pl);
            }
        }
    }
    None
}

fn spacelike_rank_two(k: &mut Checks) {
    let tol = Tolerances::default();
    let sigs = [(0, 5), (1, 5), (2, 5), (3, 5), (2, 6)];
    let per = limits::FORWARD_MAPS / sigs.len();
    let mut bad = Vec::new();
    let mut kernels = BTreeSet::new();
    for (si, &(p, q)) in sigs.iter().enumerate() {
        let space = InnerProductSpace::canonical(p, q);
        for i in 0..per {
            let tag = (si * 1000 + i) as u64;
            let mut rng = seeded(stream_seed(SEED + 2, tag));
            // ker φ = {(a, La)} with |L| ≤ 1 contains no spacelike vector;
            // |L| = 1 on the kernel makes it totally isotropic.
            let dim_ker = rng.random_range(0..=p);
            let a = gaussian_matrix(&mut rng, p, dim_ker);
            let emb = random::orthogonal(&mut rng, q).columns(0, p).into_owned();
            let shrink = if i % 2 == 0 { 1.0 } else { 0.6 };
            let mut kernel = Matrix::zeros(p + q, dim_ker);
            kernel.view_mut((0, 0), (p, dim_ker)).copy_from(&a);
            kernel
                .view_mut((p, 0), (q, dim_ker))
                .copy_from(&(&emb * &a * shrink));
            let phi = random::self_adjoint_with_kernel(&mut rng, &space, &kernel);
            let content = phi.kernel_causal_content(&tol);
            kernels.insert(dim_ker);
            let r = CurvatureTensor::from_phi(&phi);
            let rep = probe(
                &r,
                CausalType::Spacelike,
                limits::FORWARD_SAMPLES,
                ProbeMode::Rank,
                stream_seed(SEED + 3, tag),
                &tol,
                &[],
            );
            match rep {
                Ok(rep) if !content.has_spacelike && is_constant_rank(&rep, 2) => {}
                Ok(rep) => bad.push(format!("({p},{q}) map {i}: {}", rank_verdict(&rep))),
                Err(e) => bad.push(format!("({p},{q}) map {i}: {e}")),
            }
        }
    }
    k.check(
        "kernel without spacelike vectors gives spacelike rank 2",
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{} maps, kernel dimensions {kernels:?}, {} spacelike planes each",
                per * sigs.len(),
                limits::FORWARD_SAMPLES
            )
        } else {
            bad.join("; ")
        },
    );

    let mut bad = Vec::new();
    for i in 0..limits::CONVERSE_MAPS {
        let (p, q) = sigs[i % sigs.len()];
        let space = InnerProductSpace::canonical(p, q);
        let mut rng = seeded(stream_seed(SEED + 4, i as u64));
        let s = loop {
            let s = gaussian_vector(&mut rng, p + q);
            let ss = space.inner(&s, &s).expect("dimension matches");
            if ss >= 0.25 * s.norm_squared() {
                break s;
            }
        };
        let extra = rng.random_range(0..=2);
        let mut kernel = gaussian_matrix(&mut rng, p + q, 1 + extra);
        kernel.set_column(0, &s);
        let phi = random::self_adjoint_with_kernel(&mut rng, &space, &kernel);
        let r = CurvatureTensor::from_phi(&phi);
        let Some(through) = plane_through(&mut rng, &space, &s, CausalType::Spacelike, &tol) else {
            bad.push(format!(
                "map {i}: no spacelike plane through the kernel vector"
            ));
            continue;
        };
        let witness_rank = evaluate_plane(&r, &through, ProbeMode::Rank, &tol).map(|s| s.rank);
        let rep = probe(
            &r,
            CausalType::Spacelike,
            limits::FORWARD_SAMPLES,
            ProbeMode::Rank,
            stream_seed(SEED + 5, i as u64),
            &tol,
            std::slice::from_ref(&through),
        );
        match (witness_rank, rep) {
            (Ok(0), Ok(rep))
                if rep.verdict == Verdict::NonConstantRank && rep.observed_ranks() == [0, 2] => {}
            (w, rep) => bad.push(format!(
                "({p},{q}) map {i}: witness rank {w:?}, probe {:?}",
                rep.map(|r| rank_verdict(&r))
            )),
        }
    }
    k.check(
        "spacelike kernel vector gives a rank-0 witness",
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{} maps, each with ranks {{0, 2}} on spacelike planes",
                limits::CONVERSE_MAPS
            )
        } else {
            bad.join("; ")
        },
    );
}

fn zoo(k: &mut Checks, name: &str, p: usize, q: usize, kk: Option<usize>) -> Option<ZooEntry> {
    match example_zoo(name, p, q, kk) {
        Ok(e) => Some(e),
        Err(e) => {
            k.error(format!("{name} ({p},{q})"), e);
            None
        }
    }
}

fn probe_entry(
    e: &ZooEntry,
    class: CausalType,
    mode: ProbeMode,
    salt: u64,
) -> Result<ProbeReport, String> {
    probe(
        &e.tensor,
        class,
        limits::PROBE_SAMPLES,
        mode,
        stream_seed(SEED + 6, salt),
        &Tolerances::default(),
        &e.witnesses,
    )
    .map_err(|e| e.to_string())
}

/// Ranks of the entry's witness planes that belong to `class`.
fn witness_ranks(e: &ZooEntry, class: CausalType) -> BTreeSet<usize> {
    let tol = Tolerances::default();
    e.witnesses
        .iter()
        .filter(|w| e.tensor.space().plane_type(w, &tol).ok() == Some(class))
        .filter_map(|w| evaluate_plane(&e.tensor, w, ProbeMode::Rank, &tol).ok())
        .map(|s| s.rank)
        .collect()
}

fn expect_rank(
    k: &mut Checks,
    e: &ZooEntry,
    label: &str,
    class: CausalType,
    rank: Option<usize>,
    salt: u64,
) {
    let (p, q) = (e.tensor.space().p(), e.tensor.space().q());
    let label = format!("{} ({p},{q}) {class}: {label}", e.name);
    match probe_entry(e, class, ProbeMode::Rank, salt) {
        Ok(rep) => {
            let pass = match rank {
                Some(r) => is_constant_rank(&rep, r),
                None => rep.verdict == Verdict::NonConstantRank,
            };
            k.check(label, pass, rank_verdict(&rep));
        }
        Err(err) => k.error(label, err),
    }
}

fn expect_jump(k: &mut Checks, e: &ZooEntry, class: CausalType, ranks: &[usize], salt: u64) {
    let (p, q) = (e.tensor.space().p(), e.tensor.space().q());
    let label = format!(
        "{} ({p},{q}) {class}: ranks {ranks:?} with witnesses",
        e.name
    );
    let want: BTreeSet<usize> = ranks.iter().copied().collect();
    let wit = witness_ranks(e, class);
    match probe_entry(e, class, ProbeMode::Rank, salt) {
        Ok(rep) => {
            let seen: BTreeSet<usize> = rep.observed_ranks().into_iter().collect();
            let pass =
                rep.verdict == Verdict::NonConstantRank && want.is_subset(&seen) && wit == want;
            k.check(
                label,
                pass,
                format!("{}, witness ranks {wit:?}", rank_verdict(&rep)),
            );
        }
        Err(err) => k.error(label, err),
    }
}

fn projection_ranks(k: &mut Checks) {
    use CausalType::*;
    if let Some(e) = zoo(k, "projection", 2, 5, None) {
        expect_rank(k, &e, "constant rank 2", Spacelike, Some(2), 1);
        expect_jump(k, &e, Timelike, &[0, 2], 2);
        expect_jump(k, &e, Mixed, &[0, 2], 3);
    }
    if let Some(e) = zoo(k, "isotropic-kernel", 2, 5, None) {
        expect_rank(k, &e, "constant rank 2", Spacelike, Some(2), 4);
        expect_rank(k, &e, "constant rank 2", Timelike, Some(2), 5);
        expect_jump(k, &e, Mixed, &[0, 2], 6);
    }
}

fn rank_four(k: &mut Checks) {
    use CausalType::*;
    let tol = Tolerances::default();
    if let Some(e) = zoo(k, "rank4", 3, 3, None) {
        expect_rank(k, &e, "constant rank 4", Spacelike, Some(4), 11);
        expect_rank(k, &e, "constant rank 4", Timelike, Some(4), 12);
        expect_rank(k, &e, "not constant", Mixed, None, 13);
        let s = e.tensor.space();
        let rank = |u, v| {
            OrientedPlane::new(u, v)
                .ok()
                .and_then(|pl| evaluate_plane(&e.tensor, &pl, ProbeMode::Rank, &tol).ok())
                .map(|s| s.rank)
        };
        let r1 = rank(s.e_minus(0), s.e_plus(0));
        let r2 = rank(s.e_minus(0), s.e_plus(1));
        k.check(
            "rank4 (3,3) mixed witnesses span{e₁⁻,e₁⁺}, span{e₁⁻,e₂⁺}",
            matches!(r1, Some(r) if r <= 2) && r2 == Some(4),
            format!("ranks {r1:?} and {r2:?}"),
        );
    }
    if let Some(e) = zoo(k, "rank4", 4, 3, None) {
        expect_rank(k, &e, "constant rank 4", Spacelike, Some(4), 14);
        expect_rank(k, &e, "not constant", Timelike, None, 15);
        expect_rank(k, &e, "not constant", Mixed, None, 16);
    }
}

/// Largest `‖M²‖ / ‖M‖²` over the operators of a probe's planes.
fn worst_square(e: &ZooEntry, class: CausalType, salt: u64) -> Result<f64, String> {
    let tol = Tolerances::default();
    let (planes, _) = probe_planes(
        e.tensor.space(),
        class,
        limits::PROBE_SAMPLES,
        stream_seed(SEED + 6, salt),
        &tol,
        &e.witnesses,
    )
    .map_err(|e| e.to_string())?;
    let mut worst = 0.0_f64;
    for pl in &planes {
        let m = evaluate_plane(&e.tensor, pl, ProbeMode::Rank, &tol)
            .map_err(|e| e.to_string())?
            .operator;
        let n2 = m.norm().powi(2);
        if n2 > 0.0 {
            worst = worst.max((&m * &m).norm() / n2);
        }
    }
    Ok(worst)
}

fn two_blocks_of_two(s: &crate::spectral::JordanStructure) -> bool {
    let n = s.dim;
    let mut want = vec![JordanBlock {
        re: 0.0,
        im: 0.0,
        size: 2,
        count: 2,
    }];
    if n > 4 {
        want.push(JordanBlock {
            re: 0.0,
            im: 0.0,
            size: 1,
            count: n - 4,
        });
    }
    s.matches(&crate::spectral::JordanStructure::new(want, n), 1e-8)
}

fn nilpotent_family(k: &mut Checks) {
    use CausalType::*;
    let classes = [Spacelike, Timelike, Mixed];
    for (kk, p) in [(2, 5), (5, 5), (5, 6)] {
        let Some(e) = zoo(k, "nilpotent-phik", p, 5, Some(kk)) else {
            continue;
        };
        let salt = (kk * 100 + p * 10) as u64;
        let mut worst = 0.0_f64;
        let mut failed = None;
        for (ci, &c) in classes.iter().enumerate() {
            match worst_square(&e, c, salt + ci as u64) {
                Ok(w) => worst = worst.max(w),
                Err(err) => failed = Some(err),
            }
        }
        k.check(
            format!("k={kk} ({p},5): every sampled operator squares to zero"),
            failed.is_none() && worst <= limits::NILPOTENT,
            failed.unwrap_or_else(|| format!("worst |M²|/|M|² = {worst:.2e}")),
        );
    }
    if let Some(e) = zoo(k, "nilpotent-phik", 5, 5, Some(2)) {
        for (ci, &c) in classes.iter().enumerate() {
            let label = format!("k=2 (5,5) {c}: rank jumps between <2 and 2");
            match probe_entry(&e, c, ProbeMode::Rank, 200 + ci as u64) {
                Ok(rep) => {
                    let ranks = rep.observed_ranks();
                    let pass = rep.verdict == Verdict::NonConstantRank
                        && ranks.contains(&2)
                        && ranks.iter().any(|&r| r < 2);
                    k.check(label, pass, rank_verdict(&rep));
                }
                Err(err) => k.error(label, err),
            }
        }
    }
    for (p, salt) in [(5, 300), (6, 400)] {
        let Some(e) = zoo(k, "nilpotent-phik", p, 5, Some(5)) else {
            continue;
        };
        for (ci, &c) in classes.iter().enumerate() {
            let constant = c == Spacelike || (c == Timelike && p == 5);
            let label = format!(
                "k=5 ({p},5) {c}: {}",
                if constant {
                    "two size-2 blocks at 0"
                } else {
                    "not constant"
                }
            );
            match probe_entry(&e, c, ProbeMode::Jordan, salt + ci as u64) {
                Ok(rep) => {
                    let pass = match (&rep.verdict, constant) {
                        (Verdict::JordanConstant { structure }, true) => {
                            two_blocks_of_two(structure)
                        }
                        (Verdict::NonConstantRank | Verdict::JordanNonConstant, false) => true,
                        _ => false,
                    };
                    let detail = match &rep.verdict {
                        Verdict::JordanConstant { structure } => {
                            format!("JordanConstant {:?}", structure.blocks)
                        }
                        _ => rank_verdict(&rep),
                    };
                    k.check(label, pass, detail);
                }
                Err(err) => k.error(label, err),
            }
        }
    }
}

fn jordan_oracle(k: &mut Checks) {
    let cfg = SpectralConfig::default();
    let mut failures = Vec::new();
    let mut dims = BTreeSet::new();
    for t in 0..limits::ORACLE_TRIALS {
        let mut rng = seeded(stream_seed(SEED + 7, t as u64));
        let s =
            random::jordan_structure(&mut rng, limits::ORACLE_MAX_DIM, limits::ORACLE_SEPARATION);
        dims.insert(s.dim);
        let q = random::well_conditioned(&mut rng, s.dim, limits::ORACLE_CONDITION);
        let qi = q.clone().try_inverse().expect("well conditioned");
        let m = &q * random::real_jordan_matrix(&s) * qi;
        // Eigenvalues are resolved to the cluster tolerance relative to |M|.
        let tol = 10.0 * cfg.cluster_tol * m.norm().max(1.0);
        match jordan_structure(&m, &cfg) {
            Ok(got) if got.matches(&s, tol) => {}
            other => failures.push(format!("trial {t}: {other:?}")),
        }
    }
    k.check(
        "random real Jordan forms recovered after conjugation",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} trials, dimensions {dims:?}", limits::ORACLE_TRIALS)
        } else {
            format!("{} failures; first {}", failures.len(), failures[0])
        },
    );
}

fn verified(k: &mut Checks, label: &str, cfg: ModelConfig) -> Option<ModelReport> {
    match verify_model(&cfg, &VerifyOptions::default()) {
        Ok(rep) => {
            k.check(
                format!("{label}: verification passes"),
                rep.pass,
                if rep.pass {
                    format!("max residual {:.2e}", rep.max_residual)
                } else {
                    rep.failures.join("; ")
                },
            );
            Some(rep)
        }
        Err(e) => {
            k.error(label, e);
            None
        }
    }
}

fn sphere(r: usize, s: usize, rho: f64) -> ModelConfig {
    ModelConfig::PseudoSphere(PseudoSphereConfig {
        r,
        s,
        rho,
        delta: 1,
        solve_index: None,
        points: None,
    })
}

fn pseudo_spheres(k: &mut Checks) {
    if let Some(rep) = verified(k, "S(0,3) ϱ=1", sphere(0, 3, 1.0)) {
        let worst = rep
            .points
            .iter()
            .map(|p| (p.measured.unwrap_or(f64::NAN) - 1.0).abs())
            .fold(0.0, f64::max);
        k.check(
            "S(0,3) ϱ=1: κ = 1",
            worst <= limits::CURVATURE && rep.points.len() == 5,
            format!(
                "worst |κ − 1| = {worst:.2e} over {} points",
                rep.points.len()
            ),
        );
    }
    for (r, s) in [(1, 2), (2, 3)] {
        let label = format!("S({r},{s}) ϱ=1");
        if let Some(rep) = verified(k, &label, sphere(r, s, 1.0)) {
            let worst = rep
                .points
                .iter()
                .map(|p| p.sectional_spread.unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            k.check(
                format!("{label}: sectional curvature constant over 100 planes"),
                worst <= limits::CURVATURE && rep.points.len() == 5,
                format!("worst spread {worst:.2e} over {} points", rep.points.len()),
            );
        }
    }
    if let Some(rep) = verified(k, "S(1,2) ϱ=2", sphere(1, 2, 2.0)) {
        match &rep.normalization {
            Some(n) => k.check(
                "S(1,2) ϱ=2: normalization reported",
                !n.matched.is_empty(),
                format!(
                    "κ = {:.6}, candidates ϱ = {}, ϱ² = {}, matched {:?}",
                    n.measured, n.rho, n.rho_squared, n.matched
                ),
            ),
            None => k.check("S(1,2) ϱ=2: normalization reported", false, "missing"),
        }
    }
}

fn warped_product(k: &mut Checks) {
    for fiber in [[1, 2], [2, 3]] {
        let label = format!("warped, fiber {fiber:?}");
        let cfg = WarpedConfig {
            fiber,
            ..WarpedConfig::demo()
        };
        let Some(rep) = verified(k, &label, ModelConfig::Warped(cfg)) else {
            continue;
        };
        let worst = rep.points.iter().map(|p| p.residual).fold(0.0, f64::max);
        k.check(
            format!("{label}: |R_fd − C(t)R_φ| at t = 0, ½, 1"),
            worst <= limits::FD_RESIDUAL && rep.points.len() == 3,
            format!("worst relative residual {worst:.2e}"),
        );
        let cs: Vec<(f64, f64)> = rep
            .points
            .iter()
            .map(|p| (p.x[0], p.closed_form.unwrap_or(f64::NAN)))
            .collect();
        let at = |t: f64| cs.iter().find(|c| c.0 == t).map(|c| c.1);
        k.check(
            format!("{label}: C(0) = 1, C(1) = ¼"),
            at(0.0) == Some(1.0) && at(1.0) == Some(0.25),
            format!("C(t) = {cs:?}"),
        );
        let measured_ok = rep.points.iter().all(|p| {
            let (m, c) = (
                p.measured.unwrap_or(f64::NAN),
                p.closed_form.unwrap_or(f64::NAN),
            );
            (m - c).abs() <= limits::FD_RESIDUAL * c.abs()
        });
        k.check(
            format!("{label}: fitted C(t) matches the closed form"),
            measured_ok,
            format!(
                "measured {:?}",
                rep.points.iter().map(|p| p.measured).collect::<Vec<_>>()
            ),
        );
        match &rep.step_halving {
            Some(sh) => k.check(
                format!("{label}: halving h divides the residual by ≈ 4"),
                (limits::HALVING_RATIO.0..=limits::HALVING_RATIO.1).contains(&sh.ratio),
                format!(
                    "{:.3e} → {:.3e}, ratio {:.3}",
                    sh.residual_h, sh.residual_half, sh.ratio
                ),
            ),
            None => k.check(format!("{label}: step halving"), false, "missing"),
        }
        let achievable: Vec<_> = rep.probes.iter().filter(|p| !p.unachievable).collect();
        let probes_ok = !achievable.is_empty()
            && achievable
                .iter()
                .all(|p| p.verdict.as_deref() == Some("JordanConstant") && p.ranks == [2]);
        let classes: BTreeSet<String> = achievable.iter().map(|p| p.class.to_string()).collect();
        k.check(
            format!("{label}: Jordan probes constant with rank 2"),
            probes_ok,
            format!("{} probes over classes {classes:?}", achievable.len()),
        );
        let worst_phi = rep
            .points
            .iter()
            .map(|p| p.phi_residual.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        k.check(
            format!("{label}: reconstructed φ is an isometry"),
            worst_phi <= limits::PHI_SQUARE,
            format!("worst |φ² − id| = {worst_phi:.2e}"),
        );
    }
}

fn hypersurfaces(k: &mut Checks) {
    let sphere = ModelConfig::Hypersurface(HypersurfaceConfig {
        surface: SurfaceSpec::PseudoSphere {
            r: 0,
            s: 4,
            rho: 1.0,
            delta: 1,
            solve_index: None,
        },
        points: None,
    });
    if let Some(rep) = verified(k, "unit sphere in (0,4)", sphere) {
        let worst = rep
            .points
            .iter()
            .map(|p| p.gauss_residual.unwrap_or(f64::INFINITY).max(p.residual))
            .fold(0.0, f64::max);
        k.check(
            "unit sphere in (0,4): intrinsic curvature equals R_S",
            worst <= limits::FD_RESIDUAL,
            format!("worst relative residual {worst:.2e}"),
        );
    }
    let graph = ModelConfig::Hypersurface(HypersurfaceConfig {
        surface: SurfaceSpec::Graph {
            p: 5,
            hessian: None,
        },
        points: None,
    });
    if let Some(rep) = verified(k, "graph p=5", graph) {
        let sq = rep
            .points
            .iter()
            .map(|p| p.shape_square.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        k.check(
            "graph p=5: S² = 0",
            sq <= limits::SHAPE_SQUARE,
            format!("worst |S²| = {sq:.2e}"),
        );
        let kernel_ok = rep
            .points
            .iter()
            .all(|p| p.kernel_dim == Some(5) && p.kernel_totally_isotropic == Some(true));
        k.check(
            "graph p=5: ker S is 5-dimensional and totally isotropic",
            kernel_ok,
            format!(
                "kernel dimensions {:?}",
                rep.points.iter().map(|p| p.kernel_dim).collect::<Vec<_>>()
            ),
        );
        let probes_ok = rep.probes.len() == 2 * rep.points.len()
            && rep.probes.iter().all(|p| {
                p.verdict.as_deref() == Some("JordanConstant")
                    && p.ranks == [2]
                    && p.nilpotent == Some(true)
            });
        k.check(
            "graph p=5: spacelike and timelike probes constant, rank 2, nilpotent",
            probes_ok,
            format!("{} probes", rep.probes.len()),
        );
    }
    graph_kernel(k);
}

/// `ker S = range S = span{∂_i}` over the first `p` coordinates.
fn graph_kernel(k: &mut Checks) {
    let p = 5;
    let g = match crate::geometry::graph_hypersurface(p, &Matrix::identity(p, p)) {
        Ok(g) => g,
        Err(e) => return k.error("graph p=5 kernel", e),
    };
    let x = [
        0.05, -0.02, 0.03, 0.01, -0.04, 0.02, 0.06, -0.03, 0.01, 0.05,
    ];
    let hc = match hypersurface_curvature(&g, &x, VerifyOptions::default().h) {
        Ok(hc) => hc,
        Err(e) => return k.error("graph p=5 kernel", e),
    };
    let tol = Tolerances::finite_difference();
    let s = hc.shape.matrix();
    let rank = numerical_rank(s, &SpectralConfig::from(&tol));
    let kernel = hc.shape.kernel_basis(tol.rank);
    let off = kernel
        .iter()
        .map(|v| v.rows(p, p).amax() / v.amax())
        .fold(0.0, f64::max);
    let range_off = s.rows(p, p).amax() / s.amax();
    k.check(
        "graph p=5: rank S = dim ker S = 5, ker S = range S = span{∂x}",
        rank == p && kernel.len() == p && off <= 1e-6 && range_off <= 1e-6,
        format!(
            "rank {rank}, kernel dimension {}, off-span parts {off:.1e} and {range_off:.1e}",
            kernel.len()
        ),
    );
}

fn reconstruction(k: &mut Checks) {
    let cfg = ReconstructConfig::default();
    let sigs = [(0, 5), (1, 4), (2, 5), (3, 3), (4, 2)];
    let mut bad = Vec::new();
    let mut worst = 0.0_f64;
    let mut check = |phi: SelfAdjointMap, c: f64, label: String, bad: &mut Vec<String>| {
        let r = CurvatureTensor::from_phi(&phi).scaled(c);
        match reconstruct_phi(&r, &cfg) {
            Ok(rec) => {
                let d = (rec.phi.matrix() - phi.matrix())
                    .amax()
                    .min((rec.phi.matrix() + phi.matrix()).amax());
                let dc = (rec.c - c).abs() / c.abs();
                let err = d.max(dc).max(rec.residual);
                worst = worst.max(err);
                if err > limits::ROUND_TRIP {
                    bad.push(format!(
                        "{label}: |Δφ| {d:.1e}, |ΔC| {dc:.1e}, residual {:.1e}",
                        rec.residual
                    ));
                }
            }
            Err(e) => bad.push(format!("{label}: {e}")),
        }
    };
    for i in 0..limits::ISOMETRIES {
        let (p, q) = sigs[i % sigs.len()];
        let mut rng = seeded(stream_seed(SEED + 8, i as u64));
        let space = InnerProductSpace::canonical(p, q);
        let phi = random::isometry(&mut rng, &space);
        let c = (0.5 + 1.5 * rng.random::<f64>()) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        check(phi, c, format!("isometry {i} ({p},{q})"), &mut bad);
    }
    for i in 0..limits::PARA_ISOMETRIES {
        let p = 2 + i % 4;
        let mut rng = seeded(stream_seed(SEED + 9, i as u64));
        let space = InnerProductSpace::canonical(p, p);
        let phi = random::para_isometry(&mut rng, &space);
        let c = (0.5 + 1.5 * rng.random::<f64>()) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        check(phi, c, format!("para-isometry {i} ({p},{p})"), &mut bad);
    }
    k.check(
        "C·R_φ gives back (±φ, C)",
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{} isometries and {} para-isometries, worst error {worst:.2e}",
                limits::ISOMETRIES,
                limits::PARA_ISOMETRIES
            )
        } else {
            bad.join("; ")
        },
    );
    if let Some(e) = zoo(k, "rank4", 3, 3, None) {
        let rec = reconstruct_phi(&e.tensor, &cfg);
        k.check(
            "rank4 (3,3) is not C·R_φ",
            matches!(rec, Err(ClassifyError::NotDecomposable(_))),
            match rec {
                Ok(r) => format!("accepted with residual {:.2e}", r.residual),
                Err(e) => e.to_string(),
            },
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters() {
        let ids = |f: &str| -> Vec<usize> {
            CRITERIA
                .iter()
                .filter(|c| selects(c, f))
                .map(|c| c.id)
                .collect()
        };
        assert_eq!(ids("geometry"), vec![7, 8, 9]);
        assert_eq!(ids("6"), vec![6]);
        assert_eq!(ids("warped"), vec![8]);
        assert!(ids("nothing-like-this").is_empty());
    }
}
