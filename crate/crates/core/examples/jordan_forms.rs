//! Real Jordan forms: recovery after conjugation, and the curvature
//! operators of the nilpotent family.

use curvlab::probe::{probe, sample_plane};
use curvlab::random::{
    jordan_structure as random_structure, real_jordan_matrix, seeded, well_conditioned,
};
use curvlab::spectral::jordan_structure;
use curvlab::zoo::example_zoo;
use curvlab::{CausalType, ProbeMode, SpectralConfig, Tolerances};

fn main() {
    let cfg = SpectralConfig::default();
    let mut rng = seeded(7);
    for _ in 0..3 {
        let s = random_structure(&mut rng, 6, 0.5);
        let q = well_conditioned(&mut rng, s.dim, 100.0);
        let m = &q * real_jordan_matrix(&s) * q.clone().try_inverse().unwrap();
        let got = jordan_structure(&m, &cfg).unwrap();
        println!("built     {:?}", s.blocks);
        println!("recovered {:?}", got.blocks);
        println!("match: {}\n", got.matches(&s, 1e-6 * m.norm().max(1.0)));
    }

    let tol = Tolerances::default();
    let e = example_zoo("nilpotent-phik", 5, 5, Some(5)).unwrap();
    let plane = sample_plane(e.tensor.space(), CausalType::Spacelike, 1, &tol).unwrap();
    let op = e.tensor.curvature_operator(&plane, &tol).unwrap();
    println!(
        "R(π) on a spacelike plane: {:?}",
        jordan_structure(&op.matrix, &cfg).unwrap().blocks
    );
    for class in [
        CausalType::Spacelike,
        CausalType::Timelike,
        CausalType::Mixed,
    ] {
        let rep = probe(
            &e.tensor,
            class,
            200,
            ProbeMode::Jordan,
            3,
            &tol,
            &e.witnesses,
        )
        .unwrap();
        println!("{:<10} {}", class.as_str(), rep.verdict.name());
    }
}
