//! Sorting C·R_φ into its rank-2 type and recovering (φ, C) from the
//! components alone.

use curvlab::random::{isometry, para_isometry, seeded};
use curvlab::zoo::example_zoo;
use curvlab::{
    classify_rank2, reconstruct_phi, CurvatureTensor, InnerProductSpace, ReconstructConfig,
    Tolerances,
};

fn main() {
    let tol = Tolerances::default();
    let cfg = ReconstructConfig::default();
    let space = InnerProductSpace::canonical(3, 3);
    let mut rng = seeded(11);

    for (label, phi, c) in [
        ("isometry", isometry(&mut rng, &space), 2.5),
        ("para-isometry", para_isometry(&mut rng, &space), 0.7),
    ] {
        let r = CurvatureTensor::from_phi(&phi).scaled(c);
        let rec = reconstruct_phi(&r, &cfg).unwrap();
        let err = (rec.phi.matrix() - phi.matrix())
            .norm()
            .min((rec.phi.matrix() + phi.matrix()).norm());
        println!(
            "{label:<14} class {:<13} C = {:.10} (true {c}), |φ − ±φ_rec| = {err:.1e}, method {}",
            classify_rank2(&phi, c, &tol).name(),
            rec.c,
            rec.method
        );
    }

    let nil = example_zoo("nilpotent-phik", 3, 3, Some(3)).unwrap();
    let phi = nil.phi().unwrap();
    println!(
        "nilpotent-phik class {}",
        classify_rank2(phi, 1.0, &tol).name()
    );

    let rank4 = example_zoo("rank4", 3, 3, None).unwrap();
    match reconstruct_phi(&rank4.tensor, &cfg) {
        Ok(_) => println!("rank4 unexpectedly decomposed"),
        Err(e) => println!("rank4: {e}"),
    }
}
