//! Fitting C from Tr(R(π)²) = −2C² on random planes.

use curvlab::random::{isometry, seeded};
use curvlab::zoo::example_zoo;
use curvlab::{fit_C, CurvatureTensor, InnerProductSpace, Tolerances};

fn main() {
    let tol = Tolerances::default();
    let space = InnerProductSpace::canonical(2, 4);
    let phi = isometry(&mut seeded(5), &space);
    for c in [0.25, 1.0, 4.0] {
        let r = CurvatureTensor::from_phi(&phi).scaled(c);
        let fit = fit_C(&r, 32, 9, &tol).unwrap();
        println!(
            "C = {c:<5} fitted {:.12}  spread {:.1e}  consistent {}",
            fit.c,
            fit.std_dev,
            fit.is_consistent()
        );
    }
    let rank4 = example_zoo("rank4", 3, 3, None).unwrap();
    println!("rank4: {}", fit_C(&rank4.tensor, 32, 9, &tol).unwrap_err());
}
