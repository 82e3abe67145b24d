//! Vectors, planes and dual frames in signature (2,3).

use curvlab::{InnerProductSpace, OrientedPlane, Tolerances};

fn main() {
    let space = InnerProductSpace::canonical(2, 3);
    let tol = Tolerances::default();
    let (m, p) = (|i| space.e_minus(i), |j| space.e_plus(j));

    for (label, u, v) in [
        ("span{e1+, e2+}", p(0), p(1)),
        ("span{e1-, e2-}", m(0), m(1)),
        ("span{e1-, e1+}", m(0), p(0)),
        ("span{e1- + e1+, e2+}", m(0) + p(0), p(1)),
    ] {
        let plane = OrientedPlane::new(u, v).unwrap();
        println!("{label:<22} {:?}", space.plane_type(&plane, &tol).unwrap());
    }

    let vs = vec![m(0) + p(0), p(1) * 2.0, m(1) - p(2)];
    let ws = space.dual_frame(&vs, &tol).unwrap();
    println!("\n(v_i, w_j):");
    for v in &vs {
        let row: Vec<String> = ws
            .iter()
            .map(|w| format!("{:6.3}", space.inner(v, w).unwrap()))
            .collect();
        println!("  {}", row.join(" "));
    }
}
