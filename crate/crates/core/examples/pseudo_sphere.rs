//! Finite-difference curvature of pseudo-spheres, including which of ϱ, ϱ²
//! the measured constant follows.

use curvlab::geometry::{verify_model, ModelConfig, PseudoSphereConfig, VerifyOptions};

fn main() {
    let opts = VerifyOptions::default();
    for (r, s, rho, delta) in [
        (0, 3, 1.0, 1),
        (1, 2, 1.0, 1),
        (2, 3, 1.0, -1),
        (1, 2, 2.0, 1),
        (0, 3, 0.5, 1),
    ] {
        let cfg = ModelConfig::PseudoSphere(PseudoSphereConfig {
            r,
            s,
            rho,
            delta,
            solve_index: None,
            points: None,
        });
        let rep = verify_model(&cfg, &opts).unwrap();
        let kappa: Vec<String> = rep
            .points
            .iter()
            .filter_map(|p| p.measured)
            .map(|k| format!("{k:.6}"))
            .collect();
        print!(
            "S(({r},{s}); ϱ={rho}, δ={delta:+})  pass {}  κ = [{}]",
            rep.pass,
            kappa.join(", ")
        );
        match &rep.normalization {
            Some(n) => println!("  matched {:?}", n.matched),
            None => println!(),
        }
    }
}
