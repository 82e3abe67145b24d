//! The quadratic warped product: measured C(t) against the closed form,
//! and the second-order convergence of the finite differences.

use curvlab::geometry::{
    riemann_fd, verify_model, warped_metric, ModelConfig, VerifyOptions, WarpedConfig,
};
use curvlab::CurvatureTensor;

fn main() {
    let cfg = WarpedConfig::demo();
    let rep = verify_model(&ModelConfig::Warped(cfg.clone()), &VerifyOptions::default()).unwrap();
    println!("pass {}  max residual {:.2e}", rep.pass, rep.max_residual);
    for p in &rep.points {
        println!(
            "  t = {:<4} C = {:.8} (closed form {:.8})  residual {:.2e}",
            p.x[0],
            p.measured.unwrap(),
            p.closed_form.unwrap(),
            p.residual
        );
    }
    for pr in &rep.probes {
        let verdict = pr.verdict.as_deref().unwrap_or("unachievable");
        println!(
            "  probe at point {} {:<10} {verdict} ranks {:?}",
            pr.point,
            pr.class.as_str(),
            pr.ranks
        );
    }

    let m = warped_metric(&cfg).unwrap();
    let x = [0.5, 0.1, -0.07];
    let exact = CurvatureTensor::from_phi(&m.phi(&x).unwrap()).scaled(m.c(x[0]));
    println!("\nstep      residual");
    for h in [4e-3, 2e-3, 1e-3, 5e-4] {
        let r = riemann_fd(&m, &x, h).unwrap();
        println!(
            "{h:<9} {:.3e}",
            r.max_abs_diff(&exact).unwrap() / exact.max_abs()
        );
    }
}
