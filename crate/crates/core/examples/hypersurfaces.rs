//! Gauss equation on the unit sphere and on the graph with a square-zero
//! shape operator.

use curvlab::geometry::{
    graph_hypersurface, hypersurface_curvature, pseudo_sphere_chart, riemann_fd, InducedMetric,
};
use curvlab::{Matrix, Tolerances};

fn main() {
    let h = 1e-3;
    let sphere = pseudo_sphere_chart(0, 4, 1.0, 1, None).unwrap();
    let x = [0.1, -0.2, 0.05];
    let hc = hypersurface_curvature(&sphere, &x, h).unwrap();
    let intrinsic = riemann_fd(&InducedMetric(&sphere), &x, h).unwrap();
    println!(
        "unit sphere: (ν,ν) = {}, |R − (ν,ν)R_S| / |R| = {:.2e}",
        hc.nu_nu,
        intrinsic.max_abs_diff(&hc.tensor).unwrap() / intrinsic.max_abs()
    );

    let p = 3;
    let graph = graph_hypersurface(p, &Matrix::identity(p, p)).unwrap();
    let x = [0.1, 0.2, -0.1, 0.3, 0.0, -0.2];
    let hc = hypersurface_curvature(&graph, &x, h).unwrap();
    let s = hc.shape.matrix();
    let kernel = hc
        .shape
        .kernel_causal_content(&Tolerances::finite_difference());
    println!(
        "graph p={p}: |S| = {:.3}, |S²| = {:.1e}, kernel {:?}",
        s.norm(),
        (s * s).norm(),
        kernel
    );
    println!("  |(ν,ν)R_S| = {:.1e}", hc.tensor.max_abs());
}
