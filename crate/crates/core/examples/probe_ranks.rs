//! Rank probes of the projection tensor on (2,5), by causal class.

use curvlab::probe::{evaluate_plane, probe};
use curvlab::zoo::example_zoo;
use curvlab::{CausalType, ProbeMode, Tolerances};

fn main() {
    let e = example_zoo("projection", 2, 5, None).unwrap();
    let tol = Tolerances::default();
    for class in [
        CausalType::Spacelike,
        CausalType::Timelike,
        CausalType::Mixed,
    ] {
        let rep = probe(
            &e.tensor,
            class,
            1000,
            ProbeMode::Rank,
            42,
            &tol,
            &e.witnesses,
        )
        .unwrap();
        println!(
            "{:<10} {:<16} histogram {:?}",
            class.as_str(),
            rep.verdict.name(),
            rep.rank_histogram
        );
        for w in &rep.witnesses {
            let plane = w.plane.to_plane().unwrap();
            let s = evaluate_plane(&e.tensor, &plane, ProbeMode::Rank, &tol).unwrap();
            println!("    witness rank {} (re-evaluated {})", w.rank, s.rank);
        }
    }
}
