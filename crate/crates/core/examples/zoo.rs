//! Every named example tensor, with its curvature identities checked.

use curvlab::zoo::{catalogue, example_zoo};

fn main() {
    for (name, aliases, description) in catalogue() {
        let (p, q, k) = match name {
            "rank4" => (3, 3, None),
            "nilpotent-phik" => (5, 5, Some(2)),
            _ => (2, 3, None),
        };
        let e = example_zoo(name, p, q, k).unwrap();
        let report = e.tensor.validate();
        println!(
            "{name:<20} ({p},{q})  identities {:.1e}  witnesses {}  aliases {aliases:?}",
            report.max_relative(),
            e.witnesses.len()
        );
        println!("    {description}");
    }
    match example_zoo("rank4", 2, 3, None) {
        Ok(_) => unreachable!(),
        Err(e) => println!("\nrank4 on (2,3): {e}"),
    }
}
