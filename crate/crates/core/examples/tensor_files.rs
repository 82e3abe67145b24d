//! Writing tensors to JSON and loading them back.

use curvlab::io::{to_json, TensorFile};
use curvlab::zoo::example_zoo;

fn main() {
    let e = example_zoo("isotropic-kernel", 2, 2, None).unwrap();
    let phi_form = to_json(&TensorFile::from_entry(&e));
    let dense = to_json(&TensorFile::dense(&e.tensor));
    println!(
        "phi form: {} bytes, dense form: {} bytes",
        phi_form.len(),
        dense.len()
    );

    for text in [&phi_form, &dense] {
        let file: TensorFile = serde_json::from_str(text).unwrap();
        let loaded = file.load().unwrap();
        println!(
            "reloaded: max difference {:.1e}, φ stored: {}",
            loaded.tensor.max_abs_diff(&e.tensor).unwrap(),
            loaded.phi.is_some()
        );
    }
    println!(
        "\n{}",
        phi_form.lines().take(8).collect::<Vec<_>>().join("\n")
    );
}
