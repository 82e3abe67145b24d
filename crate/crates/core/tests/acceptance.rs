//! One line per acceptance criterion; exits nonzero if any fails.

use curvlab::acceptance::{limits, run_criterion, CRITERIA};

fn pinned() -> Vec<String> {
    let mut bad = Vec::new();
    let mut pin = |name: &str, ok: bool| {
        if !ok {
            bad.push(name.to_string());
        }
    };
    pin("SYMMETRY", limits::SYMMETRY == 1e-12);
    pin("SYMMETRY_SECONDS", limits::SYMMETRY_SECONDS == 5.0);
    pin("SYMMETRY_MAPS", limits::SYMMETRY_MAPS == 200);
    pin("FORWARD_MAPS", limits::FORWARD_MAPS == 50);
    pin("FORWARD_SAMPLES", limits::FORWARD_SAMPLES == 500);
    pin("CONVERSE_MAPS", limits::CONVERSE_MAPS == 50);
    pin("PROBE_SAMPLES", limits::PROBE_SAMPLES == 1000);
    pin("NILPOTENT", limits::NILPOTENT == 1e-10);
    pin("ORACLE_TRIALS", limits::ORACLE_TRIALS == 500);
    pin("ORACLE_MAX_DIM", limits::ORACLE_MAX_DIM == 8);
    pin("ORACLE_SEPARATION", limits::ORACLE_SEPARATION == 0.5);
    pin("ORACLE_CONDITION", limits::ORACLE_CONDITION == 1e3);
    pin("FD_RESIDUAL", limits::FD_RESIDUAL == 1e-5);
    pin("CURVATURE", limits::CURVATURE == 1e-5);
    pin("HALVING_RATIO", limits::HALVING_RATIO == (3.5, 4.5));
    pin("PHI_SQUARE", limits::PHI_SQUARE == 1e-6);
    pin("SHAPE_SQUARE", limits::SHAPE_SQUARE == 1e-8);
    pin("ROUND_TRIP", limits::ROUND_TRIP == 1e-8);
    pin("ISOMETRIES", limits::ISOMETRIES == 100);
    pin("PARA_ISOMETRIES", limits::PARA_ISOMETRIES == 20);
    bad
}

fn main() {
    let mut failed = 0;
    let bad = pinned();
    if bad.is_empty() {
        println!("acceptance limits   PASS  all tolerances pinned");
    } else {
        println!("acceptance limits   FAIL  changed: {}", bad.join(", "));
        failed += 1;
    }
    for c in &CRITERIA {
        let o = run_criterion(c);
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {:<22} {status}  {:.2} s, {} checks",
            o.id,
            o.name,
            o.seconds,
            o.checks.len()
        );
        for k in &o.checks {
            let mark = if k.pass { "ok  " } else { "FAIL" };
            let detail = match k.detail.char_indices().nth(400) {
                Some((i, _)) => format!("{}…", &k.detail[..i]),
                None => k.detail.clone(),
            };
            println!("      {mark} {}: {detail}", k.label);
        }
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        CRITERIA.len() - failed.min(CRITERIA.len()),
        CRITERIA.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
