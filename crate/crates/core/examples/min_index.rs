//! Finite checks behind the classification of the sequences with N = 7: the
//! four congruence reductions and the resulting pattern on a larger grid.

use goebel::theorems::{classify_n7, verify_min7_reduction};

fn main() -> goebel::error::Result<()> {
    let start = std::time::Instant::now();
    for rep in verify_min7_reduction()? {
        println!(
            "{} {} ({} cells)",
            if rep.passed { "ok  " } else { "FAIL" },
            rep.claim,
            rep.checked
        );
    }
    let rep = classify_n7(200, 200)?;
    println!(
        "{} {} ({} cells)",
        if rep.passed { "ok  " } else { "FAIL" },
        rep.claim,
        rep.checked
    );
    for c in &rep.counterexamples {
        println!("  k={} l={}: {}", c.k, c.l, c.detail);
    }
    println!("{:.2?}", start.elapsed());
    Ok(())
}
