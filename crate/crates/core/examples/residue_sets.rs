//! Residue sets of g(n) mod p^r below p, the singleton-or-distinct check on
//! a grid, and the primes where g_{2,2}(p) is not p-integral.

use goebel::exact::GoebelParams;
use goebel::random_mod::{residue_set, scan_nonintegral_primes, verify_random_theorem};

fn main() -> goebel::error::Result<()> {
    for (k, l, p, r) in [(4, 4, 13, 2), (3, 2, 13, 2), (2, 2, 13, 3)] {
        let rep = residue_set(GoebelParams::new(k, l)?, p, r)?;
        let residues: Vec<String> = rep.residues.iter().map(|x| x.to_string()).collect();
        println!(
            "({k},{l}) p={p} r={r}: {} over n in {:?}: [{}]",
            rep.verdict,
            rep.index_set,
            residues.join(", ")
        );
    }

    let start = std::time::Instant::now();
    let grid = verify_random_theorem(10, 10, 50, 3)?;
    println!(
        "\ngrid k,l <= 10, p <= 50, r <= 3: {} tuples, {} singleton-zero, {} all-distinct ({} empty), {} violations, lemma {} ({:.1?})",
        grid.dichotomy.checked,
        grid.singleton_zero,
        grid.all_distinct,
        grid.empty,
        grid.dichotomy.counterexamples.len(),
        if grid.lemma.passed { "holds" } else { "fails" },
        start.elapsed()
    );

    let params = GoebelParams::new(2, 2)?;
    println!(
        "\nprimes p <= 200 with g_{{2,2}}(p) not p-integral: {:?}",
        scan_nonintegral_primes(params, 200)?
    );
    Ok(())
}
