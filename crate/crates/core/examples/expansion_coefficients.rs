//! Exact coefficients a_{k,r} of the expansion of g(n) in powers of 1/n, and
//! the Eulerian polynomials they are assembled from.

use goebel::asymptotics::{asym_coeffs, eulerian_polynomial};

fn main() -> goebel::error::Result<()> {
    for r in 0..=6 {
        println!("A_{r}(t) = {}", eulerian_polynomial(r));
    }
    println!();
    for k in 2..=5 {
        let coeffs: Vec<String> = asym_coeffs(k, 8)?.iter().map(|c| c.to_string()).collect();
        println!("k = {k}: {}", coeffs.join(", "));
    }
    Ok(())
}
