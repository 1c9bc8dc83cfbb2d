//! Writes n, C(n) for the pairs (2,2), (3,2), (2,3) as CSV: the values
//! g(n)^(1/k^n) descending toward their limits.

use std::io::Write;

use goebel::asymptotics::{c_of_n_series, goebel_constant};
use goebel::exact::GoebelParams;

fn main() -> goebel::error::Result<()> {
    let ns: Vec<u64> = (1..=40).collect();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "k,l,n,c_n,limit").map_err(|e| goebel::error::GoebelError::Io(e.to_string()))?;
    for (k, l) in [(2, 2), (3, 2), (2, 3)] {
        let params = GoebelParams::new(k, l)?;
        let limit = goebel_constant(params, 20)?;
        for row in c_of_n_series(params, &ns, 20)? {
            writeln!(out, "{k},{l},{},{},{}", row.n, row.value, limit)
                .map_err(|e| goebel::error::GoebelError::Io(e.to_string()))?;
        }
    }
    Ok(())
}
