//! Compares g(n) with the pure power recurrence t(n+1) = t(n)^k / (n+1),
//! which stays below g once started low enough.

use goebel::asymptotics::check_lower_bound;
use goebel::exact::{ExactRational, GoebelParams};

fn frac(a: i64, b: i64) -> ExactRational {
    ExactRational::new(a.into(), b.into())
}

fn main() -> goebel::error::Result<()> {
    for ((k, l), t0) in [((3, 2), frac(6, 5)), ((2, 3), frac(5, 3)), ((2, 2), frac(13, 10))] {
        let params = GoebelParams::new(k, l)?;
        let rep = check_lower_bound(params, &t0, 12)?;
        println!(
            "({k},{l}) t0 = {t0}: g(n) >= t(n) for n <= 12: {}; lim k^-n log t(n) = {} ({})",
            rep.verdict.passed,
            rep.limit.to_decimal(10),
            if rep.limit_positive { "positive" } else { "not positive" }
        );
    }
    Ok(())
}
