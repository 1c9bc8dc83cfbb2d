//! Compares the tail term epsilon(n) with 2n / exp(k^(n-1)) and with the
//! bound that follows from g(j) > C^(k^j). Values are natural logs.

use goebel::asymptotics::{epsilon_bound_check, epsilon_bound_threshold};
use goebel::exact::GoebelParams;

fn main() -> goebel::error::Result<()> {
    for (k, l) in [(2, 2), (3, 2), (2, 3)] {
        let params = GoebelParams::new(k, l)?;
        println!("{params}");
        println!(
            "{:>4} {:>14} {:>14} {:>14}  literal derived",
            "n", "ln eps", "ln 2n/e^k^n-1", "ln derived"
        );
        for n in 1..=12 {
            let row = epsilon_bound_check(params, n, 10)?;
            println!(
                "{:>4} {:>14.4} {:>14.4} {:>14.4}  {:<7} {}",
                n,
                row.ln_epsilon_upper,
                row.ln_literal_bound,
                row.ln_derived_bound,
                row.literal_holds,
                row.derived_holds
            );
        }
        match epsilon_bound_threshold(params, 1..=12, 10)? {
            Some(n0) => println!("literal bound holds from n = {n0}\n"),
            None => println!("literal bound fails at n = 12\n"),
        }
    }
    Ok(())
}
