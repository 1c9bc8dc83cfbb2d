//! The first non-integral index of a few sequences, found by the prime-power
//! state machine, next to how far exact rational arithmetic gets.

use goebel::exact::{eval_prefix, is_integral, largest_feasible_index, DigitBudget, GoebelParams};
use goebel::padic::{compute_n, padic_eval, PrimePowerContext};
use goebel::theorems::DEFAULT_CAP;

fn main() -> goebel::error::Result<()> {
    let params = GoebelParams::new(2, 2)?;
    let prefix = eval_prefix(params, 8, DigitBudget::default())?;
    let shown: Vec<String> = prefix.iter().map(|g| g.to_string()).collect();
    println!("g_{{2,2}}(1..8) = {}", shown.join(", "));
    assert!(prefix.iter().all(is_integral));

    for (k, l) in [(2, 2), (3, 2), (2, 3), (8, 3), (11, 15), (17, 17)] {
        let params = GoebelParams::new(k, l)?;
        let start = std::time::Instant::now();
        let n = compute_n(params, DEFAULT_CAP)?;
        let exact_reach = largest_feasible_index(params, 64, DigitBudget::default());
        println!(
            "N_{{{k},{l}}} = {n:<5} ({:.2?}; exact values fit the default budget up to n = {exact_reach})",
            start.elapsed()
        );
    }

    // the witness for (2,2): g(43) leaves Z_(43) while the budget is still r = 1
    let witness = padic_eval(PrimePowerContext::new(43, 1)?, GoebelParams::new(2, 2)?, 43)?;
    println!(
        "\ng_{{2,2}}(43) at p = 43: {}",
        if witness.is_integral() {
            "integral"
        } else {
            "not integral"
        }
    );
    Ok(())
}
