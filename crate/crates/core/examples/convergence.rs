//! Scaled residuals rho_R(n) of the expansion of g_{2,2}; each column should
//! settle on the next coefficient a_{2,R+1}.

use goebel::asymptotics::{asym_coeff, convergence_report};
use goebel::exact::GoebelParams;

fn main() -> goebel::error::Result<()> {
    let params = GoebelParams::new(2, 2)?;
    let ns: Vec<u64> = (14..=22).chain([30, 40, 60, 80, 100]).collect();
    let orders = 0..=5u32;
    let reports = orders
        .clone()
        .map(|r| convergence_report(params, &ns, r))
        .collect::<Result<Vec<_>, _>>()?;

    print!("{:>5}", "n");
    for r in orders.clone() {
        print!(" {:>14}", format!("rho_{r}"));
    }
    println!();
    for (i, n) in ns.iter().enumerate() {
        print!("{n:>5}");
        for rep in &reports {
            print!(" {:>14.6}", rep.rows[i].value.to_f64());
        }
        println!();
    }
    print!("{:>5}", "a");
    for r in orders {
        print!(" {:>14}", asym_coeff(2, r + 1)?.to_string());
    }
    println!();
    Ok(())
}
