//! The growth constants C_{k,l} and the k-Somos constants to 40 digits, with
//! certified error bounds.

use goebel::asymptotics::{default_depth, goebel_constant, somos_constant};
use goebel::exact::GoebelParams;

fn main() -> goebel::error::Result<()> {
    for k in 2..=4 {
        let s = somos_constant(k, 40)?;
        println!("sigma_{k}   = {s}  (err < 1e{:.0})", s.err_log10().ceil());
    }
    println!();
    for (k, l) in [(2, 2), (2, 3), (3, 2), (3, 3), (5, 7)] {
        let params = GoebelParams::new(k, l)?;
        let start = std::time::Instant::now();
        let c = goebel_constant(params, 40)?;
        println!(
            "C_{{{k},{l}}} = {c}  (depth {}, {:.2?})",
            default_depth(params),
            start.elapsed()
        );
    }
    Ok(())
}
