use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::eulerian::eulerian_polynomial;
use crate::error::{GoebelError, Result};
use crate::exact::ExactRational;

/// (-1)^(j-1)/j * A_j(k)/(k-1)^(j+1): coefficient of n^-j in the log of the
/// expansion.
fn log_term(k: u32, j: u32) -> ExactRational {
    let a = eulerian_polynomial(j).eval_u64(u64::from(k));
    let den = BigInt::from(j) * num_traits::pow(BigInt::from(k - 1), j as usize + 1);
    let v = ExactRational::new(a, den);
    if j.is_multiple_of(2) {
        -v
    } else {
        v
    }
}

/// Visits every multiplicity vector (m_1..m_r) with sum j*m_j = r.
fn for_each_partition(r: u32, f: &mut impl FnMut(&[u32])) {
    fn go(rest: u32, part: u32, mult: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if rest == 0 {
            f(mult);
            return;
        }
        if part == 0 {
            return;
        }
        for m in (0..=rest / part).rev() {
            mult[part as usize - 1] = m;
            go(rest - m * part, part - 1, mult, f);
        }
        mult[part as usize - 1] = 0;
    }
    let mut mult = vec![0; r as usize];
    go(r, r, &mut mult, f);
}

/// a_{k,r}, the coefficient of n^-r in g(n) / (C^(k^n) n^(1/(k-1))).
pub fn asym_coeff(k: u32, r: u32) -> Result<ExactRational> {
    if k < 2 {
        return Err(GoebelError::InvalidArgument(format!(
            "coefficients need k >= 2 (got {k})"
        )));
    }
    if r == 0 {
        return Ok(ExactRational::one());
    }
    let terms: Vec<ExactRational> = (1..=r).map(|j| log_term(k, j)).collect();
    let mut factorials = vec![BigInt::one()];
    for i in 1..=r {
        let next = &factorials[i as usize - 1] * BigInt::from(i);
        factorials.push(next);
    }
    let mut total = ExactRational::zero();
    for_each_partition(r, &mut |mult| {
        let mut prod = ExactRational::one();
        for (j, &m) in mult.iter().enumerate() {
            if m > 0 {
                prod *= num_traits::pow(terms[j].clone(), m as usize);
                prod /= ExactRational::from_integer(factorials[m as usize].clone());
            }
        }
        total += prod;
    });
    Ok(total)
}

/// [a_{k,0}, ..., a_{k,order}]
pub fn asym_coeffs(k: u32, order: u32) -> Result<Vec<ExactRational>> {
    (0..=order).map(|r| asym_coeff(k, r)).collect()
}
