use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// A_r(t), the numerator in sum_{m>=1} m^r / t^m = A_r(t) / (t-1)^(r+1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerianPolynomial {
    r: u32,
    // coeffs[j] is the coefficient of t^j, j = 0..=r
    coeffs: Vec<BigInt>,
}

impl EulerianPolynomial {
    pub fn degree_index(&self) -> u32 {
        self.r
    }

    /// Coefficient of t^j (zero outside 0..=r).
    pub fn coeff(&self, j: u32) -> BigInt {
        self.coeffs.get(j as usize).cloned().unwrap_or_default()
    }

    /// All coefficients, constant term first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_u64(&self, t: u64) -> BigInt {
        self.eval(&BigInt::from(t))
    }
}

impl std::fmt::Display for EulerianPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let c_str = if c.is_one() && j > 0 {
                String::new()
            } else {
                c.to_string()
            };
            terms.push(match j {
                0 => c_str,
                1 => format!("{c_str}t"),
                _ => format!("{c_str}t^{j}"),
            });
        }
        f.write_str(&terms.join(" + "))
    }
}

static TRIANGLE: LazyLock<Mutex<Vec<Arc<EulerianPolynomial>>>> = LazyLock::new(|| {
    Mutex::new(vec![Arc::new(EulerianPolynomial {
        r: 0,
        coeffs: vec![BigInt::one()],
    })])
});

/// A_r, built row by row from
/// A(r, j) = j A(r-1, j) + (r - j + 1) A(r-1, j-1).
pub fn eulerian_polynomial(r: u32) -> Arc<EulerianPolynomial> {
    let mut rows = TRIANGLE.lock().expect("eulerian cache poisoned");
    while rows.len() <= r as usize {
        let n = rows.len() as u32;
        let prev = &rows[rows.len() - 1];
        let mut coeffs = vec![BigInt::zero(); n as usize + 1];
        if n == 1 {
            coeffs[1] = BigInt::one();
        } else {
            for j in 1..=n {
                let keep = prev.coeff(j) * BigInt::from(j);
                let shift = prev.coeff(j - 1) * BigInt::from(n - j + 1);
                coeffs[j as usize] = keep + shift;
            }
        }
        rows.push(Arc::new(EulerianPolynomial { r: n, coeffs }));
    }
    Arc::clone(&rows[r as usize])
}
