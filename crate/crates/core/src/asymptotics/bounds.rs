use num_bigint::BigInt;
use num_traits::One;

use super::constants::shifted_log_sum;
use crate::error::{GoebelError, Result};
use crate::exact::{eval_exact, t_sequence_from, DigitBudget, ExactRational, GoebelParams};
use crate::real::{certify, Accuracy, Approx, HighPrecReal, Working};
use crate::report::{Counterexample, VerdictReport};

/// Outcome of comparing g(n) with the sequence t(n+1) = t(n)^k / (n+1).
#[derive(Debug, Clone)]
pub struct LowerBoundReport {
    pub verdict: VerdictReport,
    /// lim k^-n log t(n)
    pub limit: HighPrecReal,
    /// The limit is certainly positive, so t(n) and hence g(n) grow like
    /// c^(k^n) with c > 1.
    pub limit_positive: bool,
}

const LIMIT_DIGITS: u32 = 20;

/// lim_{n} k^-n log t(n) for t started at `value` at index `start`:
/// k^-start (log value - sum_{m>=1} log(start + m) / k^m).
pub fn comparison_limit(k: u32, start: u64, value: &ExactRational, digits: u32) -> Result<HighPrecReal> {
    if k < 2 {
        return Err(GoebelError::InvalidArgument(format!(
            "comparison needs k >= 2 (got {k})"
        )));
    }
    if *value <= ExactRational::one() {
        return Err(GoebelError::InvalidArgument("start value must exceed 1".into()));
    }
    let places = i64::from(digits) + 1;
    certify(
        "comparison limit",
        i64::from(digits),
        Accuracy::Places(digits),
        |guard| {
            let mut w = Working::for_places(places + i64::from(guard), 8);
            let target = w.target_log2;
            let s = shifted_log_sum(&mut w, k, start, target);
            let lv = w.ln_rational(value);
            let kstart = w.big(&num_traits::pow(num_bigint::BigUint::from(k), start as usize));
            Ok(Approx {
                value: w.div(&w.sub(&lv, &s.value), &kstart),
                err: w.div(&s.err, &kstart),
            })
        },
    )
}

/// Checks g(n) >= t(n) for n <= n_max, where t(0) = t0; needs l >= t0^k.
pub fn check_lower_bound(params: GoebelParams, t0: &ExactRational, n_max: u64) -> Result<LowerBoundReport> {
    check_lower_bound_from(params, 0, t0, n_max)
}

/// Same comparison with t started at `value` at index `start`; needs
/// g(max(start, 1)) >= t(max(start, 1)).
pub fn check_lower_bound_from(
    params: GoebelParams,
    start: u64,
    value: &ExactRational,
    n_max: u64,
) -> Result<LowerBoundReport> {
    params.require_nondegenerate()?;
    let k = params.k();
    let budget = DigitBudget::default();
    let first = start.max(1);
    let t_first = t_sequence_from(k, start, value, first, budget)?;
    if eval_exact(params, first, budget)? < t_first {
        return Err(GoebelError::InvalidArgument(format!(
            "comparison sequence starts above g({first}) for {params}"
        )));
    }
    let mut verdict = VerdictReport::new(format!("g(n) >= t(n) for {params}, t({start}) = {value}, n <= {n_max}"));
    for n in first..=n_max {
        // t may fall below 1 later on, so always restart from the given value
        let t = t_sequence_from(k, start, value, n, budget)?;
        let g = eval_exact(params, n, budget)?;
        verdict.record(g >= t, || Counterexample {
            k,
            l: params.l(),
            n,
            p: None,
            detail: "g(n) < t(n)".into(),
        });
    }
    let limit = comparison_limit(k, start, value, LIMIT_DIGITS)?;
    let limit_positive = limit.certainly_gt(&ExactRational::from_integer(BigInt::from(0)));
    Ok(LowerBoundReport {
        verdict,
        limit,
        limit_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn p(k: u32, l: u32) -> GoebelParams {
        GoebelParams::new(k, l).unwrap()
    }

    #[test]
    fn cubic_case() {
        // (6/5)^3 = 1.728 <= 2 and 6/5 > sigma_3
        let r = check_lower_bound(p(3, 2), &q(6, 5), 9).unwrap();
        assert!(r.verdict.passed);
        assert!(r.limit_positive);
    }

    #[test]
    fn quadratic_case() {
        // (5/3)^2 = 2.78 <= 3 and 5/3 > sigma_2
        let r = check_lower_bound(p(2, 3), &q(5, 3), 14).unwrap();
        assert!(r.verdict.passed);
        assert!(r.limit_positive);
    }

    #[test]
    fn rebased_sequence_limit() {
        let lim = comparison_limit(2, 3, &q(5, 1), 10).unwrap();
        assert!(lim.to_decimal(10).starts_with("0.00395"), "{}", lim.to_decimal(10));
        // g_{2,2}(3) = 5, so the rebased sequence sits under g_{2,2}
        let r = check_lower_bound_from(p(2, 2), 3, &q(5, 1), 16).unwrap();
        assert!(r.verdict.passed);
        assert!(r.limit_positive);
    }

    #[test]
    fn start_value_below_sigma_has_negative_limit() {
        let r = check_lower_bound(p(2, 2), &q(13, 10), 10).unwrap();
        assert!(r.verdict.passed);
        assert!(!r.limit_positive);
    }

    #[test]
    fn rejects_bad_start() {
        assert!(check_lower_bound(p(2, 2), &q(3, 2), 5).is_err());
        assert!(check_lower_bound(p(2, 2), &q(1, 1), 5).is_err());
    }
}
