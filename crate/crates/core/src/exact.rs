//! Exact evaluation of the (k,l)-Göbel recurrence
//!
//! ```text
//! g(1) = l,    (n+1) g(n+1) = g(n) (n + g(n)^(k-1))
//! ```
//!
//! over arbitrary-precision rationals. Everything else in the crate is checked
//! against the values produced here, so this module never takes floating-point
//! shortcuts. Values grow doubly exponentially; a [`DigitBudget`] caps the size
//! of any intermediate so callers get an error instead of an out-of-memory.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{GoebelError, Result};

/// Reduced fraction with positive denominator.
///
/// `BigRational` keeps `gcd(|num|, den) = 1` and `den >= 1` after every
/// operation; values built here with `new_raw` are reduced by construction.
pub type ExactRational = BigRational;

/// The pair (k, l) selecting a sequence. Both must be at least 1; k = 1 and
/// l = 1 give constant sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoebelParams {
    k: u32,
    l: u32,
}

impl GoebelParams {
    pub fn new(k: u32, l: u32) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(GoebelError::InvalidArgument(format!(
                "k and l must be >= 1 (got k = {k}, l = {l})"
            )));
        }
        Ok(GoebelParams { k, l })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Errors unless k, l >= 2.
    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.k < 2 || self.l < 2 {
            return Err(GoebelError::InvalidArgument(format!(
                "this operation needs k, l >= 2 (got k = {}, l = {})",
                self.k, self.l
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GoebelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, l={})", self.k, self.l)
    }
}

/// Cap on numerator + denominator bit length of any exact intermediate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitBudget {
    max_bits: u64,
}

impl DigitBudget {
    pub const MIN_BITS: u64 = 64;
    pub const DEFAULT_BITS: u64 = 1 << 23;

    pub fn new(max_bits: u64) -> Result<Self> {
        if max_bits < Self::MIN_BITS {
            return Err(GoebelError::InvalidArgument(format!(
                "digit budget must be at least {} bits (got {max_bits})",
                Self::MIN_BITS
            )));
        }
        Ok(DigitBudget { max_bits })
    }

    pub fn max_bits(&self) -> u64 {
        self.max_bits
    }

    fn admits(&self, x: &ExactRational) -> bool {
        rational_bits(x) <= self.max_bits
    }
}

impl Default for DigitBudget {
    fn default() -> Self {
        DigitBudget {
            max_bits: Self::DEFAULT_BITS,
        }
    }
}

/// Either the first non-integral index or a marker that none was found up to
/// the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NValue {
    Index(u64),
    ExceedsCap,
}

impl NValue {
    pub fn index(&self) -> Option<u64> {
        match self {
            NValue::Index(n) => Some(*n),
            NValue::ExceedsCap => None,
        }
    }
}

impl serde::Serialize for NValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NValue::Index(n) => s.serialize_u64(*n),
            NValue::ExceedsCap => s.serialize_str("exceeds-cap"),
        }
    }
}

impl fmt::Display for NValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NValue::Index(n) => write!(f, "{n}"),
            NValue::ExceedsCap => f.write_str("exceeds-cap"),
        }
    }
}

/// Bit length of numerator plus denominator.
pub fn rational_bits(x: &ExactRational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

pub fn is_integral(x: &ExactRational) -> bool {
    x.denom().is_one()
}

type CacheKey = (u32, u32);

static PREFIX_CACHE: LazyLock<Mutex<HashMap<CacheKey, Vec<Arc<ExactRational>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// One application of the recurrence: g(n) -> g(n+1).
///
/// Returns `None` when the result would exceed `budget`. The gcd of the new
/// numerator and denominator always divides `n + 1` (numerator and `b` are
/// coprime since `gcd(a, b) = 1`), so reduction needs only a small gcd.
fn recurrence_step(g: &ExactRational, n: u64, k: u32, budget: &DigitBudget) -> Option<ExactRational> {
    let a = g.numer();
    let b = g.denom();
    let k64 = u64::from(k);
    let estimate = (a.bits() + b.bits()) * k64 + 2 * (64 - n.leading_zeros() as u64) + 2;
    if estimate > budget.max_bits {
        return None;
    }

    let a_pow = num_traits::pow(a.clone(), (k - 1) as usize);
    let b_pow = num_traits::pow(b.clone(), (k - 1) as usize);
    let numer: BigInt = a * (&b_pow * BigInt::from(n) + a_pow);
    let denom: BigInt = b_pow * b;

    let m = n + 1;
    let residue = numer
        .mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("residue below modulus");
    let d = residue.gcd(&m);
    let numer = numer / BigInt::from(d);
    let denom = denom * BigInt::from(m / d);
    let next = BigRational::new_raw(numer, denom);
    if budget.admits(&next) {
        Some(next)
    } else {
        None
    }
}

fn validate_index(n: u64) -> Result<()> {
    if n == 0 {
        return Err(GoebelError::InvalidArgument("sequence indices start at n = 1".into()));
    }
    Ok(())
}

/// [g(1), ..., g(n_max)], memoized per (k, l).
///
/// On budget failure the error reports the largest index that was computed.
pub fn eval_prefix(params: GoebelParams, n_max: u64, budget: DigitBudget) -> Result<Vec<ExactRational>> {
    Ok(shared_prefix(params, n_max, budget)?
        .into_iter()
        .map(|v| (*v).clone())
        .collect())
}

/// Same as [`eval_prefix`] but hands out shared references into the cache.
pub fn shared_prefix(params: GoebelParams, n_max: u64, budget: DigitBudget) -> Result<Vec<Arc<ExactRational>>> {
    validate_index(n_max)?;
    let key = (params.k, params.l);
    let mut values: Vec<Arc<ExactRational>> = {
        let cache = PREFIX_CACHE.lock().expect("prefix cache poisoned");
        cache.get(&key).cloned().unwrap_or_default()
    };

    // Cached entries may have been produced under a larger budget.
    if let Some(pos) = values.iter().take(n_max as usize).position(|v| !budget.admits(v)) {
        return Err(GoebelError::BudgetExceeded {
            max_bits: budget.max_bits,
            last_complete: pos as u64,
        });
    }
    if values.len() as u64 >= n_max {
        values.truncate(n_max as usize);
        return Ok(values);
    }

    if values.is_empty() {
        values.push(Arc::new(ExactRational::from_integer(BigInt::from(params.l))));
    }
    let mut outcome = Ok(());
    while (values.len() as u64) < n_max {
        let n = values.len() as u64;
        match recurrence_step(&values[values.len() - 1], n, params.k, &budget) {
            Some(next) => values.push(Arc::new(next)),
            None => {
                outcome = Err(GoebelError::BudgetExceeded {
                    max_bits: budget.max_bits,
                    last_complete: n,
                });
                break;
            }
        }
    }

    {
        let mut cache = PREFIX_CACHE.lock().expect("prefix cache poisoned");
        let entry = cache.entry(key).or_default();
        if entry.len() < values.len() {
            *entry = values.clone();
        }
    }
    outcome.map(|_| values)
}

/// g_{k,l}(n) exactly.
pub fn eval_exact(params: GoebelParams, n: u64, budget: DigitBudget) -> Result<ExactRational> {
    let prefix = shared_prefix(params, n, budget)?;
    Ok((*prefix[prefix.len() - 1]).clone())
}

/// Largest n <= `limit` for which g(n) fits in `budget`, or 0 if not even
/// g(1) does.
pub fn largest_feasible_index(params: GoebelParams, limit: u64, budget: DigitBudget) -> u64 {
    match shared_prefix(params, limit, budget) {
        Ok(v) => v.len() as u64,
        Err(GoebelError::BudgetExceeded { last_complete, .. }) => last_complete,
        Err(_) => 0,
    }
}

/// Brute-force first non-integral index: evaluate exactly up to `cap`.
pub fn naive_n(params: GoebelParams, cap: u64, budget: DigitBudget) -> Result<NValue> {
    if cap == 0 {
        return Err(GoebelError::InvalidArgument("cap must be >= 1".into()));
    }
    let mut g = ExactRational::from_integer(BigInt::from(params.l));
    for n in 1..=cap {
        if n > 1 {
            g = recurrence_step(&g, n - 1, params.k, &budget).ok_or(GoebelError::BudgetExceeded {
                max_bits: budget.max_bits,
                last_complete: n - 1,
            })?;
        }
        if !is_integral(&g) {
            return Ok(NValue::Index(n));
        }
    }
    Ok(NValue::ExceedsCap)
}

/// t_k(n) with t_k(0) = t0 and t_k(n+1) = t_k(n)^k / (n+1).
pub fn t_sequence(k: u32, t0: &ExactRational, n: u64, budget: DigitBudget) -> Result<ExactRational> {
    t_sequence_from(k, 0, t0, n, budget)
}

/// The same recursion re-based to start from `value` at index `start`.
pub fn t_sequence_from(
    k: u32,
    start: u64,
    value: &ExactRational,
    n: u64,
    budget: DigitBudget,
) -> Result<ExactRational> {
    if k < 2 {
        return Err(GoebelError::InvalidArgument("t_k needs k >= 2".into()));
    }
    if value <= &ExactRational::one() {
        return Err(GoebelError::InvalidArgument("t_k needs a start value > 1".into()));
    }
    if n < start {
        return Err(GoebelError::InvalidArgument(format!(
            "t_k defined from index {start}, asked for {n}"
        )));
    }
    let mut t = value.clone();
    for i in start..n {
        let estimate = rational_bits(&t) * u64::from(k) + 64;
        if estimate > budget.max_bits {
            return Err(GoebelError::BudgetExceeded {
                max_bits: budget.max_bits,
                last_complete: i,
            });
        }
        let numer = num_traits::pow(t.numer().clone(), k as usize);
        let m = i + 1;
        let d = numer
            .mod_floor(&BigInt::from(m))
            .to_u64()
            .expect("residue below modulus")
            .gcd(&m);
        let denom = num_traits::pow(t.denom().clone(), k as usize) * BigInt::from(m / d);
        t = BigRational::new_raw(numer / BigInt::from(d), denom);
    }
    Ok(t)
}

pub(crate) fn denom_abs(x: &ExactRational) -> BigUint {
    x.denom().to_biguint().expect("denominator is positive")
}

pub(crate) fn is_zero(x: &ExactRational) -> bool {
    x.numer().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> ExactRational {
        ExactRational::from_integer(BigInt::from(v))
    }

    fn ratio(a: i64, b: i64) -> ExactRational {
        ExactRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn p(k: u32, l: u32) -> GoebelParams {
        GoebelParams::new(k, l).unwrap()
    }

    // Straight from the definition with no reduction tricks.
    fn textbook(k: u32, l: u32, n: u64) -> ExactRational {
        let mut g = int(l as i64);
        for i in 1..n {
            let gi = g.clone();
            g = &gi * (int(i as i64) + num_traits::pow(gi.clone(), (k - 1) as usize)) / int(i as i64 + 1);
        }
        g
    }

    #[test]
    fn goebel_22_initial_terms() {
        let v = eval_prefix(p(2, 2), 7, DigitBudget::default()).unwrap();
        let want: Vec<_> = [2, 3, 5, 10, 28, 154, 3520].iter().map(|&x| int(x)).collect();
        assert_eq!(v, want);
        assert_eq!(eval_exact(p(2, 2), 5, DigitBudget::default()).unwrap(), int(28));
    }

    #[test]
    fn initial_value_is_l() {
        assert_eq!(eval_exact(p(7, 5), 1, DigitBudget::default()).unwrap(), int(5));
    }

    #[test]
    fn k_one_is_constant() {
        let v = eval_prefix(p(1, 9), 5, DigitBudget::default()).unwrap();
        assert_eq!(v, vec![int(9); 5]);
        let v = eval_prefix(p(6, 1), 8, DigitBudget::default()).unwrap();
        assert_eq!(v, vec![int(1); 8]);
    }

    #[test]
    fn prefix_matches_definition() {
        let v = eval_prefix(p(3, 2), 6, DigitBudget::default()).unwrap();
        for (i, g) in v.iter().enumerate() {
            assert_eq!(*g, textbook(3, 2, i as u64 + 1), "n = {}", i + 1);
        }
        for w in v.windows(2).enumerate() {
            let (i, pair) = w;
            let n = int(i as i64 + 1);
            let lhs = (&n + int(1)) * &pair[1];
            let rhs = &pair[0] * (&n + num_traits::pow(pair[0].clone(), 2));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn integrality() {
        assert!(is_integral(&int(28)));
        assert!(!is_integral(&ratio(3, 2)));
        let g = eval_exact(p(2, 3), 7, DigitBudget::default()).unwrap();
        assert!(!is_integral(&g));
        assert!(is_integral(&eval_exact(p(2, 3), 6, DigitBudget::default()).unwrap()));
    }

    #[test]
    fn naive_first_nonintegral() {
        let b = DigitBudget::default();
        assert_eq!(naive_n(p(2, 3), 10, b).unwrap(), NValue::Index(7));
        assert_eq!(naive_n(p(2, 4), 20, b).unwrap(), NValue::Index(17));
        assert_eq!(naive_n(p(3, 2), 5, b).unwrap(), NValue::ExceedsCap);
    }

    #[test]
    fn naive_runs_out_of_budget_on_long_integral_stretches() {
        // N_{3,2} = 89: the values outgrow any practical budget long before that.
        let err = naive_n(p(3, 2), 20, DigitBudget::default()).unwrap_err();
        assert!(matches!(err, GoebelError::BudgetExceeded { .. }));
    }

    #[test]
    fn index_zero_rejected() {
        assert!(eval_exact(p(2, 2), 0, DigitBudget::default()).is_err());
        assert!(GoebelParams::new(0, 2).is_err());
        assert!(DigitBudget::new(10).is_err());
    }

    #[test]
    fn budget_reports_last_complete_index() {
        let tight = DigitBudget::new(256).unwrap();
        match eval_exact(p(2, 2), 30, tight) {
            Err(GoebelError::BudgetExceeded { last_complete, .. }) => {
                let v = eval_exact(p(2, 2), last_complete, tight).unwrap();
                assert!(rational_bits(&v) <= 256);
                assert!(last_complete >= 8);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        // The cache was filled under a bigger budget elsewhere; a small budget
        // must still refuse large cached values.
        eval_exact(p(2, 2), 14, DigitBudget::default()).unwrap();
        assert!(eval_exact(p(2, 2), 14, DigitBudget::new(64).unwrap()).is_err());
    }

    #[test]
    fn t_sequence_values() {
        let b = DigitBudget::default();
        assert_eq!(t_sequence(2, &int(2), 1, b).unwrap(), int(4));
        assert_eq!(t_sequence_from(2, 3, &int(5), 3, b).unwrap(), int(5));
        // Four unrolled applications from 6/5 with k = 3.
        let t0 = ratio(6, 5);
        let mut t = t0.clone();
        for i in 1..=4 {
            t = num_traits::pow(t, 3) / int(i);
        }
        assert_eq!(t_sequence(3, &t0, 4, b).unwrap(), t);
        assert!(t_sequence(2, &int(1), 2, b).is_err());
    }
}
