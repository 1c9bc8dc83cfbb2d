//! Residues of g_{k,l}(n) modulo prime powers, and the first non-integral
//! index N_{k,l} built on top of them.
//!
//! For a prime p and an initial exponent budget r, the state at n is either a
//! residue `a mod p^b(n)` with `b(n) = r - nu_p(n!)`, or the absorbing mark
//! [`PadicState::NonIntegral`] meaning g(n) is not in Z_(p). Each step divides
//! by n, which costs `nu_p(n)` digits of precision; that is where the budget
//! goes.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{GoebelError, Result};
use crate::exact::{self, DigitBudget, ExactRational, GoebelParams, NValue};
use crate::report::{Counterexample, VerdictReport};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PadicState {
    /// g(n) = a mod p^budget, with 0 <= a < p^budget.
    Residue {
        a: BigUint,
        budget: u32,
    },
    NonIntegral,
}

impl PadicState {
    pub fn is_integral(&self) -> bool {
        matches!(self, PadicState::Residue { .. })
    }

    pub fn residue(&self) -> Option<(&BigUint, u32)> {
        match self {
            PadicState::Residue { a, budget } => Some((a, *budget)),
            PadicState::NonIntegral => None,
        }
    }
}

/// A prime together with the initial exponent budget r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePowerContext {
    p: u64,
    r: u32,
}

impl PrimePowerContext {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(GoebelError::InvalidArgument(format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(GoebelError::InvalidArgument("budget r must be >= 1".into()));
        }
        Ok(PrimePowerContext { p, r })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// b(n) = r - nu_p(n!), or an underflow error.
    pub fn budget_at(&self, n: u64) -> Result<u32> {
        let used = nu_p_factorial(self.p, n);
        if used > u64::from(self.r) {
            return Err(GoebelError::BudgetUnderflow {
                p: self.p,
                r: self.r,
                n,
                needed: used.min(u64::from(u32::MAX)) as u32,
            });
        }
        Ok(self.r - used as u32)
    }
}

/// Deterministic trial division; the primes used here stay in the thousands.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn nu_p_u64(p: u64, mut x: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

fn nu_p_bigint(p: u64, x: &BigInt) -> u64 {
    if p == 2 {
        return x.trailing_zeros().unwrap_or(0);
    }
    // strip p^(2^i) for growing i, then shrink back down
    let mut powers = vec![BigInt::from(p)];
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let top = powers.last().expect("nonempty");
        let (q, rem) = x.div_rem(top);
        if !rem.is_zero() {
            break;
        }
        x = q;
        v += 1u64 << (powers.len() - 1);
        if top.bits() * 2 > x.bits() + 1 {
            break;
        }
        let next = top * top;
        powers.push(next);
    }
    while let Some(pw) = powers.pop() {
        let (q, rem) = x.div_rem(&pw);
        if rem.is_zero() {
            x = q;
            v += 1u64 << powers.len();
        }
    }
    v
}

/// nu_p(x) for a nonzero rational: nu_p(numerator) - nu_p(denominator).
pub fn nu_p(p: u64, x: &ExactRational) -> Result<i64> {
    if exact::is_zero(x) {
        return Err(GoebelError::ValuationOfZero);
    }
    Ok(nu_p_bigint(p, x.numer()) as i64 - nu_p_bigint(p, x.denom()) as i64)
}

/// Legendre: nu_p(n!) = sum_i floor(n / p^i).
pub fn nu_p_factorial(p: u64, n: u64) -> u64 {
    let mut total = 0;
    let mut m = n;
    while m > 0 {
        m /= p;
        total += m;
    }
    total
}

pub fn totient(m: u64) -> u64 {
    assert!(m >= 1, "totient needs m >= 1");
    let mut result = m;
    let mut rest = m;
    let mut d = 2u64;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            while rest.is_multiple_of(d) {
                rest /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if rest > 1 {
        result -= result / rest;
    }
    result
}

/// Inverse of `x` modulo `m` by extended Euclid. Modulus 1 yields 1.
pub fn mod_inverse(x: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::one());
    }
    let m_int = BigInt::from(m.clone());
    let ext = BigInt::from(x.clone()).extended_gcd(&m_int);
    if !ext.gcd.is_one() {
        return None;
    }
    Some(ext.x.mod_floor(&m_int).to_biguint().expect("mod_floor is nonnegative"))
}

/// Image of a p-integral rational in Z/p^e, or `None` if p divides the
/// denominator.
pub fn reduce_mod_prime_power(x: &ExactRational, p: u64, e: u32) -> Option<BigUint> {
    let modulus = BigUint::from(p).pow(e);
    let den = exact::denom_abs(x);
    if (&den % p).is_zero() {
        return None;
    }
    let m_int = BigInt::from(modulus.clone());
    let num = x.numer().mod_floor(&m_int).to_biguint().expect("nonnegative");
    let inv = mod_inverse(&(den % &modulus), &modulus)?;
    Some((num * inv) % modulus)
}

/// Advances the state at n-1 to the state at n (n >= 2).
pub fn padic_step(ctx: PrimePowerContext, params: GoebelParams, n: u64, prev: &PadicState) -> Result<PadicState> {
    if n < 2 {
        return Err(GoebelError::InvalidArgument("padic_step needs n >= 2".into()));
    }
    let (a, prev_budget) = match prev {
        PadicState::NonIntegral => return Ok(PadicState::NonIntegral),
        PadicState::Residue { a, budget } => (a, *budget),
    };
    let v = nu_p_u64(ctx.p, n);
    if v > prev_budget {
        return Err(GoebelError::BudgetUnderflow {
            p: ctx.p,
            r: ctx.r,
            n,
            needed: (u64::from(ctx.r - prev_budget) + u64::from(v)) as u32,
        });
    }
    let p = BigUint::from(ctx.p);
    let prev_mod = p.pow(prev_budget);
    let budget = prev_budget - v;

    // a (n - 1 + a^(k-1)) mod p^b(n-1)
    let power = a.modpow(&BigUint::from(params.k() - 1), &prev_mod);
    let x = (a * ((power + BigUint::from(n - 1)) % &prev_mod)) % &prev_mod;

    let p_v = p.pow(v);
    if !(&x % &p_v).is_zero() {
        return Ok(PadicState::NonIntegral);
    }
    let modulus = p.pow(budget);
    let unit = BigUint::from(n / ctx.p.pow(v));
    let c = mod_inverse(&(unit % &modulus), &modulus).expect("unit part of n is prime to p");
    let a_next = ((x / p_v) * c) % modulus;
    Ok(PadicState::Residue { a: a_next, budget })
}

/// The run of states for one (k, l, p, r), extended on demand.
#[derive(Debug, Clone)]
pub struct PadicRun {
    ctx: PrimePowerContext,
    params: GoebelParams,
    /// states[i] is the state at n = i + 1; stops growing after NonIntegral.
    states: Vec<PadicState>,
}

impl PadicRun {
    pub fn new(ctx: PrimePowerContext, params: GoebelParams) -> Self {
        let modulus = BigUint::from(ctx.p).pow(ctx.r);
        let a = BigUint::from(params.l()) % modulus;
        PadicRun {
            ctx,
            params,
            states: vec![PadicState::Residue { a, budget: ctx.r }],
        }
    }

    fn last_index(&self) -> u64 {
        self.states.len() as u64
    }

    pub fn state_at(&mut self, n: u64) -> Result<PadicState> {
        if n == 0 {
            return Err(GoebelError::InvalidArgument("indices start at n = 1".into()));
        }
        self.ctx.budget_at(n)?;
        while self.last_index() < n {
            let last = self.states.last().expect("run is never empty");
            if *last == PadicState::NonIntegral {
                return Ok(PadicState::NonIntegral);
            }
            let next = padic_step(self.ctx, self.params, self.last_index() + 1, last)?;
            self.states.push(next);
        }
        Ok(self.states[(n - 1) as usize].clone())
    }
}

thread_local! {
    static RUNS: RefCell<HashMap<(GoebelParams, PrimePowerContext), PadicRun>> =
        RefCell::new(HashMap::new());
}

/// State at n, memoized per (k, l, p, r) in a per-thread table.
pub fn padic_eval(ctx: PrimePowerContext, params: GoebelParams, n: u64) -> Result<PadicState> {
    RUNS.with(|runs| {
        let mut runs = runs.borrow_mut();
        runs.entry((params, ctx))
            .or_insert_with(|| PadicRun::new(ctx, params))
            .state_at(n)
    })
}

/// Drops this thread's memo tables.
pub fn clear_padic_memo() {
    RUNS.with(|runs| runs.borrow_mut().clear());
}

/// `a (n - 1 + a^(k-1))` step on machine words; `None` means NonIntegral.
/// Requires p^budget < 2^63 so products fit in u128.
fn small_step(p: u64, k: u32, n: u64, a: u64, budget: u32) -> Option<(u64, u32)> {
    let v = nu_p_u64(p, n);
    debug_assert!(v <= budget);
    let prev_mod = p.pow(budget);
    let mulmod = |x: u64, y: u64| ((u128::from(x) * u128::from(y)) % u128::from(prev_mod)) as u64;
    let mut power = 1 % prev_mod;
    let mut base = a % prev_mod;
    let mut e = k - 1;
    while e > 0 {
        if e & 1 == 1 {
            power = mulmod(power, base);
        }
        base = mulmod(base, base);
        e >>= 1;
    }
    let x = mulmod(
        a,
        ((u128::from(power) + u128::from(n - 1)) % u128::from(prev_mod)) as u64,
    );
    let p_v = p.pow(v);
    if x % p_v != 0 {
        return None;
    }
    let next_budget = budget - v;
    let modulus = p.pow(next_budget);
    if modulus == 1 {
        return Some((0, 0));
    }
    let unit = (n / p_v) % modulus;
    let c = small_inverse(unit, modulus);
    let next = ((u128::from(x / p_v) * u128::from(c)) % u128::from(modulus)) as u64;
    Some((next, next_budget))
}

fn small_inverse(x: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (i128::from(x), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(i128::from(m)) as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TrackState {
    Small { a: u64, budget: u32 },
    Big(PadicState),
    Failed,
}

/// One prime's run inside [`compute_n`]: keeps only the current state and
/// restarts from n = 1 with a larger budget when nu_p(n!) outgrows it.
struct PrimeTrack {
    p: u64,
    r: u32,
    n: u64,
    state: TrackState,
}

impl PrimeTrack {
    fn start(p: u64, r: u32, params: GoebelParams) -> Self {
        let fits = (p as f64).log2() * f64::from(r) < 62.0;
        let state = if fits {
            TrackState::Small {
                a: u64::from(params.l()) % p.pow(r),
                budget: r,
            }
        } else {
            let a = BigUint::from(params.l()) % BigUint::from(p).pow(r);
            TrackState::Big(PadicState::Residue { a, budget: r })
        };
        PrimeTrack { p, r, n: 1, state }
    }

    fn advance(&mut self, params: GoebelParams, target: u64) -> Result<bool> {
        let needed = nu_p_factorial(self.p, target) as u32;
        if needed > self.r {
            let r = needed.max(self.r.saturating_mul(2));
            *self = PrimeTrack::start(self.p, r, params);
        }
        let ctx = PrimePowerContext { p: self.p, r: self.r };
        while self.n < target {
            let n = self.n + 1;
            self.state = match &self.state {
                TrackState::Failed => break,
                TrackState::Small { a, budget } => match small_step(self.p, params.k(), n, *a, *budget) {
                    Some((a, budget)) => TrackState::Small { a, budget },
                    None => TrackState::Failed,
                },
                TrackState::Big(prev) => match padic_step(ctx, params, n, prev)? {
                    PadicState::NonIntegral => TrackState::Failed,
                    next => TrackState::Big(next),
                },
            };
            self.n = n;
        }
        Ok(self.state != TrackState::Failed)
    }
}

fn check_n_args(params: GoebelParams, cap: u64) -> Result<()> {
    params.require_nondegenerate()?;
    if cap < 2 {
        return Err(GoebelError::InvalidArgument("cap must be >= 2".into()));
    }
    Ok(())
}

/// N_{k,l}: the least n <= cap with g(n) not p-integral for some prime p <= n.
pub fn compute_n(params: GoebelParams, cap: u64) -> Result<NValue> {
    check_n_args(params, cap)?;
    let primes = primes_up_to(cap);
    let mut tracks: Vec<PrimeTrack> = Vec::with_capacity(primes.len());
    for n in 2..=cap {
        if let Some(&p) = primes.get(tracks.len()) {
            if p == n {
                tracks.push(PrimeTrack::start(p, 1, params));
            }
        }
        for track in tracks.iter_mut() {
            if !track.advance(params, n)? {
                return Ok(NValue::Index(n));
            }
        }
    }
    Ok(NValue::ExceedsCap)
}

/// The literal reference procedure: for every n and every prime p <= n,
/// recompute the state from scratch with r = nu_p(n!). Quadratic and slow;
/// kept to check [`compute_n`] against.
pub fn compute_n_reference(params: GoebelParams, cap: u64) -> Result<NValue> {
    check_n_args(params, cap)?;
    for n in 2..=cap {
        for p in primes_up_to(n) {
            let ctx = PrimePowerContext::new(p, nu_p_factorial(p, n) as u32)?;
            let mut run = PadicRun::new(ctx, params);
            if !run.state_at(n)?.is_integral() {
                return Ok(NValue::Index(n));
            }
        }
    }
    Ok(NValue::ExceedsCap)
}

/// Parameter grid for [`check_key_lemma`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaRanges {
    pub ks: Vec<u32>,
    pub ls: Vec<u32>,
    pub n_max: u64,
}

/// Checks the four local properties of the sequence at p against exact values:
/// integrality for p > n, persistence of non-integrality, periodicity in k
/// modulo phi(p^r) (for k >= r) and in l modulo p^r, the last two including
/// the bound nu_p(difference) >= r - nu_p(n!). Sequences too large for the
/// default digit budget are checked on the prefix that fits.
pub fn check_key_lemma(ranges: &LemmaRanges, p: u64, r: u32) -> Result<VerdictReport> {
    let ctx = PrimePowerContext::new(p, r)?;
    let budget = DigitBudget::default();
    let mut values: HashMap<(u32, u32), Vec<ExactRational>> = HashMap::new();
    for &k in &ranges.ks {
        for &l in &ranges.ls {
            let params = GoebelParams::new(k, l)?;
            let prefix = match exact::eval_prefix(params, ranges.n_max, budget) {
                Err(GoebelError::BudgetExceeded { last_complete, .. }) => {
                    exact::eval_prefix(params, last_complete, budget)?
                }
                other => other?,
            };
            values.insert((k, l), prefix);
        }
    }
    // values are kept in lowest terms
    let integral_at_p = |x: &ExactRational| !(exact::denom_abs(x) % p).is_zero();

    let mut report = VerdictReport::new(format!("local properties at p = {p}, r = {r}"));

    for (&(k, l), seq) in values.iter() {
        for (i, g) in seq.iter().enumerate() {
            let n = i as u64 + 1;
            if p > n {
                report.record(integral_at_p(g), || Counterexample {
                    k,
                    l,
                    n,
                    p: Some(p),
                    detail: "(1) p > n but g(n) not p-integral".into(),
                });
            }
            if let Some(next) = seq.get(i + 1) {
                if !integral_at_p(g) {
                    report.record(!integral_at_p(next), || Counterexample {
                        k,
                        l,
                        n: n + 1,
                        p: Some(p),
                        detail: "(2) non-integrality did not persist".into(),
                    });
                }
            }
        }
    }

    let compare = |report: &mut VerdictReport, x: &[ExactRational], y: &[ExactRational], k: u32, l: u32, item: &str| {
        for (i, (gx, gy)) in x.iter().zip(y).enumerate() {
            let n = i as u64 + 1;
            let used = nu_p_factorial(p, n);
            if used > u64::from(r) {
                break;
            }
            let (ix, iy) = (integral_at_p(gx), integral_at_p(gy));
            let close = if ix && iy {
                let e = r - used as u32;
                e == 0 || reduce_mod_prime_power(gx, p, e) == reduce_mod_prime_power(gy, p, e)
            } else {
                true
            };
            report.record(ix == iy && close, || Counterexample {
                k,
                l,
                n,
                p: Some(p),
                detail: format!("{item}: verdicts {ix}/{iy}, congruence holds: {close}"),
            });
        }
    };

    let phi = totient(ctx.p.pow(r));
    let modulus = ctx.p.pow(r);
    for (a, &k1) in ranges.ks.iter().enumerate() {
        for &k2 in &ranges.ks[a + 1..] {
            if k1 < r || k2 < r || k1 == k2 || u64::from(k1.abs_diff(k2)) % phi != 0 {
                continue;
            }
            for &l in &ranges.ls {
                compare(
                    &mut report,
                    &values[&(k1, l)],
                    &values[&(k2, l)],
                    k1,
                    l,
                    "(3) k-periodicity",
                );
            }
        }
    }
    for (a, &l1) in ranges.ls.iter().enumerate() {
        for &l2 in &ranges.ls[a + 1..] {
            if l1 == l2 || u64::from(l1.abs_diff(l2)) % modulus != 0 {
                continue;
            }
            for &k in &ranges.ks {
                compare(
                    &mut report,
                    &values[&(k, l1)],
                    &values[&(k, l2)],
                    k,
                    l1,
                    "(4) l-periodicity",
                );
            }
        }
    }
    report.counterexamples.sort_by_key(|c| (c.k, c.l, c.n));
    Ok(report)
}

/// `a` as a machine integer when it fits (for display).
pub fn residue_u64(a: &BigUint) -> Option<u64> {
    a.to_u64()
}
