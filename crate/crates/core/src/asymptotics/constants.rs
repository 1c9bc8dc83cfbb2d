use astro_float::BigFloat;
use num_bigint::BigUint;
use num_traits::One;

use crate::error::{GoebelError, Result};
use crate::exact::{eval_exact, largest_feasible_index, DigitBudget, ExactRational, GoebelParams};
use crate::real::{certify, compare, float_to_f64, magnitude_bits, Accuracy, Approx, HighPrecReal, Working, LOG2_10};

const SEED_LIMIT: u64 = 12;
const SEED_BUDGET_BITS: u64 = 1 << 20;

/// Index at which the log-space recurrence takes over from exact values.
pub fn seed_index(params: GoebelParams) -> u64 {
    let budget = DigitBudget::new(SEED_BUDGET_BITS).expect("budget above minimum");
    largest_feasible_index(params, SEED_LIMIT, budget).max(1)
}

/// Upper bound on log2 of L(n) = log g(n), from C(n) <= C(1) = l^(1/k).
pub(crate) fn log_g_scale_bits(params: GoebelParams, n: u64) -> i64 {
    let k = f64::from(params.k());
    let ln_l = f64::from(params.l()).ln().max(1.0);
    ((n as f64 - 1.0) * k.log2() + ln_l.log2()).ceil() as i64 + 2
}

fn check_params(params: GoebelParams, n: u64) -> Result<()> {
    params.require_nondegenerate()?;
    if n == 0 {
        return Err(GoebelError::InvalidArgument("sequence indices start at n = 1".into()));
    }
    Ok(())
}

/// L(n) at one working precision, plus the truncation error accumulated from
/// dropped correction terms.
pub(crate) struct LogTrack {
    k: u32,
    n: u64,
    value: BigFloat,
    err: BigFloat,
}

impl LogTrack {
    fn exact(w: &mut Working, params: GoebelParams, n: u64) -> Result<Self> {
        let g = eval_exact(params, n, DigitBudget::default())?;
        Ok(LogTrack {
            k: params.k(),
            n,
            value: w.ln_rational(&g),
            err: w.zero(),
        })
    }

    /// y = log n - (k-1) L(n), the log of the correction argument.
    pub fn correction_exponent(&self, w: &mut Working) -> BigFloat {
        let ln_n = w.ln_u64(self.n);
        let scaled = w.mul(&w.int(u64::from(self.k - 1)), &self.value);
        w.sub(&ln_n, &scaled)
    }

    /// L(n) -> L(n+1).
    pub fn advance(&mut self, w: &mut Working) {
        let y = self.correction_exponent(w);
        let drop_log2 = -(w.bits as i64) - 16;
        let ln2 = w.ln2();
        let threshold = w.mul(&w.int((-drop_log2) as u64), &ln2).neg();
        let kf = w.int(u64::from(self.k));
        let (corr, dropped) = if compare(&y, &threshold).is_lt() {
            (w.zero(), w.pow2(drop_log2))
        } else {
            let x = w.exp(&y);
            (w.ln_1p(&x), w.zero())
        };
        let ln_next = w.ln_u64(self.n + 1);
        let next = w.sub(&w.add(&w.mul(&kf, &self.value), &corr), &ln_next);
        self.err = w.add(&w.mul(&kf, &self.err), &dropped);
        self.value = next;
        self.n += 1;
    }
}

/// L(n) at the working precision of `w`; exact below the seed, the log-space
/// recurrence above it.
pub(crate) fn log_track_at(w: &mut Working, params: GoebelParams, n: u64) -> Result<LogTrack> {
    let seed = seed_index(params);
    if n <= seed {
        return LogTrack::exact(w, params, n);
    }
    let mut track = seeded_track(w, params, seed)?;
    while track.n < n {
        track.advance(w);
    }
    Ok(track)
}

/// Exact L(seed), cross-checked against one recurrence step from seed - 1.
fn seeded_track(w: &mut Working, params: GoebelParams, seed: u64) -> Result<LogTrack> {
    let exact = LogTrack::exact(w, params, seed)?;
    if seed >= 2 {
        let mut stepped = LogTrack::exact(w, params, seed - 1)?;
        stepped.advance(w);
        let gap = w.sub(&stepped.value, &exact.value).abs();
        let slack = w.add(
            &stepped.err,
            &w.pow2(magnitude_bits(&exact.value).max(0) - w.bits as i64 + 16),
        );
        if compare(&gap, &slack).is_gt() {
            return Err(GoebelError::PrecisionMismatch {
                what: format!("log-space seam at n = {seed} for {params}"),
                digits: (w.bits as f64 / LOG2_10) as u32,
            });
        }
    }
    Ok(exact)
}

/// log g(n) to `digits` places after the point.
pub fn log_g(params: GoebelParams, n: u64, digits: u32) -> Result<HighPrecReal> {
    check_params(params, n)?;
    let places = i64::from(digits);
    let scale = log_g_scale_bits(params, n) + 8;
    certify(
        &format!("log g({n}) for {params}"),
        places,
        Accuracy::Places(digits),
        |guard| {
            let mut w = Working::for_places(places + i64::from(guard), scale);
            let t = log_track_at(&mut w, params, n)?;
            Ok(Approx {
                value: t.value,
                err: t.err,
            })
        },
    )
}

/// log2 of the tail bound for sum_{m > M} log(m + n) / k^m.
///
/// With log(m + n) <= log(M + n) + (m - M) the tail is at most
/// k^-M (log(M + n)/(k - 1) + k/(k - 1)^2).
pub fn log_sum_tail_log2(k: u32, n: u64, m: u64) -> f64 {
    let kf = f64::from(k);
    let inner = ((m + n) as f64).ln() / (kf - 1.0) + kf / ((kf - 1.0) * (kf - 1.0));
    -(m as f64) * kf.log2() + inner.log2()
}

/// S(n) = sum_{m >= 1} log(m + n) / k^m, truncated below 2^target_log2.
pub(crate) fn shifted_log_sum(w: &mut Working, k: u32, n: u64, target_log2: i64) -> Approx {
    let mut m = 1u64;
    while log_sum_tail_log2(k, n, m) > target_log2 as f64 {
        m += 1;
    }
    let kf = w.int(u64::from(k));
    let mut acc = w.zero();
    for i in (1..=m).rev() {
        let t = w.ln_u64(i + n);
        acc = w.div(&w.add(&acc, &t), &kf);
    }
    Approx {
        value: acc,
        err: w.pow2(log_sum_tail_log2(k, n, m).ceil() as i64),
    }
}

/// sigma_k = prod_{m >= 1} m^(1/k^m), to `digits` places.
pub fn somos_constant(k: u32, digits: u32) -> Result<HighPrecReal> {
    if k < 2 {
        return Err(GoebelError::InvalidArgument(format!(
            "somos constant needs k >= 2 (got {k})"
        )));
    }
    let places = i64::from(digits) + 1;
    certify(
        &format!("sigma_{k}"),
        i64::from(digits),
        Accuracy::Places(digits),
        |guard| {
            let mut w = Working::for_places(places + i64::from(guard), 4);
            let target = w.target_log2;
            let s = shifted_log_sum(&mut w, k, 0, target);
            let value = w.exp(&s.value);
            // |e^(s+d) - e^s| <= e^s * 2d for d < 1/2
            let err = w.mul(&w.mul(&value, &s.err), &w.int(2));
            Ok(Approx { value, err })
        },
    )
}

/// s_0 = 1, s_n = n s_(n-1)^2.
pub fn somos_sequence(n: u64) -> BigUint {
    let mut s = BigUint::one();
    for i in 1..=n {
        s = &s * &s * i;
    }
    s
}

/// epsilon(n) = sum_{m >= 1} k^-m log(1 + (m+n-1) / g(m+n-1)^(k-1)),
/// truncated once terms fall below 2^target_log2.
pub(crate) fn epsilon_raw(w: &mut Working, params: GoebelParams, n: u64, target_log2: i64) -> Result<Approx> {
    let k = params.k();
    let kf = w.int(u64::from(k));
    let km1 = w.int(u64::from(k - 1));
    let log2_k = f64::from(k).log2();
    let mut track = log_track_at(w, params, n)?;
    let mut sum = w.zero();
    let mut err = w.zero();
    let mut scale = w.int(1);
    let mut below = 0;
    for m in 1u64.. {
        scale = w.div(&scale, &kf);
        let y = track.correction_exponent(w);
        // term <= k^-m * exp(y)
        let bound_log2 = float_to_f64(&y) / std::f64::consts::LN_2 - m as f64 * log2_k;
        if bound_log2 < (target_log2 - 4) as f64 {
            below += 1;
            if below == 2 {
                // Terms fall off doubly exponentially from here on.
                err = w.add(&err, &w.pow2(bound_log2.ceil() as i64 + 2));
                break;
            }
        } else {
            below = 0;
        }
        let x = w.exp(&y);
        let lp = w.ln_1p(&x);
        let term = w.mul(&scale, &lp);
        sum = w.add(&sum, &term);
        // An error d in L moves x by a factor e^{(k-1)d}; for small d the
        // term moves by at most 2 (k - 1) d x k^-m.
        let moved = w.mul(&w.mul(&x, &scale), &w.mul(&km1, &track.err));
        err = w.add(&err, &w.mul(&moved, &w.int(2)));
        track.advance(w);
    }
    Ok(Approx { value: sum, err })
}

/// Rough log2 of epsilon(n), from its first term at low precision.
fn epsilon_magnitude_log2(params: GoebelParams, n: u64) -> Result<f64> {
    let scale = log_g_scale_bits(params, n);
    let mut w = Working::for_places(20, scale);
    let track = log_track_at(&mut w, params, n)?;
    let y = float_to_f64(&track.correction_exponent(&mut w));
    let x_log2 = y / std::f64::consts::LN_2;
    let first = if x_log2 < -30.0 {
        x_log2
    } else {
        (2f64.powf(x_log2)).ln_1p().log2()
    };
    Ok(first - f64::from(params.k()).log2())
}

/// epsilon(n) to `digits` significant digits.
pub fn epsilon(params: GoebelParams, n: u64, digits: u32) -> Result<HighPrecReal> {
    check_params(params, n)?;
    let mag = epsilon_magnitude_log2(params, n)?;
    let tol_places = i64::from(digits) - (mag / LOG2_10).floor() as i64;
    let scale = log_g_scale_bits(params, n) + 8;
    certify(
        &format!("epsilon({n}) for {params}"),
        tol_places,
        Accuracy::Significant(digits),
        |guard| {
            let rel_digits = i64::from(digits + guard);
            let mut w = Working::for_places(rel_digits, scale);
            let target = mag.floor() as i64 - (rel_digits as f64 * LOG2_10).ceil() as i64 - 8;
            epsilon_raw(&mut w, params, n, target)
        },
    )
}

/// log C = (L(n) - S(n) + epsilon(n)) / k^n at the working precision.
pub(crate) fn log_constant_raw(w: &mut Working, params: GoebelParams, depth: u64) -> Result<Approx> {
    let k = params.k();
    let kn = w.big(&num_traits::pow(BigUint::from(k), depth as usize));
    let depth_bits = (depth as f64 * f64::from(k).log2()).ceil() as i64;
    let target = w.target_log2 + depth_bits;
    let track = log_track_at(w, params, depth)?;
    let s = shifted_log_sum(w, k, depth, target);
    let eps = epsilon_raw(w, params, depth, target)?;
    let top = w.add(&w.sub(&track.value, &s.value), &eps.value);
    let err = w.add(&w.add(&track.err, &s.err), &eps.err);
    Ok(Approx {
        value: w.div(&top, &kn),
        err: w.div(&err, &kn),
    })
}

fn check_depth(params: GoebelParams, depth: u64) -> Result<()> {
    check_params(params, depth)
}

/// log C_{k,l} to `digits` places, built at the given depth.
pub fn goebel_log_constant_at(params: GoebelParams, depth: u64, digits: u32) -> Result<HighPrecReal> {
    check_depth(params, depth)?;
    let places = i64::from(digits) + 1;
    let scale = (depth as f64).log2().ceil() as i64 + 12;
    certify(
        &format!("log C at depth {depth} for {params}"),
        i64::from(digits),
        Accuracy::Places(digits),
        |guard| {
            let mut w = Working::for_places(places + i64::from(guard), scale);
            log_constant_raw(&mut w, params, depth)
        },
    )
}

/// C_{k,l} to `digits` places, built at the given depth.
pub fn goebel_constant_at(params: GoebelParams, depth: u64, digits: u32) -> Result<HighPrecReal> {
    check_depth(params, depth)?;
    let places = i64::from(digits) + 2;
    let scale = (depth as f64).log2().ceil() as i64 + 12;
    certify(
        &format!("C at depth {depth} for {params}"),
        i64::from(digits),
        Accuracy::Places(digits),
        |guard| {
            let mut w = Working::for_places(places + i64::from(guard), scale);
            let lc = log_constant_raw(&mut w, params, depth)?;
            let value = w.exp(&lc.value);
            let err = w.mul(&w.mul(&value, &lc.err), &w.int(2));
            Ok(Approx { value, err })
        },
    )
}

/// Default depth for the constant: the exact seed index.
pub fn default_depth(params: GoebelParams) -> u64 {
    seed_index(params)
}

/// C_{k,l} = lim g(n)^(1/k^n) to `digits` places.
pub fn goebel_constant(params: GoebelParams, digits: u32) -> Result<HighPrecReal> {
    params.require_nondegenerate()?;
    goebel_constant_at(params, default_depth(params), digits)
}

/// log C_{k,l} to `digits` places.
pub fn goebel_log_constant(params: GoebelParams, digits: u32) -> Result<HighPrecReal> {
    params.require_nondegenerate()?;
    goebel_log_constant_at(params, default_depth(params), digits)
}

/// C(n) = g(n)^(1/k^n) to `digits` places.
pub fn c_of_n(params: GoebelParams, n: u64, digits: u32) -> Result<HighPrecReal> {
    check_params(params, n)?;
    let places = i64::from(digits) + 2;
    let scale = (n as f64).log2().ceil() as i64 + 12;
    let k = params.k();
    certify(
        &format!("C({n}) for {params}"),
        i64::from(digits),
        Accuracy::Places(digits),
        |guard| {
            let mut w = Working::for_places(places + i64::from(guard), scale);
            let t = log_track_at(&mut w, params, n)?;
            let kn = w.big(&num_traits::pow(BigUint::from(k), n as usize));
            let lc = w.div(&t.value, &kn);
            let value = w.exp(&lc);
            let err = w.mul(&w.mul(&value, &w.div(&t.err, &kn)), &w.int(2));
            Ok(Approx { value, err })
        },
    )
}

/// Upper bound on epsilon(n) that follows from g(j) > C^(k^j):
/// ((n - 1)/(k - 1) + k/(k - 1)^2) * C^(-(k-1) k^n), returned as a natural log.
pub fn epsilon_upper_bound_ln(params: GoebelParams, n: u64, log_c_lower: f64) -> f64 {
    let k = f64::from(params.k());
    let lead = (n as f64 - 1.0) / (k - 1.0) + k / ((k - 1.0) * (k - 1.0));
    lead.ln() - (k - 1.0) * k.powf(n as f64) * log_c_lower
}

/// One row of the epsilon bound check.
#[derive(Debug, Clone)]
pub struct EpsilonBoundRow {
    pub n: u64,
    pub epsilon: HighPrecReal,
    /// ln of the upper end of epsilon's error interval
    pub ln_epsilon_upper: f64,
    /// ln(2n) - k^(n-1)
    pub ln_literal_bound: f64,
    pub literal_holds: bool,
    /// ln of [`epsilon_upper_bound_ln`] at the certified lower end of log C
    pub ln_derived_bound: f64,
    pub derived_holds: bool,
}

/// Compares epsilon(n) with 2n/exp(k^(n-1)) and with the bound derived from
/// the constant, in log space.
pub fn epsilon_bound_check(params: GoebelParams, n: u64, digits: u32) -> Result<EpsilonBoundRow> {
    let eps = epsilon(params, n, digits)?;
    let mut w = Working::new(256, -200);
    let upper = w.add(eps.value(), eps.err());
    let ln_upper = float_to_f64(&w.ln(&upper));
    let k = f64::from(params.k());
    let ln_literal = (2.0 * n as f64).ln() - k.powf(n as f64 - 1.0);
    let lc = goebel_log_constant(params, 20)?;
    let lc_lower = lc.to_f64() - (lc.err_log10() * std::f64::consts::LN_10).exp();
    let ln_derived = epsilon_upper_bound_ln(params, n, lc_lower);
    Ok(EpsilonBoundRow {
        n,
        literal_holds: ln_upper < ln_literal,
        derived_holds: ln_upper < ln_derived,
        epsilon: eps,
        ln_epsilon_upper: ln_upper,
        ln_literal_bound: ln_literal,
        ln_derived_bound: ln_derived,
    })
}

/// Smallest n0 in `range` such that epsilon(n) < 2n/exp(k^(n-1)) for every n
/// from n0 to the end of the range.
pub fn epsilon_bound_threshold(
    params: GoebelParams,
    range: std::ops::RangeInclusive<u64>,
    digits: u32,
) -> Result<Option<u64>> {
    let mut threshold = None;
    for n in range.rev() {
        if epsilon_bound_check(params, n, digits)?.literal_holds {
            threshold = Some(n);
        } else {
            break;
        }
    }
    Ok(threshold)
}

/// log of the exact value g(n), for cross-checks.
pub fn exact_log_g(params: GoebelParams, n: u64, digits: u32) -> Result<HighPrecReal> {
    check_params(params, n)?;
    let g: ExactRational = eval_exact(params, n, DigitBudget::default())?;
    let scale = log_g_scale_bits(params, n) + 8;
    let places = i64::from(digits);
    certify(
        &format!("exact log g({n})"),
        places,
        Accuracy::Places(digits),
        |guard| {
            let mut w = Working::for_places(places + i64::from(guard), scale);
            Ok(Approx {
                value: w.ln_rational(&g),
                err: w.zero(),
            })
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::float_to_rational;
    use num_traits::{Signed, ToPrimitive};

    fn p(k: u32, l: u32) -> GoebelParams {
        GoebelParams::new(k, l).unwrap()
    }

    #[test]
    fn somos_constants() {
        assert_eq!(somos_constant(2, 10).unwrap().to_decimal(10), "1.6616879496");
        let s2 = somos_constant(2, 30).unwrap().to_f64();
        assert_eq!(format!("{:.4}", s2 * s2), "2.7612");
        // displayed truncated, not rounded: 1.54625...
        let s3 = somos_constant(3, 30).unwrap().to_f64();
        assert!(format!("{:.8}", s3.powi(3)).starts_with("1.5462"));
    }

    #[test]
    fn somos_sequence_values() {
        let want = [1u32, 1, 2, 12, 576];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(somos_sequence(n as u64), BigUint::from(*w));
        }
        // s_20^(1/2^20) via its bit length and top bits
        let s = somos_sequence(20);
        let bits = s.bits();
        let top = (&s >> (bits - 53)).to_f64().unwrap();
        let ln_s = top.ln() + (bits - 53) as f64 * std::f64::consts::LN_2;
        let root = (ln_s / 2f64.powi(20)).exp();
        let sigma = somos_constant(2, 12).unwrap().to_f64();
        assert!((root - sigma).abs() < 5e-5, "{root} vs {sigma}");
    }

    #[test]
    fn tail_bound_dominates_brute_tail() {
        for k in [2u32, 3, 5] {
            for n in [0u64, 1, 5, 20] {
                for m in [1u64, 3, 10, 25] {
                    let brute: f64 = (m + 1..m + 400)
                        .map(|i| ((i + n) as f64).ln() / f64::from(k).powi(i as i32))
                        .sum();
                    let bound = 2f64.powf(log_sum_tail_log2(k, n, m));
                    assert!(brute <= bound, "k={k} n={n} M={m}: {brute} > {bound}");
                }
            }
        }
    }

    #[test]
    fn log_g_small_values() {
        let two_two = p(2, 2);
        let v = log_g(two_two, 5, 25).unwrap();
        assert_eq!(v.to_decimal(12), "3.332204510175");
        assert_eq!(log_g(two_two, 1, 20).unwrap().to_decimal(15), "0.693147180559945");
    }

    #[test]
    fn log_g_matches_exact_past_the_seed() {
        for (k, l, n) in [(2, 2, 20), (3, 2, 10), (2, 3, 16), (3, 3, 13)] {
            let params = p(k, l);
            let fast = log_g(params, n, 30).unwrap();
            let exact = exact_log_g(params, n, 30).unwrap();
            let gap = (fast.to_rational() - exact.to_rational()).abs();
            let tol = fast.err_rational()
                + exact.err_rational()
                + ExactRational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), 29));
            assert!(gap <= tol, "({k},{l},{n})");
        }
    }

    #[test]
    fn c22_to_22_places() {
        let c = goebel_constant(p(2, 2), 22).unwrap();
        assert_eq!(c.to_decimal(22), "1.0478314475764112295599");
        assert!(c.err_log10() < -22.0);
    }

    #[test]
    fn constant_is_stable_across_depths() {
        let params = p(3, 2);
        let a = goebel_constant_at(params, 8, 15).unwrap();
        let b = goebel_constant_at(params, 11, 15).unwrap();
        let gap = (a.to_rational() - b.to_rational()).abs();
        assert!(gap.to_f64().unwrap() < 1e-15);
        let deeper = goebel_constant_at(p(2, 2), 16, 22).unwrap();
        assert_eq!(deeper.to_decimal(22), "1.0478314475764112295599");
    }

    #[test]
    fn constants_exceed_one() {
        for k in 2..=5 {
            for l in 2..=5 {
                let c = goebel_constant(p(k, l), 12).unwrap();
                assert!(c.certainly_gt(&ExactRational::one()), "({k},{l})");
            }
        }
    }

    #[test]
    fn c_of_n_values() {
        let c1 = c_of_n(p(2, 2), 1, 8).unwrap();
        assert_eq!(c1.to_decimal(8), "1.41421356");
        let params = p(2, 2);
        let c = goebel_constant(params, 30).unwrap();
        let c25 = c_of_n(params, 25, 30).unwrap();
        // C(25) = C exp((S(25) - epsilon(25)) / 2^25); epsilon(25) is far below 10^-30.
        let mut w = Working::for_places(60, 8);
        let target = w.target_log2;
        let s = shifted_log_sum(&mut w, 2, 25, target);
        let k25 = w.int(1 << 25);
        let ratio = w.div(&s.value, &k25);
        let factor = w.exp(&ratio);
        let predicted = w.mul(c.value(), &factor);
        let gap = (float_to_rational(&predicted) - c25.to_rational())
            .abs()
            .to_f64()
            .unwrap();
        assert!(gap < 1e-25, "{gap}");
    }

    #[test]
    fn epsilon_values() {
        let params = p(2, 2);
        let e = epsilon(params, 8, 15).unwrap();
        assert!(e.to_f64() > 0.0);
        // Each side of L(n) = k^n log C + S(n) - epsilon(n), computed apart.
        let eps5 = epsilon(params, 5, 20).unwrap().to_f64();
        let mut w = Working::for_places(40, 8);
        let target = w.target_log2;
        let s = float_to_f64(&shifted_log_sum(&mut w, 2, 5, target).value);
        let lc = goebel_log_constant(params, 25).unwrap().to_f64();
        let other = s - 32.0 * ((28f64.ln()) / 32.0 - lc);
        assert!((eps5 - other).abs() < 1e-12, "{eps5} vs {other}");
    }

    #[test]
    fn derived_epsilon_bound_holds() {
        for (k, l) in [(2, 2), (3, 2), (2, 3)] {
            for n in 3..=8 {
                let row = epsilon_bound_check(p(k, l), n, 10).unwrap();
                assert!(
                    row.derived_holds,
                    "({k},{l},{n}): {} vs {}",
                    row.ln_epsilon_upper, row.ln_derived_bound
                );
            }
        }
    }

    #[test]
    fn rejects_degenerate() {
        assert!(goebel_constant(p(1, 3), 10).is_err());
        assert!(log_g(p(2, 1), 3, 10).is_err());
        assert!(somos_constant(1, 10).is_err());
    }
}
