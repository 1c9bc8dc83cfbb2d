use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::coeffs::asym_coeffs;
use super::constants::{c_of_n, goebel_log_constant, log_g, shifted_log_sum};
use crate::error::{GoebelError, Result};
use crate::exact::{ExactRational, GoebelParams};
use crate::real::{magnitude_bits, Accuracy, HighPrecReal, Working, LOG2_10};
use crate::report::{Counterexample, VerdictReport};

/// C^(k^n) n^(1/(k-1)) (1 + sum_r a_r n^-r) with its constant and
/// coefficients.
#[derive(Debug, Clone)]
pub struct AsymptoticExpansion {
    params: GoebelParams,
    log_constant: HighPrecReal,
    coeffs: Vec<ExactRational>,
    digits: u32,
}

impl AsymptoticExpansion {
    /// Expansion through `order`, with log C to `digits` places.
    pub fn new(params: GoebelParams, order: u32, digits: u32) -> Result<Self> {
        params.require_nondegenerate()?;
        Ok(AsymptoticExpansion {
            params,
            log_constant: goebel_log_constant(params, digits)?,
            coeffs: asym_coeffs(params.k(), order)?,
            digits,
        })
    }

    /// Expansion precise enough to be evaluated at indices up to `n_max` with
    /// about `digits` places left in the log.
    pub fn for_indices(params: GoebelParams, order: u32, n_max: u64, digits: u32) -> Result<Self> {
        let lift = (n_max as f64 * f64::from(params.k()).log10()).ceil() as u32;
        Self::new(params, order, digits + lift)
    }

    pub fn params(&self) -> GoebelParams {
        self.params
    }

    pub fn order(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    /// a_{k,0} .. a_{k,order}
    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn log_constant(&self) -> &HighPrecReal {
        &self.log_constant
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    fn working(&self, n: u64) -> Working {
        let scale = magnitude_bits(self.log_constant.value()).max(0)
            + (n as f64 * f64::from(self.params.k()).log2()).ceil() as i64
            + 8;
        Working::for_places(i64::from(self.digits) + 10, scale)
    }
}

/// Result of [`expansion_eval`].
#[derive(Debug, Clone)]
pub struct ExpansionValue {
    pub n: u64,
    pub order: u32,
    /// log of the truncated expansion
    pub log_value: HighPrecReal,
    /// g(n) divided by the expansion, when a log g(n) was supplied
    pub ratio: Option<HighPrecReal>,
}

/// 1 + sum_{r=1}^{order} a_r n^-r, exactly.
pub fn correction_polynomial(coeffs: &[ExactRational], n: u64, order: u32) -> ExactRational {
    let inv = ExactRational::new(1.into(), n.into());
    let mut pow = ExactRational::one();
    let mut sum = ExactRational::zero();
    for a in coeffs.iter().take(order as usize + 1) {
        sum += a * &pow;
        pow *= &inv;
    }
    sum
}

/// log of C^(k^n) n^(1/(k-1)) (1 + sum_{r<=order} a_r n^-r), and optionally
/// the ratio exp(log_g - that).
pub fn expansion_eval(
    exp: &AsymptoticExpansion,
    n: u64,
    order: u32,
    log_g: Option<&HighPrecReal>,
) -> Result<ExpansionValue> {
    if n == 0 {
        return Err(GoebelError::InvalidArgument("sequence indices start at n = 1".into()));
    }
    if order > exp.order() {
        return Err(GoebelError::InvalidArgument(format!(
            "expansion holds coefficients through order {}, asked for {order}",
            exp.order()
        )));
    }
    let poly = correction_polynomial(exp.coeffs(), n, order);
    if !poly.is_positive() {
        return Err(GoebelError::InvalidArgument(format!(
            "truncated series is not positive at n = {n}; use a larger n or a different order"
        )));
    }
    let k = exp.params.k();
    let mut w = exp.working(n);
    let kn = w.big(&num_traits::pow(BigUint::from(k), n as usize));
    let lead = w.mul(&kn, exp.log_constant.value());
    let ln_n = w.ln_u64(n);
    let power = w.div(&ln_n, &w.int(u64::from(k - 1)));
    let ln_poly = w.ln_rational(&poly);
    let value = w.add(&w.add(&lead, &power), &ln_poly);
    let rounding = w.pow2(magnitude_bits(&value).max(0) - w.bits as i64 + 8);
    let err = w.add(&w.mul(&kn, exp.log_constant.err()), &rounding);
    let places = (i64::from(exp.digits) - (n as f64 * f64::from(k).log10()).ceil() as i64).max(0) as u32;
    let log_value = HighPrecReal::new(value, err, Accuracy::Places(places));
    let ratio = log_g.map(|lg| {
        let d = w.sub(lg.value(), log_value.value());
        let r = w.exp(&d);
        let spread = w.add(lg.err(), log_value.err());
        // |e^(d+s) - e^d| <= 2 e^d s for s < 1/2
        let err = w.mul(&w.mul(&r, &spread), &w.int(2));
        HighPrecReal::new(r, err, Accuracy::Places(places))
    });
    Ok(ExpansionValue {
        n,
        order,
        log_value,
        ratio,
    })
}

/// One row of a residual table.
#[derive(Debug, Clone)]
pub struct ResidualRow {
    pub n: u64,
    pub value: HighPrecReal,
}

/// Scaled residuals rho_R(n) over a set of indices.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub k: u32,
    pub l: u32,
    pub order: u32,
    pub rows: Vec<ResidualRow>,
}

/// Serializable form of one row: {k, l, n, value, err}.
#[derive(Debug, Clone, Serialize)]
pub struct ValueRecord {
    pub k: u32,
    pub l: u32,
    pub n: u64,
    pub value: String,
    pub err: String,
}

impl ValueRecord {
    pub fn new(params: GoebelParams, n: u64, v: &HighPrecReal) -> Self {
        ValueRecord {
            k: params.k(),
            l: params.l(),
            n,
            value: v.render(),
            err: crate::real::rational_to_scientific(&v.err_rational(), 3),
        }
    }
}

impl ConvergenceReport {
    pub fn records(&self) -> Vec<ValueRecord> {
        let params = GoebelParams::new(self.k, self.l).expect("validated on construction");
        self.rows
            .iter()
            .map(|r| ValueRecord::new(params, r.n, &r.value))
            .collect()
    }
}

const RESIDUAL_DIGITS: u32 = 12;

/// rho_R(n) = (g(n) / (C^(k^n) n^(1/(k-1))) - 1 - sum_{r<=R} a_r n^-r) n^(R+1).
///
/// g(n) comes from the log-space recurrence, so indices well past the exact
/// range are allowed; rho_R(n) should tend to a_{k,R+1}.
pub fn convergence_report(params: GoebelParams, ns: &[u64], order: u32) -> Result<ConvergenceReport> {
    params.require_nondegenerate()?;
    let Some(&n_max) = ns.iter().max() else {
        return Ok(ConvergenceReport {
            k: params.k(),
            l: params.l(),
            order,
            rows: Vec::new(),
        });
    };
    if ns.contains(&0) {
        return Err(GoebelError::InvalidArgument("sequence indices start at n = 1".into()));
    }
    // rho needs q = g / (C^(k^n) n^(1/(k-1))) to about 10^-(12 + (R+1) log10 n).
    let q_places = RESIDUAL_DIGITS + 6 + ((order + 1) as f64 * (n_max as f64).log10()).ceil() as u32;
    let exp = AsymptoticExpansion::for_indices(params, order, n_max, q_places + 4)?;
    let rows = ns
        .par_iter()
        .map(|&n| {
            let lg = log_g(params, n, q_places + 4)?;
            Ok(ResidualRow {
                n,
                value: scaled_residual(&exp, &lg, n, order, q_places),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        k: params.k(),
        l: params.l(),
        order,
        rows,
    })
}

fn scaled_residual(exp: &AsymptoticExpansion, lg: &HighPrecReal, n: u64, order: u32, q_places: u32) -> HighPrecReal {
    let k = exp.params.k();
    let mut w = exp.working(n);
    let kn = w.big(&num_traits::pow(BigUint::from(k), n as usize));
    let lead = w.mul(&kn, exp.log_constant.value());
    let ln_n = w.ln_u64(n);
    let power = w.div(&ln_n, &w.int(u64::from(k - 1)));
    let d = w.sub(&w.sub(lg.value(), &lead), &power);
    let q = w.exp(&d);
    let poly = w.rational(&correction_polynomial(exp.coeffs(), n, order));
    let scale = w.big(&num_traits::pow(BigUint::from(n), order as usize + 1));
    let value = w.mul(&w.sub(&q, &poly), &scale);
    let d_err = w.add(lg.err(), &w.mul(&kn, exp.log_constant.err()));
    let rounding = w.pow2(-((f64::from(q_places) * LOG2_10) as i64));
    let err = w.mul(&scale, &w.add(&w.mul(&w.mul(&q, &d_err), &w.int(2)), &rounding));
    HighPrecReal::new(value, err, Accuracy::Significant(RESIDUAL_DIGITS))
}

/// |exp(S(n)) - (C(n)/C)^(k^n)| n^R for each n; bounded in n when the error
/// term behaves as claimed.
pub fn error_term_residuals(params: GoebelParams, ns: &[u64], power: u32, digits: u32) -> Result<Vec<ResidualRow>> {
    params.require_nondegenerate()?;
    let n_max = ns.iter().copied().max().unwrap_or(1);
    let lift = (n_max as f64 * f64::from(params.k()).log10()).ceil() as u32;
    let lc = goebel_log_constant(params, digits + lift + 4)?;
    ns.par_iter()
        .map(|&n| {
            let lg = log_g(params, n, digits + 4)?;
            let k = params.k();
            let scale_bits = (n as f64 * f64::from(k).log2()).ceil() as i64 + 16;
            let mut w = Working::for_places(i64::from(digits) + 10, scale_bits);
            let kn = w.big(&num_traits::pow(BigUint::from(k), n as usize));
            let d = w.sub(lg.value(), &w.mul(&kn, lc.value()));
            let ratio_pow = w.exp(&d);
            let target = w.target_log2;
            let s = shifted_log_sum(&mut w, k, n, target);
            let es = w.exp(&s.value);
            let np = w.big(&num_traits::pow(BigUint::from(n), power as usize));
            let value = w.mul(&w.sub(&es, &ratio_pow).abs(), &np);
            let d_err = w.add(lg.err(), &w.mul(&kn, lc.err()));
            let err = w.mul(
                &np,
                &w.mul(&w.int(2), &w.add(&w.mul(&ratio_pow, &d_err), &w.mul(&es, &s.err))),
            );
            Ok(ResidualRow {
                n,
                value: HighPrecReal::new(value, err, Accuracy::Significant(digits.min(15))),
            })
        })
        .collect()
}

/// (n, C(n)) for each n, the data behind a convergence plot.
pub fn c_of_n_series(params: GoebelParams, ns: &[u64], digits: u32) -> Result<Vec<ResidualRow>> {
    ns.par_iter()
        .map(|&n| {
            Ok(ResidualRow {
                n,
                value: c_of_n(params, n, digits)?,
            })
        })
        .collect()
}

/// Checks C(n) > C(n+1) > 1 over 1..=n_max with certified margins.
pub fn check_c_of_n_monotone(params: GoebelParams, n_max: u64, digits: u32) -> Result<VerdictReport> {
    let ns: Vec<u64> = (1..=n_max).collect();
    let series = c_of_n_series(params, &ns, digits)?;
    let mut report = VerdictReport::new(format!("C(n) strictly decreasing and > 1 for {params}, n <= {n_max}"));
    let one = ExactRational::one();
    for (i, row) in series.iter().enumerate() {
        report.record(row.value.certainly_gt(&one), || Counterexample {
            k: params.k(),
            l: params.l(),
            n: row.n,
            p: None,
            detail: format!("C(n) = {} not certainly above 1", row.value.render()),
        });
        if let Some(next) = series.get(i + 1) {
            let ok = row.value.lower() > next.value.upper();
            report.record(ok, || Counterexample {
                k: params.k(),
                l: params.l(),
                n: row.n,
                p: None,
                detail: format!(
                    "C(n) = {} not certainly above C(n+1) = {}",
                    row.value.render(),
                    next.value.render()
                ),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::asym_coeff;
    use crate::asymptotics::constants::exact_log_g;
    use num_traits::ToPrimitive;

    fn p(k: u32, l: u32) -> GoebelParams {
        GoebelParams::new(k, l).unwrap()
    }

    #[test]
    fn leading_term_only() {
        let params = p(2, 2);
        let exp = AsymptoticExpansion::new(params, 0, 30).unwrap();
        let v = expansion_eval(&exp, 10, 0, None).unwrap();
        let c = exp.log_constant().to_f64();
        let want = 1024.0 * c + 10f64.ln();
        assert!((v.log_value.to_f64() - want).abs() < 1e-9);
    }

    #[test]
    fn ratio_against_exact_value() {
        let params = p(2, 2);
        let exp = AsymptoticExpansion::for_indices(params, 6, 20, 30).unwrap();
        assert_eq!(
            exp.coeffs()
                .iter()
                .map(|c| c.to_integer().to_i64().unwrap())
                .collect::<Vec<_>>(),
            vec![1, 2, -1, 4, -21, 138, -1091]
        );
        let lg = exact_log_g(params, 20, 40).unwrap();
        let v = expansion_eval(&exp, 20, 6, Some(&lg)).unwrap();
        let gap = (v.ratio.unwrap().to_f64() - 1.0).abs();
        let a7 = asym_coeff(2, 7).unwrap().to_f64().unwrap().abs();
        assert!(gap <= 2.0 * a7 / 20f64.powi(7), "{gap}");
        assert!(gap > 0.0);
    }

    #[test]
    fn residuals_approach_next_coefficient() {
        let params = p(2, 2);
        for order in 0..=3u32 {
            let report = convergence_report(params, &[100], order).unwrap();
            let rho = report.rows[0].value.to_f64();
            let want = asym_coeff(2, order + 1).unwrap().to_f64().unwrap();
            assert!(((rho - want) / want).abs() < 0.1, "R={order}: {rho} vs {want}");
        }
        let report = convergence_report(p(3, 2), &[40], 2).unwrap();
        let want = asym_coeff(3, 3).unwrap().to_f64().unwrap();
        let rho = report.rows[0].value.to_f64();
        assert!(((rho - want) / want).abs() < 0.1, "{rho} vs {want}");
    }

    #[test]
    fn residual_matches_exact_within_reach() {
        let params = p(2, 2);
        let report = convergence_report(params, &[18], 2).unwrap();
        let exp = AsymptoticExpansion::for_indices(params, 2, 18, 40).unwrap();
        let lg = exact_log_g(params, 18, 50).unwrap();
        let direct = scaled_residual(&exp, &lg, 18, 2, 30);
        assert!((report.rows[0].value.to_f64() - direct.to_f64()).abs() < 1e-9);
    }

    #[test]
    fn error_term_is_small() {
        let rows = error_term_residuals(p(2, 2), &[6, 8, 10, 12], 3, 20).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].value.to_f64() < pair[0].value.to_f64(), "n={}", pair[1].n);
        }
        assert!(rows[3].value.to_f64() < 1e-10);
    }

    #[test]
    fn c_of_n_decreases() {
        for (k, l) in [(2, 2), (3, 2), (2, 3)] {
            let r = check_c_of_n_monotone(p(k, l), 15, 20).unwrap();
            assert!(r.passed, "{:?}", r.counterexamples);
        }
    }

    #[test]
    fn rejects_out_of_range_order() {
        let exp = AsymptoticExpansion::new(p(2, 2), 2, 20).unwrap();
        assert!(expansion_eval(&exp, 10, 3, None).is_err());
        assert!(expansion_eval(&exp, 0, 1, None).is_err());
    }
}
