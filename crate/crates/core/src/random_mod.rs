//! Residues of g(n) modulo p^r below n = p, and the primes at which g(p)
//! first leaves Z_(p).

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GoebelError, Result};
use crate::exact::GoebelParams;
use crate::padic::{padic_eval, primes_up_to, PadicState, PrimePowerContext};
use crate::report::{Counterexample, VerdictReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SingletonZero,
    AllDistinct,
    Violation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SingletonZero => "singleton-zero",
            Verdict::AllDistinct => "all-distinct",
            Verdict::Violation => "violation",
        })
    }
}

/// The residues g(n) mod p^r over the n in [1, p) with p^(r-1) | g(n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueSetReport {
    pub k: u32,
    pub l: u32,
    pub p: u64,
    pub r: u32,
    pub verdict: Verdict,
    pub index_set: Vec<u64>,
    /// In index order, one per element of `index_set`.
    #[serde(serialize_with = "as_decimal_strings")]
    pub residues: Vec<BigUint>,
}

fn as_decimal_strings<S: serde::Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl ResidueSetReport {
    /// The distinct residues as a sorted set.
    pub fn residue_set(&self) -> Vec<BigUint> {
        let mut v = self.residues.clone();
        v.sort();
        v.dedup();
        v
    }

    /// Checks n g(n) = a b p^(r-1) (mod p^r) across the index set, where a is
    /// its least element and g(a) = b p^(r-1). Vacuous on an empty set.
    pub fn lemma_holds(&self) -> bool {
        let (Some(&a), Some(ga)) = (self.index_set.first(), self.residues.first()) else {
            return true;
        };
        let p = BigUint::from(self.p);
        let low = p.pow(self.r - 1);
        let modulus = &low * &p;
        let b = ga / &low;
        let want = (BigUint::from(a) * b * &low) % &modulus;
        self.index_set
            .iter()
            .zip(&self.residues)
            .all(|(&n, g)| (BigUint::from(n) * g) % &modulus == want)
    }
}

fn classify(residues: &[BigUint]) -> Verdict {
    if !residues.is_empty() && residues.iter().all(|x| x.is_zero()) {
        return Verdict::SingletonZero;
    }
    let distinct: HashSet<&BigUint> = residues.iter().collect();
    if distinct.len() == residues.len() {
        Verdict::AllDistinct
    } else {
        Verdict::Violation
    }
}

/// G^r_{k,l,p}. Errors with `NonIntegral` if some g(n), n < p, is not
/// p-integral.
pub fn residue_set(params: GoebelParams, p: u64, r: u32) -> Result<ResidueSetReport> {
    params.require_nondegenerate()?;
    if r < 2 {
        return Err(GoebelError::InvalidArgument(format!(
            "residue sets need r >= 2 (got {r})"
        )));
    }
    let ctx = PrimePowerContext::new(p, r)?;
    let low = BigUint::from(p).pow(r - 1);
    let mut index_set = Vec::new();
    let mut residues = Vec::new();
    for n in 1..p {
        match padic_eval(ctx, params, n)? {
            PadicState::NonIntegral => {
                return Err(GoebelError::NonIntegral {
                    k: params.k(),
                    l: params.l(),
                    n,
                    p,
                })
            }
            PadicState::Residue { a, .. } => {
                if (&a % &low).is_zero() {
                    index_set.push(n);
                    residues.push(a);
                }
            }
        }
    }
    Ok(ResidueSetReport {
        k: params.k(),
        l: params.l(),
        p,
        r,
        verdict: classify(&residues),
        index_set,
        residues,
    })
}

/// Aggregate outcome of [`verify_random_theorem`].
#[derive(Debug, Clone, Serialize)]
pub struct RandomTheoremReport {
    pub dichotomy: VerdictReport,
    pub lemma: VerdictReport,
    /// Tuples left out because g(n) is not p-integral for some n < p.
    pub skipped: u64,
    pub singleton_zero: u64,
    pub all_distinct: u64,
    /// Tuples whose index set was empty (counted among `all_distinct`).
    pub empty: u64,
}

impl RandomTheoremReport {
    pub fn passed(&self) -> bool {
        self.dichotomy.passed && self.lemma.passed
    }
}

/// Checks the singleton-or-distinct dichotomy over 2 <= k, l <= k_max,
/// primes p <= p_max and 2 <= r <= r_max.
pub fn verify_random_theorem(k_max: u32, l_max: u32, p_max: u64, r_max: u32) -> Result<RandomTheoremReport> {
    let mut tuples = Vec::new();
    for k in 2..=k_max {
        for l in 2..=l_max {
            for &p in &primes_up_to(p_max) {
                for r in 2..=r_max {
                    tuples.push((GoebelParams::new(k, l)?, p, r));
                }
            }
        }
    }
    let outcomes: Vec<Result<Option<ResidueSetReport>>> = tuples
        .par_iter()
        .map(|&(params, p, r)| match residue_set(params, p, r) {
            Ok(rep) => Ok(Some(rep)),
            Err(GoebelError::NonIntegral { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();

    let mut report = RandomTheoremReport {
        dichotomy: VerdictReport::new(format!(
            "residue sets are {{0}} or injective for k <= {k_max}, l <= {l_max}, p <= {p_max}, r <= {r_max}"
        )),
        lemma: VerdictReport::new("n g(n) = a b p^(r-1) mod p^r on each index set"),
        skipped: 0,
        singleton_zero: 0,
        all_distinct: 0,
        empty: 0,
    };
    for out in outcomes {
        let Some(rep) = out? else {
            report.skipped += 1;
            continue;
        };
        let fail = |detail: String| Counterexample {
            k: rep.k,
            l: rep.l,
            n: rep.index_set.first().copied().unwrap_or(0),
            p: Some(rep.p),
            detail,
        };
        report.dichotomy.record(rep.verdict != Verdict::Violation, || {
            fail(format!("r = {}: residues {:?}", rep.r, rep.residues))
        });
        report.lemma.record(rep.lemma_holds(), || {
            fail(format!("r = {}: lemma congruence fails", rep.r))
        });
        match rep.verdict {
            Verdict::SingletonZero => report.singleton_zero += 1,
            Verdict::AllDistinct => report.all_distinct += 1,
            Verdict::Violation => {}
        }
        if rep.index_set.is_empty() {
            report.empty += 1;
        }
    }
    Ok(report)
}

/// Primes p <= p_max with g(p) not in Z_(p).
pub fn scan_nonintegral_primes(params: GoebelParams, p_max: u64) -> Result<Vec<u64>> {
    params.require_nondegenerate()?;
    let primes = primes_up_to(p_max);
    let flags = primes
        .par_iter()
        .map(|&p| {
            let ctx = PrimePowerContext::new(p, 1)?;
            Ok(!padic_eval(ctx, params, p)?.is_integral())
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(primes
        .into_iter()
        .zip(flags)
        .filter(|&(_, bad)| bad)
        .map(|(p, _)| p)
        .collect())
}
