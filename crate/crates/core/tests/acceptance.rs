//! Acceptance criteria. Prints one PASS/FAIL line per criterion.
//!
//! Two criteria cannot be met as stated and are listed in `UNATTAINABLE` with
//! the reason; they still run in full and print FAIL, but do not fail the
//! process. Any other FAIL does.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use goebel::asymptotics::{
    asym_coeff, c_of_n_series, convergence_report, epsilon, epsilon_bound_check, goebel_constant, somos_constant,
};
use goebel::exact::{eval_prefix, largest_feasible_index, naive_n, DigitBudget, ExactRational, GoebelParams, NValue};
use goebel::padic::{compute_n, padic_eval, PadicState, PrimePowerContext};
use goebel::random_mod::{residue_set, verify_random_theorem, Verdict};
use goebel::theorems::{classify_n7, verify_min7_reduction, DEFAULT_CAP};

const UNATTAINABLE: &[(u32, &str)] = &[
    (
        2,
        "exact g_{2,2}(43) has about 6e11 bits; naive evaluation stops at the digit budget",
    ),
    (
        8,
        "the stated bound is false for n >= 4 on all three pairs; see the per-n margins",
    ),
];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn gp(k: u32, l: u32) -> GoebelParams {
    GoebelParams::new(k, l).unwrap()
}

fn q(a: i64, b: i64) -> ExactRational {
    ExactRational::new(a.into(), b.into())
}

// 1. N table through the command line, byte for byte
fn table1() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_goebel"))
        .args(["table", "--kmax", "17", "--lmax", "17"])
        .output()
        .expect("run goebel");
    let fixture = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/data/table1.csv")).unwrap();
    let cells = fixture.iter().filter(|&&b| b == b'\n').count();
    let same = out.status.success() && out.stdout == fixture;
    outcome(
        same,
        format!("{} bytes, {} lines, identical: {same}", out.stdout.len(), cells),
    )
}

// 2. N_{2,2} both ways
fn anchor() -> Outcome {
    let fast = compute_n(gp(2, 2), DEFAULT_CAP).unwrap();
    let naive = naive_n(gp(2, 2), 60, DigitBudget::default());
    let naive_ok = matches!(naive, Ok(NValue::Index(43)));
    let naive_text = match &naive {
        Ok(v) => v.to_string(),
        Err(e) => e.to_string(),
    };
    outcome(
        fast == NValue::Index(43) && naive_ok,
        format!("compute_N = {fast}; naive_N: {naive_text}"),
    )
}

// 3. reduction claims plus an independent sweep of N <= 7 over the grid
fn main_theorem() -> Outcome {
    let claims = verify_min7_reduction().unwrap();
    let claims_ok = claims.iter().all(|r| r.passed);
    let classify = classify_n7(200, 200).unwrap();
    let mut mismatches = Vec::new();
    let mut sevens = 0;
    for k in 2..=200u32 {
        for l in 2..=200u32 {
            let n = compute_n(gp(k, l), 7).unwrap();
            let is_seven = n == NValue::Index(7);
            sevens += is_seven as u32;
            let below = matches!(n, NValue::Index(m) if m < 7);
            if below || is_seven != (k % 6 == 2 && l % 7 == 3) {
                mismatches.push((k, l, n));
            }
        }
    }
    outcome(
        claims_ok && classify.passed && mismatches.is_empty(),
        format!(
            "claims {}/4, classify {} over {} cells, sweep: {} cells with N = 7, {} mismatches",
            claims.iter().filter(|r| r.passed).count(),
            classify.passed,
            classify.checked,
            sevens,
            mismatches.len()
        ),
    )
}

/// x = p^v u with u a unit known modulo p^prec.
#[derive(Clone, Debug)]
struct Qp {
    p: u64,
    v: i64,
    u: BigUint,
    prec: u32,
}

fn split(p: u64, mut n: u64) -> (i64, u64) {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    (v, n)
}

fn ppow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

fn inv_mod(a: &BigUint, m: &BigUint) -> BigUint {
    let (a, m) = (BigInt::from(a.clone()), BigInt::from(m.clone()));
    let e = a.extended_gcd(&m);
    assert!(e.gcd.is_one());
    e.x.mod_floor(&m).to_biguint().unwrap()
}

impl Qp {
    fn from_u64(p: u64, n: u64, prec: u32) -> Qp {
        let (v, u) = split(p, n);
        Qp {
            p,
            v,
            u: BigUint::from(u) % ppow(p, prec),
            prec,
        }
    }

    fn pow(&self, e: u32) -> Qp {
        let m = ppow(self.p, self.prec);
        Qp {
            p: self.p,
            v: self.v * i64::from(e),
            u: self.u.modpow(&BigUint::from(e), &m),
            prec: self.prec,
        }
    }

    fn mul(&self, o: &Qp) -> Qp {
        let prec = self.prec.min(o.prec);
        Qp {
            p: self.p,
            v: self.v + o.v,
            u: (&self.u * &o.u) % ppow(self.p, prec),
            prec,
        }
    }

    /// n + self for an exact positive integer n; None when the sum vanishes
    /// to the known precision.
    fn add_int(&self, n: u64) -> Option<Qp> {
        let p = self.p;
        let (vn, un) = split(p, n);
        let abs = self.v + i64::from(self.prec);
        let m = vn.min(self.v);
        let width = u32::try_from(abs - m).ok()?;
        let modulus = ppow(p, width);
        let lift = |v: i64, u: &BigUint| -> BigUint {
            let shift = v - m;
            if shift >= i64::from(width) {
                BigUint::zero()
            } else {
                (ppow(p, shift as u32) * u) % &modulus
            }
        };
        let t = (lift(vn, &BigUint::from(un)) + lift(self.v, &self.u)) % &modulus;
        if t.is_zero() {
            return None;
        }
        let mut w = 0u32;
        let mut t = t;
        let pb = BigUint::from(p);
        while (&t % &pb).is_zero() {
            t /= &pb;
            w += 1;
        }
        Some(Qp {
            p,
            v: m + i64::from(w),
            u: t,
            prec: width - w,
        })
    }

    fn div_int(&self, n: u64) -> Qp {
        let (vn, un) = split(self.p, n);
        let m = ppow(self.p, self.prec);
        Qp {
            p: self.p,
            v: self.v - vn,
            u: (&self.u * inv_mod(&BigUint::from(un), &m)) % &m,
            prec: self.prec,
        }
    }

    /// Residue mod p^b, if determined.
    fn residue(&self, b: u32) -> Option<BigUint> {
        if self.v < 0 {
            return None;
        }
        if self.v >= i64::from(b) {
            return Some(BigUint::zero());
        }
        if self.v + i64::from(self.prec) < i64::from(b) {
            return None;
        }
        Some((ppow(self.p, self.v as u32) * &self.u) % ppow(self.p, b))
    }
}

/// g(1..=n_max) in Q_p, or the index where precision ran out.
fn qp_sequence(k: u32, l: u32, p: u64, n_max: u64) -> Result<Vec<Qp>, u64> {
    let mut g = Qp::from_u64(p, u64::from(l), 400);
    let mut out = vec![g.clone()];
    for n in 1..n_max {
        let s = g.pow(k - 1).add_int(n).ok_or(n + 1)?;
        g = g.mul(&s).div_int(n + 1);
        out.push(g.clone());
    }
    Ok(out)
}

fn exact_residue(x: &ExactRational, p: u64, b: u32) -> Option<BigUint> {
    let den = x.denom().abs();
    if (&den % BigInt::from(p)).is_zero() {
        return None;
    }
    let m = BigInt::from(ppow(p, b));
    let num = x.numer().mod_floor(&m).to_biguint().unwrap();
    let inv = inv_mod(
        &(den.to_biguint().unwrap() % m.to_biguint().unwrap()),
        &m.to_biguint().unwrap(),
    );
    Some((num * inv) % m.to_biguint().unwrap())
}

fn nu_p_factorial(p: u64, n: u64) -> u32 {
    let mut total = 0;
    let mut m = n;
    while m > 0 {
        m /= p;
        total += m;
    }
    total as u32
}

// 4. p-adic engine against exact values where they fit and against the Q_p
// model everywhere, including a cross-check of the two oracles
fn oracle_equivalence() -> Outcome {
    const N: u64 = 12;
    let primes = [2u64, 3, 5, 7, 11, 13];
    let (mut exact_cells, mut qp_cells, mut cross) = (0u64, 0u64, 0u64);
    let mut mismatches: Vec<String> = Vec::new();
    for k in 2..=10u32 {
        for l in 2..=10u32 {
            let reach = largest_feasible_index(gp(k, l), N, DigitBudget::default());
            let exact = eval_prefix(gp(k, l), reach, DigitBudget::default()).unwrap();
            for &p in &primes {
                let r = nu_p_factorial(p, N).max(1);
                let ctx = PrimePowerContext::new(p, r).unwrap();
                let model = qp_sequence(k, l, p, N);
                for n in 1..=N {
                    let b = r - nu_p_factorial(p, n);
                    let engine = match padic_eval(ctx, gp(k, l), n).unwrap() {
                        PadicState::NonIntegral => None,
                        PadicState::Residue { a, budget } => {
                            if budget != b {
                                mismatches.push(format!("k={k} l={l} p={p} n={n}: budget {budget} != {b}"));
                            }
                            Some(a % ppow(p, b))
                        }
                    };
                    let exact_res = exact.get(n as usize - 1).map(|g| exact_residue(g, p, b));
                    if let Some(want) = &exact_res {
                        exact_cells += 1;
                        if *want != engine {
                            mismatches.push(format!("k={k} l={l} p={p} n={n}: exact {want:?}, engine {engine:?}"));
                        }
                    }
                    match &model {
                        Ok(seq) => {
                            let x = &seq[n as usize - 1];
                            let want = if x.v < 0 { Some(None) } else { x.residue(b).map(Some) };
                            match want {
                                Some(want) => {
                                    qp_cells += 1;
                                    if want != engine {
                                        mismatches.push(format!(
                                            "k={k} l={l} p={p} n={n}: model {want:?}, engine {engine:?}"
                                        ));
                                    }
                                    if let Some(e) = &exact_res {
                                        cross += 1;
                                        if *e != want {
                                            mismatches.push(format!("k={k} l={l} p={p} n={n}: oracles disagree"));
                                        }
                                    }
                                }
                                None => mismatches.push(format!("k={k} l={l} p={p} n={n}: model precision too low")),
                            }
                        }
                        Err(at) => mismatches.push(format!("k={k} l={l} p={p}: model precision exhausted at n={at}")),
                    }
                }
            }
        }
    }
    let first = mismatches.first().cloned().unwrap_or_default();
    outcome(
        mismatches.is_empty(),
        format!(
            "{qp_cells} cells against the Q_p model, {exact_cells} against exact values, {cross} oracle cross-checks, {} mismatches {first}",
            mismatches.len()
        ),
    )
}

// 5. coefficients
fn coefficients() -> Outcome {
    let want = [2, -1, 4, -21, 138, -1091];
    let k_two = (1..=6).all(|r| asym_coeff(2, r).unwrap() == q(want[r as usize - 1], 1));
    let mut bad = Vec::new();
    for k in 2..=10i64 {
        let d = k - 1;
        let forms = [
            q(k, d.pow(2)),
            q(-k * (k * k - k - 1), 2 * d.pow(4)),
            q(k * (2 * k.pow(4) + k.pow(3) - 11 * k * k + 7 * k + 2), 6 * d.pow(6)),
            q(
                -k * (6 * k.pow(6) + 37 * k.pow(5) - 124 * k.pow(4) + 53 * k.pow(3) + 92 * k * k - 59 * k - 6),
                24 * d.pow(8),
            ),
            q(
                k * (24 * k.pow(8) + 478 * k.pow(7) - 1013 * k.pow(6) - 1324 * k.pow(5) + 4411 * k.pow(4)
                    - 2724 * k.pow(3)
                    - 453 * k * k
                    + 578 * k
                    + 24),
                120 * d.pow(10),
            ),
        ];
        for (r, f) in forms.iter().enumerate() {
            if asym_coeff(k as u32, r as u32 + 1).unwrap() != *f {
                bad.push((k, r + 1));
            }
        }
    }
    outcome(
        k_two && bad.is_empty(),
        format!(
            "a_(2,1..6) exact: {k_two}; closed forms k = 2..10: {} mismatches",
            bad.len()
        ),
    )
}

// within one unit in the last place of the expected decimal
fn within_ulp(x: &goebel::real::HighPrecReal, expected: &str) -> bool {
    let places = expected.split('.').nth(1).map_or(0, |f| f.len()) as u32;
    let (int, frac) = expected.split_once('.').unwrap();
    let scale = BigInt::from(10u32).pow(places);
    let want = ExactRational::new(format!("{int}{frac}").parse::<BigInt>().unwrap(), scale.clone());
    let ulp = ExactRational::new(BigInt::one(), scale);
    (x.lower() - &want).abs() <= ulp && (x.upper() - &want).abs() <= ulp
}

// 6. constants, each certified by two runs at different guard precisions
fn constants() -> Outcome {
    let s = somos_constant(2, 10);
    let c = goebel_constant(gp(2, 2), 22);
    match (s, c) {
        (Ok(s), Ok(c)) => {
            let ok = within_ulp(&s, "1.6616879496") && within_ulp(&c, "1.0478314475764112295599");
            outcome(ok, format!("sigma_2 = {s}, C_(2,2) = {c}, both self-consistent"))
        }
        (s, c) => outcome(false, format!("somos: {:?}, constant: {:?}", s.err(), c.err())),
    }
}

// 7. scaled residuals
fn convergence() -> Outcome {
    let params = gp(2, 2);
    let window: Vec<u64> = (14..=22).collect();
    let rho5 = convergence_report(params, &window, 5).unwrap();
    let mags: Vec<f64> = rho5.rows.iter().map(|r| r.value.to_f64().abs()).collect();
    let finite = mags.iter().all(|m| m.is_finite());
    let head = mags[..4].iter().cloned().fold(0.0, f64::max);
    let tail = mags[mags.len() - 4..].iter().cloned().fold(0.0, f64::max);
    let trend = finite && tail <= 2.0 * head;

    let far = [30u64, 40, 60, 80, 100];
    let n_top = *far.last().unwrap();
    let mut rel = Vec::new();
    for r in 0..=3u32 {
        let rep = convergence_report(params, &far, r).unwrap();
        let got = rep.rows.last().unwrap().value.to_f64();
        let want = asym_coeff(2, r + 1).unwrap().to_f64().unwrap();
        rel.push(((got - want) / want).abs());
    }
    let close = rel.iter().all(|&e| e < 0.10);
    let rels: Vec<String> = rel.iter().map(|e| format!("{:.1}%", 100.0 * e)).collect();
    outcome(
        trend && close,
        format!(
            "|rho_5| max {head:.1} on n = 14..17, {tail:.1} on n = 19..22; rho_0..3 at n = {n_top} off a_(2,1..4) by {}",
            rels.join(", ")
        ),
    )
}

// 8. the stated epsilon bound, compared in log space against the certified
// upper end of epsilon
fn epsilon_bound() -> Outcome {
    let mut fails = Vec::new();
    let mut checked = 0;
    let mut worst = String::new();
    for (k, l) in [(2u32, 2u32), (3, 2), (2, 3)] {
        for n in 5..=12u64 {
            let params = gp(k, l);
            let e = epsilon(params, n, 12).unwrap();
            let row = epsilon_bound_check(params, n, 12).unwrap();
            let ln_bound = (2.0 * n as f64).ln() - f64::from(k).powi(n as i32 - 1);
            checked += 1;
            let positive = e.certainly_gt(&ExactRational::zero());
            if !(positive && row.ln_epsilon_upper < ln_bound) {
                if fails.is_empty() {
                    worst = format!(
                        "first failure ({k},{l}) n={n}: ln eps <= {:.2} vs ln bound {:.2}",
                        row.ln_epsilon_upper, ln_bound
                    );
                }
                fails.push((k, l, n));
            }
        }
    }
    outcome(
        fails.is_empty(),
        format!("{} of {checked} cases violate the bound; {worst}", fails.len()),
    )
}

// 9. residue sets
fn dichotomy() -> Outcome {
    let grid = verify_random_theorem(10, 10, 50, 3).unwrap();
    let a = residue_set(gp(4, 4), 13, 2).unwrap();
    let want: Vec<BigUint> = [130u32, 143, 65, 52, 156, 13, 117, 104, 26, 39, 78]
        .iter()
        .map(|&x| x.into())
        .collect();
    let ex_a = a.index_set == (2..=12).collect::<Vec<_>>() && a.residues == want && a.verdict == Verdict::AllDistinct;
    let b = residue_set(gp(3, 2), 13, 2).unwrap();
    let ex_b = b.index_set == (4..=12).collect::<Vec<_>>()
        && b.residue_set() == vec![BigUint::zero()]
        && b.verdict == Verdict::SingletonZero;
    outcome(
        grid.dichotomy.passed && ex_a && ex_b,
        format!(
            "{} tuples, {} violations; (4,4,13,2) matches: {ex_a}; (3,2,13,2) singleton: {ex_b}",
            grid.dichotomy.checked,
            grid.dichotomy.counterexamples.len()
        ),
    )
}

// 10. C(n) strictly decreasing and above 1, using the certified intervals
fn monotonicity() -> Outcome {
    let ns: Vec<u64> = (1..=15).collect();
    let one = ExactRational::one();
    let mut bad = Vec::new();
    for (k, l) in [(2u32, 2u32), (3, 2), (2, 3)] {
        let rows = c_of_n_series(gp(k, l), &ns, 30).unwrap();
        for w in rows.windows(2) {
            if !(w[1].value.upper() < w[0].value.lower()) {
                bad.push(format!("({k},{l}) n={}", w[1].n));
            }
        }
        for r in &rows {
            if !r.value.certainly_gt(&one) {
                bad.push(format!("({k},{l}) n={} not > 1", r.n));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("45 values, {} violations {}", bad.len(), bad.join(" ")),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "N table reproduction", table1),
        (2, "N_(2,2) = 43 by both methods", anchor),
        (3, "N = 7 reduction and classification", main_theorem),
        (4, "p-adic engine oracle equivalence", oracle_equivalence),
        (5, "expansion coefficients", coefficients),
        (6, "constants to the stated digits", constants),
        (7, "scaled residual convergence", convergence),
        (8, "epsilon bound 2n/exp(k^(n-1)) for n = 5..12", epsilon_bound),
        (9, "residue set dichotomy", dichotomy),
        (10, "C(n) decreasing and above 1", monotonicity),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = 0;
    for (id, name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|a| a == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let known = UNATTAINABLE.iter().find(|(i, _)| *i == id);
        println!(
            "{} [{id}] {name}: {} ({:.1?})",
            if res.pass { "PASS" } else { "FAIL" },
            res.detail,
            start.elapsed()
        );
        if !res.pass {
            match known {
                Some((_, why)) => println!("     expected: {why}"),
                None => unexpected += 1,
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed unexpectedly");
        std::process::exit(1);
    }
}
