//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use weilforms::arith::{divisor_classes, exact_divisors, int, rat, Rational};
use weilforms::borcherds::eta_product;
use weilforms::divisors::heegner_degrees;
use weilforms::verify::{run, Params, Suite, SuiteReport};

struct Outcome {
    ok: bool,
    detail: String,
}

fn from_report(r: SuiteReport) -> Outcome {
    match r.failures.first() {
        None => Outcome {
            ok: true,
            detail: format!("{} cases", r.cases),
        },
        Some(f) => Outcome {
            ok: false,
            detail: format!(
                "{} of {} cases failed; first: {f}",
                r.failures.len(),
                r.cases
            ),
        },
    }
}

fn suite(s: Suite, n_max: i64, prec: i64, samples: usize) -> Outcome {
    let p = Params {
        n_max,
        prec,
        seed: 2024,
        samples,
        jobs: None,
    };
    match run(s, &p) {
        Ok(r) => from_report(r),
        Err(e) => Outcome {
            ok: false,
            detail: format!("error: {e}"),
        },
    }
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    Outcome {
        ok: a.ok && b.ok,
        detail: format!("{}; {}", a.detail, b.detail),
    }
}

/// `prod_{m >= 1} (1 - q^{dm})` as an integer vector of length `len`.
fn naive_eta_body(d: usize, len: usize) -> Vec<i128> {
    let mut v = vec![0i128; len];
    v[0] = 1;
    let mut step = d;
    while step < len {
        for i in (step..len).rev() {
            v[i] -= v[i - step];
        }
        step += d;
    }
    v
}

/// Eta side of criterion 1 recomputed by direct multiplication of the
/// infinite products, compared with the library's eta products.
fn eta_side_oracle(n_max: i64, prec: i64) -> Outcome {
    let len = prec as usize;
    let mut cases = 0;
    for n in 1..=n_max {
        for c in exact_divisors(n) {
            cases += 1;
            let a = naive_eta_body(c as usize, len);
            let b = naive_eta_body((n / c) as usize, len);
            let lib = eta_product(n, c, prec).expect("valid divisor");
            let lead = rat(c + n / c, 24);
            for k in 0..len {
                let want: i128 = (0..=k).map(|i| a[i] * b[k - i]).sum();
                let got = lib.coeff(&(&lead + int(k as i64)));
                if got != BigRational::from_integer(want.into()) {
                    return Outcome {
                        ok: false,
                        detail: format!(
                            "eta side N={n} c={c} q^(lead+{k}): expected {want}, got {got}"
                        ),
                    };
                }
            }
        }
    }
    Outcome {
        ok: true,
        detail: format!("{cases} eta sides match direct products"),
    }
}

/// Gauss reduction of a positive definite form.
fn reduce(mut f: (i64, i64, i64)) -> (i64, i64, i64) {
    loop {
        let (a, b, c) = f;
        if b > a || b <= -a {
            // translate b into (-a, a]
            let t = (a - b).div_euclid(2 * a);
            let nb = b + 2 * a * t;
            f = (a, nb, a * t * t + b * t + c);
        } else if a > c {
            f = (c, -b, a);
        } else if a == c && b < 0 {
            f = (a, -b, c);
        } else {
            return f;
        }
    }
}

/// Automorphisms of a form among SL_2 matrices with small entries, modulo -1.
fn projective_automorphisms(f: (i64, i64, i64)) -> i64 {
    let (a, b, c) = f;
    let mut count = 0;
    for p in -3..=3i64 {
        for q in -3..=3i64 {
            for r in -3..=3i64 {
                for s in -3..=3i64 {
                    if p * s - q * r != 1 {
                        continue;
                    }
                    let na = a * p * p + b * p * r + c * r * r;
                    let nb = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
                    let nc = a * q * q + b * q * s + c * s * s;
                    if (na, nb, nc) == f {
                        count += 1;
                    }
                }
            }
        }
    }
    count / 2
}

/// Hurwitz class number by enumerating forms in a box and reducing them.
fn hurwitz_bruteforce(disc: i64) -> Rational {
    let mut classes = BTreeMap::new();
    for a in 1..=disc {
        for b in -2 * disc..=2 * disc {
            let num = b * b + disc;
            if num % (4 * a) == 0 {
                let f = reduce((a, b, num / (4 * a)));
                classes
                    .entry(f)
                    .or_insert_with(|| projective_automorphisms(f));
            }
        }
    }
    classes
        .values()
        .fold(Rational::zero(), |acc, w| acc + rat(1, *w))
}

fn hurwitz_anchor() -> Outcome {
    let table = [
        (3, rat(1, 3)),
        (4, rat(1, 2)),
        (7, int(1)),
        (8, int(1)),
        (11, int(1)),
        (12, rat(4, 3)),
    ];
    for (d, expected) in table {
        let brute = hurwitz_bruteforce(d);
        let lib: Rational = heegner_degrees(1, -d)
            .expect("negative discriminant")
            .values()
            .fold(Rational::zero(), |a, b| a + b);
        if brute != expected || lib != expected {
            return Outcome {
                ok: false,
                detail: format!("H({d}): table {expected}, brute force {brute}, library {lib}"),
            };
        }
    }
    for d in 3..=200 {
        let brute = hurwitz_bruteforce(d);
        let lib: Rational = heegner_degrees(1, -d)
            .expect("negative discriminant")
            .values()
            .fold(Rational::zero(), |a, b| a + b);
        if brute != lib {
            return Outcome {
                ok: false,
                detail: format!("H({d}): brute force {brute}, library {lib}"),
            };
        }
    }
    Outcome {
        ok: true,
        detail: "H(D) matches brute-force reduction for D <= 200".into(),
    }
}

fn dimension_sizes(n_max: i64) -> Outcome {
    for n in 1..=n_max {
        let sigma0 = (1..=n).filter(|d| n % d == 0).count() as i64;
        let square = (1..=n).any(|r| r * r == n) as i64;
        let formula = (sigma0 + square) / 2;
        if divisor_classes(n).len() as i64 != formula {
            return Outcome {
                ok: false,
                detail: format!(
                    "N={n}: formula {formula}, classes {}",
                    divisor_classes(n).len()
                ),
            };
        }
    }
    Outcome {
        ok: true,
        detail: "class counts match the dimension formula".into(),
    }
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            "1 eta-product identity, N <= 50, c || N, 200 coefficients",
            Box::new(|| both(suite(Suite::Eta, 50, 200, 1), eta_side_oracle(50, 200))),
        ),
        (
            "2 basis corollary, N <= 50, 200 coefficients",
            Box::new(|| suite(Suite::Basis, 50, 200, 1)),
        ),
        (
            "3 U_d substitution, N <= 30, d <= 5, 200 coefficients",
            Box::new(|| suite(Suite::USubstitution, 30, 200, 1)),
        ),
        (
            "4 operator commutations, N <= 20, 50 seeds",
            Box::new(|| suite(Suite::Commutation, 20, 100, 50)),
        ),
        (
            "5 xi commutation suite, k = 1/2, N <= 20",
            Box::new(|| suite(Suite::Xi, 20, 100, 50)),
        ),
        (
            "6 theta|T_p = (1 + 1/p) theta, p <= 13, index 200",
            Box::new(|| suite(Suite::ThetaHecke, 1, 200, 1)),
        ),
        (
            "7 cusp-space dimension and solver, N <= 200",
            Box::new(|| both(suite(Suite::Matching, 200, 0, 1), dimension_sizes(200))),
        ),
        (
            "8 degree law and infinity order = Weyl vector, N <= 100",
            Box::new(|| suite(Suite::Degree, 100, 0, 1)),
        ),
        (
            "9 Heegner degrees: Hurwitz anchor, symmetry N <= 20, |n| <= 200",
            Box::new(|| both(hurwitz_anchor(), suite(Suite::Heegner, 20, 200, 1))),
        ),
        (
            "10 Fricke invariance of eta divisors, N <= 100",
            Box::new(|| suite(Suite::Fricke, 100, 0, 1)),
        ),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, check) in &criteria {
        let id = name.split(' ').next().unwrap_or_default();
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {status} ({:.1}s) {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
