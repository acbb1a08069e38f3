//! Self-check suites shared by the acceptance tests and the command line.
//!
//! Every suite runs independently for each level `N` in `1..=n_max` and
//! reports the first mismatch it finds per case. Results are merged in level
//! order, so the report does not depend on the number of worker threads.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{
    divisor_classes, divisors, exact_divisors, fmt_rat, gamma0_index, gcd, int, modulo, rat,
    Rational,
};
use crate::borcherds::{
    borcherds_product, verify_basis_identities, verify_eta_identity, EtaIdentityReport,
};
use crate::divisors::{
    combine_eta_divisors, cusp_classes, cusp_space_dimension, eta_divisor, eta_order, fricke_image,
    heegner_degrees, matching_matrix, solve_cusp_matching, CuspDivisor,
};
use crate::fracq::substitute_power;
use crate::heckeops::{hecke_tp, level_u, level_v, xi_tp, xi_u, xi_v};
use crate::vvforms::{
    apply_aut, basis_m_half, formal_xi, random_supported, theta_series, Rep, VVExpansion, Weight,
    XiImage,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Eta,
    Basis,
    USubstitution,
    Commutation,
    Xi,
    ThetaHecke,
    Matching,
    Degree,
    Heegner,
    Fricke,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Eta,
        Suite::Basis,
        Suite::USubstitution,
        Suite::Commutation,
        Suite::Xi,
        Suite::ThetaHecke,
        Suite::Matching,
        Suite::Degree,
        Suite::Heegner,
        Suite::Fricke,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eta => "eta",
            Suite::Basis => "basis",
            Suite::USubstitution => "u-substitution",
            Suite::Commutation => "commutation",
            Suite::Xi => "xi",
            Suite::ThetaHecke => "theta-hecke",
            Suite::Matching => "matching",
            Suite::Degree => "degree",
            Suite::Heegner => "heegner",
            Suite::Fricke => "fricke",
        }
    }

    /// Level range, precision and samples per level used when nothing else
    /// is requested.
    pub fn default_params(self) -> Params {
        let (n_max, prec) = match self {
            Suite::Eta | Suite::Basis => (50, 200),
            Suite::USubstitution => (30, 200),
            Suite::Commutation | Suite::Xi => (20, 100),
            Suite::ThetaHecke => (1, 200),
            Suite::Matching => (200, 0),
            Suite::Degree | Suite::Fricke => (100, 0),
            Suite::Heegner => (20, 200),
        };
        Params {
            n_max,
            prec,
            seed: 0,
            samples: 50,
            jobs: None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub n_max: i64,
    /// Number of coefficients for product suites, truncation of random
    /// inputs for operator suites, and `|n|` bound for Heegner degrees.
    pub prec: i64,
    pub seed: u64,
    /// Random inputs per level.
    pub samples: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    #[serde(rename = "N")]
    pub level: i64,
    pub case: String,
    pub slot: String,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} {} at {}: expected {}, got {}",
            self.level, self.case, self.slot, self.expected, self.got
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub n_max: i64,
    pub prec: i64,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<Failure>,
}

impl Tally {
    fn check(
        &mut self,
        level: i64,
        case: impl FnOnce() -> String,
        witness: Option<(String, String, String)>,
    ) {
        self.cases += 1;
        if let Some((slot, expected, got)) = witness {
            self.failures.push(Failure {
                level,
                case: case(),
                slot,
                expected,
                got,
            });
        }
    }

    fn eq(
        &mut self,
        level: i64,
        case: impl FnOnce() -> String,
        slot: &str,
        expected: &Rational,
        got: &Rational,
    ) {
        let w = (expected != got).then(|| (slot.to_string(), fmt_rat(expected), fmt_rat(got)));
        self.check(level, case, w);
    }

    fn expansions(
        &mut self,
        level: i64,
        case: impl FnOnce() -> String,
        a: &VVExpansion,
        b: &VVExpansion,
    ) {
        let w = match a.first_mismatch(b) {
            Ok(None) => None,
            Ok(Some(m)) => Some((
                format!("{:?}({}, {})", m.part, m.n, m.gamma).to_lowercase(),
                fmt_rat(&m.left),
                fmt_rat(&m.right),
            )),
            Err(e) => Some(("shape".into(), shape(a), format!("{} ({e})", shape(b)))),
        };
        self.check(level, case, w);
    }

    fn xi_images(&mut self, level: i64, case: impl FnOnce() -> String, a: &XiImage, b: &XiImage) {
        let w = match a.first_mismatch(b) {
            Ok(None) => None,
            Ok(Some(m)) => Some((
                format!("r({}, {})", -m.n, m.gamma),
                fmt_rat(&m.left),
                fmt_rat(&m.right),
            )),
            Err(e) => Some(("shape".into(), String::new(), e.to_string())),
        };
        self.check(level, case, w);
    }

    fn eta(&mut self, r: &EtaIdentityReport, case: impl FnOnce() -> String) {
        let w = r
            .witness
            .as_ref()
            .map(|(e, x, y)| (format!("q^{}", fmt_rat(e)), fmt_rat(x), fmt_rat(y)));
        self.check(r.level, case, w);
    }
}

fn shape(f: &VVExpansion) -> String {
    format!(
        "N={} k={} {} trunc={}",
        f.level(),
        f.weight(),
        f.rep().name(),
        f.trunc()
    )
}

/// Runs `suite` for every level in `1..=params.n_max`.
pub fn run(suite: Suite, params: &Params) -> Result<SuiteReport> {
    if params.n_max < 1 {
        return Err(Error::InvalidLevel(params.n_max));
    }
    if params.prec < 0 {
        return Err(Error::NotPositive("prec"));
    }
    let levels: Vec<i64> = match suite {
        Suite::ThetaHecke => vec![1],
        _ => (1..=params.n_max).collect(),
    };
    let work = || {
        levels
            .par_iter()
            .map(|&n| run_level(suite, n, params))
            .collect::<Result<Vec<Tally>>>()
    };
    let tallies = match params.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Parse(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let mut report = SuiteReport {
        suite: suite.name().to_string(),
        n_max: params.n_max,
        prec: params.prec,
        cases: 0,
        failures: Vec::new(),
    };
    for t in tallies {
        report.cases += t.cases;
        report.failures.extend(t.failures);
    }
    Ok(report)
}

fn run_level(suite: Suite, n: i64, p: &Params) -> Result<Tally> {
    let mut t = Tally::default();
    match suite {
        Suite::Eta => eta_suite(&mut t, n, p)?,
        Suite::Basis => basis_suite(&mut t, n, p)?,
        Suite::USubstitution => u_substitution_suite(&mut t, n, p)?,
        Suite::Commutation => commutation_suite(&mut t, n, p)?,
        Suite::Xi => xi_suite(&mut t, n, p)?,
        Suite::ThetaHecke => theta_hecke_suite(&mut t, p)?,
        Suite::Matching => matching_suite(&mut t, n, p)?,
        Suite::Degree => degree_suite(&mut t, n)?,
        Suite::Heegner => heegner_suite(&mut t, n, p)?,
        Suite::Fricke => fricke_suite(&mut t, n)?,
    }
    Ok(t)
}

fn eta_suite(t: &mut Tally, n: i64, p: &Params) -> Result<()> {
    for c in exact_divisors(n) {
        let r = verify_eta_identity(n, c, p.prec)?;
        t.eta(&r, || {
            format!("Psi(theta^sigma_{c}) = eta({c}z) eta({}z)", n / c)
        });
    }
    Ok(())
}

fn basis_suite(t: &mut Tally, n: i64, p: &Params) -> Result<()> {
    for r in verify_basis_identities(n, p.prec)? {
        t.eta(&r, || {
            format!("Psi(b_{}) = eta({}z) eta({}z)", r.c, r.c, n / r.c)
        });
    }
    Ok(())
}

fn seeded_rng(p: &Params, n: i64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(p.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

fn u_substitution_suite(t: &mut Tally, n: i64, p: &Params) -> Result<()> {
    let prec = p.prec.max(1);
    let basis = basis_m_half(n, prec * prec)?;
    let mut rng = seeded_rng(p, n, 0x55);
    let mut inputs: Vec<(String, VVExpansion, Rational)> = basis
        .iter()
        .map(|b| (format!("b_{}", b.d), b.form.clone(), rat(b.d + n / b.d, 24)))
        .collect();
    // one random rational combination of the basis
    let mut combo = VVExpansion::zero(n, Weight::HALF, Rep::Rho, prec * prec);
    let mut weyl = Rational::zero();
    let mut label = Vec::new();
    for b in &basis {
        let x = rat(rng.random_range(-4..=4), rng.random_range(1..=3));
        combo = combo.add(&b.form.scale(&x))?;
        weyl += &x * rat(b.d + n / b.d, 24);
        label.push(format!("{}*b_{}", fmt_rat(&x), b.d));
    }
    inputs.push((label.join("+"), combo, weyl));

    for (name, f, weyl) in &inputs {
        let psi = borcherds_product(f, weyl, prec)?;
        for d in 1..=5 {
            let lhs = borcherds_product(&level_u(f, d)?, &(weyl * int(d)), prec)?;
            let rhs = substitute_power(&psi.expansion, d);
            let w = lhs
                .expansion
                .first_mismatch(&rhs)
                .map(|(e, x, y)| (format!("q^{}", fmt_rat(&e)), fmt_rat(&y), fmt_rat(&x)));
            t.check(n, || format!("Psi({name}|U_{d}) = Psi({name})(q^{d})"), w);
            t.eq(
                n,
                || format!("weight Psi({name}|U_{d})"),
                "weight",
                &psi.weight,
                &lhs.weight,
            );
        }
    }
    Ok(())
}

/// Weights and representations cycled through by the random operator suites.
const SHAPES: [(i64, Rep); 4] = [
    (1, Rep::Rho),
    (1, Rep::Dual),
    (3, Rep::Rho),
    (-1, Rep::Dual),
];

const SMALL_PRIMES: [i64; 3] = [3, 5, 7];

fn commutation_suite(t: &mut Tally, n: i64, p: &Params) -> Result<()> {
    for s in 0..p.samples {
        let (w2, rep) = SHAPES[s % SHAPES.len()];
        let seed = p.seed.wrapping_add(1000 * n as u64 + s as u64);
        let f = random_supported(n, Weight::from_twice(w2)?, rep, seed, p.prec)?;
        let case =
            |what: String| move || format!("{what} on seed {seed} (2k={w2}, {})", rep.name());
        for d in 1..=7 {
            for l in 1..=7 {
                let a = level_v(&level_u(&f, d)?, l)?;
                let b = level_u(&level_v(&f, l)?, d)?;
                t.expansions(n, case(format!("U_{d} V_{l} = V_{l} U_{d}")), &a, &b);
            }
        }
        for q in SMALL_PRIMES.into_iter().filter(|q| gcd(*q, 2 * n) == 1) {
            for d in (1..=7).filter(|d| gcd(q, *d) == 1) {
                let a = hecke_tp(&level_u(&f, d)?, q)?;
                let b = level_u(&hecke_tp(&f, q)?, d)?;
                t.expansions(n, case(format!("U_{d} T_{q} = T_{q} U_{d}")), &a, &b);
            }
            for l in (1..=7).filter(|l| gcd(q, *l) == 1) {
                let a = hecke_tp(&level_v(&f, l)?, q)?;
                let b = level_v(&hecke_tp(&f, q)?, l)?;
                t.expansions(n, case(format!("V_{l} T_{q} = T_{q} V_{l}")), &a, &b);
            }
        }
    }
    Ok(())
}

fn xi_suite(t: &mut Tally, n: i64, p: &Params) -> Result<()> {
    for s in 0..p.samples {
        let seed = p.seed.wrapping_add(1000 * n as u64 + s as u64);
        let f = random_supported(n, Weight::HALF, Rep::Rho, seed, p.prec)?;
        let xf = formal_xi(&f);
        let case = |what: String| move || format!("{what} on seed {seed}");
        for q in SMALL_PRIMES.into_iter().filter(|q| gcd(*q, 2 * n) == 1) {
            let lhs = formal_xi(&hecke_tp(&f, q)?);
            // n^{2k-2} with k = 1/2
            let rhs = xi_tp(&xf, q)?.scale(&rat(1, q));
            t.xi_images(
                n,
                case(format!("xi(f|T_{q}) = {q}^-1 xi(f)|T_{q}")),
                &lhs,
                &rhs,
            );
        }
        for d in 1..=7 {
            let lhs = formal_xi(&level_u(&f, d)?);
            let rhs = xi_u(&xf, d)?;
            t.xi_images(n, case(format!("xi(f|U_{d}) = xi(f)|U_{d}")), &lhs, &rhs);
        }
        for l in 1..=7 {
            let lhs = formal_xi(&level_v(&f, l)?);
            let rhs = xi_v(&xf, l)?;
            t.xi_images(n, case(format!("xi(f|V_{l}) = xi(f)|V_{l}")), &lhs, &rhs);
        }
        for c in exact_divisors(n) {
            let lhs = formal_xi(&apply_aut(&f, c)?);
            let rhs = xf.apply_aut(c)?;
            t.xi_images(
                n,
                case(format!("xi(f^sigma_{c}) = xi(f)^sigma_{c}")),
                &lhs,
                &rhs,
            );
        }
    }
    Ok(())
}

/// `#{r in Z : r^2 = n, r = gamma mod 2}`.
fn lattice_count(n: i64, gamma: i64) -> i64 {
    if n < 0 {
        return 0;
    }
    let r = crate::arith::isqrt(n);
    if r * r != n || modulo(r - gamma, 2) != 0 {
        return 0;
    }
    if r == 0 {
        1
    } else {
        2
    }
}

fn theta_hecke_suite(t: &mut Tally, p: &Params) -> Result<()> {
    for q in [3, 5, 7, 11, 13] {
        let theta = theta_series(1, p.prec * q * q)?;
        let image = hecke_tp(&theta, q)?;
        let eigen = int(1) + rat(1, q);
        let expected = theta_series(1, p.prec)?.scale(&eigen);
        t.expansions(
            1,
            || format!("theta|T_{q} = (1+1/{q}) theta"),
            &expected,
            &image,
        );
        t.check(
            1,
            || format!("theta|T_{q} known through {}", p.prec),
            (image.trunc() < p.prec).then(|| {
                (
                    "trunc".into(),
                    p.prec.to_string(),
                    image.trunc().to_string(),
                )
            }),
        );
        for m in 0..=p.prec {
            for g in 0..2 {
                let count = &eigen * int(lattice_count(m, g));
                t.eq(
                    1,
                    || format!("theta|T_{q} against lattice-point count"),
                    &format!("holo({m}, {g})"),
                    &count,
                    &image.holo(m, g),
                );
            }
        }
    }
    Ok(())
}

fn matching_suite(t: &mut Tally, n: i64, p: &Params) -> Result<()> {
    let classes = divisor_classes(n);
    let m = matching_matrix(n)?;
    let dim = cusp_space_dimension(n)?;
    let square = m.len() as i64 == dim && m.iter().all(|row| row.len() as i64 == dim);
    t.check(
        n,
        || "matching matrix is square of the expected size".into(),
        (!square).then(|| {
            (
                "shape".into(),
                format!("{dim}x{dim}"),
                format!("{}x{}", m.len(), m.first().map_or(0, Vec::len)),
            )
        }),
    );
    // coefficients -> divisor -> coefficients, on unit vectors
    for &d in &classes {
        let target = eta_divisor(n, d)?;
        match solve_cusp_matching(n, &target) {
            Ok(x) => {
                for (e, v) in &x {
                    let want = int(i64::from(*e == d));
                    t.eq(
                        n,
                        || format!("solve(div eta({d}z)eta({}z))", n / d),
                        &format!("x_{e}"),
                        &want,
                        v,
                    );
                }
            }
            Err(e) => t.check(
                n,
                || format!("solve(div eta({d}z)eta({}z))", n / d),
                Some(("solve".into(), "solution".into(), e.to_string())),
            ),
        }
    }
    // divisor -> coefficients -> divisor, on a random Fricke-invariant divisor
    let mut rng = seeded_rng(p, n, 0x3a7);
    let orders: Vec<(i64, Rational)> = classes
        .iter()
        .flat_map(|&c| {
            let v = rat(rng.random_range(-9..=9), rng.random_range(1..=5));
            [(c, v.clone()), (n / c, v)]
        })
        .collect::<std::collections::BTreeMap<_, _>>()
        .into_iter()
        .collect();
    let target = CuspDivisor::new(n, orders)?;
    let case = || "divisor -> coefficients -> divisor".to_string();
    match solve_cusp_matching(n, &target).and_then(|x| combine_eta_divisors(n, &x)) {
        Ok(back) => {
            let w = divisors(n).into_iter().find_map(|c| {
                let (a, b) = (target.ord(c), back.ord(c));
                (a != b).then(|| (format!("ord_{c}"), fmt_rat(&a), fmt_rat(&b)))
            });
            t.check(n, case, w);
        }
        Err(e) => t.check(
            n,
            case,
            Some(("solve".into(), "solution".into(), e.to_string())),
        ),
    }
    Ok(())
}

fn degree_suite(t: &mut Tally, n: i64) -> Result<()> {
    let target = rat(gamma0_index(n), 12);
    let classes = cusp_classes(n)?;
    for d in divisors(n) {
        let mut total = Rational::zero();
        for c in &classes {
            total += eta_order(n, d, c.c)? * int(c.orbit_size);
        }
        t.eq(
            n,
            || format!("degree of div eta({d}z)eta({}z)", n / d),
            "sum_c",
            &target,
            &total,
        );
    }
    let bound = 4 * n + 4;
    for b in basis_m_half(n, bound)? {
        let weyl = crate::borcherds::weyl_vector(&b.form)?;
        let order = eta_order(n, b.d, n)?;
        t.eq(
            n,
            || {
                format!(
                    "ord_infinity eta({}z)eta({}z) = Weyl vector of b_{}",
                    b.d,
                    n / b.d,
                    b.d
                )
            },
            "infinity",
            &weyl,
            &order,
        );
    }
    let theta = theta_series(n, bound)?;
    for c in exact_divisors(n) {
        let weyl = crate::borcherds::weyl_vector(&apply_aut(&theta, c)?)?;
        let order = eta_order(n, c, n)?;
        t.eq(
            n,
            || {
                format!(
                    "ord_infinity eta({c}z)eta({}z) = Weyl vector of theta^sigma_{c}",
                    n / c
                )
            },
            "infinity",
            &weyl,
            &order,
        );
    }
    Ok(())
}

/// Degrees at level 1 are Hurwitz class numbers.
const HURWITZ: [(i64, i64, i64); 6] = [
    (3, 1, 3),
    (4, 1, 2),
    (7, 1, 1),
    (8, 1, 1),
    (11, 1, 1),
    (12, 4, 3),
];

fn heegner_suite(t: &mut Tally, n: i64, p: &Params) -> Result<()> {
    if n == 1 {
        for (disc, num, den) in HURWITZ {
            let got = heegner_degrees(1, -disc)?
                .values()
                .fold(Rational::zero(), |a, b| a + b);
            t.eq(
                1,
                || format!("deg Z(-{disc}) = H({disc})"),
                "degree",
                &rat(num, den),
                &got,
            );
        }
    }
    for m in 1..=p.prec {
        let degs = heegner_degrees(n, -m)?;
        let hurwitz = heegner_degrees(1, -m)?
            .values()
            .fold(Rational::zero(), |a, b| a + b);
        for (g, deg) in &degs {
            let w = (modulo(-m - g * g, 4 * n) != 0).then(|| {
                (
                    "congruence".into(),
                    "n = gamma^2 mod 4N".into(),
                    format!("gamma={g}"),
                )
            });
            t.check(n, || format!("Z({}, {g}) index", -m), w);
            let partner = degs
                .get(&modulo(-g, 2 * n))
                .cloned()
                .unwrap_or_else(Rational::zero);
            t.eq(
                n,
                || format!("deg Z({}, {g}) = deg Z({}, {})", -m, -m, modulo(-g, 2 * n)),
                "degree",
                deg,
                &partner,
            );
        }
        if gcd(m, n) == 1 {
            let roots = (0..2 * n)
                .filter(|g| modulo(-m - g * g, 4 * n) == 0)
                .count() as i64;
            let total = degs.values().fold(Rational::zero(), |a, b| a + b);
            t.eq(
                n,
                || format!("sum_gamma deg Z({}, gamma) = H({m}) * #roots", -m),
                "degree",
                &(&hurwitz * int(roots)),
                &total,
            );
        }
    }
    Ok(())
}

fn fricke_suite(t: &mut Tally, n: i64) -> Result<()> {
    for d in divisors(n) {
        let e = eta_divisor(n, d)?;
        let w = fricke_image(&e);
        let witness = divisors(n).into_iter().find_map(|c| {
            let (a, b) = (e.ord(c), w.ord(c));
            (a != b).then(|| (format!("ord_{c}"), fmt_rat(&a), fmt_rat(&b)))
        });
        t.check(n, || format!("W_N div eta({d}z)eta({}z)", n / d), witness);
    }
    Ok(())
}
