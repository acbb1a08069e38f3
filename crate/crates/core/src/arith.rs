//! Small integer and rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational coefficient type used throughout the crate.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` for a signed exponent.
pub fn rat_pow(base: i64, exp: i64) -> Rational {
    let b = int(base);
    if exp >= 0 {
        num_traits::pow(b, exp as usize)
    } else {
        num_traits::pow(b, (-exp) as usize).recip()
    }
}

/// Floor of a rational as an `i64`.
pub fn floor_i64(x: &Rational) -> i64 {
    i64::try_from(x.floor().to_integer()).expect("rational out of i64 range")
}

/// Ceiling of a rational as an `i64`.
pub fn ceil_i64(x: &Rational) -> i64 {
    i64::try_from(x.ceil().to_integer()).expect("rational out of i64 range")
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Non-negative residue of `a` modulo `m > 0`.
pub fn modulo(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: i64) -> Vec<i64> {
    assert!(n >= 1, "divisors: n must be positive, got {n}");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Divisors `c` of `n` with `gcd(c, n/c) = 1`.
pub fn exact_divisors(n: i64) -> Vec<i64> {
    divisors(n)
        .into_iter()
        .filter(|&c| gcd(c, n / c) == 1)
        .collect()
}

/// Representatives of the positive divisors of `n` modulo `d ~ n/d`,
/// chosen with `d^2 <= n`, ascending.
pub fn divisor_classes(n: i64) -> Vec<i64> {
    divisors(n).into_iter().filter(|&d| d * d <= n).collect()
}

pub fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n);
    r * r == n
}

pub fn isqrt(n: i64) -> i64 {
    assert!(n >= 0);
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: i64) -> i64 {
    prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

/// Index of Gamma_0(N) in SL_2(Z): `N * prod_{p | N} (1 + 1/p)`.
pub fn gamma0_index(n: i64) -> i64 {
    prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p + 1))
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (g, x, _) = ext_gcd(modulo(a, m), m);
    (g == 1).then(|| modulo(x, m))
}

/// Chinese remaindering for possibly non-coprime moduli. Returns the
/// solution modulo `lcm(m1, m2)` or `None` when the congruences clash.
pub fn crt(r1: i64, m1: i64, r2: i64, m2: i64) -> Option<(i64, i64)> {
    let (g, p, _) = ext_gcd(m1, m2);
    if (r2 - r1) % g != 0 {
        return None;
    }
    let l = m1 / g * m2;
    let step = m2 / g;
    let k = modulo(((r2 - r1) / g) % step * modulo(p, step), step);
    Some((modulo(r1 + m1 * k, l), l))
}

/// Kronecker symbol `(a / p)` for an odd prime `p` (the Legendre symbol).
pub fn kronecker_odd_prime(a: i64, p: i64) -> i64 {
    debug_assert!(p > 2 && is_prime(p));
    let a = modulo(a, p);
    if a == 0 {
        return 0;
    }
    // Euler's criterion.
    let (mut base, mut e, mut acc) = (a, (p - 1) / 2, 1i64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Renders a rational as `"a/b"`, or `"a"` when integral.
pub fn fmt_rat(x: &Rational) -> String {
    x.to_string()
}

pub fn parse_rat(s: &str) -> Result<Rational, crate::Error> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| crate::Error::Parse(format!("not a rational number: {s:?}")))
}

/// Solves `A x = b` exactly for an `m x n` system with `m >= n`.
///
/// Returns `Singular` if the columns are dependent and `Inconsistent` if a
/// solution does not exist.
pub fn solve_linear(
    matrix: &[Vec<Rational>],
    rhs: &[Rational],
) -> Result<Vec<Rational>, LinearSolveError> {
    let rows = matrix.len();
    assert_eq!(rows, rhs.len());
    let cols = matrix.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    // full column rank: the pivot of column `col` lands in row `col`
    for col in 0..cols {
        let pivot_row = col;
        let Some(p) = (pivot_row..rows).find(|&r| !aug[r][col].is_zero()) else {
            return Err(LinearSolveError::Singular);
        };
        aug.swap(pivot_row, p);
        let inv = aug[pivot_row][col].recip();
        for v in aug[pivot_row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                let (src, dst) = if r < pivot_row {
                    let (a, b) = aug.split_at_mut(pivot_row);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = aug.split_at_mut(r);
                    (&a[pivot_row], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= &factor * s;
                }
            }
        }
    }
    if aug[cols..].iter().any(|row| !row[cols].is_zero()) {
        return Err(LinearSolveError::Inconsistent);
    }
    Ok(aug[..cols].iter().map(|row| row[cols].clone()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearSolveError {
    Singular,
    Inconsistent,
}

/// Sign helper: `(-1)^e` for an integer exponent.
pub fn minus_one_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}
