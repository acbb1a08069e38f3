//! Sparse truncated power series in `q` with exponents on a lattice `(1/M) Z`.
//!
//! A [`FracSeries`] stores exact rational coefficients for exponents `e/M`
//! strictly below a rational truncation bound `T`; coefficients at or beyond
//! `T` are unknown. Every operation computes the tightest bound it can
//! guarantee and carries it with the result.
//!
//! The representation is canonical: the lattice denominator is reduced as far
//! as the stored exponents allow and zero coefficients are never stored, so
//! structural equality is equality of represented series.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ceil_i64, fmt_rat, int, is_integral, lcm, parse_rat, Rational};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracSeries {
    denom: i64,
    terms: BTreeMap<i64, Rational>,
    trunc: Rational,
}

impl FracSeries {
    /// Builds a series from `(e, coeff)` pairs meaning `coeff * q^(e/denom)`.
    /// Repeated exponents are summed; terms at or past `trunc` are dropped.
    pub fn new<I>(denom: i64, terms: I, trunc: Rational) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        assert!(denom >= 1, "lattice denominator must be positive");
        let mut map: BTreeMap<i64, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        Self::from_map(denom, map, trunc)
    }

    fn from_map(denom: i64, mut terms: BTreeMap<i64, Rational>, trunc: Rational) -> Self {
        let bound = exclusive_bound(&trunc, denom);
        terms.retain(|&e, c| e < bound && !c.is_zero());
        let mut s = FracSeries {
            denom,
            terms,
            trunc,
        };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        let g = self.terms.keys().fold(self.denom, |g, &e| g.gcd(&e));
        if g > 1 {
            self.denom /= g;
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|(e, c)| (e / g, c))
                .collect();
        }
    }

    pub fn zero(trunc: Rational) -> Self {
        FracSeries {
            denom: 1,
            terms: BTreeMap::new(),
            trunc,
        }
    }

    pub fn one(trunc: Rational) -> Self {
        Self::monomial(&Rational::zero(), int(1), trunc)
    }

    /// `coeff * q^exp`, truncated at `trunc`.
    pub fn monomial(exp: &Rational, coeff: Rational, trunc: Rational) -> Self {
        let denom = i64::try_from(exp.denom()).expect("exponent denominator too large");
        let numer = i64::try_from(exp.numer()).expect("exponent numerator too large");
        Self::new(denom, [(numer, coeff)], trunc)
    }

    /// A polynomial in integral powers of `q` with the given coefficients.
    pub fn from_integral<I>(terms: I, trunc: Rational) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        Self::new(1, terms, trunc)
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn trunc(&self) -> &Rational {
        &self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Raw `(e, coeff)` pairs on the canonical lattice `(1/denom) Z`.
    pub fn raw_terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    /// `(exponent, coeff)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, &Rational)> + '_ {
        let m = BigInt::from(self.denom);
        self.terms
            .iter()
            .map(move |(&e, c)| (Rational::new(BigInt::from(e), m.clone()), c))
    }

    /// Coefficient of `q^exp`. Exponents at or past the bound read as zero;
    /// check [`FracSeries::trunc`] first when that matters.
    pub fn coeff(&self, exp: &Rational) -> Rational {
        let scaled = exp * Rational::from_integer(BigInt::from(self.denom));
        if !is_integral(&scaled) {
            return Rational::zero();
        }
        let e = i64::try_from(scaled.to_integer()).expect("exponent out of range");
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Smallest exponent with a non-zero coefficient.
    pub fn valuation(&self) -> Option<Rational> {
        self.terms
            .keys()
            .next()
            .map(|&e| Rational::new(BigInt::from(e), BigInt::from(self.denom)))
    }

    /// Lower bound for the order of the represented series: the valuation,
    /// or the truncation bound when nothing is known to be non-zero.
    pub fn order_bound(&self) -> Rational {
        self.valuation().unwrap_or_else(|| self.trunc.clone())
    }

    pub fn leading(&self) -> Option<(Rational, &Rational)> {
        self.terms().next()
    }

    fn rescaled(&self, denom: i64) -> BTreeMap<i64, Rational> {
        debug_assert_eq!(denom % self.denom, 0);
        let f = denom / self.denom;
        self.terms
            .iter()
            .map(|(&e, c)| (e * f, c.clone()))
            .collect()
    }

    /// Restricts to exponents below `min(trunc, self.trunc)`.
    pub fn truncate(&self, trunc: &Rational) -> Self {
        let t = if trunc < &self.trunc {
            trunc.clone()
        } else {
            self.trunc.clone()
        };
        Self::from_map(self.denom, self.terms.clone(), t)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_map(
            self.denom,
            self.terms.iter().map(|(&e, v)| (e, v * c)).collect(),
            self.trunc.clone(),
        )
    }

    /// Multiplies by `q^exp` exactly; the bound shifts along.
    pub fn shift(&self, exp: &Rational) -> Self {
        let ed = i64::try_from(exp.denom()).expect("exponent denominator too large");
        let l = lcm(self.denom, ed);
        let off = i64::try_from((exp * Rational::from_integer(BigInt::from(l))).to_integer())
            .expect("exponent out of range");
        Self::from_map(
            l,
            self.rescaled(l)
                .into_iter()
                .map(|(e, c)| (e + off, c))
                .collect(),
            &self.trunc + exp,
        )
    }

    /// Compares two series on the range where both are known. Returns the
    /// first exponent at which they differ, with both coefficients.
    pub fn first_mismatch(&self, other: &Self) -> Option<(Rational, Rational, Rational)> {
        let t = if self.trunc < other.trunc {
            &self.trunc
        } else {
            &other.trunc
        };
        let a = self.truncate(t);
        let b = other.truncate(t);
        let l = lcm(a.denom, b.denom);
        let ma = a.rescaled(l);
        let mb = b.rescaled(l);
        let keys: std::collections::BTreeSet<i64> = ma.keys().chain(mb.keys()).copied().collect();
        let zero = Rational::zero();
        keys.into_iter().find_map(|e| {
            let x = ma.get(&e).unwrap_or(&zero);
            let y = mb.get(&e).unwrap_or(&zero);
            (x != y).then(|| {
                (
                    Rational::new(BigInt::from(e), BigInt::from(l)),
                    x.clone(),
                    y.clone(),
                )
            })
        })
    }

    /// True if the series agree on the range where both are known.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    pub fn to_json(&self) -> FracSeriesJson {
        FracSeriesJson {
            denom: self.denom,
            trunc: fmt_rat(&self.trunc),
            terms: self.terms.iter().map(|(&e, c)| (e, fmt_rat(c))).collect(),
        }
    }

    pub fn from_json(j: &FracSeriesJson) -> Result<Self> {
        if j.denom < 1 {
            return Err(crate::Error::NotPositive("denom"));
        }
        let terms = j
            .terms
            .iter()
            .map(|(e, c)| Ok((*e, parse_rat(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(j.denom, terms, parse_rat(&j.trunc)?))
    }
}

/// Wire format: `{"denom": M, "trunc": "p/q", "terms": [[e, "a/b"], ...]}`,
/// terms sorted by exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FracSeriesJson {
    pub denom: i64,
    pub trunc: String,
    pub terms: Vec<(i64, String)>,
}

/// Smallest integer `e` with `e / denom >= trunc`.
fn exclusive_bound(trunc: &Rational, denom: i64) -> i64 {
    ceil_i64(&(trunc * Rational::from_integer(BigInt::from(denom))))
}

fn min_rat(a: Rational, b: Rational) -> Rational {
    if a < b {
        a
    } else {
        b
    }
}

/// Termwise sum; the bound is the smaller of the two.
pub fn series_add(a: &FracSeries, b: &FracSeries) -> FracSeries {
    let l = lcm(a.denom, b.denom);
    let mut map = a.rescaled(l);
    for (e, c) in b.rescaled(l) {
        *map.entry(e).or_insert_with(Rational::zero) += c;
    }
    FracSeries::from_map(l, map, min_rat(a.trunc.clone(), b.trunc.clone()))
}

/// Truncated Cauchy product. Known exactly below
/// `min(a.trunc + ord(b), b.trunc + ord(a))`.
pub fn series_mul(a: &FracSeries, b: &FracSeries) -> FracSeries {
    let l = lcm(a.denom, b.denom);
    let trunc = min_rat(&a.trunc + b.order_bound(), &b.trunc + a.order_bound());
    let bound = exclusive_bound(&trunc, l);
    let ma: Vec<(i64, Rational)> = a.rescaled(l).into_iter().collect();
    let mb: Vec<(i64, Rational)> = b.rescaled(l).into_iter().collect();
    let mut out: BTreeMap<i64, Rational> = BTreeMap::new();
    for (ea, ca) in &ma {
        for (eb, cb) in &mb {
            let e = ea + eb;
            if e >= bound {
                break;
            }
            *out.entry(e).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    FracSeries::from_map(l, out, trunc)
}

/// `f(q^d)`: exponents and bound scale by `d`.
pub fn substitute_power(f: &FracSeries, d: i64) -> FracSeries {
    assert!(d >= 1, "substitute_power: d must be positive");
    FracSeries::from_map(
        f.denom,
        f.terms.iter().map(|(&e, c)| (e * d, c.clone())).collect(),
        &f.trunc * int(d),
    )
}

/// Generalized binomial coefficients `C(e, j) (-1)^j` for `j = 0..count`.
fn binomial_series_coeffs(e: &Rational, count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let mut c = Rational::one();
    for j in 0..count {
        out.push(c.clone());
        // C(e, j+1)(-1)^{j+1} = C(e, j)(-1)^j * (j - e) / (j + 1)
        let j = int(j as i64);
        c = c * (&j - e) / (j + int(1));
    }
    out
}

/// `(1 - q^n)^e` for rational `e`, known below `prec`.
pub fn generalized_pow(n: i64, e: &Rational, prec: &Rational) -> FracSeries {
    assert!(n >= 1, "generalized_pow: n must be positive");
    assert!(prec.is_positive(), "generalized_pow: prec must be positive");
    // q^{nj} < prec  <=>  j < prec / n
    let count = ceil_i64(&(prec / int(n))).max(0) as usize;
    let coeffs = binomial_series_coeffs(e, count);
    FracSeries::from_integral(
        coeffs
            .into_iter()
            .enumerate()
            .map(|(j, c)| (n * j as i64, c)),
        prec.clone(),
    )
}

/// Generalized pentagonal numbers `k(3k-1)/2`, `k = 0, 1, -1, 2, -2, ...`,
/// with Euler's sign `(-1)^k`, below `bound`.
fn pentagonal_terms(bound: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0, 1)];
    let mut k = 1i64;
    loop {
        let p1 = k * (3 * k - 1) / 2;
        let p2 = k * (3 * k + 1) / 2;
        if p1 >= bound {
            break;
        }
        let s = if k % 2 == 0 { 1 } else { -1 };
        out.push((p1, s));
        if p2 < bound {
            out.push((p2, s));
        }
        k += 1;
    }
    out.sort_unstable();
    out
}

/// `eta(dz) = q^{d/24} prod_{n >= 1} (1 - q^{dn})`, known through `prec`
/// powers of `q` past the leading exponent `d/24`.
///
/// Built from the pentagonal number theorem rather than the product, so it is
/// an independent route from [`binomial_product`].
pub fn eta_series(d: i64, prec: &Rational) -> FracSeries {
    assert!(d >= 1, "eta_series: d must be positive");
    assert!(prec.is_positive(), "eta_series: prec must be positive");
    // pentagonal exponent p contributes q^{d p}; need d p < prec
    let bound = ceil_i64(&(prec / int(d))).max(0);
    let lead = Rational::new(BigInt::from(d), BigInt::from(24));
    FracSeries::new(
        24,
        pentagonal_terms(bound)
            .into_iter()
            .map(|(p, s)| (d + 24 * d * p, int(s))),
        &lead + prec,
    )
}

/// `prod_i (1 - q^{n_i})^{e_i}` for the given factors, known below `prec`.
///
/// Integral exponents are applied in place on a dense coefficient vector
/// (multiplying or dividing by `1 - q^n` one step at a time); when every
/// exponent is integral the coefficients stay in `Z` and the whole product
/// runs on big integers. Non-integral exponents fall back to a dense
/// convolution with the binomial series.
pub fn binomial_product(factors: &[(i64, Rational)], prec: i64) -> FracSeries {
    assert!(prec >= 1, "binomial_product: prec must be positive");
    let len = prec as usize;
    let trunc = int(prec);
    if factors.iter().all(|(_, e)| is_integral(e)) {
        let mut c: Vec<BigInt> = vec![BigInt::zero(); len];
        c[0] = BigInt::one();
        for (n, e) in factors {
            let n = *n as usize;
            if n >= len || e.is_zero() {
                continue;
            }
            let times = e.numer().abs();
            let mut k = BigInt::zero();
            while k < times {
                if e.is_positive() {
                    for i in (n..len).rev() {
                        let t = c[i - n].clone();
                        c[i] -= t;
                    }
                } else {
                    for i in n..len {
                        let t = c[i - n].clone();
                        c[i] += t;
                    }
                }
                k += 1;
            }
        }
        return FracSeries::from_integral(
            c.into_iter()
                .enumerate()
                .map(|(i, v)| (i as i64, Rational::from_integer(v))),
            trunc,
        );
    }
    let mut c: Vec<Rational> = vec![Rational::zero(); len];
    c[0] = Rational::one();
    for (n, e) in factors {
        let n = *n as usize;
        if n >= len || e.is_zero() {
            continue;
        }
        let coeffs = binomial_series_coeffs(e, (len - 1) / n + 1);
        let mut next: Vec<Rational> = vec![Rational::zero(); len];
        for (i, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, b) in coeffs.iter().enumerate() {
                let k = i + n * j;
                if k >= len {
                    break;
                }
                next[k] += ci * b;
            }
        }
        c = next;
    }
    FracSeries::from_integral(c.into_iter().enumerate().map(|(i, v)| (i as i64, v)), trunc)
}

impl Add for &FracSeries {
    type Output = FracSeries;
    fn add(self, rhs: Self) -> FracSeries {
        series_add(self, rhs)
    }
}

impl Neg for &FracSeries {
    type Output = FracSeries;
    fn neg(self) -> FracSeries {
        self.scale(&int(-1))
    }
}

impl Sub for &FracSeries {
    type Output = FracSeries;
    fn sub(self, rhs: Self) -> FracSeries {
        series_add(self, &-rhs)
    }
}

impl Mul for &FracSeries {
    type Output = FracSeries;
    fn mul(self, rhs: Self) -> FracSeries {
        series_mul(self, rhs)
    }
}
