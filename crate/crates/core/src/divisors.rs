//! Cusp and Heegner divisors on `X_0(N)`.
//!
//! Cusps `a/c` with `c | N` are grouped into Galois orbits by their
//! denominator `c`; the cusp at infinity is the class `c = N`. Divisors
//! supported at the cusps that are defined over `Q` are therefore functions
//! of `c`, and the Fricke involution swaps `c` and `N/c`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{
    divisor_classes, divisors, euler_phi, ext_gcd, fmt_rat, gcd, int, is_square, modulo, parse_rat,
    rat, solve_linear, Rational,
};
use crate::{Error, Result};

fn check_level(level: i64) -> Result<()> {
    if level < 1 {
        return Err(Error::InvalidLevel(level));
    }
    Ok(())
}

fn check_divisor(level: i64, d: i64) -> Result<()> {
    check_level(level)?;
    if d < 1 || level % d != 0 {
        return Err(Error::NotDivisor { level, d });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspClass {
    pub c: i64,
    /// Number of cusps `a/c`, `phi(gcd(c, N/c))`.
    pub orbit_size: i64,
    /// `gcd(c, N/c)`: the cusps are defined over `Q(zeta_conductor)`.
    pub conductor: i64,
    /// `N / gcd(c^2, N)`.
    pub width: i64,
}

pub fn cusp_classes(level: i64) -> Result<Vec<CuspClass>> {
    check_level(level)?;
    Ok(divisors(level)
        .into_iter()
        .map(|c| {
            let conductor = gcd(c, level / c);
            CuspClass {
                c,
                orbit_size: euler_phi(conductor),
                conductor,
                width: level / gcd(c * c, level),
            }
        })
        .collect())
}

/// A cusp divisor defined over `Q`: one rational order per class `c | N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspDivisor {
    level: i64,
    ord: BTreeMap<i64, Rational>,
}

impl CuspDivisor {
    pub fn zero(level: i64) -> Result<Self> {
        check_level(level)?;
        Ok(CuspDivisor {
            level,
            ord: BTreeMap::new(),
        })
    }

    pub fn new<I>(level: i64, orders: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut d = Self::zero(level)?;
        for (c, v) in orders {
            check_divisor(level, c)?;
            *d.ord.entry(c).or_insert_with(Rational::zero) += v;
        }
        d.ord.retain(|_, v| !v.is_zero());
        Ok(d)
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn ord(&self, c: i64) -> Rational {
        self.ord.get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    /// `(c, ord)` for every divisor `c` of `N`, zeros included.
    pub fn orders(&self) -> Vec<(i64, Rational)> {
        divisors(self.level)
            .into_iter()
            .map(|c| (c, self.ord(c)))
            .collect()
    }

    pub fn degree(&self) -> Rational {
        self.ord
            .iter()
            .map(|(c, v)| v * int(euler_phi(gcd(*c, self.level / c))))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn is_fricke_invariant(&self) -> bool {
        self.fricke_violation().is_none()
    }

    fn fricke_violation(&self) -> Option<(i64, i64)> {
        divisors(self.level)
            .into_iter()
            .map(|c| (c, self.level / c))
            .find(|&(c, p)| self.ord(c) != self.ord(p))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        Self::new(
            self.level,
            self.ord
                .iter()
                .chain(&other.ord)
                .map(|(c, v)| (*c, v.clone())),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.level, self.ord.iter().map(|(c, v)| (*c, v * s)))
            .expect("divisors already validated")
    }

    pub fn to_json(&self) -> CuspDivisorJson {
        CuspDivisorJson {
            level: self.level,
            orders: self
                .orders()
                .iter()
                .map(|(c, v)| (*c, fmt_rat(v)))
                .collect(),
        }
    }

    pub fn from_json(j: &CuspDivisorJson) -> Result<Self> {
        let orders = j
            .orders
            .iter()
            .map(|(c, v)| Ok((*c, parse_rat(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.level, orders)
    }
}

/// Wire format: `{"N":..., "orders":[[c,"a/b"],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspDivisorJson {
    #[serde(rename = "N")]
    pub level: i64,
    pub orders: Vec<(i64, String)>,
}

/// Order of `eta(dz) eta((N/d) z)` at the cusps `a/c` of `X_0(N)`:
/// `sum_{delta in {d, N/d}} N gcd(c, delta)^2 / (24 c delta gcd(c, N/c))`.
pub fn eta_order(level: i64, d: i64, c: i64) -> Result<Rational> {
    check_divisor(level, d)?;
    check_divisor(level, c)?;
    let g = gcd(c, level / c);
    Ok([d, level / d]
        .into_iter()
        .map(|delta| {
            let h = gcd(c, delta);
            rat(level * h * h, 24 * c * delta * g)
        })
        .fold(Rational::zero(), |a, b| a + b))
}

/// The cusp divisor of `eta(dz) eta((N/d) z)`.
pub fn eta_divisor(level: i64, d: i64) -> Result<CuspDivisor> {
    check_divisor(level, d)?;
    let orders = divisors(level)
        .into_iter()
        .map(|c| Ok((c, eta_order(level, d, c)?)))
        .collect::<Result<Vec<_>>>()?;
    CuspDivisor::new(level, orders)
}

pub fn fricke_image(divisor: &CuspDivisor) -> CuspDivisor {
    let n = divisor.level;
    CuspDivisor::new(n, divisor.ord.iter().map(|(c, v)| (n / c, v.clone()))).expect("N/c divides N")
}

/// Dimension of the space of Fricke-invariant rational cusp divisors:
/// `(sigma_0(N) + [N is a square]) / 2`.
pub fn cusp_space_dimension(level: i64) -> Result<i64> {
    check_level(level)?;
    let sigma0 = divisors(level).len() as i64;
    Ok((sigma0 + i64::from(is_square(level))) / 2)
}

/// Rows: cusp classes `c ~ N/c`; columns: divisor classes `d ~ N/d`; entry
/// the order of `eta(dz) eta((N/d) z)` at `c`. Both index sets use the
/// representatives with `x^2 <= N`.
pub fn matching_matrix(level: i64) -> Result<Vec<Vec<Rational>>> {
    check_level(level)?;
    let classes = divisor_classes(level);
    classes
        .iter()
        .map(|&c| classes.iter().map(|&d| eta_order(level, d, c)).collect())
        .collect()
}

/// The unique `x_d`, `d` in `D(N)`, with `sum_d x_d div(eta(dz) eta((N/d) z)) = target`.
pub fn solve_cusp_matching(level: i64, target: &CuspDivisor) -> Result<Vec<(i64, Rational)>> {
    if target.level != level {
        return Err(Error::LevelMismatch(level, target.level));
    }
    if let Some((c, partner)) = target.fricke_violation() {
        return Err(Error::NotFrickeInvariant { c, partner });
    }
    let classes = divisor_classes(level);
    let matrix = matching_matrix(level)?;
    let rhs: Vec<Rational> = classes.iter().map(|&c| target.ord(c)).collect();
    let x = solve_linear(&matrix, &rhs).map_err(|_| Error::SingularMatching(level))?;
    Ok(classes.into_iter().zip(x).collect())
}

/// `sum_d x_d div(eta(dz) eta((N/d) z))`.
pub fn combine_eta_divisors(level: i64, coeffs: &[(i64, Rational)]) -> Result<CuspDivisor> {
    let mut acc = CuspDivisor::zero(level)?;
    for (d, x) in coeffs {
        acc = acc.add(&eta_divisor(level, *d)?.scale(x))?;
    }
    Ok(acc)
}

/// Binary quadratic form `[a, b, c] = a x^2 + b xy + c y^2`.
type Form = [i64; 3];

/// SL_2(Z)-reduced positive definite forms of discriminant `disc < 0`,
/// including imprimitive ones, with the order of their stabilizer in PSL_2(Z).
fn reduced_forms(disc: i64) -> Vec<(Form, i64)> {
    let big_d = -disc;
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= big_d {
        for b in (-a + 1)..=a {
            let num = b * b + big_d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            let stab = if a == b && b == c {
                3
            } else if b == 0 && a == c {
                2
            } else {
                1
            };
            out.push(([a, b, c], stab));
        }
        a += 1;
    }
    out
}

/// `Q o M`, i.e. `(x, y) -> Q(p x + q y, r x + s y)` for `M = [[p, q], [r, s]]`.
fn act(f: Form, m: [i64; 4]) -> Form {
    let [a, b, c] = f;
    let [p, q, r, s] = m;
    [
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    ]
}

/// Right coset representatives of `Gamma_0(N)` in `SL_2(Z)`, one for each
/// point `(c : d)` of `P^1(Z/NZ)`.
fn gamma0_right_cosets(level: i64) -> Vec<[i64; 4]> {
    if level == 1 {
        return vec![[1, 0, 0, 1]];
    }
    let units: Vec<i64> = (1..level).filter(|&u| gcd(u, level) == 1).collect();
    let mut out = Vec::new();
    for c in 0..level {
        for d in 0..level {
            if gcd(gcd(c, d), level) != 1 {
                continue;
            }
            let canonical = units
                .iter()
                .map(|&u| (u * c % level, u * d % level))
                .min()
                .expect("units are non-empty");
            if canonical != (c, d) {
                continue;
            }
            let big_c = if c == 0 { level } else { c };
            let mut big_d = d;
            while gcd(big_c, big_d) != 1 {
                big_d += level;
            }
            let (_, x, y) = ext_gcd(big_d, big_c);
            // x D + y C = 1, so [[x, -y], [C, D]] has determinant 1
            out.push([x, -y, big_c, big_d]);
        }
    }
    out
}

/// Degrees of all Heegner divisors `Z(n, gamma)` of discriminant `n < 0`,
/// keyed by `gamma`.
///
/// `Z(n, gamma)` counts the `Gamma_0(N)`-classes of forms `[aN, b, c]`,
/// `a > 0`, `b = gamma (2N)`, `b^2 - 4Nac = n`, each weighted by the inverse
/// order of its stabilizer in `Gamma_0(N) / {+-1}`. Splitting each
/// `SL_2(Z)`-class `[Q]` into `Gamma_0(N)`-orbits, the weighted count of the
/// orbits satisfying the congruence conditions equals
/// `#{cosets L Gamma_0(N) : Q o L qualifies} / |Stab(Q)|`, so no orbit
/// search is needed.
pub fn heegner_degrees(level: i64, n: i64) -> Result<BTreeMap<i64, Rational>> {
    check_level(level)?;
    if n >= 0 {
        return Err(Error::HeegnerIndex { level, n, gamma: 0 });
    }
    let left_cosets: Vec<[i64; 4]> = gamma0_right_cosets(level)
        .into_iter()
        .map(|[p, q, r, s]| [s, -q, -r, p])
        .collect();
    let mut out: BTreeMap<i64, Rational> = BTreeMap::new();
    for (form, stab) in reduced_forms(n) {
        let w = rat(1, stab);
        for &m in &left_cosets {
            let [a, b, _] = act(form, m);
            if a % level == 0 {
                *out.entry(modulo(b, 2 * level))
                    .or_insert_with(Rational::zero) += &w;
            }
        }
    }
    Ok(out)
}

fn check_heegner_index(level: i64, n: i64, gamma: i64) -> Result<()> {
    check_level(level)?;
    let modulus = 2 * level;
    if !(0..modulus).contains(&gamma) {
        return Err(Error::ResidueOutOfRange { gamma, modulus });
    }
    if n >= 0 || modulo(n - gamma * gamma, 4 * level) != 0 {
        return Err(Error::HeegnerIndex { level, n, gamma });
    }
    Ok(())
}

/// Degree of `Z(n, gamma)`; see [`heegner_degrees`] for the normalization.
pub fn heegner_degree(level: i64, n: i64, gamma: i64) -> Result<Rational> {
    check_heegner_index(level, n, gamma)?;
    Ok(heegner_degrees(level, n)?
        .remove(&gamma)
        .unwrap_or_else(Rational::zero))
}

/// Formal integer combination of Heegner divisors `Z(n, gamma)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeegnerDivisor {
    level: i64,
    mult: BTreeMap<(i64, i64), i64>,
}

impl HeegnerDivisor {
    pub fn new<I>(level: i64, mult: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((i64, i64), i64)>,
    {
        check_level(level)?;
        let mut m: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        for ((n, g), k) in mult {
            check_heegner_index(level, n, g)?;
            *m.entry((n, g)).or_insert(0) += k;
        }
        m.retain(|_, k| *k != 0);
        Ok(HeegnerDivisor { level, mult: m })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn multiplicities(&self) -> &BTreeMap<(i64, i64), i64> {
        &self.mult
    }

    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn degree(&self) -> Result<Rational> {
        let mut cache: BTreeMap<i64, BTreeMap<i64, Rational>> = BTreeMap::new();
        let mut total = Rational::zero();
        for (&(n, g), &k) in &self.mult {
            if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(n) {
                e.insert(heegner_degrees(self.level, n)?);
            }
            if let Some(deg) = cache[&n].get(&g) {
                total += deg * int(k);
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> HeegnerDivisorJson {
        HeegnerDivisorJson {
            level: self.level,
            mult: self.mult.iter().map(|(&(n, g), &k)| (n, g, k)).collect(),
        }
    }

    pub fn from_json(j: &HeegnerDivisorJson) -> Result<Self> {
        Self::new(j.level, j.mult.iter().map(|&(n, g, k)| ((n, g), k)))
    }
}

/// Wire format: `{"N":..., "mult":[[n,gamma,k],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeegnerDivisorJson {
    #[serde(rename = "N")]
    pub level: i64,
    pub mult: Vec<(i64, i64, i64)>,
}

/// `Z(f)` with its degree and the degree-zero divisor
/// `y(f) = Z(f) - deg Z(f) * infinity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeegnerReport {
    pub divisor: HeegnerDivisor,
    pub degree: Rational,
    /// Cusp class carrying the correction term; infinity is `c = N`.
    pub cusp: i64,
    /// Multiplicity of that cusp in `y(f)`, i.e. `-deg Z(f)`.
    pub cusp_correction: Rational,
}

impl HeegnerReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.divisor.level,
            "Z": self.divisor.to_json().mult,
            "degree": fmt_rat(&self.degree),
            "y": {
                "heegner": self.divisor.to_json().mult,
                "cusp": self.cusp,
                "cusp_multiplicity": fmt_rat(&self.cusp_correction),
            },
        })
    }
}

/// Builds `Z(f)` from a principal part `(n, gamma) -> a(n, gamma)`. Terms with
/// `n = 0` carry no Heegner divisor and are skipped.
pub fn heegner_data(level: i64, principal: &BTreeMap<(i64, i64), i64>) -> Result<HeegnerReport> {
    if let Some((&(n, gamma), _)) = principal.iter().find(|((n, _), _)| *n > 0) {
        return Err(Error::HeegnerIndex { level, n, gamma });
    }
    let divisor = HeegnerDivisor::new(
        level,
        principal
            .iter()
            .filter(|((n, _), _)| *n < 0)
            .map(|(k, v)| (*k, *v)),
    )?;
    let degree = divisor.degree()?;
    Ok(HeegnerReport {
        cusp_correction: -degree.clone(),
        cusp: level,
        divisor,
        degree,
    })
}

/// Data for the weak converse theorem: the Heegner divisor the harmonic part
/// must produce, and the unique holomorphic theta combination
/// `f_2 = sum_d x_d b_d` whose Borcherds product has the given cusp divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub level: i64,
    pub heegner: HeegnerReport,
    pub cusp_target: CuspDivisor,
    /// `(d, x_d)` over divisor classes `d ~ N/d`.
    pub coefficients: Vec<(i64, Rational)>,
    /// Weight `a_{f_2}(0, 0) = sum_d x_d` of `Psi(f_2)`.
    pub weight: Rational,
    /// Weyl vector `sum_d x_d (d + N/d)/24` of `Psi(f_2)`.
    pub weyl: Rational,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.level,
            "heegner": self.heegner.to_json(),
            "cusp_target": self.cusp_target.to_json(),
            "x": self.coefficients.iter().map(|(d, x)| (*d, fmt_rat(x))).collect::<Vec<_>>(),
            "weight": fmt_rat(&self.weight),
            "weyl": fmt_rat(&self.weyl),
        })
    }
}

pub fn converse_pipeline(
    level: i64,
    principal: &BTreeMap<(i64, i64), i64>,
    cusp_target: &CuspDivisor,
) -> Result<Certificate> {
    let heegner = heegner_data(level, principal)?;
    let coefficients = solve_cusp_matching(level, cusp_target)?;
    let weight = coefficients
        .iter()
        .fold(Rational::zero(), |acc, (_, x)| acc + x);
    let weyl = coefficients.iter().fold(Rational::zero(), |acc, (d, x)| {
        acc + x * rat(d + level / d, 24)
    });
    Ok(Certificate {
        level,
        heegner,
        cusp_target: cusp_target.clone(),
        coefficients,
        weight,
        weyl,
    })
}
