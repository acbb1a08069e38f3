//! Formal q-expansions of generalized Borcherds products
//! `Psi(f, z) = q^{rho_f} prod_{n >= 1} (1 - q^n)^{a_f(n^2, n)}` and the eta
//! products they produce for unary theta series.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rat, int, modulo, parse_rat, rat, Rational};
use crate::fracq::{binomial_product, eta_series, series_mul, FracSeries, FracSeriesJson};
use crate::vvforms::{apply_aut, basis_m_half, decompose, theta_series, Rep, VVExpansion, Weight};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductResult {
    /// `a_f(0, 0)`.
    pub weight: Rational,
    pub weyl: Rational,
    /// Expansion at the cusp at infinity, leading exponent `weyl`.
    pub expansion: FracSeries,
    /// `n -> a_f(n^2, n)` for `1 <= n <= prec`.
    pub exponents: BTreeMap<i64, Rational>,
}

impl ProductResult {
    pub fn to_json(&self) -> ProductResultJson {
        ProductResultJson {
            weight: fmt_rat(&self.weight),
            weyl: fmt_rat(&self.weyl),
            expansion: self.expansion.to_json(),
            exponents: self
                .exponents
                .iter()
                .map(|(n, e)| (*n, fmt_rat(e)))
                .collect(),
        }
    }

    pub fn from_json(j: &ProductResultJson) -> Result<Self> {
        Ok(ProductResult {
            weight: parse_rat(&j.weight)?,
            weyl: parse_rat(&j.weyl)?,
            expansion: FracSeries::from_json(&j.expansion)?,
            exponents: j
                .exponents
                .iter()
                .map(|(n, e)| Ok((*n, parse_rat(e)?)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Wire format: `{"weight":"a/b","weyl":"a/b","expansion":...,"exponents":[[n,"a/b"],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductResultJson {
    pub weight: String,
    pub weyl: String,
    pub expansion: FracSeriesJson,
    pub exponents: Vec<(i64, String)>,
}

fn check_weight_half_rho(f: &VVExpansion) -> Result<()> {
    if f.weight() != Weight::HALF || f.rep() != Rep::Rho {
        return Err(Error::NotWeightHalfRho);
    }
    Ok(())
}

/// Borcherds exponents `a_f(n^2, n mod 2N)` for `1 <= n <= nmax`.
pub fn exponent_table(f: &VVExpansion, nmax: i64) -> Result<BTreeMap<i64, Rational>> {
    check_weight_half_rho(f)?;
    if f.trunc() < nmax * nmax {
        return Err(Error::Truncation {
            needed: nmax * nmax,
            have: f.trunc(),
        });
    }
    let modulus = 2 * f.level();
    Ok((1..=nmax)
        .map(|n| (n, f.holo(n * n, modulo(n, modulus))))
        .collect())
}

/// Weyl vector of a holomorphic `f` in `M_{1/2,rho_N}`:
/// `sum_d c_d (d + N/d)/24` over its coordinates in the theta basis.
pub fn weyl_vector(f: &VVExpansion) -> Result<Rational> {
    check_weight_half_rho(f)?;
    if !f.is_holomorphic() {
        return Err(Error::NonHolomorphic);
    }
    let n = f.level();
    let basis = basis_m_half(n, f.trunc())?;
    let coords = decompose(f, &basis).map_err(|e| match e {
        Error::NotInSpan => Error::NonHolomorphic,
        other => other,
    })?;
    Ok(basis
        .iter()
        .zip(&coords)
        .map(|(b, c)| c * rat(b.d + n / b.d, 24))
        .fold(Rational::zero(), |acc, x| acc + x))
}

/// `q^{weyl} prod_{n <= prec} (1 - q^n)^{a_f(n^2, n)}`, known through `prec`
/// powers of `q` past the leading exponent. Requires `f.trunc() >= prec^2`.
pub fn borcherds_product(f: &VVExpansion, weyl: &Rational, prec: i64) -> Result<ProductResult> {
    if prec < 1 {
        return Err(Error::NotPositive("prec"));
    }
    let exponents = exponent_table(f, prec)?;
    let factors: Vec<(i64, Rational)> = exponents
        .iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|(n, e)| (*n, e.clone()))
        .collect();
    let expansion = binomial_product(&factors, prec).shift(weyl);
    Ok(ProductResult {
        weight: f.holo(0, 0),
        weyl: weyl.clone(),
        expansion,
        exponents,
    })
}

/// `eta(dz) eta((N/d) z)`, known through `prec` powers of `q` past its
/// leading exponent `(d + N/d)/24`.
pub fn eta_product(level: i64, d: i64, prec: i64) -> Result<FracSeries> {
    if level < 1 {
        return Err(Error::InvalidLevel(level));
    }
    if d < 1 || level % d != 0 {
        return Err(Error::NotDivisor { level, d });
    }
    if prec < 1 {
        return Err(Error::NotPositive("prec"));
    }
    let p = int(prec);
    Ok(series_mul(&eta_series(d, &p), &eta_series(level / d, &p)))
}

/// Outcome of comparing a Borcherds product with an eta product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaIdentityReport {
    pub level: i64,
    pub c: i64,
    pub holds: bool,
    /// First differing exponent with `(exponent, eta side, product side)`.
    pub witness: Option<(Rational, Rational, Rational)>,
}

fn compare_series(level: i64, c: i64, eta: &FracSeries, product: &FracSeries) -> EtaIdentityReport {
    let witness = if eta.trunc() != product.trunc() {
        Some((
            eta.trunc().clone().min(product.trunc().clone()),
            eta.trunc().clone(),
            product.trunc().clone(),
        ))
    } else {
        eta.first_mismatch(product)
    };
    EtaIdentityReport {
        level,
        c,
        holds: witness.is_none(),
        witness,
    }
}

/// Checks `Psi(theta_{1/2,N}^{sigma_c}) = eta(cz) eta((N/c) z)` through `prec`
/// coefficients.
pub fn verify_eta_identity(level: i64, c: i64, prec: i64) -> Result<EtaIdentityReport> {
    let theta = theta_series(level, prec * prec)?;
    let twisted = apply_aut(&theta, c)?;
    let weyl = rat(c + level / c, 24);
    let product = borcherds_product(&twisted, &weyl, prec)?;
    let eta = eta_product(level, c, prec)?;
    Ok(compare_series(level, c, &eta, &product.expansion))
}

/// Checks `Psi(b_d) = eta(dz) eta((N/d) z)` for every element `b_d` of the
/// theta basis of `M_{1/2,rho_N}`, with the Weyl vector computed from the
/// basis decomposition.
pub fn verify_basis_identities(level: i64, prec: i64) -> Result<Vec<EtaIdentityReport>> {
    let basis = basis_m_half(level, prec * prec)?;
    basis
        .iter()
        .map(|b| {
            let weyl = weyl_vector(&b.form)?;
            let product = borcherds_product(&b.form, &weyl, prec)?;
            let eta = eta_product(level, b.d, prec)?;
            Ok(compare_series(level, b.d, &eta, &product.expansion))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracq::substitute_power;
    use crate::heckeops::level_u;
    use crate::vvforms::random_supported;

    #[test]
    fn exponent_table_examples() {
        let z = VVExpansion::zero(5, Weight::HALF, Rep::Rho, 100);
        assert!(exponent_table(&z, 10).unwrap().values().all(Zero::is_zero));
        for n in [1, 4, 6, 7] {
            let theta = theta_series(n, 400).unwrap();
            let table = exponent_table(&theta, 20).unwrap();
            for (k, e) in &table {
                let expected = if k % n == 0 { 2 } else { 1 };
                assert_eq!(e, &int(expected), "N={n} n={k}");
            }
            let twisted = apply_aut(&theta, n).unwrap();
            assert_eq!(exponent_table(&twisted, 20).unwrap(), table);
        }
        assert!(matches!(
            exponent_table(&theta_series(3, 10).unwrap(), 4),
            Err(Error::Truncation {
                needed: 16,
                have: 10
            })
        ));
    }

    #[test]
    fn weyl_vector_examples() {
        for n in 1..=12 {
            let theta = theta_series(n, 8 * n).unwrap();
            assert_eq!(weyl_vector(&theta).unwrap(), rat(1 + n, 24));
            for b in basis_m_half(n, 8 * n).unwrap() {
                assert_eq!(weyl_vector(&b.form).unwrap(), rat(b.d + n / b.d, 24));
                assert_eq!(
                    weyl_vector(&b.form.scale(&int(2))).unwrap(),
                    rat(b.d + n / b.d, 12)
                );
            }
        }
        let f = random_supported(3, Weight::HALF, Rep::Rho, 1, 20).unwrap();
        assert!(matches!(weyl_vector(&f), Err(Error::NonHolomorphic)));
    }

    #[test]
    fn product_examples() {
        let z = VVExpansion::zero(1, Weight::HALF, Rep::Rho, 100);
        let p = borcherds_product(&z, &int(0), 10).unwrap();
        assert_eq!(p.expansion, FracSeries::one(int(10)));
        assert_eq!(p.weight, int(0));

        let theta = theta_series(1, 400).unwrap();
        let p = borcherds_product(&theta, &rat(1, 12), 20).unwrap();
        assert_eq!(p.weight, int(1));
        assert_eq!(p.expansion.valuation(), Some(rat(1, 12)));
        let head: Vec<Rational> = (0..7)
            .map(|i| p.expansion.coeff(&(rat(1, 12) + int(i))))
            .collect();
        let expected: Vec<Rational> = [1, -2, -1, 2, 1, 2, -2].iter().map(|&c| int(c)).collect();
        assert_eq!(head, expected);
        assert_eq!(p.expansion, eta_product(1, 1, 20).unwrap());
    }

    #[test]
    fn product_is_multiplicative() {
        let basis = basis_m_half(6, 400).unwrap();
        let f = &basis[0].form;
        let g = &basis[1].form;
        let wf = rat(7, 24);
        let wg = rat(5, 24);
        let pf = borcherds_product(f, &wf, 20).unwrap();
        let pg = borcherds_product(g, &wg, 20).unwrap();
        let pfg = borcherds_product(&f.add(g).unwrap(), &(&wf + &wg), 20).unwrap();
        assert_eq!(pfg.expansion, series_mul(&pf.expansion, &pg.expansion));
        assert_eq!(pfg.weight, &pf.weight + &pg.weight);
    }

    #[test]
    fn eta_product_examples() {
        let e = eta_product(1, 1, 30).unwrap();
        assert_eq!(
            e,
            series_mul(&eta_series(1, &int(30)), &eta_series(1, &int(30)))
        );
        for n in [6, 12, 20] {
            for d in crate::arith::divisors(n) {
                let e = eta_product(n, d, 30).unwrap();
                assert_eq!(e.valuation(), Some(rat(d + n / d, 24)));
                assert_eq!(e, eta_product(n, n / d, 30).unwrap());
            }
        }
        assert!(matches!(
            eta_product(6, 4, 10),
            Err(Error::NotDivisor { .. })
        ));
    }

    #[test]
    fn eta_identity_examples() {
        assert!(verify_eta_identity(1, 1, 60).unwrap().holds);
        assert!(verify_eta_identity(6, 2, 60).unwrap().holds);
        assert!(verify_eta_identity(6, 3, 60).unwrap().holds);
        assert_eq!(
            eta_product(6, 2, 60).unwrap(),
            eta_product(6, 3, 60).unwrap()
        );
        assert!(verify_eta_identity(12, 2, 10).is_err());
    }

    #[test]
    fn eta_identity_detects_wrong_weyl_vector() {
        let theta = theta_series(5, 400).unwrap();
        let p = borcherds_product(&theta, &rat(1, 3), 20).unwrap();
        let eta = eta_product(5, 1, 20).unwrap();
        let r = compare_series(5, 1, &eta, &p.expansion);
        assert!(!r.holds);
        assert!(r.witness.is_some());
    }

    #[test]
    fn u_d_substitution_on_random_rational_inputs() {
        // Non-integral exponents exercise the generalized binomial path.
        let f = random_supported(2, Weight::HALF, Rep::Rho, 4, 15 * 15).unwrap();
        let f = VVExpansion::from_tables(
            2,
            Weight::HALF,
            Rep::Rho,
            f.holo_table().clone(),
            Default::default(),
            f.trunc(),
        )
        .unwrap();
        let w = rat(1, 7);
        for d in 1..=3 {
            let lhs = borcherds_product(&level_u(&f, d).unwrap(), &(&w * int(d)), 15).unwrap();
            let rhs = substitute_power(&borcherds_product(&f, &w, 15).unwrap().expansion, d);
            assert!(lhs.expansion.agrees_with(&rhs), "d={d}");
        }
    }

    #[test]
    fn json_round_trip() {
        let theta = theta_series(2, 100).unwrap();
        let p = borcherds_product(&theta, &rat(1, 8), 10).unwrap();
        let s = serde_json::to_string(&p.to_json()).unwrap();
        let back: ProductResultJson = serde_json::from_str(&s).unwrap();
        assert_eq!(ProductResult::from_json(&back).unwrap(), p);
    }
}
