//! Hecke operators `T_p`, the index-raising operators `U_d` and `V_l`, and
//! their transported versions acting on formal xi-images.
//!
//! All operators are applied by pushing each stored coefficient forward to
//! the output slots that read it, which keeps the cost proportional to the
//! number of stored coefficients rather than to the output level.
//!
//! Transport to xi-images. Write the true xi-image coefficient at `(m, gamma)`
//! as `C (m/4N)^{1-k} r(m, gamma)`. Conjugating the weight `2-k` operators
//! by this factor gives, with `k' = 2 - k` the weight of the image:
//!
//! * `T_p`: `p^{2k'-2} r(p^2 m, p gamma) + p^{k'-3/2} (s m / p) r(m, gamma) + r(m/p^2, gamma/p)`,
//!   and `xi(f|T_p) = p^{2k-2} (xi f)|T_p`;
//! * `U_d`: `r(m/d^2, gamma/d)`, and `xi(f|U_d) = (xi f)|U_d`;
//! * `V_l` (including the factor `l^{k-1}`): `sum_a a^{3/2-k'} r(m/a^2, gamma/a)`,
//!   and `xi(f|V_l) = l^{k-1} (xi f)|V_l`.
//!
//! The `(m/4N)^{1-k}` factors at levels `N`, `Nd^2` and `Nl` absorb the powers
//! of `p`, `d` and `l` exactly, so every transported formula is rational.

use num_traits::Zero;

use crate::arith::{
    gcd, int, is_prime, kronecker_odd_prime, mod_inverse, modulo, rat_pow, Rational,
};
use crate::vvforms::{supported, Rep, Table, VVExpansion, XiImage};
use crate::{Error, Result};

fn check_hecke_prime(level: i64, p: i64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let modulus = 2 * level;
    mod_inverse(p, modulus).ok_or(Error::PrimeDividesLevel { p, modulus })
}

fn accumulate(out: &mut Table, key: (i64, i64), c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = out.entry(key).or_insert_with(Rational::zero);
    *e += c;
}

/// Push-forward of the three-term `T_p` formula on one table:
/// `w_up a(p^2 n, p gamma) + w_mid (s n / p) a(n, gamma) + w_down a(n/p^2, gamma/p)`.
#[allow(clippy::too_many_arguments)]
fn tp_table(
    table: &Table,
    level: i64,
    rep: Rep,
    p: i64,
    p_inv: i64,
    w_up: &Rational,
    w_mid: &Rational,
    w_down: &Rational,
) -> Table {
    let modulus = 2 * level;
    let p2 = p * p;
    let mut out = Table::new();
    for (&(n, g), c) in table {
        if n % p2 == 0 {
            accumulate(&mut out, (n / p2, modulo(p_inv * g, modulus)), w_up * c);
        }
        let k = kronecker_odd_prime(rep.sign() * n, p);
        if k != 0 {
            accumulate(&mut out, (n, g), w_mid * c * int(k));
        }
        accumulate(&mut out, (n * p2, modulo(p * g, modulus)), w_down * c);
    }
    out
}

/// `a(n/d^2, gamma/d)` at level `N d^2`: every input slot feeds the `d` output
/// residues `d (gamma + 2N t)`, `0 <= t < d`.
fn u_table(table: &Table, level: i64, d: i64) -> Table {
    let out_mod = 2 * level * d * d;
    let mut out = Table::new();
    for (&(n, g), c) in table {
        for t in 0..d {
            accumulate(
                &mut out,
                (d * d * n, modulo(d * (g + 2 * level * t), out_mod)),
                c.clone(),
            );
        }
    }
    out
}

/// `sum_{a | ((-s n + gamma^2)/4Nl, gamma, l)} a^w a(n/a^2, gamma/a)` at level `N l`,
/// with `gcd(0, x) = x`.
fn v_table(table: &Table, level: i64, rep: Rep, l: i64, w: i64) -> Table {
    let out_level = level * l;
    let four = 4 * out_level as i128;
    let mut out = Table::new();
    for a in crate::arith::divisors(l) {
        let weight = rat_pow(a, w);
        for (&(n, g), c) in table {
            let n_out = a * a * n;
            for t in 0..l / a {
                let g_out = a * (g + 2 * level * t);
                if !supported(out_level, rep, n_out, g_out) {
                    continue;
                }
                let q = (g_out as i128 * g_out as i128 - rep.sign() as i128 * n_out as i128) / four;
                let q = i64::try_from(q).expect("index out of range");
                if gcd(gcd(q, g_out), l) % a == 0 {
                    accumulate(&mut out, (n_out, g_out), &weight * c);
                }
            }
        }
    }
    out
}

/// `f | T_p` for a prime `p` coprime to `2N`. The holomorphic and
/// non-holomorphic tables transform by the same formula; the result is
/// known up to `trunc / p^2`.
pub fn hecke_tp(f: &VVExpansion, p: i64) -> Result<VVExpansion> {
    let p_inv = check_hecke_prime(f.level(), p)?;
    let k2 = f.weight().twice();
    // p^{k-3/2} and p^{2k-2}
    let w_mid = rat_pow(p, (k2 - 3) / 2);
    let w_down = rat_pow(p, k2 - 2);
    let one = int(1);
    let apply = |t: &Table| tp_table(t, f.level(), f.rep(), p, p_inv, &one, &w_mid, &w_down);
    Ok(VVExpansion::from_parts(
        f.level(),
        f.weight(),
        f.rep(),
        apply(f.holo_table()),
        apply(f.nonholo_table()),
        f.trunc().div_euclid(p * p),
    ))
}

/// `f | U_d`, an expansion of level `N d^2` known up to `d^2 trunc`.
pub fn level_u(f: &VVExpansion, d: i64) -> Result<VVExpansion> {
    if d < 1 {
        return Err(Error::NotPositive("d"));
    }
    Ok(VVExpansion::from_parts(
        f.level() * d * d,
        f.weight(),
        f.rep(),
        u_table(f.holo_table(), f.level(), d),
        u_table(f.nonholo_table(), f.level(), d),
        f.trunc() * d * d,
    ))
}

/// `f | V_l`, an expansion of level `N l` with the same index bound.
pub fn level_v(f: &VVExpansion, l: i64) -> Result<VVExpansion> {
    if l < 1 {
        return Err(Error::NotPositive("l"));
    }
    let w = f.weight().minus_half();
    Ok(VVExpansion::from_parts(
        f.level() * l,
        f.weight(),
        f.rep(),
        v_table(f.holo_table(), f.level(), f.rep(), l, w),
        v_table(f.nonholo_table(), f.level(), f.rep(), l, w),
        f.trunc(),
    ))
}

/// `T_p` transported to the coordinates of [`XiImage`].
pub fn xi_tp(x: &XiImage, p: i64) -> Result<XiImage> {
    let p_inv = check_hecke_prime(x.level(), p)?;
    let k2 = x.weight().twice();
    let w_up = rat_pow(p, k2 - 2);
    let w_mid = rat_pow(p, (k2 - 3) / 2);
    let table = tp_table(
        x.table(),
        x.level(),
        x.rep(),
        p,
        p_inv,
        &w_up,
        &w_mid,
        &int(1),
    );
    Ok(XiImage::from_parts(
        x.level(),
        x.weight(),
        x.rep(),
        table,
        x.trunc().div_euclid(p * p),
    ))
}

/// `U_d` transported to the coordinates of [`XiImage`].
pub fn xi_u(x: &XiImage, d: i64) -> Result<XiImage> {
    if d < 1 {
        return Err(Error::NotPositive("d"));
    }
    Ok(XiImage::from_parts(
        x.level() * d * d,
        x.weight(),
        x.rep(),
        u_table(x.table(), x.level(), d),
        x.trunc() * d * d,
    ))
}

/// `l^{k-1} V_l` transported to the coordinates of [`XiImage`].
pub fn xi_v(x: &XiImage, l: i64) -> Result<XiImage> {
    if l < 1 {
        return Err(Error::NotPositive("l"));
    }
    // a^{k-1/2} of the source weight k = 2 - k'
    let w = (3 - x.weight().twice()) / 2;
    Ok(XiImage::from_parts(
        x.level() * l,
        x.weight(),
        x.rep(),
        v_table(x.table(), x.level(), x.rep(), l, w),
        x.trunc(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{divisors, rat};
    use crate::vvforms::{apply_aut, formal_xi, random_supported, theta_series, Weight};

    /// Literal pull-back evaluation of the `V_l` formula at one output slot,
    /// reading the input coefficients through `get`.
    fn v_oracle(
        f: &VVExpansion,
        get: impl Fn(i64, i64) -> Rational,
        l: i64,
        n: i64,
        gamma: i64,
    ) -> Rational {
        let out_level = f.level() * l;
        let s = f.rep().sign();
        let q = (gamma * gamma - s * n) / (4 * out_level);
        let g = gcd(gcd(q, gamma), l);
        let mut acc = Rational::zero();
        for a in divisors(g) {
            if n % (a * a) != 0 {
                continue;
            }
            acc += rat_pow(a, f.weight().minus_half()) * get(n / (a * a), gamma / a);
        }
        acc
    }

    /// Literal pull-back evaluation of `T_p` on the holomorphic table.
    fn tp_oracle(f: &VVExpansion, p: i64, n: i64, gamma: i64) -> Rational {
        let k2 = f.weight().twice();
        let modulus = 2 * f.level();
        let inv = mod_inverse(p, modulus).unwrap();
        let mut acc = f.holo(p * p * n, p * gamma);
        acc += rat_pow(p, (k2 - 3) / 2)
            * int(kronecker_odd_prime(f.rep().sign() * n, p))
            * f.holo(n, gamma);
        if n % (p * p) == 0 {
            acc += rat_pow(p, k2 - 2) * f.holo(n / (p * p), inv * gamma);
        }
        acc
    }

    #[test]
    fn zero_maps_to_zero() {
        let z = VVExpansion::zero(5, Weight::HALF, Rep::Rho, 100);
        assert!(hecke_tp(&z, 3).unwrap().holo_table().is_empty());
        let x = formal_xi(&z);
        assert!(xi_tp(&x, 3).unwrap().is_zero());
    }

    #[test]
    fn hecke_theta_level_one() {
        let theta = theta_series(1, 9 * 20).unwrap();
        let t = hecke_tp(&theta, 3).unwrap();
        assert_eq!(t.trunc(), 20);
        assert_eq!(t.holo(0, 0), rat(4, 3));
        assert_eq!(t.holo(1, 1), rat(8, 3));
        assert_eq!(t, theta_series(1, 20).unwrap().scale(&rat(4, 3)));
    }

    #[test]
    fn hecke_rejects_bad_primes() {
        let theta = theta_series(6, 50).unwrap();
        assert!(matches!(
            hecke_tp(&theta, 3),
            Err(Error::PrimeDividesLevel { p: 3, .. })
        ));
        assert!(matches!(
            hecke_tp(&theta, 2),
            Err(Error::PrimeDividesLevel { .. })
        ));
        assert!(matches!(hecke_tp(&theta, 9), Err(Error::NotPrime(9))));
        assert!(hecke_tp(&theta, 5).is_ok());
    }

    #[test]
    fn hecke_matches_pullback_oracle() {
        for (n, p) in [(1, 3), (2, 5), (5, 3), (7, 5), (4, 7)] {
            for w2 in [1, 3, -1] {
                for rep in [Rep::Rho, Rep::Dual] {
                    let w = Weight::from_twice(w2).unwrap();
                    let f = random_supported(n, w, rep, 17, p * p * 6).unwrap();
                    let t = hecke_tp(&f, p).unwrap();
                    for (m, g) in crate::vvforms::supported_slots(n, rep, -4 * n, t.trunc()) {
                        assert_eq!(
                            t.holo(m, g),
                            tp_oracle(&f, p, m, g),
                            "N={n} p={p} ({m},{g})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn level_u_examples() {
        let f = random_supported(3, Weight::HALF, Rep::Rho, 1, 20).unwrap();
        assert_eq!(level_u(&f, 1).unwrap(), f);
        for d in 2..=4 {
            let theta = theta_series(5, 10).unwrap();
            let u = level_u(&theta, d).unwrap();
            assert_eq!(u.level(), 5 * d * d);
            assert_eq!(u.trunc(), 10 * d * d);
            assert_eq!(u.holo(d * d, d), int(1));
            for (_, g) in u.holo_table().keys() {
                assert_eq!(g % d, 0);
            }
            u.check_invariants().unwrap();
        }
    }

    #[test]
    fn level_v_examples() {
        let f = random_supported(3, Weight::HALF, Rep::Rho, 2, 20).unwrap();
        assert_eq!(level_v(&f, 1).unwrap(), f);
        let theta = theta_series(1, 20).unwrap();
        let v = level_v(&theta, 2).unwrap();
        // a = 1 from theta(4, 0) = 2, a = 2 from theta(1, 1) = 2
        assert_eq!(v.holo(4, 2), int(4));
    }

    #[test]
    fn level_raising_preserves_modularity() {
        // images of holomorphic forms must lie in the theta span at the new level
        for n in 1..=6 {
            let theta = theta_series(n, 200).unwrap();
            for l in 1..=4 {
                let v = level_v(&theta, l).unwrap();
                let basis = crate::vvforms::basis_m_half(n * l, v.trunc()).unwrap();
                assert!(crate::vvforms::decompose(&v, &basis).is_ok(), "N={n} l={l}");
            }
            for d in 1..=3 {
                let u = level_u(&theta, d).unwrap();
                let basis = crate::vvforms::basis_m_half(n * d * d, u.trunc()).unwrap();
                assert!(crate::vvforms::decompose(&u, &basis).is_ok(), "N={n} d={d}");
            }
        }
        let v = level_v(&theta_series(1, 100).unwrap(), 2).unwrap();
        assert_eq!(v, theta_series(2, 100).unwrap().scale(&int(2)));
    }

    #[test]
    fn level_v_matches_pullback_oracle() {
        for n in [1, 2, 3, 6] {
            for l in 1..=6 {
                for (w2, rep) in [(1, Rep::Rho), (3, Rep::Dual), (5, Rep::Rho), (3, Rep::Rho)] {
                    let w = Weight::from_twice(w2).unwrap();
                    let f = random_supported(n, w, rep, 5 + l as u64, 30).unwrap();
                    let v = level_v(&f, l).unwrap();
                    v.check_invariants().unwrap();
                    for (m, g) in crate::vvforms::supported_slots(n * l, rep, -30, 30) {
                        let holo = v_oracle(&f, |a, b| f.holo(a, b), l, m, g);
                        assert_eq!(v.holo(m, g), holo, "N={n} l={l} ({m},{g})");
                        if m < 0 {
                            let nonholo = v_oracle(&f, |a, b| f.nonholo(a, b), l, m, g);
                            assert_eq!(v.nonholo(m, g), nonholo, "N={n} l={l} ({m},{g})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn xi_tp_single_entry() {
        let mut t = Table::new();
        t.insert((3, 1), int(1));
        let x = XiImage::from_table(1, Weight::THREE_HALVES, Rep::Dual, t, 100).unwrap();
        let y = xi_tp(&x, 5).unwrap();
        assert_eq!(y.trunc(), 4);
        assert_eq!(y.r(3, 1), int(-1));
        let y = xi_tp(
            &XiImage::from_table(
                1,
                Weight::THREE_HALVES,
                Rep::Dual,
                x.table().clone(),
                100 * 25,
            )
            .unwrap(),
            5,
        )
        .unwrap();
        assert_eq!(y.r(75, 1), int(1));
    }

    #[test]
    fn xi_relations_for_several_weights() {
        for n in [1, 2, 5, 6] {
            for w2 in [1, 3, -1, 5] {
                for rep in [Rep::Rho, Rep::Dual] {
                    let w = Weight::from_twice(w2).unwrap();
                    let f = random_supported(n, w, rep, 99, 120).unwrap();
                    let xf = formal_xi(&f);
                    for p in [3, 5, 7] {
                        if gcd(p, 2 * n) != 1 {
                            continue;
                        }
                        let lhs = formal_xi(&hecke_tp(&f, p).unwrap());
                        let rhs = xi_tp(&xf, p).unwrap().scale(&rat_pow(p, w2 - 2));
                        assert_eq!(lhs, rhs, "T_{p} N={n} 2k={w2}");
                    }
                    for d in 1..=4 {
                        assert_eq!(formal_xi(&level_u(&f, d).unwrap()), xi_u(&xf, d).unwrap());
                    }
                    for l in 1..=6 {
                        assert_eq!(
                            formal_xi(&level_v(&f, l).unwrap()),
                            xi_v(&xf, l).unwrap(),
                            "V_{l} N={n} 2k={w2}"
                        );
                    }
                    for c in crate::arith::exact_divisors(n) {
                        assert_eq!(
                            formal_xi(&apply_aut(&f, c).unwrap()),
                            xf.apply_aut(c).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn operators_commute() {
        for n in [1, 2, 3, 5] {
            let f = random_supported(n, Weight::HALF, Rep::Rho, 7, 200).unwrap();
            for d in 1..=4 {
                for l in 1..=4 {
                    let a = level_u(&level_v(&f, l).unwrap(), d).unwrap();
                    let b = level_v(&level_u(&f, d).unwrap(), l).unwrap();
                    assert_eq!(a, b, "N={n} d={d} l={l}");
                }
            }
            for p in [3, 5, 7] {
                if gcd(p, 2 * n) != 1 {
                    continue;
                }
                for d in [1, 2, 4] {
                    let a = hecke_tp(&level_u(&f, d).unwrap(), p).unwrap();
                    let b = level_u(&hecke_tp(&f, p).unwrap(), d).unwrap();
                    assert!(a.agrees_with(&b));
                }
                for l in [1, 2, 4] {
                    let a = hecke_tp(&level_v(&f, l).unwrap(), p).unwrap();
                    let b = level_v(&hecke_tp(&f, p).unwrap(), l).unwrap();
                    assert!(a.agrees_with(&b), "N={n} p={p} l={l}");
                }
            }
        }
    }
}
