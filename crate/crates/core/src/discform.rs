//! The discriminant form `D_N = Z/2NZ` with `Q(gamma) = gamma^2 / 4N mod 1`
//! and its Atkin-Lehner automorphisms.

use crate::arith::{crt, exact_divisors, gcd, modulo, rat, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiscForm {
    level: i64,
}

impl DiscForm {
    pub fn new(level: i64) -> Result<Self> {
        if level < 1 {
            return Err(Error::InvalidLevel(level));
        }
        Ok(DiscForm { level })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// `2N`, the order of the group.
    pub fn modulus(&self) -> i64 {
        2 * self.level
    }

    pub fn reduce(&self, gamma: i64) -> i64 {
        modulo(gamma, self.modulus())
    }

    pub fn neg(&self, gamma: i64) -> i64 {
        self.reduce(-gamma)
    }

    pub fn elements(&self) -> std::ops::Range<i64> {
        0..self.modulus()
    }

    /// `gamma^2 / 4N` reduced into `[0, 1)`.
    pub fn qvalue(&self, gamma: i64) -> Rational {
        let four_n = 4 * self.level;
        let g = self.reduce(gamma) as i128;
        let num = (g * g % four_n as i128) as i64;
        rat(num, four_n)
    }

    /// Exact divisors `c || N`, i.e. the indices of the Atkin-Lehner group.
    pub fn exact_divisors(&self) -> Vec<i64> {
        exact_divisors(self.level)
    }

    pub fn check_exact_divisor(&self, c: i64) -> Result<()> {
        if c < 1 || self.level % c != 0 || gcd(c, self.level / c) != 1 {
            return Err(Error::NotExactDivisor {
                level: self.level,
                c,
            });
        }
        Ok(())
    }

    /// `sigma_c(gamma)`: the residue mod 2N that is `-gamma` mod `2c` and
    /// `gamma` mod `2N/c`.
    ///
    /// The moduli `2c` and `2N/c` share exactly the factor 2, on which both
    /// congruences agree (`-gamma = gamma mod 2`), so the combined solution is
    /// unique modulo `lcm(2c, 2N/c) = 2N`.
    pub fn atkin_lehner(&self, c: i64, gamma: i64) -> Result<i64> {
        self.check_exact_divisor(c)?;
        Ok(self.sigma_unchecked(c, gamma))
    }

    pub(crate) fn sigma_unchecked(&self, c: i64, gamma: i64) -> i64 {
        let m1 = 2 * c;
        let m2 = 2 * self.level / c;
        let (x, l) = crt(modulo(-gamma, m1), m1, modulo(gamma, m2), m2)
            .expect("Atkin-Lehner congruences are compatible mod 2");
        debug_assert_eq!(l, self.modulus());
        x
    }
}

pub fn qvalue(level: i64, gamma: i64) -> Result<Rational> {
    let d = DiscForm::new(level)?;
    if !(0..d.modulus()).contains(&gamma) {
        return Err(Error::ResidueOutOfRange {
            gamma,
            modulus: d.modulus(),
        });
    }
    Ok(d.qvalue(gamma))
}

pub fn atkin_lehner(level: i64, c: i64, gamma: i64) -> Result<i64> {
    let d = DiscForm::new(level)?;
    if !(0..d.modulus()).contains(&gamma) {
        return Err(Error::ResidueOutOfRange {
            gamma,
            modulus: d.modulus(),
        });
    }
    d.atkin_lehner(c, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    /// Exhaustive search for the residue satisfying both congruences.
    fn brute_sigma(n: i64, c: i64, gamma: i64) -> Vec<i64> {
        (0..2 * n)
            .filter(|&x| modulo(x + gamma, 2 * c) == 0 && modulo(x - gamma, 2 * n / c) == 0)
            .collect()
    }

    #[test]
    fn qvalue_examples() {
        assert_eq!(qvalue(1, 1).unwrap(), rat(1, 4));
        assert_eq!(qvalue(6, 0).unwrap(), int(0));
        assert_eq!(qvalue(6, 5).unwrap(), rat(1, 24));
        assert!(qvalue(6, 12).is_err());
    }

    #[test]
    fn qvalue_is_well_defined_and_even() {
        for n in 1..=30 {
            let d = DiscForm::new(n).unwrap();
            for g in d.elements() {
                assert_eq!(d.qvalue(g), d.qvalue(-g));
                for t in -3..=3 {
                    assert_eq!(d.qvalue(g + 2 * n * t), d.qvalue(g));
                }
            }
        }
    }

    #[test]
    fn atkin_lehner_examples() {
        assert_eq!(atkin_lehner(6, 2, 1).unwrap(), 7);
        for g in 0..12 {
            assert_eq!(atkin_lehner(6, 1, g).unwrap(), g);
            assert_eq!(atkin_lehner(6, 6, g).unwrap(), modulo(-g, 12));
        }
        assert!(matches!(
            atkin_lehner(12, 2, 1),
            Err(Error::NotExactDivisor { level: 12, c: 2 })
        ));
        assert!(atkin_lehner(12, 5, 1).is_err());
    }

    #[test]
    fn atkin_lehner_unique_involutive_automorphism_up_to_200() {
        for n in 1..=200 {
            let d = DiscForm::new(n).unwrap();
            for c in d.exact_divisors() {
                for g in d.elements() {
                    let s = d.atkin_lehner(c, g).unwrap();
                    assert_eq!(brute_sigma(n, c, g), vec![s], "N={n} c={c} g={g}");
                    assert_eq!(d.atkin_lehner(c, s).unwrap(), g);
                    assert_eq!(d.qvalue(s), d.qvalue(g));
                    assert_eq!(d.atkin_lehner(c, d.neg(g)).unwrap(), d.neg(s));
                }
            }
        }
    }
}
