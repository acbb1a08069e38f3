//! Vector-valued Fourier expansions for the Weil representation `rho_N` of
//! `D_N` and its dual.
//!
//! An expansion stores two coefficient tables indexed by `(n, gamma)`, where
//! `n` is the numerator of the exponent `n / 4N` and `gamma` a canonical
//! residue in `[0, 2N)`:
//!
//! * `holo`: the holomorphic part `a+(n, gamma)`. The principal part is finite,
//!   so the table is complete for every `n <= trunc`.
//! * `nonholo`: the coefficients `a-(n, gamma)` of the incomplete-Gamma part,
//!   `n < 0`, known for `-trunc <= n < 0`.
//!
//! Absent entries are zero. Both tables satisfy the support rule
//! `n = rep * gamma^2 (mod 4N)` and the symmetry
//! `a(n, -gamma) = eps * a(n, gamma)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{
    divisor_classes, fmt_rat, gcd, int, isqrt, minus_one_pow, modulo, parse_rat, rat, solve_linear,
    LinearSolveError, Rational,
};
use crate::discform::DiscForm;
use crate::heckeops::level_u;
use crate::{Error, Result};

/// Coefficient table keyed by `(n, gamma)`.
pub type Table = BTreeMap<(i64, i64), Rational>;

/// `rho_N` or its dual; the sign `sigma` of the support rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rep {
    Rho,
    Dual,
}

impl Rep {
    pub fn sign(self) -> i64 {
        match self {
            Rep::Rho => 1,
            Rep::Dual => -1,
        }
    }

    pub fn dual(self) -> Rep {
        match self {
            Rep::Rho => Rep::Dual,
            Rep::Dual => Rep::Rho,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rep::Rho => "rho",
            Rep::Dual => "dual",
        }
    }
}

impl FromStr for Rep {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(Rep::Rho),
            "dual" => Ok(Rep::Dual),
            other => Err(Error::Parse(format!("unknown representation {other:?}"))),
        }
    }
}

/// A half-integral weight, stored as `2k` (odd).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    twice: i64,
}

impl Weight {
    pub const HALF: Weight = Weight { twice: 1 };
    pub const THREE_HALVES: Weight = Weight { twice: 3 };

    pub fn from_twice(twice: i64) -> Result<Self> {
        if twice.rem_euclid(2) != 1 {
            return Err(Error::InvalidWeight(twice));
        }
        Ok(Weight { twice })
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn as_rational(self) -> Rational {
        rat(self.twice, 2)
    }

    /// `2 - k`, the weight of the xi-image.
    pub fn dual(self) -> Weight {
        Weight {
            twice: 4 - self.twice,
        }
    }

    /// The integer `k - 1/2`.
    pub fn minus_half(self) -> i64 {
        (self.twice - 1) / 2
    }

    /// Symmetry sign: `(-1)^(k - 1/2)` for `rho_N`, `(-1)^(k + 1/2)` for the dual.
    pub fn epsilon(self, rep: Rep) -> i64 {
        match rep {
            Rep::Rho => minus_one_pow((self.twice - 1) / 2),
            Rep::Dual => minus_one_pow((self.twice + 1) / 2),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.twice)
    }
}

impl FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = parse_rat(s)?;
        let twice = k * int(2);
        if !twice.is_integer() {
            return Err(Error::Parse(format!("weight {s:?} is not a half-integer")));
        }
        let t = i64::try_from(twice.to_integer())
            .map_err(|_| Error::Parse(format!("weight {s:?} out of range")))?;
        Weight::from_twice(t)
    }
}

/// Whether `(n, gamma)` can carry a coefficient at this level and representation.
pub fn supported(level: i64, rep: Rep, n: i64, gamma: i64) -> bool {
    let four_n = 4 * level as i128;
    let g = gamma as i128;
    (n as i128 - rep.sign() as i128 * g * g).rem_euclid(four_n) == 0
}

/// Iterates the supported slots `(n, gamma)` with `lo <= n <= hi`.
pub fn supported_slots(level: i64, rep: Rep, lo: i64, hi: i64) -> Vec<(i64, i64)> {
    let four_n = 4 * level;
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    for gamma in 0..2 * level {
        let r = modulo(rep.sign() * (gamma * gamma % four_n), four_n);
        let mut n = lo + modulo(r - lo, four_n);
        while n <= hi {
            out.push((n, gamma));
            n += four_n;
        }
    }
    out.sort_unstable();
    out
}

/// First coefficient at which two tables differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub part: Part,
    pub n: i64,
    pub gamma: i64,
    pub left: Rational,
    pub right: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Holo,
    Nonholo,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = match self.part {
            Part::Holo => "holo",
            Part::Nonholo => "nonholo",
        };
        write!(
            f,
            "{part}({}, {}): expected {}, got {}",
            self.n, self.gamma, self.left, self.right
        )
    }
}

fn table_mismatch(
    part: Part,
    a: &Table,
    b: &Table,
    keep: impl Fn(i64) -> bool,
) -> Option<Mismatch> {
    let zero = Rational::zero();
    let keys: std::collections::BTreeSet<(i64, i64)> = a
        .keys()
        .chain(b.keys())
        .filter(|(n, _)| keep(*n))
        .copied()
        .collect();
    keys.into_iter().find_map(|(n, gamma)| {
        let x = a.get(&(n, gamma)).unwrap_or(&zero);
        let y = b.get(&(n, gamma)).unwrap_or(&zero);
        (x != y).then(|| Mismatch {
            part,
            n,
            gamma,
            left: x.clone(),
            right: y.clone(),
        })
    })
}

fn check_table(level: i64, weight: Weight, rep: Rep, table: &Table) -> Result<()> {
    let modulus = 2 * level;
    let eps = int(weight.epsilon(rep));
    let zero = Rational::zero();
    for (&(n, gamma), c) in table {
        if !(0..modulus).contains(&gamma) {
            return Err(Error::ResidueOutOfRange { gamma, modulus });
        }
        if !supported(level, rep, n, gamma) {
            return Err(Error::Support { n, gamma });
        }
        let partner = table.get(&(n, modulo(-gamma, modulus))).unwrap_or(&zero);
        if partner != &(&eps * c) {
            return Err(Error::Symmetry { n, gamma });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VVExpansion {
    level: i64,
    weight: Weight,
    rep: Rep,
    holo: Table,
    nonholo: Table,
    trunc: i64,
}

impl VVExpansion {
    pub fn zero(level: i64, weight: Weight, rep: Rep, trunc: i64) -> Self {
        VVExpansion {
            level,
            weight,
            rep,
            holo: Table::new(),
            nonholo: Table::new(),
            trunc,
        }
    }

    /// Validating constructor. Entries outside the known range are dropped.
    pub fn from_tables(
        level: i64,
        weight: Weight,
        rep: Rep,
        holo: Table,
        nonholo: Table,
        trunc: i64,
    ) -> Result<Self> {
        DiscForm::new(level)?;
        if trunc < 0 {
            return Err(Error::NotPositive("trunc"));
        }
        if let Some(&(n, _)) = nonholo.keys().find(|(n, _)| *n >= 0) {
            return Err(Error::NonholoIndex(n));
        }
        let mut holo = holo;
        let mut nonholo = nonholo;
        holo.retain(|&(n, _), c| n <= trunc && !c.is_zero());
        nonholo.retain(|&(n, _), c| n >= -trunc && !c.is_zero());
        let f = VVExpansion {
            level,
            weight,
            rep,
            holo,
            nonholo,
            trunc,
        };
        f.check_invariants()?;
        Ok(f)
    }

    /// Assembles an expansion from tables the caller guarantees to satisfy
    /// the support and symmetry rules; only zeros and out-of-range entries
    /// are removed.
    pub(crate) fn from_parts(
        level: i64,
        weight: Weight,
        rep: Rep,
        mut holo: Table,
        mut nonholo: Table,
        trunc: i64,
    ) -> Self {
        holo.retain(|&(n, _), c| n <= trunc && !c.is_zero());
        nonholo.retain(|&(n, _), c| n < 0 && n >= -trunc && !c.is_zero());
        let f = VVExpansion {
            level,
            weight,
            rep,
            holo,
            nonholo,
            trunc,
        };
        debug_assert!(f.check_invariants().is_ok(), "{:?}", f.check_invariants());
        f
    }

    pub fn check_invariants(&self) -> Result<()> {
        check_table(self.level, self.weight, self.rep, &self.holo)?;
        check_table(self.level, self.weight, self.rep, &self.nonholo)?;
        if let Some(&(n, _)) = self.nonholo.keys().find(|(n, _)| *n >= 0) {
            return Err(Error::NonholoIndex(n));
        }
        Ok(())
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    /// Holomorphic coefficients are known for `n <= trunc`, the
    /// non-holomorphic ones for `-trunc <= n < 0`.
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn disc_form(&self) -> DiscForm {
        DiscForm::new(self.level).expect("level validated on construction")
    }

    pub fn holo(&self, n: i64, gamma: i64) -> Rational {
        self.holo
            .get(&(n, modulo(gamma, 2 * self.level)))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn nonholo(&self, n: i64, gamma: i64) -> Rational {
        self.nonholo
            .get(&(n, modulo(gamma, 2 * self.level)))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn holo_table(&self) -> &Table {
        &self.holo
    }

    pub fn nonholo_table(&self) -> &Table {
        &self.nonholo
    }

    pub fn is_holomorphic(&self) -> bool {
        self.nonholo.is_empty()
    }

    pub fn truncate(&self, trunc: i64) -> Self {
        Self::from_parts(
            self.level,
            self.weight,
            self.rep,
            self.holo.clone(),
            self.nonholo.clone(),
            trunc.min(self.trunc),
        )
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        if self.weight != other.weight || self.rep != other.rep {
            return Err(Error::Incompatible("weight or representation differ"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut holo = self.holo.clone();
        for (k, c) in &other.holo {
            *holo.entry(*k).or_insert_with(Rational::zero) += c;
        }
        let mut nonholo = self.nonholo.clone();
        for (k, c) in &other.nonholo {
            *nonholo.entry(*k).or_insert_with(Rational::zero) += c;
        }
        Ok(Self::from_parts(
            self.level,
            self.weight,
            self.rep,
            holo,
            nonholo,
            self.trunc.min(other.trunc),
        ))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mul = |t: &Table| t.iter().map(|(k, v)| (*k, v * c)).collect();
        Self::from_parts(
            self.level,
            self.weight,
            self.rep,
            mul(&self.holo),
            mul(&self.nonholo),
            self.trunc,
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&int(-1)))
    }

    /// `sum_i c_i f_i` over expansions of the same shape.
    pub fn linear_combination(terms: &[(Rational, &VVExpansion)]) -> Result<Self> {
        let (first, rest) = terms
            .split_first()
            .ok_or(Error::Incompatible("empty linear combination"))?;
        let mut acc = first.1.scale(&first.0);
        for (c, f) in rest {
            acc = acc.add(&f.scale(c))?;
        }
        Ok(acc)
    }

    /// First disagreement on the range where both expansions are known.
    pub fn first_mismatch(&self, other: &Self) -> Result<Option<Mismatch>> {
        self.same_shape(other)?;
        let t = self.trunc.min(other.trunc);
        Ok(
            table_mismatch(Part::Holo, &self.holo, &other.holo, |n| n <= t).or_else(|| {
                table_mismatch(Part::Nonholo, &self.nonholo, &other.nonholo, |n| n >= -t)
            }),
        )
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        matches!(self.first_mismatch(other), Ok(None))
    }

    pub fn to_json(&self) -> VVExpansionJson {
        let rows = |t: &Table| {
            t.iter()
                .map(|(&(n, g), c)| (n, g, fmt_rat(c)))
                .collect::<Vec<_>>()
        };
        VVExpansionJson {
            level: self.level,
            k: self.weight.to_string(),
            rep: self.rep.name().to_string(),
            holo: rows(&self.holo),
            nonholo: rows(&self.nonholo),
            trunc: self.trunc,
        }
    }

    pub fn from_json(j: &VVExpansionJson) -> Result<Self> {
        let table = |rows: &[(i64, i64, String)]| -> Result<Table> {
            let mut t = Table::new();
            for (n, g, c) in rows {
                *t.entry((*n, *g)).or_insert_with(Rational::zero) += parse_rat(c)?;
            }
            Ok(t)
        };
        Self::from_tables(
            j.level,
            j.k.parse()?,
            j.rep.parse()?,
            table(&j.holo)?,
            table(&j.nonholo)?,
            j.trunc,
        )
    }
}

/// Wire format: `{"N":..., "k":"1/2", "rep":"rho"|"dual",
/// "holo":[[n,gamma,"a/b"],...], "nonholo":[...], "trunc":B}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VVExpansionJson {
    #[serde(rename = "N")]
    pub level: i64,
    pub k: String,
    pub rep: String,
    pub holo: Vec<(i64, i64, String)>,
    pub nonholo: Vec<(i64, i64, String)>,
    pub trunc: i64,
}

/// The formal xi-image of an expansion, weight `2 - k`, dual representation.
///
/// `r(m, gamma)` is the coefficient of `q^{m/4N} e_gamma` divided by
/// `C * (m/4N)^{1-k}` where `C` is the global constant of the xi-operator
/// and `k` the weight of the source; at `k = 1/2` the implicit factor is
/// `sqrt(m/4N)`. Known for `1 <= m <= trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiImage {
    level: i64,
    weight: Weight,
    rep: Rep,
    table: Table,
    trunc: i64,
}

impl XiImage {
    pub(crate) fn from_parts(
        level: i64,
        weight: Weight,
        rep: Rep,
        mut table: Table,
        trunc: i64,
    ) -> Self {
        table.retain(|&(m, _), c| m > 0 && m <= trunc && !c.is_zero());
        let x = XiImage {
            level,
            weight,
            rep,
            table,
            trunc,
        };
        debug_assert!(x.check_invariants().is_ok());
        x
    }

    pub fn from_table(
        level: i64,
        weight: Weight,
        rep: Rep,
        table: Table,
        trunc: i64,
    ) -> Result<Self> {
        DiscForm::new(level)?;
        if let Some(&(m, _)) = table.keys().find(|(m, _)| *m <= 0) {
            return Err(Error::Support { n: m, gamma: 0 });
        }
        let x = Self::from_parts(level, weight, rep, table, trunc);
        x.check_invariants()?;
        Ok(x)
    }

    pub fn check_invariants(&self) -> Result<()> {
        check_table(self.level, self.weight, self.rep, &self.table)
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn r(&self, m: i64, gamma: i64) -> Rational {
        self.table
            .get(&(m, modulo(gamma, 2 * self.level)))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_parts(
            self.level,
            self.weight,
            self.rep,
            self.table.iter().map(|(k, v)| (*k, v * c)).collect(),
            self.trunc,
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        if self.weight != other.weight || self.rep != other.rep {
            return Err(Error::Incompatible("weight or representation differ"));
        }
        let mut t = self.table.clone();
        for (k, c) in &other.table {
            *t.entry(*k).or_insert_with(Rational::zero) += c;
        }
        Ok(Self::from_parts(
            self.level,
            self.weight,
            self.rep,
            t,
            self.trunc.min(other.trunc),
        ))
    }

    pub fn apply_aut(&self, c: i64) -> Result<Self> {
        let d = DiscForm::new(self.level)?;
        d.check_exact_divisor(c)?;
        Ok(Self::from_parts(
            self.level,
            self.weight,
            self.rep,
            reindex(&self.table, |g| d.sigma_unchecked(c, g)),
            self.trunc,
        ))
    }

    pub fn first_mismatch(&self, other: &Self) -> Result<Option<Mismatch>> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        if self.weight != other.weight || self.rep != other.rep {
            return Err(Error::Incompatible("weight or representation differ"));
        }
        let t = self.trunc.min(other.trunc);
        Ok(table_mismatch(Part::Holo, &self.table, &other.table, |m| {
            m <= t
        }))
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        matches!(self.first_mismatch(other), Ok(None))
    }

    pub fn to_json(&self) -> XiImageJson {
        XiImageJson {
            level: self.level,
            k: self.weight.to_string(),
            rep: self.rep.name().to_string(),
            r: self
                .table
                .iter()
                .map(|(&(m, g), c)| (m, g, fmt_rat(c)))
                .collect(),
            trunc: self.trunc,
        }
    }
}

/// Wire format of [`XiImage`], mirroring [`VVExpansionJson`] with a single
/// table `"r"` indexed by `m > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiImageJson {
    #[serde(rename = "N")]
    pub level: i64,
    pub k: String,
    pub rep: String,
    pub r: Vec<(i64, i64, String)>,
    pub trunc: i64,
}

fn reindex(t: &Table, sigma: impl Fn(i64) -> i64) -> Table {
    t.iter()
        .map(|(&(n, g), c)| ((n, sigma(g)), c.clone()))
        .collect()
}

/// `theta_{1/2,N}`: coefficient at `(n, gamma)` counts `m = gamma (2N)` with `m^2 = n`.
pub fn theta_series(level: i64, trunc: i64) -> Result<VVExpansion> {
    DiscForm::new(level)?;
    if trunc < 0 {
        return Err(Error::NotPositive("trunc"));
    }
    let r = isqrt(trunc);
    let mut holo = Table::new();
    for m in -r..=r {
        *holo
            .entry((m * m, modulo(m, 2 * level)))
            .or_insert_with(Rational::zero) += int(1);
    }
    Ok(VVExpansion::from_parts(
        level,
        Weight::HALF,
        Rep::Rho,
        holo,
        Table::new(),
        trunc,
    ))
}

/// `f^{sigma_c}`: the component at `gamma` moves to `sigma_c(gamma)`.
pub fn apply_aut(f: &VVExpansion, c: i64) -> Result<VVExpansion> {
    let d = f.disc_form();
    d.check_exact_divisor(c)?;
    let s = |g| d.sigma_unchecked(c, g);
    Ok(VVExpansion::from_parts(
        f.level,
        f.weight,
        f.rep,
        reindex(&f.holo, s),
        reindex(&f.nonholo, s),
        f.trunc,
    ))
}

/// One element of the unary theta basis of `M_{1/2,rho_N}`, labelled by the
/// divisor class representative `d` (with `d^2 <= N`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub d: i64,
    pub form: VVExpansion,
}

/// The basis `theta_{1/2, N/g^2}^{sigma_{d/g}} | U_g`, `g = gcd(d, N/d)`,
/// one element per divisor class `d ~ N/d`, ordered by `d`.
pub fn basis_m_half(level: i64, trunc: i64) -> Result<Vec<BasisElement>> {
    DiscForm::new(level)?;
    if trunc < 0 {
        return Err(Error::NotPositive("trunc"));
    }
    divisor_classes(level)
        .into_iter()
        .map(|d| {
            let g = gcd(d, level / d);
            let inner_level = level / (g * g);
            let inner_trunc = (trunc + g * g - 1) / (g * g);
            let theta = theta_series(inner_level, inner_trunc)?;
            let twisted = apply_aut(&theta, d / g)?;
            let form = level_u(&twisted, g)?.truncate(trunc);
            Ok(BasisElement { d, form })
        })
        .collect()
}

/// Coordinates of `f` in the given basis of `M_{1/2,rho_N}`.
///
/// The system is solved on the slots `n <= 4N` and the result is then
/// checked against every coefficient both sides know.
pub fn decompose(f: &VVExpansion, basis: &[BasisElement]) -> Result<Vec<Rational>> {
    if f.weight != Weight::HALF || f.rep != Rep::Rho {
        return Err(Error::NotWeightHalfRho);
    }
    if !f.is_holomorphic() {
        return Err(Error::NotInSpan);
    }
    if basis.is_empty() {
        return Err(Error::Incompatible("empty basis"));
    }
    for b in basis {
        if b.form.level != f.level {
            return Err(Error::LevelMismatch(f.level, b.form.level));
        }
    }
    if f.holo.keys().any(|(n, _)| *n < 0) {
        return Err(Error::NotInSpan);
    }
    let bound = basis
        .iter()
        .map(|b| b.form.trunc)
        .chain([f.trunc])
        .min()
        .unwrap_or(0);
    let pivot_hi = (4 * f.level).min(bound);
    let slots = supported_slots(f.level, Rep::Rho, 0, pivot_hi);
    let matrix: Vec<Vec<Rational>> = slots
        .iter()
        .map(|&(n, g)| basis.iter().map(|b| b.form.holo(n, g)).collect())
        .collect();
    let rhs: Vec<Rational> = slots.iter().map(|&(n, g)| f.holo(n, g)).collect();
    let coords = solve_linear(&matrix, &rhs).map_err(|e| match e {
        LinearSolveError::Singular => Error::DependentBasis,
        LinearSolveError::Inconsistent => Error::NotInSpan,
    })?;
    let combo = VVExpansion::linear_combination(
        &coords
            .iter()
            .cloned()
            .zip(basis.iter().map(|b| &b.form))
            .collect::<Vec<_>>(),
    )?;
    if combo
        .truncate(bound)
        .first_mismatch(&f.truncate(bound))?
        .is_some()
    {
        return Err(Error::NotInSpan);
    }
    Ok(coords)
}

/// `r(m, gamma) = nonholo(-m, gamma)`, with weight `2 - k` and dual representation.
pub fn formal_xi(f: &VVExpansion) -> XiImage {
    XiImage::from_parts(
        f.level,
        f.weight.dual(),
        f.rep.dual(),
        f.nonholo
            .iter()
            .map(|(&(n, g), c)| ((-n, g), c.clone()))
            .collect(),
        f.trunc,
    )
}

/// Deterministic pseudo-random expansion obeying the support and symmetry
/// rules: holomorphic part on `-min(B, 4N) <= n <= B`, non-holomorphic part
/// on `-B <= n < 0`, coefficients `a/b` with `|a| <= 9`, `1 <= b <= 3`.
pub fn random_supported(
    level: i64,
    weight: Weight,
    rep: Rep,
    seed: u64,
    trunc: i64,
) -> Result<VVExpansion> {
    DiscForm::new(level)?;
    if trunc < 0 {
        return Err(Error::NotPositive("trunc"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = int(weight.epsilon(rep));
    let modulus = 2 * level;
    let mut fill = |lo: i64, hi: i64| {
        let mut t = Table::new();
        for (n, g) in supported_slots(level, rep, lo, hi) {
            let partner = modulo(-g, modulus);
            if partner < g {
                continue;
            }
            let v = rat(rng.random_range(-9..=9), rng.random_range(1..=3));
            if partner == g {
                if eps == int(1) {
                    t.insert((n, g), v);
                }
            } else {
                t.insert((n, partner), &eps * &v);
                t.insert((n, g), v);
            }
        }
        t
    };
    let holo = fill(-trunc.min(4 * level), trunc);
    let nonholo = fill(-trunc, -1);
    Ok(VVExpansion::from_parts(
        level, weight, rep, holo, nonholo, trunc,
    ))
}
