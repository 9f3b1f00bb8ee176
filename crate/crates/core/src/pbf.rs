//! Multilinear pseudo-Boolean polynomials with exact integer coefficients.
//!
//! A [`PseudoBooleanFunction`] is stored in canonical multilinear form: a map
//! from sorted sets of 1-based variable indices to nonzero integer
//! coefficients. The empty set keys the constant term. Multiplication applies
//! idempotence (`q * q = q`) so keys are always set unions, which makes the
//! representation of a function unique.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// 1-based variable index (`q_1 ... q_n`).
pub type Var = u32;

/// A product of distinct binary variables, kept sorted.
///
/// Ordered by cardinality first, then lexicographically, which is also the
/// serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<Var>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut vars: Vec<Var>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Monomial(vars)
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Set union of two sorted index lists.
    pub fn union(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical multilinear polynomial over binary variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PseudoBooleanFunction {
    terms: BTreeMap<Monomial, i64>,
}

impl PseudoBooleanFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut f = Self::zero();
        f.add_term(Monomial::one(), c);
        f
    }

    /// The single variable `q_i`.
    pub fn var(i: Var) -> Self {
        Self::monomial(&[i], 1)
    }

    pub fn monomial(vars: &[Var], coeff: i64) -> Self {
        let mut f = Self::zero();
        f.add_term(Monomial::new(vars.to_vec()), coeff);
        f
    }

    /// Builds a function from `(vars, coeff)` pairs, canonicalizing repeated
    /// indices and merging duplicate keys.
    pub fn from_terms<I, V>(terms: I) -> Self
    where
        I: IntoIterator<Item = (V, i64)>,
        V: Into<Vec<Var>>,
    {
        let mut f = Self::zero();
        for (vars, c) in terms {
            f.add_term(Monomial::new(vars.into()), c);
        }
        f
    }

    /// Adds `c * m` in place, dropping the key if the coefficient cancels.
    pub fn add_term(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, vars: &[Var]) -> i64 {
        self.terms
            .get(&Monomial::new(vars.to_vec()))
            .copied()
            .unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.coefficient(&[])
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), c * k))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    /// Product with idempotence: keys combine as set unions.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.union(mb), ca * cb);
            }
        }
        out
    }

    /// Product of an iterator of factors; the empty product is 1.
    pub fn product<'a, I>(factors: I) -> Self
    where
        I: IntoIterator<Item = &'a PseudoBooleanFunction>,
    {
        factors
            .into_iter()
            .fold(Self::constant(1), |acc, f| acc.mul(f))
    }

    pub fn sum<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = &'a PseudoBooleanFunction>,
    {
        let mut out = Self::zero();
        for p in parts {
            out.add_assign_ref(p);
        }
        out
    }

    /// Maximum monomial cardinality (locality); 0 for constants and zero.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Number of nonzero terms per locality `k`; `k = 0` is the constant.
    pub fn term_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for m in self.terms.keys() {
            *census.entry(m.degree()).or_insert(0) += 1;
        }
        census
    }

    /// Every variable index that appears in some term.
    pub fn support(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().iter().copied())
            .collect()
    }

    /// Largest variable index present, or 0 for constants.
    pub fn max_var(&self) -> Var {
        self.terms
            .keys()
            .filter_map(|m| m.vars().last().copied())
            .max()
            .unwrap_or(0)
    }

    /// Evaluates at `bits`, where `bits[i - 1]` holds `q_i` (nonzero = 1).
    pub fn evaluate(&self, bits: &[u8]) -> Result<i64> {
        let mut total = 0i64;
        for (m, &c) in &self.terms {
            let mut on = true;
            for &v in m.vars() {
                let b = *bits.get(v as usize - 1).ok_or(Error::MissingVariable(v))?;
                if b == 0 {
                    on = false;
                    break;
                }
            }
            if on {
                total += c;
            }
        }
        Ok(total)
    }

    /// Evaluates with `q_i` taken from bit `i - 1` of `mask`.
    ///
    /// Panics if some index exceeds 64; use [`CompiledPbf`] in hot loops.
    pub fn evaluate_mask(&self, mask: u64) -> i64 {
        self.terms
            .iter()
            .filter(|(m, _)| m.vars().iter().all(|&v| mask >> (v - 1) & 1 == 1))
            .map(|(_, &c)| c)
            .sum()
    }

    /// Fixes the bound variables to constants. Unbound or absent indices are
    /// left alone.
    pub fn substitute_constants(&self, bindings: &BTreeMap<Var, bool>) -> Self {
        let mut out = Self::zero();
        'terms: for (m, &c) in &self.terms {
            let mut kept = Vec::with_capacity(m.degree());
            for &v in m.vars() {
                match bindings.get(&v) {
                    Some(true) => {}
                    Some(false) => continue 'terms,
                    None => kept.push(v),
                }
            }
            out.add_term(Monomial(kept), c);
        }
        out
    }

    /// Renames variables. Indices missing from `mapping` keep their label.
    /// The mapping must be injective on the support.
    pub fn relabel(&self, mapping: &BTreeMap<Var, Var>) -> Result<Self> {
        let mut seen: BTreeMap<Var, Var> = BTreeMap::new();
        for v in self.support() {
            let target = mapping.get(&v).copied().unwrap_or(v);
            if target == 0 {
                return Err(Error::InvalidArgument(format!(
                    "relabel target for q{v} is 0; indices are 1-based"
                )));
            }
            if let Some(&first) = seen.get(&target) {
                return Err(Error::NonInjective {
                    first,
                    second: v,
                    target,
                });
            }
            seen.insert(target, v);
        }
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            let vars = m
                .vars()
                .iter()
                .map(|v| mapping.get(v).copied().unwrap_or(*v))
                .collect();
            out.add_term(Monomial::new(vars), c);
        }
        Ok(out)
    }

    /// Sum of absolute coefficient values, an upper bound on `max |f|`.
    pub fn l1_norm(&self) -> i64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn compile(&self) -> Result<CompiledPbf> {
        CompiledPbf::new(self)
    }
}

/// `1 - f`.
pub fn boolean_not(f: &PseudoBooleanFunction) -> PseudoBooleanFunction {
    PseudoBooleanFunction::constant(1).sub(f)
}

/// `f + g - f g`.
pub fn boolean_or(f: &PseudoBooleanFunction, g: &PseudoBooleanFunction) -> PseudoBooleanFunction {
    f.add(g).sub(&f.mul(g))
}

/// `f g`.
pub fn boolean_and(f: &PseudoBooleanFunction, g: &PseudoBooleanFunction) -> PseudoBooleanFunction {
    f.mul(g)
}

/// Logical equality of two variables: `1 - q_i - q_j + 2 q_i q_j`.
pub fn xnor(i: Var, j: Var) -> Result<PseudoBooleanFunction> {
    if i == j {
        return Err(Error::InvalidArgument(format!(
            "xnor of q{i} with itself is the constant 1"
        )));
    }
    if i == 0 || j == 0 {
        return Err(Error::InvalidArgument(
            "variable indices are 1-based".into(),
        ));
    }
    Ok(PseudoBooleanFunction::from_terms([
        (vec![], 1),
        (vec![i], -1),
        (vec![j], -1),
        (vec![i, j], 2),
    ]))
}

/// Logical equality of two arbitrary functions, `1 - f - g + 2 f g`.
pub fn xnor_of(f: &PseudoBooleanFunction, g: &PseudoBooleanFunction) -> PseudoBooleanFunction {
    PseudoBooleanFunction::constant(1)
        .sub(f)
        .sub(g)
        .add(&f.mul(g).scale(2))
}

impl fmt::Display for PseudoBooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, &c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if n == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if m.degree() == 0 {
                write!(f, "{a}")?;
            } else {
                if a != 1 {
                    write!(f, "{a}")?;
                }
                for v in m.vars() {
                    write!(f, "q{v}")?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &PseudoBooleanFunction {
    type Output = PseudoBooleanFunction;
    fn add(self, rhs: Self) -> PseudoBooleanFunction {
        PseudoBooleanFunction::add(self, rhs)
    }
}

impl Sub for &PseudoBooleanFunction {
    type Output = PseudoBooleanFunction;
    fn sub(self, rhs: Self) -> PseudoBooleanFunction {
        PseudoBooleanFunction::sub(self, rhs)
    }
}

impl Mul for &PseudoBooleanFunction {
    type Output = PseudoBooleanFunction;
    fn mul(self, rhs: Self) -> PseudoBooleanFunction {
        PseudoBooleanFunction::mul(self, rhs)
    }
}

impl Neg for &PseudoBooleanFunction {
    type Output = PseudoBooleanFunction;
    fn neg(self) -> PseudoBooleanFunction {
        self.scale(-1)
    }
}

/// On-disk term record: `{"vars": [...], "coeff": c}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermRecord {
    vars: Vec<Var>,
    coeff: i64,
}

impl Serialize for PseudoBooleanFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(m, &c)| TermRecord {
                vars: m.vars().to_vec(),
                coeff: c,
            })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PseudoBooleanFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        if records.iter().any(|r| r.vars.contains(&0)) {
            return Err(serde::de::Error::custom("variable indices are 1-based"));
        }
        Ok(Self::from_terms(
            records.into_iter().map(|r| (r.vars, r.coeff)),
        ))
    }
}

/// Bitmask form of a polynomial over at most 64 variables, for fast
/// repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledPbf {
    constant: i64,
    terms: Vec<(u64, i64)>,
}

impl CompiledPbf {
    pub fn new(f: &PseudoBooleanFunction) -> Result<Self> {
        let max = f.max_var() as usize;
        if max > 64 {
            return Err(Error::TooManyVariables {
                count: max,
                limit: 64,
            });
        }
        let mut constant = 0;
        let mut terms = Vec::with_capacity(f.num_terms());
        for (m, c) in f.terms() {
            if m.degree() == 0 {
                constant = c;
            } else {
                let mask = m.vars().iter().fold(0u64, |acc, &v| acc | 1 << (v - 1));
                terms.push((mask, c));
            }
        }
        Ok(Self { constant, terms })
    }

    #[inline]
    pub fn eval(&self, assignment: u64) -> i64 {
        let mut total = self.constant;
        for &(mask, c) in &self.terms {
            if assignment & mask == mask {
                total += c;
            }
        }
        total
    }
}

/// Converts a bitmask over `n` variables into the `bits[i - 1] = q_i` form.
pub fn mask_to_bits(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| (mask >> i & 1) as u8).collect()
}

/// Renders an assignment most-significant-first (`q_n ... q_1`), the display
/// order used for bit strings throughout.
pub fn display_bits(mask: u64, n: usize) -> String {
    (0..n)
        .rev()
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a most-significant-first bit string into a mask (`q_1` last).
pub fn parse_bits(s: &str) -> Result<u64> {
    let digits: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if digits.len() > 64 {
        return Err(Error::TooManyVariables {
            count: digits.len(),
            limit: 64,
        });
    }
    digits.iter().try_fold(0u64, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        other => Err(Error::InvalidArgument(format!("not a bit: {other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Pbf = PseudoBooleanFunction;

    fn q(i: Var) -> Pbf {
        Pbf::var(i)
    }

    #[test]
    fn add_cancels_to_constant() {
        let f = Pbf::constant(1).add(&q(1));
        let g = q(1).scale(-1);
        assert_eq!(f.add(&g), Pbf::constant(1));
    }

    #[test]
    fn add_doubles_and_zero_is_identity() {
        let m = Pbf::monomial(&[1, 2], 1);
        assert_eq!(m.add(&m), Pbf::monomial(&[1, 2], 2));
        assert_eq!(Pbf::zero().add(&m), m);
    }

    #[test]
    fn mul_is_idempotent() {
        assert_eq!(q(1).mul(&q(1)), q(1));
        let p = boolean_not(&q(1));
        assert_eq!(p.mul(&p), p);
    }

    #[test]
    fn xnor_squared_is_xnor() {
        let e = xnor(1, 2).unwrap();
        let sq = e.mul(&e);
        for mask in 0..4u64 {
            assert_eq!(sq.evaluate_mask(mask), e.evaluate_mask(mask));
        }
        assert_eq!(sq, e);
    }

    #[test]
    fn boolean_operators() {
        let e = xnor(1, 2).unwrap();
        assert_eq!(e.evaluate(&[0, 0]).unwrap(), 1);
        assert_eq!(e.evaluate(&[0, 1]).unwrap(), 0);
        assert_eq!(e.evaluate(&[1, 0]).unwrap(), 0);
        assert_eq!(e.evaluate(&[1, 1]).unwrap(), 1);
        assert_eq!(boolean_or(&q(1), &q(2)).evaluate(&[1, 1]).unwrap(), 1);
        assert_eq!(boolean_or(&q(1), &q(2)).evaluate(&[0, 0]).unwrap(), 0);
        assert_eq!(boolean_not(&q(1)).evaluate(&[1]).unwrap(), 0);
        assert!(matches!(xnor(3, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn evaluate_reports_missing_index() {
        let f = Pbf::monomial(&[1, 5], 2);
        assert_eq!(f.evaluate(&[1, 1, 1]), Err(Error::MissingVariable(5)));
    }

    #[test]
    fn substitute_constants_fixes_variables() {
        let f = Pbf::monomial(&[1, 2], 1).add(&q(3));
        let one: BTreeMap<_, _> = [(2, true)].into();
        let zero: BTreeMap<_, _> = [(2, false)].into();
        assert_eq!(f.substitute_constants(&one), q(1).add(&q(3)));
        assert_eq!(f.substitute_constants(&zero), q(3));
        let absent: BTreeMap<_, _> = [(9, true)].into();
        assert_eq!(f.substitute_constants(&absent), f);
    }

    #[test]
    fn relabel_and_degree() {
        let f = Pbf::monomial(&[1, 16], 3);
        let map: BTreeMap<_, _> = [(16, 8)].into();
        assert_eq!(f.relabel(&map).unwrap(), Pbf::monomial(&[1, 8], 3));
        let bad: BTreeMap<_, _> = [(16, 1)].into();
        assert!(matches!(f.relabel(&bad), Err(Error::NonInjective { .. })));
        assert_eq!(Pbf::constant(5).degree(), 0);
        let census = xnor(1, 2).unwrap().term_census();
        assert_eq!(census, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn json_order_is_cardinality_then_lex() {
        let f = Pbf::from_terms([
            (vec![2, 3], 1),
            (vec![4], 2),
            (vec![], 7),
            (vec![1, 5], -1),
            (vec![1], 1),
        ]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"[{"vars":[],"coeff":7},{"vars":[1],"coeff":1},{"vars":[4],"coeff":2},{"vars":[1,5],"coeff":-1},{"vars":[2,3],"coeff":1}]"#
        );
        let back: Pbf = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn display_is_readable() {
        let f = Pbf::from_terms([(vec![], 1), (vec![2], -1), (vec![1, 2, 3], 2)]);
        assert_eq!(f.to_string(), "1 - q2 + 2q1q2q3");
        assert_eq!(display_bits(0b0010, 4), "0010");
        assert_eq!(parse_bits("1100 0110").unwrap(), 0b1100_0110);
    }
}
