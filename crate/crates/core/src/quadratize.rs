//! Locality reduction to 2-local form with the AND penalty gadget.
//!
//! Each substitution `q_a q_b -> q~` introduces a fresh ancilla and adds
//! `delta (3 q~ + q_a q_b - 2 q_a q~ - 2 q_b q~)`, which vanishes exactly when
//! `q~ = q_a AND q_b` and is at least `delta` otherwise.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbf::{CompiledPbf, Monomial, PseudoBooleanFunction as Pbf, Var};

/// Largest original support for which `delta` and verification use full
/// enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// `delta (3 anc + a b - 2 a anc - 2 b anc)`.
pub fn and_gadget(a: Var, b: Var, anc: Var, delta: i64) -> Result<Pbf> {
    if a == b || a == anc || b == anc {
        return Err(Error::InvalidArgument(format!(
            "gadget variables must be distinct (got q{a}, q{b}, q{anc})"
        )));
    }
    if a == 0 || b == 0 || anc == 0 {
        return Err(Error::InvalidArgument(
            "variable indices are 1-based".into(),
        ));
    }
    Ok(Pbf::from_terms([
        (vec![anc], 3 * delta),
        (vec![a, b], delta),
        (vec![a, anc], -2 * delta),
        (vec![b, anc], -2 * delta),
    ]))
}

/// One ledger entry: `ancilla = a AND b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub a: Var,
    pub b: Var,
    pub ancilla: Var,
}

/// How substitution pairs are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SubstitutionOrder {
    /// Repeatedly replace the pair occurring in the most high-degree
    /// monomials; ties go to the lexicographically smallest pair.
    #[default]
    Greedy,
    /// Collapse each monomial's restriction to a variable block (a residue)
    /// into one ancilla, built up by increasing subset size. Anything still
    /// above degree 2 afterwards falls back to greedy.
    Blocks(Vec<Vec<Var>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratizationResult {
    pub reduced: Pbf,
    pub substitutions: Vec<Substitution>,
    pub delta: i64,
    pub original_vars: usize,
    pub total_vars: usize,
}

impl QuadratizationResult {
    pub fn num_ancillas(&self) -> usize {
        self.substitutions.len()
    }

    /// Extends an original assignment with the ancilla values the ledger
    /// implies.
    pub fn extend_consistent(&self, original: u64) -> u64 {
        let mut x = original;
        for s in &self.substitutions {
            let bit = (x >> (s.a - 1)) & (x >> (s.b - 1)) & 1;
            x |= bit << (s.ancilla - 1);
        }
        x
    }

    /// True when every ancilla in `x` equals its ledger AND.
    pub fn is_consistent(&self, x: u64) -> bool {
        self.extend_consistent(x & self.original_mask()) == x
    }

    fn original_mask(&self) -> u64 {
        if self.original_vars >= 64 {
            u64::MAX
        } else {
            (1u64 << self.original_vars) - 1
        }
    }
}

/// Greedy quadratization; `delta` defaults to a value that provably keeps
/// `min over ancillas` equal to the original function.
pub fn quadratize(f: &Pbf, delta: Option<i64>) -> Result<QuadratizationResult> {
    quadratize_with(f, delta, &SubstitutionOrder::Greedy)
}

pub fn quadratize_with(
    f: &Pbf,
    delta: Option<i64>,
    order: &SubstitutionOrder,
) -> Result<QuadratizationResult> {
    if let Some(d) = delta {
        if d <= 0 {
            return Err(Error::InvalidArgument(format!(
                "delta must be positive, got {d}"
            )));
        }
    }
    let original_vars = f.max_var() as usize;
    let mut state = Reducer {
        poly: f.clone(),
        next: original_vars as Var + 1,
        ledger: Vec::new(),
    };
    if let SubstitutionOrder::Blocks(blocks) = order {
        state.reduce_blocks(blocks)?;
    }
    state.reduce_greedy();

    let delta = match delta {
        Some(d) => d,
        None => default_delta(f, &state.poly, original_vars)?,
    };
    let mut reduced = state.poly;
    for s in &state.ledger {
        reduced.add_assign_ref(&and_gadget(s.a, s.b, s.ancilla, delta)?);
    }
    Ok(QuadratizationResult {
        reduced,
        total_vars: original_vars + state.ledger.len(),
        substitutions: state.ledger,
        delta,
        original_vars,
    })
}

/// `max(1 + max|f|, 1 + T)` where `T` sums the absolute coefficients of the
/// substituted monomials that mention an ancilla. Any inconsistent ancilla
/// assignment can lower those monomials by at most `T` while paying at least
/// `delta` in some gadget.
fn default_delta(f: &Pbf, substituted: &Pbf, original_vars: usize) -> Result<i64> {
    let max_abs = if original_vars <= EXHAUSTIVE_LIMIT {
        let c = f.compile()?;
        (0..1u64 << original_vars)
            .into_par_iter()
            .map(|x| c.eval(x).abs())
            .max()
            .unwrap_or(0)
    } else {
        f.l1_norm()
    };
    let touched: i64 = substituted
        .terms()
        .filter(|(m, _)| m.vars().last().is_some_and(|&v| v as usize > original_vars))
        .map(|(_, c)| c.abs())
        .sum();
    Ok(1 + max_abs.max(touched))
}

struct Reducer {
    poly: Pbf,
    next: Var,
    ledger: Vec<Substitution>,
}

impl Reducer {
    fn fresh(&mut self, a: Var, b: Var) -> Var {
        let ancilla = self.next;
        self.next += 1;
        self.ledger.push(Substitution { a, b, ancilla });
        ancilla
    }

    fn reduce_greedy(&mut self) {
        loop {
            let mut counts: HashMap<(Var, Var), usize> = HashMap::new();
            for (m, _) in self.poly.terms().filter(|(m, _)| m.degree() > 2) {
                let v = m.vars();
                for x in 0..v.len() {
                    for y in x + 1..v.len() {
                        *counts.entry((v[x], v[y])).or_insert(0) += 1;
                    }
                }
            }
            let Some((&(a, b), _)) = counts
                .iter()
                .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
            else {
                return;
            };
            let anc = self.fresh(a, b);
            let mut out = Pbf::zero();
            for (m, c) in self.poly.terms() {
                if m.degree() > 2 && m.contains(a) && m.contains(b) {
                    let mut vars: Vec<Var> = m
                        .vars()
                        .iter()
                        .copied()
                        .filter(|&v| v != a && v != b)
                        .collect();
                    vars.push(anc);
                    out.add_term(Monomial::new(vars), c);
                } else {
                    out.add_term(m.clone(), c);
                }
            }
            self.poly = out;
        }
    }

    fn reduce_blocks(&mut self, blocks: &[Vec<Var>]) -> Result<()> {
        let mut block_of: HashMap<Var, usize> = HashMap::new();
        for (idx, block) in blocks.iter().enumerate() {
            for &v in block {
                if block_of.insert(v, idx).is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "q{v} appears in more than one block"
                    )));
                }
            }
        }
        let split = |m: &Monomial| -> Vec<Vec<Var>> {
            let mut groups: BTreeMap<(usize, Var), Vec<Var>> = BTreeMap::new();
            for &v in m.vars() {
                let key = match block_of.get(&v) {
                    Some(&b) => (b, 0),
                    None => (usize::MAX, v),
                };
                groups.entry(key).or_default().push(v);
            }
            groups.into_values().collect()
        };

        // Every block-restricted part of a high-degree monomial, plus its
        // prefixes, gets an ancilla.
        let mut needed: BTreeSet<(usize, usize, Vec<Var>)> = BTreeSet::new();
        for (m, _) in self.poly.terms().filter(|(m, _)| m.degree() > 2) {
            for part in split(m) {
                for len in 2..=part.len() {
                    let prefix = part[..len].to_vec();
                    needed.insert((block_of[&prefix[0]], len, prefix));
                }
            }
        }
        let mut rep: HashMap<Vec<Var>, Var> = HashMap::new();
        for (_, _, subset) in needed {
            let head = &subset[..subset.len() - 1];
            let a = if head.len() == 1 { head[0] } else { rep[head] };
            let anc = self.fresh(a, *subset.last().expect("len >= 2"));
            rep.insert(subset, anc);
        }

        let mut out = Pbf::zero();
        for (m, c) in self.poly.terms() {
            if m.degree() <= 2 {
                out.add_term(m.clone(), c);
                continue;
            }
            let vars = split(m)
                .into_iter()
                .map(|part| if part.len() == 1 { part[0] } else { rep[&part] })
                .collect();
            out.add_term(Monomial::new(vars), c);
        }
        self.poly = out;
        Ok(())
    }
}

/// Which property a counterexample violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Check {
    /// Reduced value at the consistent extension differs from `f`.
    Consistent,
    /// Some inconsistent ancilla assignment scores at or below `f`.
    Penalty,
    /// Value multisets differ.
    Multiset,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: Check,
    /// Extended assignment, bit `i - 1` = `q_i`.
    pub assignment: u64,
    pub expected: i64,
    pub actual: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Original assignments were enumerated (otherwise sampled).
    pub exhaustive_original: bool,
    /// All ancilla assignments were enumerated (otherwise sampled).
    pub exhaustive_ancillas: bool,
    pub assignments_checked: u64,
    pub consistent_match: bool,
    pub penalties_hold: bool,
    pub multiset_match: bool,
    pub max_original: i64,
    pub min_original: i64,
    /// Lowest reduced value over inconsistent assignments that were visited.
    pub min_penalized: Option<i64>,
    /// Whether every penalized value lies above `max f`, so the lowest
    /// `2^n` levels are exactly the original spectrum.
    pub low_spectrum_preserved: Option<bool>,
    pub counterexample: Option<Counterexample>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.consistent_match && self.penalties_hold && self.multiset_match
    }
}

const SAMPLED_ORIGINALS: u64 = 4096;
const SAMPLED_ANCILLAS: usize = 32;

struct PointOutcome {
    original_value: i64,
    consistent_value: i64,
    consistent_bad: Option<Counterexample>,
    penalty_bad: Option<Counterexample>,
    min_penalized: Option<i64>,
    checked: u64,
}

/// Checks a reduction against the original function.
///
/// (a) the consistent extension reproduces `f`; (b) every inconsistent
/// ancilla assignment scores strictly above `f` at the same original bits;
/// (c) the consistent values form the same multiset as `f`'s values.
pub fn verify_reduction(f: &Pbf, result: &QuadratizationResult) -> Result<VerificationReport> {
    if result.total_vars > 64 {
        return Err(Error::TooManyVariables {
            count: result.total_vars,
            limit: 64,
        });
    }
    let n = result.original_vars;
    let anc = result.num_ancillas();
    let original = f.compile()?;
    let reduced = result.reduced.compile()?;
    let exhaustive_original = n <= EXHAUSTIVE_LIMIT;
    let exhaustive_ancillas = exhaustive_original && n + anc <= EXHAUSTIVE_LIMIT;

    let originals: Vec<u64> = if exhaustive_original {
        (0..1u64 << n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mask = result.original_mask();
        (0..SAMPLED_ORIGINALS)
            .map(|_| rng.gen::<u64>() & mask)
            .collect()
    };

    let outcomes: Vec<PointOutcome> = originals
        .par_iter()
        .map(|&x| {
            let expected = original.eval(x);
            let ext = result.extend_consistent(x);
            let got = reduced.eval(ext);
            let consistent_bad = (got != expected).then_some(Counterexample {
                check: Check::Consistent,
                assignment: ext,
                expected,
                actual: got,
            });
            let mut penalty_bad = None;
            let mut min_penalized: Option<i64> = None;
            let mut checked = 1u64;
            let mut visit = |y: u64| {
                if y == ext {
                    return;
                }
                checked += 1;
                let v = reduced.eval(y);
                min_penalized = Some(min_penalized.map_or(v, |m| m.min(v)));
                if v <= expected && penalty_bad.is_none() {
                    penalty_bad = Some(Counterexample {
                        check: Check::Penalty,
                        assignment: y,
                        expected,
                        actual: v,
                    });
                }
            };
            if exhaustive_ancillas {
                for a in 0..1u64 << anc {
                    visit(x | a << n);
                }
            } else {
                for k in 0..anc {
                    visit(ext ^ 1 << (n + k));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(x ^ 0xa11c);
                let anc_mask = if anc >= 64 {
                    u64::MAX
                } else {
                    (1u64 << anc) - 1
                };
                for _ in 0..SAMPLED_ANCILLAS {
                    visit(x | (rng.gen::<u64>() & anc_mask) << n);
                }
            }
            PointOutcome {
                original_value: expected,
                consistent_value: got,
                consistent_bad,
                penalty_bad,
                min_penalized,
                checked,
            }
        })
        .collect();

    let max_original = outcomes.iter().map(|o| o.original_value).max().unwrap_or(0);
    let min_original = outcomes.iter().map(|o| o.original_value).min().unwrap_or(0);
    let min_penalized = outcomes.iter().filter_map(|o| o.min_penalized).min();
    let consistent_bad = outcomes.iter().find_map(|o| o.consistent_bad.clone());
    let penalty_bad = outcomes.iter().find_map(|o| o.penalty_bad.clone());

    let mut lhs: Vec<i64> = outcomes.iter().map(|o| o.original_value).collect();
    let mut rhs: Vec<i64> = outcomes.iter().map(|o| o.consistent_value).collect();
    lhs.sort_unstable();
    rhs.sort_unstable();
    let multiset_bad = lhs
        .iter()
        .zip(&rhs)
        .position(|(a, b)| a != b)
        .map(|k| Counterexample {
            check: Check::Multiset,
            assignment: 0,
            expected: lhs[k],
            actual: rhs[k],
        });

    Ok(VerificationReport {
        exhaustive_original,
        exhaustive_ancillas,
        assignments_checked: outcomes.iter().map(|o| o.checked).sum(),
        consistent_match: consistent_bad.is_none(),
        penalties_hold: penalty_bad.is_none(),
        multiset_match: multiset_bad.is_none(),
        max_original,
        min_original,
        min_penalized,
        low_spectrum_preserved: min_penalized.map(|m| m > max_original),
        counterexample: consistent_bad.or(penalty_bad).or(multiset_bad),
    })
}

/// Minimum of `reduced` over all ancilla assignments, per original
/// assignment. Exhaustive; intended for small ancilla counts.
pub fn min_over_ancillas(result: &QuadratizationResult, original: u64) -> Result<i64> {
    let anc = result.num_ancillas();
    if anc > EXHAUSTIVE_LIMIT || result.total_vars > 64 {
        return Err(Error::TooManyVariables {
            count: anc,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let c: CompiledPbf = result.reduced.compile()?;
    let n = result.original_vars;
    Ok((0..1u64 << anc)
        .map(|a| c.eval(original | a << n))
        .min()
        .expect("at least one assignment"))
}

pub(crate) fn validate_protein_size(n: u64, d: u32) -> Result<()> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "N = {n} must be a power of two and at least 4"
        )));
    }
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidArgument(format!("D = {d} must be 2 or 3")));
    }
    Ok(())
}

/// Ancillas for the per-residue scheme: `(N-2)(N^D - D log2 N - 1)`.
pub fn count_ancillas_protein(n: u64, d: u32) -> Result<u64> {
    validate_protein_size(n, d)?;
    let bits = u64::from(d) * u64::from(n.trailing_zeros());
    Ok((n - 2) * (n.pow(d) - bits - 1))
}

/// Free plus ancilla qubits: `(N-2)(N^D - 1)`.
pub fn total_qubits_2local(n: u64, d: u32) -> Result<u64> {
    validate_protein_size(n, d)?;
    let bits = u64::from(d) * u64::from(n.trailing_zeros());
    Ok(count_ancillas_protein(n, d)? + (n - 2) * bits)
}
