//! Energy function of the HP lattice protein:
//! `H_protein = H_onsite + H_psc + H_pairwise`.
//!
//! * `H_onsite` charges `lambda0` for each pair of residues on the same site.
//! * `H_psc` charges `lambda1` per unit of squared distance beyond 1 between
//!   sequence neighbours. It is 2-local for every `N` and `D`.
//! * `H_pairwise` contributes `-1` per contact between non-consecutive H
//!   residues. Each direction term fires only when residue `i` sits on an even
//!   coordinate along the queried axis, so the double sum over ordered pairs
//!   counts every contact once.
//!
//! The general direction terms assume `log2 N >= 3`. For `N = 4` in 2D the
//! dedicated short forms are used; they coincide with the general ones after
//! simplification, which the tests check.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeInstance, Residue};
use crate::pbf::{boolean_not, xnor, xnor_of, PseudoBooleanFunction as Pbf, Var};

/// Symmetric 0/1 interaction matrix `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactMatrix {
    entries: Vec<Vec<u8>>,
}

impl ContactMatrix {
    /// `G_ij = 1` iff both residues are H and `|i - j| >= 2`.
    pub fn from_sequence(seq: &[Residue]) -> Self {
        let n = seq.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        u8::from(
                            i.abs_diff(j) >= 2
                                && seq[i].is_hydrophobic()
                                && seq[j].is_hydrophobic(),
                        )
                    })
                    .collect()
            })
            .collect();
        Self { entries }
    }

    /// Accepts any symmetric 0/1 matrix with zero diagonal and zero entries
    /// for sequence neighbours.
    pub fn from_entries(entries: Vec<Vec<u8>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &g) in row.iter().enumerate() {
                if g > 1 {
                    return Err(Error::InvalidArgument(format!(
                        "G[{i}][{j}] = {g} is not 0/1"
                    )));
                }
                if g != entries[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "G is not symmetric at ({i},{j})"
                    )));
                }
                if g == 1 && i.abs_diff(j) < 2 {
                    return Err(Error::InvalidArgument(format!(
                        "G[{i}][{j}] couples sequence neighbours or a residue with itself"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry for 1-based residues `i`, `j`.
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i - 1][j - 1]
    }

    /// Unordered pairs `(i, j)`, `i < j`, with `G_ij = 1`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j) == 1)
            .collect()
    }

    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }
}

/// Onsite and chain-connectivity penalties, `lambda0 > lambda1 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub lambda0: i64,
    pub lambda1: i64,
}

impl PenaltyWeights {
    pub fn new(lambda0: i64, lambda1: i64) -> Result<Self> {
        if !(lambda0 > lambda1 && lambda1 > 0) {
            return Err(Error::InvalidArgument(format!(
                "penalty weights must satisfy lambda0 > lambda1 > 0 (got {lambda0}, {lambda1})"
            )));
        }
        Ok(Self { lambda0, lambda1 })
    }

    /// `lambda1 = N`, `lambda0 = N + 1`.
    pub fn for_length(n: usize) -> Self {
        Self {
            lambda0: n as i64 + 1,
            lambda1: n as i64,
        }
    }
}

fn q(v: Var) -> Pbf {
    Pbf::var(v)
}

fn eq(a: Var, b: Var) -> Pbf {
    xnor(a, b).expect("distinct residues use disjoint variables")
}

/// Product of xnors over every bit of axis `k` for residues `i`, `j`.
fn same_axis(inst: &LatticeInstance, i: usize, j: usize, k: usize) -> Pbf {
    let factors: Vec<Pbf> = (1..=inst.bits_per_axis())
        .map(|r| eq(inst.var(i, k, r), inst.var(j, k, r)))
        .collect();
    Pbf::product(&factors)
}

/// 1 iff residues `i` and `j` occupy the same site.
pub fn onsite_pair(inst: &LatticeInstance, i: usize, j: usize) -> Pbf {
    let factors: Vec<Pbf> = (1..=inst.dimension())
        .map(|k| same_axis(inst, i, j, k))
        .collect();
    Pbf::product(&factors)
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect()
}

fn onsite_over(inst: &LatticeInstance, weights: PenaltyWeights, pairs: Vec<(usize, usize)>) -> Pbf {
    let total = pairs
        .into_par_iter()
        .map(|(i, j)| onsite_pair(inst, i, j))
        .reduce(Pbf::zero, |a, b| a.add(&b));
    total.scale(weights.lambda0)
}

/// `lambda0` times the number of coinciding residue pairs.
pub fn build_onsite(inst: &LatticeInstance, weights: PenaltyWeights) -> Pbf {
    onsite_over(inst, weights, all_pairs(inst.len()))
}

/// Onsite term without the fixed pair, with the fixed bits substituted.
pub fn build_onsite_with_fixed(inst: &LatticeInstance, weights: PenaltyWeights) -> Pbf {
    onsite_over(inst, weights, onsite_pairs_with_fixed(inst))
        .substitute_constants(&inst.fixed_bindings().bindings)
}

/// Pairs kept by the onsite term once the middle residues are pinned.
pub fn onsite_pairs_with_fixed(inst: &LatticeInstance) -> Vec<(usize, usize)> {
    let fixed = inst.fixed_residues();
    all_pairs(inst.len())
        .into_iter()
        .filter(|&p| p != fixed)
        .collect()
}

/// Squared Euclidean distance between residues `p` and `q`; at most 2-local.
pub fn distance_squared(inst: &LatticeInstance, p: usize, other: usize) -> Result<Pbf> {
    if p == other {
        return Err(Error::InvalidArgument(format!(
            "distance of residue {p} to itself"
        )));
    }
    inst.f_pointer(p, 1)?;
    inst.f_pointer(other, 1)?;
    let mut total = Pbf::zero();
    for k in 1..=inst.dimension() {
        let mut diff = Pbf::zero();
        for r in 1..=inst.bits_per_axis() {
            let w = 1i64 << (r - 1);
            diff.add_assign_ref(&q(inst.var(p, k, r)).scale(w));
            diff.add_assign_ref(&q(inst.var(other, k, r)).scale(-w));
        }
        total.add_assign_ref(&diff.mul(&diff));
    }
    Ok(total)
}

/// `lambda1 (-(N - 1) + sum_m d^2_{m,m+1})`, before fixing.
pub fn build_psc(inst: &LatticeInstance, weights: PenaltyWeights) -> Pbf {
    let mut total = Pbf::constant(-(inst.len() as i64 - 1));
    for m in 1..inst.len() {
        total.add_assign_ref(&distance_squared(inst, m, m + 1).expect("consecutive residues"));
    }
    total.scale(weights.lambda1)
}

/// Bits `z_1 ..= z_{n+1}` of `x + 1` for an `n`-bit input given LSB first.
///
/// Exact for odd `x` (`x_1 = 1`); for even inputs `z_1` is still 0, which the
/// callers exclude by gating on `x_1`.
pub fn build_adder_increment(bits: &[Var]) -> Result<Vec<Pbf>> {
    if bits.is_empty() {
        return Err(Error::InvalidArgument(
            "adder needs at least one bit".into(),
        ));
    }
    let x: Vec<Pbf> = bits.iter().map(|&v| q(v)).collect();
    Ok(increment_bits(&x))
}

/// Adder recursion over arbitrary bit polynomials `x[0] = x_1, ...`.
fn increment_bits(x: &[Pbf]) -> Vec<Pbf> {
    let n = x.len();
    // carry[k] = prod_{u=2}^{k} x_u, with carry[1] = 1
    let mut carry = vec![Pbf::constant(1); n + 1];
    for k in 2..=n {
        carry[k] = carry[k - 1].mul(&x[k - 1]);
    }
    let mut z = Vec::with_capacity(n + 1);
    z.push(Pbf::zero());
    if n >= 2 {
        z.push(boolean_not(&x[1]));
    }
    for k in 3..=n {
        z.push(x[k - 1].add(&carry[k - 1]).sub(&carry[k].scale(2)));
    }
    z.push(carry[n].clone());
    z
}

/// Other-axis equality factors shared by all direction terms.
fn other_axes_equal(inst: &LatticeInstance, i: usize, j: usize, axis: usize) -> Pbf {
    let factors: Vec<Pbf> = (1..=inst.dimension())
        .filter(|&k| k != axis)
        .map(|k| same_axis(inst, i, j, k))
        .collect();
    Pbf::product(&factors)
}

/// 1 iff `i` is even on `axis` and `j` sits one step in the positive
/// direction with all other coordinates equal.
pub fn direction_plus(inst: &LatticeInstance, i: usize, j: usize, axis: usize) -> Pbf {
    let m = inst.bits_per_axis();
    let mut factors = vec![
        boolean_not(&q(inst.var(i, axis, 1))),
        q(inst.var(j, axis, 1)),
    ];
    for s in 2..=m {
        factors.push(eq(inst.var(j, axis, s), inst.var(i, axis, s)));
    }
    factors.push(other_axes_equal(inst, i, j, axis));
    Pbf::product(&factors)
}

/// 1 iff `i` is even and nonzero on `axis` and `j` sits one step in the
/// negative direction: `j + 1` (via the adder recursion) must equal `i`.
pub fn direction_minus(inst: &LatticeInstance, i: usize, j: usize, axis: usize) -> Pbf {
    let m = inst.bits_per_axis();
    let xi = |r: usize| q(inst.var(i, axis, r));
    let xj: Vec<Pbf> = (1..=m).map(|r| q(inst.var(j, axis, r))).collect();
    let z = increment_bits(&xj);

    let i_zero: Vec<Pbf> = (1..=m).map(|r| boolean_not(&xi(r))).collect();
    let mut factors = vec![
        boolean_not(&xi(1)),
        xj[0].clone(),
        boolean_not(&Pbf::product(&i_zero)),
    ];
    for r in 2..=m {
        factors.push(xnor_of(&z[r - 1], &xi(r)));
    }
    factors.push(other_axes_equal(inst, i, j, axis));
    Pbf::product(&factors)
}

/// `N = 4`, 2D short forms.
fn direction_plus_n4(inst: &LatticeInstance, i: usize, j: usize, axis: usize) -> Pbf {
    let other = 3 - axis;
    let factors = [
        boolean_not(&q(inst.var(i, axis, 1))),
        q(inst.var(j, axis, 1)),
        eq(inst.var(j, axis, 2), inst.var(i, axis, 2)),
        same_axis(inst, i, j, other),
    ];
    Pbf::product(&factors)
}

fn direction_minus_n4(inst: &LatticeInstance, i: usize, j: usize, axis: usize) -> Pbf {
    let other = 3 - axis;
    let (a, b) = (inst.var(j, axis, 2), inst.var(i, axis, 2));
    let xor = q(a).add(&q(b)).sub(&Pbf::monomial(&[a, b], 2));
    let factors = [
        boolean_not(&q(inst.var(i, axis, 1))),
        q(inst.var(j, axis, 1)),
        q(inst.var(i, axis, 2)),
        xor,
        same_axis(inst, i, j, other),
    ];
    Pbf::product(&factors)
}

/// `H^{ij}_pairwise`: 1 iff `j` is adjacent to `i` and `i` is the residue on
/// the even coordinate of the shared axis.
pub fn pairwise_ij(inst: &LatticeInstance, i: usize, j: usize) -> Pbf {
    let short = inst.len() == 4 && inst.dimension() == 2;
    let mut total = Pbf::zero();
    for axis in 1..=inst.dimension() {
        if short {
            total.add_assign_ref(&direction_plus_n4(inst, i, j, axis));
            total.add_assign_ref(&direction_minus_n4(inst, i, j, axis));
        } else {
            total.add_assign_ref(&direction_plus(inst, i, j, axis));
            total.add_assign_ref(&direction_minus(inst, i, j, axis));
        }
    }
    total
}

/// `-sum_{i,j} G_ij H^{ij}_pairwise`.
pub fn build_pairwise(inst: &LatticeInstance, contacts: &ContactMatrix) -> Result<Pbf> {
    if contacts.len() != inst.len() {
        return Err(Error::LengthMismatch {
            expected: inst.len(),
            actual: contacts.len(),
        });
    }
    let ordered: Vec<(usize, usize)> = contacts
        .pairs()
        .into_iter()
        .flat_map(|(i, j)| [(i, j), (j, i)])
        .collect();
    let total = ordered
        .into_par_iter()
        .map(|(i, j)| pairwise_ij(inst, i, j))
        .reduce(Pbf::zero, |a, b| a.add(&b));
    Ok(total.scale(-1))
}

/// The assembled protein Hamiltonian over the free variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ProteinHamiltonian {
    pub instance: LatticeInstance,
    pub weights: PenaltyWeights,
    pub contacts: ContactMatrix,
    /// Polynomial over `q_1 ..= q_{free}`.
    pub polynomial: Pbf,
    /// `free_to_original[k]` is the original index of free variable `k + 1`.
    pub free_to_original: Vec<Var>,
    pub fixed_bindings: BTreeMap<Var, bool>,
}

impl ProteinHamiltonian {
    pub fn num_free_vars(&self) -> usize {
        self.free_to_original.len()
    }

    /// Full `N D log2 N` bit vector from a free-variable bitmask.
    pub fn full_bits(&self, free_mask: u64) -> Vec<u8> {
        let mut bits = vec![0u8; self.instance.total_vars()];
        for (&v, &b) in &self.fixed_bindings {
            bits[v as usize - 1] = b as u8;
        }
        for (k, &v) in self.free_to_original.iter().enumerate() {
            bits[v as usize - 1] = (free_mask >> k & 1) as u8;
        }
        bits
    }

    /// Projects a full bit vector onto the free variables.
    pub fn free_bits(&self, full: &[u8]) -> Result<Vec<u8>> {
        if full.len() != self.instance.total_vars() {
            return Err(Error::LengthMismatch {
                expected: self.instance.total_vars(),
                actual: full.len(),
            });
        }
        Ok(self
            .free_to_original
            .iter()
            .map(|&v| full[v as usize - 1])
            .collect())
    }

    /// Variable blocks (one per free residue) in the renumbered indices.
    pub fn residue_blocks(&self) -> Vec<Vec<Var>> {
        let per = self.instance.bits_per_residue();
        (0..self.instance.len() - 2)
            .map(|r| ((r * per + 1) as Var..=((r + 1) * per) as Var).collect())
            .collect()
    }
}

/// Builds `H_onsite + H_psc + H_pairwise`, pins the two middle residues and
/// renumbers the remaining variables contiguously in residue order.
pub fn build_protein(
    inst: &LatticeInstance,
    weights: PenaltyWeights,
    contacts: &ContactMatrix,
) -> Result<ProteinHamiltonian> {
    let weights = PenaltyWeights::new(weights.lambda0, weights.lambda1)?;
    let fixed = inst.fixed_bindings();

    let (onsite, (psc, pairwise)) = rayon::join(
        || onsite_over(inst, weights, onsite_pairs_with_fixed(inst)),
        || (build_psc(inst, weights), build_pairwise(inst, contacts)),
    );
    let raw = onsite.add(&psc).add(&pairwise?);
    let pinned = raw.substitute_constants(&fixed.bindings);

    let free_to_original: Vec<Var> = inst
        .free_residues()
        .into_iter()
        .flat_map(|i| inst.residue_vars(i))
        .collect();
    let mapping: BTreeMap<Var, Var> = free_to_original
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k as Var + 1))
        .collect();
    let polynomial = pinned.relabel(&mapping)?;

    Ok(ProteinHamiltonian {
        instance: inst.clone(),
        weights,
        contacts: contacts.clone(),
        polynomial,
        free_to_original,
        fixed_bindings: fixed.bindings,
    })
}

/// Builds with the default weights and the sequence's own contact matrix.
pub fn build_protein_default(inst: &LatticeInstance) -> Result<ProteinHamiltonian> {
    build_protein(
        inst,
        PenaltyWeights::for_length(inst.len()),
        &ContactMatrix::from_sequence(inst.sequence()),
    )
}
