//! Term and qubit accounting for protein Hamiltonians.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hamiltonian::{build_protein_default, ProteinHamiltonian};
use crate::lattice::LatticeInstance;
use crate::pbf::{Monomial, Var};
use crate::quadratize::{quadratize_with, validate_protein_size, SubstitutionOrder};

pub use crate::quadratize::{count_ancillas_protein, total_qubits_2local};

/// Monomials listed per deviating locality before truncation.
pub const MAX_LISTED: usize = 32;

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Predicted number of `k`-local terms for a chain of `n` residues in `d`
/// dimensions, for `k = 0 ..= 2 D log2 N`.
///
/// Each free residue owns `m = D log2 N` variables and every monomial spans
/// at most two residues, so the count is all subsets of one residue plus all
/// products of non-empty subsets from two distinct residues.
pub fn table1_counts(n: u64, d: u32) -> Result<BTreeMap<usize, u128>> {
    validate_protein_size(n, d)?;
    let m = u64::from(d) * u64::from(n.trailing_zeros());
    let free = n - 2;
    let pairs = binomial(free, 2);
    let mut out = BTreeMap::new();
    out.insert(0, 1);
    out.insert(1, u128::from(free * m));
    for k in 2..=m {
        let cross: u128 = (1..k).map(|i| binomial(m, i) * binomial(m, k - i)).sum();
        out.insert(
            k as usize,
            pairs * cross + u128::from(free) * binomial(m, k),
        );
    }
    for k in m + 1..=2 * m {
        let cross: u128 = (k - m..=m)
            .map(|i| binomial(m, i) * binomial(m, k - i))
            .sum();
        out.insert(k as usize, pairs * cross);
    }
    Ok(out)
}

/// Where the built Hamiltonian departs from the predicted count at one
/// locality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityDeviation {
    pub locality: usize,
    pub bound: u128,
    pub actual: u128,
    /// Present monomials touching more than two residues.
    pub offending: Vec<Vec<Var>>,
    /// Predicted monomials that cancelled out (first `MAX_LISTED`).
    pub missing: Vec<Vec<Var>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub sequence: String,
    pub dimension: usize,
    pub per_locality_bound: BTreeMap<usize, u128>,
    pub per_locality_actual: BTreeMap<usize, u128>,
    pub deviations: Vec<LocalityDeviation>,
    pub free_qubits: u64,
    pub ancilla_qubits: u64,
    pub total_qubits: u64,
    /// Ancillas actually introduced by the per-residue reduction of the
    /// built Hamiltonian.
    pub reduced_ancillas: u64,
}

impl ResourceReport {
    pub fn within_bound(&self) -> bool {
        self.per_locality_actual
            .iter()
            .all(|(k, &a)| a <= self.per_locality_bound.get(k).copied().unwrap_or(0))
    }

    pub fn exact(&self) -> bool {
        self.deviations.is_empty()
    }
}

/// Builds the protein Hamiltonian and compares its term census and qubit
/// cost against the closed forms.
pub fn resource_report(instance: &LatticeInstance) -> Result<ResourceReport> {
    let protein = build_protein_default(instance)?;
    report_for(&protein)
}

/// As [`resource_report`], for an already built Hamiltonian.
pub fn report_for(protein: &ProteinHamiltonian) -> Result<ResourceReport> {
    let inst = &protein.instance;
    let n = inst.len() as u64;
    let d = inst.dimension() as u32;
    let bound = table1_counts(n, d)?;
    let actual: BTreeMap<usize, u128> = protein
        .polynomial
        .term_census()
        .into_iter()
        .map(|(k, c)| (k, c as u128))
        .collect();

    let blocks = protein.residue_blocks();
    let owner: BTreeMap<Var, usize> = blocks
        .iter()
        .enumerate()
        .flat_map(|(r, b)| b.iter().map(move |&v| (v, r)))
        .collect();
    let span = |m: &Monomial| {
        m.vars()
            .iter()
            .filter_map(|v| owner.get(v))
            .collect::<BTreeSet<_>>()
            .len()
    };

    let mut deviations = Vec::new();
    let localities: BTreeSet<usize> = bound.keys().chain(actual.keys()).copied().collect();
    for k in localities {
        let b = bound.get(&k).copied().unwrap_or(0);
        let a = actual.get(&k).copied().unwrap_or(0);
        if a == b {
            continue;
        }
        let present: BTreeSet<&Monomial> = protein
            .polynomial
            .terms()
            .map(|(m, _)| m)
            .filter(|m| m.degree() == k)
            .collect();
        let offending = present
            .iter()
            .filter(|m| span(m) > 2)
            .take(MAX_LISTED)
            .map(|m| m.vars().to_vec())
            .collect();
        let missing = predicted_monomials(&blocks, k)
            .filter(|m| !present.contains(m))
            .take(MAX_LISTED)
            .map(|m| m.vars().to_vec())
            .collect();
        deviations.push(LocalityDeviation {
            locality: k,
            bound: b,
            actual: a,
            offending,
            missing,
        });
    }

    let reduced = quadratize_with(
        &protein.polynomial,
        None,
        &SubstitutionOrder::Blocks(blocks.clone()),
    )?;
    let free_qubits = protein.num_free_vars() as u64;
    let ancilla_qubits = count_ancillas_protein(n, d)?;
    Ok(ResourceReport {
        sequence: crate::lattice::sequence_string(inst.sequence()),
        dimension: inst.dimension(),
        per_locality_bound: bound,
        per_locality_actual: actual,
        deviations,
        free_qubits,
        ancilla_qubits,
        total_qubits: free_qubits + ancilla_qubits,
        reduced_ancillas: reduced.num_ancillas() as u64,
    })
}

/// Lazily lists every degree-`k` monomial spanning at most two blocks.
fn predicted_monomials(blocks: &[Vec<Var>], k: usize) -> impl Iterator<Item = Monomial> + '_ {
    let singles = blocks
        .iter()
        .flat_map(move |b| subsets(b, k).map(Monomial::new));
    let pairs = (0..blocks.len()).flat_map(move |r| {
        (r + 1..blocks.len()).flat_map(move |s| {
            (1..k).flat_map(move |i| {
                subsets(&blocks[r], i).flat_map(move |a| {
                    subsets(&blocks[s], k - i).map(move |b| {
                        let mut v = a.clone();
                        v.extend(b);
                        Monomial::new(v)
                    })
                })
            })
        })
    });
    singles.chain(pairs)
}

/// `k`-subsets of `items` in lexicographic order.
fn subsets(items: &[Var], k: usize) -> impl Iterator<Item = Vec<Var>> + '_ {
    let n = items.len();
    let mut idx: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let cur = idx.as_mut()?;
        let out = cur.iter().map(|&i| items[i]).collect();
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                idx = None;
                break;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        let t = table1_counts(4, 2).unwrap();
        assert_eq!(t[&0], 1);
        assert_eq!(t[&1], 8);
        for k in 0..=8 {
            assert_eq!(t[&k], binomial(8, k as u64), "k = {k}");
        }
        // 15 * 36 + 6 * 15
        assert_eq!(table1_counts(8, 2).unwrap()[&2], 630);
        assert!(table1_counts(6, 2).is_err());
        assert!(table1_counts(8, 4).is_err());
    }

    #[test]
    fn table_total_matches_two_residue_subsets() {
        // every monomial over at most two residues, including the empty one
        for (n, d) in [(4u64, 2u32), (8, 2), (8, 3), (16, 2)] {
            let m = u64::from(d) * u64::from(n.trailing_zeros());
            let free = n - 2;
            let one = (1u128 << m) - 1;
            let expect = 1 + u128::from(free) * one + binomial(free, 2) * one * one;
            assert_eq!(table1_counts(n, d).unwrap().values().sum::<u128>(), expect);
        }
    }

    #[test]
    fn total_grows_like_power_law() {
        for d in [2u32, 3] {
            let p = 2 * d + 2;
            let total = |n: u64| table1_counts(n, d).unwrap().values().sum::<u128>() as f64;
            // total / N^{2D+2} stays bounded and approaches 1/2
            let scaled: Vec<f64> = [4u64, 8, 16]
                .iter()
                .map(|&n| total(n) / (n as f64).powi(p as i32))
                .collect();
            assert!(
                scaled.iter().all(|&r| (0.05..=1.0).contains(&r)),
                "{scaled:?}"
            );
            let slope = (total(16) / total(8)).log2();
            assert!(
                (slope - f64::from(p)).abs() < 1.0,
                "slope {slope} for D = {d}"
            );
        }
    }

    #[test]
    fn subsets_enumerate_combinations() {
        let v = [1, 2, 3, 4];
        let all: Vec<_> = subsets(&v, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![1, 2]);
        assert_eq!(all[5], vec![3, 4]);
        assert_eq!(subsets(&v, 0).count(), 1);
        assert_eq!(subsets(&v, 5).count(), 0);
    }

    #[test]
    fn hpph_report() {
        let inst = LatticeInstance::parse("HPPH", 2).unwrap();
        let r = resource_report(&inst).unwrap();
        assert_eq!(r.free_qubits, 8);
        assert_eq!(r.total_qubits, 30);
        assert_eq!(r.ancilla_qubits, 22);
        assert!(r.within_bound());
        assert!(r.exact(), "{:?}", r.deviations);
        assert_eq!(r.reduced_ancillas, 22);
    }

    #[test]
    fn predicted_monomials_count_matches_table() {
        let blocks = vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]];
        for k in 2..=6 {
            let listed = predicted_monomials(&blocks, k).count() as u128;
            let m = 3u64;
            let cross: u128 = (1..k as u64)
                .filter(|&i| i <= m && k as u64 - i <= m)
                .map(|i| binomial(m, i) * binomial(m, k as u64 - i))
                .sum();
            assert_eq!(listed, 3 * cross + 3 * binomial(m, k as u64));
        }
    }
}
