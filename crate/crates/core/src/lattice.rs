//! Binary coordinate encoding of a lattice protein.
//!
//! Residue `i` (1-based) stores its coordinate on axis `k` (1-based, `k = 1`
//! is x) in the `log2 N` variables `f(i,k)+1 ..= f(i,k)+log2 N`, least
//! significant bit first, where `f(i,k) = D (i-1) log2 N + (k-1) log2 N`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbf::Var;

/// Lattice point, one integer per axis.
pub type Point = Vec<i32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Residue {
    H,
    P,
}

impl Residue {
    pub fn is_hydrophobic(self) -> bool {
        self == Residue::H
    }
}

/// Parses an `H`/`P` string (case-insensitive).
pub fn parse_sequence(s: &str) -> Result<Vec<Residue>> {
    s.trim()
        .chars()
        .map(|c| match c.to_ascii_uppercase() {
            'H' => Ok(Residue::H),
            'P' => Ok(Residue::P),
            other => Err(Error::InvalidArgument(format!(
                "residue {other:?} is neither H nor P"
            ))),
        })
        .collect()
}

pub fn sequence_string(seq: &[Residue]) -> String {
    seq.iter()
        .map(|r| match r {
            Residue::H => 'H',
            Residue::P => 'P',
        })
        .collect()
}

/// An HP sequence placed on an `N^D` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeInstance {
    sequence: Vec<Residue>,
    dimension: usize,
    bits_per_axis: usize,
}

impl LatticeInstance {
    /// `N` must be a power of two with `N >= 4`; `D` must be 2 or 3.
    pub fn new(sequence: Vec<Residue>, dimension: usize) -> Result<Self> {
        let n = sequence.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "sequence length {n} must be a power of two and at least 4"
            )));
        }
        if !(2..=3).contains(&dimension) {
            return Err(Error::InvalidArgument(format!(
                "dimension {dimension} must be 2 or 3"
            )));
        }
        Ok(Self {
            sequence,
            dimension,
            bits_per_axis: n.trailing_zeros() as usize,
        })
    }

    pub fn parse(sequence: &str, dimension: usize) -> Result<Self> {
        Self::new(parse_sequence(sequence)?, dimension)
    }

    pub fn sequence(&self) -> &[Residue] {
        &self.sequence
    }

    /// Number of residues `N`, also the grid side length.
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `log2 N`.
    pub fn bits_per_axis(&self) -> usize {
        self.bits_per_axis
    }

    /// Variables per residue, `D log2 N`.
    pub fn bits_per_residue(&self) -> usize {
        self.dimension * self.bits_per_axis
    }

    /// `N D log2 N`.
    pub fn total_vars(&self) -> usize {
        self.len() * self.bits_per_residue()
    }

    /// Variables left after fixing the two middle residues.
    pub fn free_vars(&self) -> usize {
        (self.len() - 2) * self.bits_per_residue()
    }

    /// Offset of residue `i`'s axis-`k` field.
    pub fn f_pointer(&self, i: usize, k: usize) -> Result<u32> {
        if i == 0 || i > self.len() {
            return Err(Error::OutOfRange {
                what: "residue index",
                value: i as i64,
                lo: 1,
                hi: self.len() as i64,
            });
        }
        if k == 0 || k > self.dimension {
            return Err(Error::OutOfRange {
                what: "axis index",
                value: k as i64,
                lo: 1,
                hi: self.dimension as i64,
            });
        }
        Ok(self.pointer(i, k))
    }

    #[inline]
    pub(crate) fn pointer(&self, i: usize, k: usize) -> u32 {
        (self.dimension * (i - 1) * self.bits_per_axis + (k - 1) * self.bits_per_axis) as u32
    }

    /// Variable `q_{f(i,k)+r}`: bit `r` (1 = least significant) of residue
    /// `i`'s axis-`k` coordinate. Indices are assumed in range.
    #[inline]
    pub fn var(&self, i: usize, k: usize, r: usize) -> Var {
        self.pointer(i, k) + r as Var
    }

    /// All variables of residue `i`, axis-major, least significant first.
    pub fn residue_vars(&self, i: usize) -> Vec<Var> {
        (1..=self.dimension)
            .flat_map(|k| (1..=self.bits_per_axis).map(move |r| self.var(i, k, r)))
            .collect()
    }

    /// Reads every residue's coordinates from `bits[v - 1] = q_v`.
    pub fn decode_coordinates(&self, bits: &[u8]) -> Result<Vec<Point>> {
        if bits.len() != self.total_vars() {
            return Err(Error::LengthMismatch {
                expected: self.total_vars(),
                actual: bits.len(),
            });
        }
        Ok((1..=self.len())
            .map(|i| {
                (1..=self.dimension)
                    .map(|k| {
                        (1..=self.bits_per_axis)
                            .map(|r| (bits[self.var(i, k, r) as usize - 1] as i32 & 1) << (r - 1))
                            .sum()
                    })
                    .collect()
            })
            .collect())
    }

    /// Inverse of [`decode_coordinates`](Self::decode_coordinates).
    pub fn encode_coordinates(&self, coords: &[Point]) -> Result<Vec<u8>> {
        if coords.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: coords.len(),
            });
        }
        let side = self.len() as i32;
        let mut bits = vec![0u8; self.total_vars()];
        for (idx, p) in coords.iter().enumerate() {
            if p.len() != self.dimension {
                return Err(Error::LengthMismatch {
                    expected: self.dimension,
                    actual: p.len(),
                });
            }
            for (axis, &c) in p.iter().enumerate() {
                if !(0..side).contains(&c) {
                    return Err(Error::OutOfRange {
                        what: "coordinate",
                        value: c as i64,
                        lo: 0,
                        hi: side as i64 - 1,
                    });
                }
                for r in 1..=self.bits_per_axis {
                    bits[self.var(idx + 1, axis + 1, r) as usize - 1] = (c >> (r - 1) & 1) as u8;
                }
            }
        }
        Ok(bits)
    }

    /// Indices `(N/2, N/2 + 1)` of the two residues pinned to the centre.
    pub fn fixed_residues(&self) -> (usize, usize) {
        (self.len() / 2, self.len() / 2 + 1)
    }

    /// Residues whose coordinates stay free, in sequence order.
    pub fn free_residues(&self) -> Vec<usize> {
        let (a, b) = self.fixed_residues();
        (1..=self.len()).filter(|&i| i != a && i != b).collect()
    }

    /// Sites of the two fixed residues. Residue `N/2` sits on the `(N/2)`-th
    /// grid point (coordinate `N/2 - 1`) of every axis; residue `N/2 + 1` is
    /// one step further along x.
    pub fn fixed_sites(&self) -> (Point, Point) {
        let centre = self.len() as i32 / 2 - 1;
        let first = vec![centre; self.dimension];
        let mut second = first.clone();
        second[0] += 1;
        (first, second)
    }

    pub fn fixed_bindings(&self) -> FixedResidueBinding {
        let (a, b) = self.fixed_residues();
        let (pa, pb) = self.fixed_sites();
        let mut bindings = BTreeMap::new();
        for (i, p) in [(a, &pa), (b, &pb)] {
            for (axis, &c) in p.iter().enumerate() {
                for r in 1..=self.bits_per_axis {
                    bindings.insert(self.var(i, axis + 1, r), c >> (r - 1) & 1 == 1);
                }
            }
        }
        FixedResidueBinding {
            residues: (a, b),
            sites: (pa, pb),
            bindings,
        }
    }

    /// Per-residue, per-axis variable ranges.
    pub fn layout(&self) -> Vec<AxisField> {
        (1..=self.len())
            .flat_map(|i| {
                (1..=self.dimension).map(move |k| AxisField {
                    residue: i,
                    axis: k,
                    vars: (1..=self.bits_per_axis)
                        .map(|r| self.var(i, k, r))
                        .collect(),
                })
            })
            .collect()
    }
}

/// Variables encoding one coordinate of one residue, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisField {
    pub residue: usize,
    pub axis: usize,
    pub vars: Vec<Var>,
}

/// Constant bits pinning residues `N/2` and `N/2 + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedResidueBinding {
    pub residues: (usize, usize),
    pub sites: (Point, Point),
    pub bindings: BTreeMap<Var, bool>,
}

impl FixedResidueBinding {
    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

/// Instance file: `{"sequence": "HPPH", "dimension": 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub sequence: String,
    pub dimension: usize,
}

impl InstanceSpec {
    pub fn instance(&self) -> Result<LatticeInstance> {
        LatticeInstance::parse(&self.sequence, self.dimension)
    }
}

impl FromStr for LatticeInstance {
    type Err = Error;

    /// `"HPPH"` (2D) or `"HPPH/3"`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            Some((seq, d)) => {
                let d = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad dimension in {s:?}")))?;
                Self::parse(seq, d)
            }
            None => Self::parse(s, 2),
        }
    }
}

impl fmt::Display for LatticeInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", sequence_string(&self.sequence), self.dimension)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbf::{mask_to_bits, parse_bits};
    use proptest::prelude::*;

    fn hpph() -> LatticeInstance {
        LatticeInstance::parse("HPPH", 2).unwrap()
    }

    #[test]
    fn pointer_values() {
        let inst = hpph();
        assert_eq!(inst.f_pointer(3, 2).unwrap(), 10);
        assert_eq!(inst.f_pointer(1, 1).unwrap(), 0);
        let big = LatticeInstance::parse("HPPHHPPH", 3).unwrap();
        assert_eq!(big.f_pointer(2, 3).unwrap(), 15);
        assert!(inst.f_pointer(5, 1).is_err());
        assert!(inst.f_pointer(1, 3).is_err());
        assert!(inst.f_pointer(0, 1).is_err());
    }

    #[test]
    fn rejects_bad_lengths_and_dimensions() {
        assert!(LatticeInstance::parse("HPH", 2).is_err());
        assert!(LatticeInstance::parse("HPPHHP", 2).is_err());
        assert!(LatticeInstance::parse("HP", 2).is_err());
        assert!(LatticeInstance::parse("HPPH", 4).is_err());
        assert!(LatticeInstance::parse("HPXH", 2).is_err());
        assert_eq!(hpph().total_vars(), 16);
    }

    #[test]
    fn decodes_invalid_example_configuration() {
        // q16..q1 = 1100 0110 0101 1011
        let inst = hpph();
        let bits = mask_to_bits(parse_bits("1100 0110 0101 1011").unwrap(), 16);
        let coords = inst.decode_coordinates(&bits).unwrap();
        assert_eq!(coords, vec![vec![3, 2], vec![1, 1], vec![2, 1], vec![0, 3]]);
        assert_eq!(inst.encode_coordinates(&coords).unwrap(), bits);
    }

    #[test]
    fn all_zero_decodes_to_origin() {
        let inst = hpph();
        let coords = inst.decode_coordinates(&[0; 16]).unwrap();
        assert!(coords.iter().all(|p| p == &vec![0, 0]));
        assert!(matches!(
            inst.decode_coordinates(&[0; 15]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn fixed_bindings_match_centre_convention() {
        let inst = hpph();
        let fixed = inst.fixed_bindings();
        assert_eq!(fixed.len(), 8);
        assert_eq!(fixed.sites, (vec![1, 1], vec![2, 1]));
        // q12..q5 = 0110 0101
        let expected = parse_bits("0110 0101").unwrap();
        for v in 5..=12u32 {
            assert_eq!(fixed.bindings[&v], expected >> (v - 5) & 1 == 1, "q{v}");
        }

        let eight = LatticeInstance::parse("HPPHHPPH", 2).unwrap();
        let fixed = eight.fixed_bindings();
        assert_eq!(fixed.residues, (4, 5));
        assert_eq!(fixed.sites, (vec![3, 3], vec![4, 3]));
        assert_eq!(fixed.len(), 2 * 2 * 3);
        assert_eq!(eight.free_vars(), 6 * 2 * 3);
    }

    #[test]
    fn layout_lists_every_field() {
        let inst = hpph();
        let layout = inst.layout();
        assert_eq!(layout.len(), 8);
        assert_eq!(layout[5].residue, 3);
        assert_eq!(layout[5].axis, 2);
        assert_eq!(layout[5].vars, vec![11, 12]);
        assert_eq!(inst.residue_vars(4), vec![13, 14, 15, 16]);
        assert_eq!("HPPH/3".parse::<LatticeInstance>().unwrap().dimension(), 3);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(bits in proptest::collection::vec(0u8..2, 72)) {
            let inst = LatticeInstance::parse("HPPHHPPH", 3).unwrap();
            let coords = inst.decode_coordinates(&bits).unwrap();
            prop_assert_eq!(inst.encode_coordinates(&coords).unwrap(), bits);
        }

        #[test]
        fn decode_encode_round_trip(coords in proptest::collection::vec(
            proptest::collection::vec(0i32..8, 2), 8)) {
            let inst = LatticeInstance::parse("HHHHHHHH", 2).unwrap();
            let bits = inst.encode_coordinates(&coords).unwrap();
            prop_assert_eq!(inst.decode_coordinates(&bits).unwrap(), coords);
        }
    }
}
