//! Ground truth that shares no code with the Hamiltonian builders:
//! exhaustive minimization, direct HP energies and self-avoiding-walk
//! enumeration.

use std::collections::HashSet;
use std::sync::atomic::{AtomicI64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::ProteinHamiltonian;
use crate::lattice::{Point, Residue};
use crate::pbf::PseudoBooleanFunction as Pbf;

pub const BRUTE_FORCE_LIMIT: usize = 24;
/// Longest chain enumerated without the long-run flag.
pub const DEFAULT_GUARD: usize = 16;
pub const LONG_RUN_GUARD: usize = 24;
/// Longest chain the unreduced, unpruned recount accepts.
pub const UNPRUNED_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceMinimum {
    pub value: i64,
    pub n_vars: usize,
    /// Every minimizing assignment, ascending; bit `i - 1` is `q_i`.
    pub minimizers: Vec<u64>,
}

/// Exact minimum over all `2^n` assignments, `n` the highest variable index.
pub fn brute_force_minimum(f: &Pbf) -> Result<BruteForceMinimum> {
    let n = f.max_var() as usize;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyVariables {
            count: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let c = f.compile()?;
    const CHUNK: u64 = 1 << 12;
    let total = 1u64 << n;
    let chunks = total.div_ceil(CHUNK);
    let (value, minimizers) = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut best = i64::MAX;
            let mut args = Vec::new();
            for x in k * CHUNK..((k + 1) * CHUNK).min(total) {
                let v = c.eval(x);
                if v < best {
                    best = v;
                    args.clear();
                }
                if v == best {
                    args.push(x);
                }
            }
            (best, args)
        })
        .reduce(
            || (i64::MAX, Vec::new()),
            |a, b| match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    let (v, mut xs) = a;
                    xs.extend(b.1);
                    (v, xs)
                }
            },
        );
    Ok(BruteForceMinimum {
        value,
        n_vars: n,
        minimizers,
    })
}

/// Lattice coordinates of a chain, one point per residue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conformation {
    pub coordinates: Vec<Point>,
}

impl Conformation {
    pub fn new(coordinates: Vec<Point>) -> Self {
        Self { coordinates }
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    /// Checks unit steps, a common dimension and self-avoidance.
    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.coordinates.first() else {
            return Ok(());
        };
        let d = first.len();
        if let Some(p) = self.coordinates.iter().find(|p| p.len() != d) {
            return Err(Error::InvalidConformation(format!(
                "mixed dimensions {d} and {}",
                p.len()
            )));
        }
        for (k, w) in self.coordinates.windows(2).enumerate() {
            if manhattan(&w[0], &w[1]) != 1 {
                return Err(Error::InvalidConformation(format!(
                    "residues {} and {} are not lattice neighbours",
                    k + 1,
                    k + 2
                )));
            }
        }
        let mut seen = HashSet::new();
        for (k, p) in self.coordinates.iter().enumerate() {
            if !seen.insert(p) {
                return Err(Error::InvalidConformation(format!(
                    "residue {} revisits {:?}",
                    k + 1,
                    p
                )));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

fn manhattan(a: &[i32], b: &[i32]) -> i32 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `-(number of non-consecutive H-H lattice contacts)`.
pub fn hp_energy(conf: &Conformation, sequence: &[Residue]) -> Result<i64> {
    if conf.len() != sequence.len() {
        return Err(Error::LengthMismatch {
            expected: sequence.len(),
            actual: conf.len(),
        });
    }
    conf.validate()?;
    let c = &conf.coordinates;
    let mut contacts = 0;
    for i in 0..c.len() {
        for j in i + 2..c.len() {
            if sequence[i].is_hydrophobic()
                && sequence[j].is_hydrophobic()
                && manhattan(&c[i], &c[j]) == 1
            {
                contacts += 1;
            }
        }
    }
    Ok(-contacts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NativeResult {
    pub min_energy: i64,
    /// Number of minimizing walks, with residue 1 at the origin (all
    /// lattice symmetries counted).
    pub degeneracy: u64,
    pub witness: Conformation,
}

/// Exact HP ground state by depth-first self-avoiding-walk enumeration.
///
/// The first step is fixed to `+x` and the first step off the x axis to
/// `+y`; counts are scaled back by the size of the symmetry orbit. Branches
/// whose optimistic contact bound cannot reach the best energy seen so far
/// are cut.
pub fn enumerate_native(
    sequence: &[Residue],
    dimension: usize,
    long_run: bool,
) -> Result<NativeResult> {
    let guard = if long_run {
        LONG_RUN_GUARD
    } else {
        DEFAULT_GUARD
    };
    if sequence.len() > guard {
        return Err(Error::GuardExceeded {
            len: sequence.len(),
            guard,
        });
    }
    search(sequence, dimension, true)
}

/// The same search with the energy bound disabled.
pub fn enumerate_exhaustive(sequence: &[Residue], dimension: usize) -> Result<NativeResult> {
    if sequence.len() > DEFAULT_GUARD {
        return Err(Error::GuardExceeded {
            len: sequence.len(),
            guard: DEFAULT_GUARD,
        });
    }
    search(sequence, dimension, false)
}

fn check_dimension(dimension: usize) -> Result<()> {
    if !(2..=3).contains(&dimension) {
        return Err(Error::OutOfRange {
            what: "dimension",
            value: dimension as i64,
            lo: 2,
            hi: 3,
        });
    }
    Ok(())
}

/// Walks every self-avoiding walk from the origin with no symmetry reduction
/// and no pruning. Returns `(min energy, degeneracy, total walks)`.
pub fn enumerate_unpruned(sequence: &[Residue], dimension: usize) -> Result<(i64, u64, u64)> {
    check_dimension(dimension)?;
    if sequence.len() > UNPRUNED_LIMIT {
        return Err(Error::GuardExceeded {
            len: sequence.len(),
            guard: UNPRUNED_LIMIT,
        });
    }
    if sequence.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    fn rec(path: &mut Vec<Point>, seq: &[Residue], dirs: &[Point], acc: &mut (i64, u64, u64)) {
        if path.len() == seq.len() {
            let e = hp_energy(&Conformation::new(path.clone()), seq).expect("walk is valid");
            acc.2 += 1;
            if e < acc.0 {
                *acc = (e, 0, acc.2);
            }
            if e == acc.0 {
                acc.1 += 1;
            }
            return;
        }
        let last = path.last().expect("non-empty").clone();
        for d in dirs {
            let next: Point = last.iter().zip(d).map(|(a, b)| a + b).collect();
            if !path.contains(&next) {
                path.push(next);
                rec(path, seq, dirs, acc);
                path.pop();
            }
        }
    }
    let dirs = unit_steps(dimension);
    let mut acc = (i64::MAX, 0, 0);
    rec(&mut vec![vec![0; dimension]], sequence, &dirs, &mut acc);
    Ok(acc)
}

fn unit_steps(d: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(2 * d);
    for axis in 0..d {
        for sign in [1, -1] {
            let mut p = vec![0; d];
            p[axis] = sign;
            out.push(p);
        }
    }
    out
}

/// Flat occupancy grid centred on the origin.
#[derive(Clone)]
struct Grid {
    side: i32,
    dim: usize,
    cells: Vec<u16>,
}

const EMPTY: u16 = u16::MAX;

impl Grid {
    fn new(n: usize, dim: usize) -> Self {
        let side = 2 * n as i32 + 1;
        Self {
            side,
            dim,
            cells: vec![EMPTY; (side as usize).pow(dim as u32)],
        }
    }

    fn index(&self, p: &[i32; 3]) -> usize {
        let off = self.side / 2;
        let mut idx = 0usize;
        for &c in &p[..self.dim] {
            idx = idx * self.side as usize + (c + off) as usize;
        }
        idx
    }
}

struct Search<'a> {
    hydrophobic: Vec<bool>,
    /// `bound_suffix[k]`: most contacts residues `k..` can still add.
    bound_suffix: Vec<i64>,
    dirs: Vec<[i32; 3]>,
    dim: usize,
    best: &'a AtomicI64,
    prune: bool,
}

#[derive(Clone)]
struct Local {
    contacts: i64,
    count: u64,
    witness: Vec<[i32; 3]>,
}

impl Local {
    fn empty() -> Self {
        Self {
            contacts: -1,
            count: 0,
            witness: Vec::new(),
        }
    }

    fn merge(self, other: Local) -> Local {
        match self.contacts.cmp(&other.contacts) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal => Local {
                count: self.count + other.count,
                ..self
            },
        }
    }
}

/// Prefix state handed to a worker.
#[derive(Clone)]
struct Prefix {
    path: Vec<[i32; 3]>,
    contacts: i64,
    /// Whether the walk has already left the x axis.
    turned: bool,
}

impl Search<'_> {
    fn contacts_at(&self, grid: &Grid, p: &[i32; 3], k: usize) -> i64 {
        if !self.hydrophobic[k] {
            return 0;
        }
        let mut c = 0;
        for d in &self.dirs {
            let q = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
            let j = grid.cells[grid.index(&q)];
            if j != EMPTY && (j as usize) + 1 < k && self.hydrophobic[j as usize] {
                c += 1;
            }
        }
        c
    }

    /// Steps allowed from residue `k - 1`, honouring the symmetry reduction.
    fn moves(&self, k: usize, turned: bool) -> &[[i32; 3]] {
        if k == 1 {
            &self.dirs[..1] // +x
        } else if !turned {
            // +x, -x (always blocked), then only +y as the first turn
            &self.dirs[..3]
        } else {
            &self.dirs
        }
    }

    fn extend(&self, prefix: &Prefix) -> Vec<Prefix> {
        let k = prefix.path.len();
        let mut grid = Grid::new(self.hydrophobic.len(), self.dim);
        for (i, p) in prefix.path.iter().enumerate() {
            let idx = grid.index(p);
            grid.cells[idx] = i as u16;
        }
        let last = prefix.path[k - 1];
        let mut out = Vec::new();
        for d in self.moves(k, prefix.turned) {
            let p = [last[0] + d[0], last[1] + d[1], last[2] + d[2]];
            if grid.cells[grid.index(&p)] != EMPTY {
                continue;
            }
            let mut path = prefix.path.clone();
            path.push(p);
            out.push(Prefix {
                contacts: prefix.contacts + self.contacts_at(&grid, &p, k),
                turned: prefix.turned || d[0] == 0,
                path,
            });
        }
        out
    }

    fn run(&self, prefix: &Prefix) -> Local {
        let mut grid = Grid::new(self.hydrophobic.len(), self.dim);
        for (i, p) in prefix.path.iter().enumerate() {
            let idx = grid.index(p);
            grid.cells[idx] = i as u16;
        }
        let mut path = prefix.path.clone();
        let mut local = Local::empty();
        self.dfs(
            &mut grid,
            &mut path,
            prefix.contacts,
            prefix.turned,
            &mut local,
        );
        local
    }

    fn dfs(
        &self,
        grid: &mut Grid,
        path: &mut Vec<[i32; 3]>,
        contacts: i64,
        turned: bool,
        local: &mut Local,
    ) {
        let k = path.len();
        if k == self.hydrophobic.len() {
            let weight = self.weight(turned);
            if contacts > local.contacts {
                *local = Local {
                    contacts,
                    count: 0,
                    witness: path.clone(),
                };
                self.best.fetch_max(contacts, Ordering::Relaxed);
            }
            if contacts == local.contacts {
                local.count += weight;
            }
            return;
        }
        if self.prune && contacts + self.bound_suffix[k] < self.best.load(Ordering::Relaxed) {
            return;
        }
        let last = path[k - 1];
        for d in self.moves(k, turned) {
            let p = [last[0] + d[0], last[1] + d[1], last[2] + d[2]];
            let idx = grid.index(&p);
            if grid.cells[idx] != EMPTY {
                continue;
            }
            let gained = self.contacts_at(grid, &p, k);
            grid.cells[idx] = k as u16;
            path.push(p);
            self.dfs(grid, path, contacts + gained, turned || d[0] == 0, local);
            path.pop();
            grid.cells[idx] = EMPTY;
        }
    }

    /// Size of the symmetry orbit of a canonical walk.
    fn weight(&self, turned: bool) -> u64 {
        match (self.dim, turned) {
            (2, false) => 4,
            (2, true) => 8,
            (_, false) => 6,
            (_, true) => 24,
        }
    }
}

/// Admissible per-residue contact bound: a residue has `2D` lattice
/// neighbours, two of them taken by its chain neighbours (one for the chain
/// end), and it can only touch earlier H residues at odd sequence distance
/// of at least 3.
fn contact_bounds(hydrophobic: &[bool], dim: usize) -> Vec<i64> {
    let n = hydrophobic.len();
    let mut suffix = vec![0i64; n + 1];
    for k in (0..n).rev() {
        let cap = if k + 1 == n { 2 * dim - 1 } else { 2 * dim - 2 } as i64;
        let partners = if hydrophobic[k] {
            (0..k.saturating_sub(2))
                .filter(|&j| hydrophobic[j] && (k - j) % 2 == 1)
                .count() as i64
        } else {
            0
        };
        suffix[k] = suffix[k + 1] + cap.min(partners);
    }
    suffix
}

fn search(sequence: &[Residue], dimension: usize, prune: bool) -> Result<NativeResult> {
    check_dimension(dimension)?;
    let n = sequence.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    let hydrophobic: Vec<bool> = sequence.iter().map(|r| r.is_hydrophobic()).collect();
    let mut dirs = vec![[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]];
    if dimension == 3 {
        dirs.extend([[0, 0, 1], [0, 0, -1]]);
    }
    let best = AtomicI64::new(0);
    let s = Search {
        bound_suffix: contact_bounds(&hydrophobic, dimension),
        hydrophobic,
        dirs,
        dim: dimension,
        best: &best,
        prune,
    };
    let to_point = |p: &[i32; 3]| p[..dimension].to_vec();
    if n == 1 {
        return Ok(NativeResult {
            min_energy: 0,
            degeneracy: 1,
            witness: Conformation::new(vec![vec![0; dimension]]),
        });
    }

    // Expand breadth-first until there is enough independent work.
    let mut frontier = vec![Prefix {
        path: vec![[0, 0, 0]],
        contacts: 0,
        turned: false,
    }];
    while frontier[0].path.len() < n && frontier.len() < 256 {
        frontier = frontier.iter().flat_map(|p| s.extend(p)).collect();
        if frontier.is_empty() {
            break;
        }
    }
    let result = frontier
        .par_iter()
        .map(|p| s.run(p))
        .reduce(Local::empty, Local::merge);
    Ok(NativeResult {
        min_energy: -result.contacts,
        degeneracy: result.count,
        witness: Conformation::new(result.witness.iter().map(to_point).collect()),
    })
}

/// Outcome of comparing a protein Hamiltonian against direct HP energies on
/// every free-variable assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub assignments: u64,
    pub valid_conformations: u64,
    /// Assignments where `H <= 0` disagrees with chain validity.
    pub separation_violations: Vec<u64>,
    /// Valid assignments where `H` differs from the HP energy.
    pub energy_mismatches: Vec<u64>,
}

impl SeparationReport {
    pub fn passed(&self) -> bool {
        self.separation_violations.is_empty() && self.energy_mismatches.is_empty()
    }
}

/// Checks `H <= 0` iff the decoded chain is valid, and `H = hp_energy` there.
pub fn separation_report(protein: &ProteinHamiltonian) -> Result<SeparationReport> {
    let n = protein.num_free_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyVariables {
            count: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let c = protein.polynomial.compile()?;
    let seq = protein.instance.sequence();
    let rows = (0..1u64 << n)
        .into_par_iter()
        .map(|x| {
            let coords = protein.instance.decode_coordinates(&protein.full_bits(x))?;
            let conf = Conformation::new(coords);
            let h = c.eval(x);
            let energy = hp_energy(&conf, seq).ok();
            Ok((x, h, energy))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SeparationReport {
        assignments: rows.len() as u64,
        valid_conformations: 0,
        separation_violations: Vec::new(),
        energy_mismatches: Vec::new(),
    };
    for (x, h, energy) in rows {
        if (h <= 0) != energy.is_some() {
            report.separation_violations.push(x);
        }
        if let Some(e) = energy {
            report.valid_conformations += 1;
            if e != h {
                report.energy_mismatches.push(x);
            }
        }
    }
    Ok(report)
}
