use hpaqc_core::hamiltonian::build_protein_default;
use hpaqc_core::lattice::{parse_sequence, LatticeInstance, Point, Residue};
use hpaqc_core::oracle::{enumerate_exhaustive, enumerate_native, hp_energy, Conformation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grows a random self-avoiding chain outwards from the two pinned
/// residues, staying inside the `side^D` box.
fn random_valid_chain(inst: &LatticeInstance, rng: &mut ChaCha8Rng) -> Option<Vec<Point>> {
    let n = inst.len();
    let d = inst.dimension();
    let side = 1i32 << inst.bits_per_axis();
    let (a, b) = inst.fixed_residues();
    let (pa, pb) = inst.fixed_sites();
    let mut chain: Vec<Option<Point>> = vec![None; n];
    chain[a - 1] = Some(pa);
    chain[b - 1] = Some(pb);
    let order: Vec<(usize, usize)> = (1..a)
        .rev()
        .map(|i| (i, i + 1))
        .chain((b + 1..=n).map(|i| (i, i - 1)))
        .collect();
    for (i, from) in order {
        let base = chain[from - 1].clone().unwrap();
        let mut steps: Vec<Point> = (0..d)
            .flat_map(|axis| {
                [1, -1].into_iter().map(move |s| {
                    let mut p = vec![0; d];
                    p[axis] = s;
                    p
                })
            })
            .collect();
        steps.shuffle(rng);
        let next = steps.into_iter().find_map(|s| {
            let p: Point = base.iter().zip(&s).map(|(x, y)| x + y).collect();
            let inside = p.iter().all(|&c| (0..side).contains(&c));
            let free = !chain.iter().flatten().any(|q| q == &p);
            (inside && free).then_some(p)
        })?;
        chain[i - 1] = Some(next);
    }
    chain.into_iter().collect()
}

#[test]
fn eight_residue_hamiltonian_matches_hp_energy_on_valid_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for s in ["HPPHHPPH", "HHHHHHHH", "HPHPHPHH"] {
        let inst = LatticeInstance::parse(s, 2).unwrap();
        let p = build_protein_default(&inst).unwrap();
        let seq = parse_sequence(s).unwrap();
        let mut seen = 0;
        while seen < 200 {
            let Some(coords) = random_valid_chain(&inst, &mut rng) else {
                continue;
            };
            seen += 1;
            let full = inst.encode_coordinates(&coords).unwrap();
            let free = p.free_bits(&full).unwrap();
            let h = p.polynomial.evaluate(&free).unwrap();
            let e = hp_energy(&Conformation::new(coords.clone()), &seq).unwrap();
            assert_eq!(h, e, "{s} at {coords:?}");
        }
    }
}

#[test]
fn eight_residue_hamiltonian_is_positive_off_valid_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let inst = LatticeInstance::parse("HPPHHPPH", 2).unwrap();
    let p = build_protein_default(&inst).unwrap();
    let seq = parse_sequence("HPPHHPPH").unwrap();
    let compiled = p.polynomial.compile().unwrap();
    let n = p.num_free_vars();
    for _ in 0..20_000 {
        let x: u64 = rng.gen::<u64>() & ((1 << n) - 1);
        let coords = inst.decode_coordinates(&p.full_bits(x)).unwrap();
        let valid = hp_energy(&Conformation::new(coords), &seq).is_ok();
        assert_eq!(compiled.eval(x) <= 0, valid, "assignment {x:#x}");
    }
}

fn random_sequence(rng: &mut ChaCha8Rng, n: usize) -> Vec<Residue> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Residue::H
            } else {
                Residue::P
            }
        })
        .collect()
}

#[test]
fn pruning_never_changes_the_answer() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for n in [10, 12, 14] {
        for _ in 0..4 {
            let seq = random_sequence(&mut rng, n);
            let pruned = enumerate_native(&seq, 2, false).unwrap();
            let full = enumerate_exhaustive(&seq, 2).unwrap();
            assert_eq!(
                (pruned.min_energy, pruned.degeneracy),
                (full.min_energy, full.degeneracy)
            );
            assert_eq!(hp_energy(&pruned.witness, &seq).unwrap(), pruned.min_energy);
        }
    }
    let seq = random_sequence(&mut rng, 10);
    let pruned = enumerate_native(&seq, 3, false).unwrap();
    let full = enumerate_exhaustive(&seq, 3).unwrap();
    assert_eq!(
        (pruned.min_energy, pruned.degeneracy),
        (full.min_energy, full.degeneracy)
    );
}

#[test]
fn sixteen_residue_ground_states() {
    let seq = parse_sequence("HPHPPHHPHPPHPHHP").unwrap();
    let pruned = enumerate_native(&seq, 2, false).unwrap();
    let full = enumerate_exhaustive(&seq, 2).unwrap();
    assert_eq!(pruned.min_energy, full.min_energy);
    assert_eq!(pruned.degeneracy, full.degeneracy);
}
