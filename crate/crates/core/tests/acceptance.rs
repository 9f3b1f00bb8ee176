//! End-to-end acceptance checks, one line per criterion.
//!
//! Criterion 10 is the long 24-residue enumeration; it runs only with
//! `HPAQC_LONG_RUN=1` or `-- --ignored`.

// `ensure!(x > 0.0, ..)` expands to a negated float comparison, which is the
// intent: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hpaqc_core::adiabatic::{eigenvalues_at, spectrum_trace, to_spin_hamiltonian};
use hpaqc_core::hamiltonian::{build_adder_increment, build_protein_default};
use hpaqc_core::lattice::{parse_sequence, LatticeInstance};
use hpaqc_core::oracle::{brute_force_minimum, enumerate_native, separation_report};
use hpaqc_core::pbf::{parse_bits, PseudoBooleanFunction as Pbf};
use hpaqc_core::presets::toy;
use hpaqc_core::quadratize::{
    and_gadget, min_over_ancillas, quadratize, quadratize_with, total_qubits_2local,
    verify_reduction, SubstitutionOrder,
};
use hpaqc_core::resources::{report_for, resource_report};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Table II rows as printed: (q4 q3 q2 q1, H).
const TABLE_II: [(&str, i64); 16] = [
    ("0010", 0),
    ("0000", 1),
    ("0011", 1),
    ("0110", 1),
    ("0111", 1),
    ("1010", 1),
    ("0001", 2),
    ("0100", 2),
    ("1000", 2),
    ("1011", 2),
    ("1110", 2),
    ("0101", 3),
    ("1001", 3),
    ("1100", 3),
    ("1111", 3),
    ("1101", 4),
];

fn table_ii() -> Outcome {
    let f = toy();
    for (bits, h) in TABLE_II {
        let got = f.evaluate_mask(parse_bits(bits).unwrap());
        ensure!(got == h, "H({bits}) = {got}, table says {h}");
    }
    Ok("16/16 rows".into())
}

fn table_iii() -> Outcome {
    // (anc, q_i, q_j) -> multiple of delta
    let rows = [
        ((0, 0, 0), 0),
        ((0, 0, 1), 0),
        ((0, 1, 0), 0),
        ((1, 1, 1), 0),
        ((1, 0, 0), 3),
        ((1, 0, 1), 1),
        ((1, 1, 0), 1),
        ((0, 1, 1), 1),
    ];
    for delta in [1, 5] {
        let g = and_gadget(1, 2, 3, delta).map_err(|e| e.to_string())?;
        for ((anc, qi, qj), k) in rows {
            let got = g.evaluate(&[qi, qj, anc]).unwrap();
            ensure!(
                got == k * delta,
                "delta {delta}, row {anc}{qi}{qj}: {got} != {}",
                k * delta
            );
        }
    }
    Ok("8/8 rows at delta 1 and 5".into())
}

fn reduced_toy_expected(delta: i64) -> Pbf {
    Pbf::from_terms([
        (vec![], 1),
        (vec![1], 1),
        (vec![2], -1),
        (vec![3], 1),
        (vec![4], 1),
        (vec![3, 5], -1),
        (vec![5, 6], 1),
        (vec![5], 3 * delta),
        (vec![1, 2], delta),
        (vec![1, 5], -2 * delta),
        (vec![2, 5], -2 * delta),
        (vec![6], 3 * delta),
        (vec![3, 4], delta),
        (vec![3, 6], -2 * delta),
        (vec![4, 6], -2 * delta),
    ])
}

fn table_iv() -> Outcome {
    let delta = 5;
    let r = quadratize(&toy(), Some(delta)).map_err(|e| e.to_string())?;
    let ledger: Vec<_> = r
        .substitutions
        .iter()
        .map(|s| (s.a, s.b, s.ancilla))
        .collect();
    ensure!(ledger == vec![(1, 2, 5), (3, 4, 6)], "ledger {ledger:?}");
    ensure!(
        r.reduced == reduced_toy_expected(delta),
        "reduced form differs: {}",
        r.reduced
    );
    for (bits, h) in TABLE_II {
        let x = r.extend_consistent(parse_bits(bits).unwrap());
        let got = r.reduced.evaluate_mask(x);
        ensure!(got == h, "consistent extension of {bits}: {got} != {h}");
    }
    for (bits, expect) in [("010010", delta), ("110000", 2 + 6 * delta)] {
        let got = r.reduced.evaluate_mask(parse_bits(bits).unwrap());
        ensure!(got == expect, "penalized row {bits}: {got} != {expect}");
    }
    Ok("ledger, 15 terms, 16 consistent rows, 2 penalized rows".into())
}

fn fig6() -> Outcome {
    let r = quadratize(&toy(), Some(5)).map_err(|e| e.to_string())?;
    let h = to_spin_hamiltonian(&r.reduced, 6).map_err(|e| e.to_string())?;
    let trace = spectrum_trace(&h, 101, 19).map_err(|e| e.to_string())?;
    let end = &trace.points.last().unwrap().eigenvalues;
    let mut expect: Vec<f64> = TABLE_II.iter().map(|&(_, h)| h as f64).collect();
    expect.extend([5.0, 5.0, 6.0]);
    for (k, (got, want)) in end.iter().zip(&expect).enumerate() {
        ensure!(
            (got - want).abs() < 1e-9,
            "E{k}(1) = {got}, expected {want}"
        );
    }
    Ok(format!("19 levels at s = 1, g_min = {:.4}", trace.g_min))
}

fn hpph_end_to_end() -> Outcome {
    let inst = LatticeInstance::parse("HPPH", 2).unwrap();
    let p = build_protein_default(&inst).map_err(|e| e.to_string())?;
    ensure!(
        p.num_free_vars() == 8,
        "{} free variables",
        p.num_free_vars()
    );
    let m = brute_force_minimum(&p.polynomial).map_err(|e| e.to_string())?;
    ensure!(
        m.value == -1 && m.minimizers.len() == 2,
        "minimum {} with {} minimizers",
        m.value,
        m.minimizers.len()
    );

    let h = to_spin_hamiltonian(&p.polynomial, 8).map_err(|e| e.to_string())?;
    let trace = spectrum_trace(&h, 101, 15).map_err(|e| e.to_string())?;
    let end = trace.points.last().unwrap();
    ensure!(
        end.ground_degeneracy == 2,
        "ground degeneracy at s = 1 is {}",
        end.ground_degeneracy
    );
    ensure!(
        (end.eigenvalues[0] + 1.0).abs() < 1e-9,
        "E0(1) = {}",
        end.eigenvalues[0]
    );
    let g = trace.g_min_interior.ok_or("no interior points")?;
    ensure!(g > 0.0, "interior g_min = {g}");
    let start = &trace.points[0].ground_probabilities;
    let uniform = 1.0 / 256.0;
    ensure!(
        start.iter().all(|p| (p - uniform).abs() < 1e-10),
        "s = 0 ground state is not uniform"
    );
    Ok(format!("min -1 x2, E0(1) 2-fold, g_min(0,1) = {g:.3e}"))
}

fn separation() -> Outcome {
    let inst = LatticeInstance::parse("HPPH", 2).unwrap();
    let p = build_protein_default(&inst).map_err(|e| e.to_string())?;
    let r = separation_report(&p).map_err(|e| e.to_string())?;
    ensure!(r.assignments == 256, "{} assignments", r.assignments);
    ensure!(
        r.passed(),
        "violations {:?}, mismatches {:?}",
        r.separation_violations,
        r.energy_mismatches
    );
    // residue 1 next to (1,1) and residue 4 next to (2,1), avoiding the bond
    ensure!(
        r.valid_conformations == 9,
        "{} valid conformations, expected 9",
        r.valid_conformations
    );
    Ok("256 assignments, 9 valid chains, energies match".into())
}

fn resources() -> Outcome {
    let t = total_qubits_2local(4, 2).map_err(|e| e.to_string())?;
    ensure!(t == 30, "total qubits for N = 4, D = 2: {t}");
    for n in [4u64, 8, 16] {
        for d in [2u32, 3] {
            let got = total_qubits_2local(n, d).map_err(|e| e.to_string())?;
            let want = (n - 2) * (n.pow(d) - 1);
            ensure!(got == want, "N = {n}, D = {d}: {got} != {want}");
        }
    }
    let r =
        resource_report(&LatticeInstance::parse("HPPH", 2).unwrap()).map_err(|e| e.to_string())?;
    ensure!(
        r.free_qubits + r.reduced_ancillas == 30,
        "reduction used {} ancillas",
        r.reduced_ancillas
    );
    Ok("closed form for 6 sizes; HPPH reduction uses 22 ancillas".into())
}

fn table_i() -> Outcome {
    let inst = LatticeInstance::parse("HPPH", 2).unwrap();
    let p = build_protein_default(&inst).map_err(|e| e.to_string())?;
    let r = report_for(&p).map_err(|e| e.to_string())?;
    ensure!(
        r.within_bound(),
        "census exceeds the bound: {:?}",
        r.deviations
    );
    if !r.exact() {
        return Err(format!("census below the bound: {:?}", r.deviations));
    }
    let census: Vec<String> = r
        .per_locality_actual
        .iter()
        .map(|(k, c)| format!("{k}:{c}"))
        .collect();
    Ok(format!("exact match {}", census.join(" ")))
}

fn random_pbf(rng: &mut ChaCha8Rng, n: u32, terms: usize) -> Pbf {
    let mut f = Pbf::zero();
    for _ in 0..terms {
        let vars: Vec<u32> = (1..=n).filter(|_| rng.gen_bool(0.4)).collect();
        f = f.add(&Pbf::monomial(&vars, rng.gen_range(-5..=5)));
    }
    f
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // (a) evaluation is a ring homomorphism
    for _ in 0..200 {
        let f = random_pbf(&mut rng, 7, 6);
        let g = random_pbf(&mut rng, 7, 6);
        let (sum, prod, diff) = (f.add(&g), f.mul(&g), f.sub(&g));
        for x in 0..128u64 {
            let (a, b) = (f.evaluate_mask(x), g.evaluate_mask(x));
            ensure!(sum.evaluate_mask(x) == a + b, "(a) sum at {x}");
            ensure!(prod.evaluate_mask(x) == a * b, "(a) product at {x}");
            ensure!(diff.evaluate_mask(x) == a - b, "(a) difference at {x}");
        }
    }

    // (b) quadratization keeps min over ancillas equal to f everywhere
    let (mut checked, mut strict) = (0, 0);
    while checked < 100 {
        let n = rng.gen_range(3..=6);
        let terms = rng.gen_range(2..=8);
        let f = random_pbf(&mut rng, n, terms);
        if !(3..=5).contains(&f.degree()) {
            continue;
        }
        checked += 1;
        let r = quadratize_with(&f, None, &SubstitutionOrder::Greedy).map_err(|e| e.to_string())?;
        ensure!(
            r.reduced.degree() <= 2,
            "(b) degree {} after reduction",
            r.reduced.degree()
        );
        let rep = verify_reduction(&f, &r).map_err(|e| e.to_string())?;
        ensure!(rep.passed(), "(b) {f}: {rep:?}");
        for x in 0..1u64 << r.original_vars {
            let m = min_over_ancillas(&r, x).map_err(|e| e.to_string())?;
            ensure!(
                m == f.evaluate_mask(x),
                "(b) {f}: min over ancillas at {x} is {m}"
            );
        }
        if rep.low_spectrum_preserved == Some(true) {
            strict += 1;
        }
    }

    // (c) increment circuit
    for width in [4usize, 5] {
        let vars: Vec<u32> = (1..=width as u32).collect();
        let z = build_adder_increment(&vars).map_err(|e| e.to_string())?;
        for x in (1..1u64 << width).step_by(2) {
            let value: u64 = z
                .iter()
                .enumerate()
                .map(|(k, zk)| (zk.evaluate_mask(x) as u64) << k)
                .sum();
            ensure!(
                value == x + 1,
                "(c) {width}-bit increment of {x} gave {value}"
            );
        }
    }
    let z = build_adder_increment(&[1, 2, 3, 4]).unwrap();
    let bits: Vec<i64> = z.iter().map(|zk| zk.evaluate_mask(0b1111)).collect();
    ensure!(
        bits == vec![0, 0, 0, 0, 1],
        "(c) overflow of 1111 gave {bits:?}"
    );

    // (d) the driver alone has eigenvalues k with multiplicity C(n, k)
    for n in 1..=8usize {
        let f = random_pbf(&mut rng, n as u32, 4);
        let h = to_spin_hamiltonian(&f, n).map_err(|e| e.to_string())?;
        let e = eigenvalues_at(&h, 0.0).map_err(|e| e.to_string())?;
        let mut counts = BTreeMap::new();
        for v in e {
            let k = v.round();
            ensure!((v - k).abs() < 1e-9, "(d) n = {n}: eigenvalue {v}");
            *counts.entry(k as i64).or_insert(0u64) += 1;
        }
        for (k, c) in counts {
            let binom = (0..k as u64).fold(1u64, |acc, i| acc * (n as u64 - i) / (i + 1));
            ensure!(c == binom, "(d) n = {n}: level {k} has multiplicity {c}");
        }
    }
    Ok(format!(
        "(a) 200 pairs, (b) 100 polynomials ({strict} also keep every penalized level above max f), \
         (c) 4/5-bit + overflow, (d) n <= 8"
    ))
}

fn long_run() -> Outcome {
    let seq = parse_sequence("HHPHPPPHHHHPPHHHHPPPHPHH").unwrap();
    let r = enumerate_native(&seq, 2, true).map_err(|e| e.to_string())?;
    ensure!(r.min_energy == -12, "min energy {}", r.min_energy);
    Ok(format!("min energy -12, {} minimizing walks", r.degeneracy))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
    gated: bool,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let long = std::env::var("HPAQC_LONG_RUN").is_ok_and(|v| v == "1")
        || args
            .iter()
            .any(|a| a == "--ignored" || a == "--include-ignored");
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "toy truth table",
            budget: secs(1),
            run: table_ii,
            gated: false,
        },
        Criterion {
            id: 2,
            name: "AND gadget truth table",
            budget: secs(1),
            run: table_iii,
            gated: false,
        },
        Criterion {
            id: 3,
            name: "toy reduction and penalized rows",
            budget: secs(1),
            run: table_iv,
            gated: false,
        },
        Criterion {
            id: 4,
            name: "reduced toy spectrum at s = 1",
            budget: secs(30),
            run: fig6,
            gated: false,
        },
        Criterion {
            id: 5,
            name: "HPPH end to end",
            budget: secs(300),
            run: hpph_end_to_end,
            gated: false,
        },
        Criterion {
            id: 6,
            name: "HPPH separation and oracle equality",
            budget: secs(10),
            run: separation,
            gated: false,
        },
        Criterion {
            id: 7,
            name: "qubit counts",
            budget: secs(1),
            run: resources,
            gated: false,
        },
        Criterion {
            id: 8,
            name: "term census vs closed form",
            budget: secs(60),
            run: table_i,
            gated: false,
        },
        Criterion {
            id: 9,
            name: "property suite",
            budget: secs(120),
            run: properties,
            gated: false,
        },
        Criterion {
            id: 10,
            name: "24-mer native energy (long run)",
            budget: secs(6 * 3600),
            run: long_run,
            gated: true,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        if c.gated && !long {
            println!(
                "criterion {:2} IGNORED {} (set HPAQC_LONG_RUN=1)",
                c.id, c.name
            );
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let over = elapsed > c.budget;
        match outcome {
            Ok(detail) if !over => {
                println!(
                    "criterion {:2} PASS    {} - {detail} [{:.2?}]",
                    c.id, c.name, elapsed
                )
            }
            Ok(detail) => {
                failed += 1;
                println!(
                    "criterion {:2} FAIL    {} - {detail}, but took {:.2?} (budget {:?})",
                    c.id, c.name, elapsed, c.budget
                );
            }
            Err(why) => {
                failed += 1;
                println!(
                    "criterion {:2} FAIL    {} - {why} [{:.2?}]",
                    c.id, c.name, elapsed
                );
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
