use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use hpaqc_core::adiabatic::{spectrum_trace, to_spin_hamiltonian};
use hpaqc_core::hamiltonian::{build_protein, ContactMatrix, PenaltyWeights};
use hpaqc_core::lattice::{parse_sequence, sequence_string, LatticeInstance};
use hpaqc_core::oracle::enumerate_native;
use hpaqc_core::pbf::display_bits;
use hpaqc_core::quadratize::{
    quadratize_with, verify_reduction, SubstitutionOrder, EXHAUSTIVE_LIMIT,
};
use hpaqc_core::resources::resource_report;
use hpaqc_core::{presets, PseudoBooleanFunction as Pbf};
use serde_json::{json, Value};

use crate::args::{BuildArgs, CountArgs, EnumerateArgs, ReduceArgs, SpectrumArgs, Strategy};
use crate::files::{fmt_float, write_json, write_text, HamiltonianFile, RunManifest};
use crate::CliError;

fn preset(name: &str) -> Result<Pbf, CliError> {
    presets::by_name(name)
        .ok_or_else(|| CliError::Usage(format!("unknown preset {name:?} (available: toy)")))
}

fn census(f: &Pbf) -> Value {
    json!(f
        .term_census()
        .into_iter()
        .map(|(k, c)| (k.to_string(), c))
        .collect::<BTreeMap<_, _>>())
}

/// Loads `--in` or `--preset`, returning the file and the paths it came from.
fn load(input: Option<&Path>, preset_name: Option<&str>) -> Result<HamiltonianFile, CliError> {
    match (input, preset_name) {
        (Some(path), _) => HamiltonianFile::read(path),
        (None, Some(name)) => Ok(preset_file(name, preset(name)?)),
        (None, None) => Err(CliError::Usage(
            "either --in or --preset is required".into(),
        )),
    }
}

fn preset_file(name: &str, f: Pbf) -> HamiltonianFile {
    let mut meta = BTreeMap::new();
    meta.insert("source".into(), json!("preset"));
    meta.insert("preset".into(), json!(name));
    meta.insert("degree".into(), json!(f.degree()));
    meta.insert("term_census".into(), census(&f));
    let n = f.max_var() as usize;
    HamiltonianFile::new(f, n, meta)
}

pub fn build(a: &BuildArgs) -> Result<(), CliError> {
    let manifest = RunManifest::new("build", &[])?;
    if let Some(name) = &a.preset {
        let file = preset_file(name, preset(name)?);
        println!(
            "preset {name}: {} variables, {} terms",
            file.num_vars,
            file.terms.num_terms()
        );
        write_json(&a.out, &file)?;
        return manifest.finish(&[&a.out]);
    }
    let sequence = a
        .sequence
        .as_deref()
        .expect("clap enforces --sequence or --preset");
    let inst = LatticeInstance::parse(sequence, a.dim)?;
    let defaults = PenaltyWeights::for_length(inst.len());
    let weights = PenaltyWeights::new(
        a.lambda0.unwrap_or(defaults.lambda0),
        a.lambda1.unwrap_or(defaults.lambda1),
    )?;
    let protein = build_protein(
        &inst,
        weights,
        &ContactMatrix::from_sequence(inst.sequence()),
    )?;

    let renumber: BTreeMap<u32, u32> = protein
        .free_to_original
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k as u32 + 1))
        .collect();
    let layout: Vec<Value> = inst
        .layout()
        .into_iter()
        .map(|field| {
            let free: Option<Vec<u32>> = field
                .vars
                .iter()
                .map(|v| renumber.get(v).copied())
                .collect();
            json!({
                "residue": field.residue,
                "axis": field.axis,
                "original_vars": field.vars,
                "free_vars": free,
            })
        })
        .collect();

    println!(
        "{inst}: {} free variables, {} terms, degree {}",
        protein.num_free_vars(),
        protein.polynomial.num_terms(),
        protein.polynomial.degree()
    );
    for field in &layout {
        let axis = ["x", "y", "z"][field["axis"].as_u64().unwrap_or(1) as usize - 1];
        match field["free_vars"].as_array() {
            Some(vars) => {
                let names: Vec<String> = vars.iter().rev().map(|v| format!("q{v}")).collect();
                println!("  residue {} {axis}: {}", field["residue"], names.join(" "));
            }
            None => println!("  residue {} {axis}: fixed", field["residue"]),
        }
    }

    let fixed = protein
        .fixed_bindings
        .iter()
        .map(|(v, &b)| (v.to_string(), u8::from(b)))
        .collect::<BTreeMap<_, _>>();
    let mut meta = BTreeMap::new();
    meta.insert("source".into(), json!("protein"));
    meta.insert("sequence".into(), json!(sequence_string(inst.sequence())));
    meta.insert("dimension".into(), json!(inst.dimension()));
    meta.insert("lambda0".into(), json!(weights.lambda0));
    meta.insert("lambda1".into(), json!(weights.lambda1));
    meta.insert("layout".into(), json!(layout));
    meta.insert("free_to_original".into(), json!(protein.free_to_original));
    meta.insert("fixed_bindings".into(), json!(fixed));
    meta.insert("residue_blocks".into(), json!(protein.residue_blocks()));
    meta.insert("degree".into(), json!(protein.polynomial.degree()));
    meta.insert("term_census".into(), census(&protein.polynomial));
    let n = protein.num_free_vars();
    write_json(&a.out, &HamiltonianFile::new(protein.polynomial, n, meta))?;
    manifest.finish(&[&a.out])
}

pub fn reduce(a: &ReduceArgs) -> Result<(), CliError> {
    let inputs: Vec<&Path> = a.input.as_deref().into_iter().collect();
    let manifest = RunManifest::new("reduce", &inputs)?;
    let file = load(a.input.as_deref(), a.preset.as_deref())?;
    let f = &file.terms;

    let (order, strategy) = match (a.strategy, file.residue_blocks()) {
        (Strategy::Greedy, _) | (Strategy::Auto, None) => (SubstitutionOrder::Greedy, "greedy"),
        (Strategy::Auto | Strategy::Blocks, Some(b)) => (SubstitutionOrder::Blocks(b), "blocks"),
        (Strategy::Blocks, None) => {
            return Err(CliError::Usage(
                "--strategy blocks needs an input built with residue_blocks metadata".into(),
            ))
        }
    };
    let r = quadratize_with(f, a.delta, &order)?;
    let report = if r.total_vars <= EXHAUSTIVE_LIMIT || a.verify {
        let rep = verify_reduction(f, &r)?;
        if !rep.passed() {
            eprintln!(
                "warning: delta = {} does not separate penalized states: {:?}",
                r.delta, rep.counterexample
            );
        }
        Some(rep)
    } else {
        None
    };

    println!(
        "{} -> {} variables ({} ancillas, delta = {}, strategy {strategy})",
        r.original_vars,
        r.total_vars,
        r.num_ancillas(),
        r.delta
    );
    for s in &r.substitutions {
        println!("  q{} q{} -> q{}", s.a, s.b, s.ancilla);
    }

    let mut meta = BTreeMap::new();
    meta.insert("source".into(), json!("reduced"));
    meta.insert("strategy".into(), json!(strategy));
    meta.insert("delta".into(), json!(r.delta));
    meta.insert("original_vars".into(), json!(r.original_vars));
    meta.insert("num_ancillas".into(), json!(r.num_ancillas()));
    meta.insert("substitutions".into(), json!(r.substitutions));
    meta.insert("degree".into(), json!(r.reduced.degree()));
    meta.insert("term_census".into(), census(&r.reduced));
    meta.insert("verification".into(), json!(report));
    meta.insert("input".into(), json!(file.metadata));
    let out = HamiltonianFile::new(r.reduced.clone(), r.total_vars, meta);
    write_json(&a.out, &out)?;
    let mut outputs = vec![a.out.as_path()];
    if let Some(ledger) = &a.ledger {
        write_json(ledger, &r.substitutions)?;
        outputs.push(ledger);
    }
    manifest.finish(&outputs)
}

pub fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let inputs: Vec<&Path> = a.input.as_deref().into_iter().collect();
    let manifest = RunManifest::new("spectrum", &inputs)?;
    let file = load(a.input.as_deref(), a.preset.as_deref())?;
    let h = to_spin_hamiltonian(&file.terms, file.num_vars)?;
    let trace = spectrum_trace(&h, a.points, a.levels)?;

    let mut csv = String::from("s");
    for k in 0..a.levels {
        write!(csv, ",E{k}").unwrap();
    }
    csv.push('\n');
    for p in &trace.points {
        csv.push_str(&fmt_float(p.s));
        for e in &p.eigenvalues {
            write!(csv, ",{}", fmt_float(*e)).unwrap();
        }
        csv.push('\n');
    }
    write_text(&a.out, &csv)?;
    let mut outputs = vec![a.out.as_path()];

    if let Some(path) = &a.snapshots {
        let mut snaps = String::from("s");
        for b in 0..h.dim() as u64 {
            write!(snaps, ",{}", display_bits(b, h.n_qubits)).unwrap();
        }
        snaps.push('\n');
        for p in &trace.points {
            snaps.push_str(&fmt_float(p.s));
            for x in &p.ground_probabilities {
                write!(snaps, ",{}", fmt_float(*x)).unwrap();
            }
            snaps.push('\n');
        }
        write_text(path, &snaps)?;
        outputs.push(path);
    }

    let fmt_opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.6}"));
    println!(
        "{} qubits, {} points: g_min = {:.6} at s = {:.4}, g_min(0,1) = {}, epsilon = {}",
        h.n_qubits,
        a.points,
        trace.g_min,
        trace.g_min_s,
        fmt_opt(trace.g_min_interior),
        fmt_opt(trace.epsilon)
    );
    if !trace.degenerate_s.is_empty() {
        println!(
            "  degenerate ground level at {} grid point(s)",
            trace.degenerate_s.len()
        );
    }

    if let Some(path) = &a.summary {
        let summary = json!({
            "n_qubits": h.n_qubits,
            "points": a.points,
            "levels": a.levels,
            "g_min": trace.g_min,
            "g_min_s": trace.g_min_s,
            "g_min_interior": trace.g_min_interior,
            "epsilon": trace.epsilon,
            "degenerate_s": trace.degenerate_s,
            "grid": trace.points.iter().map(|p| json!({
                "s": p.s,
                "gap": p.gap,
                "ground_degeneracy": p.ground_degeneracy,
                "epsilon": p.epsilon,
            })).collect::<Vec<_>>(),
        });
        write_json(path, &summary)?;
        outputs.push(path);
    }
    manifest.finish(&outputs)
}

pub fn enumerate(a: &EnumerateArgs) -> Result<(), CliError> {
    let manifest = RunManifest::new("enumerate", &[])?;
    let seq = parse_sequence(&a.sequence)?;
    let r = enumerate_native(&seq, a.dim, a.long_run)?;
    println!(
        "{} in {}D: min energy {}, {} minimizing walks",
        sequence_string(&seq),
        a.dim,
        r.min_energy,
        r.degeneracy
    );
    let out = json!({
        "sequence": sequence_string(&seq),
        "dimension": a.dim,
        "min_energy": r.min_energy,
        "degeneracy": r.degeneracy,
        "witness": r.witness.coordinates,
    });
    write_json(&a.out, &out)?;
    manifest.finish(&[&a.out])
}

pub fn count(a: &CountArgs) -> Result<(), CliError> {
    let manifest = RunManifest::new("count", &[])?;
    let inst = LatticeInstance::parse(&a.sequence, a.dim)?;
    let r = resource_report(&inst)?;
    println!(
        "{inst}: {} free + {} ancilla = {} qubits",
        r.free_qubits, r.ancilla_qubits, r.total_qubits
    );
    for (k, bound) in &r.per_locality_bound {
        let actual = r.per_locality_actual.get(k).copied().unwrap_or(0);
        let mark = if actual == *bound { "" } else { "  (differs)" };
        println!("  k = {k:2}: {actual} of {bound}{mark}");
    }
    write_json(&a.out, &r)?;
    manifest.finish(&[&a.out])
}
