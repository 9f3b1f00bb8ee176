//! Built-in named inputs.

use crate::pbf::PseudoBooleanFunction as Pbf;

/// The 4-local toy energy
/// `1 + q1 - q2 + q3 + q4 - q1 q2 q3 + q1 q2 q3 q4`, with unique minimum 0 at
/// `q4 q3 q2 q1 = 0010`.
pub fn toy() -> Pbf {
    Pbf::from_terms([
        (vec![], 1),
        (vec![1], 1),
        (vec![2], -1),
        (vec![3], 1),
        (vec![4], 1),
        (vec![1, 2, 3], -1),
        (vec![1, 2, 3, 4], 1),
    ])
}

/// Looks up a preset by name.
pub fn by_name(name: &str) -> Option<Pbf> {
    match name {
        "toy" => Some(toy()),
        _ => None,
    }
}
