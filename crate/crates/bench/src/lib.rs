//! Fixtures shared by the benchmarks.

use hermdens::{HermitianGram, JordanComponent, JordanDecomposition, Ring, Tail};

/// Normal-form Gram matrix of the given shape, optionally conjugated.
pub fn lattice(delta: i64, shape: &[(i64, usize, Tail)], conjugate: Option<u64>) -> HermitianGram {
    let ring = Ring::new(24, delta).expect("ring");
    let comps = shape
        .iter()
        .map(|&(s, r, t)| JordanComponent::new(s, r, t, delta).expect("shape"))
        .collect();
    let g = JordanDecomposition::from_components(ring, comps)
        .expect("components")
        .normal_gram();
    match conjugate {
        Some(seed) => g.random_isometry_conjugate(seed).0,
        None => g,
    }
}

/// Rank-6 lattice touching every parity type.
pub fn mixed_rank_six(conjugate: Option<u64>) -> HermitianGram {
    lattice(
        3,
        &[
            (0, 1, Tail::Unit { a: 3 }),
            (1, 2, Tail::H1),
            (2, 2, Tail::A12b1 { b: 1 }),
            (4, 1, Tail::Unit { a: 1 }),
        ],
        conjugate,
    )
}
