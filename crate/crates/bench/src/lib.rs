//! Fixtures shared by the criterion benches.

use mathdsl_core::geometry::Transform;
use mathdsl_core::proof::{corpus, parse_proof, ProofScript};

/// Left-nested composition of `depth` alternating rotations and scalings.
pub fn transform_chain(depth: usize) -> Transform {
    (0..depth).fold(Transform::Identity, |t, k| {
        let step = if k % 2 == 0 {
            Transform::rotate(0.1 * k as f64).unwrap()
        } else {
            Transform::scale(1.0 + 0.01 * k as f64).unwrap()
        };
        t.then(step)
    })
}

/// Nested complex expression `(1 + 2i) * (3 - i) + ...` with `terms` factors.
pub fn expr_source(terms: usize) -> String {
    (0..terms).map(|k| format!("({k} + {}i)", k + 1)).collect::<Vec<_>>().join(" * ")
}

pub fn sup_chain() -> ProofScript {
    parse_proof(corpus::SUP_CHAIN).expect("bundled proof parses")
}
