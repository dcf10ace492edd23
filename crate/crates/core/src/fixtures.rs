//! Reference complexes and signals used by the examples, tests and CLI.

use nalgebra::DVector;

use crate::complex::{Simplex, SimplicialComplex};
use crate::spectral;

/// Seven nodes, ten edges and the two filled triangles `(1,3,4)` and
/// `(5,6,7)`.
pub fn two_holes() -> SimplicialComplex {
    SimplicialComplex::from_vertex_lists(&[
        vec![1, 3, 4],
        vec![5, 6, 7],
        vec![1, 2],
        vec![2, 3],
        vec![3, 6],
        vec![4, 5],
    ])
    .expect("fixture simplices are increasing")
}

/// Conservative edge flow on [`two_holes`] in canonical edge order.
pub const INTERPOLATION_TRUTH: [f64; 10] = [-2.0, -2.0, 4.0, -2.0, 3.0, -7.0, 7.0, 3.0, 4.0, -4.0];

/// Labeled edges of the interpolation example.
pub const INTERPOLATION_LABELED_EDGES: [[usize; 2]; 5] = [[1, 3], [1, 4], [3, 6], [4, 5], [5, 6]];

/// Canonical indices of [`INTERPOLATION_LABELED_EDGES`] in [`two_holes`].
pub const INTERPOLATION_LABELED_INDICES: [usize; 5] = [1, 2, 5, 6, 7];

/// Harmonic part of the unit circulation around both holes of [`two_holes`]
/// (`1 -> 2 -> 3 -> 1` and `3 -> 4 -> 5 -> 6 -> 3`), scaled to unit max-norm.
pub fn harmonic_flow() -> DVector<f64> {
    let x = two_holes();
    let mut circulation = DVector::zeros(x.num_edges());
    for (a, b, sign) in [(1, 2, 1.0), (2, 3, 1.0), (1, 3, -1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 6, 1.0), (3, 6, -1.0)] {
        let e = Simplex::new(vec![a, b]).expect("increasing");
        circulation[x.index_of(&e).expect("edge of two_holes")] = sign;
    }
    let h = spectral::harmonic_projection(&x, 1, &circulation).expect("two_holes has edges");
    let scale = h.amax();
    h / scale
}

/// Cycle graph on four nodes without any filled triangle.
pub fn cycle4() -> SimplicialComplex {
    SimplicialComplex::from_vertex_lists(&[vec![1, 2], vec![2, 3], vec![3, 4], vec![1, 4]])
        .expect("fixture simplices are increasing")
}

/// One filled triangle.
pub fn filled_triangle() -> SimplicialComplex {
    SimplicialComplex::from_vertex_lists(&[vec![1, 2, 3]]).expect("fixture simplices are increasing")
}

/// Path graph `1 - 2 - ... - n`.
pub fn path(n: usize) -> SimplicialComplex {
    let lists: Vec<Vec<usize>> = if n == 1 { vec![vec![1]] } else { (1..n).map(|i| vec![i, i + 1]).collect() };
    SimplicialComplex::from_vertex_lists(&lists).expect("fixture simplices are increasing")
}
