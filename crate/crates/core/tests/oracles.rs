//! Independent recomputation of the frozen golden values: level counts by a
//! raw isotropy filter over echelon-pattern enumeration, graph distances by
//! breadth-first search, and the first frame constant by applying the Gram
//! operator directly.

mod common;

use std::collections::HashSet;

use common::{all_subspaces, bfs_distances, instance};
use dualpolar::forms::Family;
use dualpolar::frames;
use dualpolar::qseries;
use dualpolar::scheme::DualPolarGraph;
use dualpolar::spectral::SpectralDecomposition;
use dualpolar::subspace::intersect;
use dualpolar::verify;
use num::BigInt;

const LEVEL_GOLDENS: [(Family, usize, u64, &[usize]); 7] = [
    (Family::C, 2, 2, &[1, 15, 15]),
    (Family::C, 3, 2, &[1, 63, 315, 135]),
    (Family::B, 2, 3, &[1, 40, 40]),
    (Family::D, 3, 2, &[1, 35, 105, 30]),
    (Family::TwoD, 2, 2, &[1, 27, 45]),
    (Family::TwoAEven, 2, 2, &[1, 45, 27]),
    (Family::TwoAOdd, 2, 2, &[1, 165, 297]),
];

/// The enumerated levels must agree, as sets, with a brute-force filter of
/// every subspace of the right dimension, and both must match the goldens.
#[test]
fn isotropy_filter_reproduces_every_level() {
    for (family, d, r, golden) in LEVEL_GOLDENS {
        let lattice = instance(family, d, r);
        let label = lattice.params().label();
        let space = lattice.space();
        let field = space.field();
        let n = space.ambient_dim();
        for (l, &expected) in golden.iter().enumerate() {
            let brute: HashSet<_> = all_subspaces(field, n, l)
                .into_iter()
                .filter(|s| space.is_isotropic(s).expect("well-formed subspace"))
                .collect();
            assert_eq!(brute.len(), expected, "{label} level {l} by brute force");
            let enumerated: HashSet<_> = lattice.level(l).iter().cloned().collect();
            assert_eq!(brute, enumerated, "{label} level {l} set equality");
            assert_eq!(
                qseries::level_count(&lattice.params(), l),
                BigInt::from(expected),
                "{label} level {l} closed form"
            );
        }
    }
}

#[test]
fn maximal_counts_match_goldens() {
    let goldens = [15, 135, 40, 30, 45, 27, 297];
    for ((family, d, r), expected) in verify::default_matrix().into_iter().zip(goldens) {
        let lattice = instance(family, d, r);
        assert_eq!(lattice.num_vertices(), expected, "{}", lattice.params().label());
        assert_eq!(
            qseries::coatom_count(&lattice.params(), 0),
            BigInt::from(expected)
        );
    }
}

/// Graph distances computed through meets must match plain breadth-first
/// search over the adjacency relation, for every vertex pair.
#[test]
fn distances_match_breadth_first_search() {
    for (family, d, r) in verify::default_matrix() {
        let lattice = instance(family, d, r);
        let label = lattice.params().label();
        let graph = DualPolarGraph::from_lattice(&lattice).expect("distance-regular");
        let n = graph.num_vertices();
        let vertices = lattice.vertices();
        let field = lattice.space().field();

        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if intersect(field, &vertices[i], &vertices[j]).dim() == d - 1 {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        for x in 0..n {
            let dist = bfs_distances(&adjacency, x);
            for (y, found) in dist.iter().enumerate() {
                assert_eq!(
                    *found,
                    Some(graph.dist(x, y)),
                    "{label} distance ({x}, {y})"
                );
            }
        }
    }
}

/// Recovers the first frame constant by letting the atom Gram operator act
/// on a vector of the second eigenspace and reading off the eigenvalue; the
/// result fixes the frozen values and must agree with the closed form.
#[test]
fn first_frame_constant_rederived_from_the_gram_action() {
    for (family, d, r, expected) in [
        (Family::C, 2, 2, 4i64),
        (Family::C, 3, 2, 24),
        (Family::D, 3, 2, 12),
    ] {
        let lattice = instance(family, d, r);
        let label = lattice.params().label();
        let graph = DualPolarGraph::from_lattice(&lattice).expect("distance-regular");
        let decomposition = SpectralDecomposition::decompose(&graph).expect("spectrum");

        let mut e0 = vec![0i64; graph.num_vertices()];
        e0[0] = 1;
        let v = decomposition.project_numerator(1, &e0);
        let image = frames::u_matrix(&lattice, 1).matvec(&v);
        let pivot = v.iter().position(|&x| x != 0).expect("nonzero projection");
        assert_eq!(image[pivot] % v[pivot], 0, "{label} eigenvalue is integral");
        let lambda = image[pivot] / v[pivot];
        for (a, b) in v.iter().zip(&image) {
            assert_eq!(*b, lambda * *a, "{label} Gram action is scalar");
        }
        assert_eq!(lambda, expected, "{label} frame constant");
        assert_eq!(
            frames::frame_constant(&lattice.params(), 1).expect("integral constant"),
            BigInt::from(expected),
            "{label} closed form"
        );
    }
}
