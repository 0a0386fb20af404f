//! Brute-force oracles shared by the integration suites. Everything here
//! recomputes quantities by a route independent of the library's own
//! enumeration: subspaces come straight from echelon patterns, and distances
//! from breadth-first search.

#![allow(dead_code)]

use std::collections::VecDeque;

use dualpolar::forms::{make_space, Family};
use dualpolar::gf::FieldSpec;
use dualpolar::lattice::PolarLattice;
use dualpolar::subspace::Subspace;

/// All k-subsets of 0..n, lexicographic.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for c in start..n {
            current.push(c);
            extend(c + 1, n, k, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    extend(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Every k-dimensional subspace of GF(q)^n, one per reduced row-echelon
/// pattern: a pivot-column set plus an assignment of the free entries. This
/// hits each subspace exactly once, with no reference to any form.
pub fn all_subspaces(field: &FieldSpec, n: usize, k: usize) -> Vec<Subspace> {
    let codes: Vec<u32> = field.elements().collect();
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for c in (p + 1)..n {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut digits = vec![0usize; free.len()];
        loop {
            let mut rows = vec![vec![field.zero(); n]; k];
            for (i, &p) in pivots.iter().enumerate() {
                rows[i][p] = field.one();
            }
            for (slot, &(row, col)) in free.iter().enumerate() {
                rows[row][col] = codes[digits[slot]];
            }
            out.push(Subspace::from_rows(field, n, &rows));
            let mut carry = true;
            for digit in digits.iter_mut() {
                *digit += 1;
                if *digit < codes.len() {
                    carry = false;
                    break;
                }
                *digit = 0;
            }
            if carry {
                break;
            }
        }
    }
    out
}

/// Breadth-first distances from `start` over adjacency lists; `None` marks
/// unreachable vertices.
pub fn bfs_distances(adjacency: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adjacency.len()];
    let mut queue = VecDeque::new();
    dist[start] = Some(0usize);
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        let next = dist[v].expect("queued vertices have distances") + 1;
        for &w in &adjacency[v] {
            if dist[w].is_none() {
                dist[w] = Some(next);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Builds and fully enumerates one instance.
pub fn instance(family: Family, d: usize, r: u64) -> PolarLattice {
    let space = make_space(family, d, r).expect("valid instance parameters");
    PolarLattice::enumerate(space).expect("enumeration succeeds")
}
