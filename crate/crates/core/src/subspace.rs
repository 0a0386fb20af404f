//! Subspaces of GF(q)^n in canonical reduced row echelon form.
//!
//! A `Subspace` is either an ordinary subspace, stored as the unique RREF
//! basis of its row space (so structural equality is subspace equality), or
//! the tagged sentinel `top` used by the polar lattice for the adjoined
//! maximum, which is not a subspace of the ambient space.
//!
//! Vectors are slices of field element codes (see [`crate::gf`]); all
//! operations take the field explicitly.

use serde::{Deserialize, Serialize};

use crate::gf::FieldSpec;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    /// RREF basis rows with strictly increasing pivot columns; empty for the
    /// zero subspace and for the sentinel.
    rows: Vec<Vec<u32>>,
    is_top: bool,
}

impl Subspace {
    /// The zero subspace of GF(q)^n.
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            is_top: false,
        }
    }

    /// The adjoined lattice maximum. Not a subspace; most operations reject it.
    pub fn top(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            is_top: true,
        }
    }

    /// Canonicalizes the row space of `rows` into a subspace.
    pub fn from_rows(field: &FieldSpec, ambient: usize, rows: &[Vec<u32>]) -> Self {
        let mut m: Vec<Vec<u32>> = rows.to_vec();
        rref(field, &mut m);
        Subspace {
            ambient,
            rows: m,
            is_top: false,
        }
    }

    pub fn is_top(&self) -> bool {
        self.is_top
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Dimension of an ordinary subspace. The sentinel has no dimension.
    pub fn dim(&self) -> usize {
        debug_assert!(!self.is_top, "the lattice top has no linear dimension");
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        debug_assert!(!self.is_top);
        &self.rows
    }

    pub fn contains_vector(&self, field: &FieldSpec, v: &[u32]) -> bool {
        if self.is_top {
            return true;
        }
        reduce_vector(field, &self.rows, v).iter().all(|&c| c == 0)
    }

    /// Whether `other <= self` as subspaces; the sentinel contains everything.
    pub fn contains(&self, field: &FieldSpec, other: &Subspace) -> bool {
        if self.is_top {
            return true;
        }
        if other.is_top {
            return false;
        }
        other
            .rows
            .iter()
            .all(|r| self.contains_vector(field, r))
    }

    /// Every vector of the subspace, by enumerating coefficient combinations
    /// of the basis in ascending packed-code order.
    pub fn all_vectors(&self, field: &FieldSpec) -> Vec<Vec<u32>> {
        debug_assert!(!self.is_top);
        let q = field.q();
        let dim = self.rows.len();
        let total = q.pow(dim as u32);
        let mut out = Vec::with_capacity(total as usize);
        for mut combo in 0..total {
            let mut v = vec![0u32; self.ambient];
            for row in &self.rows {
                let c = (combo % q) as u32;
                combo /= q;
                if c != 0 {
                    for (vi, &ri) in v.iter_mut().zip(row) {
                        *vi = field.add(*vi, field.mul(c, ri));
                    }
                }
            }
            out.push(v);
        }
        out
    }

    /// A stable key for ordering and hashing within a fixed ambient space.
    pub fn key(&self) -> (bool, usize, Vec<u32>) {
        (
            self.is_top,
            self.rows.len(),
            self.rows.iter().flatten().copied().collect(),
        )
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

/// In-place reduction to canonical RREF: unit pivots, zeros above and below,
/// strictly increasing pivot columns, zero rows dropped.
pub fn rref(field: &FieldSpec, rows: &mut Vec<Vec<u32>>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(src) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, src);
        let scale = field
            .inv(rows[pivot_row][col])
            .expect("pivot entry is nonzero");
        if scale != field.one() {
            for x in rows[pivot_row].iter_mut() {
                *x = field.mul(*x, scale);
            }
        }
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pivot_row || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &p) in row.iter_mut().zip(&pivot) {
                *x = field.sub(*x, field.mul(factor, p));
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.retain(|r| r.iter().any(|&c| c != 0));
}

/// Checks that `rows` is already in canonical RREF.
pub fn is_rref(field: &FieldSpec, rows: &[Vec<u32>]) -> bool {
    let mut copy = rows.to_vec();
    rref(field, &mut copy);
    copy == rows
}

/// Remainder of `v` after elimination against RREF `rows`; the zero vector
/// iff `v` lies in their span.
fn reduce_vector(field: &FieldSpec, rows: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
    let mut v = v.to_vec();
    for row in rows {
        let pivot = row
            .iter()
            .position(|&c| c != 0)
            .expect("RREF basis has no zero rows");
        let factor = v[pivot];
        if factor != 0 {
            for (x, &r) in v.iter_mut().zip(row) {
                *x = field.sub(*x, field.mul(factor, r));
            }
        }
    }
    v
}

/// Rank of an arbitrary list of vectors.
pub fn rank(field: &FieldSpec, rows: &[Vec<u32>]) -> usize {
    let mut m = rows.to_vec();
    rref(field, &mut m);
    m.len()
}

/// Basis of the right kernel {x : M x = 0} of the matrix with the given rows.
pub fn kernel(field: &FieldSpec, rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
    let mut m = rows.to_vec();
    rref(field, &mut m);
    let pivots: Vec<usize> = m
        .iter()
        .map(|r| r.iter().position(|&c| c != 0).unwrap())
        .collect();
    let mut basis = Vec::with_capacity(ncols - pivots.len());
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        // x_free = 1, other free coordinates 0; pivot coordinates determined.
        let mut v = vec![0u32; ncols];
        v[free] = 1;
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = field.neg(row[free]);
        }
        basis.push(v);
    }
    rref(field, &mut basis);
    basis
}

/// The sum (linear span of the union) of two subspaces.
pub fn span_sum(field: &FieldSpec, a: &Subspace, b: &Subspace) -> Subspace {
    debug_assert!(!a.is_top && !b.is_top);
    let mut rows: Vec<Vec<u32>> = a.rows.iter().chain(&b.rows).cloned().collect();
    rref(field, &mut rows);
    Subspace {
        ambient: a.ambient,
        rows,
        is_top: false,
    }
}

/// Intersection of two subspaces by the Zassenhaus block trick: reducing
/// rows [A | A] and [B | 0], the right halves of rows whose left half
/// vanished form a basis of the intersection.
pub fn intersect(field: &FieldSpec, a: &Subspace, b: &Subspace) -> Subspace {
    debug_assert!(!a.is_top && !b.is_top);
    let n = a.ambient;
    let mut block: Vec<Vec<u32>> = Vec::with_capacity(a.rows.len() + b.rows.len());
    for r in &a.rows {
        let mut row = r.clone();
        row.extend_from_slice(r);
        block.push(row);
    }
    for r in &b.rows {
        let mut row = r.clone();
        row.extend(std::iter::repeat(0).take(n));
        block.push(row);
    }
    rref(field, &mut block);
    let mut rows: Vec<Vec<u32>> = block
        .into_iter()
        .filter(|row| row[..n].iter().all(|&c| c == 0))
        .map(|row| row[n..].to_vec())
        .collect();
    rref(field, &mut rows);
    Subspace {
        ambient: n,
        rows,
        is_top: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, k: u32) -> FieldSpec {
        FieldSpec::new(p, k).unwrap()
    }

    #[test]
    fn rref_is_canonical_across_generating_sets() {
        let f = gf(3, 1);
        let a = Subspace::from_rows(&f, 3, &[vec![1, 2, 0], vec![0, 1, 1]]);
        // Same space, different generators: swap, scale by 2, add rows.
        let b = Subspace::from_rows(&f, 3, &[vec![0, 2, 2], vec![2, 1, 0], vec![1, 0, 1]]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert!(is_rref(&f, a.basis()));
    }

    #[test]
    fn rref_drops_dependent_rows() {
        let f = gf(2, 1);
        let s = Subspace::from_rows(&f, 4, &[vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 1, 1, 1]]);
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn kernel_matches_definition() {
        let f = gf(2, 1);
        let m = vec![vec![1, 0, 1], vec![0, 1, 1]];
        let k = kernel(&f, &m, 3);
        assert_eq!(k, vec![vec![1, 1, 1]]);

        let f3 = gf(3, 1);
        let m3 = vec![vec![1, 2, 0, 1]];
        let k3 = kernel(&f3, &m3, 4);
        assert_eq!(k3.len(), 3);
        // Every kernel vector annihilates every row.
        let span = Subspace::from_rows(&f3, 4, &k3);
        for v in span.all_vectors(&f3) {
            for row in &m3 {
                let dot = row
                    .iter()
                    .zip(&v)
                    .fold(0, |acc, (&a, &b)| f3.add(acc, f3.mul(a, b)));
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn intersection_matches_brute_force() {
        let f = gf(3, 1);
        let a = Subspace::from_rows(&f, 4, &[vec![1, 0, 1, 0], vec![0, 1, 0, 2]]);
        let b = Subspace::from_rows(&f, 4, &[vec![1, 1, 1, 2], vec![0, 0, 1, 1]]);
        let meet = intersect(&f, &a, &b);
        let expected: Vec<Vec<u32>> = a
            .all_vectors(&f)
            .into_iter()
            .filter(|v| b.contains_vector(&f, v))
            .collect();
        let brute = Subspace::from_rows(&f, 4, &expected);
        assert_eq!(meet, brute);
        assert!(a.contains(&f, &meet));
        assert!(b.contains(&f, &meet));
    }

    #[test]
    fn span_sum_contains_both_summands() {
        let f = gf(2, 2);
        let a = Subspace::from_rows(&f, 3, &[vec![1, 2, 0]]);
        let b = Subspace::from_rows(&f, 3, &[vec![0, 1, 3]]);
        let s = span_sum(&f, &a, &b);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&f, &a));
        assert!(s.contains(&f, &b));
    }

    #[test]
    fn all_vectors_has_full_cardinality() {
        let f = gf(2, 1);
        let s = Subspace::from_rows(&f, 5, &[vec![1, 0, 0, 1, 0], vec![0, 1, 1, 0, 0]]);
        let vs = s.all_vectors(&f);
        assert_eq!(vs.len(), 4);
        let mut dedup = vs.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 4);
    }

    #[test]
    fn top_sentinel_behaviour() {
        let f = gf(2, 1);
        let top = Subspace::top(4);
        let s = Subspace::from_rows(&f, 4, &[vec![1, 0, 0, 0]]);
        assert!(top.is_top());
        assert!(top.contains(&f, &s));
        assert!(!s.contains(&f, &top));
        assert!(top.contains_vector(&f, &[1, 1, 1, 1]));
    }
}
