//! The lattice of totally isotropic subspaces of a formed space, graded by
//! dimension, with an adjoined maximum.
//!
//! Levels are built by upward extension: a rank-(l+1) element is the span of
//! a rank-l element U and an isotropic vector of perp(U) \ U, and every
//! rank-(l+1) element arises this way from each of its hyperplanes. Each
//! level is deduplicated through canonical RREF bases and kept sorted, so
//! positions are deterministic. Construction cross-checks every level
//! cardinality and every coatom count against the closed-form products; a
//! disagreement is an error, never a warning.

use std::collections::{BTreeSet, HashMap};

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{make_space, FormError, FormedSpace, Params};
use crate::par;
use crate::qseries::{coatom_count, gauss_binom, level_count};
use crate::subspace::{intersect, is_rref, span_sum, Subspace};

#[derive(Debug, Error, PartialEq, Clone)]
pub enum LatticeError {
    #[error("Witt index mismatch: expected top rank {expected}, enumeration reached {got}")]
    WittIndexMismatch { expected: usize, got: usize },
    #[error("count mismatch ({context}): expected {expected}, got {got}")]
    CountMismatch {
        context: String,
        expected: BigInt,
        got: BigInt,
    },
    #[error("element does not belong to this lattice")]
    NotInLattice,
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error("malformed lattice data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// The graded lattice: levels 0..=d of isotropic subspaces plus the sentinel
/// top of rank d+1. Vertices of the dual polar graph are the rank-d level.
#[derive(Debug)]
pub struct PolarLattice {
    space: FormedSpace,
    levels: Vec<Vec<Subspace>>,
    index: HashMap<Subspace, (usize, usize)>,
    /// up[l][i]: indices into level l+1 of the covers of levels[l][i].
    up: Vec<Vec<Vec<u32>>>,
    /// down[l][i]: indices into level l-1 of the elements covered by
    /// levels[l][i]; down[0] is empty.
    down: Vec<Vec<Vec<u32>>>,
    /// a[j] = number of maximal elements above any rank-j element, for
    /// j = 0..=d, plus a[d+1] = 0 for the sentinel.
    a: Vec<BigInt>,
}

/// Serializable form of a lattice: the parameters and the level bases.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LatticeJson {
    pub params: Params,
    pub levels: Vec<Vec<Subspace>>,
}

impl PolarLattice {
    /// Enumerates the full lattice of the given formed space.
    pub fn enumerate(space: FormedSpace) -> Result<Self, LatticeError> {
        let levels = build_levels(&space, true);
        Self::from_levels(space, levels)
    }

    /// Sequential twin of [`PolarLattice::enumerate`], for benchmarking.
    pub fn enumerate_seq(space: FormedSpace) -> Result<Self, LatticeError> {
        let levels = build_levels(&space, false);
        Self::from_levels(space, levels)
    }

    /// Assembles and fully validates a lattice from prebuilt levels: shape,
    /// canonical bases, isotropy, ordering, level cardinalities, and coatom
    /// counts are all checked here.
    pub fn from_levels(
        space: FormedSpace,
        levels: Vec<Vec<Subspace>>,
    ) -> Result<Self, LatticeError> {
        let params = space.params();
        let d = params.d;
        if levels.len() != d + 1 {
            return Err(LatticeError::WittIndexMismatch {
                expected: d,
                got: levels.len().saturating_sub(1),
            });
        }
        let field = space.field();
        let n = space.ambient_dim();
        for (l, level) in levels.iter().enumerate() {
            let expected = level_count(&params, l);
            if BigInt::from(level.len()) != expected {
                return Err(LatticeError::CountMismatch {
                    context: format!("level {l} cardinality"),
                    expected,
                    got: level.len().into(),
                });
            }
            for pair in level.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(LatticeError::Malformed(format!(
                        "level {l} is not strictly sorted"
                    )));
                }
            }
            for s in level {
                if s.is_top() || s.ambient_dim() != n || s.dim() != l {
                    return Err(LatticeError::Malformed(format!(
                        "level {l} contains an element of the wrong shape"
                    )));
                }
                if !is_rref(field, s.basis()) {
                    return Err(LatticeError::Malformed(format!(
                        "level {l} contains a non-canonical basis"
                    )));
                }
                if !space.is_isotropic(s)? {
                    return Err(LatticeError::Malformed(format!(
                        "level {l} contains a non-isotropic subspace"
                    )));
                }
            }
        }

        let mut index = HashMap::new();
        for (l, level) in levels.iter().enumerate() {
            for (i, s) in level.iter().enumerate() {
                index.insert(s.clone(), (l, i));
            }
        }

        // Cover lists between adjacent levels.
        let mut up: Vec<Vec<Vec<u32>>> = Vec::with_capacity(d);
        let mut down: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
        for l in 0..d {
            let (lower, upper) = (&levels[l], &levels[l + 1]);
            let down_next: Vec<Vec<u32>> = par::map_indexed(upper.len(), |i| {
                let big = &upper[i];
                lower
                    .iter()
                    .enumerate()
                    .filter(|(_, small)| big.contains(field, small))
                    .map(|(j, _)| j as u32)
                    .collect()
            });
            let mut up_l: Vec<Vec<u32>> = vec![Vec::new(); lower.len()];
            for (i, smalls) in down_next.iter().enumerate() {
                for &j in smalls {
                    up_l[j as usize].push(i as u32);
                }
            }
            up.push(up_l);
            down.push(down_next);
        }

        let lattice = PolarLattice {
            space,
            levels,
            index,
            up,
            down,
            a: Vec::new(),
        };

        // Coatom counts a_j, verified for one representative per level here
        // (constancy over whole levels is `a_counts`).
        let mut a = Vec::with_capacity(d + 2);
        for j in 0..=d {
            let counted = BigInt::from(lattice.vertices_above(&lattice.levels[j][0]).len());
            let expected = coatom_count(&params, j);
            if counted != expected {
                return Err(LatticeError::CountMismatch {
                    context: format!("coatom count above a rank-{j} element"),
                    expected,
                    got: counted,
                });
            }
            a.push(counted);
        }
        a.push(BigInt::zero());
        Ok(PolarLattice { a, ..lattice })
    }

    pub fn space(&self) -> &FormedSpace {
        &self.space
    }

    pub fn params(&self) -> Params {
        self.space.params()
    }

    pub fn d(&self) -> usize {
        self.params().d
    }

    pub fn levels(&self) -> &[Vec<Subspace>] {
        &self.levels
    }

    pub fn level(&self, l: usize) -> &[Subspace] {
        &self.levels[l]
    }

    /// The vertex set of the dual polar graph: the maximal isotropic level.
    pub fn vertices(&self) -> &[Subspace] {
        &self.levels[self.d()]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices().len()
    }

    /// Total number of lattice elements including the sentinel top.
    pub fn size(&self) -> usize {
        self.levels.iter().map(Vec::len).sum::<usize>() + 1
    }

    /// The coatom counts a_0..a_{d+1}.
    pub fn a(&self) -> &[BigInt] {
        &self.a
    }

    pub fn top(&self) -> Subspace {
        Subspace::top(self.space.ambient_dim())
    }

    pub fn bottom(&self) -> Subspace {
        Subspace::zero(self.space.ambient_dim())
    }

    /// Lattice rank: linear dimension for subspaces, d+1 for the top.
    pub fn rank_of(&self, x: &Subspace) -> usize {
        if x.is_top() {
            self.d() + 1
        } else {
            x.dim()
        }
    }

    pub fn index_of(&self, x: &Subspace) -> Option<(usize, usize)> {
        self.index.get(x).copied()
    }

    /// Greatest lower bound: subspace intersection; the top is neutral.
    pub fn meet(&self, x: &Subspace, y: &Subspace) -> Subspace {
        if x.is_top() {
            return y.clone();
        }
        if y.is_top() {
            return x.clone();
        }
        intersect(self.space.field(), x, y)
    }

    /// Least upper bound: the linear span if it is isotropic, otherwise the
    /// top.
    pub fn join(&self, x: &Subspace, y: &Subspace) -> Subspace {
        if x.is_top() || y.is_top() {
            return self.top();
        }
        let span = span_sum(self.space.field(), x, y);
        if span.dim() <= self.d() && self.space.is_isotropic(&span).expect("same ambient space") {
            span
        } else {
            self.top()
        }
    }

    /// Whether `upper` covers `lower` (contains it with rank exactly one
    /// higher).
    pub fn covers(&self, upper: &Subspace, lower: &Subspace) -> bool {
        self.rank_of(upper) == self.rank_of(lower) + 1
            && upper.contains(self.space.field(), lower)
    }

    /// Cover indices in level l+1 above element i of level l.
    pub fn up_covers(&self, l: usize, i: usize) -> &[u32] {
        &self.up[l][i]
    }

    /// Cover indices in level l-1 below element i of level l.
    pub fn down_covers(&self, l: usize, i: usize) -> &[u32] {
        &self.down[l][i]
    }

    /// Indices of the level-l elements contained in `s`.
    pub fn members_below(&self, l: usize, s: &Subspace) -> Vec<u32> {
        let field = self.space.field();
        self.levels[l]
            .iter()
            .enumerate()
            .filter(|(_, z)| s.contains(field, z))
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Indices of the vertices (maximal elements) above `z`.
    pub fn vertices_above(&self, z: &Subspace) -> Vec<u32> {
        let field = self.space.field();
        self.vertices()
            .iter()
            .enumerate()
            .filter(|(_, x)| x.contains(field, z))
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// The 0/1 indicator of `z` over the vertex set: entry x is 1 iff
    /// z <= x. The top yields the zero vector, the bottom all ones.
    pub fn indicator(&self, z: &Subspace) -> Vec<i64> {
        let mut v = vec![0i64; self.num_vertices()];
        if z.is_top() {
            return v;
        }
        for i in self.vertices_above(z) {
            v[i as usize] = 1;
        }
        v
    }

    /// Verifies that the number of maximal elements above z depends only on
    /// the rank of z, equals the closed-form product, and satisfies the
    /// one-step recursion between ranks; returns the sequence a_0..a_{d+1}.
    pub fn a_counts(&self) -> Result<Vec<BigInt>, LatticeError> {
        let params = self.params();
        for (j, level) in self.levels.iter().enumerate() {
            let expected = coatom_count(&params, j);
            let bad = par::find_witness(level.len(), |i| {
                let counted = BigInt::from(self.vertices_above(&level[i]).len());
                (counted != expected).then_some((i, counted))
            });
            if let Some((i, counted)) = bad {
                return Err(LatticeError::CountMismatch {
                    context: format!("coatom count above element {i} of level {j}"),
                    expected,
                    got: counted,
                });
            }
        }
        let mut a: Vec<BigInt> = (0..=params.d)
            .map(|j| coatom_count(&params, j))
            .collect();
        a.push(BigInt::zero());
        for j in 0..params.d {
            let factor = BigInt::one()
                + params.q_pow_int(2 * (params.d as i64 - j as i64 - 1) + params.two_e());
            if a[j] != &factor * &a[j + 1] {
                return Err(LatticeError::CountMismatch {
                    context: format!("coatom recursion at rank {j}"),
                    expected: factor * &a[j + 1],
                    got: a[j].clone(),
                });
            }
        }
        Ok(a)
    }

    /// Counts isotropic subspaces U of rank k+l+m with dim(U meet W) = m and
    /// dim(U meet perp(W)) = l+m, and checks the count against the
    /// closed-form product before returning it.
    pub fn bcn_count(
        &self,
        w: &Subspace,
        k: usize,
        l: usize,
        m: usize,
    ) -> Result<BigInt, LatticeError> {
        let params = self.params();
        let d = params.d;
        let (j, _) = self.index_of(w).ok_or(LatticeError::NotInLattice)?;
        let s = k + l + m;
        if s > d {
            return Err(LatticeError::InvalidArguments(format!(
                "target rank k+l+m = {s} exceeds d = {d}"
            )));
        }
        let field = self.space.field();
        let perp_w = self.space.perp(w)?;
        let hits: Vec<bool> = par::map_indexed(self.levels[s].len(), |i| {
            let u = &self.levels[s][i];
            intersect(field, u, w).dim() == m && intersect(field, u, &perp_w).dim() == l + m
        });
        let count = BigInt::from(hits.iter().filter(|&&h| h).count());

        let (j_i, k_i, l_i, m_i, d_i) = (j as i64, k as i64, l as i64, m as i64, d as i64);
        let two_exp = 2 * l_i * (j_i - m_i)
            + k_i * (2 * (2 * d_i - j_i - m_i - 2 * l_i - 1) + params.two_e())
            - k_i * (k_i - 1);
        let q = params.q();
        let mut expected = params.q_pow(two_exp)
            * BigRational::from_integer(gauss_binom(j_i, m_i, q))
            * BigRational::from_integer(gauss_binom(j_i - m_i, k_i, q))
            * BigRational::from_integer(gauss_binom(d_i - j_i, l_i, q));
        for i in 0..l_i {
            expected *= BigRational::one()
                + params.q_pow(2 * (d_i - j_i - i - 1) + params.two_e());
        }
        if BigRational::from_integer(count.clone()) != expected {
            return Err(LatticeError::CountMismatch {
                context: format!("subspace count at (j, k, l, m) = ({j}, {k}, {l}, {m})"),
                expected: expected.to_integer(),
                got: count,
            });
        }
        Ok(count)
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            params: self.params(),
            levels: self.levels.clone(),
        }
    }

    /// Rebuilds a lattice from its serialized form, revalidating everything.
    pub fn from_json(json: LatticeJson) -> Result<Self, LatticeError> {
        let space = make_space(json.params.family, json.params.d, json.params.r)?;
        Self::from_levels(space, json.levels)
    }
}

/// All isotropic subspace levels of a formed space, from rank 0 up to the
/// Witt index, discovered by upward extension until no extension exists.
pub(crate) fn isotropic_levels(space: &FormedSpace) -> Vec<Vec<Subspace>> {
    build_levels(space, true)
}

fn build_levels(space: &FormedSpace, parallel: bool) -> Vec<Vec<Subspace>> {
    let n = space.ambient_dim();
    let field = space.field();
    let mut levels = vec![vec![Subspace::zero(n)]];

    // Rank 1: normalized isotropic vectors, one representative per line.
    let mut atoms: Vec<Subspace> = Vec::new();
    let mut v = vec![0u32; n];
    while next_vector(field.q() as u32, &mut v) {
        if v.iter().find(|&&c| c != 0) != Some(&1) {
            continue;
        }
        if space.vector_isotropic(&v) {
            atoms.push(Subspace::from_rows(field, n, &[v.clone()]));
        }
    }
    atoms.sort();
    if atoms.is_empty() {
        return levels;
    }
    levels.push(atoms);

    loop {
        let prev = levels.last().unwrap();
        let chunks: Vec<Vec<Subspace>> = if parallel {
            par::map_indexed(prev.len(), |i| extend_one(space, &prev[i]))
        } else {
            par::map_indexed_seq(prev.len(), |i| extend_one(space, &prev[i]))
        };
        let merged: BTreeSet<Subspace> = chunks.into_iter().flatten().collect();
        if merged.is_empty() {
            break;
        }
        levels.push(merged.into_iter().collect());
    }
    levels
}

/// All one-step isotropic extensions of `u`: spans of u with an isotropic
/// vector of perp(u) outside u.
fn extend_one(space: &FormedSpace, u: &Subspace) -> Vec<Subspace> {
    let field = space.field();
    let n = space.ambient_dim();
    let perp = space.perp(u).expect("lattice elements live in the ambient space");
    let mut out = Vec::new();
    for w in perp.all_vectors(field) {
        if w.iter().all(|&c| c == 0)
            || u.contains_vector(field, &w)
            || !space.vector_isotropic(&w)
        {
            continue;
        }
        let mut rows: Vec<Vec<u32>> = u.basis().to_vec();
        rows.push(w);
        out.push(Subspace::from_rows(field, n, &rows));
    }
    out
}

/// Odometer increment over GF(q)^n vectors in code order; false after the
/// last vector.
fn next_vector(q: u32, v: &mut [u32]) -> bool {
    for digit in v.iter_mut() {
        *digit += 1;
        if *digit < q {
            return true;
        }
        *digit = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Family;

    fn lattice(family: Family, d: usize, r: u64) -> PolarLattice {
        PolarLattice::enumerate(make_space(family, d, r).unwrap()).unwrap()
    }

    #[test]
    fn c22_level_structure() {
        let lat = lattice(Family::C, 2, 2);
        let counts: Vec<usize> = lat.levels().iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 15, 15]);
        assert_eq!(lat.size(), 32);
        assert_eq!(
            lat.a(),
            &[BigInt::from(15), 3.into(), 1.into(), 0.into()]
        );
        // Deterministic positions: every element finds itself.
        for (l, level) in lat.levels().iter().enumerate() {
            for (i, s) in level.iter().enumerate() {
                assert_eq!(lat.index_of(s), Some((l, i)));
            }
        }
    }

    #[test]
    fn sequential_enumeration_is_identical() {
        let a = lattice(Family::B, 2, 2);
        let b = PolarLattice::enumerate_seq(make_space(Family::B, 2, 2).unwrap()).unwrap();
        assert_eq!(a.levels(), b.levels());
    }

    #[test]
    fn witt_index_check_via_forms() {
        assert_eq!(
            make_space(Family::C, 2, 2).unwrap().witt_index_check().unwrap(),
            2
        );
        assert_eq!(
            make_space(Family::TwoAEven, 2, 2)
                .unwrap()
                .witt_index_check()
                .unwrap(),
            2
        );
    }

    #[test]
    fn meet_join_basics() {
        let lat = lattice(Family::C, 2, 2);
        let field = lat.space().field();
        let e1 = Subspace::from_rows(field, 4, &[vec![1, 0, 0, 0]]);
        let e2 = Subspace::from_rows(field, 4, &[vec![0, 1, 0, 0]]);
        let e3 = Subspace::from_rows(field, 4, &[vec![0, 0, 1, 0]]);
        // omega(e1, e2) = 0: the span is a Lagrangian.
        let j12 = lat.join(&e1, &e2);
        assert_eq!(lat.rank_of(&j12), 2);
        assert!(lat.index_of(&j12).is_some());
        // omega(e1, e3) = 1: the span is not isotropic, so the join is top.
        let j13 = lat.join(&e1, &e3);
        assert!(j13.is_top());
        assert_eq!(lat.rank_of(&j13), 3);
        // Meets: top is neutral, intersection otherwise.
        assert_eq!(lat.meet(&lat.top(), &e1), e1);
        assert_eq!(lat.meet(&j12, &e1), e1);
        assert_eq!(lat.meet(&e1, &e2).dim(), 0);
    }

    #[test]
    fn covers_and_cover_lists() {
        let lat = lattice(Family::C, 2, 2);
        let bottom = lat.bottom();
        let atom = lat.level(1)[0].clone();
        assert!(lat.covers(&atom, &bottom));
        assert!(!lat.covers(&bottom, &atom));
        assert!(!lat.covers(&lat.top(), &atom));
        // Every atom sits under a_1 = 3 maximal elements, reached through
        // exactly 3 covers here (d = 2, so covers of atoms are maximal).
        for i in 0..lat.level(1).len() {
            assert_eq!(lat.up_covers(1, i).len(), 3);
            for &j in lat.up_covers(1, i) {
                assert!(lat.covers(&lat.level(2)[j as usize], &lat.level(1)[i]));
            }
        }
        // down covers of a maximal: its [2;1]_2 = 3 isotropic lines.
        for i in 0..lat.num_vertices() {
            assert_eq!(lat.down_covers(2, i).len(), 3);
        }
    }

    #[test]
    fn modularity_holds_below_top() {
        let lat = lattice(Family::C, 2, 2);
        for x in lat.level(1) {
            for y in lat.level(1) {
                let join = lat.join(x, y);
                if join.is_top() {
                    continue;
                }
                let meet = lat.meet(x, y);
                assert_eq!(
                    lat.rank_of(&join) + lat.rank_of(&meet),
                    lat.rank_of(x) + lat.rank_of(y)
                );
            }
        }
    }

    #[test]
    fn indicator_vectors() {
        let lat = lattice(Family::C, 2, 2);
        assert_eq!(lat.indicator(&lat.bottom()), vec![1i64; 15]);
        assert!(lat.indicator(&lat.top()).iter().all(|&x| x == 0));
        for (j, level) in lat.levels().iter().enumerate() {
            for z in level {
                let total: i64 = lat.indicator(z).iter().sum();
                assert_eq!(BigInt::from(total), lat.a()[j], "rank {j}");
            }
        }
    }

    #[test]
    fn a_counts_exhaustive() {
        let lat = lattice(Family::C, 2, 2);
        assert_eq!(
            lat.a_counts().unwrap(),
            vec![BigInt::from(15), 3.into(), 1.into(), 0.into()]
        );
        let lat = lattice(Family::TwoAEven, 2, 2);
        assert_eq!(
            lat.a_counts().unwrap(),
            vec![BigInt::from(27), 3.into(), 1.into(), 0.into()]
        );
    }

    #[test]
    fn bcn_counts_small_cases() {
        let lat = lattice(Family::C, 2, 2);
        let atom = &lat.level(1)[4];
        // Extensions of an atom to a maximal: (k, l, m) = (0, 1, 1).
        assert_eq!(lat.bcn_count(atom, 0, 1, 1).unwrap(), BigInt::from(3));
        // Atoms meeting W trivially and not perpendicular to it: in Sp(4, 2)
        // the perp of a line holds [3;1]_2 = 7 of the 15 lines, leaving 8.
        assert_eq!(lat.bcn_count(atom, 1, 0, 0).unwrap(), BigInt::from(8));
        // Whole level counts from the bottom element.
        let bottom = lat.bottom();
        assert_eq!(lat.bcn_count(&bottom, 0, 1, 0).unwrap(), BigInt::from(15));
        assert_eq!(lat.bcn_count(&bottom, 0, 2, 0).unwrap(), BigInt::from(15));
        // From the bottom, everything lies in perp(0), so k > 0 counts zero.
        assert_eq!(lat.bcn_count(&bottom, 1, 0, 0).unwrap(), BigInt::from(0));
        // Errors.
        assert!(matches!(
            lat.bcn_count(&lat.top(), 0, 1, 0),
            Err(LatticeError::NotInLattice)
        ));
        assert!(matches!(
            lat.bcn_count(atom, 2, 1, 0),
            Err(LatticeError::InvalidArguments(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let lat = lattice(Family::B, 2, 3);
        let json = lat.to_json();
        let text = serde_json::to_string(&json).unwrap();
        let parsed: LatticeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, json);
        let rebuilt = PolarLattice::from_json(parsed).unwrap();
        assert_eq!(rebuilt.levels(), lat.levels());
        assert_eq!(rebuilt.a(), lat.a());
    }

    #[test]
    fn from_levels_rejects_corruption() {
        let lat = lattice(Family::C, 2, 2);
        let params = lat.params();

        let mut missing = lat.to_json();
        missing.levels[1].pop();
        assert!(matches!(
            PolarLattice::from_json(missing),
            Err(LatticeError::CountMismatch { .. })
        ));

        let mut unsorted = lat.to_json();
        unsorted.levels[2].swap(0, 1);
        assert!(matches!(
            PolarLattice::from_json(unsorted),
            Err(LatticeError::Malformed(_))
        ));

        let mut wrong_shape = lat.to_json();
        wrong_shape.levels.pop();
        assert_eq!(
            PolarLattice::from_json(wrong_shape).unwrap_err(),
            LatticeError::WittIndexMismatch {
                expected: params.d,
                got: 1
            }
        );
    }
}
