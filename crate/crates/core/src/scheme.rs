//! The dual polar graph on maximal isotropic subspaces and the metric
//! association scheme it generates.
//!
//! Two maximals are adjacent when their intersection has codimension one;
//! the graph distance then equals d minus the dimension of the meet, which
//! is how distances are computed here (no path search). Distance
//! regularity is not assumed: `intersection_numbers` counts the triple
//! table from one base pair per distance and then proves constancy over
//! every pair, plus the defining matrix identities, before handing the
//! table out.

use num::BigInt;
use thiserror::Error;

use crate::forms::Params;
use crate::lattice::PolarLattice;
use crate::matrix::IntMatrix;
use crate::par;
use crate::qseries::valency;
use crate::subspace::intersect;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum SchemeError {
    #[error("not distance-regular: {0}")]
    NotDistanceRegular(String),
    #[error("malformed distance structure: {0}")]
    MalformedDistances(String),
}

/// The dual polar graph with its full distance matrix.
#[derive(Debug, Clone)]
pub struct DualPolarGraph {
    params: Params,
    n: usize,
    /// Row-major n x n matrix of pairwise distances.
    dist: Vec<u8>,
}

/// The intersection numbers p[h][i][j] of the metric scheme: the number of
/// vertices at distance i from x and j from y, for any pair at distance h.
pub type IntersectionNumbers = Vec<Vec<Vec<i64>>>;

impl DualPolarGraph {
    /// Builds the graph from an enumerated lattice, computing each distance
    /// as d - dim(meet) and validating the metric axioms that are cheap to
    /// state (symmetry, zero diagonal, diameter d attained).
    pub fn from_lattice(lattice: &PolarLattice) -> Result<Self, SchemeError> {
        let params = lattice.params();
        let d = params.d;
        let vertices = lattice.vertices();
        let n = vertices.len();
        let field = lattice.space().field();

        let mut dist = vec![0u8; n * n];
        par::fill_rows(&mut dist, n, |i, row| {
            for (j, slot) in row.iter_mut().enumerate() {
                let common = intersect(field, &vertices[i], &vertices[j]).dim();
                *slot = (d - common) as u8;
            }
        });

        let graph = DualPolarGraph { params, n, dist };
        for i in 0..n {
            if graph.dist(i, i) != 0 {
                return Err(SchemeError::MalformedDistances(format!(
                    "vertex {i} at nonzero distance from itself"
                )));
            }
            for j in 0..i {
                if graph.dist(i, j) != graph.dist(j, i) {
                    return Err(SchemeError::MalformedDistances(format!(
                        "asymmetric distance between {i} and {j}"
                    )));
                }
                if graph.dist(i, j) == 0 {
                    return Err(SchemeError::MalformedDistances(format!(
                        "distinct vertices {i} and {j} at distance zero"
                    )));
                }
            }
        }
        if n > 1 && !(0..n).any(|j| graph.dist(0, j) == d) {
            return Err(SchemeError::MalformedDistances(format!(
                "diameter {d} not attained from vertex 0"
            )));
        }
        Ok(graph)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> usize {
        self.params.d
    }

    pub fn dist(&self, i: usize, j: usize) -> usize {
        self.dist[i * self.n + j] as usize
    }

    /// The 0/1 adjacency matrix of the distance-i class.
    pub fn adjacency_matrix(&self, i: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                if self.dist(r, c) == i {
                    *m.at_mut(r, c) = 1;
                }
            }
        }
        m
    }

    /// Neighbors of `v` in the distance-i class.
    pub fn class_neighbors(&self, v: usize, i: usize) -> Vec<u32> {
        (0..self.n)
            .filter(|&w| self.dist(v, w) == i)
            .map(|w| w as u32)
            .collect()
    }

    /// Computes the intersection numbers and proves the scheme axioms
    /// exactly: constancy of p[h][i][j] over every vertex pair, the
    /// valency identities against the closed form, and the matrix
    /// identities A_i A_j = sum_h p[h][i][j] A_h.
    pub fn intersection_numbers(&self) -> Result<IntersectionNumbers, SchemeError> {
        let d = self.params.d;
        let n = self.n;

        // Reference tables from vertex 0's distance classes.
        let mut reference: Vec<Option<Vec<Vec<i64>>>> = vec![None; d + 1];
        for y in 0..n {
            let h = self.dist(0, y);
            if reference[h].is_none() {
                reference[h] = Some(self.pair_table(0, y));
            }
        }
        let reference: Vec<Vec<Vec<i64>>> = reference
            .into_iter()
            .enumerate()
            .map(|(h, t)| {
                t.ok_or_else(|| {
                    SchemeError::MalformedDistances(format!(
                        "no pair at distance {h} from vertex 0"
                    ))
                })
            })
            .collect::<Result<_, _>>()?;

        // Constancy over all pairs.
        let witness = par::find_witness(n, |x| {
            for y in 0..n {
                let h = self.dist(x, y);
                if self.pair_table(x, y) != reference[h] {
                    return Some((x, y, h));
                }
            }
            None
        });
        if let Some((x, y, h)) = witness {
            return Err(SchemeError::NotDistanceRegular(format!(
                "pair ({x}, {y}) at distance {h} has a deviant intersection table"
            )));
        }

        // Valency identities: row sums, delta rows, symmetry, closed form.
        let k: Vec<i64> = (0..=d).map(|i| reference[0][i][i]).collect();
        for i in 0..=d {
            let closed = valency(&self.params, i);
            if BigInt::from(k[i]) != closed {
                return Err(SchemeError::NotDistanceRegular(format!(
                    "valency k_{i} = {} differs from the closed form {closed}",
                    k[i]
                )));
            }
        }
        for h in 0..=d {
            for i in 0..=d {
                for j in 0..=d {
                    if reference[h][i][j] != reference[h][j][i] {
                        return Err(SchemeError::NotDistanceRegular(format!(
                            "table asymmetry at ({h}, {i}, {j})"
                        )));
                    }
                    if h != j && reference[h][0][j] != 0 || h == j && reference[h][0][j] != 1 {
                        return Err(SchemeError::NotDistanceRegular(format!(
                            "delta row broken at ({h}, 0, {j})"
                        )));
                    }
                }
                let row_sum: i64 = reference[h][i].iter().sum();
                if row_sum != k[i] {
                    return Err(SchemeError::NotDistanceRegular(format!(
                        "row sum at (h, i) = ({h}, {i}) is {row_sum}, expected k_{i} = {}",
                        k[i]
                    )));
                }
            }
        }

        // Bose-Mesner identities, exactly, in integer arithmetic.
        let adjacency: Vec<IntMatrix> = (0..=d).map(|i| self.adjacency_matrix(i)).collect();
        for i in 0..=d {
            for j in i..=d {
                let product = adjacency[i].mul(&adjacency[j]);
                let mut combo = IntMatrix::zeros(n, n);
                for (h, a_h) in adjacency.iter().enumerate() {
                    combo = combo.add(&a_h.scale(reference[h][i][j]));
                }
                if product != combo {
                    return Err(SchemeError::NotDistanceRegular(format!(
                        "A_{i} A_{j} is not the p-weighted sum of the classes"
                    )));
                }
            }
        }
        Ok(reference)
    }

    /// The (d+1) x (d+1) distance-distribution table of one vertex pair.
    fn pair_table(&self, x: usize, y: usize) -> Vec<Vec<i64>> {
        let d = self.params.d;
        let mut counts = vec![vec![0i64; d + 1]; d + 1];
        let row_x = &self.dist[x * self.n..(x + 1) * self.n];
        let row_y = &self.dist[y * self.n..(y + 1) * self.n];
        for z in 0..self.n {
            counts[row_x[z] as usize][row_y[z] as usize] += 1;
        }
        counts
    }

    /// DOT rendering of the adjacency (distance-1) graph.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph dual_polar {\n");
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.dist(i, j) == 1 {
                    out.push_str(&format!("  {i} -- {j};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// CSV rendering of the intersection numbers, one `h,i,j,p` row per
    /// entry.
    pub fn intersection_csv(&self) -> Result<String, SchemeError> {
        let p = self.intersection_numbers()?;
        let mut out = String::from("h,i,j,p\n");
        for (h, table) in p.iter().enumerate() {
            for (i, row) in table.iter().enumerate() {
                for (j, value) in row.iter().enumerate() {
                    out.push_str(&format!("{h},{i},{j},{value}\n"));
                }
            }
        }
        Ok(out)
    }
}
