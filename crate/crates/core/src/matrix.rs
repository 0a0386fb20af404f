//! Dense exact matrices: `i64` matrices for combinatorial operators
//! (adjacency and distance matrices, indicator Gram sums) and big-rational
//! matrices/vectors for spectral work. Multiplication skips zero
//! coefficients, which makes products against 0/1 operators cheap, and runs
//! data-parallel over output rows when the `parallel` feature is enabled.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::par;

/// Row-major integer matrix with overflow-checked arithmetic (the crate is
/// built with overflow checks on in every profile).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix {
            nrows,
            ncols,
            data: vec![0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut m = IntMatrix::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m.data[i * ncols + j] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut i64 {
        &mut self.data[i * self.ncols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols
            && (0..self.nrows)
                .all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, c: i64) -> IntMatrix {
        IntMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        IntMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        IntMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> i64 {
        assert_eq!(self.nrows, self.ncols);
        (0..self.nrows).map(|i| self.at(i, i)).sum()
    }

    /// Adds the outer product v v^T.
    pub fn add_outer(&mut self, v: &[i64]) {
        assert_eq!(v.len(), self.nrows);
        assert_eq!(self.nrows, self.ncols);
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            let row = &mut self.data[i * self.ncols..(i + 1) * self.ncols];
            for (x, &vj) in row.iter_mut().zip(v) {
                *x += vi * vj;
            }
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = IntMatrix::zeros(self.nrows, other.ncols);
        par::fill_rows(&mut out.data, other.ncols, |i, row| {
            self.mul_row_into(other, i, row);
        });
        out
    }

    /// Sequential twin of [`IntMatrix::mul`], for benchmarking both paths.
    pub fn mul_seq(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = IntMatrix::zeros(self.nrows, other.ncols);
        par::fill_rows_seq(&mut out.data, other.ncols, |i, row| {
            self.mul_row_into(other, i, row);
        });
        out
    }

    fn mul_row_into(&self, other: &IntMatrix, i: usize, row: &mut [i64]) {
        for k in 0..self.ncols {
            let a = self.at(i, k);
            if a == 0 {
                continue;
            }
            for (x, &b) in row.iter_mut().zip(other.row(k)) {
                *x += a * b;
            }
        }
    }

    pub fn matvec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.ncols);
        par::map_indexed(self.nrows, |i| {
            self.row(i)
                .iter()
                .zip(v)
                .filter(|(_, &vj)| vj != 0)
                .map(|(&a, &vj)| a * vj)
                .sum()
        })
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect(),
        }
    }

    /// Integer-by-rational product, skipping zero integer coefficients.
    pub fn mul_rational(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = RationalMatrix::zeros(self.nrows, other.ncols);
        par::fill_rows(&mut out.data, other.ncols, |i, row| {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                let a = BigRational::from_integer(a.into());
                for (x, b) in row.iter_mut().zip(other.row(k)) {
                    *x += &a * b;
                }
            }
        });
        out
    }
}

/// Dense exact rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RationalMatrix {
            nrows,
            ncols,
            data: vec![BigRational::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_fn(
        nrows: usize,
        ncols: usize,
        f: impl Fn(usize, usize) -> BigRational,
    ) -> Self {
        let data = (0..nrows)
            .flat_map(|i| (0..ncols).map(move |j| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        RationalMatrix {
            nrows,
            ncols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.data[i * self.ncols + j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols
            && (0..self.nrows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn scale(&self, c: &BigRational) -> RationalMatrix {
        RationalMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        RationalMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        RationalMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Subtracts c from the diagonal, i.e. self - c*I.
    pub fn sub_scalar_diag(&self, c: &BigRational) -> RationalMatrix {
        assert_eq!(self.nrows, self.ncols);
        let mut out = self.clone();
        for i in 0..self.nrows {
            let x = out.at_mut(i, i);
            *x -= c;
        }
        out
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = RationalMatrix::zeros(self.nrows, other.ncols);
        par::fill_rows(&mut out.data, other.ncols, |i, row| {
            self.mul_row_into(other, i, row);
        });
        out
    }

    /// Sequential twin of [`RationalMatrix::mul`], for benchmarking both paths.
    pub fn mul_seq(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = RationalMatrix::zeros(self.nrows, other.ncols);
        par::fill_rows_seq(&mut out.data, other.ncols, |i, row| {
            self.mul_row_into(other, i, row);
        });
        out
    }

    fn mul_row_into(&self, other: &RationalMatrix, i: usize, row: &mut [BigRational]) {
        for k in 0..self.ncols {
            let a = self.at(i, k);
            if a.is_zero() {
                continue;
            }
            for (x, b) in row.iter_mut().zip(other.row(k)) {
                if !b.is_zero() {
                    *x += a * b;
                }
            }
        }
    }

    pub fn matvec(&self, v: &RationalVector) -> RationalVector {
        assert_eq!(v.len(), self.ncols);
        RationalVector(par::map_indexed(self.nrows, |i| {
            let mut acc = BigRational::zero();
            for (a, b) in self.row(i).iter().zip(v.as_slice()) {
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            acc
        }))
    }

    pub fn transpose(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.ncols, self.nrows, |i, j| self.at(j, i).clone())
    }

    pub fn trace(&self) -> BigRational {
        assert_eq!(self.nrows, self.ncols);
        (0..self.nrows).map(|i| self.at(i, i)).sum()
    }

    /// Exact rank by fraction-preserving Gaussian elimination, choosing among
    /// the candidate pivots the entry of smallest bit size to limit
    /// intermediate growth (pivot choice affects only speed, never the
    /// result).
    pub fn rank(&self) -> usize {
        let bit_size =
            |x: &BigRational| x.numer().abs().to_biguint().unwrap().bits()
                + x.denom().abs().to_biguint().unwrap().bits();
        let mut m = self.data.clone();
        let (nrows, ncols) = (self.nrows, self.ncols);
        let mut pivot_row = 0;
        for col in 0..ncols {
            if pivot_row == nrows {
                break;
            }
            let mut best: Option<usize> = None;
            for r in pivot_row..nrows {
                if m[r * ncols + col].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(r),
                    Some(b) => {
                        if bit_size(&m[r * ncols + col]) < bit_size(&m[b * ncols + col]) {
                            Some(r)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let Some(src) = best else { continue };
            if src != pivot_row {
                for j in 0..ncols {
                    m.swap(pivot_row * ncols + j, src * ncols + j);
                }
            }
            let pivot = m[pivot_row * ncols + col].clone();
            for r in (pivot_row + 1)..nrows {
                let factor = &m[r * ncols + col] / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in col..ncols {
                    let sub = &factor * &m[pivot_row * ncols + j];
                    m[r * ncols + j] -= sub;
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }
}

/// Dense exact rational vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalVector(Vec<BigRational>);

impl RationalVector {
    pub fn zeros(n: usize) -> Self {
        RationalVector(vec![BigRational::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RationalVector(v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn from_vec(v: Vec<BigRational>) -> Self {
        RationalVector(v)
    }

    pub fn ones(n: usize) -> Self {
        RationalVector(vec![BigRational::one(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.0
    }

    pub fn at(&self, i: usize) -> &BigRational {
        &self.0[i]
    }

    pub fn at_mut(&mut self, i: usize) -> &mut BigRational {
        &mut self.0[i]
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut BigRational> {
        self.0.iter_mut()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RationalVector) -> BigRational {
        assert_eq!(self.len(), other.len());
        let mut acc = BigRational::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> BigRational {
        self.dot(self)
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len());
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len());
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &BigRational) -> RationalVector {
        RationalVector(self.0.iter().map(|a| a * c).collect())
    }

    /// self += c * other
    pub fn axpy(&mut self, c: &BigRational, other: &RationalVector) {
        assert_eq!(self.len(), other.len());
        if c.is_zero() {
            return;
        }
        for (x, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *x += c * b;
            }
        }
    }

    pub fn hadamard(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len());
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }
}

/// Renders a rational as `p` or `p/q` for reports.
pub fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the `p` / `p/q` form produced by [`rational_string`].
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let mut parts = s.splitn(2, '/');
    let numer: BigInt = parts.next()?.trim().parse().ok()?;
    match parts.next() {
        None => Some(BigRational::from_integer(numer)),
        Some(d) => {
            let denom: BigInt = d.trim().parse().ok()?;
            (!denom.is_zero()).then(|| BigRational::new(numer, denom))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn int_matrix_product() {
        let a = IntMatrix::from_fn(2, 3, |i, j| (i * 3 + j) as i64);
        let b = IntMatrix::from_fn(3, 2, |i, j| (i * 2 + j) as i64 + 1);
        let c = a.mul(&b);
        // [[0,1,2],[3,4,5]] * [[1,2],[3,4],[5,6]] = [[13,16],[40,52]]
        assert_eq!(c.at(0, 0), 13);
        assert_eq!(c.at(0, 1), 16);
        assert_eq!(c.at(1, 0), 40);
        assert_eq!(c.at(1, 1), 52);
        assert_eq!(c, a.mul_seq(&b));
    }

    #[test]
    fn int_matrix_outer_and_matvec() {
        let mut m = IntMatrix::zeros(3, 3);
        m.add_outer(&[1, 0, 2]);
        m.add_outer(&[0, 1, 1]);
        assert_eq!(m.at(0, 2), 2);
        assert_eq!(m.at(2, 2), 5);
        assert!(m.is_symmetric());
        assert_eq!(m.matvec(&[1, 1, 1]), vec![3, 2, 8]);
    }

    #[test]
    fn rational_product_and_matvec() {
        let a = RationalMatrix::from_fn(2, 2, |i, j| ratio(1, (i + j + 1) as i64));
        let b = RationalMatrix::identity(2).scale(&rat(3));
        let c = a.mul(&b);
        assert_eq!(c.at(0, 1), &ratio(3, 2));
        assert_eq!(c, a.mul_seq(&b));
        let v = RationalVector::from_ints(&[2, 4]);
        let av = a.matvec(&v);
        assert_eq!(av.at(0), &rat(4)); // 2*1 + 4*(1/2)
        assert_eq!(av.at(1), &ratio(7, 3)); // 2*(1/2) + 4*(1/3)
    }

    #[test]
    fn rank_examples() {
        let singular = RationalMatrix::from_fn(2, 2, |i, j| rat([[1, 2], [2, 4]][i][j]));
        assert_eq!(singular.rank(), 1);
        assert_eq!(RationalMatrix::identity(5).rank(), 5);
        let m = RationalMatrix::from_fn(3, 4, |i, j| rat([[1, 0, 2, 3], [0, 1, 1, 1], [1, 1, 3, 4]][i][j]));
        assert_eq!(m.rank(), 2);
        assert_eq!(RationalMatrix::zeros(3, 3).rank(), 0);
    }

    #[test]
    fn int_rational_bridge() {
        let a = IntMatrix::from_fn(2, 2, |i, j| if i == j { 2 } else { 0 });
        let b = RationalMatrix::from_fn(2, 2, |_, _| ratio(1, 3));
        let c = a.mul_rational(&b);
        assert_eq!(c.at(0, 0), &ratio(2, 3));
        assert_eq!(a.to_rational().mul(&b), c);
    }

    #[test]
    fn vector_ops() {
        let mut v = RationalVector::from_ints(&[1, 2, 3]);
        let w = RationalVector::from_ints(&[1, 1, 1]);
        assert_eq!(v.dot(&w), rat(6));
        v.axpy(&ratio(1, 2), &w);
        assert_eq!(v.at(0), &ratio(3, 2));
        assert_eq!(v.hadamard(&w), v);
        assert!(v.sub(&v).is_zero());
    }

    #[test]
    fn rational_string_round_trip() {
        assert_eq!(rational_string(&rat(-7)), "-7");
        assert_eq!(rational_string(&ratio(3, 4)), "3/4");
        assert_eq!(parse_rational("3/4"), Some(ratio(3, 4)));
        assert_eq!(parse_rational("-7"), Some(rat(-7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational(""), None);
    }
}
