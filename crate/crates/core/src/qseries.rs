//! Gaussian binomials, q-Pochhammer symbols, and the terminating basic
//! hypergeometric series that yields the eigenvalue table of a dual polar
//! scheme.
//!
//! All quantities are exact. Powers of q are carried with doubled exponents
//! (`QPower`) because the family constant e may be half-integral; every
//! doubled exponent that reaches an evaluation is even over the base prime
//! power, so values stay rational.

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::forms::Params;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum QSeriesError {
    #[error("theta mismatch at j = {j}: hypergeometric route gives {got}, eigenvalue formula gives {expected}")]
    ThetaMismatch { j: usize, expected: String, got: String },
}

/// A signed power ±q^(two_exp/2), kept symbolic until evaluated against
/// concrete instance parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QPower {
    pub sign: i8,
    /// Twice the exponent of q.
    pub two_exp: i64,
}

impl QPower {
    pub fn new(sign: i8, two_exp: i64) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        QPower { sign, two_exp }
    }

    pub fn eval(&self, params: &Params) -> BigRational {
        let v = params.q_pow(self.two_exp);
        if self.sign >= 0 {
            v
        } else {
            -v
        }
    }
}

/// [i; 1]_q = (q^i - 1)/(q - 1) for i >= 1, and 0 for i < 1.
pub fn gauss_bracket(i: i64, q: u64) -> BigInt {
    if i < 1 {
        return BigInt::zero();
    }
    let q = BigInt::from(q);
    (q.pow(i as u32) - 1) / (q - 1)
}

/// The Gaussian binomial [n; k]_q as a ratio of bracket products; zero
/// whenever the selection is infeasible (k < 0 or k > n).
pub fn gauss_binom(n: i64, k: i64, q: u64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..k {
        num *= gauss_bracket(n - t, q);
        den *= gauss_bracket(k - t, q);
    }
    let (quot, rem) = num::Integer::div_rem(&num, &den);
    debug_assert!(rem.is_zero(), "Gaussian binomial division is always exact");
    quot
}

/// The q-Pochhammer symbol (a; q)_t = (1 - a)(1 - aq)...(1 - aq^{t-1}),
/// with the empty product 1 at t = 0.
pub fn pochhammer(a: QPower, params: &Params, t: usize) -> BigRational {
    let a = a.eval(params);
    let mut acc = BigRational::one();
    let mut aq = a;
    let q = params.q_pow(2);
    for _ in 0..t {
        acc *= BigRational::one() - &aq;
        aq *= &q;
    }
    acc
}

/// The terminating basic hypergeometric sum u_i(theta_j): four numerator /
/// two denominator Pochhammer factors per term, summed for t = 0..min(i, j).
/// Termination is asserted, not assumed: the first skipped term must have a
/// vanishing numerator, and no retained denominator factor may vanish.
pub fn u_series(i: usize, j: usize, params: &Params) -> BigRational {
    let d = params.d;
    assert!(i <= d && j <= d, "class and eigenspace indices range over 0..=d");
    let a1 = QPower::new(1, -2 * (i as i64)); // q^{-i}
    let a2 = QPower::new(1, -2 * (j as i64)); // q^{-j}
    let a3 = QPower::new(-1, 2 * (j as i64 - d as i64) - params.two_e()); // -q^{-d-e+j}
    let b1 = QPower::new(1, -2 * (d as i64)); // q^{-d}
    let b2 = QPower::new(1, 2); // q

    let top = i.min(j);
    let mut sum = BigRational::zero();
    for t in 0..=top {
        let num = pochhammer(a1, params, t)
            * pochhammer(a2, params, t)
            * pochhammer(a3, params, t)
            * params.q_pow(2 * t as i64);
        let den = pochhammer(b1, params, t) * pochhammer(b2, params, t);
        assert!(!den.is_zero(), "denominator Pochhammer vanished at t = {t}");
        sum += num / den;
    }
    // The t = top + 1 term (and hence all later ones) dies in the numerator.
    let cut = pochhammer(a1, params, top + 1) * pochhammer(a2, params, top + 1);
    assert!(cut.is_zero(), "series failed to terminate after t = {top}");
    sum
}

/// Valency of the distance-i relation: k_i = [d; i]_q q^{(i^2 - i)/2 + i e}.
pub fn valency(params: &Params, i: usize) -> BigInt {
    let i = i as i64;
    let binom = gauss_binom(params.d as i64, i, params.q());
    let power = params.q_pow_int(i * i - i + i * params.two_e());
    binom * power
}

/// Eigenvalues and dual data of the scheme: u[i][j] = u_i(theta_j),
/// p[i][j] = k_i u_i(theta_j), theta[j] = p_1(j), k[i] the valencies.
#[derive(Debug, Clone)]
pub struct EigenvalueTable {
    pub d: usize,
    pub theta: Vec<BigRational>,
    pub u: Vec<Vec<BigRational>>,
    pub p: Vec<Vec<BigRational>>,
    pub k: Vec<BigInt>,
}

/// Builds the full eigenvalue table via the hypergeometric route and checks
/// the theta column against the closed-form Laplacian eigenvalues.
pub fn eigen_table(params: &Params) -> Result<EigenvalueTable, QSeriesError> {
    let d = params.d;
    let k: Vec<BigInt> = (0..=d).map(|i| valency(params, i)).collect();
    let u: Vec<Vec<BigRational>> = (0..=d)
        .map(|i| (0..=d).map(|j| u_series(i, j, params)).collect())
        .collect();
    let p: Vec<Vec<BigRational>> = (0..=d)
        .map(|i| {
            let ki = BigRational::from_integer(k[i].clone());
            (0..=d).map(|j| &ki * &u[i][j]).collect()
        })
        .collect();
    let theta: Vec<BigRational> = (0..=d).map(|j| p[1][j].clone()).collect();

    for j in 0..=d {
        let expected = crate::spectral::mu(params, j);
        if theta[j] != expected {
            return Err(QSeriesError::ThetaMismatch {
                j,
                expected: expected.to_string(),
                got: theta[j].to_string(),
            });
        }
        assert!(p[0][j].is_one(), "p_0(j) must be 1");
    }
    for i in 0..=d {
        assert_eq!(
            p[i][0],
            BigRational::from_integer(k[i].clone()),
            "p_i(0) must equal the valency k_i"
        );
    }
    Ok(EigenvalueTable { d, theta, u, p, k })
}

/// Checks the finite Newton identity
/// prod_{k=0}^{n-1} (1 + q^k t) = sum_{k=0}^{n} q^{k(k-1)/2} [n; k]_q t^k
/// at a concrete evaluation point t.
pub fn newton_identity_check(n: usize, t: QPower, params: &Params) -> bool {
    let tv = t.eval(params);
    let mut lhs = BigRational::one();
    for k in 0..n as i64 {
        lhs *= BigRational::one() + params.q_pow(2 * k) * &tv;
    }
    let mut rhs = BigRational::zero();
    let mut t_pow = BigRational::one();
    for k in 0..=n as i64 {
        let coeff = BigRational::from_integer(gauss_binom(n as i64, k, params.q()))
            * params.q_pow(k * k - k);
        rhs += coeff * &t_pow;
        t_pow *= &tv;
    }
    lhs == rhs
}

/// Number of rank-l lattice elements:
/// [d; l]_q prod_{i=0}^{l-1} (1 + q^{d+e-i-1}).
pub fn level_count(params: &Params, l: usize) -> BigInt {
    let mut acc = gauss_binom(params.d as i64, l as i64, params.q());
    for i in 0..l as i64 {
        let factor = BigInt::one()
            + params.q_pow_int(2 * (params.d as i64 - i - 1) + params.two_e());
        acc *= factor;
    }
    acc
}

/// Number of maximal isotropic subspaces above a fixed rank-j element:
/// a_j = prod_{i=0}^{d-j-1} (1 + q^{e+i}); a_{d+1} = 0 for the sentinel.
pub fn coatom_count(params: &Params, j: usize) -> BigInt {
    if j == params.d + 1 {
        return BigInt::zero();
    }
    assert!(j <= params.d);
    let mut acc = BigInt::one();
    for i in 0..(params.d - j) as i64 {
        acc *= BigInt::one() + params.q_pow_int(params.two_e() + 2 * i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Family;

    fn params(family: Family, d: usize, r: u64) -> Params {
        Params::new(family, d, r)
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn bracket_and_binom_values() {
        assert_eq!(gauss_bracket(3, 2), BigInt::from(7));
        assert_eq!(gauss_bracket(0, 5), BigInt::zero());
        assert_eq!(gauss_bracket(-2, 5), BigInt::zero());
        assert_eq!(gauss_binom(4, 2, 2), BigInt::from(35));
        assert_eq!(gauss_binom(6, 3, 2), BigInt::from(1395));
        assert_eq!(gauss_binom(2, 1, 3), BigInt::from(4));
        assert_eq!(gauss_binom(5, 0, 7), BigInt::one());
        assert_eq!(gauss_binom(5, 5, 7), BigInt::one());
        assert_eq!(gauss_binom(3, 4, 2), BigInt::zero());
        assert_eq!(gauss_binom(3, -1, 2), BigInt::zero());
    }

    #[test]
    fn q_pascal_recurrences() {
        for q in [2u64, 3, 4] {
            let qb = BigInt::from(q);
            for n in 1..=12i64 {
                for k in 0..=12i64 {
                    let lhs = gauss_binom(n, k, q);
                    let a = gauss_binom(n - 1, k - 1, q) + qb.pow(k as u32) * gauss_binom(n - 1, k, q);
                    assert_eq!(lhs, a, "first recurrence at n={n} k={k} q={q}");
                    if n >= k {
                        let b = qb.pow((n - k) as u32) * gauss_binom(n - 1, k - 1, q)
                            + gauss_binom(n - 1, k, q);
                        assert_eq!(lhs, b, "second recurrence at n={n} k={k} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn pochhammer_edges() {
        let p = params(Family::C, 2, 2);
        assert!(pochhammer(QPower::new(1, 4), &p, 0).is_one());
        // (q^{-i}; q)_{i+1} contains the factor 1 - q^0 = 0.
        assert!(pochhammer(QPower::new(1, -4), &p, 3).is_zero());
        assert!(!pochhammer(QPower::new(1, -4), &p, 2).is_zero());
        // (1/2; 2)_2 = (1 - 1/2)(1 - 1) = 0 would need a = q^{-1}, check a value:
        let v = pochhammer(QPower::new(-1, 0), &p, 2); // (-1; 2)_2 = (1+1)(1+2) = 6
        assert_eq!(v, rat(6));
    }

    #[test]
    fn u_series_known_value() {
        // C_2(2): u_1(theta_1) = mu_1 / k_1 = 1/6.
        let p = params(Family::C, 2, 2);
        assert_eq!(
            u_series(1, 1, &p),
            BigRational::new(BigInt::one(), BigInt::from(6))
        );
        assert!(u_series(0, 2, &p).is_one());
    }

    #[test]
    fn eigen_table_c2_and_c3() {
        let t2 = eigen_table(&params(Family::C, 2, 2)).unwrap();
        assert_eq!(t2.theta, vec![rat(6), rat(1), rat(-3)]);
        assert_eq!(t2.k, vec![1.into(), 6.into(), 8.into()]);

        let t3 = eigen_table(&params(Family::C, 3, 2)).unwrap();
        assert_eq!(t3.theta, vec![rat(14), rat(5), rat(-1), rat(-7)]);
        assert_eq!(t3.k, vec![1.into(), 14.into(), 56.into(), 64.into()]);
        let total: BigInt = t3.k.iter().sum();
        assert_eq!(total, BigInt::from(135));
    }

    #[test]
    fn eigen_table_half_integral_families() {
        // 2A_4(2): q = 4, e = 3/2.
        let t = eigen_table(&params(Family::TwoAOdd, 2, 2)).unwrap();
        assert_eq!(t.k[1], BigInt::from(40)); // [2;1]_4 * q^{3/2} = 5 * 8
        let total: BigInt = t.k.iter().sum();
        assert_eq!(total, BigInt::from(297));

        let t = eigen_table(&params(Family::TwoAEven, 2, 2)).unwrap();
        let total: BigInt = t.k.iter().sum();
        assert_eq!(total, BigInt::from(27));
    }

    #[test]
    fn newton_identity_examples() {
        // n = 2, q = 2, t = q: (1+2)(1+4) = 15 = 1 + [2;1] q^0 t + q [2;2] t^2
        let p = params(Family::C, 2, 2);
        assert!(newton_identity_check(2, QPower::new(1, 2), &p));
        assert!(newton_identity_check(3, QPower::new(1, 0), &p));
        for n in 0..=8 {
            assert!(newton_identity_check(n, QPower::new(1, p.two_e()), &p));
        }
        // Half-integral exponent point t = q^{3/2} over q = 4.
        let h = params(Family::TwoAOdd, 2, 2);
        for n in 0..=8 {
            assert!(newton_identity_check(n, QPower::new(1, h.two_e()), &h));
        }
    }

    #[test]
    fn level_counts_frozen() {
        let table: [(Family, usize, u64, &[u64]); 7] = [
            (Family::C, 2, 2, &[1, 15, 15]),
            (Family::C, 3, 2, &[1, 63, 315, 135]),
            (Family::B, 2, 3, &[1, 40, 40]),
            (Family::D, 3, 2, &[1, 35, 105, 30]),
            (Family::TwoD, 2, 2, &[1, 27, 45]),
            (Family::TwoAOdd, 2, 2, &[1, 165, 297]),
            (Family::TwoAEven, 2, 2, &[1, 45, 27]),
        ];
        for (family, d, r, counts) in table {
            let p = params(family, d, r);
            for (l, &expected) in counts.iter().enumerate() {
                assert_eq!(
                    level_count(&p, l),
                    BigInt::from(expected),
                    "{} level {l}",
                    p.label()
                );
            }
        }
    }

    #[test]
    fn coatom_counts_frozen() {
        let p = params(Family::C, 2, 2);
        let a: Vec<BigInt> = (0..=3).map(|j| coatom_count(&p, j)).collect();
        assert_eq!(a, vec![15.into(), 3.into(), 1.into(), 0.into()]);

        let p3 = params(Family::C, 3, 2);
        // a_1 counts maximals above a line: the residue there is the d = 2
        // instance over the same field, so a_1 = (1 + q)(1 + q^2) = 15.
        let a3: Vec<BigInt> = (0..=4).map(|j| coatom_count(&p3, j)).collect();
        assert_eq!(a3, vec![135.into(), 15.into(), 3.into(), 1.into(), 0.into()]);

        // Recursion a_j = (1 + q^{d-j-1+e}) a_{j+1} across all families.
        for (family, d, r) in [
            (Family::B, 2, 3),
            (Family::D, 3, 2),
            (Family::TwoD, 2, 2),
            (Family::TwoAOdd, 2, 2),
            (Family::TwoAEven, 2, 2),
        ] {
            let p = params(family, d, r);
            for j in 0..p.d {
                let factor = BigInt::one()
                    + p.q_pow_int(2 * (p.d as i64 - j as i64 - 1) + p.two_e());
                assert_eq!(
                    coatom_count(&p, j),
                    factor * coatom_count(&p, j + 1),
                    "{} at j = {j}",
                    p.label()
                );
            }
        }
    }

    #[test]
    fn valency_closed_form() {
        let p = params(Family::D, 3, 2);
        assert_eq!(valency(&p, 1), BigInt::from(7));
        let p = params(Family::C, 2, 2);
        assert_eq!(valency(&p, 1), BigInt::from(6));
        assert_eq!(valency(&p, 2), BigInt::from(8));
    }
}
