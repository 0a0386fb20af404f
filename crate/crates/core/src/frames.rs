//! Tight frames of projected rank indicators.
//!
//! For each rank j, the projections u-check = E_j iota(u) of the rank-j
//! indicators form a tight frame for the eigenspace V_j, with the frame
//! constant lambda_j equal to the eigenvalue of the Gram-sum operator
//! U^j = sum over l of [l; j] A_{d-l} on V_j. This module builds U^j both
//! as a Gram sum of indicator outer products and from the distance
//! classes, evaluates lambda_j from the hypergeometric eigenvalue table
//! and from the closed product for j = 1, and proves the frame identities
//! exactly: the frame operator equals lambda_j E_j, reconstruction holds
//! coefficient-for-coefficient on sample functions, and the first
//! projection is recovered from the frame alone (no idempotents) via
//! pi_1(h) = sum over atoms of <iota(tau), h> / lambda_1 tau-check.
//!
//! Heavy identities run in overflow-checked integers using the scaled
//! frame vectors c_j u-check = N_j iota(u); only sample reconstructions
//! use big-rational vectors directly.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::forms::Params;
use crate::lattice::PolarLattice;
use crate::matrix::{IntMatrix, RationalVector};
use crate::qseries::{eigen_table, gauss_binom, QSeriesError};
use crate::scheme::DualPolarGraph;
use crate::spectral::SpectralDecomposition;

/// Seed for the sampled reconstruction vectors; fixed so every run checks
/// the same functions.
const SAMPLE_SEED: u64 = 0x7d5a_11ce_0f2a_3b01;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum FrameError {
    #[error("frame data disagrees between routes: {0}")]
    DecompositionMismatch(String),
    #[error("frame constant mismatch at j = {j}: expected {expected}, got {got}")]
    FrameConstantMismatch {
        j: usize,
        expected: String,
        got: String,
    },
    #[error("tight frame identity violated: {0}")]
    TightFrameViolation(String),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
}

/// Summary of one verified tight frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub j: usize,
    pub lambda: BigInt,
    pub frame_size: usize,
    pub space_dim: usize,
    pub reconstruction_samples: usize,
}

/// U^j as the Gram sum of rank-j indicator outer products; its (x, y)
/// entry is the number of rank-j elements below both x and y.
pub fn u_matrix(lattice: &PolarLattice, j: usize) -> IntMatrix {
    let n = lattice.num_vertices();
    let mut u = IntMatrix::zeros(n, n);
    for z in lattice.level(j) {
        u.add_outer(&lattice.indicator(z));
    }
    u
}

/// U^j from the distance classes: sum over l = j..=d of [l; j] A_{d-l}.
pub fn u_matrix_from_distances(graph: &DualPolarGraph, j: usize) -> IntMatrix {
    let params = graph.params();
    let d = params.d;
    let q = params.q();
    let n = graph.num_vertices();
    let mut u = IntMatrix::zeros(n, n);
    for l in j..=d {
        let weight = gauss_binom(l as i64, j as i64, q)
            .to_i64()
            .expect("desk-scale binomial");
        if weight != 0 {
            u = u.add(&graph.adjacency_matrix(d - l).scale(weight));
        }
    }
    u
}

/// The frame constant lambda_j = sum over l = j..=d of [l; j] p_{d-l}(j),
/// an eigenvalue of U^j; always a rational integer.
pub fn frame_constant(params: &Params, j: usize) -> Result<BigInt, FrameError> {
    let d = params.d;
    let q = params.q();
    let table = eigen_table(params)?;
    let mut lambda = BigRational::zero();
    for l in j..=d {
        let weight = BigRational::from_integer(gauss_binom(l as i64, j as i64, q));
        lambda += weight * &table.p[d - l][j];
    }
    if !lambda.is_integer() {
        return Err(FrameError::FrameConstantMismatch {
            j,
            expected: "an integer".into(),
            got: lambda.to_string(),
        });
    }
    Ok(lambda.to_integer())
}

/// The closed product for the first frame constant,
/// lambda_1 = q^{d-1} (1 + q^{e-1}) a_2; defined for d >= 2.
pub fn frame_constant_product(params: &Params) -> Option<BigRational> {
    if params.d < 2 {
        return None;
    }
    let a2 = crate::qseries::coatom_count(params, 2);
    let value = params.q_pow(2 * (params.d as i64 - 1))
        * (BigRational::one() + params.q_pow(params.two_e() - 2))
        * BigRational::from_integer(a2);
    Some(value)
}

/// Exhaustively verifies <iota(z), iota(y)> = a_{rk(z join y)} over every
/// pair of lattice elements, the top included.
pub fn indicator_gram_check(lattice: &PolarLattice) -> Result<(), FrameError> {
    let mut elements: Vec<(Vec<i64>, crate::subspace::Subspace)> = Vec::new();
    for level in lattice.levels() {
        for z in level {
            elements.push((lattice.indicator(z), z.clone()));
        }
    }
    elements.push((lattice.indicator(&lattice.top()), lattice.top()));

    for (vi, zi) in &elements {
        for (vj, zj) in &elements {
            let dot: i64 = vi.iter().zip(vj).map(|(a, b)| a * b).sum();
            let rank = lattice.rank_of(&lattice.join(zi, zj));
            if BigInt::from(dot) != lattice.a()[rank] {
                return Err(FrameError::DecompositionMismatch(format!(
                    "indicator inner product is {dot}, expected a_{rank}"
                )));
            }
        }
    }
    Ok(())
}

/// The centered atoms tau-check = E_1 iota(tau), computed through the
/// idempotent and through the closed form iota(tau) - (a_1/|X|) 1, which
/// must agree.
pub fn centered_atoms(
    lattice: &PolarLattice,
    decomposition: &SpectralDecomposition,
) -> Result<Vec<RationalVector>, FrameError> {
    let n = lattice.num_vertices() as i64;
    let c1 = decomposition.scale(1);
    let mut out = Vec::with_capacity(lattice.level(1).len());
    for (scaled, tau) in scaled_centered_atoms(lattice).iter().zip(lattice.level(1)) {
        let projected = decomposition.project_numerator(1, &lattice.indicator(tau));
        // |X| N_1 iota(tau) must equal c_1 (|X| iota(tau) - a_1 1).
        let agree = projected
            .iter()
            .zip(scaled)
            .all(|(&p, &s)| n * p == c1 * s);
        if !agree {
            return Err(FrameError::DecompositionMismatch(
                "centered atom differs between the idempotent and closed forms".into(),
            ));
        }
        let recip = BigRational::new(BigInt::one(), n.into());
        out.push(RationalVector::from_ints(scaled).scale(&recip));
    }
    Ok(out)
}

/// The integer vectors |X| tau-check = |X| iota(tau) - a_1 1, one per
/// atom.
pub fn scaled_centered_atoms(lattice: &PolarLattice) -> Vec<Vec<i64>> {
    let n = lattice.num_vertices() as i64;
    let a1 = big_to_i64(&lattice.a()[1]);
    lattice
        .level(1)
        .iter()
        .map(|tau| {
            lattice
                .indicator(tau)
                .iter()
                .map(|&x| n * x - a1)
                .collect()
        })
        .collect()
}

/// Proves the tight-frame theorem for rank j: the two U^j constructions
/// agree, U^j E_j = lambda_j E_j, the frame operator of the projected
/// indicators equals lambda_j E_j, the frame potential is lambda_j^2 m_j,
/// and reconstruction holds on sampled functions. For j = 1 the closed
/// product for lambda_1 is also checked.
pub fn verify_tight_frame(
    lattice: &PolarLattice,
    graph: &DualPolarGraph,
    decomposition: &SpectralDecomposition,
    j: usize,
) -> Result<FrameReport, FrameError> {
    let params = lattice.params();
    let n = lattice.num_vertices();
    let lambda = frame_constant(&params, j)?;
    let lambda_i64 = big_to_i64(&lambda);

    if j == 1 {
        if let Some(product) = frame_constant_product(&params) {
            if product != BigRational::from_integer(lambda.clone()) {
                return Err(FrameError::FrameConstantMismatch {
                    j,
                    expected: product.to_string(),
                    got: lambda.to_string(),
                });
            }
        }
    }

    let u_gram = u_matrix(lattice, j);
    let u_dist = u_matrix_from_distances(graph, j);
    if u_gram != u_dist {
        return Err(FrameError::DecompositionMismatch(format!(
            "U^{j} differs between Gram and distance-class forms"
        )));
    }

    let n_j = decomposition.numerator(j);
    let c_j = decomposition.scale(j);
    if u_gram.mul(n_j) != n_j.scale(lambda_i64) {
        return Err(FrameError::TightFrameViolation(format!(
            "U^{j} E_{j} differs from lambda_{j} E_{j}"
        )));
    }

    // Scaled frame vectors c_j u-check = N_j iota(u).
    let frame: Vec<Vec<i64>> = lattice
        .level(j)
        .iter()
        .map(|u| decomposition.project_numerator(j, &lattice.indicator(u)))
        .collect();

    // Frame operator: sum of outer products equals c_j lambda_j N_j.
    let mut operator = IntMatrix::zeros(n, n);
    for t in &frame {
        operator.add_outer(t);
    }
    if operator != n_j.scale(c_j * lambda_i64) {
        return Err(FrameError::TightFrameViolation(format!(
            "the frame operator of rank {j} is not lambda_{j} E_{j}"
        )));
    }

    // Frame potential: sum of squared pair inner products equals
    // lambda_j^2 m_j after unscaling by c_j^4.
    let mut potential = BigInt::zero();
    for a in &frame {
        for b in &frame {
            let dot: i64 = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
            potential += BigInt::from(dot) * BigInt::from(dot);
        }
    }
    let m_j = decomposition.multiplicities()[j];
    let c_big = BigInt::from(c_j);
    let expected = &c_big * &c_big * &c_big * &c_big * &lambda * &lambda * BigInt::from(m_j);
    if potential != expected {
        return Err(FrameError::TightFrameViolation(format!(
            "the frame potential of rank {j} is not lambda_{j}^2 m_{j}"
        )));
    }

    // Reconstruction on samples: basis indicators and seeded rationals.
    let mut samples: Vec<RationalVector> = Vec::new();
    for x in [0, n / 2, n - 1] {
        samples.push(RationalVector::from_ints(
            &(0..n).map(|i| i64::from(i == x)).collect::<Vec<_>>(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ j as u64);
    for _ in 0..5 {
        samples.push(random_rational_vector(&mut rng, n));
    }
    let scale = BigRational::new(
        BigInt::one(),
        BigInt::from(c_j) * BigInt::from(c_j) * &lambda,
    );
    for (s, f) in samples.iter().enumerate() {
        let target = decomposition.project(j, f);
        let mut acc = RationalVector::zeros(n);
        for t in &frame {
            let coeff = dot_int_rational(t, &target);
            if coeff.is_zero() {
                continue;
            }
            for (slot, &ti) in acc.iter_mut().zip(t) {
                if ti != 0 {
                    *slot += &coeff * BigRational::from_integer(ti.into());
                }
            }
        }
        if acc.scale(&scale) != target {
            return Err(FrameError::TightFrameViolation(format!(
                "reconstruction fails on sample {s} for rank {j}"
            )));
        }
    }

    Ok(FrameReport {
        j,
        lambda,
        frame_size: frame.len(),
        space_dim: m_j,
        reconstruction_samples: samples.len(),
    })
}

/// The first projection computed from the frame alone:
/// pi_1(h) = sum over atoms tau of <iota(tau), h> / lambda_1 tau-check,
/// with tau-check in its closed form; no idempotent is used.
pub fn pi1_via_frame(
    lattice: &PolarLattice,
    lambda1: &BigInt,
    h: &RationalVector,
) -> RationalVector {
    let n = lattice.num_vertices();
    let mut acc = RationalVector::zeros(n);
    for (tau_scaled, tau) in scaled_centered_atoms(lattice).iter().zip(lattice.level(1)) {
        let coeff = dot_int_rational(&lattice.indicator(tau), h);
        if coeff.is_zero() {
            continue;
        }
        for (slot, &ti) in acc.iter_mut().zip(tau_scaled) {
            if ti != 0 {
                *slot += &coeff * BigRational::from_integer(ti.into());
            }
        }
    }
    let scale = BigRational::new(BigInt::one(), BigInt::from(n as i64) * lambda1);
    acc.scale(&scale)
}

/// Verifies pi_1 = E_1 as operators: exactly on every basis vector
/// (integer arithmetic), and on `samples` seeded rational vectors through
/// the public rational route.
pub fn frame_projection_check(
    lattice: &PolarLattice,
    decomposition: &SpectralDecomposition,
    samples: usize,
) -> Result<(), FrameError> {
    let params = lattice.params();
    let n = lattice.num_vertices();
    let lambda1 = frame_constant(&params, 1)?;
    let lambda1_i64 = big_to_i64(&lambda1);
    let a1 = big_to_i64(&lattice.a()[1]);
    let c1 = decomposition.scale(1);
    let atoms: Vec<Vec<i64>> = lattice.level(1).iter().map(|t| lattice.indicator(t)).collect();

    // Basis vectors: |X| lambda_1 pi_1(delta_x) as integers, against
    // |X| lambda_1 E_1 delta_x = |X| lambda_1 N_1[., x] / c_1.
    for x in 0..n {
        let mut acc = vec![0i64; n];
        let mut hits = 0i64;
        for tau in &atoms {
            if tau[x] == 0 {
                continue;
            }
            hits += 1;
            for (slot, &ti) in acc.iter_mut().zip(tau) {
                *slot += (n as i64) * ti;
            }
        }
        for slot in acc.iter_mut() {
            *slot -= a1 * hits;
        }
        // acc = |X| lambda_1 pi_1(delta_x) now; compare with the
        // idempotent column.
        let column: Vec<i64> = (0..n).map(|i| decomposition.numerator(1).at(i, x)).collect();
        let agree = acc
            .iter()
            .zip(&column)
            .all(|(&lhs, &rhs)| c1 * lhs == n as i64 * lambda1_i64 * rhs);
        if !agree {
            return Err(FrameError::DecompositionMismatch(format!(
                "pi_1 and E_1 differ on the basis vector of vertex {x}"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED.rotate_left(17));
    for s in 0..samples {
        let h = random_rational_vector(&mut rng, n);
        if pi1_via_frame(lattice, &lambda1, &h) != decomposition.project(1, &h) {
            return Err(FrameError::DecompositionMismatch(format!(
                "pi_1 and E_1 differ on seeded sample {s}"
            )));
        }
    }
    Ok(())
}

fn random_rational_vector(rng: &mut ChaCha8Rng, n: usize) -> RationalVector {
    RationalVector::from_vec(
        (0..n)
            .map(|_| {
                BigRational::new(
                    rng.gen_range(-9i64..=9).into(),
                    rng.gen_range(1i64..=4).into(),
                )
            })
            .collect(),
    )
}

fn dot_int_rational(v: &[i64], h: &RationalVector) -> BigRational {
    let mut acc = BigRational::zero();
    for (&a, b) in v.iter().zip(h.as_slice()) {
        if a != 0 && !b.is_zero() {
            acc += BigRational::from_integer(a.into()) * b;
        }
    }
    acc
}

fn big_to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("desk-scale integer")
}
