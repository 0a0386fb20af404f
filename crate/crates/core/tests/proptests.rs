//! Randomized properties of the algebraic layers: field axioms, echelon
//! canonicity, subspace dimension laws, and Gaussian binomial identities.

use dualpolar::gf::FieldSpec;
use dualpolar::qseries::{gauss_binom, gauss_bracket};
use dualpolar::subspace::{intersect, span_sum, Subspace};
use num::{BigInt, Zero};
use proptest::prelude::*;

const FIELDS: [(u64, u32); 4] = [(2, 1), (3, 1), (2, 2), (5, 1)];

fn field(index: usize) -> FieldSpec {
    let (p, k) = FIELDS[index % FIELDS.len()];
    FieldSpec::new(p, k).expect("small fields build")
}

proptest! {
    #[test]
    fn field_axioms_hold(index in 0usize..4, triple in prop::collection::vec(0u32..25, 3)) {
        let f = field(index);
        let q = f.q() as u32;
        let (a, b, c) = (triple[0] % q, triple[1] % q, triple[2] % q);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        if a != f.zero() {
            let inv = f.inv(a).expect("nonzero elements invert");
            prop_assert_eq!(f.mul(a, inv), f.one());
        }
    }

    /// Adding redundant combinations of existing generators never changes
    /// the canonical echelon form.
    #[test]
    fn echelon_form_is_canonical(
        index in 0usize..4,
        seed_rows in (1usize..=3).prop_flat_map(|k| (Just(k), 0u64..1u64 << 48)),
        scale in 1u32..5,
    ) {
        let f = field(index);
        let q = f.q();
        let (k, bits) = seed_rows;
        let n = 5;
        // Deterministic small generator matrix from the seed bits.
        let mut rows: Vec<Vec<u32>> = Vec::new();
        let mut state = bits;
        for _ in 0..k {
            let mut row = Vec::with_capacity(n);
            for _ in 0..n {
                row.push((state % q) as u32);
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            }
            rows.push(row);
        }
        let base = Subspace::from_rows(&f, n, &rows);

        // Append the scaled sum of all generators: same span, new matrix.
        let mut combined = vec![f.zero(); n];
        for row in &rows {
            for (c, &value) in row.iter().enumerate() {
                combined[c] = f.add(combined[c], f.mul(value, scale % f.q() as u32));
            }
        }
        let mut redundant = rows.clone();
        redundant.push(combined);
        let widened = Subspace::from_rows(&f, n, &redundant);
        prop_assert_eq!(base, widened);
    }

    /// dim(U) + dim(W) = dim(U + W) + dim(U meet W), the exact law the
    /// lattice's modularity check builds on.
    #[test]
    fn dimension_law_for_sum_and_intersection(
        index in 0usize..4,
        a_bits in 0u64..1u64 << 48,
        b_bits in 0u64..1u64 << 48,
        ka in 0usize..=3,
        kb in 0usize..=3,
    ) {
        let f = field(index);
        let q = f.q();
        let n = 5;
        let make = |bits: u64, k: usize| {
            let mut rows = Vec::new();
            let mut state = bits;
            for _ in 0..k {
                let mut row = Vec::with_capacity(n);
                for _ in 0..n {
                    row.push((state % q) as u32);
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                }
                rows.push(row);
            }
            Subspace::from_rows(&f, n, &rows)
        };
        let u = make(a_bits, ka);
        let w = make(b_bits, kb);
        let sum = span_sum(&f, &u, &w);
        let meet = intersect(&f, &u, &w);
        prop_assert_eq!(u.dim() + w.dim(), sum.dim() + meet.dim());
        prop_assert!(sum.contains(&f, &u) && sum.contains(&f, &w));
        prop_assert!(u.contains(&f, &meet) && w.contains(&f, &meet));
    }

    #[test]
    fn gaussian_binomial_symmetry(n in 0i64..=10, k in 0i64..=10, qi in 0usize..4) {
        let q = [2u64, 3, 4, 5][qi];
        prop_assert_eq!(gauss_binom(n, k, q), gauss_binom(n, n - k, q));
        if k > n {
            prop_assert!(gauss_binom(n, k, q).is_zero());
        }
    }

    #[test]
    fn bracket_recursion(n in 1i64..=16, qi in 0usize..4) {
        let q = [2u64, 3, 4, 5][qi];
        let expected = BigInt::from(q) * gauss_bracket(n - 1, q) + 1;
        prop_assert_eq!(gauss_bracket(n, q), expected);
    }
}
