//! Finite fields GF(p^k) for small prime powers.
//!
//! Elements are stored as packed codes in `0..q`: the element with
//! coefficient vector `(c_0, ..., c_{k-1})` over GF(p) (constant term first)
//! has code `c_0 + c_1*p + ... + c_{k-1}*p^{k-1}`. Arithmetic is polynomial
//! arithmetic modulo a fixed monic irreducible, chosen deterministically as
//! the one with the smallest packed code, so two `FieldSpec`s built with the
//! same `(p, k)` are interchangeable. For small fields all binary operations
//! are table-backed; larger fields fall back to direct computation.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Largest supported field size. Keeps element codes comfortably in `u32`
/// and table sizes bounded.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

/// Fields up to this size get full `q x q` addition/multiplication tables.
const TABLE_LIMIT: u64 = 1024;

static NEXT_FIELD_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unsupported field GF({p}^{k}): need 1 <= k <= 4 and p^k <= 2^16")]
    DegreeTooLarge { p: u64, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("conjugation requires a quadratic extension, but the degree {0} is odd")]
    NotQuadraticExtension(u32),
}

/// An element tagged with the identity of the field it lives in, for the
/// checked arithmetic entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    code: u32,
    field: u64,
}

impl FieldElement {
    pub fn code(&self) -> u32 {
        self.code
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A concrete finite field GF(p^k) = GF(q).
#[derive(Debug)]
pub struct FieldSpec {
    id: u64,
    p: u64,
    k: u32,
    q: u64,
    /// Monic irreducible modulus, coefficient of x^i at index i; length k+1.
    modulus: Vec<u64>,
    add_table: Option<Vec<u32>>,
    mul_table: Option<Vec<u32>>,
    inv_table: Option<Vec<u32>>,
    /// x -> x^(p^(k/2)), the involutory automorphism, when k is even.
    frob_table: Option<Vec<u32>>,
}

impl FieldSpec {
    /// Builds GF(p^k), validating that `p` is prime and the size is in range.
    pub fn new(p: u64, k: u32) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if k < 1 || k > 4 {
            return Err(GfError::DegreeTooLarge { p, k });
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or(GfError::DegreeTooLarge { p, k })?;

        let modulus = smallest_irreducible(p, k);
        let mut field = FieldSpec {
            id: NEXT_FIELD_ID.fetch_add(1, Ordering::Relaxed),
            p,
            k,
            q,
            modulus,
            add_table: None,
            mul_table: None,
            inv_table: None,
            frob_table: None,
        };
        if q <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(field)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for a in 0..q as u32 {
            for b in 0..q as u32 {
                add[a as usize * q + b as usize] = self.add_raw(a, b);
                mul[a as usize * q + b as usize] = self.mul_raw(a, b);
            }
        }
        self.add_table = Some(add);
        self.mul_table = Some(mul);
        let mut inv = vec![0u32; q];
        for a in 1..q as u32 {
            inv[a as usize] = self.pow_raw(a, self.q - 2);
        }
        self.inv_table = Some(inv);
        if self.k % 2 == 0 {
            let r = self.p.pow(self.k / 2);
            let frob = (0..q as u32).map(|a| self.pow_raw(a, r)).collect();
            self.frob_table = Some(frob);
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The defining modulus, coefficient of x^i at index i (monic, length k+1).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// All field elements in ascending code order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q as u32
    }

    /// Coefficient vector `(c_0, ..., c_{k-1})` of an element code.
    pub fn coeffs(&self, code: u32) -> Vec<u64> {
        let mut c = code as u64;
        (0..self.k)
            .map(|_| {
                let digit = c % self.p;
                c /= self.p;
                digit
            })
            .collect()
    }

    /// Packs a coefficient vector (constant term first) into an element code.
    pub fn encode(&self, coeffs: &[u64]) -> u32 {
        let mut code = 0u64;
        for &c in coeffs.iter().rev() {
            code = code * self.p + c % self.p;
        }
        debug_assert!(code < self.q);
        code as u32
    }

    // --- raw arithmetic on codes (unchecked: codes must be < q) ---

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.k {
            out += (a % self.p + b % self.p) % self.p * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as u32
    }

    fn neg_raw(&self, a: u32) -> u32 {
        let mut a = a as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.k {
            out += (self.p - a % self.p) % self.p * place;
            a /= self.p;
            place *= self.p;
        }
        out as u32
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let av = self.coeffs(a);
        let bv = self.coeffs(b);
        let mut prod = vec![0u64; 2 * self.k as usize - 1];
        for (i, &ai) in av.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in bv.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % self.p;
            }
        }
        // Reduce modulo the monic modulus, high coefficients first.
        for i in (self.k as usize..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &mj) in self.modulus.iter().enumerate().take(self.k as usize) {
                let idx = i - self.k as usize + j;
                prod[idx] = (prod[idx] + (self.p - mj % self.p) % self.p * c) % self.p;
            }
        }
        prod.truncate(self.k as usize);
        self.encode(&prod)
    }

    fn pow_raw(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    // --- fast arithmetic on codes (table-backed when available) ---

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!((a as u64) < self.q && (b as u64) < self.q);
        match &self.add_table {
            Some(t) => t[a as usize * self.q as usize + b as usize],
            None => self.add_raw(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg_raw(a)
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg_raw(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!((a as u64) < self.q && (b as u64) < self.q);
        match &self.mul_table {
            Some(t) => t[a as usize * self.q as usize + b as usize],
            None => self.mul_raw(a, b),
        }
    }

    pub fn inv(&self, a: u32) -> Result<u32, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(match &self.inv_table {
            Some(t) => t[a as usize],
            None => self.pow_raw(a, self.q - 2),
        })
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        self.pow_raw(a, e)
    }

    /// Whether the field carries the involutory conjugation x -> x^sqrt(q).
    pub fn has_conjugation(&self) -> bool {
        self.k % 2 == 0
    }

    /// The involutory automorphism x -> x^(p^(k/2)) of a quadratic extension.
    pub fn conjugate(&self, a: u32) -> Result<u32, GfError> {
        if self.k % 2 != 0 {
            return Err(GfError::NotQuadraticExtension(self.k));
        }
        Ok(match &self.frob_table {
            Some(t) => t[a as usize],
            None => self.pow_raw(a, self.p.pow(self.k / 2)),
        })
    }

    // --- checked arithmetic on tagged elements ---

    pub fn element(&self, code: u32) -> FieldElement {
        assert!((code as u64) < self.q, "element code out of range");
        FieldElement {
            code,
            field: self.id,
        }
    }

    fn check(&self, a: FieldElement) -> Result<u32, GfError> {
        if a.field != self.id {
            return Err(GfError::FieldMismatch);
        }
        Ok(a.code)
    }

    /// Checked binary arithmetic: both operands must come from this field.
    pub fn arith(
        &self,
        a: FieldElement,
        b: FieldElement,
        op: ArithOp,
    ) -> Result<FieldElement, GfError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        let code = match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Div => self.div(a, b)?,
        };
        Ok(self.element(code))
    }

    /// Checked conjugation of a tagged element.
    pub fn conjugate_element(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        let a = self.check(a)?;
        Ok(self.element(self.conjugate(a)?))
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The monic irreducible of degree k over GF(p) whose low-coefficient vector
/// has the smallest packed code. Deterministic, so every GF(p^k) built here
/// uses the same modulus.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1]; // x itself; never used for reduction
    }
    let q = p.pow(k);
    for code in 0..q {
        let mut coeffs: Vec<u64> = {
            let mut c = code;
            (0..k)
                .map(|_| {
                    let digit = c % p;
                    c /= p;
                    digit
                })
                .collect()
        };
        coeffs.push(1);
        if poly_is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("an irreducible of degree {k} over GF({p}) always exists")
}

/// Irreducibility over GF(p) for monic polynomials of degree 2..=4: no root
/// rules out linear factors, and for degree 4 we additionally exclude a
/// factorization into two irreducible quadratics by trial division.
pub(crate) fn poly_is_irreducible(p: u64, coeffs: &[u64]) -> bool {
    let deg = coeffs.len() - 1;
    debug_assert!((2..=4).contains(&deg) && coeffs[deg] == 1);
    for x in 0..p {
        if poly_eval(p, coeffs, x) == 0 {
            return false;
        }
    }
    if deg == 4 {
        // Any proper factorization without linear factors is a product of two
        // quadratics, at least one of them irreducible.
        for b in 0..p {
            for c in 0..p {
                let quad = [c, b, 1];
                if (0..p).any(|x| poly_eval(p, &quad, x) == 0) {
                    continue;
                }
                if poly_divisible(p, coeffs, &quad) {
                    return false;
                }
            }
        }
    }
    true
}

fn poly_eval(p: u64, coeffs: &[u64], x: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
}

fn poly_divisible(p: u64, num: &[u64], den: &[u64]) -> bool {
    let mut rem: Vec<u64> = num.to_vec();
    let dd = den.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            // den is monic, so just subtract lead * den * x^shift
            for (i, &dc) in den.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + (p - dc % p) % p * lead) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}
