//! Formed vector spaces over finite fields: the six classical families of
//! polar spaces, given by an alternating, quadratic, or Hermitian form on
//! GF(q)^n in a fixed standard shape.
//!
//! Each family is parametrized by the Witt index `d` (the common dimension of
//! the maximal totally isotropic subspaces) and a prime power `r`; Hermitian
//! families live over GF(r^2), the others over GF(r). The family determines
//! the constant `e` with 2e integral that drives every counting formula
//! downstream; exponents of q are always tracked doubled so that half-integral
//! `e` stays exact.

use num::{BigInt, BigRational, One};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::gf::{is_prime, FieldSpec, GfError};
use crate::subspace::{kernel, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Symplectic on GF(q)^{2d}.
    #[serde(rename = "C")]
    C,
    /// Quadratic on GF(q)^{2d+1}.
    #[serde(rename = "B")]
    B,
    /// Quadratic of Witt index d on GF(q)^{2d} (hyperbolic).
    #[serde(rename = "D")]
    D,
    /// Quadratic of Witt index d on GF(q)^{2d+2} (elliptic).
    #[serde(rename = "2D")]
    TwoD,
    /// Hermitian on GF(r^2)^{2d+1}.
    #[serde(rename = "2A-odd")]
    TwoAOdd,
    /// Hermitian on GF(r^2)^{2d}.
    #[serde(rename = "2A-even")]
    TwoAEven,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::C,
        Family::B,
        Family::D,
        Family::TwoD,
        Family::TwoAOdd,
        Family::TwoAEven,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::C => "C",
            Family::B => "B",
            Family::D => "D",
            Family::TwoD => "2D",
            Family::TwoAOdd => "2A-odd",
            Family::TwoAEven => "2A-even",
        }
    }

    /// Twice the family constant e; e itself may be half-integral.
    pub fn two_e(self) -> i64 {
        match self {
            Family::C | Family::B => 2,
            Family::D => 0,
            Family::TwoD => 4,
            Family::TwoAOdd => 3,
            Family::TwoAEven => 1,
        }
    }

    pub fn is_hermitian(self) -> bool {
        matches!(self, Family::TwoAOdd | Family::TwoAEven)
    }

    pub fn is_quadratic(self) -> bool {
        matches!(self, Family::B | Family::D | Family::TwoD)
    }

    /// Ambient dimension of the standard space with Witt index d.
    pub fn ambient_dim(self, d: usize) -> usize {
        match self {
            Family::C | Family::D | Family::TwoAEven => 2 * d,
            Family::B | Family::TwoAOdd => 2 * d + 1,
            Family::TwoD => 2 * d + 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = FormError;

    fn from_str(s: &str) -> Result<Self, FormError> {
        let lowered = s.to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|fam| fam.tag().to_ascii_lowercase() == lowered)
            .ok_or_else(|| FormError::BadParameters(format!("unknown family tag {s:?}")))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum FormError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("dimension mismatch: expected vectors of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Witt index mismatch: expected {expected}, enumeration reached {got}")]
    WittIndexMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Instance parameters: a family, the Witt index, and the base prime power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub family: Family,
    pub d: usize,
    pub r: u64,
}

impl Params {
    pub fn new(family: Family, d: usize, r: u64) -> Self {
        Params { family, d, r }
    }

    /// Field size the geometry is defined over: r^2 for Hermitian families.
    pub fn q(&self) -> u64 {
        if self.family.is_hermitian() {
            self.r * self.r
        } else {
            self.r
        }
    }

    pub fn two_e(&self) -> i64 {
        self.family.two_e()
    }

    pub fn ambient_dim(&self) -> usize {
        self.family.ambient_dim(self.d)
    }

    /// The constant e rendered exactly ("1/2", "1", "3/2", ...).
    pub fn e_string(&self) -> String {
        let te = self.two_e();
        if te % 2 == 0 {
            (te / 2).to_string()
        } else {
            format!("{te}/2")
        }
    }

    /// Conventional instance label, e.g. `C_3(2)` or `2A_4(2)`.
    pub fn label(&self) -> String {
        let (d, r) = (self.d, self.r);
        match self.family {
            Family::C => format!("C_{d}({r})"),
            Family::B => format!("B_{d}({r})"),
            Family::D => format!("D_{d}({r})"),
            Family::TwoD => format!("2D_{}({r})", d + 1),
            Family::TwoAOdd => format!("2A_{}({r})", 2 * d),
            Family::TwoAEven => format!("2A_{}({r})", 2 * d - 1),
        }
    }

    /// Exact q^(two_exp/2) as a rational; negative exponents are allowed.
    pub fn q_pow(&self, two_exp: i64) -> BigRational {
        let kappa: i64 = if self.family.is_hermitian() { 2 } else { 1 };
        let doubled = kappa * two_exp;
        assert!(
            doubled % 2 == 0,
            "half-integral exponent of the base prime power: 2x = {two_exp}"
        );
        let exp = doubled / 2;
        let r = BigInt::from(self.r);
        if exp >= 0 {
            BigRational::from_integer(r.pow(exp as u32))
        } else {
            BigRational::new(One::one(), r.pow((-exp) as u32))
        }
    }

    /// Exact q^(two_exp/2) as an integer; the exponent must be nonnegative.
    pub fn q_pow_int(&self, two_exp: i64) -> BigInt {
        let v = self.q_pow(two_exp);
        assert!(v.is_integer(), "expected an integral power of q");
        v.to_integer()
    }
}

/// Which kind of form the space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FormKind {
    Symplectic,
    Quadratic,
    Hermitian,
}

/// A vector space GF(q)^n equipped with the standard form of one family.
#[derive(Debug)]
pub struct FormedSpace {
    params: Params,
    field: FieldSpec,
    n: usize,
    kind: FormKind,
    /// Sparse terms of the pairing linear in the first argument:
    /// form(u, v) = sum of c * u_i * v'_j over (i, j, c), where v' is v for
    /// bilinear kinds and the coordinatewise conjugate for Hermitian.
    pair_terms: Vec<(usize, usize, u32)>,
    /// Sparse terms c * v_i * v_j (i <= j) of the quadratic form, when any.
    quad_terms: Vec<(usize, usize, u32)>,
}

/// Builds the standard formed space for the given family, Witt index, and
/// base prime power.
pub fn make_space(family: Family, d: usize, r: u64) -> Result<FormedSpace, FormError> {
    let params = Params::new(family, d, r);
    if d < 1 {
        return Err(FormError::BadParameters(
            "the Witt index d must be at least 1".into(),
        ));
    }
    let (p, m) = factor_prime_power(r)
        .ok_or_else(|| FormError::BadParameters(format!("r = {r} is not a prime power")))?;
    let degree = if family.is_hermitian() { 2 * m } else { m };
    let field = FieldSpec::new(p, degree)?;
    let n = family.ambient_dim(d);

    let kind = match family {
        Family::C => FormKind::Symplectic,
        Family::B | Family::D | Family::TwoD => FormKind::Quadratic,
        Family::TwoAOdd | Family::TwoAEven => FormKind::Hermitian,
    };

    let quad_terms = match family {
        Family::B => {
            // Q(x) = x_0^2 + sum_{i=1..d} x_i x_{d+i}
            let mut t = vec![(0, 0, 1u32)];
            t.extend((1..=d).map(|i| (i, d + i, 1u32)));
            t
        }
        Family::D => (0..d).map(|i| (i, d + i, 1u32)).collect(),
        Family::TwoD => {
            // Hyperbolic pairs plus an anisotropic binary form on the last
            // two coordinates.
            let (a, b) = anisotropic_binary(&field);
            let mut t: Vec<(usize, usize, u32)> = (0..d).map(|i| (i, d + i, 1u32)).collect();
            t.push((2 * d, 2 * d, 1));
            if a != 0 {
                t.push((2 * d, 2 * d + 1, a));
            }
            t.push((2 * d + 1, 2 * d + 1, b));
            t
        }
        _ => Vec::new(),
    };

    let pair_terms = match kind {
        FormKind::Symplectic => {
            // omega(u, v) = sum_i u_i v_{d+i} - u_{d+i} v_i
            let minus_one = field.neg(1);
            let mut t = Vec::with_capacity(2 * d);
            for i in 0..d {
                t.push((i, d + i, 1u32));
                t.push((d + i, i, minus_one));
            }
            t
        }
        FormKind::Quadratic => {
            // The polar form B(u, v) = Q(u + v) - Q(u) - Q(v) of Q:
            // the term c x_i x_j contributes c(u_i v_j + u_j v_i).
            let mut t = Vec::new();
            for &(i, j, c) in &quad_terms {
                if i == j {
                    let two_c = field.add(c, c);
                    if two_c != 0 {
                        t.push((i, i, two_c));
                    }
                } else {
                    t.push((i, j, c));
                    t.push((j, i, c));
                }
            }
            t
        }
        FormKind::Hermitian => {
            // H(u, v) = sum_{i<d} (u_i conj(v_{d+i}) + u_{d+i} conj(v_i)),
            // plus u_{n-1} conj(v_{n-1}) when n is odd.
            let mut t = Vec::with_capacity(n);
            for i in 0..d {
                t.push((i, d + i, 1u32));
                t.push((d + i, i, 1u32));
            }
            if n % 2 == 1 {
                t.push((n - 1, n - 1, 1u32));
            }
            t
        }
    };

    Ok(FormedSpace {
        params,
        field,
        n,
        kind,
        pair_terms,
        quad_terms,
    })
}

impl FormedSpace {
    pub fn params(&self) -> Params {
        self.params
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn is_quadratic(&self) -> bool {
        self.kind == FormKind::Quadratic
    }

    pub fn is_hermitian(&self) -> bool {
        self.kind == FormKind::Hermitian
    }

    fn check_len(&self, v: &[u32]) -> Result<(), FormError> {
        if v.len() != self.n {
            return Err(FormError::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// The bilinear/sesquilinear pairing: the symplectic form, the polar form
    /// of the quadratic form, or the Hermitian form. Linear in `u`.
    pub fn evaluate(&self, u: &[u32], v: &[u32]) -> Result<u32, FormError> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.pair(u, v))
    }

    pub(crate) fn pair(&self, u: &[u32], v: &[u32]) -> u32 {
        let f = &self.field;
        let mut acc = 0u32;
        if self.kind == FormKind::Hermitian {
            for &(i, j, c) in &self.pair_terms {
                let vj = f.conjugate(v[j]).expect("Hermitian field is quadratic");
                acc = f.add(acc, f.mul(c, f.mul(u[i], vj)));
            }
        } else {
            for &(i, j, c) in &self.pair_terms {
                acc = f.add(acc, f.mul(c, f.mul(u[i], v[j])));
            }
        }
        acc
    }

    /// The quadratic form itself; only quadratic-type spaces carry one.
    pub fn evaluate_quadratic(&self, v: &[u32]) -> Result<u32, FormError> {
        if self.kind != FormKind::Quadratic {
            return Err(FormError::BadParameters(format!(
                "family {} carries no quadratic form",
                self.params.family
            )));
        }
        self.check_len(v)?;
        Ok(self.quad(v))
    }

    pub(crate) fn quad(&self, v: &[u32]) -> u32 {
        let f = &self.field;
        let mut acc = 0u32;
        for &(i, j, c) in &self.quad_terms {
            acc = f.add(acc, f.mul(c, f.mul(v[i], v[j])));
        }
        acc
    }

    /// Whether a single vector is isotropic (singular, for quadratic type).
    pub(crate) fn vector_isotropic(&self, v: &[u32]) -> bool {
        match self.kind {
            FormKind::Symplectic => true,
            FormKind::Quadratic => self.quad(v) == 0,
            FormKind::Hermitian => self.pair(v, v) == 0,
        }
    }

    /// Whether the subspace is totally isotropic: the pairing vanishes on all
    /// basis pairs and, for quadratic/Hermitian type, each basis vector is
    /// itself isotropic. This extends to the whole span.
    pub fn is_isotropic(&self, s: &Subspace) -> Result<bool, FormError> {
        if s.is_top() {
            return Err(FormError::BadParameters(
                "the lattice sentinel is not a subspace".into(),
            ));
        }
        if s.ambient_dim() != self.n {
            return Err(FormError::DimensionMismatch {
                expected: self.n,
                got: s.ambient_dim(),
            });
        }
        let basis = s.basis();
        for (idx, u) in basis.iter().enumerate() {
            if !self.vector_isotropic(u) {
                return Ok(false);
            }
            for v in &basis[idx..] {
                if self.pair(u, v) != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The perp of a subspace under the pairing: all v with pair(v, b) = 0
    /// for every basis vector b.
    pub fn perp(&self, s: &Subspace) -> Result<Subspace, FormError> {
        if s.is_top() {
            return Err(FormError::BadParameters(
                "the lattice sentinel has no perp".into(),
            ));
        }
        if s.ambient_dim() != self.n {
            return Err(FormError::DimensionMismatch {
                expected: self.n,
                got: s.ambient_dim(),
            });
        }
        let mut constraints = Vec::with_capacity(s.basis().len());
        let mut e = vec![0u32; self.n];
        for b in s.basis() {
            let mut row = Vec::with_capacity(self.n);
            for i in 0..self.n {
                e[i] = 1;
                row.push(self.pair(&e, b));
                e[i] = 0;
            }
            constraints.push(row);
        }
        let basis = kernel(&self.field, &constraints, self.n);
        Ok(Subspace::from_rows(&self.field, self.n, &basis))
    }

    /// The standard maximal totally isotropic subspace of this shape.
    pub fn standard_maximal_isotropic(&self) -> Subspace {
        let offset = usize::from(self.params.family == Family::B);
        let rows: Vec<Vec<u32>> = (0..self.params.d)
            .map(|i| {
                let mut v = vec![0u32; self.n];
                v[offset + i] = 1;
                v
            })
            .collect();
        Subspace::from_rows(&self.field, self.n, &rows)
    }

    /// Recomputes the Witt index by exhaustive enumeration of isotropic
    /// subspaces and checks it equals d.
    pub fn witt_index_check(&self) -> Result<usize, FormError> {
        let levels = crate::lattice::isotropic_levels(self);
        let got = levels.len() - 1;
        if got != self.params.d {
            return Err(FormError::WittIndexMismatch {
                expected: self.params.d,
                got,
            });
        }
        Ok(got)
    }
}

/// Factors a prime power r = p^m; `None` if r is not one.
fn factor_prime_power(r: u64) -> Option<(u64, u32)> {
    if r < 2 {
        return None;
    }
    let p = (2..=r).find(|&p| r % p == 0).filter(|&p| is_prime(p))?;
    let mut rest = r;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

/// Smallest (a, b) in lexicographic code order such that
/// u^2 + a uv + b v^2 has no nonzero root over the field.
fn anisotropic_binary(field: &FieldSpec) -> (u32, u32) {
    for a in field.elements() {
        for b in field.elements() {
            let anisotropic = field.elements().all(|u| {
                field.elements().all(|v| {
                    if u == 0 && v == 0 {
                        return true;
                    }
                    let val = field.add(
                        field.add(field.mul(u, u), field.mul(a, field.mul(u, v))),
                        field.mul(b, field.mul(v, v)),
                    );
                    val != 0
                })
            });
            if anisotropic {
                return (a, b);
            }
        }
    }
    unreachable!("an anisotropic binary quadratic form exists over every finite field")
}
