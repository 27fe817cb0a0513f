//! Exact arithmetic over GF(q).
//!
//! Two families are supported: prime fields GF(p) with p < 2^16, and binary
//! extension fields GF(2^m) for 2 ≤ m ≤ 8 built on a fixed table of moduli.
//! Elements are carried as plain `u32` values in canonical form: a residue
//! `< p` for prime fields, or the coefficient vector of a polynomial of degree
//! `< m` read as a base-2 integer (bit `i` is the coefficient of `x^i`).

mod matrix;

pub use matrix::{spans_intersect_trivially, Matrix};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Field element in canonical integer form.
pub type Symbol = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported field size {0}: need a prime below 65536 or 2^m with m <= 8")]
    UnsupportedFieldSize(u32),
    #[error("modulus {0:#b} is not irreducible over GF(2)")]
    NotIrreducible(u32),
    #[error("modulus {modulus:#b} does not have degree {degree}")]
    BadModulusDegree { modulus: u32, degree: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields (GF({left}) vs GF({right}))")]
    FieldMismatch { left: u32, right: u32 },
    #[error("{value} is not an element of GF({q})")]
    NotAnElement { value: u32, q: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Built-in moduli for GF(2^m), indexed by m. Bit i is the coefficient of x^i.
const BINARY_MODULI: [u32; 9] = [
    0,
    0,
    0b111,       // x^2 + x + 1
    0b1011,      // x^3 + x + 1
    0b10011,     // x^4 + x + 1
    0b100101,    // x^5 + x^2 + 1
    0b1000011,   // x^6 + x + 1
    0b10000011,  // x^7 + x + 1
    0b100011011, // x^8 + x^4 + x^3 + x + 1
];

/// Multiplication and inverse tables for an extension field.
#[derive(Debug)]
struct ExtTables {
    mul: Vec<u8>,
    inv: Vec<u8>,
}

/// Description of a finite field GF(q), q = p^m.
#[derive(Clone)]
pub struct FieldSpec {
    q: u32,
    p: u32,
    m: u32,
    modulus: u32,
    tables: Option<Arc<ExtTables>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "GF({})", self.q)
        } else {
            write!(f, "GF(2^{}; {:#b})", self.m, self.modulus)
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

/// Remainder of `a` modulo `b` for polynomials over GF(2).
fn poly_mod(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
fn is_irreducible_gf2(modulus: u32) -> bool {
    let deg = poly_degree(modulus);
    for d in 1..=deg / 2 {
        for divisor in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_mod(modulus, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

fn clmul_reduce(mut a: u32, mut b: u32, modulus: u32, m: u32) -> u32 {
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << m) != 0 {
            a ^= modulus;
        }
    }
    acc
}

impl FieldSpec {
    /// GF(q) for a supported q, using the built-in modulus for extension fields.
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if is_prime(q) && q < (1 << 16) {
            return Ok(Self {
                q,
                p: q,
                m: 1,
                modulus: 0,
                tables: None,
            });
        }
        if q.is_power_of_two() {
            let m = q.trailing_zeros();
            if (2..=8).contains(&m) {
                return Self::binary_extension(m, BINARY_MODULI[m as usize]);
            }
        }
        Err(FieldError::UnsupportedFieldSize(q))
    }

    /// GF(2^m) with a caller-chosen modulus, checked for irreducibility.
    pub fn binary_extension(m: u32, modulus: u32) -> Result<Self, FieldError> {
        if !(2..=8).contains(&m) {
            return Err(FieldError::UnsupportedFieldSize(1 << m.min(31)));
        }
        if modulus == 0 || poly_degree(modulus) != m {
            return Err(FieldError::BadModulusDegree { modulus, degree: m });
        }
        if !is_irreducible_gf2(modulus) {
            return Err(FieldError::NotIrreducible(modulus));
        }
        let q = 1u32 << m;
        let mut mul = vec![0u8; (q * q) as usize];
        let mut inv = vec![0u8; q as usize];
        for a in 0..q {
            for b in 0..q {
                let prod = clmul_reduce(a, b, modulus, m);
                mul[(a * q + b) as usize] = prod as u8;
                if prod == 1 {
                    inv[a as usize] = b as u8;
                }
            }
        }
        Ok(Self {
            q,
            p: 2,
            m,
            modulus,
            tables: Some(Arc::new(ExtTables { mul, inv })),
        })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Coefficients of the modulus, constant term first. Empty for prime fields.
    pub fn modulus_coefficients(&self) -> Vec<u32> {
        if self.m == 1 {
            return Vec::new();
        }
        (0..=self.m).map(|i| (self.modulus >> i) & 1).collect()
    }

    pub fn contains(&self, a: Symbol) -> bool {
        a < self.q
    }

    pub fn check(&self, a: Symbol) -> Result<Symbol, FieldError> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(FieldError::NotAnElement {
                value: a,
                q: self.q,
            })
        }
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        if self.m > 1 {
            a ^ b
        } else {
            let s = a + b;
            if s >= self.q {
                s - self.q
            } else {
                s
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        if self.m > 1 || a == 0 {
            a
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        match &self.tables {
            Some(t) => t.mul[(a * self.q + b) as usize] as Symbol,
            None => ((a as u64 * b as u64) % self.q as u64) as Symbol,
        }
    }

    pub fn pow(&self, mut a: Symbol, mut e: u64) -> Symbol {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => t.inv[a as usize] as Symbol,
            None => self.pow(a, (self.q - 2) as u64),
        })
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Result<Symbol, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Checked binary operation on raw symbols.
    pub fn op(&self, kind: FieldOp, a: Symbol, b: Symbol) -> Result<Symbol, FieldError> {
        self.check(a)?;
        self.check(b)?;
        match kind {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Sub => Ok(self.sub(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Div => self.div(a, b),
        }
    }

    pub fn element(&self, value: Symbol) -> Result<Element, FieldError> {
        self.check(value)?;
        Ok(Element {
            field: self.clone(),
            value,
        })
    }

    /// Every element, in increasing integer order.
    pub fn elements(&self) -> impl Iterator<Item = Symbol> {
        0..self.q
    }

    /// Vector with the given base-q index; coordinate 0 is the least significant digit.
    pub fn vector_from_index(&self, mut index: u64, len: usize) -> Vec<Symbol> {
        let q = self.q as u64;
        (0..len)
            .map(|_| {
                let d = (index % q) as Symbol;
                index /= q;
                d
            })
            .collect()
    }

    /// Inverse of [`vector_from_index`](Self::vector_from_index).
    pub fn index_of_vector(&self, v: &[Symbol]) -> u64 {
        v.iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.q as u64 + d as u64)
    }

    /// `q^len`, or `None` on overflow.
    pub fn space_size(&self, len: usize) -> Option<u64> {
        (self.q as u64).checked_pow(u32::try_from(len).ok()?)
    }

    pub fn dot(&self, a: &[Symbol], b: &[Symbol]) -> Symbol {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    pub fn scale(&self, v: &[Symbol], s: Symbol) -> Vec<Symbol> {
        v.iter().map(|&x| self.mul(x, s)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element tagged with its field, for checked mixed-field arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    field: FieldSpec,
    value: Symbol,
}

impl Element {
    pub fn value(&self) -> Symbol {
        self.value
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn apply(&self, kind: FieldOp, rhs: &Element) -> Result<Element, FieldError> {
        if self.field != rhs.field {
            return Err(FieldError::FieldMismatch {
                left: self.field.q,
                right: rhs.field.q,
            });
        }
        let value = self.field.op(kind, self.value, rhs.value)?;
        Ok(Element {
            field: self.field.clone(),
            value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<FieldSpec> {
        [2, 3, 4, 5, 7, 8, 11, 13, 16]
            .into_iter()
            .map(|q| FieldSpec::new(q).unwrap())
            .collect()
    }

    #[test]
    fn small_examples() {
        let gf2 = FieldSpec::new(2).unwrap();
        assert_eq!(gf2.op(FieldOp::Add, 1, 1), Ok(0));
        let gf3 = FieldSpec::new(3).unwrap();
        assert_eq!(gf3.op(FieldOp::Mul, 2, 2), Ok(1));
        // x * x = x^2 = x + 1 mod x^2 + x + 1
        let gf4 = FieldSpec::new(4).unwrap();
        assert_eq!(gf4.op(FieldOp::Mul, 0b10, 0b10), Ok(0b11));
    }

    #[test]
    fn errors() {
        let gf5 = FieldSpec::new(5).unwrap();
        assert_eq!(gf5.op(FieldOp::Div, 3, 0), Err(FieldError::DivisionByZero));
        assert!(matches!(
            gf5.op(FieldOp::Add, 5, 1),
            Err(FieldError::NotAnElement { value: 5, q: 5 })
        ));
        let a = gf5.element(2).unwrap();
        let b = FieldSpec::new(7).unwrap().element(2).unwrap();
        assert!(matches!(
            a.apply(FieldOp::Add, &b),
            Err(FieldError::FieldMismatch { left: 5, right: 7 })
        ));
        for q in [0, 1, 6, 9, 512, 65537, 1 << 16] {
            assert!(FieldSpec::new(q).is_err(), "q = {q}");
        }
        assert!(FieldSpec::new(65521).is_ok());
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for (m, &modulus) in BINARY_MODULI.iter().enumerate().skip(2) {
            assert!(is_irreducible_gf2(modulus), "m = {m}");
        }
        // x^2 + 1 = (x + 1)^2
        assert_eq!(
            FieldSpec::binary_extension(2, 0b101).unwrap_err(),
            FieldError::NotIrreducible(0b101)
        );
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 has no roots but is reducible
        assert!(FieldSpec::binary_extension(4, 0b10101).is_err());
        assert!(FieldSpec::binary_extension(3, 0b10011).is_err());
    }

    #[test]
    fn modulus_coefficients_constant_first() {
        let gf8 = FieldSpec::new(8).unwrap();
        assert_eq!(gf8.modulus_coefficients(), vec![1, 1, 0, 1]);
        assert!(FieldSpec::new(7).unwrap().modulus_coefficients().is_empty());
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in all_fields() {
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.mul(a, 1), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "{f:?} a={a}");
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(f.sub(a, b), b), a);
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn gf256_inverses() {
        let f = FieldSpec::new(256).unwrap();
        for a in 1..256 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        // AES reference value: {53} * {CA} = {01}
        assert_eq!(f.mul(0x53, 0xCA), 1);
    }

    #[test]
    fn vector_index_roundtrip() {
        let f = FieldSpec::new(3).unwrap();
        assert_eq!(f.vector_from_index(5, 3), vec![2, 1, 0]);
        for i in 0..27 {
            assert_eq!(f.index_of_vector(&f.vector_from_index(i, 3)), i);
        }
    }
}
