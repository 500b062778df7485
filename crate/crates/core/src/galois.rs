//! Exact arithmetic in the finite fields GF(q), q = p^m ≤ 29.
//!
//! Every supported field is built once, on first use, from a fixed modulus
//! and then shared for the lifetime of the process. A [`FieldSpec`] is a
//! cheap `Copy` handle to those tables.
//!
//! Elements of an extension field GF(p^m) are indexed by the base-p encoding
//! of their residue polynomial: the element `c0 + c1·α + ... + c_{m-1}·α^{m-1}`
//! has index `c0 + c1·p + ... + c_{m-1}·p^{m-1}`. The moduli are the Conway
//! polynomials, so `α` (index `p`) is always a primitive element:
//!
//! | q  | modulus            |
//! |----|--------------------|
//! | 4  | x² + x + 1         |
//! | 8  | x³ + x + 1         |
//! | 9  | x² + 2x + 2        |
//! | 16 | x⁴ + x + 1         |
//! | 25 | x² + 4x + 2        |
//! | 27 | x³ + 2x + 1        |

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use thiserror::Error;

/// Field orders handled by this crate.
pub const SUPPORTED_ORDERS: [u32; 16] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29];

/// Largest element value that has a single-character table symbol (`H`).
pub const MAX_SYMBOL_VALUE: u8 = 17;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("unsupported field order {order}; supported orders are {SUPPORTED_ORDERS:?}")]
    UnsupportedField { order: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("value {value} is not an element of GF({order})")]
    OutOfRange { value: u32, order: u32 },
    #[error("invalid symbol {symbol:?} for GF({order})")]
    InvalidSymbol { symbol: char, order: u32 },
    #[error("element {0} has no single-character symbol")]
    NoSymbol(u8),
}

/// Conway polynomials, ascending coefficients without the leading 1.
fn conway_modulus(p: u32, m: u32) -> Vec<u8> {
    match (p, m) {
        (2, 2) => vec![1, 1],
        (2, 3) => vec![1, 1, 0],
        (2, 4) => vec![1, 1, 0, 0],
        (3, 2) => vec![2, 2],
        (3, 3) => vec![1, 2, 0],
        (5, 2) => vec![2, 4],
        _ => vec![0; m as usize],
    }
}

pub(crate) struct Tables {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl Tables {
    fn build(p: u32, m: u32) -> Tables {
        let q = p.pow(m);
        let modulus = if m == 1 { Vec::new() } else { conway_modulus(p, m) };
        let to_vec = |mut x: u32| -> Vec<u32> {
            (0..m)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let from_vec = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let va = to_vec(a);
            for b in 0..q {
                let vb = to_vec(b);
                let sum: Vec<u32> = va.iter().zip(&vb).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = from_vec(&sum) as u8;
                // schoolbook product then reduction by the monic modulus
                let mut prod = vec![0u32; (2 * m - 1) as usize];
                for (i, x) in va.iter().enumerate() {
                    for (j, y) in vb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for top in (m as usize..prod.len()).rev() {
                    let c = prod[top];
                    if c == 0 {
                        continue;
                    }
                    prod[top] = 0;
                    for (j, &mj) in modulus.iter().enumerate() {
                        let idx = top - m as usize + j;
                        prod[idx] = (prod[idx] + p * p - c * mj as u32 % p) % p;
                    }
                }
                mul[(a * q + b) as usize] = from_vec(&prod[..m as usize]) as u8;
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u8;
            }
        }
        Tables { p, m, q, modulus, add, mul, neg, inv }
    }
}

fn registry(q: u32) -> &'static Tables {
    static FIELDS: [OnceLock<Tables>; 30] = [const { OnceLock::new() }; 30];
    FIELDS[q as usize].get_or_init(|| {
        let (p, m) = prime_power(q).expect("registry called with a supported order");
        Tables::build(p, m)
    })
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut m = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Handle to one of the supported finite fields.
#[derive(Clone, Copy)]
pub struct FieldSpec {
    tables: &'static Tables,
}

impl FieldSpec {
    /// GF(p^m).
    pub fn new(p: u32, m: u32) -> Result<FieldSpec, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::UnsupportedField { order: 1 });
        }
        let order = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if order > 29 {
            return Err(FieldError::UnsupportedField { order });
        }
        Ok(FieldSpec { tables: registry(order as u32) })
    }

    /// The field with `q` elements.
    pub fn with_order(q: u32) -> Result<FieldSpec, FieldError> {
        if !SUPPORTED_ORDERS.contains(&q) {
            return Err(FieldError::UnsupportedField { order: q as u64 });
        }
        Ok(FieldSpec { tables: registry(q) })
    }

    pub fn order(&self) -> u32 {
        self.tables.q
    }

    pub fn characteristic(&self) -> u32 {
        self.tables.p
    }

    pub fn degree(&self) -> u32 {
        self.tables.m
    }

    /// Non-leading coefficients of the defining modulus (empty for prime fields).
    pub fn modulus(&self) -> &[u8] {
        &self.tables.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, order: self.order() as u8 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1, order: self.order() as u8 }
    }

    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if value >= self.order() {
            return Err(FieldError::OutOfRange { value, order: self.order() });
        }
        Ok(FieldElement { value: value as u8, order: self.order() as u8 })
    }

    /// Maps an integer into the prime subfield (`value mod p`), negative values included.
    pub fn from_int(&self, value: i64) -> FieldElement {
        let p = self.characteristic() as i64;
        FieldElement { value: value.rem_euclid(p) as u8, order: self.order() as u8 }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(|v| FieldElement { value: v as u8, order: self.order() as u8 })
    }

    fn check(&self, e: FieldElement) -> Result<u8, FieldError> {
        if e.order as u32 != self.order() {
            return Err(FieldError::FieldMismatch { left: self.order(), right: e.order as u32 });
        }
        Ok(e.value)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        Ok(self.wrap(self.add_raw(x, y)))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        Ok(self.wrap(self.sub_raw(x, y)))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        Ok(self.wrap(self.mul_raw(x, y)))
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.neg_raw(self.check(a)?)))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let x = self.check(a)?;
        if x == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.wrap(self.inv_raw(x)))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.pow_raw(self.check(a)?, e)))
    }

    fn wrap(&self, value: u8) -> FieldElement {
        FieldElement { value, order: self.order() as u8 }
    }

    // Raw index arithmetic used by the polynomial and matrix kernels. Callers
    // guarantee that every operand is below `order()`.

    #[inline]
    pub(crate) fn add_raw(&self, a: u8, b: u8) -> u8 {
        self.tables.add[a as usize * self.tables.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u8, b: u8) -> u8 {
        self.add_raw(a, self.neg_raw(b))
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u8, b: u8) -> u8 {
        self.tables.mul[a as usize * self.tables.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u8) -> u8 {
        self.tables.neg[a as usize]
    }

    /// Panics on zero in debug builds; returns 0 otherwise.
    #[inline]
    pub(crate) fn inv_raw(&self, a: u8) -> u8 {
        debug_assert!(a != 0, "inverse of zero");
        self.tables.inv[a as usize]
    }

    pub(crate) fn pow_raw(&self, a: u8, mut e: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// The unique `b` with `b^p = a`.
    pub(crate) fn pth_root_raw(&self, a: u8) -> u8 {
        // Frobenius has order m, so its inverse is x -> x^(p^(m-1)).
        let e = (self.characteristic() as u64).pow(self.degree() - 1);
        self.pow_raw(a, e)
    }

    /// Table symbol of an element: `0`–`9`, then `A`–`H` for 10–17.
    pub fn symbol_encode(&self, e: FieldElement) -> Result<char, FieldError> {
        let v = self.check(e)?;
        symbol_for(v)
    }

    pub fn symbol_decode(&self, c: char) -> Result<FieldElement, FieldError> {
        let bad = FieldError::InvalidSymbol { symbol: c, order: self.order() };
        let v = symbol_value(c).ok_or(bad.clone())?;
        if v as u32 >= self.order() {
            return Err(bad);
        }
        Ok(self.wrap(v))
    }
}

pub(crate) fn symbol_for(v: u8) -> Result<char, FieldError> {
    match v {
        0..=9 => Ok((b'0' + v) as char),
        10..=MAX_SYMBOL_VALUE => Ok((b'A' + v - 10) as char),
        _ => Err(FieldError::NoSymbol(v)),
    }
}

pub(crate) fn symbol_value(c: char) -> Option<u8> {
    match c {
        '0'..='9' => Some(c as u8 - b'0'),
        'A'..='H' => Some(c as u8 - b'A' + 10),
        'a'..='h' => Some(c as u8 - b'a' + 10),
        _ => None,
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.order() == other.order()
    }
}

impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.order().hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order())
    }
}

/// An element of a supported field, tagged with the order of its field.
///
/// The operator impls (`+`, `-`, `*`, unary `-`) panic when the operands come
/// from different fields; use the checked methods on [`FieldSpec`] when that
/// can happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u8,
    order: u8,
}

impl FieldElement {
    pub fn value(self) -> u8 {
        self.value
    }

    pub fn field(self) -> FieldSpec {
        FieldSpec { tables: registry(self.order as u32) }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<FieldElement, FieldError> {
        self.field().inv(self)
    }

    pub fn pow(self, e: u64) -> FieldElement {
        let f = self.field();
        f.wrap(f.pow_raw(self.value, e))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $raw:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.order, rhs.order, "operands from different fields");
                let f = self.field();
                f.wrap(f.$raw(self.value, rhs.value))
            }
        }
    };
}

binop!(Add, add, add_raw);
binop!(Sub, sub, sub_raw);
binop!(Mul, mul, mul_raw);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let f = self.field();
        f.wrap(f.neg_raw(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<FieldSpec> {
        SUPPORTED_ORDERS.iter().map(|&q| FieldSpec::with_order(q).unwrap()).collect()
    }

    #[test]
    fn construction() {
        let f = FieldSpec::new(13, 1).unwrap();
        assert_eq!((f.order(), f.characteristic(), f.degree()), (13, 13, 1));
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.order(), 9);
        assert_eq!(f.modulus(), &[2, 2]);
        assert_eq!(FieldSpec::new(2, 5).unwrap_err(), FieldError::UnsupportedField { order: 32 });
        assert_eq!(FieldSpec::new(6, 1).unwrap_err(), FieldError::NotPrime(6));
        assert!(FieldSpec::with_order(6).is_err());
        assert!(FieldSpec::with_order(31).is_err());
    }

    #[test]
    fn small_examples() {
        let f = FieldSpec::new(13, 1).unwrap();
        assert_eq!(f.inv(f.element(2).unwrap()).unwrap().value(), 7);
        assert_eq!(f.inv(f.zero()), Err(FieldError::DivisionByZero));
        let g = FieldSpec::new(5, 1).unwrap();
        assert_eq!(g.neg(g.element(3).unwrap()).unwrap().value(), 2);
        assert!(matches!(f.add(f.one(), g.one()), Err(FieldError::FieldMismatch { left: 13, right: 5 })));
        assert_eq!(f.from_int(-1).value(), 12);
    }

    // α^2 = -α - 1 in GF(4): index 2 is α, α² = α + 1 = index 3.
    #[test]
    fn gf4_multiplication() {
        let f = FieldSpec::with_order(4).unwrap();
        let a = f.element(2).unwrap();
        assert_eq!((a * a).value(), 3);
        assert_eq!((a * a * a).value(), 1);
    }

    #[test]
    fn axioms_exhaustive() {
        for f in all_fields() {
            let q = f.order() as u64;
            for a in f.elements() {
                assert_eq!(a * f.one(), a);
                assert_eq!(a + f.zero(), a);
                assert_eq!(a + (-a), f.zero());
                if !a.is_zero() {
                    let ai = a.inv().unwrap();
                    assert_eq!(a * ai, f.one());
                    assert_eq!(ai.inv().unwrap(), a);
                    assert_eq!(a.pow(q - 1), f.one());
                }
                for b in f.elements() {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    for c in f.elements() {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
            }
        }
    }

    #[test]
    fn extension_generators_are_primitive() {
        for f in all_fields().into_iter().filter(|f| f.degree() > 1) {
            let alpha = f.element(f.characteristic()).unwrap();
            let q = f.order() as u64;
            let order = (1..q).find(|&e| alpha.pow(e) == f.one()).unwrap();
            assert_eq!(order, q - 1, "{f:?}");
        }
    }

    #[test]
    fn pth_roots() {
        for f in all_fields() {
            let p = f.characteristic() as u64;
            for a in f.elements() {
                let r = f.pth_root_raw(a.value());
                assert_eq!(f.pow_raw(r, p), a.value());
            }
        }
    }

    #[test]
    fn symbols() {
        let f17 = FieldSpec::with_order(17).unwrap();
        assert_eq!(f17.symbol_encode(f17.element(15).unwrap()).unwrap(), 'F');
        assert_eq!(f17.symbol_encode(f17.zero()).unwrap(), '0');
        let f13 = FieldSpec::with_order(13).unwrap();
        assert_eq!(f13.symbol_decode('C').unwrap().value(), 12);
        assert!(f13.symbol_decode('D').is_err());
        assert!(f13.symbol_decode('?').is_err());
        let f29 = FieldSpec::with_order(29).unwrap();
        assert_eq!(f29.symbol_encode(f29.element(18).unwrap()), Err(FieldError::NoSymbol(18)));
        for f in all_fields() {
            for e in f.elements().take(18) {
                assert_eq!(f.symbol_decode(f.symbol_encode(e).unwrap()).unwrap(), e);
            }
        }
    }
}
