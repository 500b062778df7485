//! Dense univariate polynomials over GF(q), factorization into irreducibles
//! and enumeration of monic divisors.
//!
//! Coefficients are stored in ascending powers of `x`. The textual "table"
//! notation lists the same coefficients left to right with one symbol each
//! (`0`–`9`, `A`–`H`), so `79F1` over GF(17) is `7 + 9x + 15x² + x³`. Fields
//! with more than 18 elements use comma-separated decimal coefficients
//! instead (`3,0,21,1`).

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::galois::{symbol_for, symbol_value, FieldElement, FieldError, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroInput,
    #[error("gcd(0, 0) is undefined")]
    UndefinedGcd,
    #[error("invalid exponents: need 0 < i < n, got n = {n}, i = {i}")]
    InvalidExponent { n: usize, i: usize },
    #[error("coefficient {0} must be nonzero")]
    ZeroCoefficient(&'static str),
    #[error("polynomial of degree {degree} does not fit below x^{n}")]
    DegreeTooLarge { degree: usize, n: usize },
    #[error("cannot parse {input:?} at position {position}: {message}")]
    Parse { input: String, position: usize, message: String },
}

/// A polynomial over one of the supported fields, kept in canonical form
/// (no trailing zero coefficients; the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<u8>,
}

impl Poly {
    /// Builds a polynomial from raw element indices in ascending order.
    pub fn new(field: FieldSpec, coeffs: Vec<u8>) -> Result<Poly, PolyError> {
        if let Some(&bad) = coeffs.iter().find(|&&c| c as u32 >= field.order()) {
            return Err(FieldError::OutOfRange { value: bad as u32, order: field.order() }.into());
        }
        Ok(Poly::from_raw(field, coeffs))
    }

    pub fn from_elements(field: FieldSpec, coeffs: &[FieldElement]) -> Result<Poly, PolyError> {
        let mut raw = Vec::with_capacity(coeffs.len());
        for &c in coeffs {
            if c.field() != field {
                return Err(FieldError::FieldMismatch { left: field.order(), right: c.field().order() }.into());
            }
            raw.push(c.value());
        }
        Ok(Poly::from_raw(field, raw))
    }

    pub(crate) fn from_raw(field: FieldSpec, mut coeffs: Vec<u8>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: FieldSpec) -> Poly {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: FieldSpec) -> Poly {
        Poly { field, coeffs: vec![1] }
    }

    pub fn x(field: FieldSpec) -> Poly {
        Poly { field, coeffs: vec![0, 1] }
    }

    /// `c·x^k`.
    pub fn monomial(c: FieldElement, k: usize) -> Poly {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c.value();
        Poly::from_raw(c.field(), coeffs)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        let v = self.coeffs.get(i).copied().unwrap_or(0);
        self.field.element(v as u32).expect("canonical coefficient")
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().map(|&v| self.field.element(v as u32).expect("canonical coefficient"))
    }

    /// Coefficient vector of length `n`, zero padded. The caller ensures `deg < n`.
    pub fn to_vector(&self, n: usize) -> Vec<u8> {
        let mut v = self.coeffs.clone();
        v.resize(n, 0);
        v
    }

    fn same_field(&self, other: &Poly) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch { left: self.field.order(), right: other.field.order() }.into());
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_field(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Poly) -> Poly {
        let f = self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let out = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                f.add_raw(a, b)
            })
            .collect();
        Poly::from_raw(f, out)
    }

    pub(crate) fn sub_unchecked(&self, other: &Poly) -> Poly {
        self.add_unchecked(&other.neg())
    }

    pub(crate) fn mul_unchecked(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        Poly::from_raw(self.field, mul_slices(self.field, &self.coeffs, &other.coeffs))
    }

    pub fn neg(&self) -> Poly {
        let f = self.field;
        Poly { field: f, coeffs: self.coeffs.iter().map(|&c| f.neg_raw(c)).collect() }
    }

    pub fn scale(&self, c: FieldElement) -> Result<Poly, PolyError> {
        if c.field() != self.field {
            return Err(FieldError::FieldMismatch { left: self.field.order(), right: c.field().order() }.into());
        }
        Ok(self.scale_raw(c.value()))
    }

    pub(crate) fn scale_raw(&self, c: u8) -> Poly {
        let f = self.field;
        Poly::from_raw(f, self.coeffs.iter().map(|&a| f.mul_raw(a, c)).collect())
    }

    /// Divides by the leading coefficient; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&lc) => self.scale_raw(self.field.inv_raw(lc)),
        }
    }

    pub fn derivative(&self) -> Poly {
        let f = self.field;
        let out =
            self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.mul_raw(c, f.from_int(i as i64).value())).collect();
        Poly::from_raw(f, out)
    }

    pub fn eval(&self, x: FieldElement) -> Result<FieldElement, PolyError> {
        if x.field() != self.field {
            return Err(FieldError::FieldMismatch { left: self.field.order(), right: x.field().order() }.into());
        }
        let f = self.field;
        let v = self.coeffs.iter().rev().fold(0u8, |acc, &c| f.add_raw(f.mul_raw(acc, x.value()), c));
        Ok(f.element(v as u32)?)
    }

    /// Quotient and remainder with `deg r < deg g`.
    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly), PolyError> {
        self.same_field(g)?;
        if g.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(self.divmod_unchecked(g))
    }

    pub(crate) fn divmod_unchecked(&self, g: &Poly) -> (Poly, Poly) {
        let f = self.field;
        let dg = g.coeffs.len() - 1;
        if self.coeffs.len() <= dg {
            return (Poly::zero(f), self.clone());
        }
        let inv_lead = f.inv_raw(g.coeffs[dg]);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u8; rem.len() - dg];
        for top in (dg..rem.len()).rev() {
            let c = f.mul_raw(rem[top], inv_lead);
            if c == 0 {
                continue;
            }
            quot[top - dg] = c;
            let shift = top - dg;
            for (j, &gj) in g.coeffs.iter().enumerate() {
                rem[shift + j] = f.sub_raw(rem[shift + j], f.mul_raw(c, gj));
            }
        }
        rem.truncate(dg);
        (Poly::from_raw(f, quot), Poly::from_raw(f, rem))
    }

    pub fn rem(&self, g: &Poly) -> Result<Poly, PolyError> {
        Ok(self.divmod(g)?.1)
    }

    pub fn divides(&self, f: &Poly) -> Result<bool, PolyError> {
        Ok(f.divmod(self)?.1.is_zero())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_field(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::UndefinedGcd);
        }
        Ok(self.gcd_unchecked(other))
    }

    pub(crate) fn gcd_unchecked(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divmod_unchecked(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Result<Poly, PolyError> {
        self.same_field(m)?;
        if m.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let mut base = self.divmod_unchecked(m).1;
        let mut acc = Poly::one(self.field).divmod_unchecked(m).1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base).divmod_unchecked(m).1;
            }
            base = base.mul_unchecked(&base).divmod_unchecked(m).1;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `x^n − a·x^i − b`.
    pub fn trinomial(n: usize, i: usize, a: FieldElement, b: FieldElement) -> Result<Poly, PolyError> {
        if i == 0 || i >= n {
            return Err(PolyError::InvalidExponent { n, i });
        }
        if a.field() != b.field() {
            return Err(FieldError::FieldMismatch { left: a.field().order(), right: b.field().order() }.into());
        }
        if a.is_zero() {
            return Err(PolyError::ZeroCoefficient("a"));
        }
        if b.is_zero() {
            return Err(PolyError::ZeroCoefficient("b"));
        }
        let f = a.field();
        let mut coeffs = vec![0u8; n + 1];
        coeffs[n] = 1;
        coeffs[i] = f.neg_raw(a.value());
        coeffs[0] = f.neg_raw(b.value());
        Ok(Poly::from_raw(f, coeffs))
    }

    /// `x^n − v(x)` with `deg v < n`.
    pub fn multinomial(n: usize, v: &Poly) -> Result<Poly, PolyError> {
        if let Some(d) = v.degree() {
            if d >= n {
                return Err(PolyError::DegreeTooLarge { degree: d, n });
            }
        }
        let mut coeffs = v.neg().to_vector(n + 1);
        coeffs[n] = 1;
        Ok(Poly::from_raw(v.field, coeffs))
    }

    /// Parses the table notation, a comma-separated decimal list, or a
    /// symbolic expression such as `x^11-x-3`, picking the form from the input.
    pub fn parse(s: &str, field: FieldSpec) -> Result<Poly, PolyError> {
        let s = s.trim();
        if s.contains(['x', 'X']) {
            Poly::parse_symbolic(s, field)
        } else if s.contains(',') {
            Poly::parse_decimal_list(s, field)
        } else {
            Poly::parse_table(s, field)
        }
    }

    /// One symbol per coefficient, ascending powers, leading coefficient last.
    pub fn parse_table(s: &str, field: FieldSpec) -> Result<Poly, PolyError> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        if s.is_empty() {
            return Err(parse_error(s, 0, "empty polynomial"));
        }
        let mut coeffs = Vec::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            let e = field
                .symbol_decode(ch)
                .map_err(|_| parse_error(s, pos, &format!("{ch:?} is not a symbol of GF({})", field.order())))?;
            coeffs.push(e.value());
        }
        Ok(Poly::from_raw(field, coeffs))
    }

    pub fn parse_decimal_list(s: &str, field: FieldSpec) -> Result<Poly, PolyError> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mut coeffs = Vec::new();
        let mut pos = 0;
        for tok in s.split(',') {
            let v: u32 = tok
                .trim()
                .parse()
                .map_err(|_| parse_error(s, pos, &format!("{:?} is not a decimal coefficient", tok.trim())))?;
            if v >= field.order() {
                return Err(parse_error(s, pos, &format!("{v} is not an element of GF({})", field.order())));
            }
            coeffs.push(v as u8);
            pos += tok.len() + 1;
        }
        Ok(Poly::from_raw(field, coeffs))
    }

    /// Sums of terms `c`, `c*x`, `cx^k`, `x^k` with `+`/`-`. Integer
    /// coefficients are reduced into the prime subfield for prime fields and
    /// taken as element indices for extension fields.
    pub fn parse_symbolic(s: &str, field: FieldSpec) -> Result<Poly, PolyError> {
        let bytes: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let text: String = bytes.iter().collect();
        if bytes.is_empty() {
            return Err(parse_error(&text, 0, "empty polynomial"));
        }
        let mut acc = Poly::zero(field);
        let mut pos = 0;
        while pos < bytes.len() {
            let mut negative = false;
            if bytes[pos] == '+' || bytes[pos] == '-' {
                negative = bytes[pos] == '-';
                pos += 1;
            } else if pos != 0 {
                return Err(parse_error(&text, pos, "expected '+' or '-'"));
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coeff_text: String = bytes[start..pos].iter().collect();
            let mut coeff = if coeff_text.is_empty() {
                None
            } else {
                let v: u64 = coeff_text.parse().map_err(|_| parse_error(&text, start, "coefficient too large"))?;
                Some(v)
            };
            if pos < bytes.len() && bytes[pos] == '*' {
                pos += 1;
            }
            let mut exp = 0usize;
            if pos < bytes.len() && (bytes[pos] == 'x' || bytes[pos] == 'X') {
                pos += 1;
                exp = 1;
                if pos < bytes.len() && bytes[pos] == '^' {
                    pos += 1;
                    let es = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let et: String = bytes[es..pos].iter().collect();
                    exp = et.parse().map_err(|_| parse_error(&text, es, "missing exponent"))?;
                }
                coeff.get_or_insert(1);
            } else if coeff.is_none() {
                return Err(parse_error(&text, start, "expected a coefficient or x"));
            }
            let raw = coeff.unwrap();
            let c = if field.degree() == 1 {
                field.from_int((raw % field.order() as u64) as i64)
            } else {
                field.element(u32::try_from(raw).unwrap_or(u32::MAX)).map_err(|_| {
                    parse_error(&text, start, &format!("{raw} is not an element of GF({})", field.order()))
                })?
            };
            let c = if negative { -c } else { c };
            acc = acc.add_unchecked(&Poly::monomial(c, exp));
        }
        Ok(acc)
    }

    /// Every reading of a table string in which a literal `10` may denote
    /// the single element ten (for fields with more than ten elements).
    /// The plain one-symbol-per-character reading comes first when valid.
    pub fn table_alternatives(s: &str, field: FieldSpec) -> Vec<Poly> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mut out: Vec<Poly> = Vec::new();
        if let Ok(p) = Poly::parse_table(s, field) {
            out.push(p);
        }
        if field.order() <= 10 {
            return out;
        }
        let chars: Vec<char> = s.chars().collect();
        let sites: Vec<usize> =
            (0..chars.len().saturating_sub(1)).filter(|&i| chars[i] == '1' && chars[i + 1] == '0').collect();
        // 2^sites readings; the tables never have more than a handful of sites
        let limit = sites.len().min(12);
        for mask in 1u32..(1 << limit) {
            let chosen: Vec<usize> = (0..limit).filter(|b| mask >> b & 1 == 1).map(|b| sites[b]).collect();
            if chosen.windows(2).any(|w| w[1] < w[0] + 2) {
                continue;
            }
            let mut coeffs = Vec::new();
            let mut i = 0;
            let mut ok = true;
            while i < chars.len() {
                if chosen.contains(&i) {
                    coeffs.push(10u8);
                    i += 2;
                } else {
                    match symbol_value(chars[i]) {
                        Some(v) if (v as u32) < field.order() => coeffs.push(v),
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                    i += 1;
                }
            }
            if ok {
                let p = Poly::from_raw(field, coeffs);
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Table notation: single symbols for q ≤ 18, comma-separated decimals otherwise.
    pub fn format_table(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if self.field.order() <= 18 {
            self.coeffs.iter().map(|&c| symbol_for(c).expect("q <= 18")).collect()
        } else {
            self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

fn parse_error(input: &str, position: usize, message: &str) -> PolyError {
    PolyError::Parse { input: input.to_string(), position, message: message.to_string() }
}

pub(crate) fn mul_slices(f: FieldSpec, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add_raw(out[i + j], f.mul_raw(x, y));
        }
    }
    out
}

impl fmt::Display for Poly {
    /// Descending symbolic form, e.g. `x^11 + 12x + 10`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.field.order(), self)
    }
}

/// Canonical order: by degree, then by coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .order()
            .cmp(&other.field.order())
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `h ↦ h^q mod m` as a linear map, stored as the rows `x^{iq} mod m`.
struct Frobenius {
    modulus: Poly,
    rows: Vec<Vec<u8>>,
}

impl Frobenius {
    fn new(modulus: &Poly) -> Frobenius {
        let f = modulus.field;
        let n = modulus.degree().expect("nonzero modulus");
        let xq = Poly::x(f).pow_mod(f.order() as u64, modulus).expect("same field");
        let mut rows = Vec::with_capacity(n);
        let mut cur = Poly::one(f).divmod_unchecked(modulus).1;
        for _ in 0..n {
            rows.push(cur.to_vector(n));
            cur = cur.mul_unchecked(&xq).divmod_unchecked(modulus).1;
        }
        Frobenius { modulus: modulus.clone(), rows }
    }

    fn apply(&self, h: &Poly) -> Poly {
        let f = self.modulus.field;
        let n = self.rows.len();
        let mut out = vec![0u8; n];
        for (i, &c) in h.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&self.rows[i]) {
                *o = f.add_raw(*o, f.mul_raw(c, r));
            }
        }
        Poly::from_raw(f, out)
    }
}

/// Rabin's test.
pub fn is_irreducible(f: &Poly) -> bool {
    let Some(n) = f.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let m = f.monic();
    let frob = Frobenius::new(&m);
    let x = Poly::x(m.field).divmod_unchecked(&m).1;
    // powers[k] = x^{q^k} mod m
    let mut powers = vec![x.clone()];
    for k in 1..=n {
        let next = frob.apply(&powers[k - 1]);
        powers.push(next);
    }
    if powers[n] != x {
        return false;
    }
    prime_divisors(n).into_iter().all(|r| powers[n / r].sub_unchecked(&x).gcd_unchecked(&m).is_one())
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Complete factorization `unit · ∏ factor^multiplicity` with monic
/// irreducible factors listed in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    unit: FieldElement,
    factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn unit(&self) -> FieldElement {
        self.unit
    }

    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    pub fn field(&self) -> FieldSpec {
        self.unit.field()
    }

    /// Degree of the factored polynomial.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|(p, m)| p.degree().unwrap() * *m as usize).sum()
    }

    /// `∏ (mᵢ + 1)`, saturating.
    pub fn divisor_count(&self) -> u128 {
        self.factors.iter().fold(1u128, |acc, (_, m)| acc.saturating_mul(*m as u128 + 1))
    }

    pub fn reconstruct(&self) -> Poly {
        let f = self.field();
        let mut acc = Poly::monomial(self.unit, 0);
        for (p, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul_unchecked(p);
            }
        }
        debug_assert_eq!(acc.field, f);
        acc
    }

    /// Monic divisors in nondecreasing degree order, optionally restricted to
    /// `min_degree..=max_degree`.
    pub fn divisors(&self, min_degree: usize, max_degree: usize) -> Divisors<'_> {
        Divisors::new(self, min_degree, max_degree)
    }

    pub fn all_divisors(&self) -> Divisors<'_> {
        Divisors::new(self, 0, usize::MAX)
    }

    /// Factorization of `self / d` for a divisor `d` given as exponents.
    pub(crate) fn cofactor(&self, exps: &[u32]) -> Factorization {
        let factors = self
            .factors
            .iter()
            .zip(exps)
            .filter(|((_, m), e)| *m > **e)
            .map(|((p, m), e)| (p.clone(), m - e))
            .collect();
        Factorization { unit: self.field().one(), factors }
    }
}

/// Factors `f` into monic irreducibles. `seed` drives the randomized
/// equal-degree splitting; the result does not depend on it.
pub fn factor(f: &Poly, seed: u64) -> Result<Factorization, PolyError> {
    let unit = f.leading().ok_or(PolyError::ZeroInput)?;
    let monic = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for (block, d) in distinct_degree(&part) {
            for irreducible in equal_degree(&block, d, &mut rng) {
                factors.push((irreducible, mult));
            }
        }
    }
    factors.sort();
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (p, m) in factors {
        match merged.last_mut() {
            Some((last, lm)) if *last == p => *lm += m,
            _ => merged.push((p, m)),
        }
    }
    Ok(Factorization { unit, factors: merged })
}

/// Squarefree parts with multiplicities for a monic input.
fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    let field = f.field;
    let p = field.characteristic() as usize;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut c = f.gcd_unchecked(&f.derivative());
    let mut w = f.divmod_unchecked(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd_unchecked(&c);
        let fac = w.divmod_unchecked(&y).0;
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.divmod_unchecked(&w).0;
        i += 1;
    }
    if !c.is_one() {
        // c is a p-th power: c(x) = r(x)^p
        let root: Vec<u8> = c.coeffs.iter().step_by(p).map(|&a| field.pth_root_raw(a)).collect();
        let root = Poly::from_raw(field, root);
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly::x(f.field);
    // h tracks x^{q^d} mod f; reducing it further mod rest is implicit in the gcd
    let frob = Frobenius::new(f);
    let mut h = x.divmod_unchecked(f).1;
    let mut d = 1;
    while rest.degree().unwrap() >= 2 * d {
        h = frob.apply(&h);
        let g = h.sub_unchecked(&x).gcd_unchecked(&rest);
        if !g.is_one() {
            rest = rest.divmod_unchecked(&g).0;
            out.push((g, d));
        }
        d += 1;
    }
    if rest.degree().unwrap() > 0 {
        let deg = rest.degree().unwrap();
        out.push((rest, deg));
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of distinct irreducibles of degree `d`.
fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let field = f.field;
    let q = field.order() as u64;
    let frob = Frobenius::new(f);
    loop {
        let r: Vec<u8> = (0..n).map(|_| rng.random_range(0..q) as u8).collect();
        let r = Poly::from_raw(field, r);
        if r.degree().unwrap_or(0) == 0 {
            continue;
        }
        let s = if q % 2 == 1 {
            // r^((q^d - 1)/2) = (r · r^q · ... · r^{q^{d-1}})^((q-1)/2)
            let mut norm = r.clone();
            let mut cur = r.clone();
            for _ in 1..d {
                cur = frob.apply(&cur);
                norm = norm.mul_unchecked(&cur).divmod_unchecked(f).1;
            }
            let e = norm.pow_mod((q - 1) / 2, f).expect("same field");
            e.sub_unchecked(&Poly::one(field))
        } else {
            // absolute trace to GF(2): r + r^2 + ... + r^{2^{md-1}}
            let steps = field.degree() as usize * d;
            let mut acc = r.clone();
            let mut cur = r.clone();
            for _ in 1..steps {
                cur = cur.mul_unchecked(&cur).divmod_unchecked(f).1;
                acc = acc.add_unchecked(&cur);
            }
            acc
        };
        let g = s.gcd_unchecked(f);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            let other = f.divmod_unchecked(&g).0;
            let mut parts = equal_degree(&g, d, rng);
            parts.extend(equal_degree(&other, d, rng));
            return parts;
        }
    }
}

/// Lazy stream of the monic divisors of a factored polynomial.
pub struct Divisors<'a> {
    fact: &'a Factorization,
    degrees: Vec<usize>,
    mults: Vec<u32>,
    /// capacity[i] = Σ_{j ≥ i} deg_j · mult_j
    capacity: Vec<usize>,
    powers: Vec<Vec<Poly>>,
    target: usize,
    max_degree: usize,
    exps: Vec<u32>,
    primed: bool,
}

impl<'a> Divisors<'a> {
    fn new(fact: &'a Factorization, min_degree: usize, max_degree: usize) -> Divisors<'a> {
        let degrees: Vec<usize> = fact.factors.iter().map(|(p, _)| p.degree().unwrap()).collect();
        let mults: Vec<u32> = fact.factors.iter().map(|(_, m)| *m).collect();
        let r = degrees.len();
        let mut capacity = vec![0; r + 1];
        for i in (0..r).rev() {
            capacity[i] = capacity[i + 1] + degrees[i] * mults[i] as usize;
        }
        let powers = fact
            .factors
            .iter()
            .map(|(p, m)| {
                let mut v = vec![Poly::one(p.field)];
                for _ in 0..*m {
                    let next = v.last().unwrap().mul_unchecked(p);
                    v.push(next);
                }
                v
            })
            .collect();
        Divisors {
            fact,
            degrees,
            mults,
            max_degree: max_degree.min(capacity[0]),
            capacity,
            powers,
            target: min_degree,
            exps: vec![0; r],
            primed: false,
        }
    }

    /// Lexicographically smallest completion of positions `i..` summing to `remaining`.
    fn fill_from(&mut self, i: usize, remaining: usize) -> bool {
        if i == self.degrees.len() {
            return remaining == 0;
        }
        if remaining > self.capacity[i] {
            return false;
        }
        for e in 0..=self.mults[i] {
            let used = e as usize * self.degrees[i];
            if used > remaining {
                break;
            }
            if remaining - used <= self.capacity[i + 1] {
                self.exps[i] = e;
                if self.fill_from(i + 1, remaining - used) {
                    return true;
                }
            }
        }
        false
    }

    fn advance_within_target(&mut self) -> bool {
        let r = self.degrees.len();
        for i in (0..r).rev() {
            let used: usize = (0..i).map(|j| self.exps[j] as usize * self.degrees[j]).sum();
            let remaining = self.target - used;
            for e in self.exps[i] + 1..=self.mults[i] {
                let take = e as usize * self.degrees[i];
                if take > remaining {
                    break;
                }
                self.exps[i] = e;
                if self.fill_from(i + 1, remaining - take) {
                    return true;
                }
            }
        }
        false
    }

    /// Exponent vector of the next divisor, in the same order as `next()`.
    pub fn next_exponents(&mut self) -> Option<Vec<u32>> {
        loop {
            if self.target > self.max_degree {
                return None;
            }
            let found = if self.primed {
                self.advance_within_target()
            } else {
                self.primed = true;
                self.fill_from(0, self.target)
            };
            if found {
                return Some(self.exps.clone());
            }
            self.target += 1;
            self.primed = false;
        }
    }

    pub(crate) fn divisor_for(&self, exps: &[u32]) -> Poly {
        let f = self.fact.field();
        exps.iter().enumerate().fold(Poly::one(f), |acc, (i, &e)| {
            if e == 0 {
                acc
            } else {
                acc.mul_unchecked(&self.powers[i][e as usize])
            }
        })
    }
}

impl Iterator for Divisors<'_> {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        let exps = self.next_exponents()?;
        Some(self.divisor_for(&exps))
    }
}
