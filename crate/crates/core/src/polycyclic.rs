//! Polycyclic codes: ideals of `GF(q)[x]/⟨x^n − v(x)⟩` and shift spans.
//!
//! A length-`n` word `(c₀, …, c_{n−1})` is identified with the polynomial
//! `Σ cᵢ xⁱ`. Multiplying by `x` modulo `x^n − v(x)` is the right
//! polycyclic shift, so ideals of the quotient ring are exactly the codes
//! closed under that shift.

use thiserror::Error;

use crate::galois::FieldSpec;
use crate::lincode::LinearCode;
use crate::polyring::{Poly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolycyclicError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{divisor} does not divide the modulus {modulus}")]
    NotADivisor { divisor: String, modulus: String },
    #[error("polynomial of degree {degree} is too long for length {n}")]
    DegreeTooLarge { degree: usize, n: usize },
    #[error("length must be positive")]
    ZeroLength,
    #[error("the zero polynomial does not generate a code")]
    ZeroGenerator,
}

/// The ring `GF(q)[x]/⟨x^n − v(x)⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbientRing {
    field: FieldSpec,
    n: usize,
    v: Poly,
    modulus: Poly,
}

impl AmbientRing {
    pub fn new(field: FieldSpec, n: usize, v: Poly) -> Result<AmbientRing, PolycyclicError> {
        if n == 0 {
            return Err(PolycyclicError::ZeroLength);
        }
        if v.field() != field {
            return Err(PolyError::from(crate::galois::FieldError::FieldMismatch {
                left: field.order(),
                right: v.field().order(),
            })
            .into());
        }
        let modulus = Poly::multinomial(n, &v)?;
        Ok(AmbientRing { field, n, v, modulus })
    }

    /// Ring for a modulus `t`, scaled to be monic first.
    pub fn from_modulus(t: &Poly) -> Result<AmbientRing, PolycyclicError> {
        let n = t.degree().ok_or(PolycyclicError::ZeroGenerator)?;
        if n == 0 {
            return Err(PolycyclicError::ZeroLength);
        }
        let monic = t.monic();
        let xn = Poly::monomial(t.field().one(), n);
        let v = xn.sub(&monic)?;
        AmbientRing::new(t.field(), n, v)
    }

    /// Cyclic ring, `v = 1`.
    pub fn cyclic(field: FieldSpec, n: usize) -> Result<AmbientRing, PolycyclicError> {
        AmbientRing::new(field, n, Poly::one(field))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn v(&self) -> &Poly {
        &self.v
    }

    /// The monic modulus `x^n − v(x)`.
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// Code of the ideal `⟨g⟩`; `g` must divide the modulus.
    pub fn ideal_code(&self, g: &Poly) -> Result<LinearCode, PolycyclicError> {
        if g.is_zero() {
            return Err(PolycyclicError::ZeroGenerator);
        }
        if !g.divides(&self.modulus)? {
            return Err(PolycyclicError::NotADivisor { divisor: g.to_string(), modulus: self.modulus.to_string() });
        }
        // the zero code has no generator rows
        if g.degree() == Some(self.n) {
            return Ok(LinearCode::zero(self.field, self.n));
        }
        self.span_code(&g.monic())
    }

    /// Ideal code of `gcd(g, modulus)`, for callers that want substitution.
    pub fn ideal_code_of_gcd(&self, g: &Poly) -> Result<LinearCode, PolycyclicError> {
        let d = g.gcd(&self.modulus)?;
        self.ideal_code(&d)
    }

    /// Span of the shifts `x^j·h`, `j < n − deg h`, without reduction.
    pub fn span_code(&self, h: &Poly) -> Result<LinearCode, PolycyclicError> {
        span_code(h, self.n)
    }

    pub fn shift(&self, w: &[u8]) -> Result<Vec<u8>, PolycyclicError> {
        polycyclic_shift(w, &self.v)
    }

    pub fn is_shift_closed(&self, c: &LinearCode) -> Result<bool, PolycyclicError> {
        is_shift_closed(c, &self.v)
    }
}

/// Code spanned by `h, x·h, …, x^{n−1−deg h}·h`. The rows are triangular,
/// so the dimension is exactly `n − deg h`.
pub fn span_code(h: &Poly, n: usize) -> Result<LinearCode, PolycyclicError> {
    let field = h.field();
    let d = h.degree().ok_or(PolycyclicError::ZeroGenerator)?;
    if d >= n {
        return Err(PolycyclicError::DegreeTooLarge { degree: d, n });
    }
    let rows = (0..n - d)
        .map(|j| {
            let mut r = vec![0u8; n];
            r[j..j + d + 1].copy_from_slice(h.coeffs());
            r
        })
        .collect();
    Ok(LinearCode::from_rows_unchecked(field, n, rows))
}

/// `(0, c₀, …, c_{n−2}) + c_{n−1}·v`.
pub fn polycyclic_shift(w: &[u8], v: &Poly) -> Result<Vec<u8>, PolycyclicError> {
    let n = w.len();
    if let Some(d) = v.degree() {
        if d >= n {
            return Err(PolycyclicError::LengthMismatch { left: n, right: d + 1 });
        }
    }
    let f = v.field();
    let top = w[n - 1];
    let mut out = Vec::with_capacity(n);
    out.push(0);
    out.extend_from_slice(&w[..n - 1]);
    if top != 0 {
        for (o, &vi) in out.iter_mut().zip(v.coeffs()) {
            *o = f.add_raw(*o, f.mul_raw(top, vi));
        }
    }
    Ok(out)
}

/// Whether the shift of every generator row stays in `c`.
pub fn is_shift_closed(c: &LinearCode, v: &Poly) -> Result<bool, PolycyclicError> {
    if let Some(d) = v.degree() {
        if d >= c.len() {
            return Err(PolycyclicError::LengthMismatch { left: c.len(), right: d + 1 });
        }
    }
    for row in c.generator_rows() {
        if !c.contains_word(&polycyclic_shift(row, v)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
