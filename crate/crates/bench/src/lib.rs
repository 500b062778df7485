//! Fixed benchmark inputs, built from table rows so runs are comparable.

use polyqec_core::{AmbientRing, FieldSpec, LinearCode, Poly};

/// `C₁` of the `[[11,1,5]]` row over GF(13): a `[11,6]` code.
pub fn code_gf13() -> LinearCode {
    ideal("x^11-x-3", "8A0C31", 13)
}

/// `C₁` of the `[[96,80,4]]` row over GF(5): a `[96,88]` code whose dual
/// (`5^8` words) is the cheap side.
pub fn code_gf5_96() -> LinearCode {
    ideal("x^96-x-1", "310032201", 5)
}

/// A `[16,4]` code over GF(9), exercising extension-field arithmetic.
pub fn code_gf9() -> LinearCode {
    let f = FieldSpec::with_order(9).expect("GF(9)");
    let rows =
        (0..4u32).map(|i| (0..16u32).map(|j| if j == i { 1 } else { ((i * 7 + j * 5) % 9) as u8 }).collect()).collect();
    LinearCode::from_rows(f, 16, rows).expect("valid rows")
}

fn ideal(t: &str, g: &str, q: u32) -> LinearCode {
    let f = FieldSpec::with_order(q).expect("supported field");
    let t = Poly::parse(t, f).expect("modulus");
    let g = Poly::parse(g, f).expect("generator");
    AmbientRing::from_modulus(&t).and_then(|r| r.ideal_code(&g)).expect("divisor")
}
