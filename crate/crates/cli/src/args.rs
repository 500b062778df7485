//! Small value parsers shared by the subcommands.

use std::ops::RangeInclusive;

use polyqec_core::{FieldSpec, Poly};

/// `a..b`, `a..=b` (both inclusive) or a single value.
pub fn range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let s = s.trim();
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad number {t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(num(a)?..=num(b)?)
        }
        None => {
            let v = num(s)?;
            Ok(v..=v)
        }
    }
}

/// Comma-separated unsigned values.
pub fn list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("bad number {t:?}: {e}")))
        .collect()
}

/// `n,k,d`.
pub fn triple(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad number {t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [n, k, d] => Ok((n, k, d)),
        _ => Err(format!("expected n,k,d, got {s:?}")),
    }
}

/// A modulus: `(n,i,a,b)` for `x^n − a·x^i − b`, or any polynomial form.
pub fn modulus(s: &str, field: FieldSpec) -> Result<Poly, String> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let v: Vec<i64> = inner
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| format!("bad number {x:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let [n, i, a, b] = v[..] else {
            return Err(format!("expected (n,i,a,b), got {s:?}"));
        };
        if n < 2 || i < 1 {
            return Err(format!("invalid trinomial exponents in {s:?}"));
        }
        return Poly::trinomial(n as usize, i as usize, field.from_int(a), field.from_int(b))
            .map_err(|e| e.to_string());
    }
    Poly::parse(t, field).map_err(|e| e.to_string())
}

/// FNV-1a over the arguments, used when no seed is given.
pub fn seed_from_args(args: &[String]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for a in args {
        for b in a.bytes().chain(std::iter::once(0)) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(range("3..7").unwrap(), 3..=7);
        assert_eq!(range("3..=7").unwrap(), 3..=7);
        assert_eq!(range("11").unwrap(), 11..=11);
        assert!(range("a..b").is_err());
    }

    #[test]
    fn triples_and_lists() {
        assert_eq!(triple("11,1,5").unwrap(), (11, 1, 5));
        assert_eq!(triple("[11,1,5]").unwrap(), (11, 1, 5));
        assert!(triple("11,1").is_err());
        assert_eq!(list("1, 2,3").unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn moduli() {
        let f = FieldSpec::with_order(13).unwrap();
        assert_eq!(modulus("(11,1,1,3)", f).unwrap(), modulus("x^11-x-3", f).unwrap());
        assert!(modulus("(11,1,1)", f).is_err());
    }

    #[test]
    fn seeds_are_stable() {
        let a = vec!["search".to_string(), "trinomial".to_string()];
        assert_eq!(seed_from_args(&a), seed_from_args(&a.clone()));
        assert_ne!(seed_from_args(&a), seed_from_args(&a[..1]));
    }
}
