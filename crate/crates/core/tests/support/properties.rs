// Randomized property suites shared by the core integration tests and the
// acceptance runner. Every suite runs 500 cases from a fixed seed.

use std::collections::BTreeMap;

use polyqec_core::catalog::{Catalog, Format};
use polyqec_core::css::{
    combine_codes, css_construct, direct_sum_quantum, propagate_extend, propagate_puncture, propagate_subcode,
    singleton_defect,
};
use polyqec_core::galois::SUPPORTED_ORDERS;
use polyqec_core::lincode::macwilliams;
use polyqec_core::polycyclic::{span_code, AmbientRing};
use polyqec_core::{factor, CatalogRecord, FieldSpec, LinearCode, Poly, QuantumParams};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

pub const CASES: u32 = 500;
const SEED: u64 = 0x5eed_2024_c0de;
const BUDGET: u64 = 1_000_000;

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    })
}

fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

fn field(q: u32) -> FieldSpec {
    FieldSpec::with_order(q).expect("supported order")
}

/// Largest length with q^n ≤ 10⁵, capped at 10.
fn max_len(q: u32) -> usize {
    let mut n = 0;
    while n < 10 && (q as u64).pow(n as u32 + 1) <= 100_000 {
        n += 1;
    }
    n
}

/// A random code over a field small enough that both it and its dual can
/// be enumerated: (q, n, generator rows).
fn small_code() -> impl Strategy<Value = (u32, usize, Vec<Vec<u8>>)> {
    prop::sample::select(SUPPORTED_ORDERS.to_vec()).prop_flat_map(|q| (Just(q), 1..=max_len(q))).prop_flat_map(
        |(q, n)| {
            let row = prop::collection::vec(0..q as u8, n);
            (Just(q), Just(n), prop::collection::vec(row, 0..=n))
        },
    )
}

fn messages(f: FieldSpec, k: usize) -> impl Iterator<Item = Vec<u8>> {
    let q = f.order() as u64;
    (0..q.pow(k as u32)).map(move |mut m| {
        (0..k)
            .map(|_| {
                let d = (m % q) as u8;
                m /= q;
                d
            })
            .collect()
    })
}

fn codewords(c: &LinearCode) -> Vec<Vec<u8>> {
    messages(c.field(), c.dimension()).map(|m| c.encode(&m)).collect()
}

fn hamming(w: &[u8]) -> usize {
    w.iter().filter(|&&x| x != 0).count()
}

pub fn macwilliams_matches_enumeration() -> Result<(), String> {
    check(small_code(), |(q, n, rows)| {
        let c = LinearCode::from_rows(field(q), n, rows).unwrap();
        let k = c.dimension();
        let direct = c.dual().weight_enumerator(BUDGET).unwrap();
        let we = c.weight_enumerator(BUDGET).unwrap();
        prop_assert_eq!(we.to_u64().unwrap().iter().sum::<u64>(), (q as u64).pow(k as u32));
        let transformed = macwilliams(&we, q, n, k).unwrap();
        prop_assert_eq!(&transformed, &direct);
        prop_assert_eq!(c.exact_weight_enumerator(BUDGET).unwrap(), we);
        Ok(())
    })
}

pub fn dual_is_an_involution() -> Result<(), String> {
    check(small_code(), |(q, n, rows)| {
        let c = LinearCode::from_rows(field(q), n, rows).unwrap();
        let dual = c.dual();
        prop_assert_eq!(dual.dimension(), n - c.dimension());
        let back = dual.dual();
        prop_assert_eq!(back.generator_rows(), c.generator_rows());
        prop_assert!(c.contains(&back).unwrap() && back.contains(&c).unwrap());
        for w in dual.generator_rows() {
            for g in c.generator_rows() {
                let f = c.field();
                let dot = w
                    .iter()
                    .zip(g)
                    .fold(f.zero(), |acc, (&a, &b)| acc + f.element(a as u32).unwrap() * f.element(b as u32).unwrap());
                prop_assert!(dot.is_zero());
            }
        }
        Ok(())
    })
}

fn nonzero(q: u32) -> impl Strategy<Value = u8> {
    1..q as u8
}

fn trinomial(f: FieldSpec, n: usize, i: usize, a: u8, b: u8) -> Poly {
    Poly::trinomial(n, i, f.element(a as u32).unwrap(), f.element(b as u32).unwrap()).unwrap()
}

fn int_gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        int_gcd(b, a % b)
    }
}

/// Trinomial pairs sharing (n, i): coprime when only a or only b differs,
/// otherwise 1 or a binomial x^gcd(n,i) − c, and always coprime over GF(3)
/// for the four nonzero coefficient pairs.
pub fn trinomial_gcd_structure() -> Result<(), String> {
    let strategy = prop::sample::select(SUPPORTED_ORDERS.to_vec())
        .prop_flat_map(|q| (Just(q), 2..=60usize))
        .prop_flat_map(|(q, n)| (Just(q), Just(n), 1..n, nonzero(q), nonzero(q), nonzero(q), nonzero(q)));
    check(strategy, |(q, n, i, a1, b1, a2, b2)| {
        let f = field(q);
        let one = Poly::one(f);
        let t = |a, b| trinomial(f, n, i, a, b);
        if a1 != a2 {
            prop_assert_eq!(t(a1, b1).gcd(&t(a2, b1)).unwrap(), one.clone(), "distinct a");
        }
        if b1 != b2 {
            prop_assert_eq!(t(a1, b1).gcd(&t(a1, b2)).unwrap(), one.clone(), "distinct b");
        }
        if (a1, b1) != (a2, b2) {
            let (p1, p2) = (t(a1, b1), t(a2, b2));
            let g = p1.gcd(&p2).unwrap();
            prop_assert!(g.divides(&p1).unwrap() && g.divides(&p2).unwrap());
            prop_assert!(p1.divmod(&g).unwrap().1.is_zero());
            if !g.is_one() {
                let e = int_gcd(n, i);
                prop_assert_eq!(g.degree(), Some(e), "common factor degree");
                let middle_zero = g.coeffs()[1..e].iter().all(|&c| c == 0);
                prop_assert!(middle_zero && g.coeffs()[0] != 0, "common factor is not a binomial: {}", g);
            }
        }
        let f3 = field(3);
        let pairs = [(1u8, 1u8), (1, 2), (2, 1), (2, 2)];
        for (x, &(a, b)) in pairs.iter().enumerate() {
            for &(c, d) in &pairs[x + 1..] {
                let g = trinomial(f3, n, i, a, b).gcd(&trinomial(f3, n, i, c, d)).unwrap();
                prop_assert!(g.is_one(), "GF(3) pair not coprime: n={} i={} gives {}", n, i, g);
            }
        }
        Ok(())
    })
}

/// Ideal codes of x^n − v(x): dimension n − deg g, shift closure, inclusion
/// of ⟨lcm⟩ in ⟨g⟩, and span codes of multiples of g.
pub fn ideal_codes() -> Result<(), String> {
    let strategy = prop::sample::select(SUPPORTED_ORDERS.to_vec())
        .prop_flat_map(|q| (Just(q), 1..=14usize))
        .prop_flat_map(|(q, n)| {
            (
                Just(q),
                Just(n),
                prop::collection::vec(0..q as u8, n),
                nonzero(q),
                any::<u64>(),
                any::<u64>(),
                prop::collection::vec(0..q as u8, 0..=n),
            )
        });
    check(strategy, |(q, n, mut v, v0, pick1, pick2, h)| {
        let f = field(q);
        v[0] = v0;
        let ring = AmbientRing::new(f, n, Poly::new(f, v).unwrap()).unwrap();
        let t = ring.modulus().clone();
        let fact = factor(&t, pick1).unwrap();
        let count = fact.divisor_count();
        let g = fact.all_divisors().nth((pick1 as u128 % count) as usize).unwrap();
        let g2 = fact.all_divisors().nth((pick2 as u128 % count) as usize).unwrap();
        prop_assert!(g.divides(&t).unwrap());
        let c = ring.ideal_code(&g).unwrap();
        prop_assert_eq!(c.dimension(), n - g.degree().unwrap());
        prop_assert!(ring.is_shift_closed(&c).unwrap());

        let lcm = g.mul(&g2).unwrap().divmod(&g.gcd(&g2).unwrap()).unwrap().0;
        let inner = ring.ideal_code(&lcm).unwrap();
        prop_assert!(c.contains(&inner).unwrap(), "<lcm> inside <g>");

        let h = Poly::new(f, h).unwrap();
        let multiple = g.mul(&h).unwrap();
        if !multiple.is_zero() && multiple.degree().unwrap() < n {
            let s = span_code(&multiple, n).unwrap();
            prop_assert!(c.contains(&s).unwrap(), "span of g*h inside <g>");
        }
        Ok(())
    })
}

/// Nested pair C₂^⊥ ⊆ C₁ built from random combinations of C₁'s rows.
fn nested_pair() -> impl Strategy<Value = (u32, usize, Vec<Vec<u8>>, Vec<Vec<u8>>)> {
    small_code().prop_flat_map(|(q, n, rows)| {
        let r = rows.len();
        let combo = prop::collection::vec(0..q as u8, r);
        (Just(q), Just(n), Just(rows), prop::collection::vec(combo, 0..=r))
    })
}

/// Distance of the CSS code by direct enumeration of C₁ \ C₂^⊥ and C₂ \ C₁^⊥.
fn css_distance_oracle(c1: &LinearCode, c2perp: &LinearCode) -> Option<usize> {
    let c2 = c2perp.dual();
    let c1_dual = c1.dual();
    let x = codewords(c1).into_iter().filter(|w| !c2perp.contains_word(w)).map(|w| hamming(&w)).min();
    let z = codewords(&c2).into_iter().filter(|w| !c1_dual.contains_word(w)).map(|w| hamming(&w)).min();
    match (x, z) {
        (Some(x), Some(z)) => Some(x.min(z)),
        (a, b) => a.or(b),
    }
}

pub fn css_matches_brute_force() -> Result<(), String> {
    check(nested_pair(), |(q, n, rows, combos)| {
        let f = field(q);
        let c1 = LinearCode::from_rows(f, n, rows.clone()).unwrap();
        let inner: Vec<Vec<u8>> = combos
            .iter()
            .map(|m| {
                let full: Vec<u8> = m.iter().copied().chain(std::iter::repeat(0)).take(rows.len()).collect();
                let mut w = vec![0u8; n];
                for (coef, row) in full.iter().zip(&rows) {
                    for (x, &y) in w.iter_mut().zip(row) {
                        let s = f.element(*x as u32).unwrap()
                            + f.element(*coef as u32).unwrap() * f.element(y as u32).unwrap();
                        *x = s.value();
                    }
                }
                w
            })
            .collect();
        let c2perp = LinearCode::from_rows(f, n, inner).unwrap();
        prop_assert!(c1.contains(&c2perp).unwrap());
        let c2 = c2perp.dual();
        match css_construct(&c1, &c2perp, BUDGET) {
            Ok(p) => {
                prop_assert_eq!(p.k() as isize, c1.dimension() as isize + c2.dimension() as isize - n as isize);
                prop_assert!(p.d_exact());
                prop_assert_eq!(Some(p.d()), css_distance_oracle(&c1, &c2perp));
                prop_assert!(singleton_defect(p.n(), p.k(), p.d()).is_ok());
            }
            Err(_) => prop_assert_eq!(c1.dimension(), c2perp.dimension(), "only k = 0 may fail"),
        }
        Ok(())
    })
}

fn params() -> impl Strategy<Value = QuantumParams> {
    (prop::sample::select(SUPPORTED_ORDERS.to_vec()), 1..=120usize)
        .prop_flat_map(|(q, n)| (Just(q), Just(n), 0..=n))
        .prop_flat_map(|(q, n, k)| (Just(q), Just(n), Just(k), 1..=(n - k) / 2 + 1, any::<bool>()))
        .prop_map(|(q, n, k, d, exact)| QuantumParams::new(q, n, k, d, exact).unwrap())
}

fn nkd(p: &QuantumParams) -> (usize, usize, usize) {
    (p.n(), p.k(), p.d())
}

/// Every propagation output is Singleton-valid, puncture then extend
/// returns to n with d − 1, and direct sums commute and associate.
pub fn propagation_is_singleton_valid() -> Result<(), String> {
    let strategy = (params(), params(), params(), 1..=5usize).prop_map(|(a, b, c, m)| {
        let field_of_a = |p: QuantumParams| QuantumParams::new(a.q(), p.n(), p.k(), p.d(), p.d_exact()).unwrap();
        (a.clone(), field_of_a(b), field_of_a(c), m)
    });
    check(strategy, |(a, b, c, m)| {
        let mut produced = vec![a.clone(), b.clone(), c.clone()];
        produced.extend(propagate_extend(&a, m));
        produced.extend(propagate_puncture(&a));
        produced.extend(propagate_subcode(&a));
        produced.extend(direct_sum_quantum(&a, &b));
        produced.extend(combine_codes(&a, &b));
        for p in &produced {
            prop_assert!(singleton_defect(p.n(), p.k(), p.d()).is_ok(), "{} violates Singleton", p);
            prop_assert!(p.k() + 2 * (p.d() - 1) <= p.n());
        }
        if let Ok(p) = propagate_puncture(&a) {
            let back = propagate_extend(&p, 1).unwrap();
            prop_assert_eq!(nkd(&back), (a.n(), a.k(), a.d() - 1));
        }
        let ab = direct_sum_quantum(&a, &b).unwrap();
        prop_assert_eq!(nkd(&ab), nkd(&direct_sum_quantum(&b, &a).unwrap()));
        let left = direct_sum_quantum(&ab, &c).unwrap();
        let right = direct_sum_quantum(&a, &direct_sum_quantum(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(nkd(&left), nkd(&right));
        Ok(())
    })
}

fn record() -> impl Strategy<Value = CatalogRecord> {
    (
        prop::sample::select(SUPPORTED_ORDERS.to_vec()),
        1..=200usize,
        any::<u64>(),
        "([a-z0-9]([a-z0-9 ,;\"()\\[\\]]{0,16}[a-z0-9])?)?",
        prop::option::of("[A-Z0-9]{1,8}"),
    )
        .prop_map(|(q, n, r, reference, witness)| {
            let k = (r % (n as u64 + 1)) as usize;
            let d = 1 + ((r >> 20) % (((n - k) / 2 + 1) as u64)) as usize;
            let mut rec = CatalogRecord::new(q, n, k, d, reference).unwrap();
            rec.witness = witness.map(|w| serde_json::json!({"g1": w}));
            rec
        })
}

/// Exporting and ingesting again reproduces the catalog exactly, as JSON
/// (all fields) and as CSV (which has no witness column).
pub fn catalog_roundtrip() -> Result<(), String> {
    check(prop::collection::vec(record(), 0..40), |recs| {
        let mut cat = Catalog::new();
        for r in recs {
            cat.update_if_better(r).unwrap();
        }
        let json = cat.export_string(Format::Json);
        let mut back = Catalog::new();
        let rep = back.ingest_str(&json, Format::Json).unwrap();
        prop_assert!(rep.rejected.is_empty());
        prop_assert_eq!(back.records().collect::<Vec<_>>(), cat.records().collect::<Vec<_>>());
        prop_assert_eq!(back.export_string(Format::Json), json);

        let csv = cat.export_string(Format::Csv);
        let mut from_csv = Catalog::new();
        from_csv.ingest_str(&csv, Format::Csv).unwrap();
        let stripped: BTreeMap<_, _> = cat
            .records()
            .map(|r| {
                let mut r = r.clone();
                r.witness = None;
                (r.key(), r)
            })
            .collect();
        let got: BTreeMap<_, _> = from_csv.records().map(|r| (r.key(), r.clone())).collect();
        prop_assert_eq!(got, stripped);
        prop_assert_eq!(from_csv.export_string(Format::Csv), csv);
        Ok(())
    })
}

/// Name and runner of every suite, in reporting order.
pub type Suite = fn() -> Result<(), String>;

pub const SUITES: &[(&str, Suite)] = &[
    ("MacWilliams transform equals direct enumeration", macwilliams_matches_enumeration),
    ("dual is an involution", dual_is_an_involution),
    ("trinomial gcd structure", trinomial_gcd_structure),
    ("ideal-code shift closure and dimension", ideal_codes),
    ("CSS k and d against brute force", css_matches_brute_force),
    ("propagated parameters are Singleton-valid", propagation_is_singleton_valid),
    ("catalog ingest of export is the identity", catalog_roundtrip),
];
