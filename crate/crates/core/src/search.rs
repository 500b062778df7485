//! Searches for CSS codes over divisor lattices of trinomials and
//! multinomials, target searches with random second factors, and the
//! closure of a catalog under the propagation rules.
//!
//! Candidates are generated in a fixed order, evaluated in parallel and
//! merged sequentially against a working copy of the catalog, so the hit
//! stream depends only on the configuration (including the seed).

use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, CatalogRecord, Verdict, MAX_LENGTH};
use crate::css::{
    combine_codes, css_construct, direct_sum_quantum, propagate_extend, propagate_puncture, propagate_subcode,
    verify_witness, Claim, Construction, Convention, CssError, QuantumParams, RowVerdict, Rule,
};
use crate::galois::{FieldError, FieldSpec};
use crate::lincode::{weight, DEFAULT_BUDGET};
use crate::polycyclic::span_code;
use crate::polyring::{factor, Factorization, Poly, PolyError};

/// Candidates evaluated per parallel batch.
const BATCH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub q: u32,
    pub n_range: RangeInclusive<usize>,
    /// Middle exponent of `x^n − a·x^i − b`; `None` means `1..n`.
    pub i_range: Option<RangeInclusive<usize>>,
    /// Allowed `a`; empty means every nonzero element.
    pub a_values: Vec<u32>,
    pub b_values: Vec<u32>,
    /// Allowed degrees of the `C₁` generator.
    pub degree_window: RangeInclusive<usize>,
    /// Allowed quantum dimensions; `None` means any `k ≥ 1`.
    pub k_range: Option<RangeInclusive<usize>>,
    /// Candidates whose distance cannot reach this are skipped.
    pub min_d: usize,
    /// Random draws per divisor (target search) or per length (multinomials).
    pub trials: usize,
    pub budget: u64,
    pub seed: u64,
    /// Drops candidates that take longer. Runs are only reproducible without it.
    pub time_limit: Option<Duration>,
}

impl SearchConfig {
    pub fn new(q: u32, n_range: RangeInclusive<usize>) -> SearchConfig {
        SearchConfig {
            q,
            n_range,
            i_range: None,
            a_values: Vec::new(),
            b_values: Vec::new(),
            degree_window: 0..=usize::MAX,
            k_range: None,
            min_d: 2,
            trials: 16,
            budget: DEFAULT_BUDGET,
            seed: 0,
            time_limit: None,
        }
    }

    pub fn validate(&self) -> Result<FieldSpec, SearchError> {
        let field = FieldSpec::with_order(self.q)?;
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.into()));
        if self.n_range.is_empty() || *self.n_range.start() < 2 {
            return bad("length range must be nonempty and start at 2 or more");
        }
        if *self.n_range.end() > MAX_LENGTH {
            return bad("lengths above 200 are out of scope");
        }
        if self.i_range.as_ref().is_some_and(|r| r.is_empty()) {
            return bad("empty i range");
        }
        if self.degree_window.is_empty() {
            return bad("empty degree window");
        }
        if self.k_range.as_ref().is_some_and(|r| r.is_empty()) {
            return bad("empty k range");
        }
        for &v in self.a_values.iter().chain(&self.b_values) {
            if v == 0 || v >= self.q {
                return bad("coefficients must be nonzero field elements");
            }
        }
        Ok(field)
    }

    fn coefficient_set(&self, given: &[u32]) -> Vec<u32> {
        if given.is_empty() {
            (1..self.q).collect()
        } else {
            given.to_vec()
        }
    }
}

/// Table-notation witness of a polycyclic construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub modulus: String,
    pub g1: String,
    pub second: String,
    pub convention: Convention,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchHit {
    pub params: QuantumParams,
    /// Present for polynomial constructions; derived hits carry their rule
    /// chain in `params`.
    pub witness: Option<Witness>,
    pub verdict: Verdict,
}

impl SearchHit {
    /// One newline-free JSON record.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("hit serializes")
    }

    /// Columns: parameters, modulus, g1, second, verdict.
    pub fn table_row(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Inserted => "new".to_string(),
            Verdict::Improved { previous_d } => format!("improves d={previous_d}"),
            Verdict::Dominated => "dominated".to_string(),
        };
        match (&self.witness, self.params.construction()) {
            (Some(w), _) => format!("{} | {} | [{}] | [{}] | {}", self.params, w.modulus, w.g1, w.second, verdict),
            (None, Construction::Derived { rule, parents, .. }) => {
                format!("{} | {} ({}) | {}", self.params, parents.join(", "), rule.tag(), verdict)
            }
            (None, _) => format!("{} | {}", self.params, verdict),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub moduli: usize,
    pub candidates: usize,
    pub pruned: usize,
    pub evaluated: usize,
    pub failed: usize,
    pub timed_out: usize,
    pub hits: usize,
}

struct Candidate {
    modulus: usize,
    g: Poly,
    second: Poly,
}

enum Outcome {
    Pruned,
    Failed,
    TimedOut,
    Done(Option<QuantumParams>),
}

/// Fixed-order candidate generator fed into parallel evaluation.
struct Sweep<'a> {
    cfg: &'a SearchConfig,
    snapshot: &'a Catalog,
    working: Catalog,
    moduli: Vec<(Poly, String)>,
    pending: Vec<Candidate>,
    stats: SearchStats,
}

impl<'a> Sweep<'a> {
    fn new(cfg: &'a SearchConfig, cat: &'a Catalog) -> Sweep<'a> {
        Sweep {
            cfg,
            snapshot: cat,
            working: cat.clone(),
            moduli: Vec::new(),
            pending: Vec::new(),
            stats: SearchStats::default(),
        }
    }

    fn add_modulus(&mut self, t: &Poly) -> usize {
        self.stats.moduli += 1;
        self.moduli.push((t.clone(), t.format_table()));
        self.moduli.len() - 1
    }

    fn push(&mut self, modulus: usize, g: Poly, second: Poly, sink: &mut dyn FnMut(SearchHit)) {
        self.stats.candidates += 1;
        self.pending.push(Candidate { modulus, g, second });
        if self.pending.len() >= BATCH {
            self.flush(sink);
        }
    }

    /// Every divisor `g` in the window paired with every `g·f`, `f | t/g`, `deg f ≥ 1`.
    fn divisor_pairs(&mut self, t: &Poly, fact: &Factorization, sink: &mut dyn FnMut(SearchHit)) {
        let n = t.degree().expect("nonzero modulus");
        let idx = self.add_modulus(t);
        let lo = *self.cfg.degree_window.start();
        let hi = (*self.cfg.degree_window.end()).min(n - 1);
        if lo > hi {
            return;
        }
        let mut gs = fact.divisors(lo, hi);
        while let Some(exps) = gs.next_exponents() {
            let g = gs.divisor_for(&exps);
            let rest = fact.cofactor(&exps);
            for f in rest.divisors(1, usize::MAX) {
                let second = g.mul(&f).expect("same field");
                self.push(idx, g.clone(), second, sink);
            }
        }
    }

    fn evaluate(&self, c: &Candidate) -> Outcome {
        let start = Instant::now();
        let n = self.moduli[c.modulus].0.degree().expect("nonzero");
        let dg = c.g.degree().expect("nonzero");
        let Some(ds) = c.second.degree() else { return Outcome::Failed };
        if ds <= dg {
            return Outcome::Pruned;
        }
        let k = ds - dg;
        if self.cfg.k_range.as_ref().is_some_and(|r| !r.contains(&k)) || k >= n {
            return Outcome::Pruned;
        }
        // g lies in C₁ \ C₂^⊥, so its weight caps the distance, as does Singleton
        let upper = weight(c.g.coeffs()).min((n - k) / 2 + 1);
        if upper < self.cfg.min_d {
            return Outcome::Pruned;
        }
        if let Some(rec) = self.snapshot.query_exact(self.cfg.q, n, k).ok().flatten() {
            if rec.d >= upper {
                return Outcome::Pruned;
            }
        }
        let built = span_code(&c.g, n).and_then(|c1| span_code(&c.second, n).map(|c2| (c1, c2)));
        let (c1, c2perp) = match built {
            Ok(pair) => pair,
            Err(e) => {
                log::debug!("candidate construction failed: {e}");
                return Outcome::Failed;
            }
        };
        let result = css_construct(&c1, &c2perp, self.cfg.budget);
        if self.cfg.time_limit.is_some_and(|limit| start.elapsed() > limit) {
            return Outcome::TimedOut;
        }
        match result {
            Ok(p) if p.d() >= self.cfg.min_d => Outcome::Done(Some(p)),
            Ok(_) => Outcome::Done(None),
            Err(e) => {
                log::debug!("candidate failed: {e}");
                Outcome::Failed
            }
        }
    }

    fn flush(&mut self, sink: &mut dyn FnMut(SearchHit)) {
        let batch = std::mem::take(&mut self.pending);
        let outcomes: Vec<Outcome> = batch.par_iter().map(|c| self.evaluate(c)).collect();
        for (c, outcome) in batch.into_iter().zip(outcomes) {
            match outcome {
                Outcome::Pruned => self.stats.pruned += 1,
                Outcome::Failed => self.stats.failed += 1,
                Outcome::TimedOut => {
                    self.stats.timed_out += 1;
                    log::warn!("candidate over {} exceeded the time limit", self.moduli[c.modulus].1);
                }
                Outcome::Done(None) => self.stats.evaluated += 1,
                Outcome::Done(Some(p)) => {
                    self.stats.evaluated += 1;
                    self.merge(&c, p, sink);
                }
            }
        }
    }

    fn merge(&mut self, c: &Candidate, p: QuantumParams, sink: &mut dyn FnMut(SearchHit)) {
        let verdict = self.working.would_accept(p.q(), p.n(), p.k(), p.d());
        if verdict == Verdict::Dominated {
            return;
        }
        let witness = Witness {
            modulus: self.moduli[c.modulus].1.clone(),
            g1: c.g.format_table(),
            second: c.second.format_table(),
            convention: Convention::SecondGeneratesC2Perp,
        };
        let claim = Claim { n: p.n(), k: p.k(), d: p.d() };
        let check = verify_witness(
            self.cfg.q,
            &witness.modulus,
            &witness.g1,
            &witness.second,
            witness.convention,
            Some(claim),
            self.cfg.budget,
        );
        let confirmed = match &check {
            Ok(r) => {
                let expected = if p.d_exact() { RowVerdict::Match } else { RowVerdict::BoundOnly };
                r.verdict == expected
            }
            Err(_) => false,
        };
        if !confirmed {
            log::error!("hit {} failed re-verification from {:?}", p, witness);
            self.stats.failed += 1;
            return;
        }
        let p = p.with_construction(Construction::Polycyclic {
            modulus: witness.modulus.clone(),
            g1: witness.g1.clone(),
            second: witness.second.clone(),
            convention: witness.convention,
        });
        let rec = CatalogRecord::from_params(&p, "search").expect("validated params");
        self.working.update_if_better(rec).expect("validated record");
        self.stats.hits += 1;
        sink(SearchHit { params: p, witness: Some(witness), verdict });
    }

    fn finish(mut self, sink: &mut dyn FnMut(SearchHit)) -> SearchStats {
        self.flush(sink);
        self.stats
    }
}

/// `x^n − a·x^i − b` in `(n, i, a, b)` order.
pub fn trinomials(cfg: &SearchConfig) -> Result<Vec<Poly>, SearchError> {
    let field = cfg.validate()?;
    let a_set = cfg.coefficient_set(&cfg.a_values);
    let b_set = cfg.coefficient_set(&cfg.b_values);
    let mut out = Vec::new();
    for n in cfg.n_range.clone() {
        let is = cfg.i_range.clone().unwrap_or(1..=n - 1);
        for i in is.filter(|&i| i >= 1 && i < n) {
            for &a in &a_set {
                for &b in &b_set {
                    out.push(Poly::trinomial(n, i, field.element(a)?, field.element(b)?)?);
                }
            }
        }
    }
    Ok(out)
}

fn factor_all(moduli: &[Poly], seed: u64) -> Vec<Result<Factorization, PolyError>> {
    moduli.par_iter().map(|t| factor(t, seed)).collect()
}

/// Divisor-pair search over the given moduli: `C₁ = ⟨g⟩`, `C₂^⊥ = ⟨g·f⟩`.
pub fn search_moduli(
    cfg: &SearchConfig,
    moduli: &[Poly],
    cat: &Catalog,
    sink: &mut dyn FnMut(SearchHit),
) -> Result<SearchStats, SearchError> {
    let field = cfg.validate()?;
    let mut sweep = Sweep::new(cfg, cat);
    for chunk in moduli.chunks(32) {
        let facts = factor_all(chunk, cfg.seed);
        for (t, fact) in chunk.iter().zip(facts) {
            if t.field() != field {
                return Err(FieldError::FieldMismatch { left: field.order(), right: t.field().order() }.into());
            }
            match fact {
                Ok(fact) => sweep.divisor_pairs(&t.monic(), &fact, sink),
                Err(e) => log::warn!("cannot factor {t}: {e}"),
            }
        }
    }
    Ok(sweep.finish(sink))
}

/// Divisor-pair search over every trinomial in the configuration.
pub fn search_trinomial_pairs(
    cfg: &SearchConfig,
    cat: &Catalog,
    sink: &mut dyn FnMut(SearchHit),
) -> Result<SearchStats, SearchError> {
    let ts = trinomials(cfg)?;
    search_moduli(cfg, &ts, cat, sink)
}

/// SplitMix64 finaliser, used to give every candidate its own stream.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    let s = parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ p));
    ChaCha8Rng::seed_from_u64(s)
}

/// Fixed length `n` and quantum dimension `k`: for every trinomial divisor
/// `g` with `n − deg g > k`, draws monic `f` of degree `k` with nonzero
/// constant term and uses `C₂^⊥ = span(g·f)`.
pub fn search_target(
    cfg: &SearchConfig,
    n: usize,
    k: usize,
    cat: &Catalog,
    sink: &mut dyn FnMut(SearchHit),
) -> Result<SearchStats, SearchError> {
    if k == 0 || k >= n {
        return Err(SearchError::InvalidConfig(format!("need 0 < k < n, got n = {n}, k = {k}")));
    }
    let mut cfg = cfg.clone();
    cfg.n_range = n..=n;
    cfg.k_range = Some(k..=k);
    let field = cfg.validate()?;
    let q = field.order();
    let ts = trinomials(&cfg)?;
    let mut sweep = Sweep::new(&cfg, cat);
    if cfg.trials == 0 {
        return Ok(sweep.finish(sink));
    }
    for (ti, chunk) in ts.chunks(32).enumerate() {
        let facts = factor_all(chunk, cfg.seed);
        for (j, (t, fact)) in chunk.iter().zip(facts).enumerate() {
            let fact = match fact {
                Ok(f) => f,
                Err(e) => {
                    log::warn!("cannot factor {t}: {e}");
                    continue;
                }
            };
            let idx = sweep.add_modulus(t);
            let lo = *cfg.degree_window.start();
            let hi = (*cfg.degree_window.end()).min(n - k - 1);
            if lo > hi {
                log::info!("{t}: no divisor degree leaves room for k = {k}");
                continue;
            }
            for (gi, g) in fact.divisors(lo, hi).enumerate() {
                for trial in 0..cfg.trials {
                    let mut rng = stream(cfg.seed, &[(ti * 32 + j) as u64, gi as u64, trial as u64]);
                    let mut coeffs: Vec<u8> = (0..k).map(|_| rng.random_range(0..q) as u8).collect();
                    coeffs[0] = rng.random_range(1..q) as u8;
                    coeffs.push(1);
                    let f = Poly::new(field, coeffs)?;
                    let second = g.mul(&f)?;
                    sweep.push(idx, g.clone(), second, sink);
                }
            }
        }
    }
    Ok(sweep.finish(sink))
}

/// Random moduli `x^n − v(x)`, `cfg.trials` per length, then the divisor-pair
/// search on each.
pub fn search_multinomial(
    cfg: &SearchConfig,
    cat: &Catalog,
    sink: &mut dyn FnMut(SearchHit),
) -> Result<SearchStats, SearchError> {
    let field = cfg.validate()?;
    let q = field.order();
    let mut moduli = Vec::new();
    for n in cfg.n_range.clone() {
        for trial in 0..cfg.trials {
            let mut rng = stream(cfg.seed, &[n as u64, trial as u64, 0x6d75_6c74]);
            let mut v: Vec<u8> = (0..n).map(|_| rng.random_range(0..q) as u8).collect();
            if v.iter().all(|&c| c == 0) {
                v[0] = 1;
            }
            moduli.push(Poly::multinomial(n, &Poly::new(field, v)?)?);
        }
    }
    search_moduli(cfg, &moduli, cat, sink)
}

/// Applies the enabled rules to the catalog until nothing improves or
/// `max_rounds` rounds have run. Outputs longer than 200 are discarded.
pub fn derive_closure(
    cat: &Catalog,
    rules: &[Rule],
    max_rounds: usize,
    sink: &mut dyn FnMut(SearchHit),
) -> Result<SearchStats, SearchError> {
    let mut working = cat.clone();
    let mut stats = SearchStats::default();
    if rules.is_empty() {
        return Ok(stats);
    }
    for round in 0..max_rounds {
        let snapshot: Vec<QuantumParams> =
            working.records().filter_map(|r| QuantumParams::new(r.q, r.n, r.k, r.d, false).ok()).collect();
        let mut outputs: Vec<Result<QuantumParams, CssError>> = Vec::new();
        for &rule in rules {
            match rule {
                Rule::Extend => outputs.extend(snapshot.iter().map(|p| propagate_extend(p, 1))),
                Rule::Puncture => outputs.extend(snapshot.iter().filter(|p| p.d() >= 2).map(propagate_puncture)),
                Rule::Subcode => outputs.extend(snapshot.iter().filter(|p| p.k() >= 1).map(propagate_subcode)),
                Rule::DirectSum => {
                    for (i, a) in snapshot.iter().enumerate() {
                        for b in snapshot[i..].iter().filter(|b| b.q() == a.q() && a.n() + b.n() <= MAX_LENGTH) {
                            outputs.push(direct_sum_quantum(a, b));
                        }
                    }
                }
                Rule::Combine => {
                    for a in &snapshot {
                        for b in snapshot.iter().filter(|b| b.q() == a.q() && b.k() <= a.n()) {
                            if a.n() + b.n() - b.k() <= MAX_LENGTH {
                                outputs.push(combine_codes(a, b));
                            }
                        }
                    }
                }
            }
        }
        let mut improved = 0;
        for out in outputs {
            stats.candidates += 1;
            let p = match out {
                Ok(p) if p.n() <= MAX_LENGTH => p,
                Ok(_) => {
                    stats.pruned += 1;
                    continue;
                }
                Err(e) => {
                    log::debug!("rule failed: {e}");
                    stats.failed += 1;
                    continue;
                }
            };
            stats.evaluated += 1;
            let rec = match CatalogRecord::from_params(&p, format!("derived ({})", rule_tag(&p))) {
                Ok(r) => r,
                Err(e) => {
                    log::debug!("derived record rejected: {e}");
                    stats.failed += 1;
                    continue;
                }
            };
            let verdict = working.update_if_better(rec).expect("validated record");
            if verdict != Verdict::Dominated {
                improved += 1;
                stats.hits += 1;
                sink(SearchHit { params: p, witness: None, verdict });
            }
        }
        log::info!("round {}: {improved} improvements", round + 1);
        if improved == 0 {
            break;
        }
    }
    Ok(stats)
}

fn rule_tag(p: &QuantumParams) -> &'static str {
    match p.construction() {
        Construction::Derived { rule, .. } => rule.tag(),
        _ => "?",
    }
}
