//! Linear codes over GF(q) and exact distance computation.
//!
//! A [`LinearCode`] keeps its generator matrix in reduced row-echelon form,
//! so two codes are equal exactly when their matrices are. Weight
//! enumerators are computed by exhaustive traversal of the smaller of the
//! code and its dual; the dual side is mapped back with the MacWilliams
//! transform. Both paths are exact.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::galois::{FieldError, FieldSpec};

/// Default cap on codeword visits for one enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("row {row} has length {found}, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("enumeration needs {required} codeword visits, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("invalid weight enumerator: {0}")]
    InvalidEnumerator(String),
    #[error("minimum distance of the zero code is undefined")]
    UndefinedDistance,
    #[error("inner code is not contained in the outer code")]
    NotContained,
    #[error("outer code must be strictly larger than the inner code")]
    NotProper,
}

/// Weight distribution `A_0, ..., A_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightEnumerator {
    counts: Vec<BigUint>,
}

impl WeightEnumerator {
    /// Requires `A_0 = 1`.
    pub fn new(counts: Vec<BigUint>) -> Result<WeightEnumerator, CodeError> {
        if counts.first() != Some(&BigUint::one()) {
            return Err(CodeError::InvalidEnumerator("A_0 must be 1".into()));
        }
        Ok(WeightEnumerator { counts })
    }

    pub fn from_u64(counts: &[u64]) -> Result<WeightEnumerator, CodeError> {
        WeightEnumerator::new(counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Code length.
    pub fn len(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn count(&self, w: usize) -> &BigUint {
        &self.counts[w]
    }

    /// `Σ A_w`, which equals `q^k`.
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Smallest nonzero weight present, `None` for the zero code.
    pub fn min_weight(&self) -> Option<usize> {
        (1..self.counts.len()).find(|&w| !self.counts[w].is_zero())
    }

    /// Counts that fit in `u64`, for display and tests.
    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.counts.iter().map(|c| c.to_u64()).collect()
    }
}

/// A distance value and whether it is proven exact (otherwise a lower bound).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Distance {
    pub d: usize,
    pub exact: bool,
}

/// Lower and sampled upper bounds on a minimum distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceBounds {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
}

/// An `[n, k]` linear code over GF(q).
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: FieldSpec,
    n: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    enumerator: OnceLock<WeightEnumerator>,
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.rows == other.rows
    }
}

impl Eq for LinearCode {}

impl LinearCode {
    /// The row space of `rows`. Dependent and zero rows are dropped.
    pub fn from_rows(field: FieldSpec, n: usize, rows: Vec<Vec<u8>>) -> Result<LinearCode, CodeError> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(CodeError::RaggedRows { row: i, expected: n, found: r.len() });
            }
            if let Some(&bad) = r.iter().find(|&&c| c as u32 >= field.order()) {
                return Err(FieldError::OutOfRange { value: bad as u32, order: field.order() }.into());
            }
        }
        Ok(LinearCode::from_rows_unchecked(field, n, rows))
    }

    pub(crate) fn from_rows_unchecked(field: FieldSpec, n: usize, rows: Vec<Vec<u8>>) -> LinearCode {
        let (rows, pivots) = rref(field, rows, n);
        LinearCode { field, n, rows, pivots, enumerator: OnceLock::new() }
    }

    pub fn zero(field: FieldSpec, n: usize) -> LinearCode {
        LinearCode { field, n, rows: Vec::new(), pivots: Vec::new(), enumerator: OnceLock::new() }
    }

    pub fn full(field: FieldSpec, n: usize) -> LinearCode {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0u8; n];
                r[i] = 1;
                r
            })
            .collect();
        LinearCode { field, n, rows, pivots: (0..n).collect(), enumerator: OnceLock::new() }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Block length `n`.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Dimension `k`.
    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// Generator rows in reduced row-echelon form.
    pub fn generator_rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn compatible(&self, other: &LinearCode) -> Result<(), CodeError> {
        if self.field != other.field {
            return Err(CodeError::FieldMismatch { left: self.field.order(), right: other.field.order() });
        }
        if self.n != other.n {
            return Err(CodeError::LengthMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// `Σ mᵢ·rowᵢ`.
    pub fn encode(&self, message: &[u8]) -> Vec<u8> {
        let f = self.field;
        let mut out = vec![0u8; self.n];
        for (row, &m) in self.rows.iter().zip(message) {
            if m != 0 {
                axpy(f, &mut out, m, row);
            }
        }
        out
    }

    /// Residue of `word` after eliminating the pivot columns; zero iff `word` is a codeword.
    fn reduce(&self, word: &mut [u8]) {
        let f = self.field;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = word[p];
            if c != 0 {
                axpy(f, word, f.neg_raw(c), row);
            }
        }
    }

    pub fn contains_word(&self, word: &[u8]) -> bool {
        if word.len() != self.n {
            return false;
        }
        let mut w = word.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&c| c == 0)
    }

    /// Whether `inner ⊆ self`.
    pub fn contains(&self, inner: &LinearCode) -> Result<bool, CodeError> {
        self.compatible(inner)?;
        Ok(inner.dimension() <= self.dimension() && inner.rows.iter().all(|r| self.contains_word(r)))
    }

    /// Euclidean dual.
    pub fn dual(&self) -> LinearCode {
        let f = self.field;
        let mut is_pivot = vec![false; self.n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.n)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut h = vec![0u8; self.n];
                h[free] = 1;
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    h[p] = f.neg_raw(row[free]);
                }
                h
            })
            .collect();
        LinearCode::from_rows_unchecked(f, self.n, rows)
    }

    /// Block-diagonal `[n_a + n_b, k_a + k_b]` code.
    pub fn direct_sum(&self, other: &LinearCode) -> Result<LinearCode, CodeError> {
        if self.field != other.field {
            return Err(CodeError::FieldMismatch { left: self.field.order(), right: other.field.order() });
        }
        let n = self.n + other.n;
        let mut rows = Vec::with_capacity(self.dimension() + other.dimension());
        for r in &self.rows {
            let mut v = r.clone();
            v.resize(n, 0);
            rows.push(v);
        }
        for r in &other.rows {
            let mut v = vec![0u8; self.n];
            v.extend_from_slice(r);
            rows.push(v);
        }
        Ok(LinearCode::from_rows_unchecked(self.field, n, rows))
    }

    /// `q^k`, saturating.
    pub fn size(&self) -> u128 {
        codeword_count(self.field, self.dimension())
    }

    /// Exhaustive weight distribution of this code. Fails when `q^k` exceeds `budget`.
    pub fn weight_enumerator(&self, budget: u64) -> Result<WeightEnumerator, CodeError> {
        let required = self.size();
        if required > budget as u128 {
            return Err(CodeError::BudgetExceeded { required, budget });
        }
        let counts = enumerate_weights(self.field, self.n, &self.rows);
        WeightEnumerator::from_u64(&counts)
    }

    /// Exact weight distribution, enumerating whichever of the code and its
    /// dual is smaller and applying the MacWilliams transform in the second
    /// case. The result is cached on the code.
    pub fn exact_weight_enumerator(&self, budget: u64) -> Result<WeightEnumerator, CodeError> {
        if let Some(we) = self.enumerator.get() {
            return Ok(we.clone());
        }
        let k = self.dimension();
        let direct = self.size();
        let dual_size = codeword_count(self.field, self.n - k);
        let we = if direct <= dual_size {
            self.weight_enumerator(budget)?
        } else {
            if dual_size > budget as u128 {
                return Err(CodeError::BudgetExceeded { required: dual_size, budget });
            }
            let dual = self.dual();
            let dual_we = dual.weight_enumerator(budget)?;
            macwilliams(&dual_we, self.field.order(), self.n, self.n - k)?
        };
        Ok(self.enumerator.get_or_init(|| we).clone())
    }

    /// Minimum distance. Exact when the code or its dual fits the budget, or
    /// when low-weight enumeration on an information set closes the gap;
    /// otherwise a lower bound with `exact = false`.
    pub fn min_distance(&self, budget: u64) -> Result<Distance, CodeError> {
        if self.dimension() == 0 {
            return Err(CodeError::UndefinedDistance);
        }
        match self.exact_weight_enumerator(budget) {
            Ok(we) => Ok(Distance { d: we.min_weight().expect("k >= 1"), exact: true }),
            Err(CodeError::BudgetExceeded { .. }) => Ok(self.information_set_bound(budget)),
            Err(e) => Err(e),
        }
    }

    /// Lower bound together with an upper bound from `samples` random
    /// information sets.
    pub fn distance_bounds(&self, budget: u64, samples: usize, seed: u64) -> Result<DistanceBounds, CodeError> {
        let d = self.min_distance(budget)?;
        if d.exact {
            return Ok(DistanceBounds { lower: d.d, upper: d.d, exact: true });
        }
        let upper = self.sampled_upper_bound(samples, seed).min(self.n - self.dimension() + 1);
        Ok(DistanceBounds { lower: d.d, upper, exact: d.d == upper })
    }

    /// Every codeword whose message (the restriction to the pivot columns)
    /// has weight `w` or more has weight at least `w`. Enumerating all
    /// messages up to weight `w` therefore gives `d ≥ min(found, w + 1)`.
    fn information_set_bound(&self, budget: u64) -> Distance {
        let q = self.field.order() as u128;
        let k = self.dimension();
        let mut total: u128 = 0;
        let mut depth = 0;
        for s in 1..=k {
            // first nonzero coefficient normalised to 1
            let c = binomial(k as u128, s as u128).saturating_mul((q - 1).saturating_pow(s as u32 - 1));
            total = total.saturating_add(c);
            if total > budget as u128 {
                break;
            }
            depth = s;
        }
        let best = (0..k)
            .into_par_iter()
            .map(|i| {
                // leading coefficient normalised to 1
                let mut word = self.rows[i].clone();
                let mut best = weight(&word);
                low_weight_search(self, i + 1, depth.saturating_sub(1), &mut word, &mut best);
                best
            })
            .min()
            .unwrap_or(self.n + 1);
        if depth == k {
            return Distance { d: best, exact: true };
        }
        let lower = best.min(depth + 1);
        Distance { d: lower, exact: best <= depth + 1 }
    }

    fn sampled_upper_bound(&self, samples: usize, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut best = self.rows.iter().map(|r| weight(r)).min().unwrap_or(self.n);
        for _ in 0..samples {
            perm.shuffle(&mut rng);
            let permuted: Vec<Vec<u8>> = self.rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
            let (rows, _) = rref(self.field, permuted, self.n);
            if let Some(w) = rows.iter().map(|r| weight(r)).min() {
                best = best.min(w);
            }
        }
        best
    }
}

fn low_weight_search(code: &LinearCode, start: usize, remaining: usize, word: &mut [u8], best: &mut usize) {
    if remaining == 0 {
        return;
    }
    let f = code.field;
    for i in start..code.dimension() {
        let row = &code.rows[i];
        for c in 1..f.order() as u8 {
            axpy(f, word, c, row);
            *best = (*best).min(weight(word));
            low_weight_search(code, i + 1, remaining - 1, word, best);
            axpy(f, word, f.neg_raw(c), row);
        }
    }
}

/// Smallest weight in `outer \ inner`. Both enumerators must be exact for an
/// exact answer; otherwise the minimum distance of `outer` is returned as a
/// lower bound.
pub fn relative_min_weight(outer: &LinearCode, inner: &LinearCode, budget: u64) -> Result<Distance, CodeError> {
    if !outer.contains(inner)? {
        return Err(CodeError::NotContained);
    }
    if outer.dimension() == inner.dimension() {
        return Err(CodeError::NotProper);
    }
    let exact =
        outer.exact_weight_enumerator(budget).and_then(|a| inner.exact_weight_enumerator(budget).map(|b| (a, b)));
    match exact {
        Ok((a, b)) => {
            let w = (1..=outer.len())
                .find(|&w| a.count(w) > b.count(w))
                .expect("a proper supercode has a word outside the subcode");
            Ok(Distance { d: w, exact: true })
        }
        Err(CodeError::BudgetExceeded { .. }) => {
            let d = outer.min_distance(budget)?;
            Ok(Distance { d: d.d, exact: false })
        }
        Err(e) => Err(e),
    }
}

/// Weight enumerator of the dual of an `[n, k]` code over GF(q):
/// `W⊥(x, y) = q^{-k} · W(x + (q−1)y, x − y)`.
pub fn macwilliams(we: &WeightEnumerator, q: u32, n: usize, k: usize) -> Result<WeightEnumerator, CodeError> {
    if we.len() != n {
        return Err(CodeError::InvalidEnumerator(format!("expected length {n}, got {}", we.len())));
    }
    let size = BigUint::from(q).pow(k as u32);
    if we.total() != size {
        return Err(CodeError::InvalidEnumerator(format!("counts sum to {}, expected {q}^{k}", we.total())));
    }
    let qm1 = BigInt::from(q - 1);
    // column w holds the coefficients of (1 + (q−1)z)^{n−w} (1 − z)^w
    let mut col: Vec<BigInt> = (0..=n).map(|j| BigInt::from(binomial_big(n, j)) * qm1.pow(j as u32)).collect();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    for w in 0..=n {
        let a = we.count(w);
        if !a.is_zero() {
            let a = BigInt::from_biguint(Sign::Plus, a.clone());
            for (o, c) in acc.iter_mut().zip(&col) {
                *o += &a * c;
            }
        }
        if w < n {
            // multiply by (1 − z), then divide exactly by (1 + (q−1)z)
            let mut next = vec![BigInt::zero(); n + 1];
            let mut prev = BigInt::zero();
            for j in 0..=n {
                let t = &col[j] - if j > 0 { &col[j - 1] } else { &BigInt::ZERO };
                let r = t - &qm1 * &prev;
                next[j] = r.clone();
                prev = r;
            }
            col = next;
        }
    }
    let size = BigInt::from_biguint(Sign::Plus, size);
    let mut out = Vec::with_capacity(n + 1);
    for (j, v) in acc.into_iter().enumerate() {
        if v.is_negative() {
            return Err(CodeError::InvalidEnumerator(format!("negative count at weight {j}")));
        }
        if !(&v % &size).is_zero() {
            return Err(CodeError::InvalidEnumerator(format!("non-integer count at weight {j}")));
        }
        out.push((v / &size).to_biguint().expect("nonnegative"));
    }
    WeightEnumerator::new(out)
}

pub(crate) fn weight(v: &[u8]) -> usize {
    v.iter().filter(|&&c| c != 0).count()
}

#[inline]
fn axpy(f: FieldSpec, y: &mut [u8], a: u8, x: &[u8]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        if xi != 0 {
            *yi = f.add_raw(*yi, f.mul_raw(a, xi));
        }
    }
}

fn codeword_count(f: FieldSpec, k: usize) -> u128 {
    (f.order() as u128).checked_pow(k as u32).unwrap_or(u128::MAX)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn binomial_big(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Reduced row-echelon form; returns the nonzero rows and their pivot columns.
pub(crate) fn rref(f: FieldSpec, mut rows: Vec<Vec<u8>>, n: usize) -> (Vec<Vec<u8>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, sel);
        let inv = f.inv_raw(rows[r][col]);
        for c in rows[r].iter_mut() {
            *c = f.mul_raw(*c, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let factor = f.neg_raw(row[col]);
                axpy(f, row, factor, &pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Gray-code traversal work unit: `base + Σ_{j<digits} m_j row_j` over all `m`.
const CHUNK_STEPS: u64 = 1 << 14;

/// Weight histogram of all `q^k` codewords spanned by `rows`.
///
/// Codewords are grouped by their highest nonzero message coordinate `t`,
/// normalised to 1; each class member stands for `q − 1` scalar multiples.
/// Within a class the lower coordinates are traversed in modular Gray-code
/// order so each step adds a single generator row.
pub(crate) fn enumerate_weights(f: FieldSpec, n: usize, rows: &[Vec<u8>]) -> Vec<u64> {
    let q = f.order() as u64;
    let k = rows.len();
    let supports: Vec<Vec<(usize, u8)>> =
        rows.iter().map(|r| r.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect()).collect();
    let mut gray_digits_max = 0;
    while gray_digits_max < k && q.pow(gray_digits_max as u32) < CHUNK_STEPS {
        gray_digits_max += 1;
    }
    // (t, prefix index): the free digits above the Gray digits are fixed by the prefix
    let mut tasks: Vec<(usize, u64)> = Vec::new();
    for t in 0..k {
        let gray = t.min(gray_digits_max);
        let prefixes = q.pow((t - gray) as u32);
        tasks.extend((0..prefixes).map(|p| (t, p)));
    }
    let hist = tasks
        .par_iter()
        .map(|&(t, prefix)| {
            let gray = t.min(gray_digits_max);
            let mut word = rows[t].clone();
            let mut p = prefix;
            for row in rows.iter().take(t).skip(gray) {
                let digit = (p % q) as u8;
                p /= q;
                if digit != 0 {
                    axpy(f, &mut word, digit, row);
                }
            }
            let mut local = vec![0u64; n + 1];
            gray_walk(f, &mut word, &supports[..gray], &mut local);
            local
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let mut counts: Vec<u64> = hist.into_iter().map(|c| c * (q - 1)).collect();
    counts[0] += 1;
    counts
}

fn gray_walk(f: FieldSpec, word: &mut [u8], supports: &[Vec<(usize, u8)>], hist: &mut [u64]) {
    let q = f.order() as u8;
    let prime = f.degree() == 1;
    let mut w = weight(word) as isize;
    hist[w as usize] += 1;
    let r = supports.len();
    let mut digits = vec![0u8; r];
    // Gray coordinate of each row as an element index; one step moves it
    // to the next index, so the row is added with coefficient new − old
    let mut coef = vec![0u8; r];
    // lowest digit that can still be incremented; lower digits wrap to 0
    while let Some(j) = digits.iter().position(|&d| d != q - 1) {
        for d in digits.iter_mut().take(j) {
            *d = 0;
        }
        digits[j] += 1;
        let next = (coef[j] + 1) % q;
        let delta = f.sub_raw(next, coef[j]);
        coef[j] = next;
        for &(pos, c) in &supports[j] {
            let old = word[pos];
            let step = if prime { c } else { f.mul_raw(delta, c) };
            let new = f.add_raw(old, step);
            w += (new != 0) as isize - (old != 0) as isize;
            word[pos] = new;
        }
        hist[w as usize] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> FieldSpec {
        FieldSpec::with_order(q).unwrap()
    }

    fn hamming74() -> LinearCode {
        LinearCode::from_rows(
            gf(2),
            7,
            vec![
                vec![1, 0, 0, 0, 1, 1, 0],
                vec![0, 1, 0, 0, 1, 0, 1],
                vec![0, 0, 1, 0, 0, 1, 1],
                vec![0, 0, 0, 1, 1, 1, 1],
            ],
        )
        .unwrap()
    }

    fn repetition(q: u32, n: usize) -> LinearCode {
        LinearCode::from_rows(gf(q), n, vec![vec![1; n]]).unwrap()
    }

    #[test]
    fn extension_field_enumeration() {
        // the walk must reach every field multiple, not just the prime subfield ones
        for (q, expect) in [(4, vec![1, 6, 9]), (9, vec![1, 16, 64]), (8, vec![1, 14, 49])] {
            let full = LinearCode::full(gf(q), 2);
            assert_eq!(full.weight_enumerator(1000).unwrap().to_u64().unwrap(), expect);
        }
        let c = LinearCode::from_rows(gf(4), 3, vec![vec![1, 1, 0], vec![0, 1, 2]]).unwrap();
        let we = c.weight_enumerator(1000).unwrap().to_u64().unwrap();
        let mut direct = vec![0u64; 4];
        for a in 0..4u8 {
            for b in 0..4u8 {
                direct[weight(&c.encode(&[a, b]))] += 1;
            }
        }
        assert_eq!(we, direct);
    }

    #[test]
    fn construction() {
        let c = LinearCode::from_rows(gf(2), 3, vec![vec![1, 1, 0], vec![0, 0, 0]]).unwrap();
        assert_eq!((c.len(), c.dimension()), (3, 1));
        assert_eq!(LinearCode::full(gf(5), 4).dimension(), 4);
        let c = LinearCode::from_rows(gf(5), 2, vec![vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(c.dimension(), 1);
        assert!(matches!(
            LinearCode::from_rows(gf(5), 2, vec![vec![1, 2], vec![2]]),
            Err(CodeError::RaggedRows { row: 1, .. })
        ));
        assert!(LinearCode::from_rows(gf(5), 1, vec![vec![7]]).is_err());
    }

    #[test]
    fn duals() {
        let full = LinearCode::full(gf(3), 4);
        assert_eq!(full.dual().dimension(), 0);
        let rep = repetition(2, 3);
        let even = rep.dual();
        assert_eq!(even.dimension(), 2);
        assert_eq!(even.weight_enumerator(100).unwrap().to_u64().unwrap(), vec![1, 0, 3, 0]);
        assert_eq!(even.dual(), rep);
        let h = hamming74();
        assert_eq!(h.dual().dual(), h);
        for a in h.generator_rows() {
            for b in h.dual().generator_rows() {
                let dot = a.iter().zip(b).filter(|(x, y)| **x == 1 && **y == 1).count();
                assert_eq!(dot % 2, 0);
            }
        }
    }

    #[test]
    fn containment() {
        let h = hamming74();
        assert!(h.contains(&LinearCode::zero(gf(2), 7)).unwrap());
        assert!(h.contains(&h).unwrap());
        assert!(h.contains(&h.dual()).unwrap());
        assert!(!h.dual().contains(&h).unwrap());
        assert!(h.contains(&repetition(2, 6)).is_err());
    }

    #[test]
    fn enumerators() {
        assert_eq!(repetition(2, 3).weight_enumerator(10).unwrap().to_u64().unwrap(), vec![1, 0, 0, 1]);
        assert_eq!(LinearCode::zero(gf(3), 4).weight_enumerator(1).unwrap().to_u64().unwrap(), vec![1, 0, 0, 0, 0]);
        assert_eq!(hamming74().weight_enumerator(16).unwrap().to_u64().unwrap(), vec![1, 0, 0, 7, 7, 0, 0, 1]);
        assert_eq!(hamming74().weight_enumerator(15), Err(CodeError::BudgetExceeded { required: 16, budget: 15 }));
    }

    #[test]
    fn macwilliams_examples() {
        let rep = WeightEnumerator::from_u64(&[1, 0, 0, 1]).unwrap();
        let dual = macwilliams(&rep, 2, 3, 1).unwrap();
        assert_eq!(dual.to_u64().unwrap(), vec![1, 0, 3, 0]);
        assert_eq!(macwilliams(&dual, 2, 3, 2).unwrap(), rep);
        let full = LinearCode::full(gf(3), 3).weight_enumerator(100).unwrap();
        assert_eq!(macwilliams(&full, 3, 3, 3).unwrap().to_u64().unwrap(), vec![1, 0, 0, 0]);
        let short = WeightEnumerator::from_u64(&[1, 0, 1, 0]).unwrap();
        assert!(macwilliams(&short, 2, 3, 2).is_err());
        assert!(macwilliams(&short, 2, 4, 1).is_err());
        assert!(WeightEnumerator::from_u64(&[0, 1]).is_err());
    }

    #[test]
    fn distances() {
        assert_eq!(repetition(3, 3).min_distance(100).unwrap(), Distance { d: 3, exact: true });
        assert_eq!(hamming74().min_distance(100).unwrap(), Distance { d: 3, exact: true });
        assert_eq!(LinearCode::zero(gf(3), 3).min_distance(10), Err(CodeError::UndefinedDistance));
        // [7,4] via the dual side: 8 codewords fit, 16 do not
        assert_eq!(hamming74().min_distance(8).unwrap(), Distance { d: 3, exact: true });
    }

    #[test]
    fn information_set_bound_is_sound() {
        let h = hamming74();
        // budget too small for either side; weight-1 messages give words of weight 3
        let d = h.min_distance(4).unwrap();
        assert!(d.d <= 3);
        let bounds = h.distance_bounds(4, 8, 1).unwrap();
        assert!(bounds.lower <= 3 && bounds.upper >= 3);
    }

    #[test]
    fn relative_weights() {
        let even = repetition(2, 3).dual();
        let zero = LinearCode::zero(gf(2), 3);
        assert_eq!(relative_min_weight(&even, &zero, 100).unwrap().d, 2);
        // outer = inner + one generator sharing the weight-2 words
        let inner = LinearCode::from_rows(gf(2), 4, vec![vec![1, 1, 0, 0]]).unwrap();
        let outer = LinearCode::from_rows(gf(2), 4, vec![vec![1, 1, 0, 0], vec![1, 0, 1, 1]]).unwrap();
        // outer \ inner = {1011, 0111}: both weight 3, although d(outer) = 2
        assert_eq!(outer.min_distance(100).unwrap().d, 2);
        assert_eq!(relative_min_weight(&outer, &inner, 100).unwrap(), Distance { d: 3, exact: true });
        assert_eq!(relative_min_weight(&inner, &outer, 100), Err(CodeError::NotContained));
        assert_eq!(relative_min_weight(&inner, &inner, 100), Err(CodeError::NotProper));
    }

    #[test]
    fn direct_sums() {
        let a = repetition(2, 3);
        let b = repetition(2, 2);
        let s = a.direct_sum(&b).unwrap();
        assert_eq!((s.len(), s.dimension()), (5, 2));
        assert_eq!(s.weight_enumerator(10).unwrap().to_u64().unwrap(), vec![1, 0, 1, 1, 0, 1]);
        assert_eq!(s.min_distance(10).unwrap().d, 2);
        let empty = LinearCode::zero(gf(2), 0);
        assert_eq!(a.direct_sum(&empty).unwrap(), a);
        assert!(a.direct_sum(&repetition(3, 2)).is_err());
    }
}
