//! Truncated formal power series in non-commuting indeterminates.
//!
//! Every series carries its truncation degree `N`; arithmetic between series
//! of different `N` is rejected instead of silently re-truncated.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ncpoly::Side;
use crate::scalar::{one, Scalar};
use crate::word::{word_count, Word};

/// Hard ceiling on `Σ_{k≤N} d^k` for any constructed series.
pub const DEFAULT_MAX_COEFFS: u128 = 10_000_000;

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    d: usize,
    trunc: usize,
    coeffs: BTreeMap<Word, Scalar>,
}

/// Which side of the change of variables carries the series factor:
/// `z_i = w_i (1 + M)` or `z_i = (1 + M) w_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPointVariant {
    /// `M(w) = R(w (1 + M(w)))`
    RwM,
    /// `M(w) = R((1 + M(w)) w)`
    RMw,
}

impl Series {
    pub fn zero(d: usize, trunc: usize) -> Self {
        Series {
            d,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(d: usize, trunc: usize) -> Self {
        Self::constant(d, trunc, one())
    }

    pub fn constant(d: usize, trunc: usize, c: Scalar) -> Self {
        let mut s = Series::zero(d, trunc);
        s.add_term(Word::empty(), c);
        s
    }

    /// The indeterminate `z_i` (0-based).
    pub fn var(d: usize, trunc: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::IndexOutOfRange { index: i + 1, d });
        }
        let mut s = Series::zero(d, trunc);
        s.add_term(Word::letter(i), one());
        Ok(s)
    }

    /// Builds a series, rejecting words longer than `trunc` or outside the alphabet.
    pub fn from_terms(
        d: usize,
        trunc: usize,
        terms: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Result<Self> {
        let mut s = Series::zero(d, trunc);
        for (w, c) in terms {
            w.check_alphabet(d)?;
            if w.len() > trunc {
                return Err(Error::TruncationExceeded {
                    needed: w.len(),
                    available: trunc,
                });
            }
            s.add_term(w, c);
        }
        Ok(s)
    }

    /// Errors if `Σ_{k≤N} d^k` exceeds `limit`.
    pub fn check_budget(d: usize, trunc: usize, limit: u128) -> Result<()> {
        let count = word_count(d, trunc);
        if count > limit {
            return Err(Error::TooManyCoefficients { count, limit });
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.coeffs.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Word::empty())
    }

    /// Nonzero coefficients in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() || w.len() > self.trunc {
            return;
        }
        add_into(&mut self.coeffs, w, c);
    }

    pub fn set(&mut self, w: Word, c: Scalar) {
        if w.len() > self.trunc {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&w);
        } else {
            self.coeffs.insert(w, c);
        }
    }

    fn compatible(&self, other: &Series) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: other.d,
            });
        }
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch {
                left: self.trunc,
                right: other.trunc,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            add_into(&mut out.coeffs, w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            add_into(&mut out.coeffs, w.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        if c.is_zero() {
            return Series::zero(self.d, self.trunc);
        }
        Series {
            d: self.d,
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|(w, a)| (w.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.compatible(other)?;
        Ok(Series {
            d: self.d,
            trunc: self.trunc,
            coeffs: mul_trunc(&self.coeffs, &other.coeffs, self.trunc),
        })
    }

    /// Two-sided inverse modulo degree `N + 1`.
    pub fn inverse(&self) -> Result<Series> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = one() / &c0;
        // t_u = -(1/s_0) Σ_{u = a b, a ≠ ∅} s_a t_b, solved in graded order.
        let mut out: BTreeMap<Word, Scalar> = BTreeMap::new();
        out.insert(Word::empty(), inv0.clone());
        for n in 1..=self.trunc {
            let mut level: BTreeMap<Word, Scalar> = BTreeMap::new();
            for (a, sa) in self
                .coeffs
                .iter()
                .filter(|(a, _)| !a.is_empty() && a.len() <= n)
            {
                for (b, tb) in out.iter().filter(|(b, _)| b.len() == n - a.len()) {
                    add_into(&mut level, a.concat(b), -(sa * tb));
                }
            }
            for (w, c) in level {
                out.insert(w, c * &inv0);
            }
        }
        Ok(Series {
            d: self.d,
            trunc: self.trunc,
            coeffs: out,
        })
    }

    /// `D_i`: strips a leading `z_i`. The result keeps the truncation `N`.
    pub fn left_derivative(&self, i: usize) -> Result<Series> {
        if i >= self.d {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                d: self.d,
            });
        }
        let mut out = Series::zero(self.d, self.trunc);
        for (w, c) in &self.coeffs {
            if w.first() == Some(i) {
                out.coeffs.insert(w.tail(), c.clone());
            }
        }
        Ok(out)
    }

    /// The same coefficients, truncated to a smaller degree.
    pub fn truncated(&self, trunc: usize) -> Series {
        Series {
            d: self.d,
            trunc,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() <= trunc)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficients of a single degree.
    pub fn homogeneous(&self, n: usize) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.coeffs.iter().filter(move |(w, _)| w.len() == n)
    }

    /// Substitutes each indeterminate of `self`: `z_i ↦ t·w_i` on the left
    /// side, `z_i ↦ w_i·t` on the right side. Products are taken in word
    /// order and truncated at `N`.
    pub fn substitute(&self, t: &Series, side: Side) -> Result<Series> {
        self.compatible(t)?;
        let mut prefixes: HashSet<Word> = HashSet::new();
        for w in self.coeffs.keys() {
            for k in 0..=w.len() {
                prefixes.insert(w.slice(0, k));
            }
        }
        let coeffs = self.substitute_rec(&Word::empty(), self.trunc, t, side, &prefixes);
        Ok(Series {
            d: self.d,
            trunc: self.trunc,
            coeffs,
        })
    }

    // S(T·w) restricted to the words beginning with `prefix`, i.e. (D_prefix S)(T·w),
    // computed to degree `budget` via S = s_∅ + Σ_i z_i D_i S.
    fn substitute_rec(
        &self,
        prefix: &Word,
        budget: usize,
        t: &Series,
        side: Side,
        prefixes: &HashSet<Word>,
    ) -> BTreeMap<Word, Scalar> {
        let mut out = BTreeMap::new();
        if let Some(c) = self.coeffs.get(prefix) {
            out.insert(Word::empty(), c.clone());
        }
        if budget == 0 {
            return out;
        }
        for i in 0..self.d {
            let next = prefix.push(i);
            if !prefixes.contains(&next) {
                continue;
            }
            let inner = self.substitute_rec(&next, budget - 1, t, side, prefixes);
            if inner.is_empty() {
                continue;
            }
            let t_part: BTreeMap<Word, Scalar> = t
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() < budget)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect();
            let term = match side {
                Side::Left => {
                    let shifted: BTreeMap<Word, Scalar> =
                        inner.into_iter().map(|(w, c)| (w.prepend(i), c)).collect();
                    mul_trunc(&t_part, &shifted, budget)
                }
                Side::Right => {
                    let prod = mul_trunc(&t_part, &inner, budget - 1);
                    prod.into_iter().map(|(w, c)| (w.prepend(i), c)).collect()
                }
            };
            for (w, c) in term {
                add_into(&mut out, w, c);
            }
        }
        out
    }

    /// Solves `M = f(M)` degree by degree, starting from `M = 0`. At degree `n`
    /// the map `f` must only consult coefficients of `M` below degree `n`.
    pub fn solve_fixed_point(
        d: usize,
        trunc: usize,
        f: impl Fn(&Series) -> Result<Series>,
    ) -> Result<Series> {
        let mut m = Series::zero(d, trunc);
        for n in 1..=trunc {
            let image = f(&m)?;
            for (w, c) in image.homogeneous(n) {
                m.coeffs.insert(w.clone(), c.clone());
            }
        }
        Ok(m)
    }

    /// The unique `M` with zero constant term satisfying the chosen functional
    /// equation against the cumulant series `r`.
    pub fn solve_m_from_r(r: &Series, variant: FixedPointVariant) -> Result<Series> {
        if !r.constant_term().is_zero() {
            return Err(Error::Precondition(
                "cumulant series must have zero constant term".into(),
            ));
        }
        let side = match variant {
            FixedPointVariant::RwM => Side::Right,
            FixedPointVariant::RMw => Side::Left,
        };
        Series::solve_fixed_point(r.d, r.trunc, |m| {
            let t = Series::one(r.d, r.trunc).add(m)?;
            r.substitute(&t, side)
        })
    }
}

pub(crate) fn add_into(map: &mut BTreeMap<Word, Scalar>, w: Word, c: Scalar) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(w) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn mul_trunc(
    a: &BTreeMap<Word, Scalar>,
    b: &BTreeMap<Word, Scalar>,
    limit: usize,
) -> BTreeMap<Word, Scalar> {
    let mut out = BTreeMap::new();
    for (wa, ca) in a {
        if wa.len() > limit {
            break;
        }
        for (wb, cb) in b {
            if wa.len() + wb.len() > limit {
                break;
            }
            add_into(&mut out, wa.concat(wb), ca * cb);
        }
    }
    out
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series(d={}, N={}) {{", self.d, self.trunc)?;
        for (w, c) in &self.coeffs {
            write!(f, " {w}: {}", crate::scalar::format_rational(c))?;
        }
        write!(f, " }}")
    }
}
