//! Sparse polynomials in `d` non-commuting variables with exact rational
//! coefficients, their tensor squares, the difference quotients `∂_i`, the
//! left derivatives `D_i`, and partial application of a functional to one
//! tensor leg.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{one, Scalar};
use crate::word::Word;

/// Anything that assigns a scalar to each word: states, point evaluations.
pub trait Functional {
    fn dim(&self) -> usize;

    /// Value on the monomial `x_w`.
    fn value(&self, w: &Word) -> Result<Scalar>;

    fn apply(&self, p: &Poly) -> Result<Scalar> {
        if p.d() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.d(),
            });
        }
        let mut acc = Scalar::zero();
        for (w, c) in p.terms() {
            let v = self.value(w)?;
            if !v.is_zero() {
                acc += c * v;
            }
        }
        Ok(acc)
    }
}

/// Element of the free algebra `Q<x_1, .., x_d>`. No stored coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    d: usize,
    terms: BTreeMap<Word, Scalar>,
}

impl Poly {
    pub fn zero(d: usize) -> Self {
        Poly {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, one())
    }

    pub fn constant(d: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(d);
        p.add_term(Word::empty(), c);
        p
    }

    /// The variable `x_i` (0-based `i`).
    pub fn var(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::IndexOutOfRange { index: i + 1, d });
        }
        Ok(Self::monomial(d, Word::letter(i)))
    }

    /// The monomial `x_w`; the caller guarantees `w` uses letters below `d`.
    pub fn monomial(d: usize, w: Word) -> Self {
        debug_assert!(w.check_alphabet(d).is_ok());
        let mut p = Poly::zero(d);
        p.terms.insert(w, one());
        p
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Word, Scalar)>) -> Result<Self> {
        let mut p = Poly::zero(d);
        for (w, c) in terms {
            w.check_alphabet(d)?;
            p.add_term(w, c);
        }
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Word::empty())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    /// Adds `c * x_w` in place.
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
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

    pub fn add_scaled(&mut self, other: &Poly, c: &Scalar) {
        assert_eq!(self.d, other.d, "polynomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (w, a) in &other.terms {
            self.add_term(w.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.d);
        }
        Poly {
            d: self.d,
            terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect(),
        }
    }

    /// Dimension-checked product.
    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: other.d,
            });
        }
        let mut out = Poly::zero(self.d);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        Ok(out)
    }

    /// Left multiplication by the variable `x_i`.
    pub fn mul_var_left(&self, i: usize) -> Poly {
        Poly {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.prepend(i), c.clone()))
                .collect(),
        }
    }

    /// The adjoint: reverses every word (coefficients are real).
    pub fn star(&self) -> Poly {
        let mut out = Poly::zero(self.d);
        for (w, c) in &self.terms {
            out.add_term(w.reversed(), c.clone());
        }
        out
    }

    /// True if the top-degree part is exactly `x_w`.
    pub fn is_monic_with_leading(&self, w: &Word) -> bool {
        self.coeff(w) == one() && self.terms.keys().all(|u| u == w || u.len() < w.len())
    }

    /// The difference quotient `∂_i`, 0-based `i`.
    pub fn diff_quotient(&self, i: usize) -> Result<TensorPoly> {
        if i >= self.d {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                d: self.d,
            });
        }
        let mut out = TensorPoly::zero(self.d);
        for (w, c) in &self.terms {
            for j in 0..w.len() {
                if w.get(j) == i {
                    out.add_term(w.slice(0, j), w.slice(j + 1, w.len()), c.clone());
                }
            }
        }
        Ok(out)
    }

    /// The left derivative `D_i`: strips a leading `x_i`, kills other words.
    pub fn left_derivative(&self, i: usize) -> Result<Poly> {
        if i >= self.d {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                d: self.d,
            });
        }
        let mut out = Poly::zero(self.d);
        for (w, c) in &self.terms {
            if w.first() == Some(i) {
                out.add_term(w.tail(), c.clone());
            }
        }
        Ok(out)
    }

    /// Substitutes `x_i ↦ ops[i]`, `1 ↦ I`.
    pub fn evaluate(&self, ops: &[Matrix]) -> Result<Matrix> {
        if ops.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: ops.len(),
            });
        }
        let n = ops.first().map_or(0, Matrix::rows);
        for m in ops {
            if !m.is_square() || m.rows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.rows(),
                });
            }
        }
        let mut acc = Matrix::zeros(n, n);
        for (w, c) in &self.terms {
            let mut term = Matrix::identity(n);
            for &l in w.letters() {
                term = term.mul(&ops[l as usize])?;
            }
            acc = acc.add(&term.scale(c))?;
        }
        Ok(acc)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &one());
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-one());
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-one())
    }
}

/// Panics on a dimension mismatch; use [`Poly::checked_mul`] for fallible input.
impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs)
            .expect("polynomial dimension mismatch")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", crate::scalar::format_rational(c))?;
            for &l in w.letters() {
                write!(f, "*x{}", l as usize + 1)?;
            }
        }
        Ok(())
    }
}

/// Element of `Q<x> ⊗ Q<x>`, stored as pairs of words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorPoly {
    d: usize,
    terms: BTreeMap<(Word, Word), Scalar>,
}

impl TensorPoly {
    pub fn zero(d: usize) -> Self {
        TensorPoly {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, a: Word, b: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let entry = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// `p ⊗ q`.
    pub fn tensor(p: &Poly, q: &Poly) -> TensorPoly {
        assert_eq!(p.d, q.d, "polynomial dimension mismatch");
        let mut out = TensorPoly::zero(p.d);
        for (a, ca) in &p.terms {
            for (b, cb) in &q.terms {
                out.add_term(a.clone(), b.clone(), ca * cb);
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &TensorPoly, c: &Scalar) {
        assert_eq!(self.d, other.d, "tensor dimension mismatch");
        for ((a, b), v) in &other.terms {
            self.add_term(a.clone(), b.clone(), v * c);
        }
    }

    /// `(p ⊗ 1) · t`.
    pub fn mul_left(&self, p: &Poly) -> TensorPoly {
        let mut out = TensorPoly::zero(self.d);
        for ((a, b), v) in &self.terms {
            for (w, c) in &p.terms {
                out.add_term(w.concat(a), b.clone(), v * c);
            }
        }
        out
    }

    /// `t · (1 ⊗ q)`.
    pub fn mul_right(&self, q: &Poly) -> TensorPoly {
        let mut out = TensorPoly::zero(self.d);
        for ((a, b), v) in &self.terms {
            for (w, c) in &q.terms {
                out.add_term(a.clone(), b.concat(w), v * c);
            }
        }
        out
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|(a, b)| a.len() + b.len()).max()
    }
}

impl Add for &TensorPoly {
    type Output = TensorPoly;
    fn add(self, rhs: &TensorPoly) -> TensorPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &one());
        out
    }
}

/// Which tensor leg the functional is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `(s ⊗ I)[t]`
    Left,
    /// `(I ⊗ s)[t]`
    Right,
}

/// Applies a functional to one leg of a tensor polynomial.
pub fn apply_state_partial(side: Side, s: &impl Functional, t: &TensorPoly) -> Result<Poly> {
    if s.dim() != t.d {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: t.d,
        });
    }
    let mut out = Poly::zero(t.d);
    for ((a, b), c) in &t.terms {
        let (scalar_word, kept) = match side {
            Side::Left => (a, b),
            Side::Right => (b, a),
        };
        let v = s.value(scalar_word)?;
        if !v.is_zero() {
            out.add_term(kept.clone(), c * v);
        }
    }
    Ok(out)
}

/// The functional `P ↦ P(0)`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantTerm {
    pub d: usize,
}

impl Functional for ConstantTerm {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, w: &Word) -> Result<Scalar> {
        Ok(if w.is_empty() { one() } else { Scalar::zero() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::word::words_up_to;
    use proptest::prelude::*;

    fn w(l: &[u8]) -> Word {
        Word::new(l.to_vec())
    }

    fn x(d: usize, i: usize) -> Poly {
        Poly::var(d, i).unwrap()
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(&x(2, 0) * &x(2, 1), Poly::monomial(2, w(&[0, 1])));
        let one = Poly::one(1);
        let p = &one + &x(1, 0);
        let q = &one - &x(1, 0);
        let expected = Poly::from_terms(1, [(w(&[]), int(1)), (w(&[0, 0]), int(-1))]).unwrap();
        assert_eq!(&p * &q, expected);
        let s = &x(2, 0) + &x(2, 1);
        let sq = &s * &s;
        assert_eq!(sq.len(), 4);
        assert_eq!(sq.coeff(&w(&[0, 1])), int(1));
        assert_eq!(sq.coeff(&w(&[1, 0])), int(1));
        assert!(Poly::one(1).checked_mul(&Poly::one(2)).is_err());
    }

    #[test]
    fn difference_quotient_examples() {
        assert!(Poly::one(2).diff_quotient(0).unwrap().is_zero());
        let t = Poly::monomial(2, w(&[0, 1, 0])).diff_quotient(0).unwrap();
        let mut expected = TensorPoly::zero(2);
        expected.add_term(w(&[]), w(&[1, 0]), int(1));
        expected.add_term(w(&[0, 1]), w(&[]), int(1));
        assert_eq!(t, expected);
        assert!(Poly::monomial(2, w(&[0, 0]))
            .diff_quotient(1)
            .unwrap()
            .is_zero());
        assert!(Poly::one(2).diff_quotient(2).is_err());
    }

    #[test]
    fn left_derivative_examples() {
        let p = Poly::monomial(2, w(&[0, 1]));
        assert_eq!(p.left_derivative(0).unwrap(), Poly::monomial(2, w(&[1])));
        assert!(p.left_derivative(1).unwrap().is_zero());
        let q = &x(1, 0) + &Poly::monomial(1, w(&[0, 0]));
        assert_eq!(q.left_derivative(0).unwrap(), &Poly::one(1) + &x(1, 0));
        assert!(q.left_derivative(3).is_err());
    }

    struct Moments(BTreeMap<Word, Scalar>, usize);
    impl Functional for Moments {
        fn dim(&self) -> usize {
            self.1
        }
        fn value(&self, w: &Word) -> Result<Scalar> {
            if w.is_empty() {
                return Ok(one());
            }
            Ok(self.0.get(w).cloned().unwrap_or_else(Scalar::zero))
        }
    }

    #[test]
    fn partial_application_examples() {
        let psi = Moments(BTreeMap::new(), 2);
        let t = TensorPoly::tensor(&x(2, 0), &x(2, 1));
        assert!(apply_state_partial(Side::Right, &psi, &t)
            .unwrap()
            .is_zero());
        let t = TensorPoly::tensor(&Poly::monomial(2, w(&[0, 1])), &Poly::one(2));
        assert_eq!(
            apply_state_partial(Side::Right, &psi, &t).unwrap(),
            Poly::monomial(2, w(&[0, 1]))
        );
        let p = Poly::monomial(2, w(&[0, 1, 0]));
        let lhs = apply_state_partial(
            Side::Left,
            &ConstantTerm { d: 2 },
            &p.diff_quotient(0).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, Poly::monomial(2, w(&[1, 0])));
        assert_eq!(lhs, p.left_derivative(0).unwrap());
    }

    #[test]
    fn evaluate_examples() {
        let j = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(
            Poly::one(1).evaluate(std::slice::from_ref(&j)).unwrap(),
            Matrix::identity(2)
        );
        let p = &Poly::monomial(1, w(&[0, 0])) - &Poly::one(1);
        assert!(p.evaluate(std::slice::from_ref(&j)).unwrap().is_zero());
        let a = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(0), int(1)]]).unwrap();
        let ab = Poly::monomial(2, w(&[0, 1]))
            .evaluate(&[a.clone(), j.clone()])
            .unwrap();
        assert_eq!(ab, a.mul(&j).unwrap());
        assert!(Poly::one(2).evaluate(&[j]).is_err());
    }

    #[test]
    fn left_derivative_matches_delta_zero_on_all_monomials() {
        for d in 1..=2 {
            for word in words_up_to(d, 8) {
                let p = Poly::monomial(d, word);
                for i in 0..d {
                    let via_delta = apply_state_partial(
                        Side::Left,
                        &ConstantTerm { d },
                        &p.diff_quotient(i).unwrap(),
                    )
                    .unwrap();
                    assert_eq!(via_delta, p.left_derivative(i).unwrap());
                }
            }
        }
    }

    fn arb_poly(d: usize, max_deg: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(
            (prop::collection::vec(0..d as u8, 0..=max_deg), -3i64..=3),
            0..6,
        )
        .prop_map(move |ts| {
            Poly::from_terms(d, ts.into_iter().map(|(l, c)| (Word::new(l), int(c)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn difference_quotient_is_a_derivation(p in arb_poly(2, 3), q in arb_poly(2, 3), i in 0usize..2) {
            let lhs = (&p * &q).diff_quotient(i).unwrap();
            let rhs = &p.diff_quotient(i).unwrap().mul_right(&q) + &q.diff_quotient(i).unwrap().mul_left(&p);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn multiplication_is_associative_and_distributive(
            p in arb_poly(2, 3), q in arb_poly(2, 3), r in arb_poly(2, 3)
        ) {
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&(&q + &r) * &p, &(&q * &p) + &(&r * &p));
        }

        #[test]
        fn leibniz_rule_for_right_partial_application(
            word in prop::collection::vec(0u8..2, 0..=7),
            vals in prop::collection::vec(-4i64..=4, 15),
            i in 0usize..2, j in 0usize..2,
        ) {
            // A functional with arbitrary values on words of length <= 3, zero beyond.
            let mut table = BTreeMap::new();
            for (k, wd) in words_up_to(2, 3).into_iter().skip(1).enumerate() {
                table.insert(wd, int(vals[k % vals.len()]));
            }
            let m = Word::new(word);
            let phi = Moments(table, 2);
            let mono = Poly::monomial(2, m.clone());
            let lhs = apply_state_partial(Side::Right, &phi, &mono.mul_var_left(i).diff_quotient(j).unwrap()).unwrap();
            let mut rhs = apply_state_partial(Side::Right, &phi, &mono.diff_quotient(j).unwrap()).unwrap().mul_var_left(i);
            if i == j {
                rhs.add_term(Word::empty(), phi.value(&m).unwrap());
            }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
