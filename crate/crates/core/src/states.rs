//! Truncated states on `Q<x_1, .., x_d>` and the cumulant coordinate
//! systems: moments `M`, Boolean cumulants `η`, free cumulants `R` and
//! two-state free cumulants `R^{φ,ψ}`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ncpoly::{Functional, Poly, Side};
use crate::ncseries::{FixedPointVariant, Series};
use crate::orthopoly::{moments_from_jacobi, JacobiParams};
use crate::partitions::noncrossing_classified;
use crate::partitions::ClassRole;
use crate::scalar::{one, Scalar};
use crate::word::{words_of_length, words_up_to, Word};

/// A unital, reversal-symmetric functional known on all words of length `≤ N`.
///
/// The moments are stored as the series `1 + M(z)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct State {
    moments: Series,
}

impl State {
    /// Builds a state from moments of nonempty words. The empty word is fixed
    /// to 1; a supplied value for it must equal 1.
    pub fn new(
        d: usize,
        trunc: usize,
        moments: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Result<Self> {
        let mut series = Series::from_terms(d, trunc, moments)?;
        let c0 = series.constant_term();
        if !c0.is_zero() && !c0.is_one() {
            return Err(Error::InvalidParameter(
                "moment of the empty word must be 1".into(),
            ));
        }
        series.set(Word::empty(), one());
        let state = State { moments: series };
        state.check_reversal()?;
        Ok(state)
    }

    /// From the moment generating function `M` (its constant term is ignored).
    pub fn from_mgf(m: &Series) -> Result<Self> {
        let mut series = m.clone();
        series.set(Word::empty(), one());
        let state = State { moments: series };
        state.check_reversal()?;
        Ok(state)
    }

    pub(crate) fn from_mgf_unchecked(m: &Series) -> Self {
        let mut series = m.clone();
        series.set(Word::empty(), one());
        State { moments: series }
    }

    fn check_reversal(&self) -> Result<()> {
        for (w, c) in self.moments.terms() {
            if self.moments.coeff(&w.reversed()) != *c {
                return Err(Error::NotSelfAdjoint(w.to_string()));
            }
        }
        Ok(())
    }

    /// The state `P ↦ P(0)`.
    pub fn delta_zero(d: usize, trunc: usize) -> Self {
        State {
            moments: Series::one(d, trunc),
        }
    }

    pub fn d(&self) -> usize {
        self.moments.d()
    }

    pub fn trunc(&self) -> usize {
        self.moments.trunc()
    }

    /// `s[x_w]`; errors beyond the truncation.
    pub fn moment(&self, w: &Word) -> Result<Scalar> {
        w.check_alphabet(self.d())?;
        if w.len() > self.trunc() {
            return Err(Error::TruncationExceeded {
                needed: w.len(),
                available: self.trunc(),
            });
        }
        Ok(self.moments.coeff(w))
    }

    /// `1 + M(z)`.
    pub fn one_plus_mgf(&self) -> &Series {
        &self.moments
    }

    /// `M(z)`, without constant term.
    pub fn mgf(&self) -> Series {
        let mut m = self.moments.clone();
        m.set(Word::empty(), Scalar::zero());
        m
    }

    /// `⟨P, Q⟩ = s[P* Q]`.
    pub fn inner(&self, p: &Poly, q: &Poly) -> Result<Scalar> {
        self.apply(&p.star().checked_mul(q)?)
    }

    /// The same state known to a lower degree.
    pub fn truncated(&self, trunc: usize) -> Result<State> {
        if trunc > self.trunc() {
            return Err(Error::TruncationExceeded {
                needed: trunc,
                available: self.trunc(),
            });
        }
        Ok(State {
            moments: self.moments.truncated(trunc),
        })
    }
}

impl Functional for State {
    fn dim(&self) -> usize {
        self.d()
    }

    fn value(&self, w: &Word) -> Result<Scalar> {
        self.moment(w)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StatePair {
    pub phi: State,
    pub psi: State,
}

impl StatePair {
    pub fn new(phi: State, psi: State) -> Result<Self> {
        check_compatible(&phi, &psi)?;
        Ok(StatePair { phi, psi })
    }

    pub fn d(&self) -> usize {
        self.phi.d()
    }

    pub fn trunc(&self) -> usize {
        self.phi.trunc()
    }
}

fn check_compatible(a: &State, b: &State) -> Result<()> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch {
            expected: a.d(),
            found: b.d(),
        });
    }
    if a.trunc() != b.trunc() {
        return Err(Error::TruncationMismatch {
            left: a.trunc(),
            right: b.trunc(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CumulantKind {
    Boolean,
    Free,
    TwoState,
}

impl CumulantKind {
    pub fn name(self) -> &'static str {
        match self {
            CumulantKind::Boolean => "boolean",
            CumulantKind::Free => "free",
            CumulantKind::TwoState => "two_state",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "boolean" => Ok(CumulantKind::Boolean),
            "free" => Ok(CumulantKind::Free),
            "two_state" | "two-state" => Ok(CumulantKind::TwoState),
            other => Err(Error::InvalidParameter(format!(
                "unknown cumulant kind {other:?}"
            ))),
        }
    }
}

/// A cumulant generating function; its constant term is zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CumulantSeries {
    kind: CumulantKind,
    series: Series,
}

impl CumulantSeries {
    pub fn new(kind: CumulantKind, series: Series) -> Result<Self> {
        if !series.constant_term().is_zero() {
            return Err(Error::Precondition(
                "cumulant series must have zero constant term".into(),
            ));
        }
        Ok(CumulantSeries { kind, series })
    }

    pub fn kind(&self) -> CumulantKind {
        self.kind
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.series.coeff(w)
    }
}

/// `η = 1 − (1 + M)^{-1}`.
pub fn boolean_cumulants(s: &State) -> CumulantSeries {
    let inv = s.moments.inverse().expect("constant term is 1");
    let eta = Series::one(s.d(), s.trunc()).sub(&inv).expect("same shape");
    CumulantSeries {
        kind: CumulantKind::Boolean,
        series: eta,
    }
}

/// The `R` solving `M(w) = R(w(1 + M(w)))`, i.e. `R(z) = M(z (1 + R(z))^{-1})`.
pub fn free_cumulants(s: &State) -> CumulantSeries {
    let m = s.mgf();
    let (d, n) = (s.d(), s.trunc());
    let r = Series::solve_fixed_point(d, n, |r| {
        let t = Series::one(d, n).add(r)?.inverse()?;
        m.substitute(&t, Side::Right)
    })
    .expect("shapes agree");
    CumulantSeries {
        kind: CumulantKind::Free,
        series: r,
    }
}

/// Two-state free cumulants, solved word by word from the non-crossing
/// partition expansion of `φ`: outer classes carry `R^{φ,ψ}`, inner classes
/// carry `R^ψ`, and the one-class partition isolates the unknown. Beyond
/// degree 12 the generating-function route is used instead.
pub fn two_state_cumulants(pair: &StatePair) -> CumulantSeries {
    let (d, n) = (pair.d(), pair.trunc());
    if n > crate::partitions::MAX_ENUMERATION_SIZE {
        return two_state_cumulants_genfun(pair);
    }
    let r_psi = free_cumulants(&pair.psi);
    let mut r: BTreeMap<Word, Scalar> = BTreeMap::new();
    for len in 1..=n {
        let parts = noncrossing_classified(len);
        for u in words_of_length(d, len) {
            let mut acc = pair.phi.moments.coeff(&u);
            for cp in parts.iter().filter(|cp| cp.partition.num_classes() > 1) {
                let mut prod = one();
                for (class, role) in cp.partition.classes().iter().zip(&cp.roles) {
                    let sub = u.restrict(class);
                    let c = match role {
                        ClassRole::Outer => r.get(&sub).cloned().unwrap_or_else(Scalar::zero),
                        ClassRole::Inner => r_psi.coeff(&sub),
                    };
                    if c.is_zero() {
                        prod = Scalar::zero();
                        break;
                    }
                    prod *= c;
                }
                if !prod.is_zero() {
                    acc -= prod;
                }
            }
            if !acc.is_zero() {
                r.insert(u, acc);
            }
        }
    }
    let series = Series::from_terms(d, n, r).expect("words fit");
    CumulantSeries {
        kind: CumulantKind::TwoState,
        series,
    }
}

/// Two-state free cumulants from generating functions:
/// `R^{φ,ψ}(z) = [(1 + M^ψ) η^φ](w)` with `w_i = (1 + R^ψ(z))^{-1} z_i`.
pub fn two_state_cumulants_genfun(pair: &StatePair) -> CumulantSeries {
    let (d, n) = (pair.d(), pair.trunc());
    let eta = boolean_cumulants(&pair.phi).series;
    let r_psi = free_cumulants(&pair.psi).series;
    let f = pair.psi.moments.mul(&eta).expect("same shape");
    let t = Series::one(d, n)
        .add(&r_psi)
        .and_then(|s| s.inverse())
        .expect("invertible");
    let series = f.substitute(&t, Side::Left).expect("same shape");
    CumulantSeries {
        kind: CumulantKind::TwoState,
        series,
    }
}

/// Both sides of `1 + R^ψ(z) − R^{φ,ψ}(z) = (1 + M^ψ(w))(1 + M^φ(w))^{-1}`
/// under `z_i = (1 + M^ψ(w)) w_i`, as series in `w`.
pub fn c_cumulant_identity_sides(pair: &StatePair) -> Result<(Series, Series)> {
    let (d, n) = (pair.d(), pair.trunc());
    let r_psi = free_cumulants(&pair.psi).series;
    let r = two_state_cumulants(pair).series;
    let lhs = Series::one(d, n)
        .add(&r_psi)?
        .sub(&r)?
        .substitute(&pair.psi.moments, Side::Left)?;
    let rhs = pair.psi.moments.mul(&pair.phi.moments.inverse()?)?;
    Ok((lhs, rhs))
}

/// Inverse of the cumulant transforms. Two-state cumulants need `ψ` as `aux`.
pub fn moments_from_cumulants(c: &CumulantSeries, aux: Option<&State>) -> Result<State> {
    let s = &c.series;
    let (d, n) = (s.d(), s.trunc());
    match c.kind {
        CumulantKind::Boolean => {
            let one_plus_m = Series::one(d, n).sub(s)?.inverse()?;
            State::from_mgf(&one_plus_m)
        }
        CumulantKind::Free => {
            let m = Series::solve_m_from_r(s, FixedPointVariant::RwM)?;
            State::from_mgf(&m)
        }
        CumulantKind::TwoState => {
            let psi = aux.ok_or_else(|| {
                Error::Precondition("two-state cumulants need the state psi".into())
            })?;
            if psi.d() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: psi.d(),
                });
            }
            if psi.trunc() != n {
                return Err(Error::TruncationMismatch {
                    left: n,
                    right: psi.trunc(),
                });
            }
            // η^φ(w) = (1 + M^ψ(w))^{-1} R^{φ,ψ}((1 + M^ψ(w)) w)
            let shifted = s.substitute(&psi.moments, Side::Left)?;
            let eta = psi.moments.inverse()?.mul(&shifted)?;
            let one_plus_m = Series::one(d, n).sub(&eta)?.inverse()?;
            State::from_mgf(&one_plus_m)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvolutionKind {
    Free,
    Boolean,
}

/// Free (`⊞`) or Boolean (`⊎`) convolution: cumulants add.
pub fn convolve(kind: ConvolutionKind, a: &State, b: &State) -> Result<State> {
    check_compatible(a, b)?;
    match kind {
        ConvolutionKind::Free => {
            let r = free_cumulants(a).series.add(&free_cumulants(b).series)?;
            moments_from_cumulants(&CumulantSeries::new(CumulantKind::Free, r)?, None)
        }
        ConvolutionKind::Boolean => {
            let eta = boolean_cumulants(a)
                .series
                .add(&boolean_cumulants(b).series)?;
            moments_from_cumulants(&CumulantSeries::new(CumulantKind::Boolean, eta)?, None)
        }
    }
}

/// `a^{⊎λ}`: Boolean cumulants scaled by `λ ≥ 0`.
pub fn boolean_power(a: &State, lambda: &Scalar) -> Result<State> {
    if lambda.is_negative() {
        return Err(Error::InvalidParameter(
            "Boolean power must be nonnegative".into(),
        ));
    }
    let eta = boolean_cumulants(a).series.scale(lambda);
    moments_from_cumulants(&CumulantSeries::new(CumulantKind::Boolean, eta)?, None)
}

/// `Φ[ψ]`, the state with `η(w) = Σ_i w_i (1 + M^ψ(w)) w_i`.
pub fn phi_map(psi: &State) -> State {
    let (d, n) = (psi.d(), psi.trunc());
    let mut eta = Series::zero(d, n);
    for (u, c) in psi.moments.terms() {
        if u.len() + 2 > n {
            continue;
        }
        for i in 0..d {
            eta.add_term(u.prepend(i).push(i), c.clone());
        }
    }
    let one_plus_m = Series::one(d, n)
        .sub(&eta)
        .and_then(|s| s.inverse())
        .expect("invertible");
    State::from_mgf_unchecked(&one_plus_m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedState {
    /// One variable with mean `mean` and variance `variance`.
    Semicircle {
        mean: Scalar,
        variance: Scalar,
    },
    /// Jacobi parameters `(0, b, b, ..)`, `(1, 1 + c, 1 + c, ..)`.
    FreeMeixner {
        b: Scalar,
        c: Scalar,
    },
    /// Free semicircular variables with the given means and variances.
    FreeSemicircles {
        means: Vec<Scalar>,
        variances: Vec<Scalar>,
    },
    DeltaZero {
        d: usize,
    },
    /// The symmetric law on `{−1, 1}`.
    BernoulliPm1,
}

pub fn named_state(spec: &NamedState, trunc: usize) -> Result<State> {
    match spec {
        NamedState::Semicircle { mean, variance } => free_semicircles(
            std::slice::from_ref(mean),
            std::slice::from_ref(variance),
            trunc,
        ),
        NamedState::FreeSemicircles { means, variances } => {
            free_semicircles(means, variances, trunc)
        }
        NamedState::FreeMeixner { b, c } => {
            let v = one() + c;
            if v.is_negative() {
                return Err(Error::InvalidParameter(
                    "free Meixner law needs 1 + c >= 0".into(),
                ));
            }
            let mut beta = vec![Scalar::zero()];
            let mut gamma = vec![one()];
            beta.extend(std::iter::repeat_n(b.clone(), trunc));
            gamma.extend(std::iter::repeat_n(v, trunc));
            moments_from_jacobi(&JacobiParams::new(beta, gamma)?, trunc)
        }
        NamedState::DeltaZero { d } => Ok(State::delta_zero(*d, trunc)),
        NamedState::BernoulliPm1 => moments_from_jacobi(
            &JacobiParams::new(vec![Scalar::zero(); 2], vec![one(), Scalar::zero()])?,
            trunc,
        ),
    }
}

fn free_semicircles(means: &[Scalar], variances: &[Scalar], trunc: usize) -> Result<State> {
    if means.len() != variances.len() {
        return Err(Error::DimensionMismatch {
            expected: means.len(),
            found: variances.len(),
        });
    }
    if means.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one variable is required".into(),
        ));
    }
    let d = means.len();
    let mut r = Series::zero(d, trunc);
    for (i, (b, v)) in means.iter().zip(variances).enumerate() {
        if v.is_negative() {
            return Err(Error::InvalidParameter(
                "semicircle variance must be nonnegative".into(),
            ));
        }
        if trunc >= 1 {
            r.add_term(Word::letter(i), b.clone());
        }
        if trunc >= 2 {
            r.add_term(Word::new(vec![i as u8, i as u8]), v.clone());
        }
    }
    moments_from_cumulants(&CumulantSeries::new(CumulantKind::Free, r)?, None)
}

/// The pair whose `R^ψ` and `R^{φ,ψ}` are the sums of the factors' cumulant
/// series placed on disjoint blocks of variables.
pub fn cfree_product(pairs: &[StatePair]) -> Result<StatePair> {
    let first = pairs
        .first()
        .ok_or_else(|| Error::InvalidParameter("no factors".into()))?;
    let n = first.trunc();
    let d: usize = pairs.iter().map(|p| p.d()).sum();
    if d > u8::MAX as usize {
        return Err(Error::InvalidParameter("too many variables".into()));
    }
    let mut r_psi = Series::zero(d, n);
    let mut r_pair = Series::zero(d, n);
    let mut offset = 0;
    for p in pairs {
        if p.trunc() != n {
            return Err(Error::TruncationMismatch {
                left: n,
                right: p.trunc(),
            });
        }
        let shift = |w: &Word| Word::new(w.letters().iter().map(|&l| l + offset as u8).collect());
        for (w, c) in free_cumulants(&p.psi).series.terms() {
            r_psi.add_term(shift(w), c.clone());
        }
        for (w, c) in two_state_cumulants_genfun(p).series.terms() {
            r_pair.add_term(shift(w), c.clone());
        }
        offset += p.d();
    }
    let psi = moments_from_cumulants(&CumulantSeries::new(CumulantKind::Free, r_psi)?, None)?;
    let phi = moments_from_cumulants(
        &CumulantSeries::new(CumulantKind::TwoState, r_pair)?,
        Some(&psi),
    )?;
    StatePair::new(phi, psi)
}

/// Whether the Gram matrix `s[u* v]` over words of degree `≤ k` is positive
/// semidefinite.
pub fn is_positive(s: &State, k: usize) -> Result<bool> {
    if 2 * k > s.trunc() {
        return Err(Error::TruncationExceeded {
            needed: 2 * k,
            available: s.trunc(),
        });
    }
    gram_matrix(s, k)?.is_positive_semidefinite()
}

/// `G[u][v] = s[reverse(u) v]` over `words_up_to(d, k)`.
pub fn gram_matrix(s: &State, k: usize) -> Result<Matrix> {
    let words = words_up_to(s.d(), k);
    let mut g = Matrix::zeros(words.len(), words.len());
    for (a, u) in words.iter().enumerate() {
        let ur = u.reversed();
        for (b, v) in words.iter().enumerate() {
            g.set(a, b, s.moment(&ur.concat(v))?);
        }
    }
    Ok(g)
}

/// Coefficients of the Boolean quadratic PDE
/// `D_i D_j η = δ_ij + Σ_k B^k_ij D_k η + (1 + C_ij) D_i η D_j η`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeMeixnerFit {
    /// `b[i][j][k] = B^k_ij`.
    pub b: Vec<Vec<Vec<Scalar>>>,
    /// `C_ij`.
    pub c: Matrix,
}

impl FreeMeixnerFit {
    /// `(b_i, c_i)` read off as `B^j_ij` and `C_ij` for any `j ≠ i`, or the
    /// diagonal in one variable.
    pub fn diagonal_parameters(&self) -> (Vec<Scalar>, Vec<Scalar>) {
        let d = self.b.len();
        let b = (0..d).map(|i| self.b[i][i][i].clone()).collect();
        let c = (0..d).map(|i| self.c.get(i, i).clone()).collect();
        (b, c)
    }
}

/// Fits `B`, `C` from the degree-3 and degree-4 Boolean cumulants and checks
/// the PDE on every coefficient through degree `N`. Requires mean zero and
/// identity covariance.
pub fn is_free_meixner(s: &State) -> Result<Option<FreeMeixnerFit>> {
    let (d, n) = (s.d(), s.trunc());
    if n < 4 {
        return Err(Error::TruncationExceeded {
            needed: 4,
            available: n,
        });
    }
    require_normalized(s)?;
    let eta = boolean_cumulants(s).series;
    let e = |letters: &[usize]| eta.coeff(&Word::new(letters.iter().map(|&l| l as u8).collect()));
    let mut b = vec![vec![vec![Scalar::zero(); d]; d]; d];
    let mut c = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                b[i][j][l] = e(&[j, i, l]);
            }
            let mut v = e(&[j, i, i, j]);
            for k in 0..d {
                v -= &b[i][j][k] * e(&[k, i, j]);
            }
            c.set(i, j, v - one());
        }
    }
    // Coefficient of z_v on both sides, |v| ≤ N − 2.
    for i in 0..d {
        let di = eta.left_derivative(i)?;
        for j in 0..d {
            let dj = eta.left_derivative(j)?;
            let mut rhs = di.mul(&dj)?.scale(&(one() + c.get(i, j)));
            if i == j {
                rhs.add_term(Word::empty(), one());
            }
            for k in 0..d {
                rhs = rhs.add(&eta.left_derivative(k)?.scale(&b[i][j][k]))?;
            }
            for v in words_up_to(d, n - 2) {
                let left = eta.coeff(&v.prepend(i).prepend(j));
                if left != rhs.coeff(&v) {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some(FreeMeixnerFit { b, c }))
}

/// Errors unless `s[x_i] = 0` and `s[x_i x_j] = δ_ij`.
pub fn require_normalized(s: &State) -> Result<()> {
    if s.trunc() < 2 {
        return Err(Error::TruncationExceeded {
            needed: 2,
            available: s.trunc(),
        });
    }
    for i in 0..s.d() {
        if !s.moment(&Word::letter(i))?.is_zero() {
            return Err(Error::Precondition("state must have mean zero".into()));
        }
        for j in 0..s.d() {
            let v = s.moment(&Word::new(vec![i as u8, j as u8]))?;
            if v != crate::scalar::delta(i, j) {
                return Err(Error::Precondition(
                    "state must have identity covariance".into(),
                ));
            }
        }
    }
    Ok(())
}

/// For one variable: the law of `(x − mean) / σ`, together with `(mean, σ)`.
/// The variance must be a positive square of a rational.
pub fn center_and_rescale(s: &State) -> Result<(State, Scalar, Scalar)> {
    if s.d() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: s.d(),
        });
    }
    let n = s.trunc();
    if n < 2 {
        return Err(Error::TruncationExceeded {
            needed: 2,
            available: n,
        });
    }
    let m = |k: usize| s.moments.coeff(&Word::new(vec![0; k]));
    let mean = m(1);
    let var = m(2) - &mean * &mean;
    if !var.is_positive() {
        return Err(Error::NotPositive("variance must be positive".into()));
    }
    let sigma = rational_sqrt(&var).ok_or_else(|| {
        Error::InvalidParameter("variance is not the square of a rational".into())
    })?;
    let mut out = Series::one(1, n);
    // E[(x − a)^k] = Σ_j C(k,j) m_j (−a)^{k−j}
    for k in 1..=n {
        let mut acc = Scalar::zero();
        let mut binom = one();
        for j in 0..=k {
            let neg_a = -&mean;
            acc += &binom * m(j) * pow(&neg_a, k - j);
            binom =
                binom * Scalar::from_integer((k - j).into()) / Scalar::from_integer((j + 1).into());
        }
        out.set(Word::new(vec![0; k]), acc / pow(&sigma, k));
    }
    Ok((State { moments: out }, mean, sigma))
}

fn pow(x: &Scalar, k: usize) -> Scalar {
    let mut r = one();
    for _ in 0..k {
        r *= x;
    }
    r
}

fn rational_sqrt(q: &Scalar) -> Option<Scalar> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Scalar::new(n, d))
    } else {
        None
    }
}
