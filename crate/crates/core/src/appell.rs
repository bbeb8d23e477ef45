//! Free, Boolean and c-free Appell polynomials.
//!
//! The c-free family of a pair `(φ, ψ)` is computed from its generating
//! function, from the recursion in the first variable, or from the explicit
//! sum over interval partitions; all three agree.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ncpoly::{apply_state_partial, Functional, Poly, Side, TensorPoly};
use crate::ncseries::Series;
use crate::partitions::interval_partitions;
use crate::scalar::{one, Scalar};
use crate::states::{
    free_cumulants, gram_matrix, is_free_meixner, require_normalized, two_state_cumulants, State,
    StatePair,
};
use crate::word::{words_up_to, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AppellMethod {
    GenFun,
    Recursion,
    Explicit,
}

impl AppellMethod {
    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "genfun" => Ok(AppellMethod::GenFun),
            "recursion" => Ok(AppellMethod::Recursion),
            "explicit" => Ok(AppellMethod::Explicit),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// `A_u` for all words of length `≤ k`, with the pair that defines them.
/// Free families of `ψ` use the pair `(ψ, ψ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppellFamily {
    pair: StatePair,
    degree: usize,
    polys: BTreeMap<Word, Poly>,
}

impl AppellFamily {
    pub fn pair(&self) -> &StatePair {
        &self.pair
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn d(&self) -> usize {
        self.pair.d()
    }

    pub fn get(&self, w: &Word) -> Option<&Poly> {
        self.polys.get(w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Poly)> {
        self.polys.iter()
    }

    /// Replaces one member; used to build deliberately broken families.
    pub fn with_member(mut self, w: Word, p: Poly) -> Self {
        self.polys.insert(w, p);
        self
    }
}

/// A series in `z` whose coefficients are polynomials in `x`; the two
/// alphabets commute with each other.
#[derive(Clone, Debug)]
struct MixedSeries {
    d: usize,
    trunc: usize,
    coeffs: BTreeMap<Word, Poly>,
}

impl MixedSeries {
    fn from_scalar_series(s: &Series) -> Self {
        let coeffs = s
            .terms()
            .map(|(w, c)| (w.clone(), Poly::constant(s.d(), c.clone())))
            .collect();
        MixedSeries {
            d: s.d(),
            trunc: s.trunc(),
            coeffs,
        }
    }

    fn coeff(&self, w: &Word) -> Poly {
        self.coeffs
            .get(w)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.d))
    }

    fn add_term(&mut self, w: Word, p: &Poly) {
        let entry = self.coeffs.entry(w).or_insert_with(|| Poly::zero(p.d()));
        *entry = &*entry + p;
    }

    fn mul(&self, other: &MixedSeries) -> MixedSeries {
        let mut out = MixedSeries {
            d: self.d,
            trunc: self.trunc,
            coeffs: BTreeMap::new(),
        };
        for (a, p) in &self.coeffs {
            for (b, q) in &other.coeffs {
                if a.len() + b.len() <= self.trunc {
                    out.add_term(a.concat(b), &(p * q));
                }
            }
        }
        out.coeffs.retain(|_, p| !p.is_zero());
        out
    }

    /// Inverse of a series with constant coefficient 1.
    fn inverse_unit(&self) -> MixedSeries {
        let mut out: BTreeMap<Word, Poly> = BTreeMap::new();
        out.insert(Word::empty(), Poly::one(self.d));
        for w in words_up_to(self.d, self.trunc).into_iter().skip(1) {
            // t_w = −Σ_{w = a b, a ≠ ∅} s_a t_b
            let mut acc = Poly::zero(self.d);
            for cut in 1..=w.len() {
                let (a, b) = (w.slice(0, cut), w.slice(cut, w.len()));
                if let (Some(sa), Some(tb)) = (self.coeffs.get(&a), out.get(&b)) {
                    acc = &acc - &(sa * tb);
                }
            }
            if !acc.is_zero() {
                out.insert(w, acc);
            }
        }
        MixedSeries {
            d: self.d,
            trunc: self.trunc,
            coeffs: out,
        }
    }
}

fn check_degree(s: &State, k: usize) -> Result<()> {
    if k > s.trunc() {
        return Err(Error::TruncationExceeded {
            needed: k,
            available: s.trunc(),
        });
    }
    Ok(())
}

/// `1 − x·z + R^ψ(z)`, truncated at `k`.
fn resolvent_base(r_psi: &Series, k: usize) -> MixedSeries {
    let d = r_psi.d();
    let mut base = MixedSeries::from_scalar_series(&r_psi.truncated(k));
    base.trunc = k;
    base.add_term(Word::empty(), &Poly::one(d));
    for i in 0..d {
        if k >= 1 {
            base.add_term(Word::letter(i), &-&Poly::var(d, i).expect("in range"));
        }
    }
    base
}

fn family_from_series(pair: StatePair, k: usize, h: &MixedSeries) -> AppellFamily {
    let polys = words_up_to(pair.d(), k).into_iter().map(|w| {
        let p = if w.is_empty() {
            Poly::one(pair.d())
        } else {
            h.coeff(&w)
        };
        (w, p)
    });
    AppellFamily {
        degree: k,
        polys: polys.collect(),
        pair,
    }
}

/// Free Appell polynomials of `ψ`: coefficients of `(1 − x·z + R^ψ(z))^{-1}`.
pub fn free_appell(psi: &State, k: usize) -> Result<AppellFamily> {
    check_degree(psi, k)?;
    let r_psi = free_cumulants(psi);
    let h = resolvent_base(r_psi.series(), k).inverse_unit();
    Ok(family_from_series(
        StatePair::new(psi.clone(), psi.clone())?,
        k,
        &h,
    ))
}

/// c-free Appell polynomials of the pair by the chosen method.
pub fn cfree_appell(pair: &StatePair, k: usize, method: AppellMethod) -> Result<AppellFamily> {
    check_degree(&pair.phi, k)?;
    let r_psi = free_cumulants(&pair.psi).series().truncated(k);
    let r_pair = two_state_cumulants(pair).series().truncated(k);
    match method {
        AppellMethod::GenFun => Ok(appell_genfun(pair, k, &r_psi, &r_pair)),
        AppellMethod::Recursion => Ok(appell_recursion(pair, k, &r_psi, &r_pair)),
        AppellMethod::Explicit => Ok(appell_explicit(pair, k, &r_psi, &r_pair)),
    }
}

fn appell_genfun(pair: &StatePair, k: usize, r_psi: &Series, r_pair: &Series) -> AppellFamily {
    let h_psi = resolvent_base(r_psi, k).inverse_unit();
    let mut numerator = MixedSeries::from_scalar_series(&r_psi.sub(r_pair).expect("same shape"));
    numerator.add_term(Word::empty(), &Poly::one(pair.d()));
    family_from_series(pair.clone(), k, &h_psi.mul(&numerator))
}

// A_{(i,u)} = x_i A_u − Σ_{j<n} R^ψ[i u_1..u_j] A_{u_{j+1}..u_n} − R^{φ,ψ}[i u]
fn appell_recursion(pair: &StatePair, k: usize, r_psi: &Series, r_pair: &Series) -> AppellFamily {
    let d = pair.d();
    let mut polys: BTreeMap<Word, Poly> = BTreeMap::new();
    polys.insert(Word::empty(), Poly::one(d));
    for w in words_up_to(d, k).into_iter().skip(1) {
        let i = w.first().unwrap();
        let u = w.tail();
        let mut p = polys[&u].mul_var_left(i);
        for j in 0..u.len() {
            let c = r_psi.coeff(&w.slice(0, j + 1));
            if !c.is_zero() {
                p.add_scaled(&polys[&u.slice(j, u.len())], &-c);
            }
        }
        p.add_term(Word::empty(), -r_pair.coeff(&w));
        polys.insert(w, p);
    }
    AppellFamily {
        pair: pair.clone(),
        degree: k,
        polys,
    }
}

// Σ_{π ∈ Int(n)} Σ_{S ⊂ Sing(π)} (−1)^{|S^c|} Π_{B ∈ S^c} R_B · Π_{{i} ∈ S} x_i,
// where R_B is R^{φ,ψ} for the class containing n and R^ψ otherwise.
fn appell_explicit(pair: &StatePair, k: usize, r_psi: &Series, r_pair: &Series) -> AppellFamily {
    let d = pair.d();
    let mut polys: BTreeMap<Word, Poly> = BTreeMap::new();
    polys.insert(Word::empty(), Poly::one(d));
    for w in words_up_to(d, k).into_iter().skip(1) {
        let n = w.len();
        let mut p = Poly::zero(d);
        for pi in interval_partitions(n) {
            let singles = pi.singletons();
            for mask in 0u32..(1 << singles.len()) {
                let in_s = |c: usize| {
                    singles
                        .iter()
                        .position(|&s| s == c)
                        .is_some_and(|b| mask & (1 << b) != 0)
                };
                let mut coeff = one();
                let mut positions = Vec::new();
                for (c, class) in pi.classes().iter().enumerate() {
                    if in_s(c) {
                        positions.push(class[0]);
                        continue;
                    }
                    let sub = w.restrict(class);
                    let r = if class.contains(&(n - 1)) {
                        r_pair.coeff(&sub)
                    } else {
                        r_psi.coeff(&sub)
                    };
                    coeff = -(coeff * r);
                    if coeff.is_zero() {
                        break;
                    }
                }
                if !coeff.is_zero() {
                    p.add_term(w.restrict(&positions), coeff);
                }
            }
        }
        polys.insert(w, p);
    }
    AppellFamily {
        pair: pair.clone(),
        degree: k,
        polys,
    }
}

/// Coordinates of `x_u` in the Appell basis: a sum over position subsets
/// `B = {i_1 < .. < i_k}` of `Π_j ψ[gap_j] · φ[tail] · A_{u|B}`.
pub fn monomial_expansion(pair: &StatePair, u: &Word) -> Result<BTreeMap<Word, Scalar>> {
    let n = u.len();
    if n > pair.trunc() {
        return Err(Error::TruncationExceeded {
            needed: n,
            available: pair.trunc(),
        });
    }
    if n >= 64 {
        return Err(Error::InvalidParameter("word too long".into()));
    }
    let mut out: BTreeMap<Word, Scalar> = BTreeMap::new();
    for mask in 0u64..(1u64 << n) {
        let positions: Vec<usize> = (0..n).filter(|&p| mask & (1 << p) != 0).collect();
        let mut coeff = one();
        let mut start = 0;
        for &p in &positions {
            coeff *= pair.psi.moment(&u.slice(start, p))?;
            if coeff.is_zero() {
                break;
            }
            start = p + 1;
        }
        if coeff.is_zero() {
            continue;
        }
        coeff *= pair.phi.moment(&u.slice(start, n))?;
        if coeff.is_zero() {
            continue;
        }
        let key = u.restrict(&positions);
        let e = out.entry(key).or_insert_with(Scalar::zero);
        *e += coeff;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Which characterizing property failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AppellLaw {
    Monic,
    /// `φ[A_u] = 0`.
    Centered,
    /// `(ψ ⊗ I) ∂_j A_u = δ_{j,u(1)} A_{u(2..)}`.
    LeftPsi,
    /// `(I ⊗ φ) ∂_j A_u = δ_{j,u(n)} A^ψ_{u(..n−1)}`.
    RightPhi,
    /// `∂_j A_u = Σ_{p : u(p) = j} A^ψ_{u(<p)} ⊗ A_{u(>p)}`.
    Derivative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub word: Word,
    pub law: AppellLaw,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharacterizationReport {
    pub words_checked: usize,
    pub violations: Vec<Violation>,
}

impl CharacterizationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every member of the family against the defining properties.
pub fn check_characterizations(fam: &AppellFamily) -> Result<CharacterizationReport> {
    let (phi, psi) = (&fam.pair.phi, &fam.pair.psi);
    let d = fam.d();
    let free = free_appell(psi, fam.degree)?;
    let mut report = CharacterizationReport::default();
    for (u, a) in &fam.polys {
        report.words_checked += 1;
        let mut flag = |law| {
            report.violations.push(Violation {
                word: u.clone(),
                law,
            })
        };
        if !a.is_monic_with_leading(u) {
            flag(AppellLaw::Monic);
        }
        if u.is_empty() {
            continue;
        }
        if !phi.apply(a)?.is_zero() {
            flag(AppellLaw::Centered);
        }
        let n = u.len();
        let (mut left_ok, mut right_ok, mut deriv_ok) = (true, true, true);
        for j in 0..d {
            let da = a.diff_quotient(j)?;
            let left = apply_state_partial(Side::Left, psi, &da)?;
            let expect_left = if u.first() == Some(j) {
                fam.polys[&u.tail()].clone()
            } else {
                Poly::zero(d)
            };
            left_ok &= left == expect_left;
            let right = apply_state_partial(Side::Right, phi, &da)?;
            let expect_right = if u.last() == Some(j) {
                free.polys[&u.init()].clone()
            } else {
                Poly::zero(d)
            };
            right_ok &= right == expect_right;
            let mut expect = TensorPoly::zero(d);
            for p in (0..n).filter(|&p| u.get(p) == j) {
                let t =
                    TensorPoly::tensor(&free.polys[&u.slice(0, p)], &fam.polys[&u.slice(p + 1, n)]);
                expect = &expect + &t;
            }
            deriv_ok &= da == expect;
        }
        if !left_ok {
            flag(AppellLaw::LeftPsi);
        }
        if !right_ok {
            flag(AppellLaw::RightPhi);
        }
        if !deriv_ok {
            flag(AppellLaw::Derivative);
        }
    }
    Ok(report)
}

/// `⟨A_u, A_v⟩_φ` over all words of degree `≤ k`, in `words_up_to` order.
pub fn appell_gram(pair: &StatePair, k: usize) -> Result<Matrix> {
    if 2 * k > pair.trunc() {
        return Err(Error::TruncationExceeded {
            needed: 2 * k,
            available: pair.trunc(),
        });
    }
    let fam = cfree_appell(pair, k, AppellMethod::Recursion)?;
    let words = words_up_to(pair.d(), k);
    let g = gram_matrix(&pair.phi, k)?;
    let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(a, w)| (w, a)).collect();
    let coords: Vec<Vec<(usize, Scalar)>> = words
        .iter()
        .map(|w| {
            fam.polys[w]
                .terms()
                .map(|(v, c)| (index[v], c.clone()))
                .collect()
        })
        .collect();
    let mut out = Matrix::zeros(words.len(), words.len());
    for a in 0..words.len() {
        for b in a..words.len() {
            let mut acc = Scalar::zero();
            for (r, x) in &coords[a] {
                for (c, y) in &coords[b] {
                    acc += x * y * g.get(*r, *c);
                }
            }
            out.set(a, b, acc.clone());
            out.set(b, a, acc);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalityReport {
    /// Every `A_u` with `|u| ≥ 2` is orthogonal to the degree-one `A_i`,
    /// equivalently `R^{φ,ψ}(z) = Σ z_i²`.
    pub degree_one_orthogonal: bool,
    /// The whole family is orthogonal: additionally
    /// `R^ψ(z) = Σ (b_i z_i + (1 + c_i) z_i²)`.
    pub fully_orthogonal: bool,
    /// `(b_i, c_i)` when fully orthogonal.
    pub meixner_params: Option<(Vec<Scalar>, Vec<Scalar>)>,
}

/// Decides orthogonality from the cumulant series. `φ` must have mean zero
/// and identity covariance. When the family is orthogonal, `φ` is also
/// checked to satisfy the free Meixner equation with the same parameters.
pub fn orthogonality_report(pair: &StatePair) -> Result<OrthogonalityReport> {
    require_normalized(&pair.phi)?;
    let (d, n) = (pair.d(), pair.trunc());
    let r_pair = two_state_cumulants(pair);
    let r_psi = free_cumulants(&pair.psi);
    let is_square = |w: &Word| w.len() == 2 && w.get(0) == w.get(1);
    let degree_one = r_pair
        .series()
        .terms()
        .all(|(w, c)| is_square(w) && c.is_one())
        && (0..d).all(|i| n < 2 || r_pair.coeff(&Word::new(vec![i as u8, i as u8])).is_one());
    let quadratic = r_psi
        .series()
        .terms()
        .all(|(w, _)| w.len() == 1 || is_square(w));
    if !(degree_one && quadratic) {
        return Ok(OrthogonalityReport {
            degree_one_orthogonal: degree_one,
            fully_orthogonal: false,
            meixner_params: None,
        });
    }
    let b: Vec<Scalar> = (0..d).map(|i| r_psi.coeff(&Word::letter(i))).collect();
    let c: Vec<Scalar> = (0..d)
        .map(|i| r_psi.coeff(&Word::new(vec![i as u8, i as u8])) - one())
        .collect();
    if n >= 4 {
        let fit = is_free_meixner(&pair.phi)?.ok_or_else(|| {
            Error::Precondition("orthogonal family but the free Meixner equation fails".into())
        })?;
        for i in 0..d {
            for j in 0..d {
                let ok_c = *fit.c.get(i, j) == c[i];
                let ok_b = (0..d)
                    .all(|l| fit.b[i][j][l] == if l == j { b[i].clone() } else { Scalar::zero() });
                if !(ok_b && ok_c) {
                    return Err(Error::Precondition(
                        "free Meixner parameters disagree with the cumulant fit".into(),
                    ));
                }
            }
        }
    }
    Ok(OrthogonalityReport {
        degree_one_orthogonal: true,
        fully_orthogonal: true,
        meixner_params: Some((b, c)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::{mops, second_kind};
    use crate::scalar::{frac, int};
    use crate::states::{named_state, phi_map, NamedState};

    fn x(d: usize, letters: &[u8]) -> Poly {
        Poly::monomial(d, Word::new(letters.to_vec()))
    }

    fn pair_2d() -> StatePair {
        // Two arbitrary reversal-symmetric states in two variables.
        let mk = |seed: i64| {
            let mut terms = Vec::new();
            for w in words_up_to(2, 4).into_iter().skip(1) {
                let r = w.reversed();
                let key = if r < w { r } else { w.clone() };
                let h = key
                    .letters()
                    .iter()
                    .fold(seed, |acc, &l| acc * 3 + l as i64 + 1);
                terms.push((w, frac(h % 7 - 3, 1 + (h % 3))));
            }
            State::new(2, 4, terms).unwrap()
        };
        StatePair::new(mk(5), mk(11)).unwrap()
    }

    #[test]
    fn free_appell_examples() {
        let fam = free_appell(&State::delta_zero(2, 4), 4).unwrap();
        for (w, p) in fam.iter() {
            assert_eq!(p, &Poly::monomial(2, w.clone()));
        }
        let sc = named_state(
            &NamedState::Semicircle {
                mean: int(0),
                variance: int(1),
            },
            6,
        )
        .unwrap();
        let fam = free_appell(&sc, 4).unwrap();
        let a2 = Poly::from_terms(
            1,
            [(Word::new(vec![0, 0]), int(1)), (Word::empty(), int(-1))],
        )
        .unwrap();
        assert_eq!(fam.get(&Word::new(vec![0, 0])), Some(&a2));
        assert!(check_characterizations(&fam).unwrap().passed());
    }

    #[test]
    fn low_order_examples() {
        let pair = pair_2d();
        let r_psi = free_cumulants(&pair.psi);
        let r_pair = two_state_cumulants(&pair);
        let rp = |l: &[u8]| r_psi.coeff(&Word::new(l.to_vec()));
        let rq = |l: &[u8]| r_pair.coeff(&Word::new(l.to_vec()));
        let fam = cfree_appell(&pair, 3, AppellMethod::GenFun).unwrap();
        let mut a1 = x(2, &[0]);
        a1.add_term(Word::empty(), -rq(&[0]));
        assert_eq!(fam.get(&Word::new(vec![0])), Some(&a1));
        // X1X2 − X1 R^{φψ}[X2] − R^ψ[X1] X2 + R^ψ[X1] R^{φψ}[X2] − R^{φψ}[X1,X2]
        let mut a12 = x(2, &[0, 1]);
        a12.add_scaled(&x(2, &[0]), &-rq(&[1]));
        a12.add_scaled(&x(2, &[1]), &-rp(&[0]));
        a12.add_term(Word::empty(), rp(&[0]) * rq(&[1]) - rq(&[0, 1]));
        assert_eq!(fam.get(&Word::new(vec![0, 1])), Some(&a12));
    }

    #[test]
    fn three_methods_agree() {
        let pair = pair_2d();
        let g = cfree_appell(&pair, 4, AppellMethod::GenFun).unwrap();
        assert_eq!(g, cfree_appell(&pair, 4, AppellMethod::Recursion).unwrap());
        assert_eq!(g, cfree_appell(&pair, 4, AppellMethod::Explicit).unwrap());
        let report = check_characterizations(&g).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.words_checked, 31);
    }

    #[test]
    fn specializations() {
        let pair = pair_2d();
        let same = StatePair::new(pair.psi.clone(), pair.psi.clone()).unwrap();
        assert_eq!(
            cfree_appell(&same, 4, AppellMethod::Explicit).unwrap(),
            free_appell(&pair.psi, 4).unwrap()
        );
        // ψ = δ0: (1 − x·z)^{-1} (1 − η^φ(z))
        let boolean = StatePair::new(pair.phi.clone(), State::delta_zero(2, 4)).unwrap();
        let fam = cfree_appell(&boolean, 4, AppellMethod::Recursion).unwrap();
        let eta = crate::states::boolean_cumulants(&pair.phi);
        for (w, p) in fam.iter() {
            let mut expect = Poly::monomial(2, w.clone());
            for cut in 0..w.len() {
                expect.add_term(w.slice(0, cut), -eta.coeff(&w.slice(cut, w.len())));
            }
            assert_eq!(p, &expect);
        }
        let monomials = StatePair::new(State::delta_zero(2, 3), State::delta_zero(2, 3)).unwrap();
        let fam = cfree_appell(&monomials, 3, AppellMethod::GenFun).unwrap();
        assert!(fam.iter().all(|(w, p)| *p == Poly::monomial(2, w.clone())));
        assert!(check_characterizations(&fam).unwrap().passed());
    }

    #[test]
    fn monomial_expansion_examples() {
        let pair = pair_2d();
        let fam = cfree_appell(&pair, 4, AppellMethod::Recursion).unwrap();
        let e = monomial_expansion(&pair, &Word::letter(1)).unwrap();
        assert_eq!(e.get(&Word::letter(1)), Some(&one()));
        assert_eq!(
            e.get(&Word::empty()).cloned().unwrap_or_else(Scalar::zero),
            pair.phi.moment(&Word::letter(1)).unwrap()
        );
        for u in words_up_to(2, 4) {
            let mut back = Poly::zero(2);
            for (w, c) in monomial_expansion(&pair, &u).unwrap() {
                back.add_scaled(fam.get(&w).unwrap(), &c);
            }
            assert_eq!(back, Poly::monomial(2, u));
        }
    }

    #[test]
    fn perturbed_family_fails_at_that_word() {
        let pair = pair_2d();
        let fam = cfree_appell(&pair, 3, AppellMethod::GenFun).unwrap();
        let w = Word::new(vec![1, 0, 1]);
        let mut p = fam.get(&w).unwrap().clone();
        p.add_term(Word::letter(0), one());
        let broken = fam.with_member(w.clone(), p);
        let report = check_characterizations(&broken).unwrap();
        assert!(!report.passed());
        assert!(report.violations.iter().all(|v| v.word == w));
    }

    #[test]
    fn gram_and_orthogonality() {
        let psi = named_state(
            &NamedState::FreeSemicircles {
                means: vec![int(1), frac(-1, 2)],
                variances: vec![int(2), frac(1, 2)],
            },
            6,
        )
        .unwrap();
        let pair = StatePair::new(phi_map(&psi), psi).unwrap();
        let report = orthogonality_report(&pair).unwrap();
        assert!(report.fully_orthogonal);
        assert_eq!(
            report.meixner_params,
            Some((vec![int(1), frac(-1, 2)], vec![int(1), frac(-1, 2)]))
        );
        let g = appell_gram(&pair, 3).unwrap();
        assert!(g.is_diagonal());

        let sc = named_state(
            &NamedState::Semicircle {
                mean: int(0),
                variance: int(1),
            },
            8,
        )
        .unwrap();
        let sc_pair = StatePair::new(sc.clone(), sc).unwrap();
        let r = orthogonality_report(&sc_pair).unwrap();
        assert_eq!(r.meixner_params, Some((vec![int(0)], vec![int(0)])));

        // Free Poisson-like ψ with a nonzero third free cumulant.
        let mut r3 = Series::zero(1, 8);
        for k in 1..=3 {
            r3.add_term(Word::new(vec![0; k]), one());
        }
        let psi = crate::states::moments_from_cumulants(
            &crate::states::CumulantSeries::new(crate::states::CumulantKind::Free, r3).unwrap(),
            None,
        )
        .unwrap();
        let pair = StatePair::new(phi_map(&psi), psi).unwrap();
        let r = orthogonality_report(&pair).unwrap();
        assert!(r.degree_one_orthogonal && !r.fully_orthogonal);
        let g = appell_gram(&pair, 3).unwrap();
        assert!(!g.is_diagonal());
    }

    #[test]
    fn degree_one_inner_products_are_cumulants() {
        let pair = pair_2d();
        let g = appell_gram(&pair, 2).unwrap();
        let r = two_state_cumulants(&pair);
        let words = words_up_to(2, 2);
        for (a, w) in words.iter().enumerate() {
            if w.len() != 1 {
                continue;
            }
            for (b, u) in words.iter().enumerate().skip(1) {
                assert_eq!(g.get(a, b), &r.coeff(&w.concat(u)));
            }
        }
    }

    #[test]
    fn orthogonal_family_is_mops_with_second_kind_link() {
        let psi = named_state(
            &NamedState::FreeSemicircles {
                means: vec![int(1), int(0)],
                variances: vec![int(1), int(2)],
            },
            8,
        )
        .unwrap();
        let phi = phi_map(&psi);
        let pair = StatePair::new(phi.clone(), psi.clone()).unwrap();
        let fam = cfree_appell(&pair, 4, AppellMethod::GenFun).unwrap();
        let p = mops(&phi, 4).unwrap().unwrap();
        for (w, a) in fam.iter() {
            assert_eq!(p.get(w), Some(a));
        }
        let q = second_kind(&p, &phi).unwrap();
        let free = free_appell(&psi, 3).unwrap();
        for (w, a) in free.iter() {
            assert_eq!(q.get(w), Some(a));
        }
    }
}
