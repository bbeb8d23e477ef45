//! Orthogonal polynomials: one-variable Jacobi parameters, the three-term
//! recursion, polynomials of the second kind, and monic orthogonal
//! polynomial systems (MOPS) in several non-commuting variables together
//! with their matricial recursion coefficients.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ncpoly::{apply_state_partial, Poly, Side};
use crate::scalar::{one, Scalar};
use crate::states::{
    boolean_cumulants, gram_matrix, is_positive, phi_map, require_normalized, State,
};
use crate::word::{words_of_length, words_up_to, Word};

/// Recursion coefficients `x P_n = P_{n+1} + β_n P_n + γ_n P_{n−1}`.
///
/// `beta = (β_0, β_1, ..)`, `gamma = (γ_1, γ_2, ..)`. A terminated sequence
/// has `γ_k = 0`; it stores `γ_1 .. γ_{k−1}` (all positive) and `β_0 .. β_{k−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiParams {
    beta: Vec<Scalar>,
    gamma: Vec<Scalar>,
    termination: Option<usize>,
}

impl JacobiParams {
    /// The first zero in `gamma` marks termination; every later entry must
    /// also be zero. Negative entries are rejected.
    pub fn new(beta: Vec<Scalar>, gamma: Vec<Scalar>) -> Result<Self> {
        if let Some(g) = gamma.iter().find(|g| g.is_negative()) {
            return Err(Error::NotPositive(format!(
                "negative Jacobi parameter gamma = {g}"
            )));
        }
        let first_zero = gamma.iter().position(|g| g.is_zero());
        let (mut beta, mut gamma, termination) = (beta, gamma, first_zero.map(|p| p + 1));
        if let Some(p) = first_zero {
            if gamma[p..].iter().any(|g| !g.is_zero()) {
                return Err(Error::InvalidParameter(
                    "gamma must stay zero after its first zero".into(),
                ));
            }
            gamma.truncate(p);
            beta.truncate(p + 1);
        }
        Ok(JacobiParams {
            beta,
            gamma,
            termination,
        })
    }

    pub fn beta(&self) -> &[Scalar] {
        &self.beta
    }

    pub fn gamma(&self) -> &[Scalar] {
        &self.gamma
    }

    /// `Some(k)` when `γ_k = 0`, i.e. the measure has `k` atoms.
    pub fn termination(&self) -> Option<usize> {
        self.termination
    }

    /// `β_h`, or an error when it was not supplied.
    fn beta_at(&self, h: usize) -> Result<Scalar> {
        self.beta
            .get(h)
            .cloned()
            .ok_or_else(|| insufficient("beta", h))
    }

    /// `γ_h` for `h ≥ 1`; zero at and after termination.
    fn gamma_at(&self, h: usize) -> Result<Scalar> {
        if let Some(k) = self.termination {
            if h >= k {
                return Ok(Scalar::zero());
            }
        }
        self.gamma
            .get(h - 1)
            .cloned()
            .ok_or_else(|| insufficient("gamma", h))
    }

    /// Drops `β_0` and `γ_1`.
    pub fn strip(&self) -> Result<JacobiParams> {
        if self.beta.is_empty() || (self.gamma.is_empty() && self.termination != Some(1)) {
            return Err(Error::InvalidParameter("nothing to strip".into()));
        }
        if self.termination == Some(1) {
            return Err(Error::InvalidParameter(
                "a one-point measure has no stripped measure".into(),
            ));
        }
        Ok(JacobiParams {
            beta: self.beta[1..].to_vec(),
            gamma: self.gamma[1..].to_vec(),
            termination: self.termination.map(|k| k - 1),
        })
    }

    /// Prepends `β = 0` and `γ = 1`.
    pub fn unstrip(&self) -> JacobiParams {
        let mut beta = vec![Scalar::zero()];
        beta.extend(self.beta.iter().cloned());
        let mut gamma = vec![one()];
        gamma.extend(self.gamma.iter().cloned());
        JacobiParams {
            beta,
            gamma,
            termination: self.termination.map(|k| k + 1),
        }
    }
}

fn insufficient(which: &str, h: usize) -> Error {
    Error::InvalidParameter(format!(
        "insufficient Jacobi parameters: {which}_{h} missing"
    ))
}

fn power(n: usize) -> Word {
    Word::new(vec![0; n])
}

fn require_one_variable(s: &State) -> Result<()> {
    if s.d() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: s.d(),
        });
    }
    Ok(())
}

/// Gram–Schmidt on `1, x, x², ..` as far as the moments allow, stopping at
/// the first polynomial of zero norm.
pub fn jacobi_from_moments(s: &State) -> Result<JacobiParams> {
    require_one_variable(s)?;
    let n = s.trunc();
    let mut beta: Vec<Scalar> = Vec::new();
    let mut gamma: Vec<Scalar> = Vec::new();
    let mut prev = Poly::zero(1);
    let mut cur = Poly::one(1);
    let mut norm = one();
    let mut level = 0;
    loop {
        if 2 * level + 1 > n {
            break;
        }
        let xp = cur.mul_var_left(0);
        let b = s.inner(&cur, &xp)? / &norm;
        beta.push(b.clone());
        if 2 * level + 2 > n {
            break;
        }
        let g = if level == 0 {
            Scalar::zero()
        } else {
            gamma[level - 1].clone()
        };
        let next = &(&xp - &cur.scale(&b)) - &prev.scale(&g);
        let next_norm = s.inner(&next, &next)?;
        if next_norm.is_negative() {
            return Err(Error::NotPositive(format!(
                "polynomial of degree {} has negative norm",
                level + 1
            )));
        }
        let ratio = &next_norm / &norm;
        gamma.push(ratio);
        if next_norm.is_zero() {
            break;
        }
        prev = cur;
        cur = next;
        norm = next_norm;
        level += 1;
    }
    JacobiParams::new(beta, gamma)
}

/// Moments `⟨e_0, J^n e_0⟩` of the tridiagonal operator, as weighted Motzkin
/// paths: up steps weigh 1, level steps at height `h` weigh `β_h`, down
/// steps from `h` weigh `γ_h`.
pub fn moments_from_jacobi(j: &JacobiParams, trunc: usize) -> Result<State> {
    let cap = j.termination.map(|k| k - 1).unwrap_or(usize::MAX);
    let mut f: Vec<Scalar> = vec![one()];
    let mut moments = Vec::with_capacity(trunc);
    for n in 1..=trunc {
        let top = n.min(trunc - n).min(cap);
        let mut g = vec![Scalar::zero(); top + 1];
        for (h, gh) in g.iter_mut().enumerate() {
            let mut acc = Scalar::zero();
            if h >= 1 {
                if let Some(v) = f.get(h - 1) {
                    acc += v;
                }
            }
            if let Some(v) = f.get(h) {
                if !v.is_zero() {
                    acc += j.beta_at(h)? * v;
                }
            }
            if let Some(v) = f.get(h + 1) {
                if !v.is_zero() {
                    acc += j.gamma_at(h + 1)? * v;
                }
            }
            *gh = acc;
        }
        moments.push((power(n), g[0].clone()));
        f = g;
    }
    State::new(1, trunc, moments)
}

/// `P_0, .., P_n` from the three-term recursion.
pub fn polys_from_jacobi(j: &JacobiParams, n: usize) -> Result<Vec<Poly>> {
    let mut out = vec![Poly::one(1)];
    let mut prev = Poly::zero(1);
    for m in 0..n {
        let cur = out[m].clone();
        let g = if m == 0 {
            Scalar::zero()
        } else {
            j.gamma_at(m)?
        };
        let next = &(&cur.mul_var_left(0) - &cur.scale(&j.beta_at(m)?)) - &prev.scale(&g);
        prev = cur;
        out.push(next);
    }
    Ok(out)
}

/// Whether `1 − (1 + M^μ)^{-1} = z² (1 + M^ν)` through degree `N`, i.e. `μ = Φ[ν]`.
pub fn check_mgf_strip_relation(mu: &State, nu: &State) -> Result<bool> {
    require_one_variable(mu)?;
    require_one_variable(nu)?;
    let n = mu.trunc().min(nu.trunc() + 2);
    let eta = boolean_cumulants(mu);
    for k in 1..=n {
        let rhs = if k >= 2 {
            nu.moment(&power(k - 2))?
        } else {
            Scalar::zero()
        };
        if eta.coeff(&power(k)) != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Monic polynomials indexed by words, `P_w = x_w + lower-degree terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFamily {
    d: usize,
    polys: BTreeMap<Word, Poly>,
}

impl PolyFamily {
    pub fn new(d: usize, polys: BTreeMap<Word, Poly>) -> Result<Self> {
        for (w, p) in &polys {
            if p.d() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.d(),
                });
            }
            if !p.is_monic_with_leading(w) {
                return Err(Error::InvalidParameter(format!(
                    "P_{w} is not monic with leading word {w}"
                )));
            }
        }
        Ok(PolyFamily { d, polys })
    }

    /// A one-variable family `P_0, P_1, ..` indexed by `x^n`.
    pub fn from_sequence(polys: Vec<Poly>) -> Result<Self> {
        Self::new(
            1,
            polys
                .into_iter()
                .enumerate()
                .map(|(n, p)| (power(n), p))
                .collect(),
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, w: &Word) -> Option<&Poly> {
        self.polys.get(w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Poly)> {
        self.polys.iter()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.polys.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Coordinates of `f` in this basis; the family must contain every word
    /// up to `deg f`.
    pub fn expand(&self, f: &Poly) -> Result<BTreeMap<Word, Scalar>> {
        let mut rest = f.clone();
        let mut out = BTreeMap::new();
        let top = f.degree().unwrap_or(0);
        for n in (0..=top).rev() {
            for w in words_of_length(self.d, n) {
                let c = rest.coeff(&w);
                if c.is_zero() {
                    continue;
                }
                let p = self.polys.get(&w).ok_or_else(|| {
                    Error::InvalidParameter(format!("basis has no polynomial for {w}"))
                })?;
                rest.add_scaled(p, &(-c.clone()));
                out.insert(w, c);
            }
        }
        Ok(out)
    }
}

/// Second-kind family: `Q_u = (I ⊗ μ) ∂_1 P_{(u,1)}` for every `(u,1)` in `P`.
/// In one variable this is `Q_{n−1} = (I ⊗ μ)[∂ P_n]`.
pub fn second_kind(p: &PolyFamily, mu: &State) -> Result<PolyFamily> {
    if p.d != mu.d() {
        return Err(Error::DimensionMismatch {
            expected: p.d,
            found: mu.d(),
        });
    }
    let mut out = BTreeMap::new();
    for (w, poly) in &p.polys {
        if w.last() == Some(0) {
            out.insert(
                w.init(),
                apply_state_partial(Side::Right, mu, &poly.diff_quotient(0)?)?,
            );
        }
    }
    PolyFamily::new(p.d, out)
}

/// The candidate MOPS: each `x_u` minus its orthogonal projection onto
/// polynomials of lower degree (zero-norm polynomials are skipped). Returns
/// `None` when two distinct polynomials of equal degree are not orthogonal.
pub fn mops(s: &State, k: usize) -> Result<Option<PolyFamily>> {
    if 2 * k > s.trunc() {
        return Err(Error::TruncationExceeded {
            needed: 2 * k,
            available: s.trunc(),
        });
    }
    if !is_positive(s, k)? {
        return Err(Error::NotPositive(format!(
            "Gram matrix to degree {k} is not positive semidefinite"
        )));
    }
    let d = s.d();
    let words = words_up_to(d, k);
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(a, w)| (w, a)).collect();
    let g = gram_matrix(s, k)?;
    let size = words.len();
    let mat_vec = |c: &[Scalar]| -> Vec<Scalar> {
        (0..size)
            .map(|r| {
                let mut acc = Scalar::zero();
                for (col, x) in c.iter().enumerate() {
                    if !x.is_zero() {
                        acc += g.get(r, col) * x;
                    }
                }
                acc
            })
            .collect()
    };
    let dot = |a: &[Scalar], b: &[Scalar]| -> Scalar {
        a.iter()
            .zip(b)
            .filter(|(x, _)| !x.is_zero())
            .fold(Scalar::zero(), |acc, (x, y)| acc + x * y)
    };
    let mut coeffs: Vec<Vec<Scalar>> = Vec::with_capacity(size);
    let mut images: Vec<Vec<Scalar>> = Vec::with_capacity(size);
    let mut norms: Vec<Scalar> = Vec::with_capacity(size);
    let mut level_start = 0;
    for (a, u) in words.iter().enumerate() {
        if a > 0 && u.len() != words[a - 1].len() {
            level_start = a;
        }
        let mut c = vec![Scalar::zero(); size];
        c[a] = one();
        for b in 0..level_start {
            if norms[b].is_zero() {
                continue;
            }
            // ⟨P_v, x_u⟩ = (G c_v)[u]
            let f = &images[b][index[u]] / &norms[b];
            if f.is_zero() {
                continue;
            }
            for (x, y) in c.iter_mut().zip(&coeffs[b]) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let img = mat_vec(&c);
        let nrm = dot(&c, &img);
        for b in level_start..a {
            if !dot(&coeffs[b], &img).is_zero() {
                return Ok(None);
            }
        }
        coeffs.push(c);
        images.push(img);
        norms.push(nrm);
    }
    let mut polys = BTreeMap::new();
    for (w, c) in words.iter().zip(coeffs) {
        let p = Poly::from_terms(
            d,
            words.iter().cloned().zip(c).filter(|(_, x)| !x.is_zero()),
        )?;
        polys.insert(w.clone(), p);
    }
    Ok(Some(PolyFamily { d, polys }))
}

/// Recursion coefficients of one degree `n`:
/// `x_i P_u = P_{(i,u)} + Σ_v Δ_{i,v,u} P_v + δ_{i,u(1)} Γ_u P_{u(2..)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatricialLevel {
    /// The words of length `n`, in the order used for matrix indices.
    pub words: Vec<Word>,
    /// `delta[i]`: rows `v`, columns `u`.
    pub delta: Vec<Matrix>,
    /// `Γ_u` per word; empty at degree 0.
    pub gamma: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatricialJacobi {
    pub d: usize,
    pub levels: Vec<MatricialLevel>,
}

impl MatricialJacobi {
    /// `Γ` at degree `n` as a diagonal matrix.
    pub fn gamma_matrix(&self, n: usize) -> Matrix {
        let g = &self.levels[n].gamma;
        let mut m = Matrix::zeros(g.len(), g.len());
        for (a, x) in g.iter().enumerate() {
            m.set(a, a, x.clone());
        }
        m
    }
}

/// Expands `x_i P_u` in the MOPS basis for all `|u| ≤ k` and checks that only
/// the three permitted degrees occur. Needs moments to degree `2k + 2`.
pub fn matricial_params(s: &State, k: usize) -> Result<MatricialJacobi> {
    let family = mops(s, k + 1)?.ok_or_else(|| {
        Error::Precondition("state has no monic orthogonal polynomial system".into())
    })?;
    matricial_params_of(&family, k)
}

fn matricial_params_of(family: &PolyFamily, k: usize) -> Result<MatricialJacobi> {
    let d = family.d;
    let mut levels = Vec::with_capacity(k + 1);
    for n in 0..=k {
        let words = words_of_length(d, n);
        let pos: HashMap<&Word, usize> = words.iter().enumerate().map(|(a, w)| (w, a)).collect();
        let mut delta = vec![Matrix::zeros(words.len(), words.len()); d];
        let mut gamma = if n == 0 {
            Vec::new()
        } else {
            vec![Scalar::zero(); words.len()]
        };
        for (col, u) in words.iter().enumerate() {
            let pu = family.get(u).expect("family covers degree k + 1");
            for (i, delta_i) in delta.iter_mut().enumerate() {
                let expansion = family.expand(&pu.mul_var_left(i))?;
                let lead = u.prepend(i);
                for (w, c) in expansion {
                    if w == lead {
                        continue;
                    }
                    if w.len() == n {
                        delta_i.set(pos[&w], col, c);
                    } else if n >= 1 && u.first() == Some(i) && w == u.tail() {
                        gamma[col] = c;
                    } else {
                        return Err(Error::ThreeTermViolation(format!(
                            "x{} P_{u} has coefficient {c} on P_{w}",
                            i + 1
                        )));
                    }
                }
            }
        }
        levels.push(MatricialLevel {
            words,
            delta,
            gamma,
        });
    }
    Ok(MatricialJacobi { d, levels })
}

/// Outcome of the three equivalent conditions relating `φ` and `ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpsReport {
    /// `φ = Φ[ψ]`.
    pub a_holds: bool,
    /// `Δ^{(0)} = 0`, `Γ^{(1)} = I`, and higher levels are `ψ`'s shifted by one
    /// degree, tensored with the identity on the last letter.
    pub b_holds: bool,
    /// `(I ⊗ φ) ∂_j P_{(u,m)} = δ_{jm} Q_u` with `Q` the MOPS of `ψ`.
    pub c_holds: bool,
}

/// Evaluates the three conditions through degree `k` (moments to `2k + 2`).
/// `φ` must have mean zero and identity covariance, and both states must
/// have a MOPS.
pub fn check_ops_second_kind(phi: &State, psi: &State, k: usize) -> Result<OpsReport> {
    if phi.d() != psi.d() {
        return Err(Error::DimensionMismatch {
            expected: phi.d(),
            found: psi.d(),
        });
    }
    if phi.trunc() != psi.trunc() {
        return Err(Error::TruncationMismatch {
            left: phi.trunc(),
            right: psi.trunc(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    require_normalized(phi)?;
    let no_mops = || Error::Precondition("state has no monic orthogonal polynomial system".into());
    let p = mops(phi, k + 1)?.ok_or_else(no_mops)?;
    let q = mops(psi, k)?.ok_or_else(no_mops)?;
    let a_holds = *phi == phi_map(psi);
    let b_holds = shift_structure(
        &matricial_params_of(&p, k)?,
        &matricial_params_of(&q, k - 1)?,
    );
    let mut c_holds = true;
    'outer: for (w, pw) in p.iter() {
        if w.is_empty() || w.len() > k {
            continue;
        }
        let (u, m) = (w.init(), w.last().unwrap());
        for j in 0..phi.d() {
            let lhs = apply_state_partial(Side::Right, phi, &pw.diff_quotient(j)?)?;
            let rhs = if j == m {
                q.get(&u).cloned().unwrap()
            } else {
                Poly::zero(phi.d())
            };
            if lhs != rhs {
                c_holds = false;
                break 'outer;
            }
        }
    }
    Ok(OpsReport {
        a_holds,
        b_holds,
        c_holds,
    })
}

fn shift_structure(phi: &MatricialJacobi, psi: &MatricialJacobi) -> bool {
    let d = phi.d;
    if phi.levels[0].delta.iter().any(|m| !m.is_zero()) {
        return false;
    }
    for n in 1..phi.levels.len() {
        let level = &phi.levels[n];
        let lower = &psi.levels[n - 1];
        let lower_pos: HashMap<&Word, usize> = lower
            .words
            .iter()
            .enumerate()
            .map(|(a, w)| (w, a))
            .collect();
        for (col, w) in level.words.iter().enumerate() {
            let (u, m) = (w.init(), w.last().unwrap());
            let expect_gamma = if n == 1 {
                one()
            } else {
                lower.gamma[lower_pos[&u]].clone()
            };
            if level.gamma[col] != expect_gamma {
                return false;
            }
            for (row, v) in level.words.iter().enumerate() {
                let (vv, km) = (v.init(), v.last().unwrap());
                for i in 0..d {
                    let expect = if km == m {
                        lower.delta[i].get(lower_pos[&vv], lower_pos[&u]).clone()
                    } else {
                        Scalar::zero()
                    };
                    if *level.delta[i].get(row, col) != expect {
                        return false;
                    }
                }
            }
        }
    }
    true
}
