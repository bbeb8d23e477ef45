//! A finite model of the two-state Fock space: point-mass test algebras,
//! the operators `X(f)`, c-free Kailath–Segall polynomials `W`, and checks
//! of the factorization and martingale properties of c-free Appell
//! polynomials, including processes on a time grid.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};

use crate::appell::{cfree_appell, free_appell, AppellMethod};
use crate::error::{Error, Result};
use crate::ncpoly::Poly;
use crate::ncseries::Series;
use crate::orthopoly::{moments_from_jacobi, mops, JacobiParams};
use crate::partitions::{
    interval_partitions, noncrossing_classified, ClassRole, OuterRelation, SetPartition,
    MAX_ENUMERATION_SIZE,
};
use crate::scalar::{one, Scalar};
use crate::states::{moments_from_cumulants, CumulantKind, CumulantSeries, State, StatePair};
use crate::word::{words_up_to, Word};

/// Functions on a finite set of points with pointwise product, and two
/// nonnegative point-mass functionals `μ`, `ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestAlgebra {
    points: Vec<String>,
    mu: Vec<Scalar>,
    nu: Vec<Scalar>,
}

/// An element of a [`TestAlgebra`]: one value per point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    values: Vec<Scalar>,
}

impl Element {
    pub fn new(values: Vec<Scalar>) -> Self {
        Element { values }
    }

    pub fn zero(m: usize) -> Self {
        Element {
            values: vec![Scalar::zero(); m],
        }
    }

    /// The indicator of one point.
    pub fn basis(m: usize, p: usize) -> Self {
        let mut e = Element::zero(m);
        e.values[p] = one();
        e
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn at(&self, p: usize) -> &Scalar {
        &self.values[p]
    }

    pub fn mul(&self, other: &Element) -> Element {
        Element {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        Element {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        Element {
            values: self.values.iter().map(|a| a * c).collect(),
        }
    }

    /// Points where the element is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&p| !self.values[p].is_zero())
            .collect()
    }
}

impl TestAlgebra {
    pub fn new(points: Vec<String>, mu: Vec<Scalar>, nu: Vec<Scalar>) -> Result<Self> {
        if mu.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: mu.len(),
            });
        }
        if nu.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: nu.len(),
            });
        }
        if mu.iter().chain(&nu).any(|w| w.is_negative()) {
            return Err(Error::NotPositive(
                "point weights must be nonnegative".into(),
            ));
        }
        Ok(TestAlgebra { points, mu, nu })
    }

    /// Points labelled `p1, p2, ..`.
    pub fn unlabeled(mu: Vec<Scalar>, nu: Vec<Scalar>) -> Result<Self> {
        let points = (1..=mu.len()).map(|k| format!("p{k}")).collect();
        Self::new(points, mu, nu)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn mu_weights(&self) -> &[Scalar] {
        &self.mu
    }

    pub fn nu_weights(&self) -> &[Scalar] {
        &self.nu
    }

    pub fn element(&self, values: Vec<Scalar>) -> Result<Element> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        Ok(Element { values })
    }

    pub fn mu(&self, f: &Element) -> Scalar {
        pair_sum(&self.mu, &f.values)
    }

    pub fn nu(&self, f: &Element) -> Scalar {
        pair_sum(&self.nu, &f.values)
    }

    /// `f_Λ`: the product of the elements whose indices are in `mask`.
    pub fn product(&self, fs: &[Element], mask: u32) -> Element {
        let mut out = Element {
            values: vec![one(); self.len()],
        };
        for (i, f) in fs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                out = out.mul(f);
            }
        }
        out
    }

    /// `⟨e_p, e_q⟩` weight of a basis tensor: `ν` on all factors but the last, `μ` on the last.
    pub fn tensor_weight(&self, tuple: &[usize]) -> Scalar {
        let mut w = one();
        if let Some((&last, init)) = tuple.split_last() {
            for &p in init {
                w *= &self.nu[p];
            }
            w *= &self.mu[last];
        }
        w
    }
}

fn pair_sum(w: &[Scalar], v: &[Scalar]) -> Scalar {
    w.iter()
        .zip(v)
        .filter(|(a, _)| !a.is_zero())
        .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
}

/// A vector of the truncated Fock space, in the basis of point tensors
/// `e_{p_1} ⊗ .. ⊗ e_{p_n}`; the empty tuple is the vacuum `Ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockVector {
    trunc: usize,
    amps: BTreeMap<Vec<usize>, Scalar>,
}

impl FockVector {
    pub fn zero(trunc: usize) -> Self {
        FockVector {
            trunc,
            amps: BTreeMap::new(),
        }
    }

    pub fn vacuum(trunc: usize) -> Self {
        let mut v = FockVector::zero(trunc);
        v.amps.insert(Vec::new(), one());
        v
    }

    /// `f_1 ⊗ .. ⊗ f_n` expanded in the point basis.
    pub fn simple_tensor(trunc: usize, fs: &[Element]) -> Result<Self> {
        if fs.len() > trunc {
            return Err(Error::FockOverflow(trunc));
        }
        let mut amps: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        amps.insert(Vec::new(), one());
        for f in fs {
            let mut next = BTreeMap::new();
            for (t, a) in &amps {
                for p in f.support() {
                    let mut t2 = t.clone();
                    t2.push(p);
                    next.insert(t2, a * f.at(p));
                }
            }
            amps = next;
        }
        Ok(FockVector { trunc, amps })
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn amplitude(&self, tuple: &[usize]) -> Scalar {
        self.amps.get(tuple).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.amps.iter()
    }

    pub fn vacuum_amplitude(&self) -> Scalar {
        self.amplitude(&[])
    }

    pub fn add_term(&mut self, tuple: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.amps.entry(tuple) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, c: &Scalar) {
        for (t, a) in &other.amps {
            self.add_term(t.clone(), a * c);
        }
    }

    pub fn max_depth(&self) -> usize {
        self.amps.keys().map(|t| t.len()).max().unwrap_or(0)
    }

    /// `⟨self, other⟩`: distinct depths are orthogonal.
    pub fn inner(&self, alg: &TestAlgebra, other: &FockVector) -> Scalar {
        let mut acc = Scalar::zero();
        for (t, a) in &self.amps {
            if let Some(b) = other.amps.get(t) {
                acc += a * b * alg.tensor_weight(t);
            }
        }
        acc
    }

    /// Equality of all matrix elements against the point basis.
    pub fn weakly_equal(&self, alg: &TestAlgebra, other: &FockVector) -> bool {
        let mut diff = self.clone();
        diff.add_scaled(other, &-one());
        diff.amps
            .iter()
            .all(|(t, a)| (a * alg.tensor_weight(t)).is_zero())
    }
}

/// `X(f) v`. Creation beyond the truncation depth is an error.
pub fn ks_apply(alg: &TestAlgebra, f: &Element, v: &FockVector) -> Result<FockVector> {
    if !f.support().is_empty() && v.amps.keys().any(|t| t.len() >= v.trunc) {
        return Err(Error::FockOverflow(v.trunc));
    }
    Ok(ks_apply_bounded(alg, f, v, v.trunc))
}

// Components deeper than `keep` are dropped from the result.
fn ks_apply_bounded(alg: &TestAlgebra, f: &Element, v: &FockVector, keep: usize) -> FockVector {
    let support = f.support();
    let nu_f = alg.nu(f);
    let mut out = FockVector::zero(v.trunc);
    for (t, a) in &v.amps {
        let n = t.len();
        if n < keep {
            for &p in &support {
                let mut t2 = Vec::with_capacity(n + 1);
                t2.push(p);
                t2.extend_from_slice(t);
                out.add_term(t2, a * f.at(p));
            }
        }
        if n == 0 {
            out.add_term(Vec::new(), a * alg.mu(f));
            continue;
        }
        let p1 = t[0];
        let fp = f.at(p1);
        if !fp.is_zero() {
            if n <= keep {
                out.add_term(t.clone(), a * fp);
            }
            // μ[f e_{p1}] Ω at depth 1, ν[f e_{p1}] (rest) deeper
            let w = if n == 1 { &alg.mu[p1] } else { &alg.nu[p1] };
            if n - 1 <= keep {
                out.add_term(t[1..].to_vec(), a * fp * w);
            }
        }
        if !nu_f.is_zero() && n <= keep {
            out.add_term(t.clone(), a * &nu_f);
        }
    }
    out
}

/// `X(f_{w_1}) .. X(f_{w_n}) v` for each word of a polynomial in `X(f_i)`.
pub fn apply_poly(
    alg: &TestAlgebra,
    fs: &[Element],
    p: &Poly,
    v: &FockVector,
) -> Result<FockVector> {
    if p.d() != fs.len() {
        return Err(Error::DimensionMismatch {
            expected: fs.len(),
            found: p.d(),
        });
    }
    let mut cache: HashMap<Word, FockVector> = HashMap::new();
    let mut out = FockVector::zero(v.trunc);
    for (w, c) in p.terms() {
        let image = apply_word(alg, fs, w, v, &mut cache)?;
        out.add_scaled(&image, c);
    }
    Ok(out)
}

fn apply_word(
    alg: &TestAlgebra,
    fs: &[Element],
    w: &Word,
    v: &FockVector,
    cache: &mut HashMap<Word, FockVector>,
) -> Result<FockVector> {
    if w.is_empty() {
        return Ok(v.clone());
    }
    if let Some(r) = cache.get(w) {
        return Ok(r.clone());
    }
    let inner = apply_word(alg, fs, &w.tail(), v, cache)?;
    let r = ks_apply(alg, &fs[w.first().unwrap()], &inner)?;
    cache.insert(w.clone(), r.clone());
    Ok(r)
}

/// A polynomial in the operators `X(f_Λ)`: each key lists the masks `Λ` of an
/// ordered product; the empty key is the identity.
pub type KsExpr = BTreeMap<Vec<u32>, Scalar>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KsMethod {
    Recursion,
    Explicit,
}

fn expr_add(e: &mut KsExpr, key: Vec<u32>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let v = e.entry(key.clone()).or_insert_with(Scalar::zero);
    *v += c;
    if v.is_zero() {
        e.remove(&key);
    }
}

fn check_ks_size(n: usize) -> Result<()> {
    if n == 0 || n > 31 {
        return Err(Error::SizeOutOfRange { n, min: 1, max: 31 });
    }
    Ok(())
}

/// `W(f_1, .., f_n)` as a polynomial in the `X(f_Λ)`.
pub fn ks_poly(alg: &TestAlgebra, fs: &[Element], method: KsMethod) -> Result<KsExpr> {
    check_ks_size(fs.len())?;
    match method {
        KsMethod::Explicit => ks_poly_explicit(alg, fs),
        KsMethod::Recursion => {
            let args: Vec<u32> = (0..fs.len()).map(|i| 1u32 << i).collect();
            let mut memo = HashMap::new();
            Ok(ks_poly_rec(alg, fs, &args, &mut memo))
        }
    }
}

// W(g) = X(g) − μ[g]
// W(g, g1) = X(g) W(g1) − W(g g1) − μ[g g1] − ν[g] W(g1)
// W(g, g1, ..) = X(g) W(g1, ..) − W(g g1, ..) − ν[g g1] W(g2, ..) − ν[g] W(g1, ..)
fn ks_poly_rec(
    alg: &TestAlgebra,
    fs: &[Element],
    args: &[u32],
    memo: &mut HashMap<Vec<u32>, KsExpr>,
) -> KsExpr {
    if let Some(e) = memo.get(args) {
        return e.clone();
    }
    let mut out = KsExpr::new();
    if args.is_empty() {
        out.insert(Vec::new(), one());
        return out;
    }
    let g = args[0];
    let fg = alg.product(fs, g);
    if args.len() == 1 {
        out.insert(vec![g], one());
        expr_add(&mut out, Vec::new(), -alg.mu(&fg));
    } else {
        let rest = &args[1..];
        for (k, c) in ks_poly_rec(alg, fs, rest, memo) {
            let mut key = vec![g];
            key.extend(k);
            expr_add(&mut out, key, c);
        }
        let mut merged = vec![g | rest[0]];
        merged.extend_from_slice(&rest[1..]);
        for (k, c) in ks_poly_rec(alg, fs, &merged, memo) {
            expr_add(&mut out, k, -c);
        }
        let g1 = alg.product(fs, g | rest[0]);
        let w = if rest.len() == 1 {
            alg.mu(&g1)
        } else {
            alg.nu(&g1)
        };
        if !w.is_zero() {
            for (k, c) in ks_poly_rec(alg, fs, &rest[1..], memo) {
                expr_add(&mut out, k, -(c * &w));
            }
        }
        let nu_g = alg.nu(&fg);
        if !nu_g.is_zero() {
            for (k, c) in ks_poly_rec(alg, fs, rest, memo) {
                expr_add(&mut out, k, -(c * &nu_g));
            }
        }
    }
    memo.insert(args.to_vec(), out.clone());
    out
}

// Σ_{π ∈ Int(n)} Σ_{S ⊂ Sing(π)} (−1)^{n − |S^c|} Π_{{i} ∈ S, i ≠ n} ν[f_i] Π_{{n} ∈ S} μ[f_n] Π_{B ∈ S^c} X(f_B)
fn ks_poly_explicit(alg: &TestAlgebra, fs: &[Element]) -> Result<KsExpr> {
    let n = fs.len();
    let parts: Vec<SetPartition> = if n <= MAX_ENUMERATION_SIZE {
        interval_partitions(n).to_vec()
    } else {
        return Err(Error::SizeOutOfRange {
            n,
            min: 1,
            max: MAX_ENUMERATION_SIZE,
        });
    };
    let mut out = KsExpr::new();
    for pi in &parts {
        let singles = pi.singletons();
        for mask in 0u32..(1 << singles.len()) {
            let mut coeff = one();
            let mut ops = Vec::new();
            let mut complement = 0usize;
            for (c, class) in pi.classes().iter().enumerate() {
                let in_s = singles
                    .iter()
                    .position(|&s| s == c)
                    .is_some_and(|b| mask & (1 << b) != 0);
                if in_s {
                    let i = class[0];
                    let w = if i == n - 1 {
                        alg.mu(&fs[i])
                    } else {
                        alg.nu(&fs[i])
                    };
                    coeff *= w;
                } else {
                    complement += 1;
                    ops.push(class.iter().fold(0u32, |m, &i| m | (1 << i)));
                }
            }
            if (n - complement) % 2 == 1 {
                coeff = -coeff;
            }
            expr_add(&mut out, ops, coeff);
        }
    }
    Ok(out)
}

/// Applies a [`KsExpr`] to a vector.
pub fn apply_expr(
    alg: &TestAlgebra,
    fs: &[Element],
    e: &KsExpr,
    v: &FockVector,
) -> Result<FockVector> {
    let mut out = FockVector::zero(v.trunc);
    for (ops, c) in e {
        let mut w = v.clone();
        for &mask in ops.iter().rev() {
            w = ks_apply(alg, &alg.product(fs, mask), &w)?;
        }
        out.add_scaled(&w, c);
    }
    Ok(out)
}

/// One term of the expansion of `X(f_1) .. X(f_n)`: the scalar weight and
/// the arguments `(f_B : B ∈ S)` of `W`, as index masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KsTerm {
    pub partition: SetPartition,
    /// Indices of the classes in `S`.
    pub selected: Vec<usize>,
    pub coeff: Scalar,
    pub w_args: Vec<u32>,
}

/// The weight of the pair `(π, S)`: `ν` on inner classes and on outer
/// classes below `S`, `μ` on outer classes above `S`.
pub fn ks_term(
    alg: &TestAlgebra,
    fs: &[Element],
    pi: &SetPartition,
    s: &[usize],
) -> Result<KsTerm> {
    if pi.n() != fs.len() {
        return Err(Error::DimensionMismatch {
            expected: fs.len(),
            found: pi.n(),
        });
    }
    let roles = pi.classify_classes()?;
    let tags = pi.outer_order_relations(s)?;
    Ok(term_from_tags(alg, fs, pi, &roles, &tags, s))
}

fn class_mask(class: &[usize]) -> u32 {
    class.iter().fold(0u32, |m, &i| m | (1 << i))
}

fn term_from_tags(
    alg: &TestAlgebra,
    fs: &[Element],
    pi: &SetPartition,
    roles: &[ClassRole],
    tags: &[Option<OuterRelation>],
    s: &[usize],
) -> KsTerm {
    let mut coeff = one();
    for (c, class) in pi.classes().iter().enumerate() {
        let f = alg.product(fs, class_mask(class));
        let w = match (roles[c], tags[c]) {
            (ClassRole::Inner, _) | (_, Some(OuterRelation::BelowS)) => alg.nu(&f),
            (_, Some(OuterRelation::AboveS)) => alg.mu(&f),
            _ => continue,
        };
        coeff *= w;
        if coeff.is_zero() {
            break;
        }
    }
    let mut selected = s.to_vec();
    selected.sort_unstable();
    let w_args = selected
        .iter()
        .map(|&c| class_mask(&pi.classes()[c]))
        .collect();
    KsTerm {
        partition: pi.clone(),
        selected,
        coeff,
        w_args,
    }
}

/// Every term `(π, S)`, `π ∈ NC(n)`, `S ⊂ Outer(π)`, with nonzero weight.
pub fn ks_monomial_expansion(alg: &TestAlgebra, fs: &[Element]) -> Result<Vec<KsTerm>> {
    let n = fs.len();
    if n == 0 || n > 10 {
        return Err(Error::SizeOutOfRange { n, min: 1, max: 10 });
    }
    let mut out = Vec::new();
    for cp in noncrossing_classified(n) {
        let outer: Vec<usize> = (0..cp.roles.len())
            .filter(|&c| cp.roles[c] == ClassRole::Outer)
            .collect();
        for mask in 0u32..(1 << outer.len()) {
            let s: Vec<usize> = outer
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &c)| c)
                .collect();
            let tags = cp.partition.outer_relations_unchecked(&cp.roles, &s);
            let term = term_from_tags(alg, fs, &cp.partition, &cp.roles, &tags, &s);
            if !term.coeff.is_zero() {
                out.push(term);
            }
        }
    }
    Ok(out)
}

/// `Σ_{π ∈ NC(n)} Π_{inner} ν[f_C] Π_{outer} μ[f_B]`.
pub fn vacuum_moment_nc(alg: &TestAlgebra, fs: &[Element]) -> Result<Scalar> {
    nc_sum(alg, fs, true)
}

/// `Σ_{π ∈ NC(n)} Π_C ν[f_C]`.
pub fn psi_moment_nc(alg: &TestAlgebra, fs: &[Element]) -> Result<Scalar> {
    nc_sum(alg, fs, false)
}

fn nc_sum(alg: &TestAlgebra, fs: &[Element], outer_mu: bool) -> Result<Scalar> {
    let n = fs.len();
    if n > MAX_ENUMERATION_SIZE {
        return Err(Error::SizeOutOfRange {
            n,
            min: 0,
            max: MAX_ENUMERATION_SIZE,
        });
    }
    let mut total = Scalar::zero();
    for cp in noncrossing_classified(n) {
        let mut prod = one();
        for (class, role) in cp.partition.classes().iter().zip(&cp.roles) {
            let f = alg.product(fs, class_mask(class));
            prod *= if outer_mu && *role == ClassRole::Outer {
                alg.mu(&f)
            } else {
                alg.nu(&f)
            };
            if prod.is_zero() {
                break;
            }
        }
        total += prod;
    }
    Ok(total)
}

/// The pair `(φ, ψ)` of the operators `X(f_1), .., X(f_d)`: `φ` is the vacuum
/// expectation, `ψ` has free cumulants `ν[f_u]`.
pub fn joint_pair_from_fock(
    alg: &TestAlgebra,
    elems: &[Element],
    trunc: usize,
) -> Result<StatePair> {
    let d = elems.len();
    if d > u8::MAX as usize {
        return Err(Error::InvalidParameter("too many elements".into()));
    }
    // Vectors X(f_{u_1}) .. X(f_{u_n}) Ω for suffixes, keeping only the depths
    // that can still return to the vacuum.
    let mut phi_terms = Vec::new();
    let mut level: Vec<(Word, FockVector)> = vec![(Word::empty(), FockVector::vacuum(trunc))];
    for n in 1..=trunc {
        let mut next = Vec::with_capacity(level.len() * d);
        for (w, v) in &level {
            for (i, f) in elems.iter().enumerate() {
                let image = ks_apply_bounded(alg, f, v, trunc - n);
                let u = w.prepend(i);
                phi_terms.push((u.clone(), image.vacuum_amplitude()));
                next.push((u, image));
            }
        }
        level = next;
    }
    let phi = State::new(d, trunc, phi_terms)?;
    let psi = if trunc <= MAX_ENUMERATION_SIZE && d > 0 {
        let mut terms = Vec::new();
        for w in words_up_to(d, trunc).into_iter().skip(1) {
            let fs: Vec<Element> = w
                .letters()
                .iter()
                .map(|&l| elems[l as usize].clone())
                .collect();
            terms.push((w, psi_moment_nc(alg, &fs)?));
        }
        State::new(d, trunc, terms)?
    } else {
        let mut r = Series::zero(d, trunc);
        for w in words_up_to(d, trunc).into_iter().skip(1) {
            let fs: Vec<Element> = w
                .letters()
                .iter()
                .map(|&l| elems[l as usize].clone())
                .collect();
            let mask = (1u32 << fs.len()) - 1;
            r.add_term(w, alg.nu(&alg.product(&fs, mask)));
        }
        moments_from_cumulants(&CumulantSeries::new(CumulantKind::Free, r)?, None)?
    };
    StatePair::new(phi, psi)
}

/// Both sides of `A^{φ,ψ}(X(f_1), .., X(f_n)) Ω = Σ_{π ∈ Int(n)} f_{B_1} ⊗ .. ⊗ f_{B_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppellKsReport {
    pub lhs: FockVector,
    pub rhs: FockVector,
    pub equal: bool,
}

pub fn appell_from_ks(alg: &TestAlgebra, fs: &[Element]) -> Result<AppellKsReport> {
    let n = fs.len();
    check_ks_size(n)?;
    let pair = joint_pair_from_fock(alg, fs, n)?;
    let fam = cfree_appell(&pair, n, AppellMethod::Recursion)?;
    let u = Word::new((0..n as u8).collect());
    let lhs = apply_poly(alg, fs, fam.get(&u).unwrap(), &FockVector::vacuum(n))?;
    let mut rhs = FockVector::zero(n);
    for pi in interval_partitions(n) {
        let args: Vec<Element> = pi
            .classes()
            .iter()
            .map(|c| alg.product(fs, class_mask(c)))
            .collect();
        rhs.add_scaled(&FockVector::simple_tensor(n, &args)?, &one());
    }
    let equal = lhs.weakly_equal(alg, &rhs);
    Ok(AppellKsReport { lhs, rhs, equal })
}

/// Outcome of the product formula `A^{φ,ψ}(X_1..X_n) = Π_{i<k} A^ψ(X_{C_i}) · A^{φ,ψ}(X_{C_k})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorizationReport {
    /// Equality of the two sides as polynomials in `x_1, .., x_n`.
    pub polynomial: bool,
    /// Equality of the two sides applied to `Ω`.
    pub vacuum: bool,
    /// Equality of all matrix elements between point tensors of depth `≤ 2`.
    pub matrix_elements: bool,
}

impl FactorizationReport {
    pub fn holds(&self) -> bool {
        self.vacuum && self.matrix_elements
    }
}

/// The intervals of maximal runs of consecutive indices sharing a class.
pub fn interval_cover(pi: &SetPartition) -> Vec<Vec<usize>> {
    let labels = pi.labels();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        match out.last_mut() {
            Some(run) if labels[*run.last().unwrap()] == *l => run.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Checks the product formula for `X_i = X(f_i)` grouped by `grouping`.
pub fn factorization_check(
    alg: &TestAlgebra,
    fs: &[Element],
    grouping: &SetPartition,
) -> Result<FactorizationReport> {
    let n = fs.len();
    check_ks_size(n)?;
    if grouping.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grouping.n(),
        });
    }
    let depth = 2;
    let trunc = n + depth;
    let pair = joint_pair_from_fock(alg, fs, n)?;
    let fam = cfree_appell(&pair, n, AppellMethod::Recursion)?;
    let free = free_appell(&pair.psi, n)?;
    let u = Word::new((0..n as u8).collect());
    let lhs = fam.get(&u).unwrap().clone();
    let runs = interval_cover(grouping);
    let mut rhs = Poly::one(n);
    for (k, run) in runs.iter().enumerate() {
        let w = Word::new(run.iter().map(|&i| i as u8).collect());
        let factor = if k + 1 == runs.len() {
            fam.get(&w)
        } else {
            free.get(&w)
        };
        rhs = &rhs * factor.unwrap();
    }
    let polynomial = lhs == rhs;
    let vac = FockVector::vacuum(trunc);
    let vacuum =
        apply_poly(alg, fs, &lhs, &vac)?.weakly_equal(alg, &apply_poly(alg, fs, &rhs, &vac)?);
    let mut matrix_elements = true;
    for t in point_tuples(alg.len(), depth) {
        let mut e = FockVector::zero(trunc);
        e.add_term(t, one());
        let a = apply_poly(alg, fs, &lhs, &e)?;
        let b = apply_poly(alg, fs, &rhs, &e)?;
        if !a.weakly_equal(alg, &b) {
            matrix_elements = false;
            break;
        }
    }
    Ok(FactorizationReport {
        polynomial,
        vacuum,
        matrix_elements,
    })
}

fn point_tuples(m: usize, depth: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for t in &level {
            for p in 0..m {
                let mut t2: Vec<usize> = t.clone();
                t2.push(p);
                next.push(t2);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// `φ[X A^{φ,ψ}(X_1 + Y_1, ..)] = φ[X A^{φ,ψ}(X_1, ..)]` for every monomial
/// `X` of degree `≤ max_degree` in the `X_i = X(b_i)`, with `Y_i = X(y_i)`.
/// The supports of the `y_i` must avoid those of the `b_i`.
pub fn martingale_check(
    alg: &TestAlgebra,
    b_elems: &[Element],
    y_elems: &[Element],
    max_degree: usize,
) -> Result<bool> {
    let n = b_elems.len();
    check_ks_size(n)?;
    if y_elems.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y_elems.len(),
        });
    }
    let b_support: Vec<usize> = b_elems.iter().flat_map(|b| b.support()).collect();
    if y_elems
        .iter()
        .any(|y| y.support().iter().any(|p| b_support.contains(p)))
    {
        return Err(Error::Precondition(
            "Y supports must be disjoint from B supports".into(),
        ));
    }
    let sums: Vec<Element> = b_elems.iter().zip(y_elems).map(|(b, y)| b.add(y)).collect();
    let trunc = n + max_degree;
    let u = Word::new((0..n as u8).collect());
    let appell_vector = |fs: &[Element]| -> Result<FockVector> {
        let pair = joint_pair_from_fock(alg, fs, n)?;
        let fam = cfree_appell(&pair, n, AppellMethod::Recursion)?;
        apply_poly(alg, fs, fam.get(&u).unwrap(), &FockVector::vacuum(trunc))
    };
    let with_y = appell_vector(&sums)?;
    let without = appell_vector(b_elems)?;
    // φ[X A] = ⟨X* Ω, A Ω⟩ with X* the reversed monomial.
    for w in words_up_to(n, max_degree) {
        let reversed = Poly::monomial(n, w.reversed());
        let left = apply_poly(alg, b_elems, &reversed, &FockVector::vacuum(trunc))?;
        if left.inner(alg, &with_y) != left.inner(alg, &without) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `φ[A_1 .. A_k] = φ[A_1] .. φ[A_k]` where `A_j` is the product of the
/// `X(g)` for `g` in `factors[j]`, interior factors are ψ-centered, endpoint
/// factors are left as they are, and neighbouring factors have disjoint
/// supports.
pub fn endpoint_check(alg: &TestAlgebra, factors: &[Vec<Element>]) -> Result<bool> {
    let k = factors.len();
    let support = |fs: &[Element]| -> Vec<usize> {
        let mut s: Vec<usize> = fs.iter().flat_map(|f| f.support()).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    for pair in factors.windows(2) {
        let a = support(&pair[0]);
        if support(&pair[1]).iter().any(|p| a.contains(p)) {
            return Err(Error::Precondition(
                "neighbouring factors must have disjoint supports".into(),
            ));
        }
    }
    let trunc: usize = factors.iter().map(|f| f.len()).sum::<usize>().max(1);
    let mut shifts = Vec::with_capacity(k);
    for (j, fs) in factors.iter().enumerate() {
        let interior = j > 0 && j + 1 < k;
        shifts.push(if interior {
            psi_moment_nc(alg, fs)?
        } else {
            Scalar::zero()
        });
    }
    let apply = |j: usize, v: &FockVector| -> Result<FockVector> {
        let mut out = v.clone();
        for f in factors[j].iter().rev() {
            out = ks_apply(alg, f, &out)?;
        }
        out.add_scaled(v, &-shifts[j].clone());
        Ok(out)
    };
    let mut v = FockVector::vacuum(trunc);
    for j in (0..k).rev() {
        v = apply(j, &v)?;
    }
    let mut rhs = one();
    for j in 0..k {
        rhs *= apply(j, &FockVector::vacuum(trunc))?.vacuum_amplitude();
    }
    Ok(v.vacuum_amplitude() == rhs)
}

/// A base test algebra replicated over `M` equal cells of `[0, 1]`; each
/// point `(p, c)` carries the base weights divided by `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeGrid {
    base: TestAlgebra,
    cells: usize,
    algebra: TestAlgebra,
}

impl TimeGrid {
    pub fn new(base: TestAlgebra, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidParameter(
                "a grid needs at least one cell".into(),
            ));
        }
        let m = Scalar::from_integer(cells.into());
        let mut points = Vec::new();
        let mut mu = Vec::new();
        let mut nu = Vec::new();
        for c in 0..cells {
            for (p, label) in base.points.iter().enumerate() {
                points.push(format!("{label}@{c}"));
                mu.push(&base.mu[p] / &m);
                nu.push(&base.nu[p] / &m);
            }
        }
        let algebra = TestAlgebra::new(points, mu, nu)?;
        Ok(TimeGrid {
            base,
            cells,
            algebra,
        })
    }

    pub fn algebra(&self) -> &TestAlgebra {
        &self.algebra
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Number of cells in `[0, t)`; `t` must be a multiple of `1/M` in `[0, 1]`.
    pub fn cells_before(&self, t: &Scalar) -> Result<usize> {
        let scaled = t * Scalar::from_integer(self.cells.into());
        if !scaled.is_integer()
            || scaled.is_negative()
            || scaled > Scalar::from_integer(self.cells.into())
        {
            return Err(Error::InvalidParameter(format!(
                "time {t} is not a grid point"
            )));
        }
        Ok(scaled.to_integer().try_into().unwrap_or(0))
    }

    /// `f ⊗ χ_{[0,t)}`.
    pub fn embed(&self, f: &Element, t: &Scalar) -> Result<Element> {
        if f.values.len() != self.base.len() {
            return Err(Error::DimensionMismatch {
                expected: self.base.len(),
                found: f.values.len(),
            });
        }
        let upto = self.cells_before(t)?;
        let mut values = Vec::with_capacity(self.algebra.len());
        for c in 0..self.cells {
            for v in &f.values {
                values.push(if c < upto { v.clone() } else { Scalar::zero() });
            }
        }
        Ok(Element { values })
    }

    /// `φ[· | t]` on vectors: every tensor factor is multiplied by `χ_{[0,t)}`.
    pub fn conditional_expectation(&self, v: &FockVector, t: &Scalar) -> Result<FockVector> {
        let upto = self.cells_before(t)?;
        let m = self.base.len();
        let mut out = FockVector::zero(v.trunc);
        for (tuple, a) in &v.amps {
            if tuple.iter().all(|&p| p / m < upto) {
                out.add_term(tuple.clone(), a.clone());
            }
        }
        Ok(out)
    }

    /// The Appell process identity `φ[A_u(X(t)) | s] = A_u(X(s))`, compared
    /// on `Ω` and through matrix elements against point tensors in `[0, s)`.
    pub fn process_martingale_check(
        &self,
        elems: &[Element],
        u: &Word,
        s: &Scalar,
        t: &Scalar,
    ) -> Result<bool> {
        if s > t {
            return Err(Error::InvalidParameter("need s <= t".into()));
        }
        let d = elems.len();
        u.check_alphabet(d)?;
        let n = u.len();
        let trunc = n.max(1);
        let at = |time: &Scalar| -> Result<FockVector> {
            let fs: Vec<Element> = elems
                .iter()
                .map(|f| self.embed(f, time))
                .collect::<Result<_>>()?;
            let pair = joint_pair_from_fock(&self.algebra, &fs, trunc)?;
            let fam = cfree_appell(&pair, n, AppellMethod::Recursion)?;
            apply_poly(
                &self.algebra,
                &fs,
                fam.get(u).unwrap(),
                &FockVector::vacuum(trunc),
            )
        };
        let conditioned = self.conditional_expectation(&at(t)?, s)?;
        let direct = at(s)?;
        if !conditioned.weakly_equal(&self.algebra, &direct) {
            return Ok(false);
        }
        let upto = self.cells_before(s)?;
        let m = self.base.len();
        for q in point_tuples(self.algebra.len(), trunc) {
            if q.iter().any(|&p| p / m >= upto) {
                continue;
            }
            let mut e = FockVector::zero(trunc);
            e.add_term(q, one());
            if e.inner(&self.algebra, &conditioned) != e.inner(&self.algebra, &direct) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitKind {
    /// Central limit: parameters `μ[x²]`, `ν[x²]`.
    Gaussian { mu2: Scalar, nu2: Scalar },
    /// Poisson limit: parameters `μ[x]`, `ν[x]`.
    Poisson { mu1: Scalar, nu1: Scalar },
}

impl LimitKind {
    /// Jacobi parameters `(β_0, ..)`, `(γ_1, ..)` of the limit law, `k` of each.
    pub fn jacobi(&self, k: usize) -> Result<JacobiParams> {
        let (beta, gamma) = match self {
            LimitKind::Gaussian { mu2, nu2 } => {
                let mut gamma = vec![mu2.clone()];
                gamma.extend(std::iter::repeat_n(nu2.clone(), k.saturating_sub(1)));
                (vec![Scalar::zero(); k], gamma)
            }
            LimitKind::Poisson { mu1, nu1 } => {
                let mut beta = vec![mu1.clone()];
                beta.extend(std::iter::repeat_n(one() + nu1, k.saturating_sub(1)));
                let mut gamma = vec![mu1.clone()];
                gamma.extend(std::iter::repeat_n(nu1.clone(), k.saturating_sub(1)));
                (beta, gamma)
            }
        };
        JacobiParams::new(beta, gamma)
    }
}

/// `W_0, .., W_k` from the one-variable recursions of the limit examples.
pub fn limit_example_recursions(kind: &LimitKind, k: usize) -> Vec<Poly> {
    let x = Poly::var(1, 0).expect("one variable");
    let mut out = vec![Poly::one(1)];
    if k == 0 {
        return out;
    }
    let (first, level, lower): (Scalar, Scalar, Box<dyn Fn(usize) -> Scalar>) = match kind {
        LimitKind::Gaussian { mu2, nu2 } => {
            let (m, n) = (mu2.clone(), nu2.clone());
            (
                Scalar::zero(),
                Scalar::zero(),
                Box::new(move |j| if j == 1 { m.clone() } else { n.clone() }),
            )
        }
        LimitKind::Poisson { mu1, nu1 } => {
            let (m, n) = (mu1.clone(), nu1.clone());
            (
                mu1.clone(),
                one() + nu1,
                Box::new(move |j| if j == 1 { m.clone() } else { n.clone() }),
            )
        }
    };
    // x = W_1 + first;  x W_j = W_{j+1} + level W_j + lower(j) W_{j−1}
    let mut w1 = x.clone();
    w1.add_term(Word::empty(), -first);
    out.push(w1);
    for j in 1..k {
        let next =
            &(&out[j].mul_var_left(0) - &out[j].scale(&level)) - &out[j - 1].scale(&lower(j));
        out.push(next);
    }
    out
}

/// Whether the limit-example polynomials are the monic orthogonal
/// polynomials of the law with the matching Jacobi parameters.
pub fn limit_example_check(kind: &LimitKind, k: usize) -> Result<bool> {
    let ws = limit_example_recursions(kind, k);
    let j = kind.jacobi(k + 1)?;
    let law = moments_from_jacobi(&j, 2 * k)?;
    let Some(family) = mops(&law, k)? else {
        return Ok(false);
    };
    Ok(ws
        .iter()
        .enumerate()
        .all(|(n, w)| family.get(&Word::new(vec![0; n])) == Some(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::Functional;
    use crate::scalar::{frac, int};
    use crate::states::{free_cumulants, two_state_cumulants};

    fn alg3() -> TestAlgebra {
        TestAlgebra::unlabeled(
            vec![frac(1, 2), int(1), frac(1, 3)],
            vec![int(2), frac(1, 4), int(1)],
        )
        .unwrap()
    }

    fn el(v: &[i64]) -> Element {
        Element::new(v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn vacuum_examples() {
        let alg = alg3();
        let f = el(&[1, -2, 3]);
        let g = el(&[0, 1, 2]);
        let h = el(&[2, 1, -1]);
        let v = FockVector::vacuum(3);
        let centered = el(&[2, 0, -3]); // μ = 1 − 1 = 0
        assert!(alg.mu(&centered).is_zero());
        assert_eq!(
            ks_apply(&alg, &centered, &v).unwrap(),
            FockVector::simple_tensor(3, std::slice::from_ref(&centered)).unwrap()
        );
        let xg = ks_apply(&alg, &g, &v).unwrap();
        let xfg = ks_apply(&alg, &f, &xg).unwrap();
        assert_eq!(
            xfg.vacuum_amplitude(),
            alg.mu(&f.mul(&g)) + alg.mu(&f) * alg.mu(&g)
        );
        let xh = ks_apply(&alg, &h, &v).unwrap();
        let v3 = ks_apply(&alg, &f, &ks_apply(&alg, &g, &xh).unwrap()).unwrap();
        assert_eq!(
            v3.vacuum_amplitude(),
            vacuum_moment_nc(&alg, &[f, g, h]).unwrap()
        );
    }

    #[test]
    fn overflow_is_an_error() {
        let alg = alg3();
        let v = FockVector::vacuum(1);
        let x = ks_apply(&alg, &el(&[1, 0, 0]), &v).unwrap();
        assert_eq!(
            ks_apply(&alg, &el(&[1, 0, 0]), &x),
            Err(Error::FockOverflow(1))
        );
    }

    #[test]
    fn ks_poly_examples() {
        let alg = alg3();
        let fs = [el(&[1, 2, 0]), el(&[3, -1, 1])];
        let w1 = ks_poly(&alg, &fs[..1], KsMethod::Explicit).unwrap();
        let mut expect = KsExpr::new();
        expect.insert(vec![1], one());
        expr_add(&mut expect, vec![], -alg.mu(&fs[0]));
        assert_eq!(w1, expect);
        // X1X2 − X(f1f2) − X1 μ[f2] − ν[f1] X2 + ν[f1] μ[f2]
        let mut expect = KsExpr::new();
        expr_add(&mut expect, vec![1, 2], one());
        expr_add(&mut expect, vec![3], -one());
        expr_add(&mut expect, vec![1], -alg.mu(&fs[1]));
        expr_add(&mut expect, vec![2], -alg.nu(&fs[0]));
        expr_add(&mut expect, vec![], alg.nu(&fs[0]) * alg.mu(&fs[1]));
        assert_eq!(ks_poly(&alg, &fs, KsMethod::Explicit).unwrap(), expect);
        assert_eq!(ks_poly(&alg, &fs, KsMethod::Recursion).unwrap(), expect);
    }

    #[test]
    fn ks_poly_methods_agree_and_create_tensors() {
        let alg = alg3();
        let fs = [
            el(&[1, 2, 0]),
            el(&[3, -1, 1]),
            el(&[0, 1, 1]),
            el(&[2, 2, -1]),
        ];
        for n in 1..=4 {
            let a = ks_poly(&alg, &fs[..n], KsMethod::Explicit).unwrap();
            let b = ks_poly(&alg, &fs[..n], KsMethod::Recursion).unwrap();
            assert_eq!(a, b);
            let v = apply_expr(&alg, &fs[..n], &a, &FockVector::vacuum(n)).unwrap();
            assert_eq!(v, FockVector::simple_tensor(n, &fs[..n]).unwrap());
        }
    }

    #[test]
    fn monomial_expansion_reproduces_products() {
        let alg = alg3();
        let fs = [
            el(&[1, 2, 0]),
            el(&[3, -1, 1]),
            el(&[0, 1, 1]),
            el(&[2, 2, -1]),
        ];
        let n = fs.len();
        let terms = ks_monomial_expansion(&alg, &fs).unwrap();
        let mut lhs = FockVector::vacuum(n);
        for f in fs.iter().rev() {
            lhs = ks_apply(&alg, f, &lhs).unwrap();
        }
        let mut rhs = FockVector::zero(n);
        let mut vacuum = Scalar::zero();
        for t in &terms {
            let args: Vec<Element> = t.w_args.iter().map(|&m| alg.product(&fs, m)).collect();
            rhs.add_scaled(&FockVector::simple_tensor(n, &args).unwrap(), &t.coeff);
            if t.w_args.is_empty() {
                vacuum += &t.coeff;
            }
        }
        assert_eq!(lhs, rhs);
        assert_eq!(vacuum, vacuum_moment_nc(&alg, &fs).unwrap());
    }

    #[test]
    fn figure_one_term() {
        let alg = alg3();
        let fs: Vec<Element> = (0..11)
            .map(|k| el(&[k % 3 + 1, (k * 5) % 4 - 1, k % 2 + 2]))
            .collect();
        let pi = SetPartition::from_one_based(&[
            vec![1, 2],
            vec![3],
            vec![4],
            vec![5, 8],
            vec![6, 7],
            vec![9, 11],
            vec![10],
        ])
        .unwrap();
        let term = ks_term(&alg, &fs, &pi, &[1, 3]).unwrap();
        let p = |idx: &[usize]| idx.iter().fold(0u32, |m, &i| m | (1 << (i - 1)));
        let nu = |idx: &[usize]| alg.nu(&alg.product(&fs, p(idx)));
        let mu = |idx: &[usize]| alg.mu(&alg.product(&fs, p(idx)));
        let expect = nu(&[6, 7]) * nu(&[10]) * nu(&[1, 2]) * nu(&[4]) * mu(&[9, 11]);
        assert_eq!(term.coeff, expect);
        assert_eq!(term.w_args, vec![p(&[3]), p(&[5, 8])]);
    }

    #[test]
    fn joint_pair_examples() {
        // One point x with x² weights δ_{k,2}: two points ±1 with μ = ν = 1/2 each.
        let alg = TestAlgebra::unlabeled(vec![frac(1, 2); 2], vec![frac(1, 2); 2]).unwrap();
        let f = el(&[1, -1]);
        let pair = joint_pair_from_fock(&alg, &[f], 6).unwrap();
        let r = two_state_cumulants(&pair);
        let rpsi = free_cumulants(&pair.psi);
        for k in 1..=6 {
            let w = Word::new(vec![0; k]);
            let v = if k % 2 == 0 { one() } else { Scalar::zero() };
            assert_eq!(r.coeff(&w), v.clone());
            assert_eq!(rpsi.coeff(&w), v);
        }
        let alg = alg3();
        let e1 = el(&[1, 0, 0]);
        let e2 = el(&[0, 2, -1]);
        let pair = joint_pair_from_fock(&alg, &[e1, e2], 5).unwrap();
        let r = two_state_cumulants(&pair);
        let rpsi = free_cumulants(&pair.psi);
        for w in words_up_to(2, 5) {
            let mixed = w.letters().windows(2).any(|p| p[0] != p[1]);
            if mixed {
                assert!(r.coeff(&w).is_zero());
                assert!(rpsi.coeff(&w).is_zero());
            }
        }
        let empty = joint_pair_from_fock(&alg, &[], 3).unwrap();
        assert_eq!(empty.phi, State::delta_zero(0, 3));
    }

    #[test]
    fn cumulant_realization() {
        let alg = alg3();
        let fs = [el(&[1, 2, 0]), el(&[-1, 1, 3])];
        let pair = joint_pair_from_fock(&alg, &fs, 6).unwrap();
        let r = two_state_cumulants(&pair);
        let rpsi = free_cumulants(&pair.psi);
        for w in words_up_to(2, 6).into_iter().skip(1) {
            let args: Vec<Element> = w
                .letters()
                .iter()
                .map(|&l| fs[l as usize].clone())
                .collect();
            let prod = alg.product(&args, (1 << args.len()) - 1);
            assert_eq!(r.coeff(&w), alg.mu(&prod));
            assert_eq!(rpsi.coeff(&w), alg.nu(&prod));
        }
    }

    #[test]
    fn x_is_symmetric() {
        let alg = alg3();
        let f = el(&[1, -2, 3]);
        let mut v = FockVector::zero(3);
        let mut w = FockVector::zero(3);
        for (k, t) in point_tuples(3, 2).into_iter().enumerate() {
            v.add_term(t.clone(), int(k as i64 % 5 - 2));
            w.add_term(t, int((k as i64 * 7) % 3 - 1));
        }
        let lhs = v.inner(&alg, &ks_apply(&alg, &f, &w).unwrap());
        let rhs = ks_apply(&alg, &f, &v).unwrap().inner(&alg, &w);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn appell_from_ks_examples() {
        let alg = alg3();
        let fs = [el(&[1, 2, 0]), el(&[3, -1, 1]), el(&[0, 1, 1])];
        for n in 1..=3 {
            let rep = appell_from_ks(&alg, &fs[..n]).unwrap();
            assert!(rep.equal, "n = {n}");
        }
        let one_elem = appell_from_ks(&alg, &fs[..1]).unwrap();
        assert_eq!(
            one_elem.lhs,
            FockVector::simple_tensor(1, &fs[..1]).unwrap()
        );
    }

    #[test]
    fn factorization_examples() {
        let alg = alg3();
        let a = el(&[1, 2, 0]);
        let b = el(&[0, 0, 3]);
        let grouping = SetPartition::from_one_based(&[vec![1], vec![2]]).unwrap();
        let rep = factorization_check(&alg, &[a.clone(), b.clone()], &grouping).unwrap();
        assert!(rep.holds() && rep.polynomial);
        let one_block = SetPartition::from_one_based(&[vec![1, 2]]).unwrap();
        assert!(
            factorization_check(&alg, &[a.clone(), b.clone()], &one_block)
                .unwrap()
                .holds()
        );
        let grouping = SetPartition::from_one_based(&[vec![1, 3], vec![2]]).unwrap();
        assert!(
            factorization_check(&alg, &[a.clone(), b.clone(), a.clone()], &grouping)
                .unwrap()
                .holds()
        );
        let overlapping = el(&[1, 1, 1]);
        let grouping = SetPartition::from_one_based(&[vec![1], vec![2]]).unwrap();
        assert!(!factorization_check(&alg, &[a, overlapping], &grouping)
            .unwrap()
            .holds());
    }

    #[test]
    fn martingale_examples() {
        let alg = TestAlgebra::unlabeled(
            vec![frac(1, 2), int(1), frac(1, 3), int(2)],
            vec![int(2), frac(1, 4), int(1), frac(1, 2)],
        )
        .unwrap();
        let b = [el(&[1, 2, 0, 0]), el(&[-1, 1, 0, 0])];
        let y = [el(&[0, 0, 1, 2]), el(&[0, 0, 3, -1])];
        assert!(martingale_check(&alg, &b[..1], &y[..1], 3).unwrap());
        assert!(martingale_check(&alg, &b, &y, 2).unwrap());
        let zero = [Element::zero(4), Element::zero(4)];
        assert!(martingale_check(&alg, &b, &zero, 2).unwrap());
        assert!(martingale_check(&alg, &b, &b, 2).is_err());
    }

    #[test]
    fn time_grid() {
        let base =
            TestAlgebra::unlabeled(vec![int(1), frac(1, 2)], vec![frac(1, 2), int(2)]).unwrap();
        let grid = TimeGrid::new(base, 4).unwrap();
        let f = el(&[1, 2]);
        let x = grid.embed(&f, &one()).unwrap();
        let v = ks_apply(grid.algebra(), &x, &FockVector::vacuum(2)).unwrap();
        assert_eq!(grid.conditional_expectation(&v, &one()).unwrap(), v);
        let only_vacuum = grid.conditional_expectation(&v, &Scalar::zero()).unwrap();
        assert_eq!(only_vacuum.max_depth(), 0);
        assert!(grid.cells_before(&frac(1, 3)).is_err());
        let u = Word::new(vec![0, 0]);
        assert!(grid
            .process_martingale_check(std::slice::from_ref(&f), &u, &frac(1, 2), &one())
            .unwrap());
        let g = el(&[-1, 1]);
        let u = Word::new(vec![0, 1, 0]);
        assert!(grid
            .process_martingale_check(&[f, g], &u, &frac(1, 4), &frac(3, 4))
            .unwrap());
    }

    #[test]
    fn limit_examples() {
        let gauss = LimitKind::Gaussian {
            mu2: one(),
            nu2: one(),
        };
        let ws = limit_example_recursions(&gauss, 4);
        // Monic Chebyshev U: x^4 − 3x^2 + 1
        let u4 = Poly::from_terms(
            1,
            [
                (Word::new(vec![0; 4]), int(1)),
                (Word::new(vec![0; 2]), int(-3)),
                (Word::empty(), int(1)),
            ],
        )
        .unwrap();
        assert_eq!(ws[4], u4);
        assert!(limit_example_check(&gauss, 5).unwrap());
        let c = frac(1, 2);
        let meixner = LimitKind::Gaussian {
            mu2: one(),
            nu2: one() + &c,
        };
        assert!(limit_example_check(&meixner, 5).unwrap());
        let poisson = LimitKind::Poisson {
            mu1: frac(3, 2),
            nu1: frac(3, 2),
        };
        assert!(limit_example_check(&poisson, 5).unwrap());
    }

    #[test]
    fn poisson_limit_matches_projection_in_fock_space() {
        let lambda = frac(3, 2);
        let alg = TestAlgebra::unlabeled(vec![lambda.clone()], vec![lambda.clone()]).unwrap();
        let pair = joint_pair_from_fock(&alg, &[el(&[1])], 8).unwrap();
        let j = crate::orthopoly::jacobi_from_moments(&pair.phi).unwrap();
        let expect = LimitKind::Poisson {
            mu1: lambda.clone(),
            nu1: lambda,
        }
        .jacobi(4)
        .unwrap();
        assert_eq!(j, expect);
        let ws = limit_example_recursions(
            &LimitKind::Poisson {
                mu1: frac(3, 2),
                nu1: frac(3, 2),
            },
            3,
        );
        // φ-orthogonality of W_n to lower powers.
        for (n, w) in ws.iter().enumerate().skip(1) {
            for k in 0..n {
                let xk = Poly::monomial(1, Word::new(vec![0; k]));
                assert!(pair.phi.apply(&(&xk * w)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn three_factor_c_free_product() {
        let alg = alg3();
        // X on point 1, Y on points 2 and 3; interior factors ψ-centered.
        let x = el(&[2, 0, 0]);
        let y = el(&[0, 4, -1]);
        assert!(alg.nu(&y).is_zero());
        let pair = joint_pair_from_fock(&alg, &[x, y], 5).unwrap();
        let m = |l: &[u8]| pair.phi.moment(&Word::new(l.to_vec())).unwrap();
        // φ[X Y X] with ψ[Y] = 0 → φ[X] φ[Y] φ[X]
        assert_eq!(m(&[0, 1, 0]), m(&[0]) * m(&[1]) * m(&[0]));
        assert_eq!(
            m(&[1, 0, 1]),
            m(&[1]) * m(&[0]) * m(&[1])
                + (m(&[1, 1]) - m(&[1]) * m(&[1])) * pair.psi.moment(&Word::letter(0)).unwrap()
        );
    }

    #[test]
    fn endpoint_lemma_examples() {
        let alg = alg3();
        let a = vec![el(&[2, 0, 0])];
        let b = vec![el(&[0, 4, -1]), el(&[0, 1, 3])];
        let c = vec![el(&[1, 0, 0]), el(&[3, 0, 0])];
        assert!(endpoint_check(&alg, &[a.clone(), b.clone(), c.clone()]).unwrap());
        assert!(endpoint_check(&alg, &[b.clone(), c.clone(), b.clone(), a.clone()]).unwrap());
        assert!(endpoint_check(&alg, &[a.clone(), b.clone()]).unwrap());
        assert!(endpoint_check(&alg, &[a.clone(), a]).is_err());
    }
}
