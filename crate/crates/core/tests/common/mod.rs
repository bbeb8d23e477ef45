//! Random inputs and brute-force oracles shared by the integration tests.
//! The oracles enumerate partitions directly and use only plain maps of
//! rationals, so they do not go through the library's transforms.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cfree::fock::{Element, TestAlgebra};
use cfree::linalg::Matrix;
use cfree::orthopoly::{moments_from_jacobi, JacobiParams};
use cfree::states::State;
use cfree::word::{words_up_to, Word};
use cfree::Scalar;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational(r: &mut Rand, lo: i64, hi: i64, max_den: i64) -> Scalar {
    q(r.gen_range(lo..=hi), r.gen_range(1..=max_den))
}

pub fn positive_rational(r: &mut Rand, hi: i64, max_den: i64) -> Scalar {
    q(r.gen_range(1..=hi), r.gen_range(1..=max_den))
}

/// `⟨e_0, A_{u_1} .. A_{u_n} e_0⟩` for random symmetric integer matrices: a
/// positive state in `d` variables.
pub fn matrix_state(r: &mut Rand, d: usize, trunc: usize, dim: usize) -> State {
    let mats: Vec<Vec<Vec<i64>>> = (0..d)
        .map(|_| {
            let mut m = vec![vec![0i64; dim]; dim];
            for a in 0..dim {
                for b in a..dim {
                    let x = r.gen_range(-2..=2);
                    m[a][b] = x;
                    m[b][a] = x;
                }
            }
            m
        })
        .collect();
    let mut terms = Vec::new();
    for w in words_up_to(d, trunc).into_iter().skip(1) {
        let mut v: Vec<i64> = (0..dim).map(|k| i64::from(k == 0)).collect();
        for &l in w.letters().iter().rev() {
            let a = &mats[l as usize];
            v = (0..dim)
                .map(|i| (0..dim).map(|j| a[i][j] * v[j]).sum())
                .collect();
        }
        terms.push((w, Scalar::from_integer(BigInt::from(v[0]))));
    }
    State::new(d, trunc, terms).unwrap()
}

/// A one-variable state with random Jacobi parameters and positive `γ`.
pub fn jacobi_state(r: &mut Rand, trunc: usize, normalized: bool) -> State {
    let k = trunc / 2 + 1;
    let mut beta: Vec<Scalar> = (0..k).map(|_| rational(r, -3, 3, 2)).collect();
    let mut gamma: Vec<Scalar> = (0..k).map(|_| positive_rational(r, 4, 3)).collect();
    if normalized {
        beta[0] = Scalar::zero();
        gamma[0] = Scalar::one();
    }
    moments_from_jacobi(&JacobiParams::new(beta, gamma).unwrap(), trunc).unwrap()
}

pub fn jacobi_params(beta: &[Scalar], gamma: &[Scalar]) -> JacobiParams {
    JacobiParams::new(beta.to_vec(), gamma.to_vec()).unwrap()
}

/// Every set partition of `{0, .., n−1}`, classes sorted by minimum.
pub fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn go(i: usize, n: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            let k = labels.iter().copied().max().map_or(0, |m| m + 1);
            let mut classes = vec![Vec::new(); k];
            for (pos, &l) in labels.iter().enumerate() {
                classes[l].push(pos);
            }
            out.push(classes);
            return;
        }
        for l in 0..=max {
            labels[i] = l;
            go(i + 1, n, if l == max { max + 1 } else { max }, labels, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    go(0, n, 0, &mut labels, &mut out);
    out
}

fn crosses(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|&p| {
        b.iter().any(|&q| {
            a.iter()
                .any(|&r| b.iter().any(|&s| p < q && q < r && r < s))
        })
    })
}

pub fn noncrossing(n: usize) -> Vec<Vec<Vec<usize>>> {
    all_partitions(n)
        .into_iter()
        .filter(|p| (0..p.len()).all(|i| (0..p.len()).all(|j| i == j || !crosses(&p[i], &p[j]))))
        .collect()
}

pub fn interval(n: usize) -> Vec<Vec<Vec<usize>>> {
    all_partitions(n)
        .into_iter()
        .filter(|p| p.iter().all(|c| c.windows(2).all(|w| w[1] == w[0] + 1)))
        .collect()
}

/// Whether class `c` of `p` is nested inside the span of another class.
pub fn is_inner(p: &[Vec<usize>], c: usize) -> bool {
    let (lo, hi) = (p[c][0], *p[c].last().unwrap());
    p.iter()
        .enumerate()
        .any(|(k, b)| k != c && b[0] < lo && hi < *b.last().unwrap())
}

pub fn restrict(u: &Word, class: &[usize]) -> Word {
    Word::new(class.iter().map(|&i| u.letters()[i]).collect())
}

pub type Coeffs = BTreeMap<Word, Scalar>;

pub fn get(c: &Coeffs, w: &Word) -> Scalar {
    c.get(w).cloned().unwrap_or_else(Scalar::zero)
}

/// Free cumulants by Möbius inversion over `NC(n)`, word by word.
pub fn free_cumulants_oracle(s: &State) -> Coeffs {
    let (d, n) = (s.d(), s.trunc());
    let mut r = Coeffs::new();
    for len in 1..=n {
        let parts = noncrossing(len);
        for u in words_up_to(d, len).into_iter().filter(|w| w.len() == len) {
            let mut acc = s.moment(&u).unwrap();
            for p in parts.iter().filter(|p| p.len() > 1) {
                acc -= p
                    .iter()
                    .map(|c| get(&r, &restrict(&u, c)))
                    .fold(Scalar::one(), |a, b| a * b);
            }
            r.insert(u, acc);
        }
    }
    r
}

/// Two-state cumulants by inverting
/// `φ[x_u] = Σ_{NC} Π_{outer} R^{φ,ψ} Π_{inner} R^ψ`.
pub fn two_state_oracle(phi: &State, r_psi: &Coeffs) -> Coeffs {
    let (d, n) = (phi.d(), phi.trunc());
    let mut r = Coeffs::new();
    for len in 1..=n {
        let parts = noncrossing(len);
        for u in words_up_to(d, len).into_iter().filter(|w| w.len() == len) {
            let mut acc = phi.moment(&u).unwrap();
            for p in parts.iter().filter(|p| p.len() > 1) {
                let mut prod = Scalar::one();
                for (k, c) in p.iter().enumerate() {
                    let w = restrict(&u, c);
                    prod *= if is_inner(p, k) {
                        get(r_psi, &w)
                    } else {
                        get(&r, &w)
                    };
                }
                acc -= prod;
            }
            r.insert(u, acc);
        }
    }
    r
}

/// Boolean cumulants by inversion over interval partitions.
pub fn boolean_cumulants_oracle(s: &State) -> Coeffs {
    let (d, n) = (s.d(), s.trunc());
    let mut eta = Coeffs::new();
    for len in 1..=n {
        let parts = interval(len);
        for u in words_up_to(d, len).into_iter().filter(|w| w.len() == len) {
            let mut acc = s.moment(&u).unwrap();
            for p in parts.iter().filter(|p| p.len() > 1) {
                acc -= p
                    .iter()
                    .map(|c| get(&eta, &restrict(&u, c)))
                    .fold(Scalar::one(), |a, b| a * b);
            }
            eta.insert(u, acc);
        }
    }
    eta
}

/// A polynomial as a map from words to coefficients, for oracle-side algebra.
pub type PolyMap = BTreeMap<Word, Scalar>;

fn add_to(m: &mut PolyMap, w: Word, c: Scalar) {
    let e = m.entry(w).or_insert_with(Scalar::zero);
    *e += c;
}

pub fn poly_map(p: &cfree::ncpoly::Poly) -> PolyMap {
    p.terms().map(|(w, c)| (w.clone(), c.clone())).collect()
}

fn clean(mut m: PolyMap) -> PolyMap {
    m.retain(|_, c| !c.is_zero());
    m
}

/// Coefficient of `z_u` in `(1 − x·z + R(z))^{-1}`: a sum over interval
/// decompositions, singletons contributing `x_i − R[x_i]`, longer blocks `−R[w]`.
pub fn free_appell_oracle(r: &Coeffs, u: &Word) -> PolyMap {
    let mut out = PolyMap::new();
    for p in interval(u.len()) {
        let mut terms: PolyMap = [(Word::empty(), Scalar::one())].into_iter().collect();
        for c in &p {
            let w = restrict(u, c);
            let mut next = PolyMap::new();
            for (v, a) in &terms {
                if c.len() == 1 {
                    add_to(&mut next, v.concat(&w), a.clone());
                }
                add_to(&mut next, v.clone(), -(a * get(r, &w)));
            }
            terms = next;
        }
        for (v, a) in terms {
            add_to(&mut out, v, a);
        }
    }
    clean(out)
}

/// `A_u = x_u − Σ_{u = v w, w ≠ ∅} η[w] x_v`, from the generating function
/// `(1 − x·z)^{-1}(1 − η(z))`.
pub fn boolean_appell_oracle(eta: &Coeffs, u: &Word) -> PolyMap {
    let mut out = PolyMap::new();
    add_to(&mut out, u.clone(), Scalar::one());
    for k in 0..u.len() {
        let v = u.slice(0, k);
        let w = u.slice(k, u.len());
        add_to(&mut out, v, -get(eta, &w));
    }
    clean(out)
}

pub fn random_algebra(r: &mut Rand, m: usize) -> TestAlgebra {
    let mu = (0..m)
        .map(|_| q(r.gen_range(0..=4), r.gen_range(1..=3)))
        .collect();
    let nu = (0..m)
        .map(|_| q(r.gen_range(0..=4), r.gen_range(1..=3)))
        .collect();
    TestAlgebra::unlabeled(mu, nu).unwrap()
}

pub fn random_element(r: &mut Rand, m: usize, support: &[usize]) -> Element {
    let mut v = vec![Scalar::zero(); m];
    for &p in support {
        v[p] = rational(r, -3, 3, 2);
    }
    Element::new(v)
}

/// `Σ_{π ∈ NC(n)} Π_{inner} ν[f_C] Π_{outer} μ[f_B]`, computed from the
/// point weights directly.
pub fn vacuum_oracle(alg: &TestAlgebra, fs: &[Element], outer_mu: bool) -> Scalar {
    let m = alg.len();
    let weight = |class: &[usize], w: &[Scalar]| -> Scalar {
        (0..m)
            .map(|p| class.iter().fold(w[p].clone(), |acc, &i| acc * fs[i].at(p)))
            .fold(Scalar::zero(), |a, b| a + b)
    };
    noncrossing(fs.len())
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(k, c)| {
                    if outer_mu && !is_inner(p, k) {
                        weight(c, alg.mu_weights())
                    } else {
                        weight(c, alg.nu_weights())
                    }
                })
                .fold(Scalar::one(), |a, b| a * b)
        })
        .fold(Scalar::zero(), |a, b| a + b)
}

/// Gram matrix is diagonal.
pub fn diagonal(m: &Matrix) -> bool {
    m.is_diagonal()
}
