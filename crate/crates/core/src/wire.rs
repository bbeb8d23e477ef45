//! JSON wire formats and a LaTeX emitter.
//!
//! Rationals travel as decimal strings (`"num"`/`"den"` pairs in term lists,
//! `"p/q"` elsewhere). Words are 1-based lists of variable indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Element, FockVector, KsExpr, TestAlgebra};
use crate::ncpoly::Poly;
use crate::ncseries::Series;
use crate::orthopoly::{JacobiParams, PolyFamily};
use crate::partitions::SetPartition;
use crate::scalar::{format_rational, parse_bigint, parse_rational, Scalar};
use crate::states::{CumulantKind, CumulantSeries, State, StatePair};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub word: Vec<usize>,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub d: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub d: usize,
    pub trunc_degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub d: usize,
    pub trunc_degree: usize,
    pub moments: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairJson {
    pub phi: StateJson,
    pub psi: StateJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CumulantsJson {
    pub kind: String,
    pub d: usize,
    pub trunc_degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiJson {
    pub beta: Vec<String>,
    pub gamma: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestAlgebraJson {
    pub points: Vec<String>,
    pub mu_weights: Vec<String>,
    pub nu_weights: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberJson {
    pub index: Vec<usize>,
    pub poly: PolyJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub d: usize,
    pub members: Vec<MemberJson>,
}

fn term_json(w: &Word, c: &Scalar) -> TermJson {
    TermJson {
        word: w.one_based(),
        num: c.numer().to_string(),
        den: c.denom().to_string(),
    }
}

fn term_value(t: &TermJson, d: usize) -> Result<(Word, Scalar)> {
    let num = parse_bigint(&t.num)?;
    let den = parse_bigint(&t.den)?;
    if num_traits::Zero::is_zero(&den) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok((Word::from_one_based(&t.word, d)?, Scalar::new(num, den)))
}

fn terms_value(ts: &[TermJson], d: usize) -> Result<Vec<(Word, Scalar)>> {
    ts.iter().map(|t| term_value(t, d)).collect()
}

fn check_d(d: usize) -> Result<()> {
    if d > 255 {
        return Err(Error::SizeOutOfRange {
            n: d,
            min: 0,
            max: 255,
        });
    }
    Ok(())
}

pub fn poly_to_json(p: &Poly) -> PolyJson {
    PolyJson {
        d: p.d(),
        terms: p.terms().map(|(w, c)| term_json(w, c)).collect(),
    }
}

pub fn poly_from_json(j: &PolyJson) -> Result<Poly> {
    check_d(j.d)?;
    Poly::from_terms(j.d, terms_value(&j.terms, j.d)?)
}

pub fn series_to_json(s: &Series) -> SeriesJson {
    SeriesJson {
        d: s.d(),
        trunc_degree: s.trunc(),
        terms: s.terms().map(|(w, c)| term_json(w, c)).collect(),
    }
}

pub fn series_from_json(j: &SeriesJson) -> Result<Series> {
    check_d(j.d)?;
    Series::from_terms(j.d, j.trunc_degree, terms_value(&j.terms, j.d)?)
}

/// Moments of nonempty words; the empty word is implicit.
pub fn state_to_json(s: &State) -> StateJson {
    StateJson {
        d: s.d(),
        trunc_degree: s.trunc(),
        moments: s
            .one_plus_mgf()
            .terms()
            .filter(|(w, _)| !w.is_empty())
            .map(|(w, c)| term_json(w, c))
            .collect(),
    }
}

pub fn state_from_json(j: &StateJson) -> Result<State> {
    check_d(j.d)?;
    State::new(j.d, j.trunc_degree, terms_value(&j.moments, j.d)?)
}

pub fn pair_to_json(p: &StatePair) -> PairJson {
    PairJson {
        phi: state_to_json(&p.phi),
        psi: state_to_json(&p.psi),
    }
}

pub fn pair_from_json(j: &PairJson) -> Result<StatePair> {
    StatePair::new(state_from_json(&j.phi)?, state_from_json(&j.psi)?)
}

pub fn cumulants_to_json(c: &CumulantSeries) -> CumulantsJson {
    let s = c.series();
    CumulantsJson {
        kind: c.kind().name().to_string(),
        d: s.d(),
        trunc_degree: s.trunc(),
        terms: s.terms().map(|(w, c)| term_json(w, c)).collect(),
    }
}

pub fn cumulants_from_json(j: &CumulantsJson) -> Result<CumulantSeries> {
    check_d(j.d)?;
    let kind = CumulantKind::from_name(&j.kind)?;
    CumulantSeries::new(
        kind,
        Series::from_terms(j.d, j.trunc_degree, terms_value(&j.terms, j.d)?)?,
    )
}

pub fn jacobi_to_json(j: &JacobiParams) -> JacobiJson {
    JacobiJson {
        beta: j.beta().iter().map(format_rational).collect(),
        gamma: j.gamma().iter().map(format_rational).collect(),
    }
}

pub fn jacobi_from_json(j: &JacobiJson) -> Result<JacobiParams> {
    let beta = j
        .beta
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_>>()?;
    let gamma = j
        .gamma
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_>>()?;
    JacobiParams::new(beta, gamma)
}

pub fn test_algebra_to_json(a: &TestAlgebra) -> TestAlgebraJson {
    TestAlgebraJson {
        points: a.points().to_vec(),
        mu_weights: a.mu_weights().iter().map(format_rational).collect(),
        nu_weights: a.nu_weights().iter().map(format_rational).collect(),
    }
}

pub fn test_algebra_from_json(j: &TestAlgebraJson) -> Result<TestAlgebra> {
    let mu = j
        .mu_weights
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_>>()?;
    let nu = j
        .nu_weights
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_>>()?;
    TestAlgebra::new(j.points.clone(), mu, nu)
}

pub fn partition_to_json(p: &SetPartition) -> Vec<Vec<usize>> {
    p.to_one_based()
}

pub fn partition_from_json(classes: &[Vec<usize>]) -> Result<SetPartition> {
    SetPartition::from_one_based(classes)
}

pub fn family_to_json<'a>(
    d: usize,
    members: impl IntoIterator<Item = (&'a Word, &'a Poly)>,
) -> FamilyJson {
    FamilyJson {
        d,
        members: members
            .into_iter()
            .map(|(w, p)| MemberJson {
                index: w.one_based(),
                poly: poly_to_json(p),
            })
            .collect(),
    }
}

pub fn family_from_json(j: &FamilyJson) -> Result<PolyFamily> {
    check_d(j.d)?;
    let mut polys = std::collections::BTreeMap::new();
    for m in &j.members {
        if m.poly.d != j.d {
            return Err(Error::DimensionMismatch {
                expected: j.d,
                found: m.poly.d,
            });
        }
        polys.insert(
            Word::from_one_based(&m.index, j.d)?,
            poly_from_json(&m.poly)?,
        );
    }
    PolyFamily::new(j.d, polys)
}

/// Algebra elements as lists of rational strings, one value per point.
pub fn elements_from_json(j: &[Vec<String>], alg: &TestAlgebra) -> Result<Vec<Element>> {
    j.iter()
        .map(|vals| {
            alg.element(
                vals.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<_>>()?,
            )
        })
        .collect()
}

pub fn elements_to_json(es: &[Element]) -> Vec<Vec<String>> {
    es.iter()
        .map(|e| e.values().iter().map(format_rational).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeJson {
    /// 1-based point indices; empty for the vacuum.
    pub tensor: Vec<usize>,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockVectorJson {
    pub trunc_depth: usize,
    pub amplitudes: Vec<AmplitudeJson>,
}

pub fn fock_vector_to_json(v: &FockVector) -> FockVectorJson {
    FockVectorJson {
        trunc_depth: v.trunc(),
        amplitudes: v
            .terms()
            .map(|(t, c)| AmplitudeJson {
                tensor: t.iter().map(|p| p + 1).collect(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KsTermJson {
    /// The factors `X(f_Λ)` left to right, each `Λ` as 1-based indices.
    pub ops: Vec<Vec<usize>>,
    pub num: String,
    pub den: String,
}

pub fn ks_expr_to_json(e: &KsExpr) -> Vec<KsTermJson> {
    e.iter()
        .map(|(ops, c)| KsTermJson {
            ops: ops
                .iter()
                .map(|&m| {
                    (0..32)
                        .filter(|i| m & (1 << i) != 0)
                        .map(|i| i + 1)
                        .collect()
                })
                .collect(),
            num: c.numer().to_string(),
            den: c.denom().to_string(),
        })
        .collect()
}

fn parse<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_poly(s: &str) -> Result<Poly> {
    poly_from_json(&parse(s)?)
}

pub fn parse_series(s: &str) -> Result<Series> {
    series_from_json(&parse(s)?)
}

pub fn parse_state(s: &str) -> Result<State> {
    state_from_json(&parse(s)?)
}

pub fn parse_pair(s: &str) -> Result<StatePair> {
    pair_from_json(&parse(s)?)
}

pub fn parse_cumulants(s: &str) -> Result<CumulantSeries> {
    cumulants_from_json(&parse(s)?)
}

pub fn parse_jacobi(s: &str) -> Result<JacobiParams> {
    jacobi_from_json(&parse(s)?)
}

pub fn parse_test_algebra(s: &str) -> Result<TestAlgebra> {
    test_algebra_from_json(&parse(s)?)
}

pub fn parse_partition(s: &str) -> Result<SetPartition> {
    partition_from_json(&parse::<Vec<Vec<usize>>>(s)?)
}

pub fn parse_family(s: &str) -> Result<PolyFamily> {
    family_from_json(&parse(s)?)
}

/// `x_{1}^{2} x_{2}`-style rendering of a monomial; the empty word is `1`.
pub fn latex_word(w: &Word) -> String {
    let letters = w.one_based();
    if letters.is_empty() {
        return "1".into();
    }
    let mut out = String::new();
    let mut i = 0;
    while i < letters.len() {
        let mut j = i;
        while j < letters.len() && letters[j] == letters[i] {
            j += 1;
        }
        out.push_str(&format!("x_{{{}}}", letters[i]));
        if j - i > 1 {
            out.push_str(&format!("^{{{}}}", j - i));
        }
        i = j;
    }
    out
}

fn latex_abs(q: &Scalar) -> String {
    if q.is_integer() {
        q.numer().magnitude().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer().magnitude(), q.denom())
    }
}

/// Terms from the highest degree down, signs folded into the operators.
pub fn latex_poly(p: &Poly) -> String {
    let mut terms: Vec<(&Word, &Scalar)> = p.terms().collect();
    if terms.is_empty() {
        return "0".into();
    }
    terms.reverse();
    let mut out = String::new();
    for (k, (w, c)) in terms.iter().enumerate() {
        let negative = num_traits::Signed::is_negative(*c);
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let unit = num_traits::Signed::abs(*c) == crate::scalar::one();
        if w.is_empty() {
            out.push_str(&latex_abs(c));
        } else {
            if !unit {
                out.push_str(&latex_abs(c));
                out.push(' ');
            }
            out.push_str(&latex_word(w));
        }
    }
    out
}

/// An `align*` block with one line per family member.
pub fn latex_family<'a>(
    name: &str,
    members: impl IntoIterator<Item = (&'a Word, &'a Poly)>,
) -> String {
    let mut out = String::from("\\begin{align*}\n");
    for (w, p) in members {
        let idx: Vec<String> = w.one_based().iter().map(|l| l.to_string()).collect();
        let sub = if idx.is_empty() {
            "\\emptyset".to_string()
        } else {
            idx.join("")
        };
        out.push_str(&format!("{name}_{{{sub}}} &= {} \\\\\n", latex_poly(p)));
    }
    out.push_str("\\end{align*}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};
    use crate::states::{named_state, NamedState};

    #[test]
    fn poly_round_trip() {
        let p = Poly::from_terms(
            2,
            [
                (Word::new(vec![0, 1]), frac(-3, 4)),
                (Word::empty(), int(2)),
                (Word::new(vec![1]), int(1)),
            ],
        )
        .unwrap();
        let j = serde_json::to_string(&poly_to_json(&p)).unwrap();
        assert_eq!(parse_poly(&j).unwrap(), p);
        assert!(j.contains(r#"{"word":[1,2],"num":"-3","den":"4"}"#));
    }

    #[test]
    fn state_round_trip() {
        let s = named_state(
            &NamedState::Semicircle {
                mean: frac(1, 2),
                variance: int(2),
            },
            5,
        )
        .unwrap();
        let j = serde_json::to_string(&state_to_json(&s)).unwrap();
        assert_eq!(parse_state(&j).unwrap(), s);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_poly(r#"{"d":1,"terms":[{"word":[2],"num":"1","den":"1"}]}"#).is_err());
        assert!(parse_poly(r#"{"d":1,"terms":[{"word":[1],"num":"1","den":"0"}]}"#).is_err());
        assert!(parse_poly(r#"{"d":1,"terms":[{"word":[0],"num":"1","den":"1"}]}"#).is_err());
        assert!(parse_jacobi(r#"{"beta":["x"],"gamma":[]}"#).is_err());
        assert!(parse_partition("[[1,2],[2]]").is_err());
        assert!(parse_state(r#"{"d":1,"trunc_degree":2,"moments":[],"extra":1}"#).is_err());
    }

    #[test]
    fn jacobi_and_algebra_round_trip() {
        let j = JacobiParams::new(vec![int(0), frac(1, 2)], vec![int(1), frac(3, 2)]).unwrap();
        let text = serde_json::to_string(&jacobi_to_json(&j)).unwrap();
        assert_eq!(text, r#"{"beta":["0","1/2"],"gamma":["1","3/2"]}"#);
        assert_eq!(parse_jacobi(&text).unwrap(), j);
        let a = TestAlgebra::unlabeled(vec![int(1), frac(1, 3)], vec![int(0), int(2)]).unwrap();
        let text = serde_json::to_string(&test_algebra_to_json(&a)).unwrap();
        assert_eq!(parse_test_algebra(&text).unwrap(), a);
    }

    #[test]
    fn latex_rendering() {
        let p = Poly::from_terms(
            2,
            [
                (Word::new(vec![0, 0, 1]), int(1)),
                (Word::new(vec![1]), frac(-1, 2)),
                (Word::empty(), int(-3)),
            ],
        )
        .unwrap();
        assert_eq!(latex_poly(&p), r"x_{1}^{2}x_{2} - \frac{1}{2} x_{2} - 3");
        assert_eq!(latex_poly(&Poly::zero(1)), "0");
    }
}
