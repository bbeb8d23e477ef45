use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cfree::appell::{
    cfree_appell, check_characterizations, free_appell, orthogonality_report, AppellMethod,
};
use cfree::fock::{
    appell_from_ks, apply_poly, factorization_check, joint_pair_from_fock, ks_poly,
    martingale_check, Element, FockVector, KsMethod, TestAlgebra,
};
use cfree::ncpoly::Poly;
use cfree::ncseries::Series;
use cfree::orthopoly::{
    check_mgf_strip_relation, check_ops_second_kind, jacobi_from_moments, moments_from_jacobi,
    mops, second_kind, PolyFamily,
};
use cfree::scalar::{format_rational, parse_rational};
use cfree::states::{
    boolean_cumulants, boolean_power, c_cumulant_identity_sides, convolve, free_cumulants,
    is_free_meixner, is_positive, moments_from_cumulants, phi_map, two_state_cumulants,
    two_state_cumulants_genfun, ConvolutionKind, CumulantKind, State, StatePair,
};
use cfree::wire;
use cfree::word::Word;
use cfree::{Error, Result};

const DEFAULT_MAX_COEFFS: u128 = 10_000_000;

#[derive(Parser)]
#[command(
    name = "cfree",
    version,
    about = "Exact two-state free probability toolkit"
)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Require inputs to have exactly this many variables.
    #[arg(long, global = true)]
    vars: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Latex,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Boolean,
    Free,
    TwoState,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvKind {
    Free,
    Boolean,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Genfun,
    Recursion,
    Explicit,
    Partition,
}

#[derive(Clone, Copy, ValueEnum)]
enum JacobiOp {
    /// Moments to Jacobi parameters.
    FromMoments,
    /// Jacobi parameters to moments (needs --degree).
    ToMoments,
    /// Drop the first entry of each sequence.
    Strip,
    /// Prepend β = 0, γ = 1.
    Unstrip,
}

#[derive(Args)]
struct Input {
    /// JSON input file; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Boolean, free or two-state cumulants of a state or pair.
    Cumulants {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "free")]
        kind: Kind,
        /// Two-state route: partition (default) or genfun.
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Moments from a cumulant series.
    Moments {
        #[command(flatten)]
        input: Input,
        /// ψ, needed for two-state cumulants.
        #[arg(long)]
        psi: Option<PathBuf>,
    },
    /// Free or Boolean convolution, or a Boolean convolution power.
    Convolve {
        #[arg(long, value_enum, default_value = "free")]
        kind: ConvKind,
        #[arg(long)]
        left: PathBuf,
        #[arg(long, required_unless_present = "power")]
        right: Option<PathBuf>,
        /// Boolean power of --left, as a rational.
        #[arg(long, conflicts_with = "right")]
        power: Option<String>,
    },
    /// The map ψ ↦ Φ[ψ].
    Phi {
        #[command(flatten)]
        input: Input,
    },
    /// Conversions between moments and Jacobi parameters.
    Jacobi {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "from-moments")]
        op: JacobiOp,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Monic orthogonal polynomials of a state.
    Mops {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Polynomials of the second kind of the MOPS of a state.
    SecondKind {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// c-free (or free, with --free) Appell polynomials of a pair.
    Appell {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value = "recursion")]
        method: Method,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Free Appell polynomials of ψ instead.
        #[arg(long)]
        free: bool,
        /// Emit the characterization report instead of the family.
        #[arg(long)]
        check: bool,
    },
    /// Kailath–Segall polynomial W(f_1, .., f_n) in the operators X(f_Λ).
    Ks {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        elements: PathBuf,
        #[arg(long, value_enum, default_value = "recursion")]
        method: Method,
    },
    /// Fock-space computations over a test algebra.
    Fock {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        elements: PathBuf,
        #[command(subcommand)]
        op: FockOp,
    },
    /// Identity and property checks.
    Check {
        #[command(subcommand)]
        what: CheckOp,
    },
}

#[derive(Subcommand)]
enum FockOp {
    /// The pair (φ, ψ) of the operators X(f_i).
    Pair {
        #[arg(long)]
        degree: usize,
    },
    /// Two-state and free cumulants of the operators X(f_i).
    Cumulants {
        #[arg(long)]
        degree: usize,
    },
    /// X(f_{w_1}) .. X(f_{w_n}) Ω for a 1-based word such as `1,2,1`.
    Apply {
        #[arg(long, value_delimiter = ',')]
        word: Vec<usize>,
    },
    /// Appell polynomial of the X(f_i) against the interval-partition W sum.
    AppellKs,
    /// Product formula for the given grouping of indices.
    Factorization {
        #[arg(long)]
        grouping: PathBuf,
    },
    /// Martingale property with the given increment elements.
    Martingale {
        #[arg(long)]
        increments: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
}

#[derive(Subcommand)]
enum CheckOp {
    /// Conditions (a), (b), (c) relating φ and ψ through second-kind polynomials.
    OpsSecondKind {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Characterizing properties of the c-free Appell family.
    Appell {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        degree: usize,
    },
    /// Orthogonality of the c-free Appell family.
    Orthogonality {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Free Meixner fit of a state.
    Meixner {
        #[command(flatten)]
        input: Input,
    },
    /// Positivity of the Gram matrix up to a degree.
    Positivity {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: usize,
    },
    /// `1 − (1 + M^μ)^{-1} = z² (1 + M^ν)` for a measure and its stripped version.
    MgfStrip {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
    },
    /// Relation between free, two-state cumulants and moments of a pair.
    CumulantIdentity {
        #[arg(long)]
        pair: PathBuf,
    },
}

enum Output {
    Json(Value),
    Text(String),
}

fn read_text(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("wire types serialize")
}

struct Budget {
    max_coeffs: u128,
    vars: Option<usize>,
}

impl Budget {
    fn check(&self, d: usize, degree: usize) -> Result<()> {
        if let Some(v) = self.vars {
            if v != d {
                return Err(Error::DimensionMismatch {
                    expected: v,
                    found: d,
                });
            }
        }
        Series::check_budget(d, degree, self.max_coeffs)
    }

    fn state(&self, s: &State) -> Result<()> {
        self.check(s.d(), s.trunc())
    }
}

fn load_state(path: Option<&Path>, budget: &Budget) -> Result<State> {
    let s = wire::parse_state(&read_text(path)?)?;
    budget.state(&s)?;
    Ok(s)
}

fn load_pair(path: &Path, budget: &Budget) -> Result<StatePair> {
    let p = wire::parse_pair(&read_text(Some(path))?)?;
    budget.state(&p.phi)?;
    Ok(p)
}

fn load_fock(algebra: &Path, elements: &Path) -> Result<(TestAlgebra, Vec<Element>)> {
    let alg = wire::parse_test_algebra(&read_text(Some(algebra))?)?;
    let raw: Vec<Vec<String>> = parse_json(&read_text(Some(elements))?)?;
    let elems = wire::elements_from_json(&raw, &alg)?;
    Ok((alg, elems))
}

fn appell_method(m: Method) -> Result<AppellMethod> {
    match m {
        Method::Genfun => Ok(AppellMethod::GenFun),
        Method::Recursion => Ok(AppellMethod::Recursion),
        Method::Explicit => Ok(AppellMethod::Explicit),
        Method::Partition => Err(Error::InvalidParameter(
            "method partition applies to cumulants only".into(),
        )),
    }
}

fn family_output<'a>(
    name: &str,
    d: usize,
    members: impl IntoIterator<Item = (&'a Word, &'a Poly)>,
    format: Format,
) -> Output {
    match format {
        Format::Json => Output::Json(to_value(&wire::family_to_json(d, members))),
        Format::Latex => Output::Text(wire::latex_family(name, members)),
    }
}

fn mops_of(s: &State, degree: usize) -> Result<PolyFamily> {
    mops(s, degree)?.ok_or_else(|| {
        Error::Precondition("state has no monic orthogonal polynomial system".into())
    })
}

fn run(cli: Cli, budget: &Budget) -> Result<Output> {
    match cli.command {
        Command::Cumulants {
            input,
            kind,
            method,
        } => {
            let text = read_text(input.input.as_deref())?;
            let c = match kind {
                Kind::Boolean | Kind::Free => {
                    let s = wire::parse_state(&text)?;
                    budget.state(&s)?;
                    if matches!(kind, Kind::Boolean) {
                        boolean_cumulants(&s)
                    } else {
                        free_cumulants(&s)
                    }
                }
                Kind::TwoState => {
                    let p = wire::parse_pair(&text)?;
                    budget.state(&p.phi)?;
                    match method.unwrap_or(Method::Partition) {
                        Method::Partition => two_state_cumulants(&p),
                        Method::Genfun => two_state_cumulants_genfun(&p),
                        _ => {
                            return Err(Error::InvalidParameter(
                                "two-state cumulants use --method partition or genfun".into(),
                            ))
                        }
                    }
                }
            };
            Ok(Output::Json(to_value(&wire::cumulants_to_json(&c))))
        }
        Command::Moments { input, psi } => {
            let c = wire::parse_cumulants(&read_text(input.input.as_deref())?)?;
            budget.check(c.series().d(), c.series().trunc())?;
            let aux = match psi {
                Some(p) => Some(load_state(Some(&p), budget)?),
                None => None,
            };
            if c.kind() == CumulantKind::TwoState && aux.is_none() {
                return Err(Error::Precondition("two-state cumulants need --psi".into()));
            }
            let s = moments_from_cumulants(&c, aux.as_ref())?;
            Ok(Output::Json(to_value(&wire::state_to_json(&s))))
        }
        Command::Convolve {
            kind,
            left,
            right,
            power,
        } => {
            let a = load_state(Some(&left), budget)?;
            let s = match (right, power) {
                (Some(r), None) => {
                    let b = load_state(Some(&r), budget)?;
                    let k = match kind {
                        ConvKind::Free => ConvolutionKind::Free,
                        ConvKind::Boolean => ConvolutionKind::Boolean,
                    };
                    convolve(k, &a, &b)?
                }
                (None, Some(t)) => {
                    if matches!(kind, ConvKind::Free) {
                        return Err(Error::InvalidParameter(
                            "--power needs --kind boolean".into(),
                        ));
                    }
                    boolean_power(&a, &parse_rational(&t)?)?
                }
                _ => unreachable!("clap enforces exactly one of --right/--power"),
            };
            Ok(Output::Json(to_value(&wire::state_to_json(&s))))
        }
        Command::Phi { input } => {
            let s = load_state(input.input.as_deref(), budget)?;
            Ok(Output::Json(to_value(&wire::state_to_json(&phi_map(&s)))))
        }
        Command::Jacobi { input, op, degree } => {
            let text = read_text(input.input.as_deref())?;
            let out = match op {
                JacobiOp::FromMoments => {
                    let s = wire::parse_state(&text)?;
                    budget.state(&s)?;
                    to_value(&wire::jacobi_to_json(&jacobi_from_moments(&s)?))
                }
                JacobiOp::ToMoments => {
                    let n = degree.ok_or_else(|| {
                        Error::Precondition("--degree is required for to-moments".into())
                    })?;
                    budget.check(1, n)?;
                    let j = wire::parse_jacobi(&text)?;
                    to_value(&wire::state_to_json(&moments_from_jacobi(&j, n)?))
                }
                JacobiOp::Strip => {
                    to_value(&wire::jacobi_to_json(&wire::parse_jacobi(&text)?.strip()?))
                }
                JacobiOp::Unstrip => {
                    to_value(&wire::jacobi_to_json(&wire::parse_jacobi(&text)?.unstrip()))
                }
            };
            Ok(Output::Json(out))
        }
        Command::Mops {
            input,
            degree,
            format,
        } => {
            let s = load_state(input.input.as_deref(), budget)?;
            let fam = mops_of(&s, degree)?;
            Ok(family_output("P", fam.d(), fam.iter(), format))
        }
        Command::SecondKind {
            input,
            degree,
            format,
        } => {
            let s = load_state(input.input.as_deref(), budget)?;
            let fam = mops_of(&s, degree + 1)?;
            let q = second_kind(&fam, &s)?;
            Ok(family_output("Q", q.d(), q.iter(), format))
        }
        Command::Appell {
            pair,
            degree,
            method,
            format,
            free,
            check,
        } => {
            let p = load_pair(&pair, budget)?;
            let fam = if free {
                free_appell(&p.psi, degree)?
            } else {
                cfree_appell(&p, degree, appell_method(method)?)?
            };
            if check {
                return Ok(Output::Json(characterization_json(
                    &check_characterizations(&fam)?,
                )));
            }
            Ok(family_output("A", fam.d(), fam.iter(), format))
        }
        Command::Ks {
            algebra,
            elements,
            method,
        } => {
            let (alg, elems) = load_fock(&algebra, &elements)?;
            let m = match method {
                Method::Recursion => KsMethod::Recursion,
                Method::Explicit => KsMethod::Explicit,
                _ => {
                    return Err(Error::InvalidParameter(
                        "ks uses --method recursion or explicit".into(),
                    ))
                }
            };
            let e = ks_poly(&alg, &elems, m)?;
            Ok(Output::Json(
                json!({ "terms": to_value(&wire::ks_expr_to_json(&e)) }),
            ))
        }
        Command::Fock {
            algebra,
            elements,
            op,
        } => {
            let (alg, elems) = load_fock(&algebra, &elements)?;
            run_fock(&alg, &elems, op, budget)
        }
        Command::Check { what } => run_check(what, budget),
    }
}

fn characterization_json(r: &cfree::appell::CharacterizationReport) -> Value {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| json!({ "word": v.word.one_based(), "law": format!("{:?}", v.law) }))
        .collect();
    json!({ "passed": r.passed(), "words_checked": r.words_checked, "violations": violations })
}

fn rationals(v: &[cfree::Scalar]) -> Value {
    Value::from(v.iter().map(format_rational).collect::<Vec<_>>())
}

fn run_fock(alg: &TestAlgebra, elems: &[Element], op: FockOp, budget: &Budget) -> Result<Output> {
    let d = elems.len();
    match op {
        FockOp::Pair { degree } => {
            budget.check(d, degree)?;
            let p = joint_pair_from_fock(alg, elems, degree)?;
            Ok(Output::Json(to_value(&wire::pair_to_json(&p))))
        }
        FockOp::Cumulants { degree } => {
            budget.check(d, degree)?;
            let p = joint_pair_from_fock(alg, elems, degree)?;
            Ok(Output::Json(json!({
                "two_state": to_value(&wire::cumulants_to_json(&two_state_cumulants(&p))),
                "free": to_value(&wire::cumulants_to_json(&free_cumulants(&p.psi))),
            })))
        }
        FockOp::Apply { word } => {
            let w = Word::from_one_based(&word, d)?;
            let v = apply_poly(
                alg,
                elems,
                &Poly::monomial(d, w.clone()),
                &FockVector::vacuum(w.len()),
            )?;
            Ok(Output::Json(to_value(&wire::fock_vector_to_json(&v))))
        }
        FockOp::AppellKs => {
            let r = appell_from_ks(alg, elems)?;
            Ok(Output::Json(json!({
                "equal": r.equal,
                "lhs": to_value(&wire::fock_vector_to_json(&r.lhs)),
                "rhs": to_value(&wire::fock_vector_to_json(&r.rhs)),
            })))
        }
        FockOp::Factorization { grouping } => {
            let g = wire::parse_partition(&read_text(Some(&grouping))?)?;
            let r = factorization_check(alg, elems, &g)?;
            Ok(Output::Json(json!({
                "holds": r.holds(),
                "polynomial": r.polynomial,
                "vacuum": r.vacuum,
                "matrix_elements": r.matrix_elements,
            })))
        }
        FockOp::Martingale { increments, degree } => {
            let raw: Vec<Vec<String>> = parse_json(&read_text(Some(&increments))?)?;
            let ys = wire::elements_from_json(&raw, alg)?;
            Ok(Output::Json(
                json!({ "holds": martingale_check(alg, elems, &ys, degree)? }),
            ))
        }
    }
}

fn run_check(what: CheckOp, budget: &Budget) -> Result<Output> {
    let v = match what {
        CheckOp::OpsSecondKind { phi, psi, degree } => {
            let phi = load_state(Some(&phi), budget)?;
            let psi = load_state(Some(&psi), budget)?;
            let r = check_ops_second_kind(&phi, &psi, degree)?;
            json!({ "a": r.a_holds, "b": r.b_holds, "c": r.c_holds })
        }
        CheckOp::Appell { pair, degree } => {
            let p = load_pair(&pair, budget)?;
            let fam = cfree_appell(&p, degree, AppellMethod::Recursion)?;
            characterization_json(&check_characterizations(&fam)?)
        }
        CheckOp::Orthogonality { pair } => {
            let p = load_pair(&pair, budget)?;
            let r = orthogonality_report(&p)?;
            let params = r
                .meixner_params
                .as_ref()
                .map(|(b, c)| json!({ "b": rationals(b), "c": rationals(c) }))
                .unwrap_or(Value::Null);
            json!({
                "degree_one_orthogonal": r.degree_one_orthogonal,
                "fully_orthogonal": r.fully_orthogonal,
                "meixner": params,
            })
        }
        CheckOp::Meixner { input } => {
            let s = load_state(input.input.as_deref(), budget)?;
            match is_free_meixner(&s)? {
                None => json!({ "free_meixner": false }),
                Some(fit) => {
                    let (b, c) = fit.diagonal_parameters();
                    json!({ "free_meixner": true, "b": rationals(&b), "c": rationals(&c) })
                }
            }
        }
        CheckOp::Positivity { input, degree } => {
            let s = load_state(input.input.as_deref(), budget)?;
            json!({ "positive": is_positive(&s, degree)? })
        }
        CheckOp::MgfStrip { mu, nu } => {
            let mu = load_state(Some(&mu), budget)?;
            let nu = load_state(Some(&nu), budget)?;
            json!({ "holds": check_mgf_strip_relation(&mu, &nu)? })
        }
        CheckOp::CumulantIdentity { pair } => {
            let p = load_pair(&pair, budget)?;
            let (lhs, rhs) = c_cumulant_identity_sides(&p)?;
            json!({ "holds": lhs == rhs })
        }
    };
    Ok(Output::Json(v))
}

fn max_coeffs() -> std::result::Result<u128, String> {
    match std::env::var("CFREE_MAX_COEFFS") {
        Err(_) => Ok(DEFAULT_MAX_COEFFS),
        Ok(v) => v
            .trim()
            .parse::<u128>()
            .map_err(|_| format!("CFREE_MAX_COEFFS must be a nonnegative integer, got {v:?}")),
    }
}

fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limit = match max_coeffs() {
        Ok(l) => l,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let output = cli.output.clone();
    let budget = Budget {
        max_coeffs: limit,
        vars: cli.vars,
    };
    match run(cli, &budget) {
        Ok(out) => {
            let text = match out {
                Output::Json(v) => {
                    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
                    s.push('\n');
                    s
                }
                Output::Text(s) => s,
            };
            if let Err(e) = emit(output.as_deref(), &text) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::to_string(&json!({ "error": e.to_string() })).expect("json");
            println!("{body}");
            ExitCode::from(1)
        }
    }
}
