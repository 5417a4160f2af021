//! Command-line front end: `structure`, `verify` and `eval`.
//!
//! Exit codes: 0 when everything holds, 1 when a verified property fails,
//! 2 for usage and input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::chainring::{FieldSpec, GaloisRing, Gr};
use crate::gamma::{GammaModule, GammaVectorJson};
use crate::omega::{rho, BigOmega, MediumOmega, SmallOmega};
use crate::suite::{self, field_of_order, SuiteError, SuiteOptions};
use crate::tense::{chern, tense_product, valuation};
use crate::transfer::{Laws, PolyLaw, Subspace};
use crate::wmodule::{is_perfect, ModuleJson, TorsionModule};
use crate::wrinkle::{galois_isomorphism, lift_2flat, psi2, FlatAlgebra, FpAlgebra, StructureConstants, WrinkleError, WrinkledAlgebra};

#[derive(Parser, Debug)]
#[command(name = "witt-omega", version, about = "Divided powers, Omega powers, transfers and Witt vector lifts over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Invariant factors and pairing certificates of a functor applied to a module.
    Structure(StructureArgs),
    /// Run a verification suite and print a JSON-lines report.
    Verify(VerifyArgs),
    /// Evaluate symbols, pairings, transfers, rho and lifts on JSON input files.
    Eval(EvalArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Functor {
    Gamma,
    Omega,
    BigOmega,
    SmallOmega,
    Tense,
    Chern,
}

#[derive(Args, Debug)]
pub struct StructureArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    /// Level: the module is over W_m(F_(p^r)).
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Weights w_i; the i-th summand is W_(m - w_i).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<u32>>,
    /// Rank of a free module (all weights zero).
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long, value_enum)]
    pub functor: Functor,
    /// Omega powers use n directly; gamma uses degree p^n.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Divided power degree for `gamma`, overriding --n.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Weights of the second factor for `tense`; defaults to the dual module.
    #[arg(long, value_delimiter = ',')]
    pub other_weights: Option<Vec<u32>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// One of witt, duality, omega, transfer, integral, wrinkle, tense, all.
    pub name: Option<String>,
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub dmax: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the elapsed time on stderr.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    Symbol,
    Pairing,
    Transfer,
    Rho,
    Lift,
    Psi2,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub kind: EvalKind,
    #[arg(required = true, num_args = 1..=2)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{file}: schema violation at {pointer}: {message}")]
    Schema { file: String, pointer: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Suite(#[from] SuiteError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// A finished command: the document to print and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn doc(v: &Value, code: i32) -> Output {
    Output { text: format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")), code }
}

/// Parses the arguments and runs the command; help and parse errors come back
/// with clap's message and exit code.
pub fn run_from<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match execute(&cli) {
            Ok(out) => out,
            Err(e) => Output { text: format!("error: {e}\n"), code: e.exit_code() },
        },
        Err(e) => Output { text: e.render().to_string(), code: e.exit_code() },
    }
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Structure(a) => structure(a),
        Command::Verify(a) => verify(a),
        Command::Eval(a) => eval(a),
    }
}

/// Where the output goes: `--out` if given, else stdout.
pub fn out_path(cli: &Cli) -> Option<&Path> {
    match &cli.command {
        Command::Structure(a) => a.out.as_deref(),
        Command::Verify(a) => a.out.as_deref(),
        Command::Eval(a) => a.out.as_deref(),
    }
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let out = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match out_path(&cli) {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{}", out.text),
    }
    out.code
}

// ---------------------------------------------------------------- structure

fn module_from_flags(a: &StructureArgs) -> Result<TorsionModule, CliError> {
    let field = FieldSpec::new(a.p, a.r).map_err(usage)?;
    let weights = match (&a.weights, a.dims) {
        (Some(w), Some(d)) if w.len() != d => return Err(usage(format!("--dims {d} disagrees with {} weights", w.len()))),
        (Some(w), _) => w.clone(),
        (None, Some(d)) => vec![0; d],
        (None, None) => return Err(usage("one of --weights or --dims is required")),
    };
    if a.m == 0 {
        return Err(usage("--m must be positive"));
    }
    TorsionModule::new(field, a.m, weights).map_err(usage)
}

fn factors(m: &TorsionModule) -> Vec<u64> {
    m.orders().into_iter().map(|e| m.field.p.pow(e)).collect()
}

fn diagonal_perfect(ring: GaloisRing, gram: &[Gr], log: u64) -> bool {
    let n = gram.len();
    let rows = (0..n).map(|i| (0..n).map(|j| if i == j { gram[i] } else { Gr::ZERO }).collect()).collect();
    is_perfect(ring, rows, n, log, log)
}

fn sorted_levels(m: &TorsionModule) -> Vec<u32> {
    let mut v: Vec<u32> = m.orders().into_iter().filter(|&e| e > 0).collect();
    v.sort_unstable();
    v
}

fn structure(a: &StructureArgs) -> Result<Output, CliError> {
    let base = module_from_flags(a)?;
    let p = base.field.p;
    let head = json!({ "functor": a.functor.to_possible_value().map(|v| v.get_name().to_string()), "module": base.to_json() });
    let mut body = match a.functor {
        Functor::Gamma => {
            let degree = match a.degree {
                Some(d) => d,
                None => (p as u32).checked_pow(a.n).ok_or_else(|| usage("degree overflows"))?,
            };
            let g = GammaModule::new(&base, degree).map_err(usage)?;
            let perfect = match g.p_exponent() {
                Ok(n) => {
                    let level = base.m + n;
                    let gram: Result<Vec<Gr>, _> =
                        (0..g.dim()).map(|i| g.pairing_at(&g.basis_element(i), &g.basis_element(i), level)).collect();
                    gram.ok().map(|gram| diagonal_perfect(base.field.ring(level), &gram, g.module.log_card()))
                }
                Err(_) => None,
            };
            json!({
                "degree": degree,
                "level": g.module.m,
                "basis": g.basis,
                "orders": g.module.orders(),
                "factors": factors(&g.module),
                "invariant_levels": sorted_levels(&g.module),
                "log_card": g.module.log_card(),
                "pairing_perfect": perfect,
            })
        }
        Functor::Omega => {
            let o = MediumOmega::new(&base, a.n).map_err(usage)?;
            json!({
                "n": a.n,
                "level": o.module.m,
                "basis": o.gamma.basis,
                "orders": o.module.orders(),
                "factors": factors(&o.module),
                "invariant_levels": sorted_levels(&o.module),
                "log_card": o.module.log_card(),
                "pairing_perfect": diagonal_perfect(o.module.ring(), &o.gram(), o.module.log_card()),
            })
        }
        Functor::BigOmega => {
            let b = BigOmega::new(&base, a.n).map_err(usage)?;
            let m = b.module();
            json!({
                "n": a.n,
                "level": m.m,
                "basis": b.stages[a.n as usize].basis,
                "orders": m.orders(),
                "factors": factors(m),
                "invariant_levels": sorted_levels(m),
                "log_card": m.log_card(),
                "pairing_perfect": diagonal_perfect(m.ring(), b.gram(), m.log_card()),
            })
        }
        Functor::SmallOmega => {
            let s = SmallOmega::new(&base, a.n).map_err(usage)?;
            let levels = s.invariant_levels();
            json!({
                "n": a.n,
                "level": s.medium.module.m,
                "invariant_levels": levels,
                "factors": levels.iter().map(|&e| p.pow(e)).collect::<Vec<_>>(),
                "log_card": s.log_card(),
                "pairing_perfect": s.pairing_is_perfect(&s.clone()),
            })
        }
        Functor::Tense => {
            let other = match &a.other_weights {
                Some(w) => TorsionModule::new(base.field, base.m, w.clone()).map_err(usage)?,
                None => base.dual(),
            };
            let (t, _) = tense_product(&base, &other, base.m);
            json!({
                "other": other.to_json(),
                "level": t.m,
                "orders": t.orders(),
                "factors": factors(&t),
                "invariant_levels": sorted_levels(&t),
                "valuation": valuation(&t),
                "chern": chern(&t),
            })
        }
        Functor::Chern => {
            let c = chern(&base);
            json!({ "level": base.m, "chern": c, "v_x": c.v_x(), "valuation": valuation(&base) })
        }
    };
    let obj = body.as_object_mut().expect("object");
    for (k, v) in head.as_object().expect("object") {
        obj.insert(k.clone(), v.clone());
    }
    Ok(doc(&body, 0))
}

// ------------------------------------------------------------------- verify

fn verify(a: &VerifyArgs) -> Result<Output, CliError> {
    let name = match (&a.name, &a.suite) {
        (Some(x), Some(y)) if x != y => return Err(usage(format!("suite given twice: {x} and {y}"))),
        (Some(x), _) | (None, Some(x)) => x.clone(),
        (None, None) => return Err(usage("a suite name is required")),
    };
    if a.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let opts = SuiteOptions { seed: a.seed, jobs: a.jobs, q: a.q, dmax: a.dmax };
    let start = Instant::now();
    let report = suite::run(&name, &opts)?;
    if a.timing {
        eprintln!("{name}: {} checks in {:.3} s", report.checks.len(), start.elapsed().as_secs_f64());
    }
    let code = if report.passed() { 0 } else { 1 };
    Ok(Output { text: report.to_json_lines(), code })
}

// --------------------------------------------------------------------- eval

/// JSON pointer of a deserialization path.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn read_input<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let file = path.display().to_string();
        if e.inner().is_syntax() || e.inner().is_eof() {
            CliError::Schema { file, pointer: "/".into(), message: format!("malformed JSON: {}", e.inner()) }
        } else {
            CliError::Schema { file, pointer: pointer(e.path()), message: e.inner().to_string() }
        }
    })
}

fn schema(path: &Path, pointer: impl Into<String>, message: impl std::fmt::Display) -> CliError {
    CliError::Schema { file: path.display().to_string(), pointer: pointer.into(), message: message.to_string() }
}

/// An element of `Gamma^degree(M)`: either the symbol of a point, or an
/// explicit vector in the composition basis.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct GammaElementInput {
    pub module: ModuleJson,
    pub degree: u32,
    #[serde(default)]
    pub point: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    pub vector: Option<GammaVectorJson>,
}

struct GammaElement {
    gamma: GammaModule,
    value: Vec<Gr>,
}

fn load_gamma_element(path: &Path) -> Result<GammaElement, CliError> {
    let input: GammaElementInput = read_input(path)?;
    let base = TorsionModule::from_json(&input.module).map_err(|e| schema(path, "/module", e))?;
    let gamma = GammaModule::new(&base, input.degree).map_err(|e| schema(path, "/degree", e))?;
    let value = match (&input.point, &input.vector) {
        (Some(x), None) => {
            let point = module_point(&base, x).map_err(|(ptr, msg)| schema(path, format!("/point{ptr}"), msg))?;
            gamma.symbol(&point)
        }
        (None, Some(v)) => gamma.from_json(v).map_err(|e| schema(path, "/vector", e))?,
        _ => return Err(schema(path, "/", "exactly one of `point` and `vector` is required")),
    };
    Ok(GammaElement { gamma, value })
}

/// Coordinates given as coefficient arrays of length `r`.
fn module_point(m: &TorsionModule, x: &[Vec<u64>]) -> Result<Vec<Gr>, (String, String)> {
    if x.len() != m.dim() {
        return Err((String::new(), format!("expected {} coordinates, got {}", m.dim(), x.len())));
    }
    let ring = m.ring();
    let mut out = Vec::new();
    for (i, c) in x.iter().enumerate() {
        if c.len() != m.field.r {
            return Err((format!("/{i}"), format!("expected {} coefficients, got {}", m.field.r, c.len())));
        }
        out.push(ring.from_coeffs(c));
    }
    Ok(m.reduce(&out))
}

fn field_point(field: FieldSpec, x: &[Vec<u64>]) -> Result<Vec<Gr>, (String, String)> {
    let k = field.field();
    x.iter()
        .enumerate()
        .map(|(i, c)| {
            if c.len() != field.r {
                return Err((format!("/{i}"), format!("expected {} coefficients, got {}", field.r, c.len())));
            }
            Ok(k.from_coeffs(c))
        })
        .collect()
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct TransferInput {
    pub q: u64,
    pub d: usize,
    /// Basis of the subspace `W`, as vectors of `F_q` elements.
    pub subspace: Vec<Vec<Vec<u64>>>,
    #[serde(default)]
    pub point: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    pub max_degree: Option<u64>,
}

#[derive(Serialize)]
struct LawTermJson {
    #[serde(rename = "A")]
    a: Vec<u32>,
    value: Vec<Vec<u64>>,
}

/// `{"q", "dims": [d_in, d_out], "degree", "coeffs": [{"A", "value"}]}`.
fn law_json(law: &PolyLaw) -> Value {
    let k = law.field.field();
    let mut monomials: Vec<&Vec<u32>> = law.coords.iter().flat_map(|c| c.terms.keys()).collect();
    monomials.sort();
    monomials.dedup();
    let coeffs: Vec<LawTermJson> = monomials
        .into_iter()
        .map(|a| LawTermJson { a: a.clone(), value: law.coords.iter().map(|c| k.coeffs(c.coeff(a))).collect() })
        .collect();
    json!({ "q": law.field.q(), "dims": [law.source_dim, law.target_dim()], "degree": law.degree, "coeffs": coeffs })
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub p: u64,
    pub r: usize,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct RhoInput {
    pub factors: Vec<FieldJson>,
    pub m: u32,
    pub n: u32,
    /// Coordinates of an element of `W_m(E)` over `Z/p^m`.
    #[serde(default)]
    pub point: Option<Vec<u64>>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct AlgebraInput {
    pub p: u64,
    pub level: u32,
    pub table: Vec<Vec<Vec<u64>>>,
    pub unit: Vec<u64>,
    /// Values of the divided power on kernel elements, for `lift`.
    #[serde(default)]
    pub gamma: Option<Vec<(Vec<u64>, Vec<u64>)>>,
}

fn eval(a: &EvalArgs) -> Result<Output, CliError> {
    let want = if a.kind == EvalKind::Pairing { 2 } else { 1 };
    if a.files.len() != want {
        return Err(usage(format!("eval {:?} takes {want} input file(s)", a.kind).to_lowercase()));
    }
    let file = &a.files[0];
    match a.kind {
        EvalKind::Symbol => {
            let e = load_gamma_element(file)?;
            Ok(doc(&json!({ "element": e.gamma.to_json(&e.value), "orders": e.gamma.module.orders() }), 0))
        }
        EvalKind::Pairing => {
            let x = load_gamma_element(file)?;
            let y = load_gamma_element(&a.files[1])?;
            if x.gamma.base != y.gamma.base || x.gamma.degree != y.gamma.degree {
                return Err(schema(&a.files[1], "/", "the two elements live in different divided powers"));
            }
            let n = x.gamma.p_exponent().map_err(|e| schema(file, "/degree", e))?;
            let level = x.gamma.base.m + n;
            let v = x.gamma.pairing(&x.value, &y.value).map_err(|e| schema(file, "/degree", e))?;
            let ring = x.gamma.base.field.ring(level);
            Ok(doc(&json!({ "pairing": ring.elem(v).to_json() }), 0))
        }
        EvalKind::Transfer => {
            let input: TransferInput = read_input(file)?;
            let field = field_of_order(input.q).map_err(|e| schema(file, "/q", e))?;
            let gens: Vec<Vec<Gr>> = input
                .subspace
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if v.len() != input.d {
                        return Err(schema(file, format!("/subspace/{i}"), format!("expected {} entries", input.d)));
                    }
                    field_point(field, v).map_err(|(ptr, msg)| schema(file, format!("/subspace/{i}{ptr}"), msg))
                })
                .collect::<Result<_, _>>()?;
            let w = Subspace::new(field, input.d, &gens);
            let mut laws = Laws::new(field);
            if let Some(g) = input.max_degree {
                laws = laws.with_max_degree(g);
            }
            let law = laws.transfer_law(&w).map_err(|e| schema(file, "/subspace", e))?;
            let mut out = json!({ "law": law_json(&law), "subspace_dim": w.dim() });
            if let Some(x) = &input.point {
                if x.len() != input.d {
                    return Err(schema(file, "/point", format!("expected {} entries", input.d)));
                }
                let v = field_point(field, x).map_err(|(ptr, msg)| schema(file, format!("/point{ptr}"), msg))?;
                let value = law.eval(field, &v).map_err(|e| schema(file, "/point", e))?;
                let k = field.field();
                out["value"] = json!(value.iter().map(|&c| k.coeffs(c)).collect::<Vec<_>>());
            }
            Ok(doc(&out, 0))
        }
        EvalKind::Rho => {
            let input: RhoInput = read_input(file)?;
            let fields: Vec<FieldSpec> = input
                .factors
                .iter()
                .enumerate()
                .map(|(i, f)| FieldSpec::new(f.p, f.r).map_err(|e| schema(file, format!("/factors/{i}"), e)))
                .collect::<Result<_, _>>()?;
            let r = rho(&fields, input.m, input.n).map_err(|e| schema(file, "/", e))?;
            let level = input.m + input.n;
            let coords = |v: &[Gr]| v.iter().map(|g| g.0[0]).collect::<Vec<_>>();
            let mut out = json!({
                "level": level,
                "images": r.map.images.iter().map(|v| coords(v)).collect::<Vec<_>>(),
                "surjective": r.surjective,
                "multiplicative": r.multiplicative,
                "unital": r.unital,
                "symbols_ok": r.symbols_ok,
                "splitting_idempotent": r.splitting_idempotent.as_ref().map(|v| coords(v)),
            });
            if let Some(x) = &input.point {
                let base = &r.map.domain;
                let source = TorsionModule::free(base.field, input.m, x.len());
                if x.len() != fields.iter().map(|f| f.r).sum::<usize>() {
                    return Err(schema(file, "/point", "one coordinate per basis element of E is required"));
                }
                let ring = source.ring();
                let point: Vec<Gr> = x.iter().map(|&c| ring.from_int((c % ring.modulus_int) as i64)).collect();
                let omega = MediumOmega::new(&source, input.n).map_err(|e| schema(file, "/", e))?;
                out["value"] = json!(coords(&r.map.apply(&omega.symbol(&point))));
            }
            let code = if r.holds() { 0 } else { 1 };
            Ok(doc(&out, code))
        }
        EvalKind::Lift => {
            let input: AlgebraInput = read_input(file)?;
            if input.level != 1 {
                return Err(schema(file, "/level", "lift takes an algebra over F_p (level 1)"));
            }
            let a = FpAlgebra::new(input.p, input.table.clone(), input.unit.clone()).map_err(|e| schema(file, "/table", e))?;
            let values = input.gamma.clone().unwrap_or_default();
            let w = WrinkledAlgebra::new(a, &values).map_err(|e| schema(file, "/gamma", e))?;
            match lift_2flat(&w) {
                Ok((flat, cert)) => {
                    let dim = flat.dim();
                    let galois = match FieldSpec::new(input.p, dim) {
                        Ok(f) => Some(galois_isomorphism(f, &flat).map_err(|e| schema(file, "/", e))?.is_some()),
                        Err(_) => None,
                    };
                    let out = json!({ "algebra": flat.0, "certificate": cert, "isomorphic_to_galois_ring": galois });
                    Ok(doc(&out, if cert.holds() { 0 } else { 1 }))
                }
                Err(WrinkleError::Certification(cert)) => Ok(doc(&json!({ "algebra": null, "certificate": cert }), 1)),
                Err(e) => Err(schema(file, "/", e)),
            }
        }
        EvalKind::Psi2 => {
            let input: AlgebraInput = read_input(file)?;
            if input.level != 2 {
                return Err(schema(file, "/level", "psi2 takes an algebra over Z/p^2 (level 2)"));
            }
            if input.gamma.is_some() {
                return Err(schema(file, "/gamma", "not allowed for psi2"));
            }
            let r = FlatAlgebra::new(input.p, input.table, input.unit).map_err(|e| schema(file, "/table", e))?;
            let w = psi2(&r).map_err(|e| schema(file, "/", e))?;
            let gamma: Vec<(Vec<u64>, Vec<u64>)> = w.kernel.iter().cloned().zip(w.gamma.iter().cloned()).collect();
            let reduction: &StructureConstants = &w.algebra.0;
            let out = json!({
                "algebra": reduction,
                "gamma": gamma,
                "frobenius_surjective": w.frobenius_surjective,
                "values_in_kernel": w.values_in_kernel(),
            });
            Ok(doc(&out, 0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Output {
        run_from(std::iter::once("witt-omega").chain(args.iter().copied()))
    }

    fn factors_of(out: &Output) -> Value {
        let v: Value = serde_json::from_str(&out.text).unwrap();
        v["factors"].clone()
    }

    #[test]
    fn structure_examples() {
        let o = run(&["structure", "--p", "2", "--r", "1", "--m", "1", "--dims", "2", "--functor", "omega", "--n", "1"]);
        assert_eq!(o.code, 0);
        assert_eq!(factors_of(&o), json!([4, 2, 4]));
        let o = run(&["structure", "--functor", "gamma", "--p", "2", "--m", "1", "--dims", "1", "--n", "2"]);
        assert_eq!(factors_of(&o), json!([8]));
        let o = run(&["structure", "--functor", "gamma", "--m", "1", "--dims", "1"]);
        assert_eq!(o.code, 2);
    }

    #[test]
    fn structure_flags_are_checked() {
        assert_eq!(run(&["structure", "--p", "2", "--functor", "gamma"]).code, 2);
        assert_eq!(run(&["structure", "--p", "2", "--dims", "2", "--weights", "0", "--functor", "gamma"]).code, 2);
        assert_eq!(run(&["structure", "--p", "4", "--dims", "1", "--functor", "gamma"]).code, 2);
        assert_eq!(run(&["structure", "--p", "2", "--m", "1", "--weights", "2", "--functor", "gamma"]).code, 2);
    }

    #[test]
    fn pointer_paths() {
        let dir = std::env::temp_dir().join(format!("witt-omega-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("bad.json");
        std::fs::write(&f, r#"{"module": {"p": 2, "r": 1, "m": 1, "weights": [0, "x"]}, "degree": 2}"#).unwrap();
        let e = load_gamma_element(&f).err().unwrap();
        match e {
            CliError::Schema { pointer, .. } => assert_eq!(pointer, "/module/weights/1"),
            other => panic!("{other:?}"),
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
