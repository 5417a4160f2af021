//! Verification suites.
//!
//! A suite is a list of named checks. Checks run on a small worker pool and
//! the report lists them sorted by name, so the output only depends on the
//! options (including the seed used for random corpora).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};

use parking_lot::Mutex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chainring::{big_c_const, conductor, is_p_adic_unit, is_prime, reconstruct_teichmuller, FieldSpec, Gr};
use crate::gamma::{self, GammaModule};
use crate::omega::{
    base_change, c_n, decomposition, kummer_witt_big, kummer_witt_medium, restriction_of_scalars, rho, small_frobenius_verschiebung,
    BigOmega, MediumOmega, SmallOmega,
};
use crate::tense::{chern, clamp_add, tense_levels_by_gram, tense_product, valuation};
use crate::transfer::{
    check_transfer_composites, check_transfer_laws, induced_decomposition, integral_formulas, kernel_sum, small_functor, small_transfer,
    transfer_with, Laws, LinearMap,
};
use crate::wmodule::{is_perfect, residue_from_index, TorsionModule};
use crate::wrinkle::{catalog, catalog_report, cocycle_report, flat_examples, frobenius_lift_criterion, witt_from_divided_powers};

pub const SUITES: [&str; 8] = ["witt", "duality", "omega", "transfer", "integral", "wrinkle", "tense", "all"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("unknown suite `{0}`; expected one of witt, duality, omega, transfer, integral, wrinkle, tense, all")]
    UnknownSuite(String),
    #[error("degree guard: dmax = {dmax} over F_{q} needs laws of degree {degree}, above the guard {guard} = q^3")]
    DegreeGuard { q: u64, dmax: usize, degree: u64, guard: u64 },
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub jobs: usize,
    /// Field size for the transfer and integral sweeps.
    pub q: Option<u64>,
    /// Largest dimension for the transfer and integral sweeps.
    pub dmax: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, jobs: 1, q: None, dmax: None }
    }
}

/// Outcome of one check. `payload` holds the computed evidence, or the
/// error message when the computation itself failed.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckResult {
    pub check: String,
    pub params: Value,
    pub passed: bool,
    pub payload: Value,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub sweep: Value,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Header line, one line per check, summary line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let header = json!({ "suite": self.suite, "seed": self.seed, "sweep": self.sweep });
        out.push_str(&header.to_string());
        out.push('\n');
        for c in &self.checks {
            out.push_str(&serde_json::to_string(c).expect("serializable"));
            out.push('\n');
        }
        let failed = self.failures().count();
        let summary = json!({
            "summary": {
                "suite": self.suite,
                "checks": self.checks.len(),
                "passed": self.checks.len() - failed,
                "failed": failed,
                "status": if failed == 0 { "pass" } else { "fail" },
            }
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

type Outcome = Result<(bool, Value), String>;

pub struct Check {
    name: String,
    params: Value,
    run: Box<dyn FnOnce() -> Outcome + Send>,
}

fn check(name: impl Into<String>, params: Value, run: impl FnOnce() -> Outcome + Send + 'static) -> Check {
    Check { name: name.into(), params, run: Box::new(run) }
}

fn report<T: Serialize>(passed: bool, r: &T) -> Outcome {
    Ok((passed, serde_json::to_value(r).map_err(|e| e.to_string())?))
}

fn run_one(c: Check) -> CheckResult {
    let Check { name, params, run } = c;
    let (passed, payload) = match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => (false, json!({ "error": e })),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, json!({ "error": msg }))
        }
    };
    CheckResult { check: name, params, passed, payload }
}

/// Runs the checks on `jobs` threads and sorts the results by name.
pub fn run_checks(checks: Vec<Check>, jobs: usize) -> Vec<CheckResult> {
    let total = checks.len();
    let queue: Vec<Mutex<Option<Check>>> = checks.into_iter().map(|c| Mutex::new(Some(c))).collect();
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(total));
    let workers = jobs.clamp(1, total.max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= total {
                    break;
                }
                let c = queue[i].lock().take().expect("each check is taken once");
                let r = run_one(c);
                results.lock().push(r);
            });
        }
    });
    let mut results = results.into_inner();
    results.sort_by(|a, b| a.check.cmp(&b.check));
    results
}

/// `F_q`, for a prime power `q` with a tabulated modulus.
pub fn field_of_order(q: u64) -> Result<FieldSpec, SuiteError> {
    let bad = || SuiteError::Usage(format!("q = {q} is not a supported prime power"));
    if q < 2 {
        return Err(bad());
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).expect("q >= 2");
    let (mut rest, mut r) = (q, 0usize);
    while rest % p == 0 {
        rest /= p;
        r += 1;
    }
    if rest != 1 || !is_prime(p) {
        return Err(bad());
    }
    FieldSpec::new(p, r).map_err(|_| bad())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn module_json(m: &TorsionModule) -> Value {
    json!({ "p": m.field.p, "r": m.field.r, "m": m.m, "weights": m.weights })
}

fn sorted_levels(m: &TorsionModule) -> Vec<u32> {
    let mut v: Vec<u32> = m.orders().into_iter().filter(|&e| e > 0).collect();
    v.sort_unstable();
    v
}

/// A uniformly random element of `m`.
fn random_element(m: &TorsionModule, rng: &mut impl Rng) -> Vec<Gr> {
    m.orders()
        .into_iter()
        .map(|e| {
            if e == 0 {
                return Gr::ZERO;
            }
            let ring = m.field.ring(e);
            let count = ring.modulus_int.pow(m.field.r as u32);
            residue_from_index(&ring, rng.gen_range(0..count), e)
        })
        .collect()
}

/// Builds the checks of a suite without running them.
pub fn build(suite: &str, opts: &SuiteOptions) -> Result<(Value, Vec<Check>), SuiteError> {
    match suite {
        "witt" => Ok((json!({ "pm": WITT_CASES, "conductors": CONDUCTOR_CASES }), witt_checks())),
        "duality" => Ok((json!({ "p": [2, 3], "dmax": 3, "mmax": 2, "nmax": 4, "random_modules": 50 }), duality_checks(opts.seed))),
        "omega" => Ok((json!({ "p": [2, 3], "dmax": 3, "nmax": 3 }), omega_checks())),
        "transfer" => transfer_checks(opts),
        "integral" => integral_checks(opts),
        "wrinkle" => Ok((json!({ "catalog": catalog().len(), "flat": flat_examples().len() }), wrinkle_checks())),
        "tense" => Ok((json!({ "pairs": 100, "max_log_card": 6 }), tense_checks(opts.seed))),
        "all" => {
            let mut sweep = serde_json::Map::new();
            let mut checks = Vec::new();
            for s in SUITES.iter().filter(|&&s| s != "all") {
                let (sw, cs) = build(s, opts)?;
                sweep.insert(s.to_string(), sw);
                checks.extend(cs);
            }
            Ok((Value::Object(sweep), checks))
        }
        other => Err(SuiteError::UnknownSuite(other.into())),
    }
}

pub fn run(suite: &str, opts: &SuiteOptions) -> Result<SuiteReport, SuiteError> {
    let (sweep, checks) = build(suite, opts)?;
    Ok(SuiteReport { suite: suite.into(), seed: opts.seed, sweep, checks: run_checks(checks, opts.jobs) })
}

const WITT_CASES: [(u64, u32); 6] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)];
const CONDUCTOR_CASES: [((u64, usize), (u64, usize)); 3] = [((2, 1), (2, 2)), ((2, 1), (2, 3)), ((3, 1), (3, 2))];

fn witt_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (p, m) in WITT_CASES {
        out.push(check(format!("witt/presentation p={p} m={m}"), json!({ "p": p, "m": m }), move || {
            let w = witt_from_divided_powers(m, p).map_err(err)?;
            report(w.holds(), &w)
        }));
    }
    for ((p, r0), (_, r1)) in CONDUCTOR_CASES {
        out.push(check(
            format!("witt/conductor F_{} in F_{}", p.pow(r0 as u32), p.pow(r1 as u32)),
            json!({ "p": p, "r": [r0, r1] }),
            move || {
                let small = FieldSpec::new(p, r0).map_err(err)?;
                let big = FieldSpec::new(p, r1).map_err(err)?;
                let level = 3;
                let w = big.ring(level);
                let c = conductor(&small, &big, level).map_err(err)?;
                let minus_one_mod_p = w.val(w.add(c, w.one())) >= 1;
                Ok((minus_one_mod_p, json!({ "level": level, "conductor": w.coeffs(c), "minus_one_mod_p": minus_one_mod_p })))
            },
        ));
    }
    for level in 1..=3u32 {
        out.push(check(format!("witt/reconstruction F_4 level={level}"), json!({ "q": 4, "level": level }), move || {
            let f4 = FieldSpec::new(2, 2).map_err(err)?;
            let pairs = reconstruct_teichmuller(&f4, level).map_err(err)?;
            let bad = pairs.iter().filter(|(a, b)| a != b).count();
            Ok((bad == 0, json!({ "elements": pairs.len(), "mismatches": bad })))
        }));
    }
    out
}

/// Weight vectors `w` with entries below `m`, i.e. no zero summands.
fn weight_vectors(d: usize, m: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out.into_iter().flat_map(|v: Vec<u32>| (0..m).map(move |w| [v.clone(), vec![w]].concat())).collect();
    }
    out
}

/// Smallest `F_(p^r)` with at least `n` elements.
fn big_enough_field(p: u64, n: u32) -> FieldSpec {
    let r = (1..).find(|&r| p.pow(r) >= n as u64).expect("some power is large enough");
    FieldSpec::new(p, r as usize).expect("tabulated field")
}

fn duality_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    // structure oracle: the closed formula over k against the symbol span over k'
    for p in [2u64, 3] {
        for d in 1..=3usize {
            for m in 1..=2u32 {
                for w in weight_vectors(d, m) {
                    for n in 1..=4u32 {
                        let name = format!("duality/structure p={p} m={m} w={w:?} n={n}");
                        let params = json!({ "p": p, "m": m, "weights": w, "n": n });
                        let w = w.clone();
                        out.push(check(name, params, move || structure_oracle(p, m, w, n, seed)));
                    }
                }
            }
        }
    }
    // Gamma^p pairing perfect iff free, and Omega^n pairing always perfect
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..50 {
        let p = if rng.gen_bool(0.5) { 2u64 } else { 3 };
        let m = rng.gen_range(1..=3u32);
        let d = rng.gen_range(1..=3usize);
        // half of the corpus is free
        let weights: Vec<u32> = if i % 2 == 0 { vec![0; d] } else { (0..d).map(|_| rng.gen_range(0..m)).collect() };
        let base = TorsionModule::new(FieldSpec::prime(p), m, weights).expect("weights below m");
        let params = module_json(&base);
        let b = base.clone();
        out.push(check(format!("duality/gamma-p #{i:02}"), params.clone(), move || gamma_p_duality(&b)));
        out.push(check(format!("duality/omega #{i:02}"), params, move || {
            let mut perfect = Vec::new();
            for n in 1..=2u32 {
                let o = MediumOmega::new(&base, n).map_err(err)?;
                let gram = o.gram();
                let rows: Vec<Vec<Gr>> =
                    (0..o.dim()).map(|i| (0..o.dim()).map(|j| if i == j { gram[i] } else { Gr::ZERO }).collect()).collect();
                let log = o.module.log_card();
                perfect.push(is_perfect(o.module.ring(), rows, o.dim(), log, log));
            }
            Ok((perfect.iter().all(|&b| b), json!({ "perfect_for_n": perfect })))
        }));
    }
    // small Omega duality on vector spaces
    for p in [2u64, 3] {
        for d in 1..=3usize {
            for n in 1..=3u32 {
                out.push(check(format!("duality/small p={p} d={d} n={n}"), json!({ "p": p, "d": d, "n": n }), move || {
                    let s = SmallOmega::new(&TorsionModule::vector_space(FieldSpec::prime(p), d), n).map_err(err)?;
                    let perfect = s.pairing_is_perfect(&s.clone());
                    Ok((perfect, json!({ "log_card": s.log_card(), "levels": s.invariant_levels(), "perfect": perfect })))
                }));
            }
        }
    }
    out
}

fn structure_oracle(p: u64, m: u32, w: Vec<u32>, n: u32, seed: u64) -> Outcome {
    let base = TorsionModule::new(FieldSpec::prime(p), m, w.clone()).map_err(err)?;
    let formula = GammaModule::new(&base, n).map_err(err)?;
    let ext = big_enough_field(p, n);
    let lifted = TorsionModule::new(ext, m, w).map_err(err)?;
    let g = GammaModule::new(&lifted, n).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let total = lifted.log_card();
    // random points first, then everything if they do not suffice
    let mut points: Vec<Vec<Gr>> = (0..64 * g.dim()).map(|_| random_element(&lifted, &mut rng)).collect();
    let (mut span, mut used) = gamma::symbol_span_until_full(&g, &points, 16);
    if !span.is_everything() && total <= 16 {
        points = lifted.elements();
        (span, used) = gamma::symbol_span_until_full(&g, &points, 64);
    }
    let want = sorted_levels(&formula.module);
    let got: Vec<u32> = span.invariant_levels().into_iter().filter(|&e| e > 0).collect();
    Ok((want == got, json!({ "extension_q": ext.q(), "formula_levels": want, "span_levels": got, "symbols_used": used })))
}

fn gamma_p_duality(base: &TorsionModule) -> Outcome {
    let g = GammaModule::new(base, base.field.p as u32).map_err(err)?;
    let level = base.m + 1;
    let basis: Vec<Vec<Gr>> = (0..g.dim()).map(|i| g.basis_element(i)).collect();
    let mut rows = Vec::new();
    for x in &basis {
        let mut row = Vec::new();
        for y in &basis {
            row.push(g.pairing_at(x, y, level).map_err(err)?);
        }
        rows.push(row);
    }
    let log = g.module.log_card();
    let perfect = is_perfect(base.field.ring(level), rows, g.dim(), log, log);
    let free = base.is_free();
    Ok((perfect == free, json!({ "free": free, "perfect": perfect, "gamma_levels": sorted_levels(&g.module) })))
}

fn omega_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        let f = FieldSpec::prime(p);
        let bases = [
            ("V2", TorsionModule::vector_space(f, 2)),
            ("W2+W1", TorsionModule::new(f, 2, vec![0, 1]).expect("valid")),
            ("W2", TorsionModule::free(f, 2, 1)),
        ];
        for (label, base) in bases {
            for n in 1..=2u32 {
                let b = base.clone();
                out.push(check(format!("omega/embedding p={p} {label} n={n}"), json!({ "module": module_json(&b), "n": n }), move || {
                    embedding_check(&b, n)
                }));
            }
        }
        for d in 1..=3usize {
            let v = TorsionModule::vector_space(f, d);
            for n in 1..=3u32 {
                let vm = v.clone();
                out.push(check(format!("omega/kummer-witt medium p={p} d={d} n={n}"), json!({ "p": p, "d": d, "n": n }), move || {
                    let r = kummer_witt_medium(&vm, n).map_err(err)?;
                    report(r.holds(), &r)
                }));
                // the last stage of Omega-bar^3 of F_3^3 is above the size cap
                if !(p == 3 && d == 3 && n == 3) {
                    let vb = v.clone();
                    out.push(check(format!("omega/kummer-witt big p={p} d={d} n={n}"), json!({ "p": p, "d": d, "n": n }), move || {
                        let r = kummer_witt_big(&vb, n).map_err(err)?;
                        report(r.holds(), &r)
                    }));
                }
            }
            for n in 1..=2u32 {
                if d == 3 && (p == 3 || n == 2) {
                    continue;
                }
                let vs = v.clone();
                out.push(check(format!("omega/small frob-ver p={p} d={d} n={n}"), json!({ "p": p, "d": d, "n": n }), move || {
                    let r = small_frobenius_verschiebung(&vs, n).map_err(err)?;
                    report(r.holds(), &r)
                }));
            }
        }
    }
    let f2 = FieldSpec::prime(2);
    let f4 = FieldSpec::new(2, 2).expect("tabulated");
    let rho_cases: Vec<(&str, Vec<FieldSpec>, u32)> = vec![
        ("F_2", vec![f2], 1),
        ("F_2 x F_2", vec![f2, f2], 1),
        ("F_4", vec![f4], 1),
        ("F_2", vec![f2], 2),
        ("F_3", vec![FieldSpec::prime(3)], 1),
    ];
    for (label, factors, m) in rho_cases {
        out.push(check(format!("omega/rho {label} m={m} n=1"), json!({ "factors": label, "m": m, "n": 1 }), move || {
            let r = rho(&factors, m, 1).map_err(err)?;
            let payload = json!({
                "surjective": r.surjective,
                "multiplicative": r.multiplicative,
                "unital": r.unital,
                "symbols_ok": r.symbols_ok,
                "splitting_idempotent": r.splitting_idempotent.is_some(),
            });
            Ok((r.holds(), payload))
        }));
    }
    out.push(check("omega/restriction F_4 over F_2", json!({ "q": 4, "m": 1, "weights": [0], "n": 1 }), move || {
        let r = restriction_of_scalars(f4, 1, &[0], 1).map_err(err)?;
        report(r.holds(), &r)
    }));
    for (w, n) in [(vec![0u32, 0], 1u32), (vec![0, 1], 2), (vec![0, 0], 2)] {
        out.push(check(format!("omega/base-change F_2 to F_4 w={w:?} n={n}"), json!({ "weights": w, "m": 2, "n": n }), move || {
            let base = TorsionModule::new(f2, 2, w).map_err(err)?;
            let r = base_change(&base, f4, n).map_err(err)?;
            report(r.holds(), &r)
        }));
    }
    out
}

/// `F_n o G_n = C_n`, `C_n` a unit, the adjunction between the pairings on
/// the medium and big powers, and the splitting of the big power.
fn embedding_check(base: &TorsionModule, n: u32) -> Outcome {
    let p = base.field.p;
    let g = gamma::g_map(base, n).map_err(err)?;
    let f = gamma::f_map(base, n).map_err(err)?;
    let fg = f.compose(&g).map_err(err)?;
    let level = fg.codomain.m;
    let ring = fg.codomain.ring();
    let c = c_n(p, n, level);
    let f_after_g = (0..fg.domain.dim()).all(|i| fg.images[i] == fg.codomain.scale(c, &fg.codomain.basis_vector(i)));
    let unit = is_p_adic_unit(p, &big_c_const(p, n));
    let big = BigOmega::new(base, n).map_err(err)?;
    let med = MediumOmega::new(base, n).map_err(err)?;
    let psi = big.embedding().map_err(err)?;
    let back = big.retraction().map_err(err)?;
    let mut adjunction = true;
    for i in 0..med.dim() {
        let x = med.module.basis_vector(i);
        for j in 0..big.module().dim() {
            let phi = big.module().basis_vector(j);
            let lhs = med.pairing(&x, &back.apply(&phi));
            let rhs = ring.mul(c, big.pairing(&psi.apply(&x), &phi));
            adjunction &= lhs == rhs;
        }
    }
    let split = decomposition(base, n).map_err(err)?;
    let passed = f_after_g && unit && adjunction && split.holds();
    Ok((
        passed,
        json!({
            "c_n": big_c_const(p, n).to_string(),
            "c_n_unit": unit,
            "f_after_g_is_c_n": f_after_g,
            "adjunction": adjunction,
            "decomposition": split,
        }),
    ))
}

/// Degree of the laws needed for codimensions up to `dmax - 1`: the
/// division check uses `lambda^(c+1)`, of degree `1 + q + .. + q^c`.
fn needed_degree(q: u64, dmax: usize) -> u64 {
    (0..dmax as u32).map(|i| q.pow(i)).sum()
}

fn transfer_sweep(opts: &SuiteOptions) -> Result<Vec<(u64, usize, usize)>, SuiteError> {
    if opts.q.is_none() && opts.dmax.is_none() {
        return Ok(vec![(2, 2, 1), (2, 3, 1), (2, 3, 2), (3, 2, 1), (4, 2, 1)]);
    }
    let q = opts.q.unwrap_or(2);
    field_of_order(q)?;
    let dmax = opts.dmax.unwrap_or(if q == 2 { 3 } else { 2 });
    if dmax < 2 {
        return Err(SuiteError::Usage("--dmax must be at least 2".into()));
    }
    let degree = needed_degree(q, dmax);
    let guard = q.pow(3);
    if degree > guard {
        return Err(SuiteError::DegreeGuard { q, dmax, degree, guard });
    }
    Ok((2..=dmax).flat_map(|d| (1..d).map(move |c| (q, d, c))).collect())
}

fn transfer_checks(opts: &SuiteOptions) -> Result<(Value, Vec<Check>), SuiteError> {
    let sweep = transfer_sweep(opts)?;
    let mut out = Vec::new();
    for &(q, d, c) in &sweep {
        let field = field_of_order(q)?;
        out.push(check(format!("transfer/laws q={q} d={d} c={c}"), json!({ "q": q, "d": d, "c": c }), move || {
            let r = check_transfer_laws(&Laws::new(field), d, c).map_err(err)?;
            report(r.holds(), &r)
        }));
    }
    let f2 = FieldSpec::prime(2);
    let k = f2.field();
    let (o, z) = (k.one(), Gr::ZERO);
    let incl = LinearMap::new(f2, 1, 2, vec![vec![o], vec![z]]);
    let proj = LinearMap::new(f2, 2, 1, vec![vec![o, z]]);
    for n in 1..=2u32 {
        let i = incl.clone();
        out.push(check(format!("transfer/composite injective n={n}"), json!({ "q": 2, "map": "F_2 -> F_2^2", "n": n }), move || {
            let r = check_transfer_composites(&i, n).map_err(err)?;
            report(r.injective_case == Some(true), &r)
        }));
        let pr = proj.clone();
        out.push(check(format!("transfer/composite surjective n={n}"), json!({ "q": 2, "map": "F_2^2 -> F_2", "n": n }), move || {
            let r = check_transfer_composites(&pr, n).map_err(err)?;
            report(r.surjective_case == Some(true), &r)
        }));
    }
    for q in [3u64, 4] {
        out.push(check(format!("transfer/kernel-sum vanishes q={q}"), json!({ "q": q }), move || {
            let field = field_of_order(q).map_err(err)?;
            let kk = field.field();
            let proj = LinearMap::new(field, 2, 1, vec![vec![kk.one(), Gr::ZERO]]);
            let vanishes = kernel_sum(&proj, 1).map_err(err)?.iter().all(Gr::is_zero);
            Ok((vanishes, json!({ "vanishes": vanishes })))
        }));
    }
    out.push(check("transfer/contravariant", json!({ "q": 2, "n": 1 }), move || {
        let f = LinearMap::new(f2, 1, 2, vec![vec![o], vec![o]]);
        let g = LinearMap::new(f2, 2, 1, vec![vec![o, z]]);
        let n = 1;
        let tgf = small_transfer(&g.compose(&f), n).map_err(err)?;
        let tf_tg = small_transfer(&f, n).map_err(err)?.compose(&small_transfer(&g, n).map_err(err)?);
        let same = tf_tg.same_as(&tgf);
        Ok((same, json!({ "equal": same })))
    }));
    out.push(check("transfer/cartesian square", json!({ "q": 2, "n": 1 }), move || {
        let g1 = LinearMap::new(f2, 2, 1, vec![vec![o, z]]);
        let g2 = LinearMap::new(f2, 2, 1, vec![vec![z, o]]);
        let fibre = LinearMap::new(f2, 4, 1, vec![vec![z, o, o, z]]).kernel().inclusion();
        let f2_map = LinearMap::new(f2, 4, 2, vec![vec![o, z, z, z], vec![z, o, z, z]]).compose(&fibre);
        let f1_map = LinearMap::new(f2, 4, 2, vec![vec![z, z, o, z], vec![z, z, z, o]]).compose(&fibre);
        let n = 1;
        let lhs = small_functor(&f2_map, n + 3).map_err(err)?.compose(&small_transfer(&f1_map, n).map_err(err)?);
        let rhs = transfer_with(&g2, n + 2).map_err(err)?.compose(&small_functor(&g1, n + 2).map_err(err)?);
        let same = lhs.same_as(&rhs);
        Ok((same, json!({ "equal": same })))
    }));
    Ok((json!({ "laws": sweep }), out))
}

fn integral_checks(opts: &SuiteOptions) -> Result<(Value, Vec<Check>), SuiteError> {
    let spaces: Vec<(u64, usize)> = match (opts.q, opts.dmax) {
        (None, None) => vec![(2, 2), (2, 3), (3, 2)],
        (q, dmax) => {
            let q = q.unwrap_or(2);
            field_of_order(q)?;
            let dmax = dmax.unwrap_or(3);
            if dmax < 2 {
                return Err(SuiteError::Usage("--dmax must be at least 2".into()));
            }
            (2..=dmax).map(|d| (q, d)).collect()
        }
    };
    let mut out = Vec::new();
    for &(q, d) in &spaces {
        let field = field_of_order(q)?;
        for m in 1..d {
            for n in 1..=2u32 {
                out.push(check(
                    format!("integral/formulas q={q} d={d} m={m} n={n}"),
                    json!({ "q": q, "d": d, "m": m, "n": n }),
                    move || {
                        let r = integral_formulas(field, d, m, n).map_err(err)?;
                        report(r.holds(), &r)
                    },
                ));
            }
        }
    }
    // the induced decomposition, over fields of characteristic 2
    let fields: Vec<u64> = match opts.q {
        None => vec![2, 4],
        Some(q) if q % 2 == 0 => vec![q],
        Some(_) => vec![],
    };
    let dmax = opts.dmax.unwrap_or(3).min(3);
    let mut induced = Vec::new();
    for &q in &fields {
        let field = field_of_order(q)?;
        let r = field.r as u32;
        for d in 2..=dmax {
            let gap = r * (d as u32 - 1) - 1;
            for m in 1..=2u32 {
                for n in (m + gap)..=(m + gap + 1).min(4) {
                    induced.push((q, d, n, m));
                    out.push(check(
                        format!("integral/induced q={q} d={d} n={n} m={m}"),
                        json!({ "q": q, "r": r, "d": d, "n": n, "m": m }),
                        move || {
                            let rep = induced_decomposition(field, d, n, m).map_err(err)?;
                            report(rep.holds(), &rep)
                        },
                    ));
                }
            }
        }
    }
    Ok((json!({ "spaces": spaces, "induced": induced }), out))
}

fn wrinkle_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let fields = [Some((2, 1)), Some((3, 1)), Some((2, 2)), Some((2, 3)), None, None, Some((3, 2))];
    for ((name, a), f) in catalog().into_iter().zip(fields) {
        out.push(check(format!("wrinkle/round-trip {name}"), json!({ "algebra": name }), move || {
            let field = match f {
                Some((p, r)) => Some(FieldSpec::new(p, r).map_err(err)?),
                None => None,
            };
            let r = catalog_report(&name, &a, field).map_err(err)?;
            report(r.certificate.holds() && r.galois_isomorphic != Some(false), &r)
        }));
    }
    for (name, r) in flat_examples() {
        out.push(check(format!("wrinkle/frobenius-lift {name}"), json!({ "algebra": name }), move || {
            let rep = frobenius_lift_criterion(&r).map_err(err)?;
            report(rep.agrees, &rep)
        }));
    }
    for (p, d) in [(2u64, 1usize), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)] {
        out.push(check(format!("wrinkle/cocycle p={p} d={d}"), json!({ "p": p, "d": d }), move || {
            let r = cocycle_report(p, d).map_err(err)?;
            report(r.holds(), &r)
        }));
    }
    out
}

/// A random module over `W_n(F_p)` with at most 64 elements, as cyclic
/// levels in `1..=n`.
fn random_small_module(rng: &mut impl Rng, p: u64, n: u32) -> TorsionModule {
    let cap = if p == 2 { 6 } else { 3 };
    let mut budget = cap;
    let mut weights = Vec::new();
    let count = rng.gen_range(1..=3);
    for _ in 0..count {
        if budget == 0 {
            break;
        }
        let a = rng.gen_range(1..=n.min(budget));
        budget -= a;
        weights.push(n - a);
    }
    TorsionModule::new(FieldSpec::prime(p), n, weights).expect("levels at most n")
}

fn tense_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(11));
    let mut out = Vec::new();
    for i in 0..100 {
        let p = if rng.gen_bool(0.5) { 2u64 } else { 3 };
        let n = rng.gen_range(1..=4u32);
        let a = random_small_module(&mut rng, p, n);
        let b = random_small_module(&mut rng, p, n);
        let params = json!({ "n": n, "left": module_json(&a), "right": module_json(&b) });
        out.push(check(format!("tense/pair #{i:03}"), params, move || tense_pair(&a, &b, n)));
    }
    out
}

fn tense_pair(a: &TorsionModule, b: &TorsionModule, n: u32) -> Outcome {
    let (t, _) = tense_product(a, b, n);
    let additive = valuation(&t) == clamp_add(valuation(a), valuation(b), n);
    let multiplicative = chern(&t) == chern(a).mul_trunc(&chern(b));
    // the identity v = v_X(Ch) is about genuine modules: drop the formal W_0
    // summands unless nothing else is left
    let genuine = TorsionModule { weights: t.weights.iter().copied().filter(|&w| w < n).collect(), ..t.clone() };
    let genuine = if genuine.dim() == 0 { t.clone() } else { genuine };
    let chern_valuation = [a, b, &genuine].iter().all(|m| m.dim() == 0 || chern(m).v_x() == valuation(m));
    // duality: the tense product of the duals, computed from the Gram matrix
    // of generators, has the same cyclic levels as the dual of the product
    let gens = |m: &TorsionModule| (0..m.dim()).map(|i| m.basis_vector(i)).collect::<Vec<_>>();
    let (da, db) = (a.dual(), b.dual());
    let by_gram = tense_levels_by_gram(&da, &gens(&da), &db, &gens(&db));
    let dual_levels = sorted_levels(&t.dual());
    let by_gram: Vec<u32> = by_gram.into_iter().filter(|&e| e > 0).collect();
    let commutes = by_gram == dual_levels;
    Ok((
        additive && multiplicative && chern_valuation && commutes,
        json!({
            "levels": sorted_levels(&t),
            "valuation_additive": additive,
            "chern_multiplicative": multiplicative,
            "chern_valuation": chern_valuation,
            "duality_commutes": commutes,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_by_order() {
        assert_eq!(field_of_order(9).unwrap(), FieldSpec::new(3, 2).unwrap());
        assert!(field_of_order(6).is_err());
        assert!(field_of_order(1).is_err());
    }

    #[test]
    fn degree_guard_examples() {
        assert_eq!(needed_degree(5, 4), 156);
        let opts = SuiteOptions { q: Some(5), dmax: Some(4), ..Default::default() };
        assert!(matches!(build("transfer", &opts), Err(SuiteError::DegreeGuard { degree: 156, guard: 125, .. })));
        let opts = SuiteOptions { q: Some(2), dmax: Some(3), ..Default::default() };
        assert!(build("transfer", &opts).is_ok());
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(build("nope", &SuiteOptions::default()), Err(SuiteError::UnknownSuite(_))));
    }

    #[test]
    fn ordering_does_not_depend_on_jobs() {
        let one = run("witt", &SuiteOptions { jobs: 1, ..Default::default() }).unwrap();
        let four = run("witt", &SuiteOptions { jobs: 4, ..Default::default() }).unwrap();
        assert_eq!(one.to_json_lines(), four.to_json_lines());
        assert!(one.passed());
    }

    #[test]
    fn failures_are_reported_not_raised() {
        let checks = vec![
            check("b", json!({}), || Ok((true, json!(null)))),
            check("a", json!({}), || Err("boom".into())),
            check("c", json!({}), || panic!("bad")),
        ];
        let r = run_checks(checks, 2);
        let names: Vec<&str> = r.iter().map(|c| c.check.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        assert_eq!(r[0].payload, json!({ "error": "boom" }));
        assert!(!r[2].passed);
    }
}
