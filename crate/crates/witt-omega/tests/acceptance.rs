//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use witt_omega::suite::{run, CheckResult, SuiteOptions, SuiteReport};
use witt_omega::wrinkle::witt_from_divided_powers;

struct Reports {
    by_suite: BTreeMap<&'static str, (SuiteReport, Duration)>,
}

impl Reports {
    fn select(&self, suite: &str, prefix: &str) -> Vec<&CheckResult> {
        let (report, _) = &self.by_suite[suite];
        report.checks.iter().filter(|c| c.check.starts_with(prefix)).collect()
    }

    fn elapsed(&self, suite: &str) -> Duration {
        self.by_suite[suite].1
    }
}

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

/// All selected checks pass and there are exactly `expected` of them.
fn all_pass(checks: &[&CheckResult], expected: usize) -> Outcome {
    if checks.len() != expected {
        return Err(format!("expected {expected} checks, found {}", checks.len()));
    }
    match checks.iter().find(|c| !c.passed) {
        Some(c) => Err(format!("{} failed: {}", c.check, c.payload)),
        None => Ok(format!("{expected} checks")),
    }
}

fn params(checks: &[&CheckResult]) -> Vec<Value> {
    let mut v: Vec<Value> = checks.iter().map(|c| c.params.clone()).collect();
    v.sort_by_key(|p| p.to_string());
    v
}

fn within(d: Duration, limit: Duration, what: &str) -> Result<(), String> {
    if d <= limit {
        Ok(())
    } else {
        Err(format!("{what} took {:.1} s, limit {:.0} s", d.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn criterion_1(r: &Reports) -> Outcome {
    let checks = r.select("witt", "witt/presentation");
    all_pass(&checks, 6)?;
    let mut slowest = Duration::ZERO;
    for (p, m) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)] {
        let start = Instant::now();
        let w = witt_from_divided_powers(m, p).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        if w.quotient_levels != vec![m + 1] || !w.symbols_match || !w.unit_is_identity {
            return Err(format!("p={p} m={m}: quotient {:?}", w.quotient_levels));
        }
        within(took, Duration::from_secs(1), &format!("p={p} m={m}"))?;
        slowest = slowest.max(took);
    }
    Ok(format!("6 presentations, slowest {:.3} s", slowest.as_secs_f64()))
}

fn criterion_2(r: &Reports) -> Outcome {
    // p in {2,3}; d = 1, 2, 3 gives 1 + 2^d weight vectors over m <= 2; n <= 4.
    let out = all_pass(&r.select("duality", "duality/structure"), 2 * (3 + 5 + 9) * 4)?;
    within(r.elapsed("duality"), Duration::from_secs(30), "duality suite")?;
    Ok(out)
}

fn criterion_3(r: &Reports) -> Outcome {
    all_pass(&r.select("duality", "duality/gamma-p"), 50)?;
    all_pass(&r.select("duality", "duality/omega"), 50)?;
    all_pass(&r.select("duality", "duality/small"), 18)?;
    Ok("50 + 50 random modules, 18 small-Omega cases".into())
}

fn criterion_4(r: &Reports) -> Outcome {
    let checks = r.select("omega", "omega/embedding");
    let out = all_pass(&checks, 12)?;
    for c in &checks {
        let p = &c.payload;
        if p["c_n_unit"] != json!(true) || p["adjunction"] != json!(true) || p["f_after_g_is_c_n"] != json!(true) {
            return Err(format!("{}: {p}", c.check));
        }
    }
    Ok(out)
}

fn criterion_5(r: &Reports) -> Outcome {
    all_pass(&r.select("omega", "omega/kummer-witt medium"), 18)?;
    all_pass(&r.select("omega", "omega/kummer-witt big"), 17)?;
    all_pass(&r.select("omega", "omega/small frob-ver"), 9)?;
    Ok("35 Kummer-Witt sequences, 9 small-Omega cases".into())
}

fn criterion_6(r: &Reports) -> Outcome {
    let checks = r.select("transfer", "transfer/laws");
    let out = all_pass(&checks, 5)?;
    let mut want: Vec<Value> =
        [(2, 2, 1), (2, 3, 1), (2, 3, 2), (3, 2, 1), (4, 2, 1)].iter().map(|&(q, d, c)| json!({"q": q, "d": d, "c": c})).collect();
    want.sort_by_key(|p| p.to_string());
    if params(&checks) != want {
        return Err(format!("swept {:?}", params(&checks)));
    }
    within(r.elapsed("transfer"), Duration::from_secs(60), "transfer suite")?;
    Ok(out)
}

fn criterion_7(r: &Reports) -> Outcome {
    let checks = r.select("integral", "integral/formulas");
    let out = all_pass(&checks, 8)?;
    for (q, d) in [(2, 2), (2, 3), (3, 2)] {
        for m in 1..d {
            if !checks.iter().any(|c| c.params["q"] == json!(q) && c.params["d"] == json!(d) && c.params["m"] == json!(m)) {
                return Err(format!("q={q} d={d} m={m} not covered"));
            }
        }
    }
    Ok(out)
}

fn criterion_8(r: &Reports) -> Outcome {
    let checks = r.select("integral", "integral/induced");
    let out = all_pass(&checks, 13)?;
    for d in [2, 3] {
        if !checks.iter().any(|c| c.params["d"] == json!(d) && c.params["q"] == json!(2)) {
            return Err(format!("d={d} over F_2 not covered"));
        }
    }
    Ok(out)
}

fn criterion_9(r: &Reports) -> Outcome {
    all_pass(&r.select("witt", "witt/conductor"), 3)?;
    all_pass(&r.select("witt", "witt/reconstruction"), 3)?;
    Ok("3 conductors, reconstruction over F_4 at levels 1..3".into())
}

fn criterion_10(r: &Reports) -> Outcome {
    let trips = r.select("wrinkle", "wrinkle/round-trip");
    all_pass(&trips, 7)?;
    for c in &trips {
        let fields = ["F_2", "F_3", "F_4", "F_8", "F_9"];
        if fields.contains(&c.params["algebra"].as_str().unwrap_or("")) && c.payload["galois_isomorphic"] != json!(true) {
            return Err(format!("{}: lift is not a Galois ring", c.check));
        }
    }
    all_pass(&r.select("wrinkle", "wrinkle/frobenius-lift"), 4)?;
    Ok("7 round trips, 5 Galois ring lifts, 4 lifting criteria".into())
}

fn criterion_11(r: &Reports) -> Outcome {
    let checks = r.select("tense", "tense/pair");
    let out = all_pass(&checks, 100)?;
    for c in &checks {
        for side in ["left", "right"] {
            let m = &c.params[side];
            let p = m["p"].as_u64().unwrap_or(0);
            let log: u64 =
                m["weights"].as_array().map_or(0, |w| w.iter().map(|x| m["m"].as_u64().unwrap_or(0) - x.as_u64().unwrap_or(0)).sum());
            if p.pow(log as u32) > 64 {
                return Err(format!("{}: |{side}| = {}^{log} > 64", c.check, p));
            }
        }
    }
    Ok(out)
}

fn criterion_12() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_witt-omega");
    let start = Instant::now();
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let out = Command::new(bin).args(["verify", "all", "--seed", "0", "--jobs", jobs]).output().map_err(|e| e.to_string())?;
        if out.status.code() != Some(0) {
            return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
        }
        outputs.push(out.stdout);
    }
    let took = start.elapsed();
    if outputs[0] != outputs[1] {
        return Err("reports differ between runs".into());
    }
    within(took / 2, Duration::from_secs(600), "verify all")?;
    Ok(format!("{} bytes identical, {:.1} s per run", outputs[0].len(), took.as_secs_f64() / 2.0))
}

fn main() {
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut by_suite = BTreeMap::new();
    for suite in ["witt", "duality", "omega", "transfer", "integral", "wrinkle", "tense"] {
        let start = Instant::now();
        let report = run(suite, &SuiteOptions { seed: 0, jobs, ..Default::default() }).expect("known suite");
        by_suite.insert(suite, (report, start.elapsed()));
    }
    let reports = Reports { by_suite };

    let criteria: Vec<Criterion> = vec![
        ("Witt vectors from divided powers", Box::new(|| criterion_1(&reports))),
        ("divided power structure oracle", Box::new(|| criterion_2(&reports))),
        ("duality pairings", Box::new(|| criterion_3(&reports))),
        ("embedding of Omega into big Omega", Box::new(|| criterion_4(&reports))),
        ("Frobenius and Verschiebung", Box::new(|| criterion_5(&reports))),
        ("transfer laws", Box::new(|| criterion_6(&reports))),
        ("small Omega integral formulas", Box::new(|| criterion_7(&reports))),
        ("induced decomposition", Box::new(|| criterion_8(&reports))),
        ("conductor and reconstruction", Box::new(|| criterion_9(&reports))),
        ("wrinkled algebras and lifts", Box::new(|| criterion_10(&reports))),
        ("tense products", Box::new(|| criterion_11(&reports))),
        ("determinism and runtime", Box::new(criterion_12)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
