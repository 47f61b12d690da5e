use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use bianchi::gaussian::factor;
use bianchi::hecke::{commute, generator_invariance_check};
use bianchi::{
    cf_expand, enumerate_primes, ggcd, simultaneous_eigensystems, verify_with, FqElem, FqField, GaussianInt,
    HeckeMatrix, ManinSpace, P1Table, RepFixture, VerificationReport, VerifyOptions,
};
use serde_json::{json, Value};

use crate::cache::{hecke_via, MatrixCache};
use crate::config::RunConfig;
use crate::report::{config_echo, Report};
use crate::{exit, Usage};

/// A finished command: its report and the process exit status.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub status: i32,
}

fn show(f: &FqField, x: FqElem) -> String {
    match f.to_signed(x) {
        Some(v) => v.to_string(),
        None => f.format(x),
    }
}

fn parse_gaussian(s: &str) -> Result<GaussianInt> {
    s.parse::<GaussianInt>().with_context(|| format!("Gaussian integer {s:?}"))
}

pub fn parse_primes(args: &[String]) -> Result<Vec<GaussianInt>> {
    args.iter().map(|s| parse_gaussian(s)).collect()
}

fn open_cache(dir: Option<&Path>) -> Result<Option<MatrixCache>> {
    dir.map(|d| MatrixCache::new(d).with_context(|| format!("cache directory {}", d.display()))).transpose()
}

/// Reject generators that are not prime or that divide `l * level`.
fn check_hecke_prime(p: &GaussianInt, cfg: &RunConfig) -> bianchi::Result<()> {
    let (_, facs) = factor(p)?;
    if facs.len() != 1 || facs[0].1 != 1 {
        return Err(bianchi::Error::InvalidInput(format!("{p} does not generate a prime ideal")));
    }
    if !ggcd(p, &cfg.level)?.is_one() {
        return Err(bianchi::Error::PrimeExcluded { prime: p.clone(), reason: "prime divides level".into() });
    }
    if p.divides(&GaussianInt::small(cfg.ell as i64, 0)) {
        return Err(bianchi::Error::PrimeExcluded { prime: p.clone(), reason: "prime divides l".into() });
    }
    Ok(())
}

/// The given primes after validation, or every admissible prime up to the bound.
fn hecke_primes(cfg: &RunConfig, given: &[GaussianInt]) -> Result<Vec<GaussianInt>> {
    if given.is_empty() {
        let ell = GaussianInt::small(cfg.ell as i64, 0);
        return Ok(enumerate_primes(cfg.bound)
            .into_iter()
            .map(|(p, _)| p)
            .filter(|p| !p.divides(&cfg.level) && !p.divides(&ell))
            .collect());
    }
    for p in given {
        check_hecke_prime(p, cfg)?;
    }
    Ok(given.to_vec())
}

pub fn cmd_p1(level: &str) -> Result<Outcome> {
    let n = parse_gaussian(level)?;
    let t = P1Table::new(&n)?;
    let points: Vec<String> = t.points().map(|p| format!("({}:{})", p.c, p.d)).collect();
    let mut text = format!("P^1(O/({n})): {} points (index formula {})\n", t.len(), t.expected_size());
    for (k, p) in points.iter().enumerate() {
        let _ = writeln!(text, "  {k:>6}  {p}");
    }
    let result = json!({ "size": t.len(), "expected_size": t.expected_size(), "points": points });
    Ok(Outcome { report: Report::new("p1", json!({ "level": n.to_string() }), result, text), status: exit::PASS })
}

pub fn cmd_cf(alpha: &str, beta: &str) -> Result<Outcome> {
    let (a, b) = (parse_gaussian(alpha)?, parse_gaussian(beta)?);
    let e = cf_expand(&a, &b)?;
    let quotients: Vec<String> = e.partial_quotients.iter().map(|q| q.to_string()).collect();
    let gammas: Vec<String> = e.gammas.iter().map(|g| g.to_string()).collect();
    let mut text = format!("{a} / {b}\n  partial quotients: [{}]\n", quotients.join(", "));
    for (k, g) in gammas.iter().enumerate() {
        let _ = writeln!(text, "  gamma_{k} = {g}");
    }
    let result = json!({ "partial_quotients": quotients, "gammas": gammas });
    let config = json!({ "alpha": a.to_string(), "beta": b.to_string() });
    Ok(Outcome { report: Report::new("cf", config, result, text), status: exit::PASS })
}

pub fn cmd_dim(cfg: &RunConfig) -> Result<Outcome> {
    let space = ManinSpace::new(&cfg.level, &cfg.weight, &cfg.character)?;
    let q = space.quotient()?;
    let p1 = space.table().len();
    let text = format!(
        "level {}, weight {}, character {}\n  |P^1| = {p1}\n  dim V = {}\n  ambient = {}\n  dim H = {}\n",
        cfg.level,
        cfg.weight,
        cfg.character,
        space.dim_v(),
        space.ambient_dim(),
        q.dim()
    );
    let result = json!({ "p1": p1, "dim_v": space.dim_v(), "ambient": space.ambient_dim(), "dim": q.dim() });
    Ok(Outcome { report: Report::new("dim", config_echo(cfg), result, text), status: exit::PASS })
}

fn matrix_json(m: &HeckeMatrix) -> Value {
    let f = m.matrix.field();
    let rows: Vec<Vec<String>> =
        (0..m.matrix.rows()).map(|r| m.matrix.row(r).iter().map(|&x| f.format(x)).collect()).collect();
    json!({ "prime": m.prime.to_string(), "rows": rows })
}

pub fn cmd_hecke(cfg: &RunConfig, primes: &[GaussianInt], selfcheck: bool) -> Result<Outcome> {
    let primes = hecke_primes(cfg, primes)?;
    let cache = open_cache(cfg.cache_dir.as_deref())?;
    let space = ManinSpace::new(&cfg.level, &cfg.weight, &cfg.character)?;
    let q = space.quotient()?;
    let ops = primes
        .iter()
        .map(|p| hecke_via(cache.as_ref(), p, &space, &q, cfg.threads))
        .collect::<bianchi::Result<Vec<_>>>()?;
    let mut text =
        format!("level {}, weight {}, character {}, dim H = {}\n", cfg.level, cfg.weight, cfg.character, q.dim());
    for m in &ops {
        text.push_str(&m.to_string());
    }
    let mut result = json!({ "dim": q.dim(), "matrices": ops.iter().map(matrix_json).collect::<Vec<_>>() });
    let mut status = exit::PASS;
    if selfcheck {
        let mut checks = Vec::new();
        for (i, a) in ops.iter().enumerate() {
            for b in &ops[i + 1..] {
                checks.push((format!("T_{} T_{} commute", a.prime, b.prime), commute(a, b)?));
            }
        }
        for p in &primes {
            checks.push((
                format!("T_{p} independent of generator"),
                generator_invariance_check(p, &space, &q, cfg.threads)?,
            ));
        }
        text.push_str("self-checks:\n");
        for (name, ok) in &checks {
            let _ = writeln!(text, "  {} {name}", if *ok { "ok  " } else { "FAIL" });
        }
        if checks.iter().any(|c| !c.1) {
            status = exit::INTERNAL;
        }
        result["selfcheck"] = json!(checks.iter().map(|(n, ok)| json!({ "check": n, "ok": ok })).collect::<Vec<_>>());
    }
    Ok(Outcome { report: Report::new("hecke", config_echo(cfg), result, text), status })
}

pub fn cmd_eigsys(cfg: &RunConfig, primes: &[GaussianInt]) -> Result<Outcome> {
    let primes = hecke_primes(cfg, primes)?;
    let cache = open_cache(cfg.cache_dir.as_deref())?;
    let space = ManinSpace::new(&cfg.level, &cfg.weight, &cfg.character)?;
    let q = space.quotient()?;
    let base = space.field();
    let search = FqField::new(base.ell() as u64, base.degree() * cfg.eig_ext.max(1))?;
    let ops = primes
        .iter()
        .map(|p| hecke_via(cache.as_ref(), p, &space, &q, cfg.threads))
        .collect::<bianchi::Result<Vec<_>>>()?;
    let dec = simultaneous_eigensystems(&ops, &search)?;
    let mut text = format!(
        "level {}, weight {}, character {}: dim H = {}, search field {}\n",
        cfg.level,
        cfg.weight,
        cfg.character,
        dec.dim,
        search.descriptor()
    );
    let mut systems = Vec::new();
    for (k, s) in dec.systems.iter().enumerate() {
        let vals: Vec<String> = s.eigenvalues.iter().map(|(p, a)| format!("{p}:{}", show(&search, *a))).collect();
        let _ = writeln!(text, "  system {k} (multiplicity {}): {}", s.multiplicity, vals.join(" "));
        let pairs: Vec<Value> = s.eigenvalues.iter().map(|(p, a)| json!([p.to_string(), search.format(*a)])).collect();
        systems.push(json!({ "multiplicity": s.multiplicity, "eigenvalues": pairs }));
    }
    let _ = writeln!(text, "  unaccounted dimension: {}", dec.residue_dim);
    let result = json!({
        "dim": dec.dim,
        "field": search.descriptor(),
        "primes": primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "systems": systems,
        "residue_dim": dec.residue_dim,
    });
    Ok(Outcome { report: Report::new("eigsys", config_echo(cfg), result, text), status: exit::PASS })
}

/// A builtin fixture by name, or a fixture file by path.
pub fn load_fixture(name: &str) -> Result<RepFixture> {
    match RepFixture::builtin(name) {
        Ok(fx) => Ok(fx),
        Err(e) if Path::new(name).is_file() => {
            let text = std::fs::read_to_string(name).with_context(|| format!("reading {name}"))?;
            RepFixture::parse(&text).with_context(|| format!("parsing {name} (not a builtin: {e})"))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn verification_json(r: &VerificationReport) -> Value {
    let weights: Vec<Value> = r
        .weights
        .iter()
        .map(|w| {
            let f = &w.field;
            let systems: Vec<Value> = w
                .systems
                .iter()
                .map(|s| {
                    let pairs: Vec<Value> =
                        s.eigenvalues.iter().map(|(p, a)| json!([p.to_string(), f.format(*a)])).collect();
                    json!({ "multiplicity": s.multiplicity, "eigenvalues": pairs })
                })
                .collect();
            let rows: Vec<Value> = w
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "prime": row.prime.to_string(),
                        "expected": f.format(row.expected),
                        "found": row.found.map(|x| f.format(x)),
                        "agrees": row.agrees(),
                    })
                })
                .collect();
            json!({
                "weight": w.weight.to_string(),
                "note": w.note,
                "field": f.descriptor(),
                "ambient": w.ambient_dim,
                "dim": w.dim,
                "residue_dim": w.residue_dim,
                "systems": systems,
                "matched": w.matched,
                "pass": w.pass(),
                "rows": rows,
            })
        })
        .collect();
    json!({
        "fixture": r.fixture,
        "level": r.level.to_string(),
        "ell": r.ell,
        "primes": r.primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "weights": weights,
        "pass": r.pass(),
    })
}

pub fn verification_text(r: &VerificationReport) -> String {
    let mut text = format!(
        "fixture {}: level {}, l = {}, {} primes of norm <= {}\n",
        r.fixture,
        r.level,
        r.ell,
        r.primes.len(),
        r.bound
    );
    for w in &r.weights {
        let note = w.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
        let _ = writeln!(
            text,
            "weight {}{note}: ambient {}, dim {}, {} systems, unaccounted {}: {}",
            w.weight,
            w.ambient_dim,
            w.dim,
            w.systems.len(),
            w.residue_dim,
            if w.pass() { "PASS" } else { "FAIL" }
        );
        let label = if w.pass() { "matched system" } else { "closest system" };
        let cells: Vec<String> = w
            .rows
            .iter()
            .map(|row| {
                let found = row.found.map(|x| show(&w.field, x)).unwrap_or_else(|| "-".into());
                let mark = if row.agrees() { "" } else { "*" };
                format!("{}:{}/{found}{mark}", row.prime, show(&w.field, row.expected))
            })
            .collect();
        let _ = writeln!(text, "  {label} (expected/found, * marks a mismatch):");
        for chunk in cells.chunks(6) {
            let _ = writeln!(text, "    {}", chunk.join("  "));
        }
    }
    let passed = r.weights.iter().filter(|w| w.pass()).count();
    let _ = writeln!(
        text,
        "verdict: {} ({passed} of {} weights matched)",
        if r.pass() { "PASS" } else { "FAIL" },
        r.weights.len()
    );
    text
}

pub fn cmd_verify(fixture: &str, ell: u64, opts: &VerifyOptions, cache_dir: Option<&Path>) -> Result<Outcome> {
    let fx = load_fixture(fixture)?;
    if !fx.ells.contains(&ell) {
        let known: Vec<String> = fx.ells.iter().map(|l| l.to_string()).collect();
        return Err(Usage(format!("fixture {} has data for l in {{{}}}, not {ell}", fx.name, known.join(", "))).into());
    }
    let cache = open_cache(cache_dir)?;
    let r = verify_with(&fx, ell, opts, &mut |p, space, q| hecke_via(cache.as_ref(), p, space, q, opts.threads))?;
    let config = json!({ "fixture": fx.name, "ell": ell, "bound": opts.bound, "eig_ext": opts.eig_ext });
    let status = if r.pass() { exit::PASS } else { exit::MISMATCH };
    Ok(Outcome { report: Report::new("verify", config, verification_json(&r), verification_text(&r)), status })
}
