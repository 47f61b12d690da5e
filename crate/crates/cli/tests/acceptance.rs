//! Acceptance run: one PASS/FAIL line per criterion, with indented details.
//! Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use bianchi::fixtures::{builtin_names, expected_trace_int};
use bianchi::hecke::{commute, generator_invariance_check};
use bianchi::manin::{quotient, relation_rows};
use bianchi::*;
use bianchi_cli::config::default_threads;
use bianchi_cli::{cmd_hecke, RunConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    details: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { pass: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn gi(re: i64, im: i64) -> GaussianInt {
    GaussianInt::small(re, im)
}

/// Run `verify` for one fixture and record a line per predicted weight.
fn reproduce(v: &mut Verdict, name: &str, ell: u64) {
    let fx = RepFixture::builtin(name).expect("builtin fixture");
    let opts = VerifyOptions { bound: 149, threads: default_threads(), eig_ext: 1 };
    let start = Instant::now();
    match verify(&fx, ell, &opts) {
        Ok(r) => {
            for w in &r.weights {
                let agree = w.rows.iter().filter(|row| row.agrees()).count();
                let what = match w.matched {
                    Some(_) => format!("matching system found at all {} primes", r.primes.len()),
                    None if w.systems.is_empty() => "no eigensystem over the search field".to_string(),
                    None => format!("no matching system (closest agrees at {agree} of {} primes)", r.primes.len()),
                };
                v.check(w.pass(), format!("{name} {}: dim {} of {}, {what}", w.weight, w.dim, w.ambient_dim));
            }
        }
        Err(e) => v.check(false, format!("{name} l={ell}: {e}")),
    }
    v.details.push(format!("     ({name} l={ell} took {:.1}s)", start.elapsed().as_secs_f64()));
}

fn dihedral(ell: u64) -> Verdict {
    let mut v = Verdict::new();
    for name in ["d3-8+17i", "d3-13+28i", "d3-8+35i"] {
        reproduce(&mut v, name, ell);
    }
    v
}

fn tetrahedral() -> Verdict {
    let mut v = Verdict::new();
    reproduce(&mut v, "a4-61", 3);
    v
}

fn acceptance_weights() -> Vec<WeightSpec> {
    let mut out = Vec::new();
    for name in builtin_names() {
        for w in RepFixture::builtin(name).unwrap().weights {
            if !out.contains(&w.weight) {
                out.push(w.weight);
            }
        }
    }
    out
}

fn random_sl2(rng: &mut ChaCha8Rng) -> GMatrix2 {
    let mut m = GMatrix2::identity();
    for _ in 0..rng.gen_range(1..6) {
        let (x, y) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let e = match rng.gen_range(0..3) {
            0 => GMatrix2::small((1, 0), (x, y), (0, 0), (1, 0)),
            1 => GMatrix2::small((1, 0), (0, 0), (x, y), (1, 0)),
            _ => GMatrix2::s(),
        };
        m = &m * &e;
    }
    m
}

fn cf_invariants(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    let mut done = 0;
    while done < 10_000 {
        let r = |rng: &mut ChaCha8Rng| rng.gen_range(-100_000i64..=100_000);
        let (alpha, beta) = (gi(r(rng), r(rng)), gi(r(rng), r(rng)));
        if alpha.is_zero() && beta.is_zero() {
            continue;
        }
        if !ggcd(&alpha, &beta).map_err(|e| e.to_string())?.is_one() {
            continue;
        }
        let e = cf_expand(&alpha, &beta).map_err(|e| e.to_string())?;
        if !e.gammas.iter().all(GMatrix2::is_sl2) {
            return Err(format!("non-SL2 matrix for {alpha}/{beta}"));
        }
        let k = e.partial_quotients.len() as isize;
        for n in 0..k {
            let (pn, qn) = e.convergent(n);
            let (pm, qm) = e.convergent(n - 1);
            let want = gi(if n % 2 == 0 { -1 } else { 1 }, 0);
            if &(&pn * &qm) - &(&pm * &qn) != want {
                return Err(format!("determinant identity fails for {alpha}/{beta} at n = {n}"));
            }
        }
        for w in e.gammas.windows(2) {
            let end = Cusp::new(w[0].a.clone(), w[0].c.clone()).unwrap();
            let start = Cusp::new(w[1].b.clone(), w[1].d.clone()).unwrap();
            if !end.same_point(&start) {
                return Err(format!("expansion of {alpha}/{beta} does not telescope"));
            }
        }
        let last = e.gammas.last().unwrap();
        if !Cusp::new(last.a.clone(), last.c.clone()).unwrap().same_point(&Cusp::new(alpha, beta).unwrap()) {
            return Err("expansion does not end at alpha/beta".into());
        }
        done += 1;
    }
    Ok(done)
}

fn small_spaces() -> Vec<ManinSpace> {
    let mk = |lvl: GaussianInt, w: &str, quad: bool| {
        let ch = if quad { CharacterSpec::quadratic(&lvl) } else { CharacterSpec::trivial(&lvl) };
        ManinSpace::new(&lvl, &w.parse().unwrap(), &ch).unwrap()
    };
    vec![
        mk(gi(1, 2), "l=7 a=(0,0) b=(3,3)", false),
        mk(gi(1, 2), "l=5 a=(1,2) b=(2,4)", false),
        mk(gi(1, 2), "l=5 a=(0,0) b=(2,4)", true),
        mk(gi(3, 0), "l=5 a=(0,0) b=(3,3)", false),
        mk(gi(3, 0), "l=7 a=(1,3) b=(4,4)", true),
        mk(gi(3, 0), "l=11 a=(0,0) b=(5,5)", false),
    ]
}

fn properties() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);

    match cf_invariants(&mut rng) {
        Ok(n) => v.check(true, format!("CF invariants on {n} random coprime pairs")),
        Err(e) => v.check(false, format!("CF invariants: {e}")),
    }

    let weights = acceptance_weights();
    let mut bad = Vec::new();
    for w in &weights {
        let ws = WeightSpace::new(w).unwrap();
        for _ in 0..1_000 {
            let (g, h) = (random_sl2(&mut rng), random_sl2(&mut rng));
            if ws.action_matrix(&(&g * &h)) != ws.action_matrix(&g).mul(&ws.action_matrix(&h)).unwrap() {
                bad.push(w.to_string());
                break;
            }
        }
    }
    v.check(
        bad.is_empty(),
        format!("left action law on 1000 random SL2(O) pairs for {} weights {bad:?}", weights.len()),
    );

    let mut hecke_ok = true;
    let mut relations_ok = true;
    let mut shuffle_ok = true;
    for s in small_spaces() {
        let spec = s.weight().spec().clone();
        let q = s.quotient().unwrap();
        let ell = gi(spec.ell as i64, 0);
        let primes: Vec<GaussianInt> = enumerate_primes(60)
            .into_iter()
            .map(|(p, _)| p)
            .filter(|p| !p.divides(s.table().level()) && !p.divides(&ell))
            .take(4)
            .collect();
        let ops: Vec<HeckeMatrix> = primes.iter().map(|p| hecke_matrix(p, &s, &q, 1).unwrap()).collect();
        for (i, a) in ops.iter().enumerate() {
            for b in &ops[i + 1..] {
                hecke_ok &= commute(a, b).unwrap();
            }
        }
        for p in &primes {
            hecke_ok &= generator_invariance_check(p, &s, &q, 1).unwrap();
        }
        let rows = relation_rows(&s).unwrap();
        relations_ok &= rows.iter().all(|r| q.project_row(r).iter().all(|x| x.is_zero()));
        for seed in 0..3u64 {
            let mut rows = rows.clone();
            rows.shuffle(&mut rng);
            let opts = EliminationOptions { seed, ..Default::default() };
            shuffle_ok &= quotient(s.field(), s.ambient_dim(), s.dim_v(), rows, &opts).dim() == q.dim();
        }
    }
    v.check(hecke_ok, "Hecke commutativity and generator invariance at levels 1+2i and 3".into());
    v.check(relations_ok, "relation rows project to zero".into());
    v.check(shuffle_ok, "quotient dimension invariant under row shuffling".into());

    let mut fixtures_ok = true;
    let mut entries = 0;
    for name in builtin_names() {
        let fx = RepFixture::builtin(name).unwrap();
        for e in fx.frob.iter().filter(|e| e.order.is_some()) {
            let t = expected_trace_int(&fx, &e.prime).unwrap();
            let a = e.tabulated.unwrap();
            fixtures_ok &= fx.ells.iter().all(|&l| (a - t).rem_euclid(l as i64) == 0);
            entries += 1;
        }
    }
    v.check(fixtures_ok, format!("fixture self-consistency ({entries} tabulated eigenvalues against class traces)"));

    let sizes =
        [((1, 1), 3), ((1, 2), 6), ((3, 0), 10), ((8, 17), 354), ((13, 28), 954), ((8, 35), 1290), ((61, 0), 3844)];
    let p1_ok = sizes.iter().all(|&((a, b), n)| {
        let t = P1Table::new(&gi(a, b)).unwrap();
        t.len() == n && t.expected_size() == n
    });
    v.check(p1_ok, "P^1 sizes at 7 levels match the index formula".into());
    v
}

fn negative_controls() -> Verdict {
    let mut v = Verdict::new();
    for lvl in [gi(61, 0), gi(8, 17), gi(1, 1)] {
        v.check(!torsion_check(2, &lvl).is_ok(), format!("torsion_check rejects l=2 at level {lvl}"));
    }
    v.check(!torsion_check(3, &gi(3, 0)).is_ok(), "torsion_check rejects l=3 at level 3".into());
    v.check(torsion_check(3, &gi(61, 0)).is_ok(), "torsion_check accepts l=3 at level 61".into());
    let cfg = RunConfig::new("61", 3, None, "trivial").unwrap();
    for p in [gi(5, -6), gi(5, 6)] {
        let msg = match cmd_hecke(&cfg, std::slice::from_ref(&p), false) {
            Ok(_) => "accepted".to_string(),
            Err(e) => e.to_string(),
        };
        v.check(msg.contains("prime divides level"), format!("hecke at {p}, level 61: {msg}"));
    }
    v
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 5] = [
        ("D3 eigensystems, l = 5, levels 8+17i, 13+28i, 8+35i", || dihedral(5)),
        ("D3 eigensystems, l = 7, three weights per level", || dihedral(7)),
        ("A4 eigensystems, l = 3, level 61, six weights", tetrahedral),
        ("property suite", properties),
        ("negative controls", negative_controls),
    ];
    let mut all = true;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        all &= v.pass;
        println!(
            "criterion {}: {} - {title} ({:.1}s)",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        for d in &v.details {
            println!("    {d}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
