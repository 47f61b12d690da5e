use std::fs;
use std::path::Path;
use std::process::Command;

use bianchi::{hecke_matrix, GaussianInt, ManinSpace, VerifyOptions};
use bianchi_cli::cache::MatrixCache;
use bianchi_cli::{cmd_hecke, cmd_verify, exit, Format, RunConfig};

fn gi(re: i64, im: i64) -> GaussianInt {
    GaussianInt::small(re, im)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bianchi"))
}

fn small_config(cache: &Path) -> RunConfig {
    let mut cfg = RunConfig::new("1+2i", 7, Some("a=(0,0) b=(3,3)"), "trivial").unwrap();
    cfg.cache_dir = Some(cache.to_path_buf());
    cfg.threads = 1;
    cfg
}

#[test]
fn repeat_run_loads_identical_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let primes = [gi(1, 1), gi(2, 1), gi(3, 0)];
    let first = cmd_hecke(&cfg, &primes, false).unwrap();
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 3);

    let space = ManinSpace::new(&cfg.level, &cfg.weight, &cfg.character).unwrap();
    let q = space.quotient().unwrap();
    let cache = MatrixCache::new(dir.path()).unwrap();
    for p in &primes {
        let (m, hit) = cache.get_or_compute(p, &space, &q, 1).unwrap();
        assert!(hit, "T_{p} was not cached");
        assert_eq!(m, hecke_matrix(p, &space, &q, 1).unwrap());
    }
    let second = cmd_hecke(&cfg, &primes, false).unwrap();
    assert_eq!(first.report.render(Format::Structured), second.report.render(Format::Structured));
    assert_eq!(first.report.render(Format::Text), second.report.render(Format::Text));
}

#[test]
fn damaged_or_stale_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let space = ManinSpace::new(&cfg.level, &cfg.weight, &cfg.character).unwrap();
    let q = space.quotient().unwrap();
    let cache = MatrixCache::new(dir.path()).unwrap();
    let p = gi(2, 1);
    let fresh = hecke_matrix(&p, &space, &q, 1).unwrap();
    cache.store(&space, &q, &fresh).unwrap();
    let path = cache.path(&space, &p);
    let good = fs::read_to_string(&path).unwrap();

    let damaged = [
        // flipped payload digit
        {
            let mut s = good.clone();
            let last = s.rfind(']').unwrap() - 1;
            let digit = if &s[last..last + 1] == "1" { "2" } else { "1" };
            s.replace_range(last..last + 1, digit);
            s
        },
        // stale basis hash
        good.lines()
            .map(|l| if l.starts_with("basis ") { "basis 00".to_string() } else { l.to_string() } + "\n")
            .collect(),
        // older format
        good.replacen("bianchi-hecke 1", "bianchi-hecke 0", 1),
        // truncated
        good[..good.len() / 2].to_string(),
        String::new(),
    ];
    for text in damaged {
        fs::write(&path, &text).unwrap();
        assert!(cache.load(&space, &q, &p).is_none());
        let (m, hit) = cache.get_or_compute(&p, &space, &q, 1).unwrap();
        assert!(!hit);
        assert_eq!(m, fresh);
        assert_eq!(fs::read_to_string(&path).unwrap(), good);
    }
    // no temporary files are left behind
    assert!(fs::read_dir(dir.path()).unwrap().all(|e| e.unwrap().path().extension().is_some_and(|x| x == "hecke")));
}

#[test]
fn selfcheck_passes_on_dihedral_example() {
    let mut cfg = RunConfig::new("8+17i", 5, Some("a=(0,0) b=(4,4)"), "quadratic").unwrap();
    cfg.threads = 1;
    let out = cmd_hecke(&cfg, &[gi(1, 1), gi(3, 0), gi(2, 3)], true).unwrap();
    assert_eq!(out.status, exit::PASS, "{}", out.report.text);
    assert!(out.report.text.contains("self-checks:"));
    assert!(!out.report.text.contains("FAIL"));
}

#[test]
fn structured_reports_are_byte_identical() {
    let run = || {
        let out = bin()
            .args(["--format", "structured", "--threads", "1", "eigsys", "--level", "3", "--ell", "5"])
            .args(["--weight", "a=(0,0) b=(3,3)", "--bound", "30"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run();
    assert_eq!(a, run());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["command"], "eigsys");
    assert_eq!(v["result"]["dim"], 2);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["p1", "--level", "1+2i"]), exit::PASS);
    assert_eq!(code(&["dim", "--level", "61", "--ell", "2"]), exit::USAGE);
    assert_eq!(code(&["dim", "--level", "3", "--ell", "3"]), exit::USAGE);
    assert_eq!(code(&["dim", "--level", "1+2i"]), exit::USAGE);
    assert_eq!(code(&["dim", "--level", "1+2x", "--ell", "5"]), exit::USAGE);
    assert_eq!(code(&["verify", "no-such-fixture", "5"]), exit::USAGE);
    assert_eq!(code(&["verify", "a4-61", "5"]), exit::USAGE);
}

#[test]
fn hecke_rejects_primes_dividing_the_level() {
    for p in ["5-6i", "5+6i"] {
        let out = bin().args(["hecke", "--level", "61", "--ell", "3", p]).output().unwrap();
        assert_eq!(out.status.code(), Some(exit::USAGE));
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("prime divides level"), "{err}");
    }
    let out = bin().args(["hecke", "--level", "1+2i", "--ell", "7", "7"]).output().unwrap();
    assert!(String::from_utf8(out.stderr).unwrap().contains("prime divides l"));
    let out = bin().args(["hecke", "--level", "1+2i", "--ell", "7", "5"]).output().unwrap();
    assert!(String::from_utf8(out.stderr).unwrap().contains("does not generate a prime ideal"));
}

const TOY: &str = "\
name = toy
level = 3
ell = 5
character = trivial
class = 1 -1 -1
class = 2 -2 -2
class = 3 0 0
weight = l=5 a=(0,0) b=(3,3)
frob = 1+i split 1 -1
frob = 1+2i split 1 -1
frob = 2+i split 1 -1
frob = 3 inert - -
frob = 2+3i split 2 -2
frob = 3+2i split 2 -2
frob = 1+4i split 1 -1
frob = 4+i split 1 -1
frob = 2+5i split 3 0
frob = 5+2i split 3 0
";

#[test]
fn fixture_files_drive_verify() {
    let dir = tempfile::tempdir().unwrap();
    let opts = VerifyOptions { bound: 30, threads: 1, eig_ext: 1 };
    let good = dir.path().join("toy.fx");
    fs::write(&good, TOY).unwrap();
    let out = cmd_verify(good.to_str().unwrap(), 5, &opts, None).unwrap();
    assert_eq!(out.status, exit::PASS, "{}", out.report.text);

    let bad = dir.path().join("bad.fx");
    fs::write(&bad, TOY.replace("frob = 1+i split 1 -1", "frob = 1+i split 2 -2")).unwrap();
    let out = cmd_verify(bad.to_str().unwrap(), 5, &opts, None).unwrap();
    assert_eq!(out.status, exit::MISMATCH);
    assert!(out.report.text.contains("1+i:-2/-1*"), "{}", out.report.text);
    let status = bin().args(["verify", bad.to_str().unwrap(), "5", "30"]).output().unwrap().status;
    assert_eq!(status.code(), Some(exit::MISMATCH));
}
