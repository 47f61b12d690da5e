//! Galois-representation fixtures, the trace rules that turn Frobenius orders
//! into expected Hecke eigenvalues, and the end-to-end verification driver.
//!
//! Fixture files are plain `key = value` lines; `#` starts a comment.
//!
//! ```text
//! name = a4-61
//! level = 61
//! ell = 3
//! character = trivial
//! class = 4 0 1            # order, trace at split q, trace at inert q
//! weight = l=3 a=(0,2) b=(1,1) | B={0,1}
//! frob = 11 inert 4 1      # prime, split|inert, order, tabulated a_q
//! frob = 3 inert - -       # no data: the prime divides l * level
//! ```

use crate::eigen::{simultaneous_eigensystems, EigenSystem};
use crate::error::{Error, Result};
use crate::field::{FqElem, FqField};
use crate::gaussian::GaussianInt;
use crate::hecke::{hecke_matrix, HeckeMatrix};
use crate::manin::{ManinSpace, QuotientSpace};
use crate::weight::{CharacterSpec, WeightSpec};

const BUILTIN: &[(&str, &str)] = &[
    ("a4-61", include_str!("../fixtures/a4-61.fx")),
    ("d3-8+17i", include_str!("../fixtures/d3-8+17i.fx")),
    ("d3-13+28i", include_str!("../fixtures/d3-13+28i.fx")),
    ("d3-8+35i", include_str!("../fixtures/d3-8+35i.fx")),
];

/// Names of the fixtures compiled into the library.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClass {
    pub order: u32,
    pub split_trace: i64,
    pub inert_trace: i64,
}

/// Traces of the image group by element order, for split and inert primes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConjClassTable {
    pub classes: Vec<ConjClass>,
}

impl ConjClassTable {
    pub fn trace(&self, order: u32, inert: bool) -> Result<i64> {
        let c = self.classes.iter().find(|c| c.order == order).ok_or(Error::UnknownOrder(order))?;
        Ok(if inert { c.inert_trace } else { c.split_trace })
    }
}

/// One row of Frobenius data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobEntry {
    pub prime: GaussianInt,
    pub inert: bool,
    /// `None` for primes the table leaves out.
    pub order: Option<u32>,
    /// The eigenvalue as printed next to the order, kept for cross-checking.
    pub tabulated: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedWeight {
    pub weight: WeightSpec,
    /// Free-form annotation after `|` (the `B` column for the A4 fixture).
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepFixture {
    pub name: String,
    pub level: GaussianInt,
    pub ells: Vec<u64>,
    pub character: CharacterSpec,
    pub classes: ConjClassTable,
    pub frob: Vec<FrobEntry>,
    pub weights: Vec<PredictedWeight>,
}

fn parse_opt<T: std::str::FromStr>(s: &str, what: &str) -> Result<Option<T>> {
    if s == "-" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

impl RepFixture {
    /// A fixture compiled into the library.
    pub fn builtin(name: &str) -> Result<Self> {
        let (_, text) =
            BUILTIN.iter().find(|(n, _)| *n == name).ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
        Self::parse(text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut level: Option<GaussianInt> = None;
        let mut ells = Vec::new();
        let mut character = None;
        let mut classes = ConjClassTable::default();
        let mut frob = Vec::new();
        let mut weights = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Parse(format!("line {}: {m}: {raw:?}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let value = value.trim();
            match key.trim() {
                "name" => name = Some(value.to_string()),
                "level" => level = Some(value.parse()?),
                "ell" => {
                    for t in value.split(',') {
                        ells.push(t.trim().parse::<u64>().map_err(|_| bad("bad ell"))?);
                    }
                }
                "character" => character = Some(value.to_string()),
                "class" => {
                    let t: Vec<i64> = value
                        .split_whitespace()
                        .map(|x| x.parse::<i64>().map_err(|_| bad("bad class")))
                        .collect::<Result<_>>()?;
                    let [o, s, i] = <[i64; 3]>::try_from(t).map_err(|_| bad("class needs three integers"))?;
                    let order = u32::try_from(o).map_err(|_| bad("bad order"))?;
                    classes.classes.push(ConjClass { order, split_trace: s, inert_trace: i });
                }
                "weight" => {
                    let (w, note) = match value.split_once('|') {
                        Some((w, n)) => (w.trim(), Some(n.trim().to_string())),
                        None => (value, None),
                    };
                    weights.push(PredictedWeight { weight: w.parse()?, note });
                }
                "frob" => {
                    let t: Vec<&str> = value.split_whitespace().collect();
                    let [p, kind, o, a] = <[&str; 4]>::try_from(t).map_err(|_| bad("frob needs four fields"))?;
                    let inert = match kind {
                        "split" => false,
                        "inert" => true,
                        _ => return Err(bad("expected split or inert")),
                    };
                    frob.push(FrobEntry {
                        prime: p.parse()?,
                        inert,
                        order: parse_opt(o, "order")?,
                        tabulated: parse_opt(a, "a_q")?,
                    });
                }
                _ => return Err(bad("unknown key")),
            }
        }
        let missing = |k: &str| Error::Parse(format!("fixture is missing {k:?}"));
        let level = level.ok_or_else(|| missing("level"))?;
        let character = CharacterSpec::parse(&level, &character.ok_or_else(|| missing("character"))?)?;
        Ok(RepFixture { name: name.ok_or_else(|| missing("name"))?, level, ells, character, classes, frob, weights })
    }

    pub fn weights_for(&self, ell: u64) -> Vec<&PredictedWeight> {
        self.weights.iter().filter(|w| w.weight.ell == ell).collect()
    }

    pub fn entry(&self, q: &GaussianInt) -> Option<&FrobEntry> {
        let c = q.canonical();
        self.frob.iter().find(|e| e.prime.canonical() == c)
    }

    /// Whether `q` divides `l * level`.
    pub fn excluded(&self, q: &GaussianInt, ell: u64) -> bool {
        let m = &self.level * &GaussianInt::small(ell as i64, 0);
        q.divides(&m)
    }

    /// Primes with data, of norm at most `bound`, coprime to `l * level`, in table order.
    pub fn primes(&self, ell: u64, bound: u64) -> Vec<&FrobEntry> {
        self.frob
            .iter()
            .filter(|e| e.order.is_some() && !self.excluded(&e.prime, ell))
            .filter(|e| e.prime.norm().to_i64().is_some_and(|n| n as u64 <= bound))
            .collect()
    }
}

/// `tr(rho(Frob_q))` as an integer, from the recorded order and residue type.
pub fn expected_trace_int(fx: &RepFixture, q: &GaussianInt) -> Result<i64> {
    let e = fx.entry(q).ok_or_else(|| Error::InvalidInput(format!("{q} has no entry in fixture {}", fx.name)))?;
    let order = e.order.ok_or_else(|| Error::PrimeExcluded {
        prime: q.clone(),
        reason: "no Frobenius data (prime divides l * level)".into(),
    })?;
    fx.classes.trace(order, e.inert)
}

/// `tr(rho(Frob_q))` reduced into `field` (of characteristic `l`).
pub fn expected_trace(fx: &RepFixture, q: &GaussianInt, field: &FqField) -> Result<FqElem> {
    if fx.excluded(q, field.ell() as u64) {
        return Err(Error::PrimeExcluded { prime: q.clone(), reason: "prime divides l * level".into() });
    }
    Ok(field.from_i64(expected_trace_int(fx, q)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionVerdict {
    Ok,
    Rejected(String),
}

impl TorsionVerdict {
    pub fn is_ok(&self) -> bool {
        *self == TorsionVerdict::Ok
    }
}

/// Whether `l` is invertible on the torsion of `Gamma_1(level)`, as the
/// homology computation requires.
pub fn torsion_check(ell: u64, level: &GaussianInt) -> TorsionVerdict {
    match ell {
        2 => TorsionVerdict::Rejected("2 is ramified in Q(i); l = 2 is not supported".into()),
        3 if level.divides(&GaussianInt::small(3, 0)) => {
            TorsionVerdict::Rejected(format!("level {level} divides 3, so Gamma may have 3-torsion"))
        }
        _ => TorsionVerdict::Ok,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub prime: GaussianInt,
    pub expected: FqElem,
    /// The value in the matched system, or in the closest one on failure.
    pub found: Option<FqElem>,
}

impl ComparisonRow {
    pub fn agrees(&self) -> bool {
        self.found == Some(self.expected)
    }
}

#[derive(Clone, Debug)]
pub struct WeightReport {
    pub weight: WeightSpec,
    pub note: Option<String>,
    pub field: FqField,
    pub ambient_dim: usize,
    pub dim: usize,
    pub systems: Vec<EigenSystem>,
    pub residue_dim: usize,
    /// Index into `systems` of a system matching every expected trace.
    pub matched: Option<usize>,
    pub rows: Vec<ComparisonRow>,
}

impl WeightReport {
    pub fn pass(&self) -> bool {
        self.matched.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub fixture: String,
    pub level: GaussianInt,
    pub ell: u64,
    pub bound: u64,
    pub primes: Vec<GaussianInt>,
    pub weights: Vec<WeightReport>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        !self.weights.is_empty() && self.weights.iter().all(WeightReport::pass)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub bound: u64,
    pub threads: usize,
    /// Degree of the eigenvalue search field over the weight's coefficient field.
    pub eig_ext: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { bound: 149, threads: 1, eig_ext: 1 }
    }
}

/// Run [`verify_weight_with`] on every predicted weight for `l`, using plain
/// [`hecke_matrix`] calls.
pub fn verify(fx: &RepFixture, ell: u64, opts: &VerifyOptions) -> Result<VerificationReport> {
    verify_with(fx, ell, opts, &mut |pi, space, q| hecke_matrix(pi, space, q, opts.threads))
}

/// As [`verify`], obtaining Hecke matrices through `hecke` (e.g. from a cache).
pub fn verify_with(
    fx: &RepFixture,
    ell: u64,
    opts: &VerifyOptions,
    hecke: &mut dyn FnMut(&GaussianInt, &ManinSpace, &QuotientSpace) -> Result<HeckeMatrix>,
) -> Result<VerificationReport> {
    if !fx.ells.contains(&ell) {
        return Err(Error::InvalidInput(format!("fixture {} has no data for l = {ell}", fx.name)));
    }
    if let TorsionVerdict::Rejected(why) = torsion_check(ell, &fx.level) {
        return Err(Error::Torsion(why));
    }
    let primes: Vec<GaussianInt> = fx.primes(ell, opts.bound).into_iter().map(|e| e.prime.clone()).collect();
    let mut weights = Vec::new();
    for pw in fx.weights_for(ell) {
        let space = ManinSpace::new(&fx.level, &pw.weight, &fx.character)?;
        let mut rep = verify_weight_with(fx, &space, &primes, opts, hecke)?;
        rep.note = pw.note.clone();
        weights.push(rep);
    }
    Ok(VerificationReport {
        fixture: fx.name.clone(),
        level: fx.level.clone(),
        ell,
        bound: opts.bound,
        primes,
        weights,
    })
}

/// Compute `H`, the Hecke matrices at `primes` and their eigensystems, and look
/// for a system agreeing with the fixture's traces at every prime.
pub fn verify_weight_with(
    fx: &RepFixture,
    space: &ManinSpace,
    primes: &[GaussianInt],
    opts: &VerifyOptions,
    hecke: &mut dyn FnMut(&GaussianInt, &ManinSpace, &QuotientSpace) -> Result<HeckeMatrix>,
) -> Result<WeightReport> {
    let q = space.quotient()?;
    let base = space.field();
    let search = FqField::new(base.ell() as u64, base.degree() * opts.eig_ext.max(1))?;
    let ops = primes.iter().map(|p| hecke(p, space, &q)).collect::<Result<Vec<_>>>()?;
    let dec = simultaneous_eigensystems(&ops, &search)?;
    let expected = primes.iter().map(|p| expected_trace(fx, p, &search)).collect::<Result<Vec<_>>>()?;
    let score = |s: &EigenSystem| expected.iter().zip(&s.eigenvalues).filter(|(e, (_, a))| *e == a).count();
    let matched = dec.systems.iter().position(|s| score(s) == primes.len());
    let shown = matched.or_else(|| (0..dec.systems.len()).max_by_key(|&k| (score(&dec.systems[k]), usize::MAX - k)));
    let rows = primes
        .iter()
        .zip(&expected)
        .enumerate()
        .map(|(k, (p, &e))| ComparisonRow {
            prime: p.clone(),
            expected: e,
            found: shown.map(|s| dec.systems[s].eigenvalues[k].1),
        })
        .collect();
    Ok(WeightReport {
        weight: space.weight().spec().clone(),
        note: None,
        field: search,
        ambient_dim: space.ambient_dim(),
        dim: q.dim(),
        systems: dec.systems,
        residue_dim: dec.residue_dim,
        matched,
        rows,
    })
}
