use std::path::PathBuf;

use anyhow::{Context, Result};
use bianchi::{torsion_check, CharacterSpec, GaussianInt, TorsionVerdict, WeightSpec};

use crate::Usage;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

/// Everything a space-level command needs, validated up front.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub level: GaussianInt,
    pub ell: u64,
    pub weight: WeightSpec,
    pub character: CharacterSpec,
    /// Norm bound for the primes used by `hecke` and `eigsys`.
    pub bound: u64,
    pub eig_ext: u32,
    pub cache_dir: Option<PathBuf>,
    pub threads: usize,
    pub format: Format,
}

impl RunConfig {
    /// Parse and validate. `weight` may omit the `l=` part, and defaults to the
    /// trivial weight.
    pub fn new(level: &str, ell: u64, weight: Option<&str>, character: &str) -> Result<Self> {
        let level: GaussianInt = level.parse().with_context(|| format!("--level {level:?}"))?;
        if level.is_zero() {
            return Err(Usage("the level must be nonzero".into()).into());
        }
        if let TorsionVerdict::Rejected(why) = torsion_check(ell, &level) {
            return Err(bianchi::Error::Torsion(why).into());
        }
        let text = match weight {
            Some(w) if w.contains("l=") => w.to_string(),
            Some(w) => format!("l={ell} {w}"),
            None => format!("l={ell} a=(0,0) b=(1,1)"),
        };
        let weight: WeightSpec = text.parse().with_context(|| format!("--weight {text:?}"))?;
        if weight.ell != ell {
            return Err(Usage(format!("--weight has l={} but --ell is {ell}", weight.ell)).into());
        }
        let character = CharacterSpec::parse(&level, character)?;
        Ok(RunConfig {
            level,
            ell,
            weight,
            character,
            bound: 149,
            eig_ext: 1,
            cache_dir: None,
            threads: default_threads(),
            format: Format::Text,
        })
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
