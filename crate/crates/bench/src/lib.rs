//! Shared setup for the criterion benches in `benches/`.

use bianchi::{CharacterSpec, GaussianInt, ManinSpace, WeightSpec};

/// The symbol space at `level` for `weight` (e.g. `"l=7 a=(0,0) b=(3,3)"`) with trivial character.
pub fn space(level: &GaussianInt, weight: &str) -> ManinSpace {
    let w: WeightSpec = weight.parse().expect("weight");
    ManinSpace::new(level, &w, &CharacterSpec::trivial(level)).expect("space")
}
