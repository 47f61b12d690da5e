//! Mod-`l` cohomological modular forms over `Q(i)` computed with Manin symbols.
//!
//! The pipeline is: enumerate `P^1(O/n)` ([`p1`]), build the Manin-symbol
//! space with its relations and take the quotient ([`manin`]), compute Hecke
//! operators ([`hecke`]) and their simultaneous eigensystems ([`eigen`]), and
//! compare against Galois-representation trace tables ([`fixtures`]).

pub mod eigen;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod gaussian;
pub mod hecke;
pub mod int;
pub mod linalg;
pub mod manin;
pub mod modsym;
pub mod p1;
pub mod sparse;
pub mod weight;

pub use eigen::{char_poly, simultaneous_eigensystems, EigenDecomposition, EigenSystem};
pub use error::{Error, Result};
pub use field::{roots_in_field, FqElem, FqField, QuadraticCharacter, ResidueMap};
pub use fixtures::{
    expected_trace, torsion_check, verify, verify_with, ConjClassTable, RepFixture, TorsionVerdict, VerificationReport,
    VerifyOptions, WeightReport,
};
pub use gaussian::{
    enumerate_primes, euc_divmod, floor_q, ggcd, residues_mod, split_type, unimodular_complete, GMatrix2, GaussianInt,
    GaussianRational, SplitType,
};
pub use hecke::{delta_cosets, hecke_matrix, DeltaCosets, HeckeMatrix};
pub use int::Int;
pub use linalg::FqMatrix;
pub use manin::{ManinSpace, ManinVector, QuotientSpace};
pub use modsym::{cf_expand, to_manin, CFExpansion, Cusp, ModSym};
pub use p1::{P1Point, P1Table};
pub use sparse::{EliminationOptions, Reduction};
pub use weight::{char_value, CharacterKind, CharacterSpec, WeightAction, WeightSpace, WeightSpec};
