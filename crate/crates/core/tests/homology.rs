use bianchi::manin::{alt_relation_rows, compact_relation_rows, quotient, relation_rows};
use bianchi::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gi(re: i64, im: i64) -> GaussianInt {
    GaussianInt::small(re, im)
}

fn space(level: (i64, i64), weight: &str, quadratic: bool) -> ManinSpace {
    let lvl = gi(level.0, level.1);
    let ch = if quadratic { CharacterSpec::quadratic(&lvl) } else { CharacterSpec::trivial(&lvl) };
    ManinSpace::new(&lvl, &weight.parse().unwrap(), &ch).unwrap()
}

/// Small spaces covering trivial and twisted weights, split and inert `l`,
/// and a nontrivial character.
fn small_spaces() -> Vec<ManinSpace> {
    vec![
        space((1, 2), "l=7 a=(0,0) b=(3,3)", false),
        space((1, 2), "l=5 a=(1,2) b=(2,4)", false),
        space((1, 2), "l=3 a=(0,0) b=(2,2)", false),
        space((1, 2), "l=5 a=(0,0) b=(2,4)", true),
        space((3, 0), "l=5 a=(0,0) b=(3,3)", false),
        space((3, 0), "l=11 a=(0,0) b=(5,5)", false),
        space((3, 0), "l=7 a=(1,3) b=(4,4)", true),
        space((3, 0), "l=5 a=(0,0) b=(3,3)", true),
    ]
}

fn dense(f: &FqField, ncols: usize, rows: &[Vec<(u32, FqElem)>]) -> FqMatrix {
    let mut m = FqMatrix::zeros(f, rows.len(), ncols);
    for (r, row) in rows.iter().enumerate() {
        for &(c, a) in row {
            m.set(r, c as usize, f.add(m.get(r, c as usize), a));
        }
    }
    m
}

fn coprime_primes(level: &GaussianInt, ell: u64, count: usize) -> Vec<GaussianInt> {
    let ell = gi(ell as i64, 0);
    enumerate_primes(200)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| ggcd(p, level).unwrap().is_one() && ggcd(p, &ell).unwrap().is_one())
        .take(count)
        .collect()
}

#[test]
fn relations_project_to_zero() {
    for s in small_spaces() {
        let q = s.quotient().unwrap();
        for rows in [relation_rows(&s).unwrap(), alt_relation_rows(&s).unwrap(), compact_relation_rows(&s).unwrap()] {
            for row in &rows {
                assert!(q.project_row(row).iter().all(|x| x.is_zero()));
            }
        }
    }
}

#[test]
fn dimension_matches_dense_rank_of_alternative_relations() {
    for s in small_spaces() {
        let q = s.quotient().unwrap();
        let rows = alt_relation_rows(&s).unwrap();
        let rank = dense(s.field(), s.ambient_dim(), &rows).rank();
        assert_eq!(q.dim(), s.ambient_dim() - rank, "{}", s.weight().spec());
        let basis: Vec<usize> = q.basis_columns();
        assert_eq!(basis.len(), q.dim());
        // the basis generators are independent in the quotient
        let images: Vec<Vec<FqElem>> = basis.iter().map(|&c| q.column_image(c).unwrap()).collect();
        assert_eq!(FqMatrix::from_rows(s.field(), &images).rank(), q.dim());
    }
}

#[test]
fn trivial_character_terms_have_unit_coefficient() {
    let s = space((8, 17), "l=5 a=(0,0) b=(1,1)", false);
    for (k, pt) in (0..s.table().len()).step_by(7).enumerate() {
        let g = s.table().lift(pt);
        let shift = GMatrix2::small((1, 0), (k as i64, 1), (0, 0), (1, 0));
        let (p, chi) = s.term(&(&shift * &g)).unwrap();
        assert_eq!(p, pt);
        assert_eq!(chi, FqElem::ONE);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dimension_is_invariant_under_shuffling(seed in any::<u64>(), threshold in 0.0f64..1.0, compress in any::<bool>()) {
        for s in small_spaces() {
            let expected = s.quotient().unwrap().dim();
            let f = s.field();
            let n = s.ambient_dim();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<u32> = (0..n as u32).collect();
            perm.shuffle(&mut rng);
            let mut rows = relation_rows(&s).unwrap();
            rows.shuffle(&mut rng);
            let rows: Vec<_> = rows
                .into_iter()
                .map(|r| {
                    let mut r: Vec<_> = r.into_iter().map(|(c, a)| (perm[c as usize], a)).collect();
                    r.sort_unstable_by_key(|e| e.0);
                    r
                })
                .collect();
            let opts = EliminationOptions { dense_threshold: threshold, compress, seed };
            let q = quotient(f, n, s.dim_v(), rows, &opts);
            prop_assert_eq!(q.dim(), expected);
        }
    }
}

#[test]
fn hecke_characteristic_polynomial_ignores_elimination_order() {
    for s in small_spaces() {
        let spec = s.weight().spec().clone();
        let primes = coprime_primes(s.table().level(), spec.ell, 2);
        let base = s.quotient().unwrap();
        let variants = [
            EliminationOptions { dense_threshold: 0.0, compress: false, seed: 1 },
            EliminationOptions { dense_threshold: 1.0, compress: true, seed: 2 },
        ];
        for pi in &primes {
            let t = hecke_matrix(pi, &s, &base, 1).unwrap();
            let cp = char_poly(&t.matrix).unwrap();
            for opts in &variants {
                let q = s.quotient_with(opts).unwrap();
                let t2 = hecke_matrix(pi, &s, &q, 1).unwrap();
                assert_eq!(char_poly(&t2.matrix).unwrap(), cp, "T_{pi} at weight {spec}");
            }
        }
    }
}

fn check_commuting_family(s: &ManinSpace, primes: &[GaussianInt]) {
    let q = s.quotient().unwrap();
    assert!(q.dim() > 0, "empty space for {}", s.weight().spec());
    let ops: Vec<HeckeMatrix> = primes.iter().map(|p| hecke_matrix(p, s, &q, 2).unwrap()).collect();
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            assert!(bianchi::hecke::commute(a, b).unwrap(), "T_{} and T_{} at {}", a.prime, b.prime, s.weight().spec());
        }
    }
    for p in primes {
        assert!(bianchi::hecke::generator_invariance_check(p, s, &q, 1).unwrap(), "T_{p} depends on the generator");
    }
}

#[test]
fn hecke_operators_commute_and_ignore_generator() {
    for s in small_spaces() {
        let primes = coprime_primes(s.table().level(), s.weight().spec().ell, 4);
        check_commuting_family(&s, &primes);
    }
}

#[test]
fn hecke_operators_commute_with_quadratic_character() {
    let s = space((8, 17), "l=5 a=(0,0) b=(2,2)", true);
    let primes = coprime_primes(s.table().level(), 5, 3);
    check_commuting_family(&s, &primes);
}

#[test]
fn eigenspaces_have_stated_multiplicity() {
    for s in small_spaces() {
        let q = s.quotient().unwrap();
        let f = s.field().clone();
        let primes = coprime_primes(s.table().level(), s.weight().spec().ell, 3);
        let ops: Vec<HeckeMatrix> = primes.iter().map(|p| hecke_matrix(p, &s, &q, 1).unwrap()).collect();
        let dec = simultaneous_eigensystems(&ops, &f).unwrap();
        let total: usize = dec.systems.iter().map(|e| e.multiplicity).sum();
        assert_eq!(total + dec.residue_dim, dec.dim);
        assert_eq!(dec.dim, q.dim());
        for sys in &dec.systems {
            let mut stacked: Option<FqMatrix> = None;
            for t in &ops {
                let shifted = t.matrix.sub_scalar(sys.value(&t.prime).unwrap());
                stacked = Some(match stacked {
                    None => shifted,
                    Some(m) => m.vstack(&shifted),
                });
            }
            let m = stacked.unwrap();
            assert_eq!(m.cols() - m.rank(), sys.multiplicity, "{sys}");
        }
    }
}
