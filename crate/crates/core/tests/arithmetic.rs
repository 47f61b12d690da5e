use bianchi::gaussian::factor;
use bianchi::*;
use proptest::prelude::*;

fn gi(re: i64, im: i64) -> GaussianInt {
    GaussianInt::small(re, im)
}

fn norm(z: &GaussianInt) -> i64 {
    z.norm().to_i64().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn euclidean_remainder_is_small(a in -1_000_000i64..=1_000_000, b in -1_000_000i64..=1_000_000,
                                    c in -1_000_000i64..=1_000_000, d in -1_000_000i64..=1_000_000) {
        prop_assume!(c != 0 || d != 0);
        let (z, w) = (gi(a, b), gi(c, d));
        let (q, r) = euc_divmod(&z, &w).unwrap();
        prop_assert_eq!(&(&q * &w) + &r, z);
        prop_assert!(r.norm() * Int::from(2) <= w.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gcd_is_greatest(a in -22i64..=22, b in -22i64..=22, c in -22i64..=22, d in -22i64..=22) {
        prop_assume!((a, b) != (0, 0) && (c, d) != (0, 0));
        let (z, w) = (gi(a, b), gi(c, d));
        let g = ggcd(&z, &w).unwrap();
        prop_assert!(g.divides(&z) && g.divides(&w));
        for x in -32i64..=32 {
            for y in -32i64..=32 {
                let t = gi(x, y);
                if !t.is_zero() && t.divides(&z) && t.divides(&w) {
                    prop_assert!(t.divides(&g), "{} divides both but not {}", t, g);
                }
            }
        }
    }

    #[test]
    fn completion_has_determinant_one(a in -1000i64..=1000, b in -1000i64..=1000, c in -1000i64..=1000, d in -1000i64..=1000) {
        let (x, y) = (gi(a, b), gi(c, d));
        prop_assume!(!x.is_zero() || !y.is_zero());
        prop_assume!(ggcd(&x, &y).unwrap().is_one());
        let m = unimodular_complete(&x, &y).unwrap();
        prop_assert!(m.det().is_one());
        prop_assert_eq!((&m.a, &m.c), (&x, &y));
    }
}

#[test]
fn prime_enumeration_matches_factorization() {
    let bound = 600u64;
    let primes = enumerate_primes(bound);
    for p in 2..=bound {
        if !(2..p).all(|k| k * k > p || p % k != 0) {
            continue;
        }
        let (_, facs) = factor(&gi(p as i64, 0)).unwrap();
        let listed: Vec<&(GaussianInt, u32)> = primes.iter().filter(|(g, _)| g.divides(&gi(p as i64, 0))).collect();
        match p % 4 {
            2 => {
                assert_eq!(listed.len(), 1);
                assert_eq!(listed[0].0, gi(1, 1));
            }
            1 => {
                assert_eq!(listed.len(), 2, "p = {p}");
                assert_eq!(facs.len(), 2);
                assert!(listed.iter().all(|(g, f)| norm(g) == p as i64 && *f == 1));
            }
            _ => {
                assert_eq!(facs.len(), 1);
                if p * p <= bound {
                    assert_eq!(listed.len(), 1);
                    assert_eq!(listed[0].1, 2);
                } else {
                    assert!(listed.is_empty());
                }
            }
        }
    }
    for (g, _) in &primes {
        assert_eq!(&g.canonical(), g);
        assert!(norm(g) as u64 <= bound);
    }
}

fn fields() -> Vec<FqField> {
    [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2), (11, 2)]
        .iter()
        .map(|&(p, d)| FqField::new(p, d).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn field_axioms(i in 0usize..121, j in 0usize..121, k in 0usize..121) {
        for f in fields() {
            let all: Vec<FqElem> = f.elements().collect();
            let (a, b, c) = (all[i % all.len()], all[j % all.len()], all[k % all.len()]);
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn reduction_is_a_ring_homomorphism(a in -10_000i64..10_000, b in -10_000i64..10_000,
                                        c in -10_000i64..10_000, d in -10_000i64..10_000) {
        let (z, w) = (gi(a, b), gi(c, d));
        for (p, f) in [(gi(3, 0), (3, 2)), (gi(2, 1), (5, 1)), (gi(1, 2), (5, 1)), (gi(7, 0), (7, 2))] {
            let field = FqField::new(f.0, f.1).unwrap();
            let r = ResidueMap::new(&p, &field).unwrap();
            prop_assert_eq!(r.reduce(&(&z + &w)), field.add(r.reduce(&z), r.reduce(&w)));
            prop_assert_eq!(r.reduce(&(&z * &w)), field.mul(r.reduce(&z), r.reduce(&w)));
        }
    }
}

#[test]
fn quadratic_character_is_onto_signs() {
    for (p, ell) in [(gi(8, 17), 5), (gi(13, 28), 7), (gi(8, 35), 7), (gi(1, 2), 3), (gi(3, 0), 5)] {
        let f = FqField::new(ell, 1).unwrap();
        let chi = QuadraticCharacter::new(&p, &f).unwrap();
        let minus = f.from_i64(-1);
        let mut seen_minus = false;
        for x in -12i64..=12 {
            for y in -12i64..=12 {
                let u = gi(x, y);
                match chi.eval(&u) {
                    Some(v) => {
                        assert!(v == f.one() || v == minus);
                        seen_minus |= v == minus;
                    }
                    None => assert!(!ggcd(&u, &p).unwrap().is_one()),
                }
            }
        }
        assert!(seen_minus, "character mod {p} never takes -1");
    }
}

/// Orbits of unimodular pairs mod `n` under unit scaling, counted by brute force.
fn brute_p1_size(n: &GaussianInt) -> usize {
    let res = residues_mod(n).unwrap();
    let idx = |z: &GaussianInt| res.iter().position(|r| n.divides(&(z - r))).unwrap();
    let units: Vec<&GaussianInt> = res.iter().filter(|u| ggcd(u, n).unwrap().is_one()).collect();
    let m = res.len();
    let mut seen = vec![false; m * m];
    let mut orbits = 0;
    for c in &res {
        for d in &res {
            let (ci, di) = (idx(c), idx(d));
            if seen[ci * m + di] {
                continue;
            }
            // unimodular mod n: (c, d, n) generate the unit ideal
            if !ggcd(c, &ggcd(d, n).unwrap()).unwrap().is_one() {
                continue;
            }
            orbits += 1;
            for u in &units {
                seen[idx(&(*u * c)) * m + idx(&(*u * d))] = true;
            }
        }
    }
    orbits
}

#[test]
fn p1_sizes() {
    let cases =
        [((1, 1), 3), ((1, 2), 6), ((3, 0), 10), ((8, 17), 354), ((13, 28), 954), ((8, 35), 1290), ((61, 0), 3844)];
    for ((a, b), size) in cases {
        let n = gi(a, b);
        let t = P1Table::new(&n).unwrap();
        assert_eq!(t.len(), size, "level {n}");
        assert_eq!(t.expected_size(), size);
        if size <= 10 {
            assert_eq!(brute_p1_size(&n), size);
        }
    }
    for (a, b) in [(2, 0), (2, 2), (3, 3), (1, 4)] {
        let n = gi(a, b);
        assert_eq!(P1Table::new(&n).unwrap().len(), brute_p1_size(&n), "level {n}");
    }
}

fn elementary_word(word: &[(u8, i64, i64)]) -> GMatrix2 {
    let mut m = GMatrix2::identity();
    for &(k, x, y) in word {
        let e = match k % 3 {
            0 => GMatrix2::small((1, 0), (x, y), (0, 0), (1, 0)),
            1 => GMatrix2::small((1, 0), (0, 0), (x, y), (1, 0)),
            _ => GMatrix2::j(),
        };
        m = &m * &e;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn p1_right_action(p in 0usize..10_000,
                       g in prop::collection::vec((0u8..3, -4i64..=4, -4i64..=4), 1..6),
                       h in prop::collection::vec((0u8..3, -4i64..=4, -4i64..=4), 1..6)) {
        for n in [gi(61, 0), gi(8, 17), gi(2, 2)] {
            let t = P1Table::new(&n).unwrap();
            let ring = t.ring();
            let p = p % t.len();
            let (g, h) = (elementary_word(&g), elementary_word(&h));
            let (pg, u1) = t.act_right(p, &g).unwrap();
            let (pgh, u2) = t.act_right(pg, &h).unwrap();
            let (direct, u) = t.act_right(p, &(&g * &h)).unwrap();
            prop_assert_eq!(direct, pgh);
            prop_assert_eq!(ring.element(u), ring.mul(ring.element(u1), ring.element(u2)));
        }
    }
}

#[test]
fn lifts_normalize_to_themselves() {
    for n in [gi(61, 0), gi(8, 35), gi(2, 2)] {
        let t = P1Table::new(&n).unwrap();
        let one = t.ring().index((1, 0));
        for p in 0..t.len() {
            let g = t.lift(p);
            assert!(g.is_sl2());
            assert_eq!(t.normalize(&g.c, &g.d).unwrap(), (p, one));
        }
    }
}
