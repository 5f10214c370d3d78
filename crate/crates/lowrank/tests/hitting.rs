use lowrank::hitting::{
    build_family, ceil_lg, hard_tensor, hitting_set_b, hitting_set_b_prime, hitting_set_d, hitting_set_d_prime,
    hitting_set_tensor, naive_set, pit_test, pit_witness, pit_witness_parallel, rank_preserver, schedule_exponent,
    simulate_improper, simulate_proper, Family,
};
use lowrank::linalg::{mat_mul, rank, Matrix};
use lowrank::tensor::{eval_fhat, matrix_rank, DenseTensor, LowRankTensor};
use lowrank::{Error, Fel, FieldCtx};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf(p: u64) -> FieldCtx {
    FieldCtx::prime(p).unwrap()
}

fn all_matrices(f: &FieldCtx, n: usize, m: usize) -> impl Iterator<Item = DenseTensor> + '_ {
    let q = f.order();
    (0..q.pow((n * m) as u32)).map(move |mut code| {
        let data = (0..n * m)
            .map(|_| {
                let e = f.nth_element(code % q);
                code /= q;
                e
            })
            .collect();
        DenseTensor::from_vec(f, &[n, m], data).unwrap()
    })
}

#[test]
fn matrix_family_sizes() {
    let f = gf(31);
    for m in 1..=12 {
        for n in 1..=m {
            for r in 1..=n {
                if n + m - 1 > 30 {
                    continue;
                }
                assert_eq!(hitting_set_b(&f, r, n, m).unwrap().len(), (n + m - 1) * r);
                assert_eq!(hitting_set_d(&f, r, n, m).unwrap().len(), (n + m - 1) * r);
                assert_eq!(hitting_set_b_prime(&f, r, n, m).unwrap().len(), (n + m - r) * r);
                assert_eq!(hitting_set_d_prime(&f, r, n, m).unwrap().len(), (n + m - r) * r);
            }
        }
    }
}

#[test]
fn small_b_family_and_indicator_d() {
    let f = gf(5);
    let b = hitting_set_b(&f, 1, 2, 2).unwrap();
    assert_eq!(b.len(), 3);
    assert!(b.items().iter().all(|m| m.is_rank1() && matrix_rank(&m.to_dense()).unwrap() == 1));
    let d = hitting_set_d(&gf(7), 2, 3, 3).unwrap();
    for (item, meta) in d.items().iter().zip(d.meta()) {
        let t = item.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                let v = t.get(&[i, j]);
                if i + j != meta.k {
                    assert!(v.is_zero());
                } else if meta.l[0] == 0 {
                    assert_eq!(v, Fel::ONE);
                }
            }
        }
    }
}

#[test]
fn spans_agree_and_primed_families_are_independent() {
    let f = gf(31);
    for (r, n, m) in [(1, 1, 1), (1, 2, 3), (2, 3, 3), (2, 3, 5), (3, 4, 6), (3, 3, 3), (4, 5, 5)] {
        let want = (n + m - r) * r;
        let b = hitting_set_b(&f, r, n, m).unwrap().stacked();
        let d = hitting_set_d(&f, r, n, m).unwrap().stacked();
        let bp = hitting_set_b_prime(&f, r, n, m).unwrap().stacked();
        let dp = hitting_set_d_prime(&f, r, n, m).unwrap().stacked();
        for s in [&b, &d, &bp, &dp] {
            assert_eq!(rank(&f, s), want, "r={r} n={n} m={m}");
        }
        // same span: stacking B on top of D adds nothing
        let both = Matrix::from_rows(&b.data().chunks(n * m).chain(d.data().chunks(n * m)).map(|c| c.to_vec()).collect::<Vec<_>>());
        assert_eq!(rank(&f, &both), want);
    }
    let bp = hitting_set_b_prime(&gf(7), 2, 3, 3).unwrap();
    assert_eq!(bp.len(), 8);
    assert_eq!(rank(&gf(7), &bp.stacked()), 8);
}

#[test]
fn b_prime_with_rank_one_equals_b() {
    let f = gf(13);
    let b = hitting_set_b(&f, 1, 3, 4).unwrap();
    let bp = hitting_set_b_prime(&f, 1, 3, 4).unwrap();
    assert_eq!(b.items(), bp.items());
}

#[test]
fn schedule_recursion() {
    assert_eq!(schedule_exponent(2, 2, 3, &[1, 1]), BigUint::from(9u32));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let b = rng.gen_range(1..5u32);
        let d = 1usize << b;
        let n = rng.gen_range(1..20u64);
        let k = rng.gen_range(0..d as u64);
        let idx: Vec<u64> = (0..d).map(|_| rng.gen_range(0..n)).collect();
        assert_eq!(schedule_exponent(2 * n, b - 1, k, &idx), schedule_exponent(n, b, k, &idx));
        assert_eq!(schedule_exponent(n, b, 0, &idx), BigUint::from(0u32));
        // peeling the lowest bit
        let base = BigUint::from(n) << b;
        let expect = if k & 1 == 1 { BigUint::from(idx[0]) * base.pow((k >> 1) as u32) } else { BigUint::from(0u32) }
            + schedule_exponent(n, b, k >> 1, &idx[1..]);
        assert_eq!(schedule_exponent(n, b, k, &idx), expect);
    }
}

#[test]
fn tensor_family_sizes_and_shape() {
    let f = gf(65537);
    let h = hitting_set_tensor(&f, 4, 2, 2).unwrap();
    assert_eq!(h.len(), 32);
    assert!(h.items().iter().all(|m| m.is_rank1()));
    assert_eq!(h.dims(), &[2, 2, 2, 2]);
    let h3 = hitting_set_tensor(&f, 3, 2, 2).unwrap();
    assert_eq!(h3.len(), 3 * 2 * 2usize.pow(ceil_lg(3)));
}

#[test]
fn two_dimensional_tensor_family_matches_b() {
    let f = gf(67);
    let t = hitting_set_tensor(&f, 2, 2, 1).unwrap();
    let b = hitting_set_b(&f, 1, 2, 2).unwrap();
    assert_eq!(&t.items()[..b.len()], b.items());
}

#[test]
fn simulation_sizes() {
    let f4 = gf(2).extension(2).unwrap();
    let b = hitting_set_b(&f4, 1, 2, 2).unwrap();
    assert_eq!(b.len(), 3);
    let imp = simulate_improper(&b).unwrap();
    assert_eq!(imp.len(), 6);
    assert_eq!(imp.ctx(), &gf(2));
    let prop = simulate_proper(&b).unwrap();
    assert_eq!(prop.len(), 12);
    assert!(prop.items().iter().all(|m| m.is_rank1()));
    let d = hitting_set_d(&f4, 1, 2, 2).unwrap();
    assert!(matches!(simulate_proper(&d), Err(Error::NotRank1(_))));
    let same = simulate_improper(&hitting_set_b(&gf(5), 1, 2, 2).unwrap()).unwrap();
    assert_eq!(same.len(), 3);
}

/// Both simulations hit every nonzero rank-1 2x2 matrix over GF(2).
#[test]
fn simulated_families_hit_small_field_matrices() {
    let f2 = gf(2);
    let ext = f2.extension(2).unwrap();
    let sims = [
        simulate_improper(&hitting_set_b(&ext, 1, 2, 2).unwrap()).unwrap(),
        simulate_proper(&hitting_set_b(&ext, 1, 2, 2).unwrap()).unwrap(),
        simulate_improper(&hitting_set_d(&ext, 1, 2, 2).unwrap()).unwrap(),
    ];
    for t in all_matrices(&f2, 2, 2) {
        if t.is_zero() || matrix_rank(&t).unwrap() > 1 {
            continue;
        }
        for h in &sims {
            assert!(pit_test(&t, h).unwrap(), "{:?} missed {:?}", h.family(), t.data());
        }
    }
}

#[test]
fn pit_examples() {
    let f = gf(5);
    let b = hitting_set_b(&f, 1, 2, 2).unwrap();
    let e00 = DenseTensor::indicator(&f, &[2, 2], &[0, 0]);
    assert!(pit_test(&e00, &b).unwrap());
    assert_eq!(pit_witness(&e00, &b).unwrap(), Some(0));
    let zero = DenseTensor::zeros(&f, &[2, 2]);
    assert!(!pit_test(&zero, &b).unwrap());
    assert!(pit_test(&DenseTensor::zeros(&f, &[2, 3]), &b).is_err());
}

#[test]
fn zero_is_never_hit() {
    let f = gf(17);
    for fam in [Family::B, Family::D, Family::Bprime, Family::Dprime, Family::Naive] {
        let h = build_family(&f, fam, 2, &[3, 4]).unwrap();
        assert!(!pit_test(&DenseTensor::zeros(&f, &[3, 4]), &h).unwrap());
    }
    let big = gf(13).extension(3).unwrap();
    let h = build_family(&big, Family::TensorB, 2, &[2, 2, 2]).unwrap();
    assert!(!pit_test(&DenseTensor::zeros(&big, &[2, 2, 2]), &h).unwrap());
}

#[test]
fn exhaustive_low_rank_detection() {
    let f = gf(5);
    for r in 1..=2 {
        let hs: Vec<_> = [Family::B, Family::D, Family::Bprime, Family::Dprime]
            .into_iter()
            .map(|fam| build_family(&f, fam, r, &[2, 3]).unwrap())
            .collect();
        for t in all_matrices(&f, 2, 3) {
            if t.is_zero() || matrix_rank(&t).unwrap() > r {
                continue;
            }
            for h in &hs {
                assert!(pit_test(&t, h).unwrap());
            }
        }
    }
}

#[test]
fn parallel_witness_matches_sequential() {
    let f = gf(101);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = hitting_set_d(&f, 3, 6, 7).unwrap();
    for _ in 0..100 {
        let t = LowRankTensor::random(&f, &[6, 7], 3, &mut rng).expand();
        assert_eq!(pit_witness(&t, &h).unwrap(), pit_witness_parallel(&t, &h).unwrap());
    }
    let sparse = DenseTensor::indicator(&f, &[6, 7], &[5, 6]);
    assert_eq!(pit_witness(&sparse, &h).unwrap(), pit_witness_parallel(&sparse, &h).unwrap());
}

/// Some `l < r` leaves `f^(x, g^l x)` nonzero; a polynomial of degree below
/// `n+m-1` vanishes iff it vanishes on `n+m-1` distinct points.
#[test]
fn bivariate_reduction_oracle() {
    let f = gf(7);
    let (n, m) = (2, 3);
    let g = f.generator_for(m as u128).unwrap();
    let pts: Vec<Fel> = (0..n + m - 1).map(|i| f.nth_element(i as u64)).collect();
    for r in 1..=2 {
        for t in all_matrices(&f, n, m) {
            if t.is_zero() || matrix_rank(&t).unwrap() > r {
                continue;
            }
            let hit = (0..r).any(|l| {
                let gl = f.pow(g, l as u64);
                pts.iter().any(|&x| !eval_fhat(&t, &[x, f.mul(gl, x)]).unwrap().is_zero())
            });
            assert!(hit, "{:?}", t.data());
        }
    }
}

#[test]
fn rank_preserver_bad_alpha_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (q, n, r) in [(13u64, 4usize, 2usize), (31, 5, 3), (61, 6, 2)] {
        let f = gf(q);
        let g = f.generator_for(n as u128).unwrap();
        for _ in 0..20 {
            let m = loop {
                let m = Matrix::from_vec(n, r, (0..n * r).map(|_| f.random(&mut rng)).collect());
                if rank(&f, &m) == r {
                    break m;
                }
            };
            let bad = (0..q)
                .filter(|&a| {
                    let am = mat_mul(&f, &rank_preserver(&f, g, r, n, Fel::from_raw(a)).unwrap(), &m);
                    rank(&f, &am) < r
                })
                .count();
            assert!(bad <= n * r - r * (r + 1) / 2, "q={q} bad={bad}");
        }
    }
}

#[test]
fn rank_preserver_edge_cases() {
    let f = gf(7);
    let a = rank_preserver(&f, Fel::from_raw(3), 3, 4, Fel::ZERO).unwrap();
    for i in 0..3 {
        assert_eq!(a.row(i), &[Fel::ONE, Fel::ZERO, Fel::ZERO, Fel::ZERO]);
    }
    let one = rank_preserver(&f, Fel::from_raw(3), 1, 3, Fel::from_raw(2)).unwrap();
    assert_eq!(one.row(0), &[Fel::ONE, Fel::from_raw(2), Fel::from_raw(4)]);
    // 6 has order 2 in GF(7)
    assert!(matches!(rank_preserver(&f, Fel::from_raw(6), 2, 3, Fel::ONE), Err(Error::OrderTooSmall { .. })));
}

#[test]
fn hard_tensors() {
    let f = gf(7);
    let b = hitting_set_b(&f, 1, 3, 3).unwrap();
    let t = hard_tensor(&b).unwrap();
    assert!(!t.is_zero());
    assert!(matrix_rank(&t).unwrap() >= 2);
    assert!(!pit_test(&t, &b).unwrap());
    let naive = naive_set(&f, &[2, 2]);
    assert_eq!(naive.len(), 4);
    assert!(matches!(hard_tensor(&naive), Err(Error::NoNullspace)));
}

#[test]
fn field_too_small_is_reported() {
    assert!(matches!(hitting_set_b(&gf(3), 1, 3, 3), Err(Error::FieldTooSmall(_))));
    assert!(matches!(hitting_set_d(&gf(2), 1, 2, 2), Err(Error::FieldTooSmall(_))));
}
