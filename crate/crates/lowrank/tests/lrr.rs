use lowrank::hitting::{build_simulated, hitting_set_b_prime, hitting_set_d_prime, Family};
use lowrank::linalg::{rank, Matrix};
use lowrank::lrr::{
    convert_b_to_d, is_upper_echelon, lne_scan, make_upper_echelon, measure_b_prime, measure_d, recover_from_d,
    tensor_measure, tensor_measurement_count, tensor_recover, BPrimeConverter, DiagonalDecoder,
};
use lowrank::tensor::{matrix_rank, DenseTensor, LowRankTensor};
use lowrank::{Error, Fel, FieldCtx};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf(p: u64) -> FieldCtx {
    FieldCtx::prime(p).unwrap()
}

fn random_matrix(f: &FieldCtx, n: usize, m: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_vec(n, m, (0..n * m).map(|_| f.random(rng)).collect())
}

#[test]
fn leading_entries() {
    let f = gf(13);
    assert!(lne_scan(&f, &Matrix::zeros(3, 3), 5).is_empty());
    assert_eq!(lne_scan(&f, &Matrix::identity(3), 3), vec![(0, 0), (1, 1)]);
}

#[test]
fn echelon_step_edge_cases() {
    let f = gf(13);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let p = random_matrix(&f, 4, 5, &mut rng);
    assert!(make_upper_echelon(&f, &p, 0).unwrap().is_empty());
    assert!(make_upper_echelon(&f, &Matrix::zeros(4, 5), 3).unwrap().is_empty());
    let bad = Matrix::from_rows(&[vec![Fel::ONE, Fel::ONE], vec![Fel::ONE, Fel::ZERO]]);
    assert!(matches!(make_upper_echelon(&f, &bad, 2), Err(Error::NotEchelon { .. })));
}

/// Running the echelon step over every diagonal leaves a matrix whose leading
/// entries count its rank.
#[test]
fn full_echelon_form_reveals_rank() {
    let f = gf(5);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let (n, m) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let r = rng.gen_range(0..=n.min(m));
        let mut p = if r == 0 {
            Matrix::zeros(n, m)
        } else {
            LowRankTensor::random(&f, &[n, m], r, &mut rng).expand().to_matrix().unwrap()
        };
        let want = rank(&f, &p);
        for k in 0..n + m - 1 {
            for op in make_upper_echelon(&f, &p, k).unwrap() {
                p.add_row_multiple(&f, op.target, op.source, op.factor);
            }
            assert_eq!(is_upper_echelon(&p, k + 1), None);
        }
        assert_eq!(rank(&f, &p), want);
        assert_eq!(lne_scan(&f, &p, n + m - 1).len(), want);
    }
}

#[test]
fn decoder_sizes() {
    let f = gf(13);
    assert_eq!(DiagonalDecoder::new(&f, 4, 4, 1).unwrap().len(), 12);
    for (n, m, r) in [(4, 4, 1), (5, 7, 2), (6, 6, 3)] {
        let dec = DiagonalDecoder::new(&f, n, m, r).unwrap();
        assert_eq!(dec.len(), 2 * (n + m - 2 * r) * r);
        assert_eq!(BPrimeConverter::new(&f, n, m, r).unwrap().len(), 2 * (n + m - 2 * r) * r);
    }
    assert!(DiagonalDecoder::new(&f, 3, 3, 0).is_err());
}

#[test]
fn decoder_matches_the_primed_family() {
    let f = gf(17);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let h = hitting_set_d_prime(&f, 4, 5, 6).unwrap();
    let hb = hitting_set_b_prime(&f, 4, 5, 6).unwrap();
    for _ in 0..20 {
        let t = DenseTensor::random(&f, &[5, 6], &mut rng);
        assert_eq!(measure_d(&f, &t, 2).unwrap(), h.syndromes(&t).unwrap());
        assert_eq!(measure_b_prime(&f, &t, 2).unwrap(), hb.syndromes(&t).unwrap());
    }
}

#[test]
fn zero_syndromes_recover_zero() {
    let f = gf(17);
    let z = DenseTensor::zeros(&f, &[5, 6]);
    let y = measure_d(&f, &z, 2).unwrap();
    assert!(y.iter().all(|v| v.is_zero()));
    assert_eq!(recover_from_d(&f, 5, 6, 2, &y).unwrap(), z);
    let yb = measure_b_prime(&f, &z, 2).unwrap();
    assert!(convert_b_to_d(&f, 5, 6, 2, &yb).unwrap().iter().all(|v| v.is_zero()));
    let yt = tensor_measure(&gf(65537), &DenseTensor::zeros(&gf(65537), &[3, 3, 3]), 1).unwrap();
    assert!(tensor_recover(&gf(65537), 3, 3, 1, &yt).unwrap().is_zero());
}

#[test]
fn low_rank_roundtrips_over_gf17() {
    let f = gf(17);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let dec = DiagonalDecoder::new(&f, 8, 8, 2).unwrap();
    let conv = BPrimeConverter::new(&f, 8, 8, 2).unwrap();
    for _ in 0..1000 {
        let r = rng.gen_range(0..=2);
        let t = if r == 0 {
            DenseTensor::zeros(&f, &[8, 8])
        } else {
            LowRankTensor::random(&f, &[8, 8], r, &mut rng).expand()
        };
        let y = dec.measure(&t).unwrap();
        assert_eq!(dec.recover(&y).unwrap(), t);
        assert_eq!(conv.convert(&conv.measure(&t).unwrap()).unwrap(), y);
    }
}

#[test]
fn rank_one_four_by_four_over_gf13() {
    let f = gf(13);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..200 {
        let t = LowRankTensor::random(&f, &[4, 4], 1, &mut rng).expand();
        assert_eq!(recover_from_d(&f, 4, 4, 1, &measure_d(&f, &t, 1).unwrap()).unwrap(), t);
    }
}

/// Every rank <= 1 3x3 matrix over GF(2): measure with the simulated family,
/// lift the syndromes, decode over the extension and restrict back.
#[test]
fn exhaustive_gf2_recovery_via_simulation() {
    let f2 = gf(2);
    let h = build_simulated(&f2, 2, Family::Dprime, 2, &[3, 3], false).unwrap();
    let sim = h.simulation().unwrap().clone();
    let dec = DiagonalDecoder::new(&sim.ext, 3, 3, 1).unwrap();
    let mut checked = 0;
    for code in 0u32..512 {
        let data = (0..9).map(|i| Fel::from_raw(u64::from(code >> i & 1))).collect();
        let t = DenseTensor::from_vec(&f2, &[3, 3], data).unwrap();
        if matrix_rank(&t).unwrap() > 1 {
            continue;
        }
        let lifted = sim.lift_syndromes(&h.syndromes(&t).unwrap()).unwrap();
        assert_eq!(lifted, dec.measure(&t.lift(&sim.ext).unwrap()).unwrap());
        let back = dec.recover(&lifted).unwrap().restrict(&f2).unwrap();
        assert_eq!(back, t);
        checked += 1;
    }
    // zero plus 7 * 7 rank-one matrices
    assert_eq!(checked, 50);
}

#[test]
fn matrix_tensor_path_agrees_with_diagonal_path() {
    let f = gf(257);
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..50 {
        let t = LowRankTensor::random(&f, &[4, 4], 1, &mut rng).expand();
        let yt = tensor_measure(&f, &t, 1).unwrap();
        assert_eq!(yt.len(), tensor_measurement_count(2, 4, 1));
        let via_tensor = tensor_recover(&f, 2, 4, 1, &yt).unwrap();
        let via_d = recover_from_d(&f, 4, 4, 1, &measure_d(&f, &t, 1).unwrap()).unwrap();
        assert_eq!(via_tensor, t);
        assert_eq!(via_d, t);
    }
}

#[test]
fn tensor_roundtrips() {
    let f = gf((1 << 31) - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    assert_eq!(tensor_measurement_count(3, 3, 2), 3 * 3 * 16);
    for (d, n, r) in [(3, 3, 1), (3, 2, 2), (4, 2, 1)] {
        for _ in 0..10 {
            let t = LowRankTensor::random(&f, &vec![n; d], r, &mut rng).expand();
            let y = tensor_measure(&f, &t, r).unwrap();
            assert_eq!(y.len(), tensor_measurement_count(d, n, r));
            assert_eq!(tensor_recover(&f, d, n, r, &y).unwrap(), t);
        }
    }
}

#[test]
fn high_rank_input_is_not_silently_accepted() {
    let f = gf(101);
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let dec = DiagonalDecoder::new(&f, 6, 6, 1).unwrap();
    for _ in 0..200 {
        let t = LowRankTensor::random(&f, &[6, 6], 3, &mut rng).expand();
        let y = dec.measure(&t).unwrap();
        match dec.recover(&y) {
            Ok(x) => {
                // any answer must at least explain the syndromes
                assert_eq!(dec.measure(&x).unwrap(), y);
                assert!(matrix_rank(&x).unwrap() <= 1);
                assert_ne!(x, t);
            }
            Err(e) => assert!(e.is_promise_violation(), "{e}"),
        }
    }
    // rank 3 identity against a rank 1 decoder
    let id = DenseTensor::from_matrix(&gf(13), &Matrix::identity(3));
    let small = DiagonalDecoder::new(&gf(13), 3, 3, 1).unwrap();
    let err = small.recover(&small.measure(&id).unwrap()).unwrap_err();
    assert!(matches!(err, Error::RankPromiseViolated { .. }));
}
