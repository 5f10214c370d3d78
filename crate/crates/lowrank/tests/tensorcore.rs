use lowrank::linalg::{det, mat_mul, Matrix};
use lowrank::tensor::{
    diagonal, diagonal_len, eval_fhat, eval_ft, inner_product, matrix_rank, merge_variables, set_diagonal,
    split_variables, DenseTensor, LowRankTensor, Rank1Tensor,
};
use lowrank::{Fel, FieldCtx};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f13() -> FieldCtx {
    FieldCtx::prime(13).unwrap()
}

fn dense_inner(a: &DenseTensor, b: &DenseTensor) -> Fel {
    let f = a.ctx();
    a.data().iter().zip(b.data()).fold(Fel::ZERO, |acc, (&x, &y)| f.mul_add(x, y, acc))
}

/// Direct sum over all indices of `T_i * prod x_j^{i_j}`.
fn fhat_naive(t: &DenseTensor, xs: &[Fel]) -> Fel {
    let f = t.ctx();
    let dims = t.dims().to_vec();
    let mut acc = Fel::ZERO;
    for (pos, &v) in t.data().iter().enumerate() {
        let mut rest = pos;
        let mut term = v;
        for a in (0..dims.len()).rev() {
            let i = rest % dims[a];
            rest /= dims[a];
            term = f.mul(term, f.pow(xs[a], i as u64));
        }
        acc = f.add(acc, term);
    }
    acc
}

#[test]
fn rank_one_inner_product_matches_dense() {
    let f = f13();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let a = LowRankTensor::random(&f, &[3, 4, 2], 1, &mut rng);
        let b = LowRankTensor::random(&f, &[3, 4, 2], 2, &mut rng);
        let t = DenseTensor::random(&f, &[3, 4, 2], &mut rng);
        let (ea, eb) = (a.expand(), b.expand());
        assert_eq!(inner_product(&a, &b).unwrap(), dense_inner(&ea, &eb));
        assert_eq!(inner_product(&t, &a.terms()[0]).unwrap(), dense_inner(&t, &ea));
        assert_eq!(inner_product(&b, &t).unwrap(), dense_inner(&eb, &t));
    }
}

#[test]
fn fhat_and_ft_match_direct_sums() {
    let f = f13();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let t = DenseTensor::random(&f, &[2, 3, 4], &mut rng);
        let xs: Vec<Fel> = (0..3).map(|_| f.random(&mut rng)).collect();
        assert_eq!(eval_fhat(&t, &xs).unwrap(), fhat_naive(&t, &xs));
        let pts: Vec<Vec<Fel>> =
            t.dims().iter().map(|&n| (0..n).map(|_| f.random(&mut rng)).collect()).collect();
        let r1 = Rank1Tensor::new(&f, pts.iter().map(|v| {
            let mut v = v.clone();
            if v.iter().all(|x| x.is_zero()) {
                v[0] = Fel::ONE;
            }
            v
        }).collect()).unwrap();
        assert_eq!(eval_ft(&t, r1.factors()).unwrap(), dense_inner(&t, &r1.expand()));
    }
}

#[test]
fn identity_examples() {
    let f = f13();
    let id = DenseTensor::from_matrix(&f, &Matrix::identity(3));
    assert_eq!(inner_product(&id, &id).unwrap(), f.from_u64(3));
    assert_eq!(matrix_rank(&id).unwrap(), 3);
    // f^ of I_2 is 1 + xy
    let id2 = DenseTensor::from_matrix(&f, &Matrix::identity(2));
    let (x, y) = (f.from_u64(5), f.from_u64(7));
    assert_eq!(eval_fhat(&id2, &[x, y]).unwrap(), f.add(Fel::ONE, f.mul(x, y)));
}

#[test]
fn rank_one_rejects_zero_factor() {
    let f = f13();
    assert!(Rank1Tensor::new(&f, vec![vec![Fel::ZERO; 2], vec![Fel::ONE; 2]]).is_err());
}

#[test]
fn diagonals_cover_the_matrix() {
    let f = f13();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, m) in [(3, 5), (5, 3), (4, 4), (1, 6)] {
        let t = DenseTensor::random(&f, &[n, m], &mut rng);
        let total: usize = (0..n + m - 1).map(|k| diagonal_len(n, m, k)).sum();
        assert_eq!(total, n * m);
        let mut rebuilt = DenseTensor::zeros(&f, &[n, m]);
        for k in 0..n + m - 1 {
            let d = diagonal(&t, k).unwrap();
            assert_eq!(d.len(), diagonal_len(n, m, k));
            set_diagonal(&mut rebuilt, k, &d).unwrap();
        }
        assert_eq!(rebuilt, t);
        assert!(diagonal(&t, n + m - 1).is_err());
    }
}

#[test]
fn merge_then_split_is_identity() {
    let f = f13();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let t = DenseTensor::random(&f, &[3, 2, 4], &mut rng);
        let merged = merge_variables(&t, 0, 2, 5).unwrap();
        assert_eq!(merged.dims(), &[3 + 5 * 3, 2]);
        // the merged polynomial is f^ with x_2 = x_0^5
        let (x, y) = (f.random(&mut rng), f.random(&mut rng));
        assert_eq!(
            eval_fhat(&merged, &[x, y]).unwrap(),
            eval_fhat(&t, &[x, y, f.pow(x, 5)]).unwrap()
        );
        let back = split_variables(&merged, 0, 5, 3, 4, 2).unwrap();
        assert_eq!(back, t);
    }
    assert!(merge_variables(&DenseTensor::zeros(&f, &[4, 2]), 0, 1, 3).is_err());
}

#[test]
fn file_roundtrip() {
    let f = FieldCtx::prime(2).unwrap().extension(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = DenseTensor::random(&f, &[2, 2, 3], &mut rng);
    assert_eq!(lowrank::io::read_tensor(&lowrank::io::write_tensor(&t)).unwrap(), t);
}

fn submatrix_cols(a: &Matrix, cols: &[usize]) -> Matrix {
    a.select_cols(cols)
}

/// Cauchy-Binet: det(AB) = sum over r-subsets S of det(A_S) det(B^S).
#[test]
fn cauchy_binet_by_brute_force() {
    let f = FieldCtx::prime(101).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (r, n) in [(2, 4), (3, 5), (2, 2)] {
        let a = Matrix::from_vec(r, n, (0..r * n).map(|_| f.random(&mut rng)).collect());
        let b = Matrix::from_vec(n, r, (0..r * n).map(|_| f.random(&mut rng)).collect());
        let mut sum = Fel::ZERO;
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize != r {
                continue;
            }
            let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let bs = submatrix_cols(&b.transpose(), &s).transpose();
            sum = f.add(sum, f.mul(det(&f, &submatrix_cols(&a, &s)), det(&f, &bs)));
        }
        assert_eq!(det(&f, &mat_mul(&f, &a, &b)), sum);
    }
}

proptest! {
    #[test]
    fn low_rank_expansion_has_bounded_rank(seed in 0u64..500, r in 1usize..4) {
        let f = f13();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = LowRankTensor::random(&f, &[5, 6], r, &mut rng).expand();
        prop_assert!(matrix_rank(&t).unwrap() <= r);
    }

    #[test]
    fn inner_product_is_bilinear(seed in 0u64..500) {
        let f = f13();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DenseTensor::random(&f, &[2, 3], &mut rng);
        let b = DenseTensor::random(&f, &[2, 3], &mut rng);
        let c = DenseTensor::random(&f, &[2, 3], &mut rng);
        let s = f.random(&mut rng);
        let lhs = inner_product(&a.add(&b.scale(s)).unwrap(), &c).unwrap();
        let rhs = f.add(inner_product(&a, &c).unwrap(), f.mul(s, inner_product(&b, &c).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }
}
