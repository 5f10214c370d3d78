//! Recovery of low-rank order-d tensors by recursively pairing variables and
//! reducing each pair to a matrix recovery problem.

use std::collections::HashMap;

use super::DiagonalDecoder;
use crate::error::{Error, Result};
use crate::field::{Fel, FieldCtx};
use crate::hitting::{axis_weights, ceil_lg, d_prime_count, l_tuples, tensor_order_bound};
use crate::poly::{eval, Interpolator};
use crate::tensor::{eval_fhat_in, next_index, row_major_strides, DenseTensor};

/// Precomputed data for measuring and recovering `n^{x d}` tensors of rank `<= r`.
#[derive(Clone, Debug)]
pub struct TensorPlan {
    ctx: FieldCtx,
    d: usize,
    n: usize,
    r: usize,
    g: Fel,
    alphas: Vec<Fel>,
    interp: Interpolator,
    // per l tuple, weights for the d real axes
    weights: Vec<Vec<Fel>>,
}

/// `dn (2r)^{ceil(lg d)}`
pub fn tensor_measurement_count(d: usize, n: usize, r: usize) -> usize {
    d * n * (2 * r).pow(ceil_lg(d))
}

impl TensorPlan {
    pub fn new(ctx: &FieldCtx, d: usize, n: usize, r: usize) -> Result<Self> {
        if d < 2 || n < 1 || r < 1 {
            return Err(Error::param(format!("need d >= 2, n >= 1, r >= 1, got d={d} n={n} r={r}")));
        }
        let g = ctx.generator_for(tensor_order_bound(d, n))?;
        let alphas = ctx.nonzero_elements(d * n)?;
        let interp = Interpolator::new(ctx, &alphas)?;
        let weights = l_tuples(2 * r, ceil_lg(d))
            .iter()
            .map(|l| axis_weights(ctx, g, d, n, l))
            .collect();
        Ok(TensorPlan { ctx: ctx.clone(), d, n, r, g, alphas, interp, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len() * self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Syndromes in family order: l tuples lexicographic, then `k`.
    pub fn measure(&self, t: &DenseTensor) -> Result<Vec<Fel>> {
        let f = &self.ctx;
        if t.dims() != vec![self.n; self.d].as_slice() {
            return Err(Error::shape(format!("{}^{}", self.n, self.d), format!("{:?}", t.dims())));
        }
        let mut out = Vec::with_capacity(self.len());
        for w in &self.weights {
            for &a in &self.alphas {
                let xs: Vec<Fel> = w.iter().map(|&wa| f.mul(wa, a)).collect();
                out.push(eval_fhat_in(f, t, &xs)?);
            }
        }
        Ok(out)
    }

    pub fn recover(&self, syndromes: &[Fel]) -> Result<DenseTensor> {
        let f = &self.ctx;
        if syndromes.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: syndromes.len() });
        }
        let dn = self.alphas.len();
        let deg = self.d * (self.n - 1) + 1;
        let mut polys = Vec::with_capacity(self.weights.len());
        for ys in syndromes.chunks(dn) {
            let p = self.interp.interpolate(f, &ys[..deg]);
            for (k, &y) in ys.iter().enumerate().skip(deg) {
                if eval(f, &p, self.alphas[k]) != y {
                    return Err(Error::InconsistentEvaluations);
                }
            }
            polys.push(p);
        }
        let b = ceil_lg(self.d);
        let big_d = 1usize << b;
        let mut dims = vec![self.n; self.d];
        dims.resize(big_d, 1);
        let mut rec = Recursion {
            f,
            g: self.g,
            r: self.r,
            big_r: 2 * self.r,
            stride: self.n << b,
            polys: &polys,
            decoders: HashMap::new(),
        };
        let out = rec.solve(&dims, 0)?;
        // padded axes are trailing with length 1, so the data layout already matches
        DenseTensor::from_vec(f, &vec![self.n; self.d], out.data().to_vec())
    }
}

struct Recursion<'a> {
    f: &'a FieldCtx,
    g: Fel,
    r: usize,
    big_r: usize,
    stride: usize,
    polys: &'a [Vec<Fel>],
    decoders: HashMap<(usize, usize), DiagonalDecoder>,
}

impl Recursion<'_> {
    /// Tensor with the given dims whose evaluations along the remaining
    /// schedule are the polynomials of prefix index `prefix`.
    fn solve(&mut self, dims: &[usize], prefix: usize) -> Result<DenseTensor> {
        let f = self.f;
        if dims.len() == 1 {
            let p = &self.polys[prefix];
            let mut coeffs = p.clone();
            if coeffs[dims[0]..].iter().any(|c| !c.is_zero()) {
                return Err(Error::InconsistentEvaluations);
            }
            coeffs.truncate(dims[0]);
            return DenseTensor::from_vec(f, dims, coeffs);
        }
        let half = dims.len() / 2;
        let merged: Vec<usize> = (0..half).map(|c| dims[2 * c] + dims[2 * c + 1] - 1).collect();
        let s = self.stride;
        let span = |ds: &mut dyn Iterator<Item = usize>| -> usize {
            let mut pw = 1usize;
            let mut acc = 1usize;
            for dd in ds {
                acc += (dd - 1) * pw;
                pw *= s;
            }
            acc
        };
        let n0 = span(&mut (0..half).map(|c| dims[2 * c]));
        let n1 = span(&mut (0..half).map(|c| dims[2 * c + 1]));
        let len = n0 + n1 - 1;
        // u[l][t] = <M, D_{t,l}>
        let mut u = Vec::with_capacity(self.big_r);
        for l in 0..self.big_r {
            let part = self.solve(&merged, prefix * self.big_r + l)?;
            let mut uni = vec![Fel::ZERO; len];
            let mut idx = vec![0usize; half];
            loop {
                let v = part.get(&idx);
                if !v.is_zero() {
                    let mut e = 0;
                    let mut pw = 1;
                    for &i in &idx {
                        e += i * pw;
                        pw *= s;
                    }
                    uni[e] = f.add(uni[e], v);
                }
                if !next_index(&mut idx, &merged) {
                    break;
                }
            }
            u.push(uni);
        }
        let mut ys = Vec::new();
        for t in 0..len {
            for row in u.iter().take(d_prime_count(self.big_r, n0, n1, t)) {
                ys.push(row[t]);
            }
        }
        let key = (n0, n1);
        if !self.decoders.contains_key(&key) {
            let dec = DiagonalDecoder::with_generator(f, self.g, n0, n1, self.r)?;
            self.decoders.insert(key, dec);
        }
        let m = self.decoders[&key].recover(&ys)?;
        let gp = crate::poly::powers(f, self.g, n1);
        for (l, row) in u.iter().enumerate() {
            for (t, &want) in row.iter().enumerate() {
                let got = crate::tensor::diagonal_rows(n0, n1, t).fold(Fel::ZERO, |acc, i| {
                    let j = t - i;
                    f.mul_add(m.data()[i * n1 + j], f.pow(gp[j], l as u64), acc)
                });
                if got != want {
                    return Err(Error::InconsistentEvaluations);
                }
            }
        }
        // split base-s digits back into the paired axes
        let mut out = DenseTensor::zeros(f, dims);
        let strides = row_major_strides(dims);
        for e0 in 0..n0 {
            for e1 in 0..n1 {
                let v = m.data()[e0 * n1 + e1];
                if v.is_zero() {
                    continue;
                }
                let (mut a, mut b) = (e0, e1);
                let mut pos = 0;
                for c in 0..half {
                    let (ia, ib) = (a % s, b % s);
                    if ia >= dims[2 * c] || ib >= dims[2 * c + 1] {
                        return Err(Error::InconsistentEvaluations);
                    }
                    pos += ia * strides[2 * c] + ib * strides[2 * c + 1];
                    a /= s;
                    b /= s;
                }
                out.data_mut()[pos] = v;
            }
        }
        Ok(out)
    }
}

/// `<T, TensorB_{2r}>` for an `n^{x d}` tensor.
pub fn tensor_measure(ctx: &FieldCtx, t: &DenseTensor, r: usize) -> Result<Vec<Fel>> {
    let (d, n) = cube_shape(t.dims())?;
    TensorPlan::new(ctx, d, n, r)?.measure(t)
}

pub fn tensor_recover(ctx: &FieldCtx, d: usize, n: usize, r: usize, syndromes: &[Fel]) -> Result<DenseTensor> {
    TensorPlan::new(ctx, d, n, r)?.recover(syndromes)
}

fn cube_shape(dims: &[usize]) -> Result<(usize, usize)> {
    match dims {
        [n, rest @ ..] if !rest.is_empty() && rest.iter().all(|x| x == n) => Ok((dims.len(), *n)),
        _ => Err(Error::shape("n x n x ... x n", format!("{dims:?}"))),
    }
}
