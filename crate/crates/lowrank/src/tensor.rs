//! Dense and factored tensors, inner products, polynomial evaluation, diagonals
//! and the variable reshaping maps.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fel, FieldCtx};
use crate::linalg::{self, Matrix};

/// Row-major coefficient array of shape `n_1 x ... x n_d`, indexed from zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseTensor {
    ctx: FieldCtx,
    dims: Vec<usize>,
    data: Vec<Fel>,
}

fn dims_str(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

pub(crate) fn row_major_strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * dims[a + 1];
    }
    s
}

/// Advance a multi-index in row-major order; false once it wraps around.
pub(crate) fn next_index(idx: &mut [usize], dims: &[usize]) -> bool {
    for a in (0..dims.len()).rev() {
        idx[a] += 1;
        if idx[a] < dims[a] {
            return true;
        }
        idx[a] = 0;
    }
    false
}

impl DenseTensor {
    pub fn zeros(ctx: &FieldCtx, dims: &[usize]) -> Self {
        let len = dims.iter().product();
        DenseTensor { ctx: ctx.clone(), dims: dims.to_vec(), data: vec![Fel::ZERO; len] }
    }

    pub fn from_vec(ctx: &FieldCtx, dims: &[usize], data: Vec<Fel>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if dims.is_empty() || data.len() != len {
            return Err(Error::LengthMismatch { expected: len, found: data.len() });
        }
        if let Some(&bad) = data.iter().find(|&&x| !ctx.contains_element(x)) {
            return Err(Error::CoefficientOutOfRange(bad.raw()));
        }
        Ok(DenseTensor { ctx: ctx.clone(), dims: dims.to_vec(), data })
    }

    pub fn from_matrix(ctx: &FieldCtx, m: &Matrix) -> Self {
        DenseTensor { ctx: ctx.clone(), dims: vec![m.rows(), m.cols()], data: m.data().to_vec() }
    }

    /// Indicator tensor of a single position.
    pub fn indicator(ctx: &FieldCtx, dims: &[usize], idx: &[usize]) -> Self {
        let mut t = Self::zeros(ctx, dims);
        t.set(idx, Fel::ONE);
        t
    }

    pub fn random<R: Rng + ?Sized>(ctx: &FieldCtx, dims: &[usize], rng: &mut R) -> Self {
        let len = dims.iter().product();
        let data = (0..len).map(|_| ctx.random(rng)).collect();
        DenseTensor { ctx: ctx.clone(), dims: dims.to_vec(), data }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn data(&self) -> &[Fel] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Fel] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Number of nonzero coefficients.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dims.len(), "index arity");
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &n)| {
            assert!(i < n, "index out of range");
            acc * n + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> Fel {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Fel) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Matrix view, for order-2 tensors.
    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.dims.len() != 2 {
            return Err(Error::shape("a matrix", dims_str(&self.dims)));
        }
        Ok(Matrix::from_vec(self.dims[0], self.dims[1], self.data.clone()))
    }

    /// Re-tag the entries as elements of a field containing the current one.
    pub fn lift(&self, ctx: &FieldCtx) -> Result<Self> {
        if !ctx.contains(&self.ctx) {
            return Err(Error::FieldMismatch);
        }
        Ok(DenseTensor { ctx: ctx.clone(), dims: self.dims.clone(), data: self.data.clone() })
    }

    /// Re-tag as a tensor over `ctx` when every entry lies in `ctx`.
    pub fn restrict(&self, ctx: &FieldCtx) -> Result<Self> {
        if !self.ctx.contains(ctx) {
            return Err(Error::FieldMismatch);
        }
        if self.data.iter().any(|&x| !ctx.contains_element(x)) {
            return Err(Error::FieldMismatch);
        }
        Ok(DenseTensor { ctx: ctx.clone(), dims: self.dims.clone(), data: self.data.clone() })
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    pub fn scale(&self, c: Fel) -> DenseTensor {
        let data = self.data.iter().map(|&x| self.ctx.mul(c, x)).collect();
        DenseTensor { ctx: self.ctx.clone(), dims: self.dims.clone(), data }
    }

    fn zip_with(
        &self,
        other: &DenseTensor,
        op: impl Fn(&FieldCtx, Fel, Fel) -> Fel,
    ) -> Result<DenseTensor> {
        if self.dims != other.dims {
            return Err(Error::shape(dims_str(&self.dims), dims_str(&other.dims)));
        }
        let ctx = self.ctx.common(&other.ctx)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(&ctx, a, b)).collect();
        Ok(DenseTensor { ctx, dims: self.dims.clone(), data })
    }

    /// Reorder axes: output axis `a` is input axis `perm[a]`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<DenseTensor> {
        let d = self.dims.len();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::param("not a permutation of the axes"));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let in_strides = row_major_strides(&self.dims);
        let mut out = DenseTensor::zeros(&self.ctx, &new_dims);
        let mut idx = vec![0usize; d];
        let mut pos = 0;
        loop {
            let src: usize = (0..d).map(|a| idx[a] * in_strides[perm[a]]).sum();
            out.data[pos] = self.data[src];
            pos += 1;
            if !next_index(&mut idx, &new_dims) {
                break;
            }
        }
        Ok(out)
    }
}

/// One outer product `v_1 (x) ... (x) v_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank1Tensor {
    ctx: FieldCtx,
    factors: Vec<Vec<Fel>>,
}

impl Rank1Tensor {
    /// Fails unless every factor has a nonzero coordinate.
    pub fn new(ctx: &FieldCtx, factors: Vec<Vec<Fel>>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|v| v.is_empty()) {
            return Err(Error::param("rank-one tensor needs nonempty factors"));
        }
        if factors.iter().any(|v| v.iter().all(|x| x.is_zero())) {
            return Err(Error::param("rank-one factor vectors must be nonzero"));
        }
        Ok(Rank1Tensor { ctx: ctx.clone(), factors })
    }

    /// Outer product whose factors may vanish; such a tensor is zero.
    pub(crate) fn new_unchecked(ctx: &FieldCtx, factors: Vec<Vec<Fel>>) -> Self {
        Rank1Tensor { ctx: ctx.clone(), factors }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn factors(&self) -> &[Vec<Fel>] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.factors.iter().any(|v| v.iter().all(|x| x.is_zero()))
    }

    pub fn expand(&self) -> DenseTensor {
        let f = &self.ctx;
        let mut data = vec![Fel::ONE];
        for v in &self.factors {
            let mut next = Vec::with_capacity(data.len() * v.len());
            for &a in &data {
                next.extend(v.iter().map(|&b| f.mul(a, b)));
            }
            data = next;
        }
        DenseTensor { ctx: f.clone(), dims: self.dims(), data }
    }
}

/// A sum of rank-one terms; its rank is at most the number of terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowRankTensor {
    ctx: FieldCtx,
    dims: Vec<usize>,
    terms: Vec<Rank1Tensor>,
}

impl LowRankTensor {
    pub fn new(ctx: &FieldCtx, dims: &[usize], terms: Vec<Rank1Tensor>) -> Result<Self> {
        for t in &terms {
            if t.dims() != dims {
                return Err(Error::shape(dims_str(dims), dims_str(&t.dims())));
            }
            if !ctx.contains(t.ctx()) {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(LowRankTensor { ctx: ctx.clone(), dims: dims.to_vec(), terms }.normalized())
    }

    /// Drops all-zero terms.
    pub fn normalized(mut self) -> Self {
        self.terms.retain(|t| !t.is_zero());
        self
    }

    /// Sum of `r` random rank-one terms (each factor nonzero).
    pub fn random<R: Rng + ?Sized>(ctx: &FieldCtx, dims: &[usize], r: usize, rng: &mut R) -> Self {
        let terms = (0..r)
            .map(|_| {
                let factors = dims
                    .iter()
                    .map(|&n| loop {
                        let v: Vec<Fel> = (0..n).map(|_| ctx.random(rng)).collect();
                        if v.iter().any(|x| !x.is_zero()) {
                            break v;
                        }
                    })
                    .collect();
                Rank1Tensor::new_unchecked(ctx, factors)
            })
            .collect();
        LowRankTensor { ctx: ctx.clone(), dims: dims.to_vec(), terms }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn terms(&self) -> &[Rank1Tensor] {
        &self.terms
    }

    pub fn expand(&self) -> DenseTensor {
        let mut acc = DenseTensor::zeros(&self.ctx, &self.dims);
        for t in &self.terms {
            let e = t.expand();
            for (a, b) in acc.data.iter_mut().zip(e.data) {
                *a = self.ctx.add(*a, b);
            }
        }
        acc
    }
}

/// Borrowed view accepted by [`inner_product`].
#[derive(Clone, Copy, Debug)]
pub enum TensorRef<'a> {
    Dense(&'a DenseTensor),
    Rank1(&'a Rank1Tensor),
    LowRank(&'a LowRankTensor),
}

impl<'a> From<&'a DenseTensor> for TensorRef<'a> {
    fn from(t: &'a DenseTensor) -> Self {
        TensorRef::Dense(t)
    }
}

impl<'a> From<&'a Rank1Tensor> for TensorRef<'a> {
    fn from(t: &'a Rank1Tensor) -> Self {
        TensorRef::Rank1(t)
    }
}

impl<'a> From<&'a LowRankTensor> for TensorRef<'a> {
    fn from(t: &'a LowRankTensor) -> Self {
        TensorRef::LowRank(t)
    }
}

impl TensorRef<'_> {
    pub fn ctx(&self) -> &FieldCtx {
        match self {
            TensorRef::Dense(t) => t.ctx(),
            TensorRef::Rank1(t) => t.ctx(),
            TensorRef::LowRank(t) => t.ctx(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            TensorRef::Dense(t) => t.dims().to_vec(),
            TensorRef::Rank1(t) => t.dims(),
            TensorRef::LowRank(t) => t.dims().to_vec(),
        }
    }
}

fn dot(f: &FieldCtx, a: &[Fel], b: &[Fel]) -> Fel {
    a.iter().zip(b).fold(Fel::ZERO, |acc, (&x, &y)| f.mul_add(x, y, acc))
}

/// Sum of entrywise products. Two rank-one arguments use the factored shortcut.
pub fn inner_product<'a, 'b>(a: impl Into<TensorRef<'a>>, b: impl Into<TensorRef<'b>>) -> Result<Fel> {
    let (a, b) = (a.into(), b.into());
    if a.dims() != b.dims() {
        return Err(Error::shape(dims_str(&a.dims()), dims_str(&b.dims())));
    }
    let f = a.ctx().common(b.ctx())?;
    Ok(inner_in(&f, a, b))
}

fn inner_in(f: &FieldCtx, a: TensorRef<'_>, b: TensorRef<'_>) -> Fel {
    use TensorRef::*;
    match (a, b) {
        (LowRank(l), other) | (other, LowRank(l)) => l
            .terms()
            .iter()
            .fold(Fel::ZERO, |acc, t| f.add(acc, inner_in(f, Rank1(t), other))),
        (Dense(x), Dense(y)) => dot(f, x.data(), y.data()),
        (Dense(x), Rank1(y)) | (Rank1(y), Dense(x)) => contract(f, x, y.factors()),
        (Rank1(x), Rank1(y)) => x
            .factors()
            .iter()
            .zip(y.factors())
            .fold(Fel::ONE, |acc, (u, v)| f.mul(acc, dot(f, u, v))),
    }
}

/// Contract every axis of `t` with the matching vector, last axis first.
fn contract(f: &FieldCtx, t: &DenseTensor, vecs: &[Vec<Fel>]) -> Fel {
    let mut cur = t.data().to_vec();
    for v in vecs.iter().rev() {
        let n = v.len();
        cur = cur.chunks(n).map(|fiber| dot(f, fiber, v)).collect();
    }
    cur[0]
}

/// `f_T(a_1, ..., a_d) = <T, a_1 (x) ... (x) a_d>`
pub fn eval_ft(t: &DenseTensor, points: &[Vec<Fel>]) -> Result<Fel> {
    let dims: Vec<usize> = points.iter().map(Vec::len).collect();
    if dims != t.dims() {
        return Err(Error::shape(dims_str(t.dims()), dims_str(&dims)));
    }
    Ok(contract(t.ctx(), t, points))
}

/// `f^_T(x_1, ..., x_d)`: the polynomial with coefficient array T, folded axis by
/// axis with Horner's rule. The points may lie in an extension of T's field.
pub fn eval_fhat_in(f: &FieldCtx, t: &DenseTensor, xs: &[Fel]) -> Result<Fel> {
    if xs.len() != t.order() {
        return Err(Error::LengthMismatch { expected: t.order(), found: xs.len() });
    }
    let mut cur = t.data().to_vec();
    for (a, &x) in xs.iter().enumerate().rev() {
        let n = t.dims()[a];
        cur = cur
            .chunks(n)
            .map(|fiber| fiber.iter().rev().fold(Fel::ZERO, |acc, &c| f.mul_add(acc, x, c)))
            .collect();
    }
    Ok(cur[0])
}

pub fn eval_fhat(t: &DenseTensor, xs: &[Fel]) -> Result<Fel> {
    eval_fhat_in(t.ctx(), t, xs)
}

pub fn matrix_rank(m: &DenseTensor) -> Result<usize> {
    Ok(linalg::rank(m.ctx(), &m.to_matrix()?))
}

/// Rows `i` with `(i, k - i)` inside an `n x m` matrix, in increasing order.
pub fn diagonal_rows(n: usize, m: usize, k: usize) -> std::ops::Range<usize> {
    let lo = (k + 1).saturating_sub(m);
    let hi = k.min(n.saturating_sub(1)) + 1;
    lo..hi.max(lo)
}

/// Number of entries on the k-diagonal of an `n x m` matrix.
pub fn diagonal_len(n: usize, m: usize, k: usize) -> usize {
    diagonal_rows(n, m, k).len()
}

fn check_diag(m: &DenseTensor, k: usize) -> Result<(usize, usize)> {
    if m.order() != 2 {
        return Err(Error::shape("a matrix", dims_str(m.dims())));
    }
    let (n, c) = (m.dims()[0], m.dims()[1]);
    if k + 2 > n + c {
        return Err(Error::DiagonalOutOfRange { k, max: n + c - 2 });
    }
    Ok((n, c))
}

/// Entries `M[i][k-i]` ordered by increasing row.
pub fn diagonal(m: &DenseTensor, k: usize) -> Result<Vec<Fel>> {
    let (n, c) = check_diag(m, k)?;
    Ok(diagonal_rows(n, c, k).map(|i| m.data()[i * c + (k - i)]).collect())
}

pub fn set_diagonal(m: &mut DenseTensor, k: usize, values: &[Fel]) -> Result<()> {
    let (n, c) = check_diag(m, k)?;
    let rows = diagonal_rows(n, c, k);
    if rows.len() != values.len() {
        return Err(Error::LengthMismatch { expected: rows.len(), found: values.len() });
    }
    for (i, &v) in rows.zip(values) {
        m.data_mut()[i * c + (k - i)] = v;
    }
    Ok(())
}

/// Substitute `x_b = x_a^stride`: exponents `(i_a, i_b)` map to `i_a + stride * i_b`
/// on axis `a`, and axis `b` is removed. Requires `dims[a] <= stride`.
pub fn merge_variables(t: &DenseTensor, a: usize, b: usize, stride: usize) -> Result<DenseTensor> {
    let d = t.order();
    if a >= d || b >= d || a == b {
        return Err(Error::param("merge needs two distinct axes"));
    }
    let dims = t.dims();
    if stride < dims[a] {
        return Err(Error::StrideTooSmall { stride, len: dims[a] });
    }
    let merged_len = (dims[a] - 1) + stride * (dims[b] - 1) + 1;
    let out_dims: Vec<usize> = (0..d)
        .filter(|&x| x != b)
        .map(|x| if x == a { merged_len } else { dims[x] })
        .collect();
    let out_strides = row_major_strides(&out_dims);
    let mut out = DenseTensor::zeros(t.ctx(), &out_dims);
    let mut idx = vec![0usize; d];
    let mut src = 0;
    loop {
        let v = t.data()[src];
        if !v.is_zero() {
            let mut off = 0;
            let mut q = 0;
            for x in 0..d {
                if x == b {
                    continue;
                }
                let i = if x == a { idx[a] + stride * idx[b] } else { idx[x] };
                off += i * out_strides[q];
                q += 1;
            }
            out.data[off] = t.ctx().add(out.data[off], v);
        }
        src += 1;
        if !next_index(&mut idx, dims) {
            break;
        }
    }
    Ok(out)
}

/// Inverse of [`merge_variables`]: axis `axis` is split into the low part
/// `e mod stride` (kept at `axis`, length `low_len`) and the high part
/// `e div stride` (inserted so that it ends up at position `high_pos`, length `high_len`).
pub fn split_variables(
    t: &DenseTensor,
    axis: usize,
    stride: usize,
    low_len: usize,
    high_len: usize,
    high_pos: usize,
) -> Result<DenseTensor> {
    let d = t.order();
    if axis >= d || high_pos > d {
        return Err(Error::param("split axis out of range"));
    }
    if stride < low_len {
        return Err(Error::StrideTooSmall { stride, len: low_len });
    }
    let mut out_dims: Vec<usize> = t.dims().to_vec();
    out_dims[axis] = low_len;
    out_dims.insert(high_pos, high_len);
    let out_strides = row_major_strides(&out_dims);
    let mut out = DenseTensor::zeros(t.ctx(), &out_dims);
    let mut idx = vec![0usize; d];
    let mut src = 0;
    loop {
        let v = t.data()[src];
        if !v.is_zero() {
            let e = idx[axis];
            let (lo, hi) = (e % stride, e / stride);
            if lo >= low_len || hi >= high_len {
                return Err(Error::param("nonzero coefficient outside the split range"));
            }
            let mut full = idx.clone();
            full[axis] = lo;
            full.insert(high_pos, hi);
            let off: usize = full.iter().zip(&out_strides).map(|(&i, &s)| i * s).sum();
            out.data[off] = v;
        }
        src += 1;
        if !next_index(&mut idx, t.dims()) {
            break;
        }
    }
    Ok(out)
}
