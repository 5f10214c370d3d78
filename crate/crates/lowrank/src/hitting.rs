//! Hitting-set families, the PIT predicate, small-field simulation and
//! hard-tensor extraction.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{pow_u128, Fel, FieldCtx};
use crate::linalg::{self, Matrix};
use crate::poly::powers;
use crate::tensor::{inner_product, DenseTensor, Rank1Tensor, TensorRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    B,
    D,
    Dprime,
    Bprime,
    TensorB,
    SimImproper,
    SimProper,
    Naive,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::B => "B",
            Family::D => "D",
            Family::Dprime => "Dprime",
            Family::Bprime => "Bprime",
            Family::TensorB => "TensorB",
            Family::SimImproper => "SimImproper",
            Family::SimProper => "SimProper",
            Family::Naive => "Naive",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "B" => Family::B,
            "D" => Family::D,
            "Dprime" => Family::Dprime,
            "Bprime" => Family::Bprime,
            "TensorB" => Family::TensorB,
            "SimImproper" => Family::SimImproper,
            "SimProper" => Family::SimProper,
            "Naive" => Family::Naive,
            other => return Err(Error::param(format!("unknown family {other:?}"))),
        })
    }
}

/// Per-measurement indices: the point index `k`, the weight exponents `l`, and for
/// simulated families the coefficient positions `sim`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MeasurementMeta {
    pub k: usize,
    pub l: Vec<usize>,
    pub sim: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measurement {
    Rank1(Rank1Tensor),
    Dense(DenseTensor),
}

impl Measurement {
    pub fn as_tensor_ref(&self) -> TensorRef<'_> {
        match self {
            Measurement::Rank1(t) => TensorRef::Rank1(t),
            Measurement::Dense(t) => TensorRef::Dense(t),
        }
    }

    pub fn to_dense(&self) -> DenseTensor {
        match self {
            Measurement::Rank1(t) => t.expand(),
            Measurement::Dense(t) => t.clone(),
        }
    }

    pub fn is_rank1(&self) -> bool {
        matches!(self, Measurement::Rank1(_))
    }
}

/// How a simulated family relates to the extension-field family it came from.
#[derive(Clone, Debug)]
pub struct SimulationInfo {
    pub ext: FieldCtx,
    pub parent: Family,
    pub parent_len: usize,
    pub proper: bool,
    pub order: usize,
}

impl SimulationInfo {
    /// Rebuild the extension-field syndromes `<T, H>` from the base-field ones.
    pub fn lift_syndromes(&self, ys: &[Fel]) -> Result<Vec<Fel>> {
        let k = self.ext.degree();
        let block = if self.proper { k.pow(self.order as u32) } else { k };
        if ys.len() != block * self.parent_len {
            return Err(Error::LengthMismatch { expected: block * self.parent_len, found: ys.len() });
        }
        let base = self.ext.base_field();
        ys.chunks(block)
            .map(|chunk| {
                let coeffs: Vec<u64> = if self.proper {
                    // coefficient l0 sums the block of positions with that leading index
                    chunk
                        .chunks(block / k)
                        .map(|c| c.iter().fold(Fel::ZERO, |a, &y| base.add(a, y)).raw())
                        .collect()
                } else {
                    chunk.iter().map(|y| y.raw()).collect()
                };
                self.ext.from_coeffs(&coeffs)
            })
            .collect()
    }
}

/// An ordered family of measurement tensors.
#[derive(Clone, Debug)]
pub struct MeasurementSet {
    ctx: FieldCtx,
    dims: Vec<usize>,
    family: Family,
    r: usize,
    items: Vec<Measurement>,
    meta: Vec<MeasurementMeta>,
    sim: Option<SimulationInfo>,
}

impl MeasurementSet {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Rank parameter the family was built for.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Measurement] {
        &self.items
    }

    pub fn meta(&self) -> &[MeasurementMeta] {
        &self.meta
    }

    pub fn simulation(&self) -> Option<&SimulationInfo> {
        self.sim.as_ref()
    }

    /// For diagonal families: consecutive index ranges sharing a diagonal `k`.
    pub fn groups_by_k(&self) -> Vec<(usize, Range<usize>)> {
        let mut out: Vec<(usize, Range<usize>)> = Vec::new();
        for (i, m) in self.meta.iter().enumerate() {
            match out.last_mut() {
                Some((k, range)) if *k == m.k && range.end == i => range.end = i + 1,
                _ => out.push((m.k, i..i + 1)),
            }
        }
        out
    }

    /// Measurements stacked as rows of a `|H| x prod(dims)` matrix.
    pub fn stacked(&self) -> Matrix {
        let rows: Vec<Vec<Fel>> = self.items.iter().map(|m| m.to_dense().data().to_vec()).collect();
        if rows.is_empty() {
            return Matrix::zeros(0, self.dims.iter().product());
        }
        Matrix::from_rows(&rows)
    }

    /// `<T, H>` for every member, in family order.
    pub fn syndromes<'a>(&self, t: impl Into<TensorRef<'a>>) -> Result<Vec<Fel>> {
        let t = t.into();
        self.items.iter().map(|h| inner_product(t, h.as_tensor_ref())).collect()
    }
}

fn check_matrix_params(r: usize, n: usize, m: usize) -> Result<()> {
    if !(m >= n && n >= r && r >= 1) {
        return Err(Error::param(format!("need m >= n >= r >= 1, got r={r} n={n} m={m}")));
    }
    Ok(())
}

/// `(A_alpha)_{i,j} = (g^i alpha)^j`, an `r x n` matrix.
pub fn rank_preserver(ctx: &FieldCtx, g: Fel, r: usize, n: usize, alpha: Fel) -> Result<Matrix> {
    let ord = if g.is_zero() { 0 } else { ctx.multiplicative_order(g) };
    if ord < n as u64 {
        return Err(Error::OrderTooSmall { have: ord, need: n as u64 });
    }
    let mut a = Matrix::zeros(r, n);
    let mut gi = Fel::ONE;
    for i in 0..r {
        let base = ctx.mul(gi, alpha);
        for (j, v) in powers(ctx, base, n).into_iter().enumerate() {
            a[(i, j)] = v;
        }
        gi = ctx.mul(gi, g);
    }
    Ok(a)
}

fn b_member(ctx: &FieldCtx, g: Fel, alpha: Fel, l: usize, n: usize, m: usize) -> Measurement {
    let u = powers(ctx, alpha, n);
    let v = powers(ctx, ctx.mul(ctx.pow(g, l as u64), alpha), m);
    Measurement::Rank1(Rank1Tensor::new_unchecked(ctx, vec![u, v]))
}

fn b_family(ctx: &FieldCtx, r: usize, n: usize, m: usize, prime: bool) -> Result<MeasurementSet> {
    check_matrix_params(r, n, m)?;
    let g = ctx.generator_for(m as u128)?;
    let alphas = ctx.nonzero_elements(n + m - 1)?;
    let (mut items, mut meta) = (Vec::new(), Vec::new());
    for l in 0..r {
        let kmax = if prime { (n + m - 2).checked_sub(2 * l) } else { Some(n + m - 2) };
        let Some(kmax) = kmax else { break };
        for (k, &alpha) in alphas.iter().enumerate().take(kmax + 1) {
            items.push(b_member(ctx, g, alpha, l, n, m));
            meta.push(MeasurementMeta { k, l: vec![l], sim: vec![] });
        }
    }
    let family = if prime { Family::Bprime } else { Family::B };
    Ok(MeasurementSet { ctx: ctx.clone(), dims: vec![n, m], family, r, items, meta, sim: None })
}

/// `B_{k,l} = (alpha_k^i (g^l alpha_k)^j)` for `l < r`, `k <= n+m-2`; `(n+m-1) r` members.
pub fn hitting_set_b(ctx: &FieldCtx, r: usize, n: usize, m: usize) -> Result<MeasurementSet> {
    b_family(ctx, r, n, m, false)
}

/// The linearly independent subfamily `l < r`, `k <= n+m-2-2l`; `(n+m-r) r` members.
pub fn hitting_set_b_prime(ctx: &FieldCtx, r: usize, n: usize, m: usize) -> Result<MeasurementSet> {
    b_family(ctx, r, n, m, true)
}

/// Number of `D'` members on diagonal `k`: `min(r, k+1, n+m-k-1)`.
pub fn d_prime_count(r: usize, n: usize, m: usize, k: usize) -> usize {
    r.min(k + 1).min(n + m - k - 1)
}

fn d_member(ctx: &FieldCtx, g: Fel, k: usize, l: usize, n: usize, m: usize) -> Measurement {
    let mut t = DenseTensor::zeros(ctx, &[n, m]);
    let gl = ctx.pow(g, l as u64);
    for i in crate::tensor::diagonal_rows(n, m, k) {
        let j = k - i;
        t.set(&[i, j], ctx.pow(gl, j as u64));
    }
    Measurement::Dense(t)
}

fn d_family(ctx: &FieldCtx, r: usize, n: usize, m: usize, prime: bool) -> Result<MeasurementSet> {
    check_matrix_params(r, n, m)?;
    let g = ctx.generator_for(m as u128)?;
    let (mut items, mut meta) = (Vec::new(), Vec::new());
    for k in 0..n + m - 1 {
        let count = if prime { d_prime_count(r, n, m, k) } else { r };
        for l in 0..count {
            items.push(d_member(ctx, g, k, l, n, m));
            meta.push(MeasurementMeta { k, l: vec![l], sim: vec![] });
        }
    }
    let family = if prime { Family::Dprime } else { Family::D };
    Ok(MeasurementSet { ctx: ctx.clone(), dims: vec![n, m], family, r, items, meta, sim: None })
}

/// `D_{k,l}`: `g^{l j}` on the k-diagonal, zero elsewhere; `(n+m-1) r` members.
pub fn hitting_set_d(ctx: &FieldCtx, r: usize, n: usize, m: usize) -> Result<MeasurementSet> {
    d_family(ctx, r, n, m, false)
}

/// The independent subfamily `l < min(r, k+1, n+m-k-1)`; `(n+m-r) r` members.
pub fn hitting_set_d_prime(ctx: &FieldCtx, r: usize, n: usize, m: usize) -> Result<MeasurementSet> {
    d_family(ctx, r, n, m, true)
}

/// `L_{n,b}(k, i_1, ...) = sum over set bits j-1 of k of i_j (n 2^b)^{floor(k / 2^j)}`.
pub fn schedule_exponent(n: u64, b: u32, k: u64, idx: &[u64]) -> BigUint {
    let base = BigUint::from(n) << b;
    let mut acc = BigUint::from(0u32);
    for (j, &i) in idx.iter().enumerate() {
        let bit = j as u32;
        if bit < 64 && (k >> bit) & 1 == 1 {
            let e = (k >> (bit + 1)) as u32;
            acc += BigUint::from(i) * base.pow(e);
        }
    }
    acc
}

/// `ceil(lg d)`
pub fn ceil_lg(d: usize) -> u32 {
    (d.max(1) - 1).checked_ilog2().map_or(0, |x| x + 1)
}

/// Field order needed for the tensor family: `(2dn)^d`.
pub fn tensor_order_bound(d: usize, n: usize) -> u128 {
    pow_u128(2 * d as u128 * n as u128, d as u32)
}

/// All `l` tuples in lexicographic order, first coordinate most significant.
pub(crate) fn l_tuples(r: usize, b: u32) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..b {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..r).map(move |l| {
                    let mut t2 = t.clone();
                    t2.push(l);
                    t2
                })
            })
            .collect();
    }
    out
}

/// Exponents `g^{L(a, l)}` for the real axes `a < d`.
pub(crate) fn axis_weights(ctx: &FieldCtx, g: Fel, d: usize, n: usize, l: &[usize]) -> Vec<Fel> {
    let b = ceil_lg(d);
    let idx: Vec<u64> = l.iter().map(|&x| x as u64).collect();
    (0..d)
        .map(|a| ctx.pow_big(g, &schedule_exponent(n as u64, b, a as u64, &idx)))
        .collect()
}

/// Rank-one tensors `prod_a (g^{L(a, l)} alpha_k)^{i_a}` for all `l` tuples and
/// `k < dn`; `dn r^{ceil(lg d)}` members. Axis `a` sits at padded position `a`.
pub fn hitting_set_tensor(ctx: &FieldCtx, d: usize, n: usize, r: usize) -> Result<MeasurementSet> {
    if d < 2 || n < 1 || r < 1 {
        return Err(Error::param(format!("need d >= 2, n >= 1, r >= 1, got d={d} n={n} r={r}")));
    }
    let g = ctx.generator_for(tensor_order_bound(d, n))?;
    let alphas = ctx.nonzero_elements(d * n)?;
    let b = ceil_lg(d);
    let (mut items, mut meta) = (Vec::new(), Vec::new());
    for l in l_tuples(r, b) {
        let w = axis_weights(ctx, g, d, n, &l);
        for (k, &alpha) in alphas.iter().enumerate() {
            let factors = w.iter().map(|&wa| powers(ctx, ctx.mul(wa, alpha), n)).collect();
            items.push(Measurement::Rank1(Rank1Tensor::new_unchecked(ctx, factors)));
            meta.push(MeasurementMeta { k, l: l.clone(), sim: vec![] });
        }
    }
    Ok(MeasurementSet {
        ctx: ctx.clone(),
        dims: vec![n; d],
        family: Family::TensorB,
        r,
        items,
        meta,
        sim: None,
    })
}

/// All indicator tensors, in row-major order.
pub fn naive_set(ctx: &FieldCtx, dims: &[usize]) -> MeasurementSet {
    let total: usize = dims.iter().product();
    let items = (0..total)
        .map(|pos| {
            let mut t = DenseTensor::zeros(ctx, dims);
            t.data_mut()[pos] = Fel::ONE;
            Measurement::Dense(t)
        })
        .collect();
    let meta = (0..total).map(|k| MeasurementMeta { k, l: vec![], sim: vec![] }).collect();
    MeasurementSet {
        ctx: ctx.clone(),
        dims: dims.to_vec(),
        family: Family::Naive,
        r: dims.iter().copied().min().unwrap_or(0),
        items,
        meta,
        sim: None,
    }
}

/// Builds a family by tag. Matrix families take `dims = [n, m]`, the tensor
/// family takes `dims = [n; d]`.
pub fn build_family(ctx: &FieldCtx, family: Family, r: usize, dims: &[usize]) -> Result<MeasurementSet> {
    let matrix = || -> Result<(usize, usize)> {
        match dims {
            [n, m] => Ok((*n, *m)),
            _ => Err(Error::shape("n x m", format!("{dims:?}"))),
        }
    };
    match family {
        Family::B => matrix().and_then(|(n, m)| hitting_set_b(ctx, r, n, m)),
        Family::Bprime => matrix().and_then(|(n, m)| hitting_set_b_prime(ctx, r, n, m)),
        Family::D => matrix().and_then(|(n, m)| hitting_set_d(ctx, r, n, m)),
        Family::Dprime => matrix().and_then(|(n, m)| hitting_set_d_prime(ctx, r, n, m)),
        Family::TensorB => {
            let n = dims.first().copied().unwrap_or(0);
            if dims.len() < 2 || dims.iter().any(|&x| x != n) {
                return Err(Error::shape("n x n x ... x n", format!("{dims:?}")));
            }
            hitting_set_tensor(ctx, dims.len(), n, r)
        }
        Family::Naive => Ok(naive_set(ctx, dims)),
        Family::SimImproper | Family::SimProper => {
            Err(Error::param("simulated families are derived with simulate_improper/simulate_proper"))
        }
    }
}

/// Replace each member `H` by the `k` tensors of its power-basis coefficients.
pub fn simulate_improper(h: &MeasurementSet) -> Result<MeasurementSet> {
    let ext = h.ctx();
    if ext.degree() == 1 {
        return Ok(h.clone());
    }
    let base = ext.base_field();
    let k = ext.degree();
    let (mut items, mut meta) = (Vec::new(), Vec::new());
    for (item, m) in h.items.iter().zip(&h.meta) {
        let dense = item.to_dense();
        let coeffs: Vec<Vec<u64>> = dense.data().iter().map(|&x| ext.coeffs(x)).collect();
        for l in 0..k {
            let data = coeffs.iter().map(|c| Fel::from_raw(c[l])).collect();
            items.push(Measurement::Dense(DenseTensor::from_vec(&base, h.dims(), data)?));
            meta.push(MeasurementMeta { k: m.k, l: m.l.clone(), sim: vec![l] });
        }
    }
    Ok(MeasurementSet {
        ctx: base,
        dims: h.dims.clone(),
        family: Family::SimImproper,
        r: h.r,
        items,
        meta,
        sim: Some(SimulationInfo {
            ext: ext.clone(),
            parent: h.family,
            parent_len: h.len(),
            proper: false,
            order: h.dims.len(),
        }),
    })
}

/// Replace each rank-one member `v_1 (x) ... (x) v_d` by the `k^d` rank-one tensors
/// built from entries `(l_{j-1}, l_j)` of the multiplication matrices, with `l_d = 0`.
pub fn simulate_proper(h: &MeasurementSet) -> Result<MeasurementSet> {
    let ext = h.ctx();
    if let Some(pos) = h.items.iter().position(|m| !m.is_rank1()) {
        return Err(Error::NotRank1(pos));
    }
    if ext.degree() == 1 {
        return Ok(h.clone());
    }
    let base = ext.base_field();
    let k = ext.degree();
    let d = h.dims.len();
    let (mut items, mut meta) = (Vec::new(), Vec::new());
    for (item, m) in h.items.iter().zip(&h.meta) {
        let Measurement::Rank1(t) = item else { unreachable!() };
        let mats: Vec<Vec<Matrix>> = t
            .factors()
            .iter()
            .map(|v| v.iter().map(|&a| ext.embed_as_matrix(a)).collect())
            .collect();
        let mut ls = vec![0usize; d];
        loop {
            let factors: Vec<Vec<Fel>> = (0..d)
                .map(|j| {
                    let (row, col) = (ls[j], if j + 1 < d { ls[j + 1] } else { 0 });
                    mats[j].iter().map(|mm| mm[(row, col)]).collect()
                })
                .collect();
            items.push(Measurement::Rank1(Rank1Tensor::new_unchecked(&base, factors)));
            meta.push(MeasurementMeta { k: m.k, l: m.l.clone(), sim: ls.clone() });
            if !crate::tensor::next_index(&mut ls, &vec![k; d]) {
                break;
            }
        }
    }
    Ok(MeasurementSet {
        ctx: base,
        dims: h.dims.clone(),
        family: Family::SimProper,
        r: h.r,
        items,
        meta,
        sim: Some(SimulationInfo {
            ext: ext.clone(),
            parent: h.family,
            parent_len: h.len(),
            proper: true,
            order: d,
        }),
    })
}

/// Build `family` over the degree-`k` extension of the prime field `base` and
/// simulate it back over `base`.
pub fn build_simulated(
    base: &FieldCtx,
    ext_degree: usize,
    family: Family,
    r: usize,
    dims: &[usize],
    proper: bool,
) -> Result<MeasurementSet> {
    let ext = base.extension(ext_degree)?;
    let h = build_family(&ext, family, r, dims)?;
    if proper {
        simulate_proper(&h)
    } else {
        simulate_improper(&h)
    }
}

/// Index of the first member with a nonzero inner product, in family order.
pub fn pit_witness<'a>(t: impl Into<TensorRef<'a>>, h: &MeasurementSet) -> Result<Option<usize>> {
    let t = t.into();
    check_dims(&t, h)?;
    for (i, m) in h.items.iter().enumerate() {
        if !inner_product(t, m.as_tensor_ref())?.is_zero() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Parallel [`pit_witness`]; reports the same (first) witness.
pub fn pit_witness_parallel<'a>(t: impl Into<TensorRef<'a>>, h: &MeasurementSet) -> Result<Option<usize>> {
    let t = t.into();
    check_dims(&t, h)?;
    h.ctx.common(t.ctx())?;
    Ok(h.items.par_iter().position_first(|m| {
        !inner_product(t, m.as_tensor_ref()).map(|v| v.is_zero()).unwrap_or(true)
    }))
}

/// True iff some member has a nonzero inner product with `t`.
pub fn pit_test<'a>(t: impl Into<TensorRef<'a>>, h: &MeasurementSet) -> Result<bool> {
    pit_witness(t, h).map(|w| w.is_some())
}

fn check_dims(t: &TensorRef<'_>, h: &MeasurementSet) -> Result<()> {
    if t.dims() != h.dims {
        return Err(Error::shape(format!("{:?}", h.dims), format!("{:?}", t.dims())));
    }
    Ok(())
}

/// A nonzero tensor orthogonal to every member, from the first nullspace vector.
pub fn hard_tensor(h: &MeasurementSet) -> Result<DenseTensor> {
    let ns = linalg::nullspace(h.ctx(), &h.stacked());
    let v = ns.into_iter().next().ok_or(Error::NoNullspace)?;
    DenseTensor::from_vec(h.ctx(), h.dims(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_preserver_example() {
        let f = FieldCtx::prime(7).unwrap();
        let a = rank_preserver(&f, Fel::from_raw(3), 2, 2, Fel::from_raw(2)).unwrap();
        assert_eq!(a.row(0), &[Fel::ONE, Fel::from_raw(2)]);
        assert_eq!(a.row(1), &[Fel::ONE, Fel::from_raw(6)]);
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(schedule_exponent(2, 2, 0, &[5, 7]), BigUint::from(0u32));
        assert_eq!(schedule_exponent(2, 2, 3, &[1, 1]), BigUint::from(9u32));
    }

    #[test]
    fn ceil_lg_values() {
        assert_eq!(ceil_lg(1), 0);
        assert_eq!(ceil_lg(2), 1);
        assert_eq!(ceil_lg(3), 2);
        assert_eq!(ceil_lg(4), 2);
        assert_eq!(ceil_lg(5), 3);
        assert_eq!(ceil_lg(8), 3);
    }
}
