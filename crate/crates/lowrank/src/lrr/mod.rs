//! Low-rank recovery: echelon bookkeeping, the diagonal-by-diagonal
//! reconstruction, the `D'` decoder, and `B'` to `D'` syndrome conversion.

mod tensor;

pub use tensor::{tensor_measure, tensor_measurement_count, tensor_recover, TensorPlan};

use crate::error::{Error, Result};
use crate::field::{Fel, FieldCtx};
use crate::hitting::d_prime_count;
use crate::linalg::Matrix;
use crate::poly::{powers, Interpolator};
use crate::sparse::{pronys_method, solve_on_support};
use crate::tensor::{diagonal_rows, DenseTensor};

/// `row[target] += factor * row[source]`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElementaryOp {
    pub target: usize,
    pub source: usize,
    pub factor: Fel,
}

/// Leading nonzero entry of each row restricted to the `(<k)`-diagonals.
pub fn lne_scan(f: &FieldCtx, m: &Matrix, k: usize) -> Vec<(usize, usize)> {
    let _ = f;
    (0..m.rows())
        .filter_map(|i| {
            (0..m.cols())
                .take_while(|&j| i + j < k)
                .find(|&j| !m[(i, j)].is_zero())
                .map(|j| (i, j))
        })
        .collect()
}

/// True if every leading entry `(i, j)` of the `(<k)` region has zeros below it
/// in rows `i < i' < k - j`.
pub fn is_upper_echelon(m: &Matrix, k: usize) -> Option<(usize, usize)> {
    for i in 0..m.rows() {
        let Some(j) = (0..m.cols()).take_while(|&j| i + j < k).find(|&j| !m[(i, j)].is_zero())
        else {
            continue;
        };
        for i2 in i + 1..(k - j).min(m.rows()) {
            if !m[(i2, j)].is_zero() {
                return Some((i2, j));
            }
        }
    }
    None
}

/// Row operations turning a `(<k)`-upper-echelon `p` into `(<=k)`-upper-echelon
/// form while leaving the `(<k)` region unchanged. Reads only the `(<=k)` region.
pub fn make_upper_echelon(
    f: &FieldCtx,
    p: &Matrix,
    k: usize,
) -> Result<Vec<ElementaryOp>> {
    if let Some((row, col)) = is_upper_echelon(p, k) {
        return Err(Error::NotEchelon { k, row, col });
    }
    Ok(echelon_ops(f, p, &lne_scan(f, p, k), k))
}

fn echelon_ops(f: &FieldCtx, p: &Matrix, lne: &[(usize, usize)], k: usize) -> Vec<ElementaryOp> {
    lne.iter()
        .filter_map(|&(i, j)| {
            let a = k - j;
            if a >= p.rows() || p[(a, j)].is_zero() {
                return None;
            }
            let c = f.div(p[(a, j)], p[(i, j)]).expect("leading entry is nonzero");
            Some(ElementaryOp { target: a, source: i, factor: f.neg(c) })
        })
        .collect()
}

/// State of the reconstruction after (or during) diagonal `k`.
#[derive(Clone, Debug)]
pub struct EchelonState {
    k: usize,
    l: Matrix,
    ops: Vec<ElementaryOp>,
    l_support: Vec<usize>,
    n_mat: Matrix,
    p: Matrix,
    lne: Vec<Option<usize>>,
}

impl EchelonState {
    fn new(n: usize, m: usize) -> Self {
        EchelonState {
            k: 0,
            l: Matrix::identity(n),
            ops: Vec::new(),
            l_support: Vec::new(),
            n_mat: Matrix::zeros(n, m),
            p: Matrix::zeros(n, m),
            lne: vec![None; n],
        }
    }

    /// Current diagonal.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Unit lower-triangular accumulated row operations.
    pub fn l(&self) -> &Matrix {
        &self.l
    }

    /// Every elementary operation folded into `L`, oldest first.
    pub fn ops(&self) -> &[ElementaryOp] {
        &self.ops
    }

    /// Columns where `L - I` may be nonzero.
    pub fn l_support(&self) -> &[usize] {
        &self.l_support
    }

    /// Recovered matrix, valid on the finished diagonals.
    pub fn recovered(&self) -> &Matrix {
        &self.n_mat
    }

    /// Row-reduced image, valid on the finished diagonals.
    pub fn p(&self) -> &Matrix {
        &self.p
    }

    /// Leading nonzero entries `(row, col)` of the finished region of `P`.
    pub fn lne(&self) -> Vec<(usize, usize)> {
        self.lne.iter().enumerate().filter_map(|(i, c)| c.map(|j| (i, j))).collect()
    }
}

/// Hooks into the reconstruction loop; used by tests to assert invariants.
pub trait RecoveryObserver {
    /// Called before the sparse oracle with the advice columns for diagonal `k`.
    fn before_oracle(&mut self, _state: &EchelonState, _advice_cols: &[usize]) {}
    /// Called at the end of each diagonal.
    fn after_iteration(&mut self, _state: &EchelonState) {}
}

/// Per-diagonal measurement weights: row `l` of `weights[k]` holds the values of
/// the l-th measurement of diagonal `k` on its slots (increasing row index).
#[derive(Clone, Debug)]
pub struct DiagonalMeasurements {
    n: usize,
    m: usize,
    weights: Vec<Matrix>,
}

impl DiagonalMeasurements {
    pub fn new(n: usize, m: usize, weights: Vec<Matrix>) -> Result<Self> {
        if n == 0 || m == 0 || weights.len() != n + m - 1 {
            return Err(Error::LengthMismatch { expected: n + m - 1, found: weights.len() });
        }
        for (k, w) in weights.iter().enumerate() {
            let len = diagonal_rows(n, m, k).len();
            if w.cols() != len {
                return Err(Error::shape(format!("{len} slots on diagonal {k}"), w.cols()));
            }
        }
        Ok(DiagonalMeasurements { n, m, weights })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn weights(&self, k: usize) -> &Matrix {
        &self.weights[k]
    }

    /// Total number of measurements.
    pub fn len(&self) -> usize {
        self.weights.iter().map(Matrix::rows).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Syndromes `<M, R>` for all measurements, diagonals ascending.
    pub fn measure(&self, f: &FieldCtx, m: &DenseTensor) -> Result<Vec<Fel>> {
        if m.dims() != [self.n, self.m] {
            return Err(Error::shape(format!("{}x{}", self.n, self.m), format!("{:?}", m.dims())));
        }
        let mut out = Vec::with_capacity(self.len());
        for (k, w) in self.weights.iter().enumerate() {
            let slots: Vec<Fel> =
                diagonal_rows(self.n, self.m, k).map(|i| m.data()[i * self.m + k - i]).collect();
            out.extend(crate::linalg::mat_vec(f, w, &slots));
        }
        Ok(out)
    }

    fn split<'a>(&self, ys: &'a [Fel]) -> Result<Vec<&'a [Fel]>> {
        if ys.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: ys.len() });
        }
        let mut out = Vec::with_capacity(self.weights.len());
        let mut pos = 0;
        for w in &self.weights {
            out.push(&ys[pos..pos + w.rows()]);
            pos += w.rows();
        }
        Ok(out)
    }
}

/// Sparse recovery of one diagonal from its (corrected) syndromes and advice slots.
pub trait AdviceSparseRecovery {
    fn recover(&self, f: &FieldCtx, k: usize, y: &[Fel], advice: &[usize]) -> Result<Vec<Fel>>;
}

/// Reconstructs a rank `<= r` matrix diagonal by diagonal.
pub fn low_rank_recovery(
    f: &FieldCtx,
    r: usize,
    meas: &DiagonalMeasurements,
    syndromes: &[Fel],
    oracle: &dyn AdviceSparseRecovery,
    mut observer: Option<&mut dyn RecoveryObserver>,
) -> Result<DenseTensor> {
    let (n, m) = meas.dims();
    let per_k = meas.split(syndromes)?;
    let mut st = EchelonState::new(n, m);
    let mut in_support = vec![false; n];
    for (k, &ys) in per_k.iter().enumerate() {
        st.k = k;
        let rows = diagonal_rows(n, m, k);
        let lo = rows.start;
        // correction A^(k) = ((L - I) N)^(k)
        let a: Vec<Fel> = rows
            .clone()
            .map(|i| {
                st.l_support.iter().filter(|&&l| l < i).fold(Fel::ZERO, |acc, &l| {
                    f.mul_add(st.l[(i, l)], st.n_mat[(l, k - i)], acc)
                })
            })
            .collect();
        let lne = st.lne();
        if lne.len() > r {
            return Err(Error::RankPromiseViolated {
                k,
                detail: format!("{} leading entries exceed rank {r}", lne.len()),
            });
        }
        let mut advice_cols: Vec<usize> = Vec::with_capacity(2 * lne.len());
        for &(i, j) in &lne {
            advice_cols.push(k - i);
            advice_cols.push(j);
        }
        advice_cols.sort_unstable();
        advice_cols.dedup();
        advice_cols.retain(|&c| c < m && k - c < n && k >= c);
        let advice: Vec<usize> = advice_cols.iter().map(|&c| (k - c) - lo).collect();
        let w = meas.weights(k);
        let y: Vec<Fel> = crate::linalg::mat_vec(f, w, &a)
            .into_iter()
            .zip(ys)
            .map(|(x, &s)| f.add(x, s))
            .collect();
        if let Some(obs) = observer.as_deref_mut() {
            obs.before_oracle(&st, &advice_cols);
        }
        let diag = oracle.recover(f, k, &y, &advice).map_err(|e| match e {
            Error::AdviceTooLarge { advice, budget } => Error::RankPromiseViolated {
                k,
                detail: format!("advice {advice} exceeds budget {budget}"),
            },
            other => other,
        })?;
        for (t, i) in rows.clone().enumerate() {
            st.p[(i, k - i)] = diag[t];
            st.n_mat[(i, k - i)] = f.sub(diag[t], a[t]);
        }
        let ops = echelon_ops(f, &st.p, &lne, k);
        for op in &ops {
            st.l.add_row_multiple(f, op.target, op.source, op.factor);
            st.p[(op.target, k - op.target)] = Fel::ZERO;
            if !in_support[op.source] {
                in_support[op.source] = true;
                st.l_support.push(op.source);
            }
        }
        st.ops.extend(ops);
        for i in rows {
            if st.lne[i].is_none() && !st.p[(i, k - i)].is_zero() {
                st.lne[i] = Some(k - i);
            }
        }
        if let Some(obs) = observer.as_deref_mut() {
            obs.after_iteration(&st);
        }
    }
    // the last diagonal can still add leading entries
    let lead = st.lne.iter().flatten().count();
    if lead > r {
        return Err(Error::RankPromiseViolated {
            k: n + m - 2,
            detail: format!("{lead} leading entries exceed rank {r}"),
        });
    }
    Ok(DenseTensor::from_matrix(f, &st.n_mat))
}

/// The `D'_{2r}` family for an `n x m` matrix with distinguished element `g`:
/// diagonal `k` carries `min(2r, k+1, n+m-k-1)` rows `g^{l j}`.
#[derive(Clone, Debug)]
pub struct DiagonalDecoder {
    ctx: FieldCtx,
    r: usize,
    meas: DiagonalMeasurements,
    points: Vec<Vec<Fel>>,
}

impl DiagonalDecoder {
    pub fn new(ctx: &FieldCtx, n: usize, m: usize, r: usize) -> Result<Self> {
        let g = ctx.generator_for(m as u128)?;
        Self::with_generator(ctx, g, n, m, r)
    }

    /// `g` must have order at least `m`.
    pub fn with_generator(ctx: &FieldCtx, g: Fel, n: usize, m: usize, r: usize) -> Result<Self> {
        if r == 0 || n == 0 || m == 0 {
            return Err(Error::param("need n, m, r >= 1"));
        }
        let g_pows = powers(ctx, g, m);
        let mut weights = Vec::with_capacity(n + m - 1);
        let mut points = Vec::with_capacity(n + m - 1);
        for k in 0..n + m - 1 {
            let pts: Vec<Fel> = diagonal_rows(n, m, k).map(|i| g_pows[k - i]).collect();
            let count = d_prime_count(2 * r, n, m, k);
            let mut w = Matrix::zeros(count, pts.len());
            for (t, &x) in pts.iter().enumerate() {
                for (l, v) in powers(ctx, x, count).into_iter().enumerate() {
                    w[(l, t)] = v;
                }
            }
            weights.push(w);
            points.push(pts);
        }
        Ok(DiagonalDecoder {
            ctx: ctx.clone(),
            r,
            meas: DiagonalMeasurements::new(n, m, weights)?,
            points,
        })
    }

    pub fn measurements(&self) -> &DiagonalMeasurements {
        &self.meas
    }

    pub fn len(&self) -> usize {
        self.meas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meas.is_empty()
    }

    pub fn measure(&self, m: &DenseTensor) -> Result<Vec<Fel>> {
        self.meas.measure(&self.ctx, m)
    }

    pub fn recover(&self, syndromes: &[Fel]) -> Result<DenseTensor> {
        low_rank_recovery(&self.ctx, self.r, &self.meas, syndromes, self, None)
    }

    pub fn recover_observed(
        &self,
        syndromes: &[Fel],
        observer: &mut dyn RecoveryObserver,
    ) -> Result<DenseTensor> {
        low_rank_recovery(&self.ctx, self.r, &self.meas, syndromes, self, Some(observer))
    }
}

impl AdviceSparseRecovery for DiagonalDecoder {
    fn recover(&self, f: &FieldCtx, k: usize, y: &[Fel], advice: &[usize]) -> Result<Vec<Fel>> {
        let pts = &self.points[k];
        if y.len() >= pts.len() {
            // enough rows to solve the whole diagonal
            let all: Vec<usize> = (0..pts.len()).collect();
            return solve_on_support(f, pts, &all, y);
        }
        pronys_method(f, y.len() / 2, advice, y, pts)
    }
}

/// `<M, D'_{2r}>`, diagonals ascending and weights ascending within a diagonal.
pub fn measure_d(ctx: &FieldCtx, m: &DenseTensor, r: usize) -> Result<Vec<Fel>> {
    let (n, c) = matrix_dims(m)?;
    DiagonalDecoder::new(ctx, n, c, r)?.measure(m)
}

/// Inverse of [`measure_d`] for matrices of rank at most `r`.
pub fn recover_from_d(ctx: &FieldCtx, n: usize, m: usize, r: usize, syndromes: &[Fel]) -> Result<DenseTensor> {
    DiagonalDecoder::new(ctx, n, m, r)?.recover(syndromes)
}

fn matrix_dims(m: &DenseTensor) -> Result<(usize, usize)> {
    match m.dims() {
        [n, c] => Ok((*n, *c)),
        other => Err(Error::shape("a matrix", format!("{other:?}"))),
    }
}

/// Converts `<M, B'_{2r}>` into `<M, D'_{2r}>` by staircase interpolation.
#[derive(Clone, Debug)]
pub struct BPrimeConverter {
    ctx: FieldCtx,
    n: usize,
    m: usize,
    big_r: usize,
    g: Fel,
    alphas: Vec<Fel>,
    alpha_pows: Vec<Vec<Fel>>,
    alpha_inv: Vec<Fel>,
    interp: Interpolator,
    g_pows: Vec<Fel>,
}

impl BPrimeConverter {
    pub fn new(ctx: &FieldCtx, n: usize, m: usize, r: usize) -> Result<Self> {
        if r == 0 || n == 0 || m == 0 {
            return Err(Error::param("need n, m, r >= 1"));
        }
        let g = ctx.generator_for(m as u128)?;
        let big_n = n + m - 1;
        let alphas = ctx.nonzero_elements(big_n)?;
        let alpha_pows = alphas.iter().map(|&a| powers(ctx, a, big_n)).collect();
        let alpha_inv = alphas.iter().map(|&a| ctx.inv(a).expect("nonzero")).collect();
        let interp = Interpolator::new(ctx, &alphas)?;
        Ok(BPrimeConverter {
            ctx: ctx.clone(),
            n,
            m,
            big_r: 2 * r,
            g,
            alphas,
            alpha_pows,
            alpha_inv,
            interp,
            g_pows: powers(ctx, g, m),
        })
    }

    fn evals_for(&self, l: usize) -> usize {
        (self.n + self.m - 1).saturating_sub(2 * l)
    }

    /// Number of `B'_{2r}` measurements.
    pub fn len(&self) -> usize {
        (0..self.big_r).map(|l| self.evals_for(l)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `f^_M(alpha_k, g^l alpha_k)` for `l < 2r`, `k <= n+m-2-2l`, l outer.
    pub fn measure(&self, mat: &DenseTensor) -> Result<Vec<Fel>> {
        let f = &self.ctx;
        if mat.dims() != [self.n, self.m] {
            return Err(Error::shape(format!("{}x{}", self.n, self.m), format!("{:?}", mat.dims())));
        }
        let mut out = Vec::with_capacity(self.len());
        for l in 0..self.big_r {
            let gl = f.pow(self.g, l as u64);
            for k in 0..self.evals_for(l) {
                let a = self.alphas[k];
                out.push(crate::tensor::eval_fhat_in(f, mat, &[a, f.mul(gl, a)])?);
            }
        }
        Ok(out)
    }

    /// D'-ordered syndromes from B'-ordered ones.
    pub fn convert(&self, b_syndromes: &[Fel]) -> Result<Vec<Fel>> {
        let f = &self.ctx;
        if b_syndromes.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: b_syndromes.len() });
        }
        let (n, m, big_r) = (self.n, self.m, self.big_r);
        let big_n = n + m - 1;
        let count = |t: usize| d_prime_count(big_r, n, m, t);
        // d[t][l] = <M, D_{t,l}> once known
        let mut d: Vec<Vec<Fel>> = (0..big_n).map(|t| Vec::with_capacity(count(t))).collect();
        let mut diag_vals: Vec<Option<Vec<Fel>>> = vec![None; big_n];
        let mut offset = 0;
        for l in 0..big_r {
            let evals = self.evals_for(l);
            if evals == 0 {
                break;
            }
            let ys = &b_syndromes[offset..offset + evals];
            offset += evals;
            let gl = f.pow(self.g, l as u64);
            let fringe: Vec<usize> = (0..l.min(big_n)).chain(big_n - l.min(big_n)..big_n).collect();
            let mut fringe_coeffs = Vec::with_capacity(fringe.len());
            for &t in &fringe {
                if diag_vals[t].is_none() {
                    diag_vals[t] = Some(self.solve_diagonal(t, &d[t])?);
                }
                let vals = diag_vals[t].as_ref().expect("just filled");
                let c = diagonal_rows(n, m, t).zip(vals).fold(Fel::ZERO, |acc, (i, &v)| {
                    f.mul_add(f.pow(gl, (t - i) as u64), v, acc)
                });
                fringe_coeffs.push(c);
            }
            let h: Vec<Fel> = (0..evals)
                .map(|k| {
                    let pw = &self.alpha_pows[k];
                    let known = fringe
                        .iter()
                        .zip(&fringe_coeffs)
                        .fold(Fel::ZERO, |acc, (&t, &c)| f.mul_add(c, pw[t], acc));
                    let shifted = f.pow(self.alpha_inv[k], l as u64);
                    f.mul(f.sub(ys[k], known), shifted)
                })
                .collect();
            let coeffs = self.interp.interpolate(f, &h);
            for (u, c) in coeffs.into_iter().enumerate() {
                let t = l + u;
                debug_assert!(l < count(t));
                d[t].push(c);
            }
        }
        let mut out = Vec::new();
        for (t, row) in d.into_iter().enumerate() {
            if row.len() != count(t) {
                return Err(Error::InconsistentEvaluations);
            }
            out.extend(row);
        }
        Ok(out)
    }

    /// Full diagonal `t` from its `min(t+1, n+m-1-t)` leading syndromes.
    fn solve_diagonal(&self, t: usize, ys: &[Fel]) -> Result<Vec<Fel>> {
        let rows = diagonal_rows(self.n, self.m, t);
        let pts: Vec<Fel> = rows.clone().map(|i| self.g_pows[t - i]).collect();
        let all: Vec<usize> = (0..pts.len()).collect();
        solve_on_support(&self.ctx, &pts, &all, ys).map_err(|_| Error::InconsistentEvaluations)
    }
}

/// `<M, B'_{2r}>` in family order.
pub fn measure_b_prime(ctx: &FieldCtx, m: &DenseTensor, r: usize) -> Result<Vec<Fel>> {
    let (n, c) = matrix_dims(m)?;
    BPrimeConverter::new(ctx, n, c, r)?.measure(m)
}

pub fn convert_b_to_d(ctx: &FieldCtx, n: usize, m: usize, r: usize, b_syndromes: &[Fel]) -> Result<Vec<Fel>> {
    BPrimeConverter::new(ctx, n, m, r)?.convert(b_syndromes)
}
