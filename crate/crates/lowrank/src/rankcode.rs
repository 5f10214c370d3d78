//! Rank-metric codes: the nullspace of a recovery family, with systematic
//! encoding and syndrome decoding of up to `r` rank errors.

use crate::error::{Error, Result};
use crate::field::{Fel, FieldCtx};
use crate::hitting::{build_family, simulate_improper, Family, MeasurementSet};
use crate::linalg::{self, Matrix};
use crate::lrr::{BPrimeConverter, DiagonalDecoder, TensorPlan};
use crate::tensor::DenseTensor;

#[derive(Clone, Debug)]
enum Decoder {
    Diagonal(DiagonalDecoder),
    BPrime(BPrimeConverter, DiagonalDecoder),
    Tensor(TensorPlan),
}

/// A linear code on `n_1 x ... x n_d` tensors whose parity checks are a
/// `2r` recovery family, so any error of rank at most `r` is correctable.
#[derive(Clone, Debug)]
pub struct RankMetricCode {
    ctx: FieldCtx,
    dims: Vec<usize>,
    r: usize,
    family: Family,
    parity: MeasurementSet,
    basis: Vec<Vec<Fel>>,
    message_positions: Vec<usize>,
    decoder: Decoder,
}

/// Result of a successful decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub codeword: DenseTensor,
    pub error: DenseTensor,
}

/// Outcome of [`min_distance_brute`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinDistance {
    /// Exact minimum rank distance (matrix codes).
    Exact(usize),
    /// Minimum flattening rank; a lower bound on tensor-rank distance.
    LowerBound(usize),
    /// The code has no nonzero codewords.
    Undefined,
}

fn make_decoder(ext: &FieldCtx, family: Family, dims: &[usize], r: usize) -> Result<Decoder> {
    match (family, dims) {
        (Family::Dprime, &[n, m]) => Ok(Decoder::Diagonal(DiagonalDecoder::new(ext, n, m, r)?)),
        (Family::Bprime, &[n, m]) => Ok(Decoder::BPrime(
            BPrimeConverter::new(ext, n, m, r)?,
            DiagonalDecoder::new(ext, n, m, r)?,
        )),
        (Family::TensorB, _) => Ok(Decoder::Tensor(TensorPlan::new(ext, dims.len(), dims[0], r)?)),
        _ => Err(Error::param(format!("no decoder for family {family} with dims {dims:?}"))),
    }
}

/// Code whose parity family is `family` with parameter `2r`, built over `ctx`.
pub fn build_code(ctx: &FieldCtx, dims: &[usize], r: usize, family: Family) -> Result<RankMetricCode> {
    if r == 0 {
        return Err(Error::param("rank-metric codes need r >= 1"));
    }
    let parity = build_family(ctx, family, 2 * r, dims)?;
    let decoder = make_decoder(ctx, family, dims, r)?;
    Ok(finish(ctx, dims, r, family, parity, decoder))
}

/// Code over the prime field `base` whose parity checks are the coordinates of
/// the family built over the degree-`ext_degree` extension.
pub fn build_code_simulated(
    base: &FieldCtx,
    ext_degree: usize,
    dims: &[usize],
    r: usize,
    family: Family,
) -> Result<RankMetricCode> {
    if r == 0 {
        return Err(Error::param("rank-metric codes need r >= 1"));
    }
    let ext = base.extension(ext_degree)?;
    let parity = simulate_improper(&build_family(&ext, family, 2 * r, dims)?)?;
    let decoder = make_decoder(&ext, family, dims, r)?;
    Ok(finish(base, dims, r, family, parity, decoder))
}

fn finish(
    ctx: &FieldCtx,
    dims: &[usize],
    r: usize,
    family: Family,
    parity: MeasurementSet,
    decoder: Decoder,
) -> RankMetricCode {
    let stacked = parity.stacked();
    let basis = linalg::nullspace(ctx, &stacked);
    let mut reduced = stacked;
    let pivots = linalg::rref(ctx, &mut reduced);
    let message_positions = (0..reduced.cols()).filter(|c| !pivots.contains(c)).collect();
    RankMetricCode {
        ctx: ctx.clone(),
        dims: dims.to_vec(),
        r,
        family,
        parity,
        basis,
        message_positions,
        decoder,
    }
}

impl RankMetricCode {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Designed error-correction radius.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn parity(&self) -> &MeasurementSet {
        &self.parity
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Flat indices that carry the message symbols in a codeword.
    pub fn message_positions(&self) -> &[usize] {
        &self.message_positions
    }

    pub fn basis(&self) -> Vec<DenseTensor> {
        self.basis
            .iter()
            .map(|v| DenseTensor::from_vec(&self.ctx, &self.dims, v.clone()).expect("basis length"))
            .collect()
    }

    pub fn encode(&self, message: &[Fel]) -> Result<DenseTensor> {
        if message.len() != self.dimension() {
            return Err(Error::LengthMismatch { expected: self.dimension(), found: message.len() });
        }
        let f = &self.ctx;
        let mut out = vec![Fel::ZERO; self.dims.iter().product()];
        for (&c, v) in message.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(v) {
                *o = f.mul_add(c, x, *o);
            }
        }
        DenseTensor::from_vec(f, &self.dims, out)
    }

    /// Reads the message back from a codeword.
    pub fn extract_message(&self, codeword: &DenseTensor) -> Result<Vec<Fel>> {
        self.check_shape(codeword)?;
        Ok(self.message_positions.iter().map(|&i| codeword.data()[i]).collect())
    }

    pub fn syndrome(&self, word: &DenseTensor) -> Result<Vec<Fel>> {
        self.check_shape(word)?;
        self.parity.syndromes(word)
    }

    pub fn is_codeword(&self, word: &DenseTensor) -> Result<bool> {
        Ok(self.syndrome(word)?.iter().all(|v| v.is_zero()))
    }

    fn check_shape(&self, word: &DenseTensor) -> Result<()> {
        if word.dims() != self.dims.as_slice() {
            return Err(Error::shape(format!("{:?}", self.dims), format!("{:?}", word.dims())));
        }
        if word.ctx() != &self.ctx {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Splits `received` into a codeword and an error of rank at most `r`.
    pub fn decode(&self, received: &DenseTensor) -> Result<Decoded> {
        let s = self.syndrome(received)?;
        let lifted = match self.parity.simulation() {
            Some(sim) => sim.lift_syndromes(&s)?,
            None => s.clone(),
        };
        let recovered = match &self.decoder {
            Decoder::Diagonal(d) => d.recover(&lifted),
            Decoder::BPrime(conv, d) => conv.convert(&lifted).and_then(|ys| d.recover(&ys)),
            Decoder::Tensor(plan) => plan.recover(&lifted),
        }
        .map_err(|e| {
            if e.is_promise_violation() {
                Error::DecodeFailure(e.to_string())
            } else {
                e
            }
        })?;
        let error = if recovered.ctx() == &self.ctx {
            recovered
        } else {
            recovered
                .restrict(&self.ctx)
                .map_err(|_| Error::DecodeFailure("error pattern leaves the base field".into()))?
        };
        if self.parity.syndromes(&error)? != s {
            return Err(Error::DecodeFailure("recovered error does not match the syndrome".into()));
        }
        if self.dims.len() == 2 && crate::tensor::matrix_rank(&error)? > self.r {
            return Err(Error::DecodeFailure(format!("error rank exceeds {}", self.r)));
        }
        let codeword = received.sub(&error)?;
        Ok(Decoded { codeword, error })
    }
}

/// Largest rank over all single-axis flattenings.
pub fn flattening_rank(t: &DenseTensor) -> usize {
    let f = t.ctx();
    let dims = t.dims();
    let total = t.len();
    (0..dims.len())
        .map(|a| {
            let mut perm: Vec<usize> = (0..dims.len()).collect();
            perm.remove(a);
            perm.insert(0, a);
            let p = t.permute_axes(&perm).expect("valid permutation");
            linalg::rank(f, &Matrix::from_vec(dims[a], total / dims[a], p.data().to_vec()))
        })
        .max()
        .unwrap_or(0)
}

/// Minimum distance by enumerating all `q^dim - 1` nonzero codewords;
/// `TooLarge` when that exceeds `cap`.
pub fn min_distance_brute(code: &RankMetricCode, cap: u64) -> Result<MinDistance> {
    let dim = code.dimension();
    if dim == 0 {
        return Ok(MinDistance::Undefined);
    }
    let f = code.ctx();
    let q = f.order();
    let total = q
        .checked_pow(dim as u32)
        .filter(|&t| t - 1 <= cap)
        .ok_or_else(|| Error::TooLarge(format!("{q}^{dim} codewords")))?;
    let mut best = usize::MAX;
    for idx in 1..total {
        let mut rest = idx;
        let msg: Vec<Fel> = (0..dim)
            .map(|_| {
                let e = f.nth_element(rest % q);
                rest /= q;
                e
            })
            .collect();
        let w = code.encode(&msg)?;
        let rk = if code.dims().len() == 2 {
            crate::tensor::matrix_rank(&w)?
        } else {
            flattening_rank(&w)
        };
        best = best.min(rk);
    }
    Ok(if code.dims().len() == 2 {
        MinDistance::Exact(best)
    } else {
        MinDistance::LowerBound(best)
    })
}
