//! Univariate helpers: Horner evaluation and Newton interpolation on a fixed node list.

use crate::error::{Error, Result};
use crate::field::{Fel, FieldCtx};

/// Evaluate `sum c_i x^i`.
pub fn eval(f: &FieldCtx, coeffs: &[Fel], x: Fel) -> Fel {
    coeffs.iter().rev().fold(Fel::ZERO, |acc, &c| f.mul_add(acc, x, c))
}

/// `(1, x, x^2, ..., x^{n-1})`
pub fn powers(f: &FieldCtx, x: Fel, n: usize) -> Vec<Fel> {
    let mut out = Vec::with_capacity(n);
    let mut cur = Fel::ONE;
    for _ in 0..n {
        out.push(cur);
        cur = f.mul(cur, x);
    }
    out
}

/// Newton interpolation on prefixes of a fixed node list. Inverse node
/// differences are cached so every interpolation costs O(K^2).
#[derive(Clone, Debug)]
pub struct Interpolator {
    nodes: Vec<Fel>,
    // inv[i][j] = 1 / (x_i - x_j) for j < i
    inv: Vec<Vec<Fel>>,
}

impl Interpolator {
    pub fn new(f: &FieldCtx, nodes: &[Fel]) -> Result<Self> {
        let mut inv = Vec::with_capacity(nodes.len());
        for (i, &xi) in nodes.iter().enumerate() {
            let row: Option<Vec<Fel>> =
                nodes[..i].iter().map(|&xj| f.inv(f.sub(xi, xj))).collect();
            inv.push(row.ok_or(Error::DuplicatePoints)?);
        }
        Ok(Interpolator { nodes: nodes.to_vec(), inv })
    }

    pub fn nodes(&self) -> &[Fel] {
        &self.nodes
    }

    /// Coefficients of the unique polynomial of degree < K through
    /// `(x_i, values[i])` for the first K = `values.len()` nodes.
    pub fn interpolate(&self, f: &FieldCtx, values: &[Fel]) -> Vec<Fel> {
        let k = values.len();
        assert!(k <= self.nodes.len(), "more values than nodes");
        if k == 0 {
            return Vec::new();
        }
        let mut c = values.to_vec();
        for j in 1..k {
            for i in (j..k).rev() {
                c[i] = f.mul(f.sub(c[i], c[i - 1]), self.inv[i][i - j]);
            }
        }
        let mut poly = vec![Fel::ZERO; k];
        poly[0] = c[k - 1];
        let mut deg = 0;
        for i in (0..k - 1).rev() {
            // poly <- poly * (x - x_i) + c_i
            let xi = self.nodes[i];
            deg += 1;
            for t in (1..=deg).rev() {
                poly[t] = f.sub(poly[t - 1], f.mul(poly[t], xi));
            }
            poly[0] = f.sub(c[i], f.mul(poly[0], xi));
        }
        poly
    }
}
