//! Dual Reed-Solomon measurements and Prony's method with an advice set.

use crate::error::{Error, Result};
use crate::field::{Fel, FieldCtx};
use crate::linalg::{self, Matrix};
use crate::poly::{eval, powers};

/// Rows `V_{i,j} = g_j^i` for `i < 2s`.
#[derive(Clone, Debug)]
pub struct DualRsMeasurements {
    points: Vec<Fel>,
    s: usize,
    v: Matrix,
}

impl DualRsMeasurements {
    pub fn points(&self) -> &[Fel] {
        &self.points
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn matrix(&self) -> &Matrix {
        &self.v
    }

    /// `y = V x`
    pub fn measure(&self, f: &FieldCtx, x: &[Fel]) -> Result<Vec<Fel>> {
        if x.len() != self.points.len() {
            return Err(Error::LengthMismatch { expected: self.points.len(), found: x.len() });
        }
        Ok(linalg::mat_vec(f, &self.v, x))
    }

    pub fn recover(&self, f: &FieldCtx, advice: &[usize], y: &[Fel]) -> Result<Vec<Fel>> {
        pronys_method(f, self.s, advice, y, &self.points)
    }
}

fn check_distinct(points: &[Fel]) -> Result<()> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints);
    }
    Ok(())
}

pub fn dual_rs(f: &FieldCtx, points: &[Fel], s: usize) -> Result<DualRsMeasurements> {
    check_distinct(points)?;
    let n = points.len();
    let mut v = Matrix::zeros(2 * s, n);
    for (j, &g) in points.iter().enumerate() {
        for (i, p) in powers(f, g, 2 * s).into_iter().enumerate() {
            v[(i, j)] = p;
        }
    }
    Ok(DualRsMeasurements { points: points.to_vec(), s, v })
}

/// `1, g, ..., g^{n-1}` for the distinguished element of order at least `n`.
pub fn default_points(f: &FieldCtx, n: usize) -> Result<Vec<Fel>> {
    let g = f.generator_for(n as u128)?;
    Ok(powers(f, g, n))
}

/// Recovers `x` from `y = V x` given advice `S`, when `x` has at most
/// `s - |S|/2` nonzeros outside `S`.
pub fn pronys_method(
    f: &FieldCtx,
    s: usize,
    advice: &[usize],
    y: &[Fel],
    points: &[Fel],
) -> Result<Vec<Fel>> {
    let n = points.len();
    if y.len() != 2 * s {
        return Err(Error::LengthMismatch { expected: 2 * s, found: y.len() });
    }
    if advice.len() > 2 * s {
        return Err(Error::AdviceTooLarge { advice: advice.len(), budget: 2 * s });
    }
    let mut set: Vec<usize> = advice.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&bad) = set.iter().find(|&&k| k >= n) {
        return Err(Error::param(format!("advice index {bad} outside 0..{n}")));
    }
    let mut pts = points.to_vec();
    if set.len() % 2 == 1 {
        match (0..n).find(|k| set.binary_search(k).is_err()) {
            Some(k) => {
                set.push(k);
                set.sort_unstable();
            }
            None => {
                // every index is advised: pretend the vector has one more coordinate
                let spare = (0..f.order())
                    .map(|i| f.nth_element(i))
                    .find(|e| !points.contains(e))
                    .ok_or_else(|| Error::FieldTooSmall("no spare evaluation point".into()))?;
                pts.push(spare);
                set.push(n);
            }
        }
    }
    let t = set.len() / 2;
    let size = s + t;
    let mut a = Matrix::zeros(size, size + 1);
    for i in 0..size {
        for j in 0..=size {
            a[(i, j)] = if i < set.len() {
                f.pow(pts[set[i]], j as u64)
            } else {
                y[i - set.len() + j]
            };
        }
    }
    let r = (0..=size)
        .rev()
        .find(|&r| {
            r == 0 || !linalg::det(f, &Matrix::from_rows(&leading(&a, r, r))).is_zero()
        })
        .expect("r = 0 always qualifies");
    // locator p(x) = sum c_i x^i with c_r = 1
    let mut c = vec![Fel::ZERO; r + 1];
    c[r] = Fel::ONE;
    if r > 0 {
        let minor = Matrix::from_rows(&leading(&a, r, r));
        let rhs: Vec<Fel> = (0..r).map(|i| f.neg(a[(i, r)])).collect();
        let sol = linalg::solve(f, &minor, &rhs).expect("invertible leading minor");
        c[..r].copy_from_slice(&sol);
    }
    let support: Vec<usize> = (0..n).filter(|&k| eval(f, &c, points[k]).is_zero()).collect();
    solve_on_support(f, points, &support, y)
}

fn leading(a: &Matrix, rows: usize, cols: usize) -> Vec<Vec<Fel>> {
    (0..rows).map(|i| a.row(i)[..cols].to_vec()).collect()
}

/// Solves `sum_{k in T} z_k g_k^i = y_i` for all `i < |y|` and scatters `z` into a
/// length-n vector. Fails unless the solution exists and is unique.
pub fn solve_on_support(
    f: &FieldCtx,
    points: &[Fel],
    support: &[usize],
    y: &[Fel],
) -> Result<Vec<Fel>> {
    let mut x = vec![Fel::ZERO; points.len()];
    if support.is_empty() {
        return if y.iter().all(|v| v.is_zero()) { Ok(x) } else { Err(Error::InconsistentSyndrome) };
    }
    let cols = support.len();
    let mut aug = Matrix::zeros(y.len(), cols + 1);
    for (c, &k) in support.iter().enumerate() {
        for (i, p) in powers(f, points[k], y.len()).into_iter().enumerate() {
            aug[(i, c)] = p;
        }
    }
    for (i, &v) in y.iter().enumerate() {
        aug[(i, cols)] = v;
    }
    let pivots = linalg::rref(f, &mut aug);
    if pivots.last() == Some(&cols) || pivots.len() < cols {
        return Err(Error::InconsistentSyndrome);
    }
    for (row, &k) in support.iter().enumerate() {
        x[k] = aug[(row, cols)];
    }
    Ok(x)
}
