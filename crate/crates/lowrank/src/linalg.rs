//! Exact Gaussian elimination over a [`FieldCtx`].

use std::ops::{Index, IndexMut};

use crate::field::{Fel, FieldCtx};

/// Row-major matrix of field elements. The field is passed to each operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fel>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Fel::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Fel::ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Fel>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Fel>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Fel] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Fel> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Fel] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Fel] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Submatrix on the given columns.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (c, &j) in cols.iter().enumerate() {
                out[(i, c)] = self[(i, j)];
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row[target] += c * row[source]
    pub fn add_row_multiple(&mut self, f: &FieldCtx, target: usize, source: usize, c: Fel) {
        if c.is_zero() {
            return;
        }
        let cols = self.cols;
        let (t0, s0) = (target * cols, source * cols);
        for j in 0..cols {
            let s = self.data[s0 + j];
            if !s.is_zero() {
                self.data[t0 + j] = f.mul_add(c, s, self.data[t0 + j]);
            }
        }
    }

    fn scale_row(&mut self, f: &FieldCtx, i: usize, c: Fel) {
        for x in self.row_mut(i) {
            *x = f.mul(*x, c);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Fel;
    fn index(&self, (i, j): (usize, usize)) -> &Fel {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fel {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn mat_mul(f: &FieldCtx, a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols, b.rows, "inner dimensions");
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for l in 0..a.cols {
            let x = a[(i, l)];
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                out[(i, j)] = f.mul_add(x, b[(l, j)], out[(i, j)]);
            }
        }
    }
    out
}

pub fn mat_add(f: &FieldCtx, a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    let data = a.data.iter().zip(&b.data).map(|(&x, &y)| f.add(x, y)).collect();
    Matrix { rows: a.rows, cols: a.cols, data }
}

pub fn mat_vec(f: &FieldCtx, a: &Matrix, v: &[Fel]) -> Vec<Fel> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| a.row(i).iter().zip(v).fold(Fel::ZERO, |acc, (&x, &y)| f.mul_add(x, y, acc)))
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
/// Pivots are taken from the first nonzero entry scanning downward.
pub fn rref(f: &FieldCtx, m: &mut Matrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
            continue;
        };
        m.swap_rows(row, pr);
        let inv = f.inv(m[(row, col)]).expect("nonzero pivot");
        m.scale_row(f, row, inv);
        for i in 0..m.rows {
            if i != row {
                let c = m[(i, col)];
                if !c.is_zero() {
                    m.add_row_multiple(f, i, row, f.neg(c));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Row rank by forward elimination.
pub fn rank(f: &FieldCtx, m: &Matrix) -> usize {
    let mut a = m.clone();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(pr) = (row..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, pr);
        let inv = f.neg(f.inv(a[(row, col)]).expect("nonzero pivot"));
        for i in row + 1..a.rows {
            let c = a[(i, col)];
            if !c.is_zero() {
                a.add_row_multiple(f, i, row, f.mul(c, inv));
            }
        }
        row += 1;
    }
    row
}

/// Basis of the right nullspace. Vector `t` sets the `t`-th free column (in index
/// order) to one and the other free columns to zero.
pub fn nullspace(f: &FieldCtx, m: &Matrix) -> Vec<Vec<Fel>> {
    let mut a = m.clone();
    let pivots = rref(f, &mut a);
    let mut is_pivot = vec![false; a.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..a.cols).filter(|&j| !is_pivot[j]).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Fel::ZERO; a.cols];
            v[fc] = Fel::ONE;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(a[(r, fc)]);
            }
            v
        })
        .collect()
}

/// Some solution of `m x = rhs` with free variables zero, or `None` if inconsistent.
pub fn solve(f: &FieldCtx, m: &Matrix, rhs: &[Fel]) -> Option<Vec<Fel>> {
    assert_eq!(m.rows, rhs.len());
    let mut aug = Matrix::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        aug.row_mut(i)[..m.cols].copy_from_slice(m.row(i));
        aug[(i, m.cols)] = rhs[i];
    }
    let pivots = rref(f, &mut aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![Fel::ZERO; m.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[(r, m.cols)];
    }
    Some(x)
}

pub fn det(f: &FieldCtx, m: &Matrix) -> Fel {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let mut a = m.clone();
    let mut d = Fel::ONE;
    for col in 0..a.cols {
        let Some(pr) = (col..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            return Fel::ZERO;
        };
        if pr != col {
            a.swap_rows(col, pr);
            d = f.neg(d);
        }
        let piv = a[(col, col)];
        d = f.mul(d, piv);
        let inv = f.neg(f.inv(piv).expect("nonzero pivot"));
        for i in col + 1..a.rows {
            let c = a[(i, col)];
            if !c.is_zero() {
                a.add_row_multiple(f, i, col, f.mul(c, inv));
            }
        }
    }
    d
}
