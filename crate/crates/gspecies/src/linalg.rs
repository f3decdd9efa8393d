//! Dense exact linear algebra over the rationals.
//!
//! Maps act on row vectors: a matrix of shape `m x n` sends `x` (length `m`)
//! to `x * M` (length `n`). Subspaces are stored as matrices whose rows form a
//! basis.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `p` or `p/q`.
pub fn q_to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_parse(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|c| q_to_string(self.get(r, c))).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        Matrix { rows: r, cols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Q> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn row_slice(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn add_assign_scaled(&mut self, other: &Matrix, s: &Q) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        if s.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += b * s;
            }
        }
    }

    pub fn hstack(blocks: &[&Matrix], rows: usize) -> Matrix {
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            for r in 0..rows {
                for c in 0..b.cols {
                    out.set(r, off + c, b.get(r, c).clone());
                }
            }
            off += b.cols;
        }
        out
    }

    pub fn vstack(blocks: &[&Matrix], cols: usize) -> Matrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for r in r0..r1 {
            for c in c0..c1 {
                out.set(r - r0, c - c0, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m.get(row, col).recip();
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let v = m.get(r, c) - &f * m.get(row, c);
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis (rref rows) of the row space.
    pub fn row_basis(&self) -> Matrix {
        let (r, p) = self.rref();
        r.block(0, p.len(), 0, self.cols)
    }

    /// Basis (as rows) of `{v : M v^T = 0}`.
    pub fn right_kernel(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            out.set(i, f, Q::one());
            for (pr, &pc) in pivots.iter().enumerate() {
                out.set(i, pc, -r.get(pr, f).clone());
            }
        }
        out
    }

    /// Basis (as rows) of `{x : x M = 0}`, the kernel of the map.
    pub fn kernel(&self) -> Matrix {
        self.transpose().right_kernel()
    }

    /// Basis of the image of the map, i.e. the row space.
    pub fn image(&self) -> Matrix {
        self.row_basis()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::hstack(&[self, &Matrix::identity(n)], n);
        let (r, p) = aug.rref();
        if p.len() < n || (n > 0 && p[n - 1] != n - 1) {
            return None;
        }
        Some(r.block(0, n, n, 2 * n))
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Q::zero();
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det *= &piv;
            for r in col + 1..n {
                let f = m.get(r, col) / &piv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m.get(r, c) - &f * m.get(col, c);
                    m.set(r, c, v);
                }
            }
        }
        det
    }
}

/// Dimension of the span of the rows of `a` and `b` together.
pub fn sum_dim(a: &Matrix, b: &Matrix) -> usize {
    Matrix::vstack(&[a, b], a.cols()).rank()
}

/// Basis of the intersection of two row spaces inside the same ambient space.
pub fn intersection(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.cols();
    if a.rows() == 0 || b.rows() == 0 {
        return Matrix::zeros(0, n);
    }
    // x A = y B  <=>  (x, -y) [A; B] = 0
    let stacked = Matrix::vstack(&[a, b], n);
    let ker = stacked.kernel();
    let coeffs = ker.block(0, ker.rows(), 0, a.rows());
    coeffs.mul(a).row_basis()
}

/// Rows of `ambient` (in order) that extend `sub` to a basis of `sub + ambient`.
/// Returns a basis of a complement of `sub` inside the span of `ambient`.
pub fn complement(sub: &Matrix, ambient: &Matrix) -> Matrix {
    let n = ambient.cols();
    let mut current = sub.row_basis();
    let mut chosen: Vec<Vec<Q>> = Vec::new();
    for r in 0..ambient.rows() {
        let cand = Matrix::from_rows(vec![ambient.row(r)], n);
        let test = Matrix::vstack(&[&current, &cand], n);
        if test.rank() > current.rows() {
            current = test;
            chosen.push(ambient.row(r));
        }
    }
    Matrix::from_rows(chosen, n)
}

/// Coordinates of `v` in the basis given by the rows of `basis`, if `v` lies in the span.
pub fn coordinates(basis: &Matrix, v: &[Q]) -> Option<Vec<Q>> {
    let k = basis.rows();
    let n = basis.cols();
    // solve c * basis = v  <=>  basis^T c^T = v^T
    let mut aug = Matrix::zeros(n, k + 1);
    for i in 0..n {
        for j in 0..k {
            aug.set(i, j, basis.get(j, i).clone());
        }
        aug.set(i, k, v[i].clone());
    }
    let (r, p) = aug.rref();
    if p.contains(&k) {
        return None;
    }
    let mut c = vec![Q::zero(); k];
    for (row, &pc) in p.iter().enumerate() {
        c[pc] = r.get(row, k).clone();
    }
    Some(c)
}

/// Coordinates of every row of `m` in `basis`; panics if a row is outside the span.
pub fn coordinate_matrix(basis: &Matrix, m: &Matrix) -> Matrix {
    let rows: Vec<Vec<Q>> = (0..m.rows())
        .map(|r| coordinates(basis, m.row_slice(r)).expect("vector outside span"))
        .collect();
    Matrix::from_rows(rows, basis.rows())
}

pub fn is_integral(x: &Q) -> bool {
    x.is_integer()
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_image_dimensions_add_up() {
        let m = Matrix::from_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.kernel().rows(), 1);
        let k = m.kernel();
        assert!(k.mul(&m).is_zero());
        assert_eq!(m.right_kernel().rows(), 1);
        assert!(m.mul(&m.right_kernel().transpose()).is_zero());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_i64(&[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert!(Matrix::from_i64(&[vec![1, 1], vec![1, 1]]).inverse().is_none());
    }

    #[test]
    fn det_matches_hand_value() {
        let m = Matrix::from_i64(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]);
        assert_eq!(m.det(), q(-2));
    }

    #[test]
    fn intersection_of_planes() {
        let a = Matrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0]]);
        let b = Matrix::from_i64(&[vec![0, 1, 0], vec![0, 0, 1]]);
        let i = intersection(&a, &b);
        assert_eq!(i, Matrix::from_i64(&[vec![0, 1, 0]]));
    }

    #[test]
    fn complement_extends_basis() {
        let sub = Matrix::from_i64(&[vec![1, 1, 0]]);
        let amb = Matrix::identity(3);
        let c = complement(&sub, &amb);
        assert_eq!(c.rows(), 2);
        assert_eq!(sum_dim(&sub, &c), 3);
    }

    #[test]
    fn coordinates_solve() {
        let b = Matrix::from_i64(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let c = coordinates(&b, &[q(2), q(5), q(3)]).unwrap();
        assert_eq!(c, vec![q(2), q(3)]);
        assert!(coordinates(&b, &[q(1), q(0), q(0)]).is_none());
    }

    #[test]
    fn parse_and_print_rationals() {
        assert_eq!(q_parse("-3/6"), Some(qf(-1, 2)));
        assert_eq!(q_to_string(&qf(4, 2)), "2");
        assert_eq!(q_parse("1/0"), None);
    }
}
