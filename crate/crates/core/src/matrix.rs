//! Dense matrices over B/2^K B and small F₂ linear algebra.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::dyadic::{RamifiedElem, Ring};
use crate::error::{Error, Result};

/// Row-major matrix of ring elements.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    ring: Ring,
    data: Vec<RamifiedElem>,
}

impl Mat {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            ring,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn from_fn(
        ring: Ring,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> RamifiedElem,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            ring,
            data,
        }
    }

    /// Builds a matrix from integer pairs (a, b) meaning a + bπ.
    pub fn from_pairs(ring: Ring, entries: &[Vec<(i64, i64)>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("ragged matrix rows".into()));
        }
        Ok(Self::from_fn(ring, rows, cols, |i, j| {
            let (a, b) = entries[i][j];
            ring.elem(a, b)
        }))
    }

    /// Signed (a, b) pairs of every entry.
    pub fn to_pairs(&self) -> Vec<Vec<(i64, i64)>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].signed_coords()).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> Vec<RamifiedElem> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[RamifiedElem]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn from_cols(ring: Ring, rows: usize, cols: &[Vec<RamifiedElem>]) -> Self {
        Self::from_fn(ring, rows, cols.len(), |i, j| cols[j][i])
    }

    /// σ(ᵗM).
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Mat::zeros(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * other[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        Mat::from_fn(self.ring, self.rows, self.cols, |i, j| {
            self[(i, j)] + other[(i, j)]
        })
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        Mat::from_fn(self.ring, self.rows, self.cols, |i, j| {
            self[(i, j)] - other[(i, j)]
        })
    }

    pub fn scale(&self, c: RamifiedElem) -> Mat {
        Mat::from_fn(self.ring, self.rows, self.cols, |i, j| self[(i, j)] * c)
    }

    /// σ(ᵗU)·self·U.
    pub fn congruence(&self, u: &Mat) -> Mat {
        u.conj_transpose().mul(&self.mul(u))
    }

    /// Sub-matrix with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_fn(self.ring, rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])]
        })
    }

    /// Re-reads every entry in another ring by truncation or zero extension.
    pub fn reduce(&self, ring: Ring) -> Mat {
        Mat::from_fn(ring, self.rows, self.cols, |i, j| {
            let x = self[(i, j)];
            let (a, b) = x.signed_coords();
            ring.elem(a, b)
        })
    }

    /// Minimal π-valuation of the entries, `None` for the zero matrix.
    pub fn min_valuation(&self) -> Option<u32> {
        self.data.iter().filter_map(RamifiedElem::valuation).min()
    }

    /// Reduction modulo π as an F₂ matrix.
    pub fn mod_pi(&self) -> F2Mat {
        F2Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].a() & 1 == 1)
    }

    /// Invertibility over B, decided modulo π.
    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.mod_pi().rank() == self.rows
    }

    /// π-valuation of the determinant by minimal-valuation elimination;
    /// `None` when the matrix is singular at working precision.
    pub fn det_valuation(&self) -> Option<u32> {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut total = 0;
        let mut alive: Vec<usize> = (0..n).collect();
        let mut alive_cols: Vec<usize> = (0..n).collect();
        while !alive.is_empty() {
            let mut best: Option<(u32, usize, usize)> = None;
            for (ri, &r) in alive.iter().enumerate() {
                for (ci, &c) in alive_cols.iter().enumerate() {
                    if let Some(v) = m[(r, c)].valuation() {
                        if best.is_none_or(|(bv, _, _)| v < bv) {
                            best = Some((v, ri, ci));
                        }
                    }
                }
            }
            let (v, ri, ci) = best?;
            let pr = alive.remove(ri);
            let pc = alive_cols.remove(ci);
            total += v;
            let p = m[(pr, pc)];
            for &r in &alive {
                let f = m[(r, pc)].divide_exact(&p).ok()?;
                for &c in &alive_cols {
                    let t = m[(pr, c)] * f;
                    m[(r, c)] -= t;
                }
                m[(r, pc)] = self.ring.zero();
            }
        }
        Some(total)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = RamifiedElem;
    fn index(&self, (i, j): (usize, usize)) -> &RamifiedElem {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut RamifiedElem {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Hermitian form value h(x, y) = σ(ᵗx)·G·y for column vectors x, y.
pub fn form(g: &Mat, x: &[RamifiedElem], y: &[RamifiedElem]) -> RamifiedElem {
    let ring = g.ring();
    let mut acc = ring.zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let xc = xi.conj();
        let mut row = ring.zero();
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                row += g[(i, j)] * *yj;
            }
        }
        acc += xc * row;
    }
    acc
}

pub fn vec_add(x: &[RamifiedElem], y: &[RamifiedElem]) -> Vec<RamifiedElem> {
    x.iter().zip(y).map(|(a, b)| *a + *b).collect()
}

pub fn vec_sub(x: &[RamifiedElem], y: &[RamifiedElem]) -> Vec<RamifiedElem> {
    x.iter().zip(y).map(|(a, b)| *a - *b).collect()
}

/// x·c (scalars act on the right, matching linearity in the second slot).
pub fn vec_scale(x: &[RamifiedElem], c: RamifiedElem) -> Vec<RamifiedElem> {
    x.iter().map(|a| *a * c).collect()
}

/// x − y·c.
pub fn vec_axpy(x: &[RamifiedElem], y: &[RamifiedElem], c: RamifiedElem) -> Vec<RamifiedElem> {
    x.iter().zip(y).map(|(a, b)| *a - *b * c).collect()
}

/// Dense matrix over F₂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Mat {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl F2Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![false; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &F2Mat) -> F2Mat {
        F2Mat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(false, |acc, k| acc ^ (self.get(i, k) & other.get(k, j)))
        })
    }

    pub fn transpose(&self) -> F2Mat {
        F2Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Row echelon form; returns pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            for j in 0..self.cols {
                let (a, b) = (self.get(r, j), self.get(p, j));
                self.set(r, j, b);
                self.set(p, j, a);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    for j in 0..self.cols {
                        let v = self.get(i, j) ^ self.get(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().len()
    }

    /// Basis of the right kernel {x : M x = 0}, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<bool>> {
        let mut m = self.clone();
        let pivots = m.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![false; self.cols];
                v[f] = true;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(r, f);
                }
                v
            })
            .collect()
    }

    /// Some solution of M x = b, if one exists.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        let mut aug = F2Mat::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                b[i]
            }
        });
        let pivots = aug.echelon();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols);
        }
        Some(x)
    }
}

/// Dimension of the span of F₂ vectors.
pub fn f2_span_dim(vectors: &[Vec<bool>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].len();
    F2Mat::from_fn(vectors.len(), cols, |i, j| vectors[i][j]).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        Ring::new(16, 1).unwrap()
    }

    #[test]
    fn products_and_congruence() {
        let r = ring();
        let g = Mat::from_pairs(r, &[vec![(0, 0), (0, 1)], vec![(0, -1), (0, 0)]]).unwrap();
        let u = Mat::from_pairs(r, &[vec![(1, 0), (1, 1)], vec![(0, 0), (1, 0)]]).unwrap();
        let c = g.congruence(&u);
        assert_eq!(c.conj_transpose(), c);
        assert_eq!(Mat::identity(r, 2).mul(&g), g);
    }

    #[test]
    fn determinant_valuations() {
        let r = ring();
        let h1 = Mat::from_pairs(r, &[vec![(0, 0), (0, 1)], vec![(0, -1), (0, 0)]]).unwrap();
        assert_eq!(h1.det_valuation(), Some(2));
        let d = Mat::from_pairs(r, &[vec![(3, 0), (1, 0)], vec![(1, 0), (1, 0)]]).unwrap();
        assert_eq!(d.det_valuation(), Some(2));
        let s = Mat::from_pairs(r, &[vec![(1, 0), (1, 0)], vec![(1, 0), (1, 0)]]).unwrap();
        assert_eq!(s.det_valuation(), None);
    }

    #[test]
    fn f2_kernel_and_solve() {
        let m = F2Mat::from_fn(2, 3, |i, j| (i + j) % 2 == 0);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        for v in &k {
            for i in 0..2 {
                let s = (0..3).fold(false, |a, j| a ^ (m.get(i, j) & v[j]));
                assert!(!s);
            }
        }
        assert!(m.solve(&[true, false]).is_some());
        let z = F2Mat::zeros(1, 1);
        assert!(z.solve(&[true]).is_none());
    }
}
