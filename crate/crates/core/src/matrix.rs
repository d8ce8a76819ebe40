//! Exact dense linear algebra: symmetric matrices, row reduction, nullspaces,
//! and fraction-free determinants of polynomial matrices.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = zeros(n, m);
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

/// Square symmetric matrix with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    n: usize,
    data: Matrix,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix { n, data: identity(n) }
    }

    pub fn from_rows(rows: Matrix) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::DimensionMismatch(format!("matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SymMatrix { n, data: rows })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i][j]
    }

    pub fn rows(&self) -> &Matrix {
        &self.data
    }

    /// Sets both `(i,j)` and `(j,i)`.
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[j][i] = v.clone();
        self.data[i][j] = v;
    }

    /// Adds `v` to `(i,j)` and, off the diagonal, to `(j,i)`.
    pub fn add_at(&mut self, i: usize, j: usize, v: &Rational) {
        self.data[i][j] += v;
        if i != j {
            self.data[j][i] += v;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(j, v)| (i, j, v)))
    }

    pub fn add(&self, o: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, o.n);
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        SymMatrix { n: self.n, data }
    }

    pub fn sub(&self, o: &SymMatrix) -> SymMatrix {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> SymMatrix {
        SymMatrix { n: self.n, data: self.data.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    /// `Tᵀ·M·T` for an `n × m` matrix `T`.
    pub fn congruence(&self, t: &Matrix) -> SymMatrix {
        assert_eq!(t.len(), self.n);
        let prod = matmul(&transpose(t), &matmul(&self.data, t));
        SymMatrix { n: prod.len(), data: prod }
    }

    /// Principal submatrix on `idx`, in the given order.
    pub fn principal(&self, idx: &[usize]) -> SymMatrix {
        let data = idx.iter().map(|&i| idx.iter().map(|&j| self.data[i][j].clone()).collect()).collect();
        SymMatrix { n: idx.len(), data }
    }

    /// Inverse of `principal`: places `small` at rows/columns `idx` of an `n × n` zero matrix.
    pub fn embed(small: &SymMatrix, idx: &[usize], n: usize) -> SymMatrix {
        let mut out = SymMatrix::zeros(n);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.data[i][j] += &small.data[a][b];
            }
        }
        out
    }

    /// `self += Bᵀ·small·B` where `B` injects row `a` of `small` into row `idx[a]`.
    /// Repeated targets accumulate.
    pub fn add_embedded(&mut self, small: &SymMatrix, idx: &[usize]) {
        for (i, j, c) in small.nonzeros() {
            self.data[idx[i]][idx[j]] += c;
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        self.data.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn quad_form(&self, v: &[Rational]) -> Rational {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `M·v` for a vector of polynomials.
    pub fn mul_poly_vec(&self, v: &[Poly]) -> Vec<Poly> {
        let nv = v.first().map_or(0, Poly::nvars);
        self.data
            .iter()
            .map(|r| {
                let mut acc = Poly::zero(nv);
                for (c, p) in r.iter().zip(v) {
                    if !c.is_zero() {
                        acc = &acc + &p.scale(c);
                    }
                }
                acc
            })
            .collect()
    }

    /// `vᵀ·M·v` for a vector of polynomials.
    pub fn poly_quad_form(&self, v: &[Poly]) -> Poly {
        let nv = v.first().map_or(0, Poly::nvars);
        let mut acc = Poly::zero(nv);
        for (i, j, c) in self.nonzeros() {
            acc = &acc + &(&v[i] * &v[j]).scale(c);
        }
        acc
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.data.iter().map(|r| r.iter().map(crate::rational::to_f64).collect()).collect()
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(a: &mut Matrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &Matrix) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Basis of `{x : A x = 0}`, one vector per free column.
pub fn nullspace(a: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// One solution of `A x = b` (free variables zero), or `None` if inconsistent.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Some(x)
}

/// Solves a square system exactly; `None` if singular.
pub fn solve_square(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut aug: Matrix = a.iter().zip(b).map(|(r, s)| r.iter().chain(s).cloned().collect()).collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..n + m].to_vec()).collect())
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn det(a: &Matrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut acc = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Rational::zero() };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let piv = m[c][c].clone();
        acc *= &piv;
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &piv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    acc
}

/// Determinant of a square polynomial matrix by Bareiss elimination.
pub fn det_bareiss(mut a: Vec<Vec<Poly>>, nvars: usize) -> Poly {
    let n = a.len();
    if n == 0 {
        return Poly::one(nvars);
    }
    let mut sign = Rational::one();
    let mut prev = Poly::one(nvars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Poly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].scale(&sign)
}
