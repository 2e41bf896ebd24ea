use std::fmt;

use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Poly, Scalar};

use super::{Domain, SparseVec, SubspaceBasis};

/// A dense matrix over an exact field, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        Matrix::scalar(&field.one(), n)
    }

    pub fn scalar(a: &Scalar, n: usize) -> Self {
        let mut m = Matrix::zeros(a.field(), n, n);
        for i in 0..n {
            m.set(i, i, a.clone());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        if rows.iter().flatten().any(|s| s.field() != field) {
            return Err(Error::Shape("entry from a different field".into()));
        }
        Ok(Matrix {
            field,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from small integers; panics on ragged input.
    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Matrix::from_rows(field, rows).expect("rectangular input")
    }

    /// Matrix whose columns are the given coordinate vectors.
    pub fn from_columns(field: FieldSpec, rows: usize, cols: &[Vec<Scalar>]) -> Self {
        let mut m = Matrix::zeros(field, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col.iter().enumerate() {
                m.set(i, j, c.clone());
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Column `j` as a sparse vector over `Finite(nrows)`.
    pub fn column_vec(&self, j: usize) -> SparseVec {
        SparseVec::from_dense(self.field, &self.column(j))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_strictly_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i + 1)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Matrix { data, ..self.clone() }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Matrix { data, ..self.clone() }
    }

    pub fn scale(&self, a: &Scalar) -> Matrix {
        let data = self.data.iter().map(|x| x * a).collect();
        Matrix { data, ..self.clone() }
    }

    /// `self - a*I`
    pub fn shift(&self, a: &Scalar) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i) - a;
            m.set(i, i, v);
        }
        m
    }

    pub fn pow(&self, n: usize) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.field, self.rows);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `p(self)` by Horner's rule.
    pub fn eval_poly(&self, p: &Poly) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::zeros(self.field, self.rows, self.cols);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Matrix::scalar(c, self.rows));
        }
        acc
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Sub-matrix of the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.field, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn block_diag(field: FieldSpec, blocks: &[Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Matrix::zeros(field, n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(off + i, off + j, b.get(i, j).clone());
                }
            }
            off += b.rows;
        }
        m
    }

    /// Companion matrix of monic(p): `e_i -> e_{i+1}`, last column from the
    /// coefficients, so its minimal and characteristic polynomial is monic(p).
    pub fn companion(p: &Poly) -> Result<Matrix> {
        let n = p.degree().filter(|&d| d >= 1).ok_or(Error::ConstantPolynomial)?;
        let p = p.monic();
        let field = p.field();
        let mut m = Matrix::zeros(field, n, n);
        for i in 1..n {
            m.set(i, i - 1, field.one());
        }
        for i in 0..n {
            m.set(i, n - 1, -&p.coeff(i));
        }
        Ok(m)
    }

    /// Nilpotent Jordan block with ones on the superdiagonal.
    pub fn jordan_block(field: FieldSpec, eigenvalue: &Scalar, n: usize) -> Matrix {
        let mut m = Matrix::scalar(eigenvalue, n);
        for i in 1..n {
            m.set(i - 1, i, field.one());
        }
        m
    }

    /// Monic generator of the annihilator of `v` under `self`: the least
    /// `d` with `M^d v` in the span of `v, Mv, ..., M^(d-1) v`.
    pub fn vector_min_poly(&self, v: &[Scalar]) -> Poly {
        let field = self.field;
        let n = self.rows;
        let mut orbit: Vec<SparseVec> = Vec::new();
        let mut current = v.to_vec();
        loop {
            let sv = SparseVec::from_dense(field, &current);
            if let Ok(cs) = super::CoordinateSystem::new(field, &orbit) {
                if let Some(c) = cs.express(&sv) {
                    let mut coeffs: Vec<Scalar> = c.iter().map(|a| -a).collect();
                    coeffs.push(field.one());
                    return Poly::new(field, coeffs);
                }
            }
            orbit.push(sv);
            if orbit.len() > n + 1 {
                unreachable!("orbit longer than the dimension");
            }
            current = self.mul_vec(&current);
        }
    }

    /// Minimal polynomial, as the lcm of the annihilators of the standard
    /// basis vectors. The 0x0 matrix has minimal polynomial 1.
    pub fn minimal_polynomial(&self) -> Poly {
        assert!(self.is_square());
        let field = self.field;
        let mut acc = Poly::one(field);
        for j in 0..self.cols {
            let mut e = vec![field.zero(); self.cols];
            e[j] = field.one();
            acc = crate::exactfield::poly_lcm(&acc, &self.vector_min_poly(&e));
        }
        acc
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }
}

/// Echelon basis of the null space of `m`, in `Finite(ncols)`.
pub fn kernel_basis(m: &Matrix) -> SubspaceBasis {
    let field = m.field();
    let n = m.ncols();
    let (r, pivots) = m.rref();
    let mut out = SubspaceBasis::zero(field, Domain::Finite(n));
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..n).filter(|&j| !is_pivot[j]) {
        let mut v = vec![field.zero(); n];
        v[free] = field.one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(row, free);
        }
        out.insert(&SparseVec::from_dense(field, &v)).expect("same domain");
    }
    out
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}
