use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::NumericsError;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<Complex64>;

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.debug_list()
                .entries(&self.data[i * self.cols..(i + 1) * self.cols])
                .finish()?;
        }
        f.write_str("]")
    }
}

impl<T: Copy + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<U: Copy + Zero>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Copies the block `rows × cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Sub-matrix selecting the given row and column indices.
    pub fn select(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        Self::from_fn(row_idx.len(), col_idx.len(), |i, j| {
            self[(row_idx[i], col_idx[j])]
        })
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, src: &Matrix<T>) {
        for i in 0..src.rows {
            for j in 0..src.cols {
                self[(r0 + i, c0 + j)] = src[(i, j)];
            }
        }
    }
}

impl<T: Copy + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Matrix<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<Output = T> + Sub<Output = T>,
{
    pub fn matmul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] = out.data[i * rhs.cols + j] + a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn scale(&self, s: T) -> Matrix<T> {
        self.map(|x| x * s)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    /// `vᵀ M w` without conjugation.
    pub fn bilinear(&self, v: &[T], w: &[T]) -> T {
        let mw = self.matvec(w);
        v.iter()
            .zip(&mw)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }
}

impl<T: Copy + Zero + Add<Output = T>> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Copy + Zero + Sub<Output = T>> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Copy + Zero + Neg<Output = T>> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl RealMatrix {
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        self.map(|x| Complex64::new(x, 0.0))
    }
}

impl ComplexMatrix {
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn re(&self) -> RealMatrix {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> RealMatrix {
        self.map(|z| z.im)
    }

    pub fn from_parts(re: &RealMatrix, im: &RealMatrix) -> ComplexMatrix {
        assert_eq!((re.rows, re.cols), (im.rows, im.cols));
        Matrix::from_fn(re.rows, re.cols, |i, j| {
            Complex64::new(re[(i, j)], im[(i, j)])
        })
    }
}

/// Tolerance used when symmetrizing nearly-symmetric input.
pub const SYMMETRY_TOL: f64 = 1e-12;

fn symmetrize<T>(
    m: Matrix<T>,
    asym_of: impl Fn(T, T) -> f64,
    norm: f64,
) -> Result<Matrix<T>, NumericsError>
where
    T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
{
    if !m.is_square() {
        return Err(NumericsError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max(asym_of(m[(i, j)], m[(j, i)]));
        }
    }
    if asym > SYMMETRY_TOL * norm {
        return Err(NumericsError::Asymmetric {
            asymmetry: asym,
            scale: norm,
        });
    }
    let mut out = m;
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (out[(i, j)] + out[(j, i)]) * 0.5;
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    Ok(out)
}

/// Real symmetric matrix. Entries are exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSymMatrix(RealMatrix);

impl RealSymMatrix {
    /// Symmetrizes `(M + Mᵀ)/2` when the asymmetry is at most `1e-12·‖M‖`,
    /// rejects otherwise.
    pub fn new(m: RealMatrix) -> Result<Self, NumericsError> {
        if !m.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        let norm = m.frobenius_norm();
        symmetrize(m, |a, b| (a - b).abs(), norm).map(RealSymMatrix)
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if data.len() != n * n {
            return Err(NumericsError::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Self::new(Matrix::from_row_major(n, n, data))
    }

    pub fn identity(n: usize) -> Self {
        RealSymMatrix(Matrix::identity(n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        RealSymMatrix(Matrix::from_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    /// `self + s·I`
    pub fn shifted(&self, s: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.rows {
            m[(i, i)] += s;
        }
        RealSymMatrix(m)
    }

    pub fn add(&self, other: &RealSymMatrix) -> Self {
        RealSymMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &RealSymMatrix) -> Self {
        RealSymMatrix(&self.0 - &other.0)
    }

    /// `Pᵀ S P`, symmetric by construction.
    pub fn congruence(&self, p: &RealMatrix) -> Self {
        let m = p.transpose().matmul(&self.0).matmul(p);
        let n = m.rows;
        let mut out = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        RealSymMatrix(out)
    }
}

/// Complex symmetric (not Hermitian) matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSymMatrix(ComplexMatrix);

impl ComplexSymMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, NumericsError> {
        if !m.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        let norm = m.frobenius_norm();
        symmetrize(m, |a, b| (a - b).norm(), norm).map(ComplexSymMatrix)
    }

    pub fn from_real(m: &RealSymMatrix) -> Self {
        ComplexSymMatrix(m.0.to_complex())
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn re(&self) -> RealSymMatrix {
        RealSymMatrix(self.0.re())
    }

    pub fn im(&self) -> RealSymMatrix {
        RealSymMatrix(self.0.im())
    }
}
