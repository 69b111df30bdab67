//! LU factorization with partial pivoting for real and complex matrices.

use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::matrix::Matrix;
use super::NumericsError;

/// Field scalar usable by the LU routines.
pub trait Scalar:
    Copy
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: f64,
}

impl<T: Scalar> Lu<T> {
    pub fn new(m: &Matrix<T>) -> Result<Self, NumericsError> {
        if !m.is_square() {
            return Err(NumericsError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .fold(0.0f64, |acc, (i, j)| acc.max(m[(i, j)].modulus()));
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].modulus()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pmax <= f64::EPSILON * scale * (n as f64) || pmax == 0.0 {
                return Err(NumericsError::Singular);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - factor * v;
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub fn det(&self) -> T {
        let n = self.lu.rows();
        let mut d = T::one();
        for i in 0..n {
            d = d * self.lu[(i, i)];
        }
        if self.sign < 0.0 {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let v = x[j];
                x[i] = x[i] - self.lu[(i, j)] * v;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let v = x[j];
                x[i] = x[i] - self.lu[(i, j)] * v;
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.lu.rows();
        let mut out = Matrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col: Vec<T> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> Matrix<T> {
        self.solve_matrix(&Matrix::identity(self.lu.rows()))
    }
}

pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>, NumericsError> {
    Ok(Lu::new(m)?.inverse())
}

pub fn det<T: Scalar>(m: &Matrix<T>) -> T {
    match Lu::new(m) {
        Ok(lu) => lu.det(),
        Err(_) => T::zero(),
    }
}
