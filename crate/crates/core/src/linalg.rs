//! Small dense matrices and the eigenvalue routines used on Lax matrices.
//!
//! `Matrix<T>` works over any numeric ring (`f64`, `f32`, exact rationals);
//! the eigen and inverse routines require a floating point [`Real`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Num;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
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

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
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

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * s.clone()).collect() }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// `self^k` for square matrices, `k >= 0`.
    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square(), "pow of a non-square matrix");
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Strictly upper triangular part.
    pub fn strictly_upper(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| if i < j { self[(i, j)].clone() } else { T::zero() })
    }

    /// Strictly lower triangular part.
    pub fn strictly_lower(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| if i > j { self[(i, j)].clone() } else { T::zero() })
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Real> Matrix<T> {
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.is_square() && self.max_abs_diff(&self.transpose()) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(T::min_positive_value());
        for col in 0..n {
            let (piv, best) =
                (col..n)
                    .map(|r| (r, a[(r, col)].abs()))
                    .fold((col, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= T::epsilon() * scale * T::lit(n as f64) {
                return Err(LinalgError::Singular);
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let d = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= d;
                inv[(col, j)] /= d;
            }
            for r in 0..n {
                if r != col {
                    let f = a[(r, col)];
                    if f != T::zero() {
                        for j in 0..n {
                            let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                            a[(r, j)] -= f * ac;
                            inv[(r, j)] -= f * ic;
                        }
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
    pub fn symmetric_eigenvalues(&self) -> Result<Vec<T>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("eigenvalues of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            let diag: T = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
            if off <= T::epsilon() * T::epsilon() * (diag + off) || off == T::zero() {
                let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
                ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
                return Ok(ev);
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let t = if theta == T::zero() { T::one() } else { t };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        Err(LinalgError::NoConvergence)
    }

    /// Eigenvalues of a general real matrix, sorted by real then imaginary part.
    pub fn eigenvalues(&self) -> Result<Vec<Complex<T>>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("eigenvalues of a non-square matrix".into()));
        }
        let mut h = self.clone();
        to_hessenberg(&mut h);
        let mut ev = hessenberg_qr(h)?;
        sort_complex(&mut ev);
        Ok(ev)
    }
}

pub fn sort_complex<T: Real>(v: &mut [Complex<T>]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Reduction to upper Hessenberg form by stabilised elementary similarity transforms.
fn to_hessenberg<T: Real>(a: &mut Matrix<T>) {
    let n = a.rows;
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut i = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..n {
                a.data.swap(i * n + j, m * n + j);
            }
            for j in 0..n {
                a.data.swap(j * n + i, j * n + m);
            }
        }
        if x != T::zero() {
            for i in (m + 1)..n {
                let mut y = a[(i, m - 1)];
                if y != T::zero() {
                    y /= x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        let amj = a[(m, j)];
                        a[(i, j)] -= y * amj;
                    }
                    for j in 0..n {
                        let aji = a[(j, i)];
                        a[(j, m)] += y * aji;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[(i, j)] = T::zero();
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR iteration.
pub(crate) fn hessenberg_qr<T: Real>(h: Matrix<T>) -> Result<Vec<Complex<T>>, LinalgError> {
    let n = h.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    // 1-based working copy keeps the index arithmetic of the classical algorithm readable.
    let w = n + 1;
    let mut a = vec![T::zero(); w * w];
    for i in 0..n {
        for j in 0..n {
            a[(i + 1) * w + j + 1] = h[(i, j)];
        }
    }
    let idx = |i: usize, j: usize| i * w + j;
    let mut wr = vec![T::zero(); w];
    let mut wi = vec![T::zero(); w];
    let half = T::lit(0.5);

    let mut anorm = T::zero();
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[idx(i, j)].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = T::zero();
    while nn >= 1 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 2 {
                let mut s = a[idx(l - 1, l - 1)].abs() + a[idx(l, l)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[idx(l, l - 1)].abs() + s == s {
                    a[idx(l, l - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = a[idx(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = T::zero();
                nn -= 1;
            } else {
                let mut y = a[idx(nu - 1, nu - 1)];
                let mut wv = a[idx(nu, nu - 1)] * a[idx(nu - 1, nu)];
                if l == nu - 1 {
                    let p = half * (y - x);
                    let q = p * p + wv;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= T::zero() {
                        z = p + if p >= T::zero() { z } else { -z };
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != T::zero() {
                            wr[nu] = x - wv / z;
                        }
                        wi[nu - 1] = T::zero();
                        wi[nu] = T::zero();
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return Err(LinalgError::NoConvergence);
                    }
                    if its == 10 || its == 20 || its == 40 {
                        t += x;
                        for i in 1..=nu {
                            a[idx(i, i)] -= x;
                        }
                        let s = a[idx(nu, nu - 1)].abs() + a[idx(nu - 1, nu - 2)].abs();
                        x = T::lit(0.75) * s;
                        y = x;
                        wv = T::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nu - 2;
                    let (mut p, mut q, mut r);
                    loop {
                        let z = a[idx(m, m)];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - wv) / a[idx(m + 1, m)] + a[idx(m, m + 1)];
                        q = a[idx(m + 1, m + 1)] - z - rr - ss;
                        r = a[idx(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[idx(m - 1, m - 1)].abs() + z.abs() + a[idx(m + 1, m + 1)].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nu {
                        a[idx(i, i - 2)] = T::zero();
                        if i != m + 2 {
                            a[idx(i, i - 3)] = T::zero();
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[idx(k, k - 1)];
                            q = a[idx(k + 1, k - 1)];
                            r = T::zero();
                            if k != nu - 1 {
                                r = a[idx(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let mag = (p * p + q * q + r * r).sqrt();
                        let s = if p >= T::zero() { mag } else { -mag };
                        if s != T::zero() {
                            if k == m {
                                if l != m {
                                    a[idx(k, k - 1)] = -a[idx(k, k - 1)];
                                }
                            } else {
                                a[idx(k, k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                p = a[idx(k, j)] + q * a[idx(k + 1, j)];
                                if k != nu - 1 {
                                    p += r * a[idx(k + 2, j)];
                                    a[idx(k + 2, j)] -= p * z;
                                }
                                a[idx(k + 1, j)] -= p * y;
                                a[idx(k, j)] -= p * x;
                            }
                            let mmin = if nu < k + 3 { nu } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[idx(i, k)] + y * a[idx(i, k + 1)];
                                if k != nu - 1 {
                                    p += z * a[idx(i, k + 2)];
                                    a[idx(i, k + 2)] -= p * r;
                                }
                                a[idx(i, k + 1)] -= p * q;
                                a[idx(i, k)] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 1 || l + 1 >= nn as usize {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Clone + Num> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.data[i * rhs.cols + j].clone() + a.clone() * rhs.data[k * rhs.cols + j].clone();
                    out.data[i * rhs.cols + j] = v;
                }
            }
        }
        out
    }
}

impl<'a, T: Clone + Num> Add<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<'a, T: Clone + Num> Sub<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Clone + Num + Neg<Output = T>> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, Rational};

    fn m(rows: Vec<Vec<f64>>) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn product_and_commutator() {
        let a = m(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = m(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        assert_eq!((&a * &b).as_slice(), &[-2.0, 1.0, -4.0, 3.0]);
        let c = a.commutator(&b);
        assert_eq!(c.trace(), 0.0);
        assert_eq!(a.pow(3), &(&a * &a) * &a);
        assert_eq!(a.pow(0), Matrix::identity(2));
    }

    #[test]
    fn exact_matrices() {
        let a: Matrix<Rational> = Matrix::from_fn(2, 2, |i, j| int((i * 2 + j) as i64 + 1));
        assert_eq!(a.trace(), int(5));
        assert_eq!(a.strictly_upper()[(0, 1)], int(2));
        assert_eq!(a.strictly_lower()[(1, 0)], int(3));
    }

    #[test]
    fn symmetric_eigenvalues_match_closed_form() {
        let a = m(vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let ev = a.symmetric_eigenvalues().unwrap();
        let s = 2f64.sqrt();
        for (x, y) in ev.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((x - y).abs() < 1e-13, "{x} vs {y}");
        }
    }

    #[test]
    fn general_eigenvalues_rotation_and_companion() {
        let r = m(vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
        let ev = r.eigenvalues().unwrap();
        assert!((ev[0].im + 1.0).abs() < 1e-14 && ev[0].re.abs() < 1e-14);
        assert!((ev[1].im - 1.0).abs() < 1e-14);
        // companion of (x-1)(x-2)(x-3)(x+4)
        let c = m(vec![
            vec![0.0, 0.0, 0.0, 24.0],
            vec![1.0, 0.0, 0.0, -38.0],
            vec![0.0, 1.0, 0.0, 13.0],
            vec![0.0, 0.0, 1.0, 2.0],
        ]);
        let ev = c.eigenvalues().unwrap();
        for (z, want) in ev.iter().zip([-4.0, 1.0, 2.0, 3.0]) {
            assert!((z.re - want).abs() < 1e-10 && z.im.abs() < 1e-10, "{z} vs {want}");
        }
    }

    #[test]
    fn general_matches_symmetric_on_random_symmetric() {
        let a = Matrix::from_fn(5, 5, |i, j| ((i + 1) * (j + 1)) as f64 / 7.0 + (i.min(j) as f64).sin());
        let s = &a + &a.transpose();
        let e1 = s.symmetric_eigenvalues().unwrap();
        let e2 = s.eigenvalues().unwrap();
        for (x, z) in e1.iter().zip(&e2) {
            assert!((x - z.re).abs() < 1e-10 && z.im.abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_and_singular() {
        let a = m(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv.as_slice(), &[0.0, -1.0, 1.0, 0.0]);
        let s = m(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(s.inverse(), Err(LinalgError::Singular));
    }
}
