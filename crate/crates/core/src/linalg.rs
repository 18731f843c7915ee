//! Small dense complex matrices and a real SPD solver.

use num_complex::Complex;

use crate::scalar::{cabs, czero, Real};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex<T>) {
        self.data[i * self.cols + j] = z;
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    let prod = a.clone() * b.clone();
                    out.data[i * other.cols + j] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = czero::<T>();
                for (j, vj) in v.iter().enumerate() {
                    acc += self.data[i * self.cols + j].clone() * vj.clone();
                }
                acc
            })
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: &Complex<T>) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.clone() * s.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = czero::<T>();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i).clone();
        }
        acc
    }

    /// Hilbert-Schmidt inner product `Tr(self^dagger other)`.
    pub fn hs_inner(&self, other: &Self) -> Complex<T> {
        let mut acc = czero::<T>();
        for (a, b) in self.data.iter().zip(&other.data) {
            acc += a.conj() * b.clone();
        }
        acc
    }

    pub fn frobenius_sqr(&self) -> T {
        let mut acc = T::zero();
        for z in &self.data {
            acc += z.norm_sqr();
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = cabs(&(a.clone() - b.clone()));
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

/// Frobenius distance between `a` and `b` after rotating `b` by the global
/// phase that best aligns it with `a`, normalized by `sqrt(n)`.
pub fn phase_aligned_distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let n = T::from_i64(a.rows() as i64);
    let overlap = b.hs_inner(a);
    let mag = cabs(&overlap);
    if mag.is_zero() {
        return ((a.frobenius_sqr() + b.frobenius_sqr()) / n).sqrt();
    }
    let phase = overlap.unscale(mag);
    (a.sub(&b.scale(&phase)).frobenius_sqr() / n).sqrt()
}

/// Normalized Frobenius distance `||a - b|| / sqrt(n)`.
pub fn distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let n = T::from_i64(a.rows() as i64);
    (a.sub(b).frobenius_sqr() / n).sqrt()
}

/// Solves `A x = b` for a symmetric positive definite `A` (row-major, n x n)
/// by Cholesky factorization. Returns `None` when a pivot is not positive.
pub fn solve_spd<T: Real>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j].clone();
            for k in 0..j {
                s -= l[i * n + k].clone() * l[j * n + k].clone();
            }
            if i == j {
                if s <= T::zero() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j].clone();
            }
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i].clone();
        for k in 0..i {
            s -= l[i * n + k].clone() * y[k].clone();
        }
        y[i] = s / l[i * n + i].clone();
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i].clone();
        for k in i + 1..n {
            s -= l[k * n + i].clone() * x[k].clone();
        }
        x[i] = s / l[i * n + i].clone();
    }
    Some(x)
}

pub fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    let mut acc = T::zero();
    for z in v {
        acc += z.norm_sqr();
    }
    acc.sqrt()
}

/// `<u, v> = sum conj(u_i) v_i`.
pub fn inner<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    let mut acc = czero::<T>();
    for (a, b) in u.iter().zip(v) {
        acc += a.conj() * b.clone();
    }
    acc
}

pub fn normalized<T: Real>(v: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
    let n = vec_norm(v);
    if n.is_zero() {
        return None;
    }
    Some(v.iter().map(|z| z.clone().unscale(n.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn cholesky_solves_small_system() {
        let a = vec![4.0, 2.0, 2.0, 3.0];
        let x = solve_spd(&a, &[2.0, 1.0]).unwrap();
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0f64).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0f64).abs() < 1e-14);
        assert!(solve_spd(&[0.0, 0.0, 0.0, 1.0], &[1.0, 1.0]).is_none());
    }

    #[test]
    fn phase_alignment_ignores_global_phase() {
        let a = CMatrix::from_fn(2, 2, |i, j| cplx((i + 2 * j) as f64, (i * j) as f64 - 1.0));
        let rotated = a.scale(&cplx(0.6, 0.8));
        assert!(phase_aligned_distance(&a, &rotated) < 1e-15);
        assert!(distance(&a, &rotated) > 0.1);
    }
}
