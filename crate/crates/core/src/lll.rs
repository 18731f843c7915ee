//! LLL reduction of integer lattices.
//!
//! The basis is kept in exact integers; Gram-Schmidt coefficients live in MPFR
//! floats at a precision derived from the entry sizes.

use rug::{Float, Integer};

/// Lovasz parameter used throughout.
pub const LOVASZ_DELTA: f64 = 0.99;

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Working precision for a basis: twice the largest entry size plus slack.
fn working_precision(basis: &[Vec<Integer>]) -> u32 {
    let bits = basis.iter().flatten().map(|x| x.significant_bits()).max().unwrap_or(1);
    2 * bits + 64 + 4 * basis.len() as u32
}

/// Reduces the rows of `basis` in place (rows must be linearly independent).
pub fn lll_reduce(basis: &mut [Vec<Integer>]) {
    lll_reduce_with(basis, LOVASZ_DELTA)
}

pub fn lll_reduce_with(basis: &mut [Vec<Integer>], delta: f64) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let prec = working_precision(basis);
    let delta = Float::with_val(prec, delta);
    let mut mu: Vec<Vec<Float>> = (0..n).map(|i| (0..i).map(|_| Float::new(prec)).collect()).collect();
    let mut bstar: Vec<Float> = vec![Float::new(prec); n];
    bstar[0] = Float::with_val(prec, dot(&basis[0], &basis[0]));
    let mut k = 1;

    while k < n {
        size_reduce(basis, &mut mu, &mut bstar, k, prec);
        let rhs = Float::with_val(prec, &delta - Float::with_val(prec, mu[k][k - 1].square_ref())) * &bstar[k - 1];
        if bstar[k] < rhs {
            basis.swap(k, k - 1);
            if k == 1 {
                bstar[0] = Float::with_val(prec, dot(&basis[0], &basis[0]));
            }
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
}

/// Recomputes row `k` of the Gram-Schmidt data from exact inner products.
fn gram_schmidt_row(basis: &[Vec<Integer>], mu: &mut [Vec<Float>], bstar: &mut [Float], k: usize, prec: u32) {
    let (done, rest) = mu.split_at_mut(k);
    let row = &mut rest[0];
    for j in 0..k {
        let mut m = Float::with_val(prec, dot(&basis[k], &basis[j]));
        for i in 0..j {
            m -= Float::with_val(prec, &done[j][i] * &row[i]) * &bstar[i];
        }
        row[j] = m / &bstar[j];
    }
    let mut b = Float::with_val(prec, dot(&basis[k], &basis[k]));
    for j in 0..k {
        b -= Float::with_val(prec, row[j].square_ref()) * &bstar[j];
    }
    bstar[k] = b;
}

/// Size-reduces row `k` against all earlier rows, repeating with fresh
/// Gram-Schmidt data until no coefficient exceeds one half.
fn size_reduce(basis: &mut [Vec<Integer>], mu: &mut [Vec<Float>], bstar: &mut [Float], k: usize, prec: u32) {
    let bound = Float::with_val(prec, 0.51);
    loop {
        gram_schmidt_row(basis, mu, bstar, k, prec);
        let mut changed = false;
        for l in (0..k).rev() {
            if Float::with_val(prec, mu[k][l].abs_ref()) <= bound {
                continue;
            }
            changed = true;
            let q = Float::with_val(prec, &mu[k][l]).round();
            let qi = q.to_integer().expect("finite Gram-Schmidt coefficient");
            let (head, tail) = basis.split_at_mut(k);
            for (x, y) in tail[0].iter_mut().zip(&head[l]) {
                *x -= Integer::from(&qi * y);
            }
            let (mhead, mtail) = mu.split_at_mut(k);
            let row = &mut mtail[0];
            row[l] -= &q;
            for i in 0..l {
                row[i] -= Float::with_val(prec, &q * &mhead[l][i]);
            }
        }
        if !changed {
            return;
        }
    }
}

/// Checks the size (up to 0.52) and Lovasz conditions on a basis, for tests.
pub fn is_lll_reduced(basis: &[Vec<Integer>], delta: f64) -> bool {
    let n = basis.len();
    let prec = working_precision(basis) + 64;
    let rows: Vec<Vec<Float>> = basis.iter().map(|r| r.iter().map(|x| Float::with_val(prec, x)).collect()).collect();
    let mut star: Vec<Vec<Float>> = Vec::with_capacity(n);
    let mut norms: Vec<Float> = Vec::with_capacity(n);
    let fdot = |a: &[Float], b: &[Float]| {
        let mut acc = Float::new(prec);
        for (x, y) in a.iter().zip(b) {
            acc += Float::with_val(prec, x * y);
        }
        acc
    };
    let tol = Float::with_val(prec, 0.02);
    for i in 0..n {
        let mut v = rows[i].clone();
        let mut mus = Vec::with_capacity(i);
        for j in 0..i {
            let m = fdot(&rows[i], &star[j]) / &norms[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= Float::with_val(prec, &m * y);
            }
            mus.push(m);
        }
        if mus.iter().any(|m| Float::with_val(prec, m.abs_ref()) > Float::with_val(prec, 0.5) + &tol) {
            return false;
        }
        let nv = fdot(&v, &v);
        if i > 0 {
            let m = &mus[i - 1];
            let bound = Float::with_val(prec, delta - Float::with_val(prec, m.square_ref())) * &norms[i - 1];
            if nv < bound * Float::with_val(prec, 1.0 - 1e-12) {
                return false;
            }
        }
        star.push(v);
        norms.push(nv);
    }
    true
}
