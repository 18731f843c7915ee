//! Weyl-Heisenberg displacement operators and the extended symplectic group
//! `ESL(2, Z/d'Z)`.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SicError};
use crate::linalg::CMatrix;
use crate::scalar::{cis, cabs, Real};

/// `d'`: `d` for odd `d`, `2d` for even `d`.
pub fn dprime(d: usize) -> usize {
    if d % 2 == 0 {
        2 * d
    } else {
        d
    }
}

/// Dimension-dependent constants shared by all operators in dimension `d`.
///
/// The powers of `tau = -e^{i pi/d}` are evaluated once, from a full-precision
/// `pi`, and reused everywhere; `omega = tau^2`.
#[derive(Clone, Debug)]
pub struct DimensionContext<T> {
    d: usize,
    d_prime: usize,
    tau_pow: Vec<Complex<T>>,
    inv_sqrt_d: T,
}

/// Builds a context for dimension `d` at the precision of `T`.
pub fn make_context<T: Real>(d: usize) -> Result<DimensionContext<T>> {
    DimensionContext::new(d)
}

impl<T: Real> DimensionContext<T> {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(SicError::InvalidDimension(d));
        }
        if T::PREC_BITS < 53 {
            return Err(SicError::Precision(T::PREC_BITS));
        }
        let d_prime = dprime(d);
        let pi = T::pi();
        let di = T::from_i64(d as i64);
        // tau^k = exp(i pi k (d+1) / d), reduced exactly modulo 2d.
        let tau_pow = (0..d_prime)
            .map(|k| {
                let m = ((k * (d + 1)) % (2 * d)) as i64;
                cis(&(pi.clone() * T::from_i64(m) / di.clone()))
            })
            .collect();
        let inv_sqrt_d = T::one() / di.sqrt();
        Ok(DimensionContext { d, d_prime, tau_pow, inv_sqrt_d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn d_prime(&self) -> usize {
        self.d_prime
    }

    pub fn precision_bits(&self) -> u32 {
        T::PREC_BITS
    }

    pub fn tau(&self) -> &Complex<T> {
        &self.tau_pow[1 % self.d_prime]
    }

    pub fn omega(&self) -> &Complex<T> {
        self.tau_pow_ref(2)
    }

    /// `tau^k` for any integer `k`.
    pub fn tau_pow_ref(&self, k: i64) -> &Complex<T> {
        &self.tau_pow[k.rem_euclid(self.d_prime as i64) as usize]
    }

    pub fn omega_pow(&self, k: i64) -> &Complex<T> {
        self.tau_pow_ref(2 * k)
    }

    pub fn inv_sqrt_d(&self) -> &T {
        &self.inv_sqrt_d
    }

    /// Unitarity / covariance tolerance `2^{-bits/4}`.
    pub fn tolerance(&self) -> T {
        T::pow2(-(T::PREC_BITS as f64) / 4.0)
    }

    /// Displacement index reduced into `[0, d')`.
    pub fn index(&self, p1: i64, p2: i64) -> DisplacementIndex {
        DisplacementIndex::reduced(p1, p2, self.d_prime)
    }

    /// All indices of `(Z/d'Z)^2` in lexicographic order.
    pub fn all_indices_mod_dprime(&self) -> impl Iterator<Item = DisplacementIndex> {
        let n = self.d_prime as u32;
        (0..n).flat_map(move |p1| (0..n).map(move |p2| DisplacementIndex { p1, p2 }))
    }

    /// All indices of `(Z/dZ)^2` in lexicographic order.
    pub fn all_indices_mod_d(&self) -> impl Iterator<Item = DisplacementIndex> {
        let n = self.d as u32;
        (0..n).flat_map(move |p1| (0..n).map(move |p2| DisplacementIndex { p1, p2 }))
    }

    pub fn identity_matrix(&self) -> SymplecticMatrix {
        SymplecticMatrix::identity(self.d_prime as i64)
    }
}

/// Element `p = (p1, p2)` of `(Z/d'Z)^2`, stored in canonical range `[0, d')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DisplacementIndex {
    pub p1: u32,
    pub p2: u32,
}

impl DisplacementIndex {
    pub fn reduced(p1: i64, p2: i64, modulus: usize) -> Self {
        let m = modulus as i64;
        DisplacementIndex { p1: p1.rem_euclid(m) as u32, p2: p2.rem_euclid(m) as u32 }
    }

    pub fn is_zero_mod(&self, d: usize) -> bool {
        self.p1 as usize % d == 0 && self.p2 as usize % d == 0
    }

    pub fn as_pair(&self) -> (i64, i64) {
        (self.p1 as i64, self.p2 as i64)
    }
}

impl fmt::Display for DisplacementIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p1, self.p2)
    }
}

/// Symplectic form `<p, q> = p2 q1 - p1 q2`, so that
/// `D_p D_q = tau^{<p,q>} D_{p+q}`.
pub fn symplectic_form(p: (i64, i64), q: (i64, i64)) -> i64 {
    p.1 * q.0 - p.0 * q.1
}

/// A 2x2 matrix over `Z/nZ` with determinant `+-1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    entries: [[i64; 2]; 2],
    modulus: i64,
}

impl fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, e]] = self.entries;
        write!(f, "[[{a}, {b}], [{c}, {e}]] mod {}", self.modulus)
    }
}

impl fmt::Display for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, e]] = self.entries;
        write!(f, "[[{a}, {b}], [{c}, {e}]]")
    }
}

impl SymplecticMatrix {
    /// Reduces the entries mod `modulus` and checks `det = +-1`.
    pub fn new(entries: [[i64; 2]; 2], modulus: i64) -> Result<Self> {
        let m = Self::reduced(entries, modulus);
        let det = m.det_raw();
        if det == 1 % modulus || det == (modulus - 1) % modulus {
            Ok(m)
        } else {
            let [[a, b], [c, e]] = m.entries;
            Err(SicError::NotSymplectic { a, b, c, e, modulus })
        }
    }

    fn reduced(entries: [[i64; 2]; 2], modulus: i64) -> Self {
        let r = |x: i64| x.rem_euclid(modulus);
        SymplecticMatrix {
            entries: [[r(entries[0][0]), r(entries[0][1])], [r(entries[1][0]), r(entries[1][1])]],
            modulus,
        }
    }

    pub fn identity(modulus: i64) -> Self {
        Self::reduced([[1, 0], [0, 1]], modulus)
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.entries
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn alpha(&self) -> i64 {
        self.entries[0][0]
    }
    pub fn beta(&self) -> i64 {
        self.entries[0][1]
    }
    pub fn gamma(&self) -> i64 {
        self.entries[1][0]
    }
    pub fn delta(&self) -> i64 {
        self.entries[1][1]
    }

    fn det_raw(&self) -> i64 {
        let [[a, b], [c, e]] = self.entries;
        (a * e - b * c).rem_euclid(self.modulus)
    }

    /// Determinant as `+1` or `-1` (for modulus 2 the two coincide; `+1` is returned).
    pub fn det(&self) -> i64 {
        if self.det_raw() == 1 % self.modulus {
            1
        } else {
            -1
        }
    }

    pub fn trace(&self) -> i64 {
        (self.entries[0][0] + self.entries[1][1]).rem_euclid(self.modulus)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.modulus)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus, "moduli differ");
        let a = self.entries;
        let b = other.entries;
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::reduced(out, self.modulus)
    }

    pub fn inverse(&self) -> Self {
        // det^{-1} = det for det = +-1
        let det = self.det();
        let [[a, b], [c, e]] = self.entries;
        Self::reduced([[det * e, -det * b], [-det * c, det * a]], self.modulus)
    }

    pub fn scaled(&self, s: i64) -> Self {
        let [[a, b], [c, e]] = self.entries;
        Self::reduced([[s * a, s * b], [s * c, s * e]], self.modulus)
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::identity(self.modulus);
        let mut base = *self;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order in `ESL(2, Z/nZ)`.
    pub fn order(&self) -> u64 {
        let id = Self::identity(self.modulus);
        let mut acc = *self;
        let mut k = 1u64;
        while acc != id {
            acc = acc.mul(self);
            k += 1;
        }
        k
    }

    pub fn apply(&self, p: DisplacementIndex) -> DisplacementIndex {
        let [[a, b], [c, e]] = self.entries;
        let (p1, p2) = p.as_pair();
        DisplacementIndex::reduced(a * p1 + b * p2, c * p1 + e * p2, self.modulus as usize)
    }

    /// Entries reduced mod `n` (which must divide the modulus).
    pub fn reduce_mod(&self, n: i64) -> [[i64; 2]; 2] {
        let r = |x: i64| x.rem_euclid(n);
        let [[a, b], [c, e]] = self.entries;
        [[r(a), r(b)], [r(c), r(e)]]
    }
}

/// Iterates over every element of `ESL(2, Z/nZ)` in lexicographic entry order.
pub fn esl_elements(modulus: i64) -> impl Iterator<Item = SymplecticMatrix> {
    let n = modulus;
    (0..n).flat_map(move |a| {
        (0..n).flat_map(move |b| {
            (0..n).flat_map(move |c| (0..n).filter_map(move |e| SymplecticMatrix::new([[a, b], [c, e]], n).ok()))
        })
    })
}

/// `J = diag(1, -1)`, the symplectic label of complex conjugation.
pub fn conjugation_matrix(modulus: i64) -> SymplecticMatrix {
    SymplecticMatrix::reduced([[1, 0], [0, -1]], modulus)
}

/// Zauner matrix `F_z = [[0, d-1], [d+1, d-1]]` mod `d'`.
pub fn zauner_matrix<T: Real>(ctx: &DimensionContext<T>) -> SymplecticMatrix {
    let d = ctx.d() as i64;
    SymplecticMatrix::new([[0, d - 1], [d + 1, d - 1]], ctx.d_prime() as i64)
        .expect("Zauner matrix has determinant 1")
}

/// Type-a order-3 matrix `[[1, d+3], [4d/3 - 1, d-2]]` mod `d'`; requires `3 | d`.
pub fn fa_matrix<T: Real>(ctx: &DimensionContext<T>) -> Result<SymplecticMatrix> {
    let d = ctx.d() as i64;
    if d % 3 != 0 {
        return Err(SicError::Domain(format!("F_a needs d divisible by 3, got d = {d}")));
    }
    SymplecticMatrix::new([[1, d + 3], [4 * d / 3 - 1, d - 2]], ctx.d_prime() as i64)
}

pub fn symplectic_mul<T: Real>(
    f: &SymplecticMatrix,
    g: &SymplecticMatrix,
    ctx: &DimensionContext<T>,
) -> Result<SymplecticMatrix> {
    let m = ctx.d_prime() as i64;
    let f = SymplecticMatrix::new(f.entries(), m)?;
    let g = SymplecticMatrix::new(g.entries(), m)?;
    Ok(f.mul(&g))
}

pub fn symplectic_order<T: Real>(f: &SymplecticMatrix, ctx: &DimensionContext<T>) -> Result<u64> {
    Ok(SymplecticMatrix::new(f.entries(), ctx.d_prime() as i64)?.order())
}

/// `Tr F = -1 (mod d)` and `F != I`.
pub fn is_canonical_order3<T: Real>(f: &SymplecticMatrix, ctx: &DimensionContext<T>) -> Result<bool> {
    let f = SymplecticMatrix::new(f.entries(), ctx.d_prime() as i64)?;
    let d = ctx.d() as i64;
    Ok(f.trace().rem_euclid(d) == (d - 1) && !f.is_identity())
}

/// A `d x d` matrix, optionally composed with complex conjugation on the right.
///
/// With `antiunitary` set the operator acts as `v -> M conj(v)`.
#[derive(Clone, Debug)]
pub struct UnitaryOperator<T> {
    pub matrix: CMatrix<T>,
    pub antiunitary: bool,
}

impl<T: Real> UnitaryOperator<T> {
    pub fn unitary(matrix: CMatrix<T>) -> Self {
        UnitaryOperator { matrix, antiunitary: false }
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(CMatrix::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `self * other`, tracking conjugation: `(A K^a)(B K^b) = A conj^a(B) K^{a+b}`.
    pub fn compose(&self, other: &Self) -> Self {
        let rhs = if self.antiunitary { other.matrix.conj() } else { other.matrix.clone() };
        UnitaryOperator { matrix: self.matrix.mul(&rhs), antiunitary: self.antiunitary ^ other.antiunitary }
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        if self.antiunitary {
            let c: Vec<_> = v.iter().map(|z| z.conj()).collect();
            self.matrix.mul_vec(&c)
        } else {
            self.matrix.mul_vec(v)
        }
    }

    /// `W A W^{-1}` for a linear operator `A`.
    pub fn conjugate(&self, a: &CMatrix<T>) -> CMatrix<T> {
        let inner = if self.antiunitary { a.conj() } else { a.clone() };
        self.matrix.mul(&inner).mul(&self.matrix.adjoint())
    }

    /// Largest entry of `M^dagger M - I`.
    pub fn unitarity_error(&self) -> T {
        let n = self.dim();
        self.matrix.adjoint().mul(&self.matrix).max_abs_diff(&CMatrix::identity(n))
    }

    pub fn scale(&self, phase: &Complex<T>) -> Self {
        UnitaryOperator { matrix: self.matrix.scale(phase), antiunitary: self.antiunitary }
    }
}

/// `D_p = tau^{p1 p2} X^{p1} Z^{p2}` with `X|k> = |k+1>`, `Z|k> = omega^k |k>`.
pub fn displacement<T: Real>(ctx: &DimensionContext<T>, p: DisplacementIndex) -> UnitaryOperator<T> {
    let d = ctx.d();
    let (p1, p2) = p.as_pair();
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        let row = (k + p1 as usize) % d;
        m.set(row, k, ctx.tau_pow_ref(p1 * p2 + 2 * p2 * k as i64).clone());
    }
    UnitaryOperator::unitary(m)
}

/// `D_p v` without forming the matrix.
pub fn apply_displacement<T: Real>(ctx: &DimensionContext<T>, p: DisplacementIndex, v: &[Complex<T>]) -> Vec<Complex<T>> {
    let d = ctx.d();
    let (p1, p2) = p.as_pair();
    let mut out = vec![crate::scalar::czero::<T>(); d];
    for (k, vk) in v.iter().enumerate() {
        let row = (k + p1 as usize) % d;
        out[row] = ctx.tau_pow_ref(p1 * p2 + 2 * p2 * k as i64).clone() * vk.clone();
    }
    out
}

/// `max_{p,q in (Z/dZ)^2} |Tr(D_p D_q^dagger) - d delta_{p,q}|`.
pub fn verify_displacement_orthogonality<T: Real>(ctx: &DimensionContext<T>) -> T {
    let ops: Vec<_> = ctx.all_indices_mod_d().map(|p| (p, displacement(ctx, p).matrix)).collect();
    let d = T::from_i64(ctx.d() as i64);
    let mut worst = T::zero();
    for (p, dp) in &ops {
        for (q, dq) in &ops {
            // Tr(D_p D_q^dagger) = conj(Tr(D_q^dagger D_p)) = conj(<D_q, D_p>_HS)
            let tr = dq.hs_inner(dp);
            let expected = if p == q { d.clone() } else { T::zero() };
            let err = cabs(&(tr - Complex::new(expected, T::zero())));
            if err > worst {
                worst = err;
            }
        }
    }
    worst
}
