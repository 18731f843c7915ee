//! Projective Clifford representation `F -> U_F`.

use num_complex::Complex;
use num_integer::Integer;

use crate::error::{Result, SicError};
use crate::linalg::{distance, phase_aligned_distance, CMatrix};
use crate::scalar::Real;
use crate::wh_group::{conjugation_matrix, displacement, DimensionContext, DisplacementIndex, SymplecticMatrix, UnitaryOperator};

/// `D_p U_F` together with its symplectic and displacement labels.
#[derive(Clone, Debug)]
pub struct CliffordElement<T> {
    pub symplectic_part: SymplecticMatrix,
    pub displacement_part: DisplacementIndex,
    pub operator: UnitaryOperator<T>,
}

impl<T: Real> CliffordElement<T> {
    pub fn new(ctx: &DimensionContext<T>, f: &SymplecticMatrix, p: DisplacementIndex) -> Result<Self> {
        let u = clifford_unitary(ctx, f)?;
        let operator = displacement(ctx, p).compose(&u);
        Ok(CliffordElement { symplectic_part: *f, displacement_part: p, operator })
    }
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let g = a.extended_gcd(&m);
    if g.gcd == 1 {
        Some(g.x.rem_euclid(m))
    } else {
        None
    }
}

/// `U[j][k] = tau^{b^-1 (e j^2 - 2 j k + a k^2)} / sqrt(d)` for invertible `b`.
fn quadratic_unitary<T: Real>(ctx: &DimensionContext<T>, f: &SymplecticMatrix, beta_inv: i64) -> CMatrix<T> {
    let d = ctx.d();
    let m = ctx.d_prime() as i64;
    let (a, e) = (f.alpha(), f.delta());
    let s = ctx.inv_sqrt_d().clone();
    CMatrix::from_fn(d, d, |j, k| {
        let (j, k) = (j as i64, k as i64);
        let q = (e * j * j - 2 * j * k + a * k * k).rem_euclid(m);
        ctx.tau_pow_ref(beta_inv * q % m).clone().scale(s.clone())
    })
}

/// Unitary part for a determinant-one matrix.
fn special_unitary<T: Real>(ctx: &DimensionContext<T>, f: &SymplecticMatrix) -> CMatrix<T> {
    let m = ctx.d_prime() as i64;
    if let Some(bi) = mod_inverse(f.beta(), m) {
        return quadratic_unitary(ctx, f, bi);
    }
    // F = F1 F2 with F2 = [[a, 1], [-1, 0]]; F1 has upper-right entry a b - alpha.
    for a in 0..m {
        if let Some(bi1) = mod_inverse(a * f.beta() - f.alpha(), m) {
            let f2 = SymplecticMatrix::new([[a, 1], [-1, 0]], m).expect("det 1");
            let f1 = f.mul(&f2.inverse());
            return quadratic_unitary(ctx, &f1, bi1).mul(&quadratic_unitary(ctx, &f2, 1));
        }
    }
    unreachable!("a factorization with invertible upper-right entries always exists")
}

/// Returns `U_F` with `U_F D_p U_F^dagger = D_{Fp}`; for `det F = -1` the result
/// is antiunitary.
pub fn clifford_unitary<T: Real>(ctx: &DimensionContext<T>, f: &SymplecticMatrix) -> Result<UnitaryOperator<T>> {
    let f = SymplecticMatrix::new(f.entries(), ctx.d_prime() as i64)?;
    if f.det() == 1 {
        Ok(UnitaryOperator::unitary(special_unitary(ctx, &f)))
    } else {
        // U_F = U_{FJ} K, since K D_p K = D_{Jp}.
        let fj = f.mul(&conjugation_matrix(ctx.d_prime() as i64));
        Ok(UnitaryOperator { matrix: special_unitary(ctx, &fj), antiunitary: true })
    }
}

/// Largest normalized distance `||U D_p U^dagger - D_{Fp}|| / sqrt(d)` over
/// nonzero `p` mod `d'`.
///
/// The distance is taken without phase alignment: conjugation already removes
/// any global phase of `U`, so an exact representation gives zero.
pub fn covariance_error<T: Real>(ctx: &DimensionContext<T>, u: &UnitaryOperator<T>, f: &SymplecticMatrix) -> Result<T> {
    let f = SymplecticMatrix::new(f.entries(), ctx.d_prime() as i64)?;
    let mut worst = T::zero();
    for p in ctx.all_indices_mod_dprime().skip(1) {
        let lhs = u.conjugate(&displacement(ctx, p).matrix);
        let rhs = displacement(ctx, f.apply(p)).matrix;
        let e = distance(&lhs, &rhs);
        if e > worst {
            worst = e;
        }
    }
    Ok(worst)
}

pub const DEFAULT_ORDER_BOUND: usize = 24;

/// Smallest `k >= 1` with `U^k` proportional to the identity.
pub fn projective_order<T: Real>(ctx: &DimensionContext<T>, u: &UnitaryOperator<T>) -> Result<usize> {
    projective_order_bounded(ctx, u, DEFAULT_ORDER_BOUND)
}

pub fn projective_order_bounded<T: Real>(ctx: &DimensionContext<T>, u: &UnitaryOperator<T>, bound: usize) -> Result<usize> {
    let id = CMatrix::identity(ctx.d());
    let tol = ctx.tolerance();
    let mut acc = u.clone();
    for k in 1..=bound {
        if !acc.antiunitary && phase_aligned_distance(&acc.matrix, &id) < tol {
            return Ok(k);
        }
        acc = acc.compose(u);
    }
    Err(SicError::OrderUndetermined(bound))
}

/// Phase `c` with `(c U)^n = I` for a unitary of projective order dividing `n`.
pub fn normalizing_phase<T: Real>(u: &UnitaryOperator<T>, n: usize) -> Complex<T> {
    let mut acc = u.clone();
    for _ in 1..n {
        acc = acc.compose(u);
    }
    // U^n = lambda I, lambda = Tr(U^n) / d; c = lambda^{-1/n} on the principal branch
    let d = T::from_i64(u.dim() as i64);
    let lambda = acc.matrix.trace().unscale(d);
    let theta = crate::scalar::carg(&lambda);
    crate::scalar::cis(&(-theta / T::from_i64(n as i64)))
}
