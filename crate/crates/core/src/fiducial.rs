//! SIC fiducial search: frame-potential minimization on the unit sphere,
//! optionally restricted to an eigenspace of an order-3 Clifford unitary,
//! followed by Levenberg-Marquardt polishing at higher precision.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{clifford_unitary, normalizing_phase, projective_order};
use crate::error::{Result, SicError};
use crate::linalg::{inner, solve_spd, vec_norm, CMatrix};
use crate::scalar::{cabs, cconvert, cis, czero, Real};
use crate::wh_group::{fa_matrix, zauner_matrix, DimensionContext, DisplacementIndex, SymplecticMatrix};

/// Which order-3 symmetry a fiducial was searched under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryType {
    #[serde(rename = "z")]
    TypeZ,
    #[serde(rename = "a")]
    TypeA,
    #[serde(rename = "unknown")]
    Unknown,
}

impl SymmetryType {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymmetryType::TypeZ => "z",
            SymmetryType::TypeA => "a",
            SymmetryType::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fiducial<T> {
    pub vector: Vec<Complex<T>>,
    pub dimension: usize,
    pub residual: T,
    pub seed: u64,
    pub symmetry_type: SymmetryType,
    pub converged: bool,
}

impl<T: Real> Fiducial<T> {
    /// Wraps a vector, normalizing it and computing its residual.
    pub fn from_vector(ctx: &DimensionContext<T>, v: Vec<Complex<T>>, seed: u64, symmetry_type: SymmetryType) -> Result<Self> {
        if v.len() != ctx.d() {
            return Err(SicError::Domain(format!("vector has length {}, expected {}", v.len(), ctx.d())));
        }
        let vector = crate::linalg::normalized(&v).ok_or_else(|| SicError::Domain("zero vector".into()))?;
        let residual = sic_residual(ctx, &vector)?;
        Ok(Fiducial { dimension: ctx.d(), vector, residual, seed, symmetry_type, converged: false })
    }

    /// Same vector at another precision; the residual is recomputed.
    pub fn convert<U: Real>(&self, ctx: &DimensionContext<U>) -> Result<Fiducial<U>> {
        let v = self.vector.iter().map(cconvert).collect();
        let mut f = Fiducial::from_vector(ctx, v, self.seed, self.symmetry_type)?;
        f.converged = self.converged;
        Ok(f)
    }

    pub fn projector(&self) -> CMatrix<T> {
        let n = self.dimension;
        CMatrix::from_fn(n, n, |i, j| self.vector[i].clone() * self.vector[j].conj())
    }
}

/// `<v| D_p |v>` and `D_p v`.
fn overlap_and_image<T: Real>(ctx: &DimensionContext<T>, p: DisplacementIndex, v: &[Complex<T>]) -> (Complex<T>, Vec<Complex<T>>) {
    let dv = crate::wh_group::apply_displacement(ctx, p, v);
    (inner(v, &dv), dv)
}

/// `D_p^dagger v`.
fn apply_adjoint<T: Real>(ctx: &DimensionContext<T>, p: DisplacementIndex, v: &[Complex<T>]) -> Vec<Complex<T>> {
    let d = ctx.d();
    let (p1, p2) = p.as_pair();
    (0..d)
        .map(|k| ctx.tau_pow_ref(p1 * p2 + 2 * p2 * k as i64).conj() * v[(k + p1 as usize) % d].clone())
        .collect()
}

/// `<v| D_p |v>` for a vector of any norm.
pub fn overlap<T: Real>(ctx: &DimensionContext<T>, p: DisplacementIndex, v: &[Complex<T>]) -> Complex<T> {
    overlap_and_image(ctx, p, v).0
}

/// `max_{p != 0} | |<v|D_p|v>|^2 - 1/(d+1) |` with `v` normalized first.
pub fn sic_residual<T: Real>(ctx: &DimensionContext<T>, v: &[Complex<T>]) -> Result<T> {
    let n2 = vec_norm(v);
    if n2.is_zero() {
        return Err(SicError::Domain("zero vector".into()));
    }
    let n4 = {
        let s = n2.clone() * n2;
        s.clone() * s
    };
    let target = T::one() / T::from_i64(ctx.d() as i64 + 1);
    let mut worst = T::zero();
    for p in ctx.all_indices_mod_d().skip(1) {
        let g = overlap(ctx, p, v);
        let r = (g.norm_sqr() / n4.clone() - target.clone()).abs();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// `sum_{p in (Z/dZ)^2} |<v|D_p|v>|^4` for a unit vector.
pub fn frame_potential<T: Real>(ctx: &DimensionContext<T>, v: &[Complex<T>]) -> T {
    let mut acc = T::zero();
    for p in ctx.all_indices_mod_d() {
        let m = overlap(ctx, p, v).norm_sqr();
        acc += m.clone() * m;
    }
    acc
}

/// Frame potential and its real gradient `8 sum_p |g_p|^2 conj(g_p) D_p v`,
/// written as a complex vector `df/dRe + i df/dIm`.
pub fn frame_potential_gradient<T: Real>(ctx: &DimensionContext<T>, v: &[Complex<T>]) -> (T, Vec<Complex<T>>) {
    let mut f = T::zero();
    let mut grad = vec![czero::<T>(); v.len()];
    for p in ctx.all_indices_mod_d() {
        let (g, dv) = overlap_and_image(ctx, p, v);
        let m = g.norm_sqr();
        f += m.clone() * m.clone();
        let c = g.conj().scale(m * T::from_i64(8));
        for (gk, dk) in grad.iter_mut().zip(dv) {
            *gk += c.clone() * dk;
        }
    }
    (f, grad)
}

/// `2d/(d+1)`, the minimum of the frame potential.
pub fn frame_potential_minimum<T: Real>(d: usize) -> T {
    T::from_i64(2 * d as i64) / T::from_i64(d as i64 + 1)
}

/// Orthonormal basis (as columns) of the largest eigenspace of `U_F` for an
/// order-3 `F`.
///
/// `U_F` is rescaled so that its cube is the identity. Among eigenvalues of
/// maximal multiplicity the one whose predecessor `mu omega3^-1` has the smallest
/// multiplicity is chosen; with that orientation the choice coincides with the
/// eigenvalue-1 space of `e^{i pi (d-1)/12} U_{F_z}`. The rescaling is then
/// fixed so that the chosen eigenvalue is 1.
pub fn zauner_eigenspace_basis<T: Real>(ctx: &DimensionContext<T>, f: &SymplecticMatrix) -> Result<CMatrix<T>> {
    Ok(eigenspace_decomposition(ctx, f)?.basis)
}

#[derive(Clone, Debug)]
pub struct EigenspaceDecomposition<T> {
    /// Multiplicities of the eigenvalues `1, omega3, omega3^2` of the cube-normalized unitary.
    pub multiplicities: [usize; 3],
    /// Index into `multiplicities` of the chosen eigenvalue.
    pub chosen: usize,
    pub basis: CMatrix<T>,
}

pub fn eigenspace_decomposition<T: Real>(ctx: &DimensionContext<T>, f: &SymplecticMatrix) -> Result<EigenspaceDecomposition<T>> {
    let u = clifford_unitary(ctx, f)?;
    if u.antiunitary {
        return Err(SicError::Domain(format!("{f} has determinant -1")));
    }
    match projective_order(ctx, &u) {
        Ok(3) => {}
        Ok(k) => return Err(SicError::Domain(format!("U_F has projective order {k}, not 3"))),
        Err(_) => return Err(SicError::Domain("U_F does not have projective order 3".into())),
    }
    let d = ctx.d();
    let v = u.matrix.scale(&normalizing_phase(&u, 3));
    let v2 = v.mul(&v);
    let third = T::one() / T::from_i64(3);
    let w3 = |k: i64| cis(&(T::pi() * T::from_i64(2 * k) / T::from_i64(3)));
    let id = CMatrix::identity(d);
    let projectors: Vec<CMatrix<T>> = (0..3)
        .map(|k| {
            // (I + conj(mu) V + conj(mu)^2 V^2) / 3 for mu = omega3^k
            id.add(&v.scale(&w3(-k))).add(&v2.scale(&w3(-2 * k))).scale(&Complex::new(third.clone(), T::zero()))
        })
        .collect();
    let mut mult = [0usize; 3];
    for (k, p) in projectors.iter().enumerate() {
        mult[k] = p.trace().re.to_f64().round() as usize;
    }
    if mult.iter().sum::<usize>() != d {
        return Err(SicError::Domain("eigenspace multiplicities do not sum to d".into()));
    }
    let max = *mult.iter().max().unwrap();
    let chosen = (0..3)
        .filter(|&k| mult[k] == max)
        .min_by_key(|&k| (mult[(k + 2) % 3], k))
        .unwrap();
    let basis = column_basis(&projectors[chosen], max);
    Ok(EigenspaceDecomposition { multiplicities: mult, chosen, basis })
}

/// Orthonormal basis of the range of a rank-`k` projector, by Gram-Schmidt with
/// largest-residual column pivoting.
fn column_basis<T: Real>(p: &CMatrix<T>, k: usize) -> CMatrix<T> {
    let d = p.rows();
    let mut cols: Vec<Vec<Complex<T>>> = (0..p.cols()).map(|j| p.column(j)).collect();
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(k);
    for _ in 0..k {
        let (j, _) = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (j, vec_norm(c)))
            .fold(None, |best: Option<(usize, T)>, (j, n)| match best {
                Some((_, ref bn)) if *bn >= n => best,
                _ => Some((j, n)),
            })
            .unwrap();
        let b = crate::linalg::normalized(&cols[j]).expect("projector rank");
        for c in cols.iter_mut() {
            let proj = inner(&b, c);
            for (ci, bi) in c.iter_mut().zip(&b) {
                *ci -= bi.clone() * proj.clone();
            }
        }
        basis.push(b);
    }
    CMatrix::from_fn(d, k, |i, j| basis[j][i].clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_restarts: usize,
    pub inner_iterations: usize,
    pub coarse_precision_bits: u32,
    pub polish_precision_bits: u32,
    pub eigenspace_restriction: bool,
    /// Order-3 symmetry used when the restriction is on.
    pub symmetry: SymmetryType,
    pub rng_seed: u64,
    pub target_residual: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_restarts: 64,
            inner_iterations: 2000,
            coarse_precision_bits: 53,
            polish_precision_bits: crate::DEFAULT_PRECISION_BITS,
            eigenspace_restriction: true,
            symmetry: SymmetryType::TypeZ,
            rng_seed: 1,
            target_residual: 1e-12,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.polish_precision_bits < self.coarse_precision_bits {
            return Err(SicError::Domain("polish precision must not be below coarse precision".into()));
        }
        if self.max_restarts == 0 {
            return Err(SicError::Domain("max_restarts must be positive".into()));
        }
        if !(self.target_residual > 0.0) {
            return Err(SicError::Domain("target_residual must be positive".into()));
        }
        Ok(())
    }
}

/// Restarts evaluated together; batches are merged in index order.
const RESTART_BATCH: usize = 8;

/// Residual below which a descent result is handed to the polisher.
const POLISH_ENTRY: f64 = 1e-6;

/// Random-restart search for a fiducial; deterministic in `cfg.rng_seed`.
pub fn search<T: Real>(ctx: &DimensionContext<T>, cfg: &SearchConfig) -> Result<Fiducial<T>> {
    cfg.validate()?;
    let d = ctx.d();
    let (basis, symmetry) = if cfg.eigenspace_restriction {
        let f = match cfg.symmetry {
            SymmetryType::TypeA => fa_matrix(ctx)?,
            _ => zauner_matrix(ctx),
        };
        let sym = if cfg.symmetry == SymmetryType::TypeA { SymmetryType::TypeA } else { SymmetryType::TypeZ };
        (zauner_eigenspace_basis(ctx, &f)?, sym)
    } else {
        (CMatrix::identity(d), SymmetryType::Unknown)
    };
    let target = T::from_f64(cfg.target_residual);

    let mut best: Option<(T, usize, Vec<Complex<T>>)> = None;
    let mut start = 0;
    while start < cfg.max_restarts {
        let end = (start + RESTART_BATCH).min(cfg.max_restarts);
        let batch: Vec<(usize, Result<(T, Vec<Complex<T>>)>)> = (start..end)
            .into_par_iter()
            .map(|i| (i, single_restart(ctx, &basis, cfg, i)))
            .collect();
        for (i, r) in batch {
            let (res, v) = r?;
            let better = match &best {
                None => true,
                Some((b, bi, _)) => res < *b || (res == *b && i < *bi),
            };
            if better {
                best = Some((res, i, v));
            }
        }
        if best.as_ref().is_some_and(|(r, _, _)| *r <= target) {
            break;
        }
        start = end;
    }
    let (residual, _, vector) = best.expect("at least one restart");
    Ok(Fiducial { dimension: d, converged: residual <= target, vector, residual, seed: cfg.rng_seed, symmetry_type: symmetry })
}

fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn single_restart<T: Real>(ctx: &DimensionContext<T>, basis: &CMatrix<T>, cfg: &SearchConfig, index: usize) -> Result<(T, Vec<Complex<T>>)> {
    let mut rng = restart_rng(cfg.rng_seed, index);
    let k = basis.cols();
    let c0: Vec<Complex<T>> = (0..k)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::from_f64(re), T::from_f64(im))
        })
        .collect();
    let c = crate::linalg::normalized(&c0).ok_or_else(|| SicError::Domain("degenerate start".into()))?;
    let c = descend(ctx, basis, c, cfg.inner_iterations);
    let v = basis.mul_vec(&c);
    let res = sic_residual(ctx, &v)?;
    if res.to_f64() < POLISH_ENTRY {
        let f = Fiducial { dimension: ctx.d(), vector: v.clone(), residual: res.clone(), seed: cfg.rng_seed, symmetry_type: SymmetryType::Unknown, converged: false };
        if let Ok(p) = polish_in_place(ctx, &f) {
            return Ok((p.residual, p.vector));
        }
    }
    Ok((res, v))
}

/// Value and tangent gradient of the frame potential at a unit `c` in the
/// coordinates `v = B c`.
fn restricted_objective<T: Real>(ctx: &DimensionContext<T>, basis: &CMatrix<T>, c: &[Complex<T>]) -> (T, Vec<Complex<T>>) {
    let v = basis.mul_vec(c);
    let (f, gv) = frame_potential_gradient(ctx, &v);
    let mut g = basis.adjoint().mul_vec(&gv);
    // homogeneous objective f / |c|^8: remove the radial part 8 f c
    let eight_f = f.clone() * T::from_i64(8);
    for (gi, ci) in g.iter_mut().zip(c) {
        *gi -= ci.clone().scale(eight_f.clone());
    }
    (f, g)
}

fn real_dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    inner(a, b).re
}

fn retract<T: Real>(x: &[Complex<T>], dir: &[Complex<T>], t: &T) -> Vec<Complex<T>> {
    let y: Vec<Complex<T>> = x.iter().zip(dir).map(|(a, b)| a.clone() + b.clone().scale(t.clone())).collect();
    crate::linalg::normalized(&y).unwrap_or_else(|| x.to_vec())
}

/// Polak-Ribiere+ conjugate gradient on the unit sphere with Armijo backtracking.
fn descend<T: Real>(ctx: &DimensionContext<T>, basis: &CMatrix<T>, mut x: Vec<Complex<T>>, iterations: usize) -> Vec<Complex<T>> {
    let (mut f, mut g) = restricted_objective(ctx, basis, &x);
    let mut dir: Vec<Complex<T>> = g.iter().map(|z| -z.clone()).collect();
    let mut step = T::from_f64(0.1);
    let gtol = T::epsilon().sqrt() * T::from_f64(1e-2);
    for _ in 0..iterations {
        let gnorm2 = real_dot(&g, &g);
        if gnorm2.clone().sqrt() < gtol {
            break;
        }
        let mut slope = real_dot(&g, &dir);
        if slope >= T::zero() {
            dir = g.iter().map(|z| -z.clone()).collect();
            slope = -gnorm2.clone();
        }
        let mut t = step.clone() * T::from_i64(2);
        let mut accepted = None;
        for _ in 0..60 {
            let y = retract(&x, &dir, &t);
            let (fy, gy) = restricted_objective(ctx, basis, &y);
            if fy <= f.clone() + T::from_f64(1e-4) * t.clone() * slope.clone() {
                accepted = Some((y, fy, gy));
                break;
            }
            t = t / T::from_i64(2);
        }
        let Some((y, fy, gy)) = accepted else { break };
        // Polak-Ribiere+ with the previous gradient treated as tangent at y
        let diff: Vec<Complex<T>> = gy.iter().zip(&g).map(|(a, b)| a.clone() - b.clone()).collect();
        let beta = T::max_of(real_dot(&gy, &diff) / gnorm2, T::zero());
        let mut nd: Vec<Complex<T>> = gy.iter().zip(&dir).map(|(a, b)| -a.clone() + b.clone().scale(beta.clone())).collect();
        let radial = real_dot(&y, &nd);
        for (ni, yi) in nd.iter_mut().zip(&y) {
            *ni -= yi.clone().scale(radial.clone());
        }
        x = y;
        f = fy;
        g = gy;
        dir = nd;
        step = t;
    }
    x
}

/// Coarse search in `f64` followed by a polish at the precision of `ctx`.
///
/// An unconverged coarse result is returned converted but unpolished.
pub fn find_fiducial<U: Real>(ctx: &DimensionContext<U>, cfg: &SearchConfig) -> Result<Fiducial<U>> {
    let coarse_ctx = DimensionContext::<f64>::new(ctx.d())?;
    let coarse = search(&coarse_ctx, cfg)?;
    if U::PREC_BITS <= f64::PREC_BITS || !(coarse.residual < POLISH_ENTRY) {
        return coarse.convert(ctx);
    }
    polish(ctx, &coarse)
}

/// Re-optimizes `f` at the precision of `ctx` with Levenberg-Marquardt steps on
/// the overlap-magnitude residuals.
pub fn polish<T: Real, U: Real>(ctx: &DimensionContext<U>, f: &Fiducial<T>) -> Result<Fiducial<U>> {
    if !(f.residual.to_f64() < POLISH_ENTRY) {
        return Err(SicError::PolishFailure(format!(
            "input residual {:e} is above the polish threshold {POLISH_ENTRY:e}",
            f.residual.to_f64()
        )));
    }
    let start = f.convert(ctx)?;
    let mut out = polish_in_place(ctx, &start)?;
    out.converged = f.converged || out.residual.to_f64() <= 1e-12;
    Ok(out)
}

fn polish_in_place<T: Real>(ctx: &DimensionContext<T>, f: &Fiducial<T>) -> Result<Fiducial<T>> {
    let d = ctx.d();
    let n = 2 * d;
    let a = T::one() / T::from_i64(d as i64 + 1);
    let floor = T::epsilon() * T::from_i64(64);
    let damping_floor = T::epsilon();
    let indices: Vec<DisplacementIndex> = ctx.all_indices_mod_d().skip(1).collect();

    let mut v = crate::linalg::normalized(&f.vector).ok_or_else(|| SicError::Domain("zero vector".into()))?;
    let mut res = sic_residual(ctx, &v)?;
    let mut best = (res.clone(), v.clone());
    let mut stalled = 0;
    let mut rising = 0;
    for _ in 0..200 {
        if res <= floor {
            break;
        }
        // rows: overlap magnitudes, normalization, phase gauge
        let mut rows: Vec<(Vec<T>, T)> = Vec::with_capacity(indices.len() + 2);
        for &p in &indices {
            let (g, dv) = overlap_and_image(ctx, p, &v);
            let dav = apply_adjoint(ctx, p, &v);
            let mut row = vec![T::zero(); n];
            for k in 0..d {
                let w = g.conj() * dv[k].clone() + g.clone() * dav[k].clone();
                row[k] = w.re * T::from_i64(2);
                row[d + k] = w.im * T::from_i64(2);
            }
            rows.push((row, g.norm_sqr() - a.clone()));
        }
        let mut norm_row = vec![T::zero(); n];
        let mut gauge_row = vec![T::zero(); n];
        for k in 0..d {
            norm_row[k] = v[k].re.clone() * T::from_i64(2);
            norm_row[d + k] = v[k].im.clone() * T::from_i64(2);
            gauge_row[k] = -v[k].im.clone();
            gauge_row[d + k] = v[k].re.clone();
        }
        rows.push((norm_row, T::zero()));
        rows.push((gauge_row, T::zero()));

        let mut jtj = vec![T::zero(); n * n];
        let mut jtr = vec![T::zero(); n];
        let mut rnorm2 = T::zero();
        for (row, r) in &rows {
            rnorm2 += r.clone() * r.clone();
            for i in 0..n {
                if row[i].is_zero() {
                    continue;
                }
                jtr[i] -= row[i].clone() * r.clone();
                for j in 0..n {
                    jtj[i * n + j] += row[i].clone() * row[j].clone();
                }
            }
        }
        let mut mu = T::max_of(rnorm2.sqrt(), damping_floor.clone());
        let delta = loop {
            let mut damped = jtj.clone();
            for i in 0..n {
                damped[i * n + i] += mu.clone();
            }
            if let Some(x) = solve_spd(&damped, &jtr) {
                break x;
            }
            mu *= T::from_i64(16);
            if mu > T::one() {
                return Err(SicError::PolishFailure("singular normal equations".into()));
            }
        };
        let stepped: Vec<Complex<T>> = (0..d)
            .map(|k| v[k].clone() + Complex::new(delta[k].clone(), delta[d + k].clone()))
            .collect();
        let next = crate::linalg::normalized(&stepped).ok_or_else(|| SicError::PolishFailure("collapsed to zero".into()))?;
        let next_res = sic_residual(ctx, &next)?;
        if next_res > res {
            rising += 1;
            if rising >= 5 {
                return Err(SicError::PolishFailure(format!("residual increased for {rising} consecutive steps")));
            }
        } else {
            rising = 0;
        }
        if next_res < best.0 {
            best = (next_res.clone(), next.clone());
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 3 {
                break;
            }
        }
        v = next;
        res = next_res;
    }
    let (residual, vector) = best;
    Ok(Fiducial { dimension: d, vector, residual, seed: f.seed, symmetry_type: f.symmetry_type, converged: f.converged })
}

/// `||v||`-independent check that `v` and `w` agree up to a global phase.
pub fn same_ray<T: Real>(v: &[Complex<T>], w: &[Complex<T>]) -> T {
    let nv = vec_norm(v);
    let nw = vec_norm(w);
    let ov = cabs(&inner(v, w)) / (nv * nw);
    (T::one() - ov).abs()
}
