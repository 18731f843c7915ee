//! Overlap tables, stability groups inside the extended Clifford group and the
//! overlap-equality partition.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;

use crate::error::{Result, SicError};
use crate::fiducial::{overlap, Fiducial};
use crate::scalar::{cabs, Real};
use crate::wh_group::{apply_displacement, esl_elements, symplectic_form, DimensionContext, DisplacementIndex, SymplecticMatrix};

/// Fiducials with a larger residual are refused by [`compute_overlaps`].
pub const OVERLAP_RESIDUAL_LIMIT: f64 = 1e-10;

/// Largest dimension for which the group is enumerated.
pub const DEFAULT_ENUMERATION_BOUND: usize = 16;

#[derive(Clone, Debug)]
pub struct OverlapTable<T> {
    pub d: usize,
    pub d_prime: usize,
    /// Residual of the fiducial the table was computed from.
    pub residual: T,
    /// `Tr(Pi D_p)` for `p` mod `d'` with `p != 0` mod `d`.
    pub entries: BTreeMap<DisplacementIndex, Complex<T>>,
    /// `e^{i theta_p} = sqrt(d+1) Tr(Pi D_p)`.
    pub phases: BTreeMap<DisplacementIndex, Complex<T>>,
}

impl<T: Real> OverlapTable<T> {
    /// Builds a table from raw overlaps, deriving the phases.
    pub fn from_entries(d: usize, residual: T, entries: BTreeMap<DisplacementIndex, Complex<T>>) -> Self {
        let s = T::from_i64(d as i64 + 1).sqrt();
        let phases = entries.iter().map(|(p, z)| (*p, z.clone().scale(s.clone()))).collect();
        OverlapTable { d, d_prime: crate::wh_group::dprime(d), residual, entries, phases }
    }

    /// Largest `| |overlap|^2 - 1/(d+1) |`.
    pub fn magnitude_defect(&self) -> T {
        let a = T::one() / T::from_i64(self.d as i64 + 1);
        let mut worst = T::zero();
        for z in self.entries.values() {
            let e = (z.norm_sqr() - a.clone()).abs();
            if e > worst {
                worst = e;
            }
        }
        worst
    }
}

/// Overlaps of a converged fiducial over every `p` mod `d'` that is nonzero mod `d`.
pub fn compute_overlaps<T: Real>(ctx: &DimensionContext<T>, f: &Fiducial<T>) -> Result<OverlapTable<T>> {
    check_dimension(ctx, f)?;
    if !(f.residual.to_f64() <= OVERLAP_RESIDUAL_LIMIT) {
        return Err(SicError::Unconverged(f.residual.to_f64()));
    }
    let entries = ctx
        .all_indices_mod_dprime()
        .filter(|p| !p.is_zero_mod(ctx.d()))
        .map(|p| (p, overlap(ctx, p, &f.vector)))
        .collect();
    Ok(OverlapTable::from_entries(ctx.d(), f.residual.clone(), entries))
}

fn check_dimension<T: Real>(ctx: &DimensionContext<T>, f: &Fiducial<T>) -> Result<()> {
    if f.vector.len() != ctx.d() {
        return Err(SicError::Domain(format!("fiducial has dimension {}, context has {}", f.vector.len(), ctx.d())));
    }
    Ok(())
}

/// An element `D_r U_F` (antiunitary when `det F = -1`) of the stabilizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StabilizerElement {
    pub symplectic: SymplecticMatrix,
    /// Displacement part `r`, reduced mod `d`.
    pub displacement: DisplacementIndex,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    /// `S_0`: every `F` for which `U_F` itself fixes the fiducial projector.
    pub symplectic_stabilizers: BTreeSet<SymplecticMatrix>,
    /// `stb = {(det F) F : F in S_0}`.
    pub overlap_stabilizers: BTreeSet<SymplecticMatrix>,
    /// All stabilizing pairs `(F, r)`.
    pub elements: BTreeSet<StabilizerElement>,
    /// Every stabilizing `F` agrees mod `d` with an element of `S_0`.
    pub centred: bool,
    pub canonical_order3_present: bool,
    /// `S_0` has an element whose order equals its size.
    pub cyclic: bool,
}

/// Overlaps `<v|D_p|v>` over all `p` mod `d'`, zero included.
fn full_overlaps<T: Real>(ctx: &DimensionContext<T>, v: &[Complex<T>]) -> Vec<Complex<T>> {
    ctx.all_indices_mod_dprime().map(|p| overlap(ctx, p, v)).collect()
}

/// Default agreement tolerance for overlap comparisons.
pub fn default_tolerance<T: Real>(residual: &T) -> T {
    T::max_of(residual.clone().sqrt(), T::epsilon().sqrt())
}

/// Tolerance for orbit-constancy checks: `1000 * max(residual, eps)`.
pub fn partition_tolerance<T: Real>(residual: &T) -> T {
    T::max_of(residual.clone(), T::epsilon()) * T::from_i64(1000)
}

/// Every `(F, r)` with `D_r U_F` fixing `|v><v|`.
///
/// Uses the overlap criterion `ov(q) = omega^{-<r,q>} ov(F^{-1} q)` (with
/// `ov(F^{-1} q)` conjugated for antiunitaries), screening candidates on
/// `q = e1, e2`, which also determine `r`.
pub fn stabilizer_elements<T: Real>(ctx: &DimensionContext<T>, v: &[Complex<T>], tol: &T) -> Result<BTreeSet<StabilizerElement>> {
    let d = ctx.d();
    let m = ctx.d_prime();
    let ov = full_overlaps(ctx, v);
    let at = |p: DisplacementIndex| &ov[p.p1 as usize * m + p.p2 as usize];
    let indices: Vec<DisplacementIndex> = ctx.all_indices_mod_dprime().collect();
    let e1 = ctx.index(1, 0);
    let e2 = ctx.index(0, 1);

    // k with ov(q) = omega^k * w, if any
    let root_ratio = |a: &Complex<T>, w: &Complex<T>| -> Option<i64> {
        (0..d as i64).find(|&k| cabs(&(a.clone() - ctx.omega_pow(k).clone() * w.clone())) < *tol)
    };

    let mut out = BTreeSet::new();
    for f in esl_elements(m as i64) {
        let g = f.inverse();
        let anti = f.det() == -1;
        let image = |q: DisplacementIndex| {
            let w = at(g.apply(q)).clone();
            if anti {
                w.conj()
            } else {
                w
            }
        };
        let Some(k1) = root_ratio(at(e1), &image(e1)) else { continue };
        let Some(k2) = root_ratio(at(e2), &image(e2)) else { continue };
        let r = (k2, -k1);
        let ok = indices.iter().all(|&q| {
            let s = symplectic_form(r, q.as_pair());
            cabs(&(at(q).clone() - ctx.omega_pow(-s).clone() * image(q))) < *tol
        });
        if ok {
            out.insert(StabilizerElement { symplectic: f, displacement: DisplacementIndex::reduced(r.0, r.1, d) });
        }
    }
    Ok(out)
}

/// Stability group of the fiducial projector, by enumeration of `ESL(2, Z/d'Z)`.
pub fn stability_group<T: Real>(ctx: &DimensionContext<T>, f: &Fiducial<T>, tol: &T) -> Result<StabilityReport> {
    stability_group_bounded(ctx, f, tol, DEFAULT_ENUMERATION_BOUND)
}

pub fn stability_group_bounded<T: Real>(ctx: &DimensionContext<T>, f: &Fiducial<T>, tol: &T, bound: usize) -> Result<StabilityReport> {
    check_dimension(ctx, f)?;
    if ctx.d() > bound {
        return Err(SicError::Capability { d: ctx.d(), bound });
    }
    let elements = stabilizer_elements(ctx, &f.vector, tol)?;
    Ok(report_from_elements(ctx.d(), elements))
}

fn report_from_elements(d: usize, elements: BTreeSet<StabilizerElement>) -> StabilityReport {
    let s0: BTreeSet<SymplecticMatrix> = elements
        .iter()
        .filter(|e| e.displacement.is_zero_mod(d))
        .map(|e| e.symplectic)
        .collect();
    let s0_mod_d: BTreeSet<[[i64; 2]; 2]> = s0.iter().map(|f| f.reduce_mod(d as i64)).collect();
    let centred = elements.iter().all(|e| s0_mod_d.contains(&e.symplectic.reduce_mod(d as i64)));
    let di = d as i64;
    let canonical_order3_present = elements
        .iter()
        .any(|e| !e.symplectic.is_identity() && e.symplectic.trace().rem_euclid(di) == di - 1);
    let overlap_stabilizers = s0.iter().map(|f| f.scaled(f.det())).collect();
    let cyclic = s0.iter().any(|f| f.order() as usize == s0.len());
    StabilityReport { symplectic_stabilizers: s0, overlap_stabilizers, elements, centred, canonical_order3_present, cyclic }
}

/// True when the set is closed under products and inverses.
pub fn is_closed_group(set: &BTreeSet<SymplecticMatrix>) -> bool {
    set.iter().all(|a| set.contains(&a.inverse()) && set.iter().all(|b| set.contains(&a.mul(b))))
}

/// Result of [`centre_fiducial`].
#[derive(Clone, Debug)]
pub struct CentredFiducial<T> {
    pub fiducial: Fiducial<T>,
    /// `q` with the returned vector equal to `D_q` applied to the input.
    pub translation: DisplacementIndex,
    pub found: bool,
}

/// Searches the translates `D_q f` for one whose stabilizer needs no
/// displacement parts. A translation by `D_q` sends `(F, r)` to
/// `(F, r + (I - F) q)`, so the stabilizer is computed only once.
pub fn centre_fiducial<T: Real>(ctx: &DimensionContext<T>, f: &Fiducial<T>) -> Result<CentredFiducial<T>> {
    check_dimension(ctx, f)?;
    if ctx.d() > DEFAULT_ENUMERATION_BOUND {
        return Err(SicError::Capability { d: ctx.d(), bound: DEFAULT_ENUMERATION_BOUND });
    }
    let d = ctx.d();
    let tol = default_tolerance(&f.residual);
    let elements = stabilizer_elements(ctx, &f.vector, &tol)?;
    for q in ctx.all_indices_mod_d() {
        let (q1, q2) = q.as_pair();
        let moved: BTreeSet<StabilizerElement> = elements
            .iter()
            .map(|e| {
                let fq = e.symplectic.apply(q);
                let (r1, r2) = e.displacement.as_pair();
                StabilizerElement {
                    symplectic: e.symplectic,
                    displacement: DisplacementIndex::reduced(r1 + q1 - fq.p1 as i64, r2 + q2 - fq.p2 as i64, d),
                }
            })
            .collect();
        if report_from_elements(d, moved).centred {
            let v = apply_displacement(ctx, q, &f.vector);
            let mut out = f.clone();
            out.vector = v;
            out.residual = crate::fiducial::sic_residual(ctx, &out.vector)?;
            return Ok(CentredFiducial { fiducial: out, translation: q, found: true });
        }
    }
    Ok(CentredFiducial { fiducial: f.clone(), translation: DisplacementIndex { p1: 0, p2: 0 }, found: false })
}

#[derive(Clone, Debug)]
pub struct OrbitPartition {
    /// Groups of indices with (approximately) equal overlaps, each sorted.
    pub parts: Vec<Vec<DisplacementIndex>>,
    /// `(G, p)` with `Gp` outside the part of `p`.
    pub violations: Vec<(SymplecticMatrix, DisplacementIndex)>,
}

impl OrbitPartition {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Single-linkage clustering of the overlaps at tolerance `tol`, and a check
/// that every `G` in `group` maps each part into itself.
pub fn overlap_orbit_partition<T: Real>(t: &OverlapTable<T>, group: &BTreeSet<SymplecticMatrix>, tol: &T) -> OrbitPartition {
    let keys: Vec<DisplacementIndex> = t.entries.keys().copied().collect();
    let vals: Vec<&Complex<T>> = t.entries.values().collect();
    let n = keys.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if cabs(&(vals[i].clone() - vals[j].clone())) < *tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let position: BTreeMap<DisplacementIndex, usize> = keys.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut parts: BTreeMap<usize, Vec<DisplacementIndex>> = BTreeMap::new();
    for (i, p) in keys.iter().enumerate() {
        parts.entry(roots[i]).or_default().push(*p);
    }
    let mut violations = Vec::new();
    for g in group {
        for (i, p) in keys.iter().enumerate() {
            let ok = match position.get(&g.apply(*p)) {
                Some(&j) => roots[j] == roots[i],
                None => false,
            };
            if !ok {
                violations.push((*g, *p));
            }
        }
    }
    OrbitPartition { parts: parts.into_values().collect(), violations }
}
