//! Recognition of overlap phases as algebraic numbers.
//!
//! A candidate minimal polynomial is read off an LLL-reduced basis of the
//! lattice spanned by rows `[e_i | S Re x^i, S Im x^i]`. A hit is accepted only
//! if its residual is small at the working precision and stays small when the
//! polynomial is evaluated again at the full (at least doubled) precision of
//! the input. Irreducibility is not proven: a result is minimal among the
//! certified candidates up to the degree bound.

use std::collections::BTreeMap;

use num_complex::Complex;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Result, SicError};
use crate::lll::lll_reduce;
use crate::overlaps::OverlapTable;
use crate::scalar::Real;
use crate::wh_group::{dprime, DisplacementIndex};

const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Integer polynomial, ascending coefficients, leading coefficient positive.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimalPolynomial {
    pub coefficients: Vec<i64>,
    pub degree: usize,
    /// `|P(x)| / ||c||` at the full input precision (may underflow to 0).
    pub residual: f64,
    /// `log2` of the same quantity, always finite.
    pub residual_log2: f64,
    pub certified_monic: bool,
    pub certified_unit: bool,
}

impl MinimalPolynomial {
    /// Builds a normalized polynomial from raw coefficients (content removed,
    /// leading coefficient positive). Certification flags start false.
    pub fn from_coefficients(raw: &[i64]) -> Option<Self> {
        let ints: Vec<Integer> = raw.iter().map(|&c| Integer::from(c)).collect();
        normalize(&ints).map(|c| MinimalPolynomial {
            degree: c.len() - 1,
            coefficients: c,
            residual: f64::NAN,
            residual_log2: f64::NAN,
            certified_monic: false,
            certified_unit: false,
        })
    }

    /// Coefficients equal their reverse up to an overall sign.
    pub fn is_palindromic_up_to_sign(&self) -> bool {
        let c = &self.coefficients;
        let rev: Vec<i64> = c.iter().rev().copied().collect();
        *c == rev || c.iter().zip(&rev).all(|(a, b)| *a == -*b)
    }
}

pub fn certify_algebraic_integer(p: &MinimalPolynomial) -> bool {
    p.coefficients.last() == Some(&1)
}

pub fn certify_unit(p: &MinimalPolynomial) -> bool {
    certify_algebraic_integer(p) && matches!(p.coefficients.first(), Some(1) | Some(-1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecognitionConfig {
    pub max_degree: usize,
    /// Working precision of the lattice stage. The input must carry twice this.
    pub precision_bits: u32,
    /// Lattice rows are scaled by `10^lattice_scale_exponent`.
    pub lattice_scale_exponent: u32,
    /// Residual bound at the working precision.
    pub certify_threshold: f64,
}

impl RecognitionConfig {
    pub fn new(max_degree: usize, precision_bits: u32) -> Self {
        RecognitionConfig {
            max_degree,
            precision_bits,
            lattice_scale_exponent: default_scale_exponent(precision_bits),
            certify_threshold: 2f64.powf(-0.15 * precision_bits as f64),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_degree == 0 {
            return Err(SicError::Domain("max_degree must be positive".into()));
        }
        if (self.precision_bits as usize) < 16 * self.max_degree {
            return Err(SicError::Domain(format!(
                "precision of {} bits is below 16 x max_degree = {}",
                self.precision_bits,
                16 * self.max_degree
            )));
        }
        let scale_bits = self.lattice_scale_exponent as f64 / LOG10_2;
        if self.lattice_scale_exponent == 0 || scale_bits > self.precision_bits as f64 {
            return Err(SicError::Domain(format!(
                "lattice scale 10^{} does not fit in {} bits",
                self.lattice_scale_exponent, self.precision_bits
            )));
        }
        if !(self.certify_threshold > 0.0 && self.certify_threshold < 1.0) {
            return Err(SicError::Domain("certify_threshold must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// `log2` of the bound used by the recheck at the doubled precision.
    pub fn recheck_log2(&self) -> f64 {
        -1.2 * self.precision_bits as f64
    }
}

/// Decimal exponent of the lattice scale: about 80% of the working precision.
pub fn default_scale_exponent(bits: u32) -> u32 {
    ((0.8 * bits as f64 * LOG10_2).floor() as u32).max(1)
}

fn euler_phi(mut n: usize) -> usize {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// `2 d' phi(d')`, the uncapped default degree bound for dimension `d`.
pub fn default_max_degree(d: usize) -> usize {
    let dp = dprime(d);
    2 * dp * euler_phi(dp)
}

/// Degrees tried in order: 1, 2, 4, ... then `max_degree`.
pub fn degree_schedule(max_degree: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 1;
    while n < max_degree {
        out.push(n);
        n *= 2;
    }
    out.push(max_degree);
    out
}

#[derive(Clone)]
struct CFloat {
    re: Float,
    im: Float,
}

impl CFloat {
    fn from_complex<T: Real>(x: &Complex<T>, prec: u32) -> Self {
        CFloat { re: x.re.to_float(prec), im: x.im.to_float(prec) }
    }

    fn round_to(&self, prec: u32) -> Self {
        CFloat { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    fn prec(&self) -> u32 {
        self.re.prec()
    }

    fn mul(&self, o: &CFloat) -> CFloat {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        CFloat { re, im }
    }

    fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// `log2(|P(x)| / ||c||)` with Horner's rule at the precision of `x`.
fn relative_residual_log2(c: &[Integer], x: &CFloat) -> f64 {
    let p = x.prec();
    let mut acc = CFloat { re: Float::new(p), im: Float::new(p) };
    for coef in c.iter().rev() {
        acc = acc.mul(x);
        acc.re += coef;
    }
    let num = acc.abs();
    let mut norm = Integer::new();
    for coef in c {
        norm += Integer::from(coef.square_ref());
    }
    if num.is_zero() {
        return f64::NEG_INFINITY;
    }
    let num = num.log2();
    let den = Float::with_val(p, &norm).log2();
    (num.to_f64() - den.to_f64()) / 2.0
}

/// Strips leading zeros, divides out the content and makes the leading
/// coefficient positive.
fn normalize(raw: &[Integer]) -> Option<Vec<i64>> {
    let top = raw.iter().rposition(|c| *c != 0)?;
    let mut c: Vec<Integer> = raw[..=top].to_vec();
    let mut g = Integer::new();
    for x in &c {
        g.gcd_mut(x);
    }
    if c[top] < 0 {
        g = -g;
    }
    for x in c.iter_mut() {
        x.div_exact_mut(&g);
    }
    c.iter().map(|x| x.to_i64()).collect()
}

/// One lattice attempt at degree `n`.
fn attempt(work: &CFloat, full: &CFloat, n: usize, cfg: &RecognitionConfig) -> Option<MinimalPolynomial> {
    let prec = cfg.precision_bits;
    let scale = Float::with_val(prec, Integer::from(10).pow(cfg.lattice_scale_exponent));
    let mut pows = Vec::with_capacity(n + 1);
    pows.push(CFloat { re: Float::with_val(prec, 1), im: Float::new(prec) });
    for i in 1..=n {
        let next = pows[i - 1].mul(work);
        pows.push(next);
    }
    let to_int = |f: &Float| Float::with_val(prec, f * &scale).round().to_integer().unwrap_or_default();
    let re_col: Vec<Integer> = pows.iter().map(|z| to_int(&z.re)).collect();
    let im_col: Vec<Integer> = pows.iter().map(|z| to_int(&z.im)).collect();
    let use_im = im_col.iter().any(|v| *v != 0);

    let mut basis: Vec<Vec<Integer>> = (0..=n)
        .map(|i| {
            let mut row = vec![Integer::new(); n + 1];
            row[i] = Integer::from(1);
            row.push(re_col[i].clone());
            if use_im {
                row.push(im_col[i].clone());
            }
            row
        })
        .collect();
    lll_reduce(&mut basis);

    // Every certified row is a multiple of the minimal polynomial, and a
    // multiple can be shorter than the polynomial itself; their gcd is not.
    let mut found: Vec<Vec<i64>> = Vec::new();
    for row in &basis {
        let mut coeffs: Vec<Integer> = row[..=n].to_vec();
        if !work.is_zero() {
            let Some(low) = coeffs.iter().position(|c| *c != 0) else { continue };
            coeffs.drain(..low);
            if coeffs.len() == 1 && low > 0 {
                // x^k: keep the factor x and let the residual decide
                coeffs = vec![Integer::new(), Integer::from(1)];
            }
        }
        let Some(norm) = normalize(&coeffs) else { continue };
        if norm.len() < 2 {
            continue;
        }
        if check_prepared(&norm, work, full, cfg).is_some() {
            found.push(norm);
        }
    }
    let best = found.iter().min_by_key(|c| c.len())?;
    let mut g: Vec<Integer> = best.iter().map(|&c| Integer::from(c)).collect();
    for other in &found {
        let o: Vec<Integer> = other.iter().map(|&c| Integer::from(c)).collect();
        g = poly_gcd(&g, &o);
    }
    normalize(&g)
        .filter(|c| c.len() >= 2)
        .and_then(|c| check_prepared(&c, work, full, cfg))
        .or_else(|| check_prepared(best, work, full, cfg))
}

fn trim(mut p: Vec<Integer>) -> Vec<Integer> {
    while p.len() > 1 && p.last().is_some_and(|c| *c == 0) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Integer::new());
    }
    p
}

fn primitive(p: Vec<Integer>) -> Vec<Integer> {
    let mut g = Integer::new();
    for c in &p {
        g.gcd_mut(c);
    }
    if g <= 1 {
        return p;
    }
    p.into_iter().map(|c| c.div_exact(&g)).collect()
}

/// Pseudo-remainder of `a` by `b` (deg a >= deg b).
fn prem(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let lb = b.last().expect("nonzero divisor");
    let mut r = a.to_vec();
    while r.len() >= b.len() && !(r.len() == 1 && r[0] == 0) {
        let lr = r.last().expect("nonempty").clone();
        let shift = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= Integer::from(&lr * bi);
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Primitive gcd of two integer polynomials.
fn poly_gcd(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let (mut a, mut b) = (primitive(trim(a.to_vec())), primitive(trim(b.to_vec())));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !(b.len() == 1 && b[0] == 0) {
        let r = primitive(prem(&a, &b));
        a = b;
        b = r;
    }
    a
}

fn certified(coefficients: Vec<i64>, residual_log2: f64) -> MinimalPolynomial {
    let mut p = MinimalPolynomial {
        degree: coefficients.len() - 1,
        coefficients,
        residual: 2f64.powf(residual_log2),
        residual_log2: residual_log2.max(-1e9),
        certified_monic: false,
        certified_unit: false,
    };
    p.certified_monic = certify_algebraic_integer(&p);
    p.certified_unit = certify_unit(&p);
    p
}

fn prepare<T: Real>(x: &Complex<T>, cfg: &RecognitionConfig) -> Result<(CFloat, CFloat)> {
    cfg.validate()?;
    if T::PREC_BITS < 2 * cfg.precision_bits {
        return Err(SicError::Recognition(format!(
            "input carries {} bits; the recheck needs {}",
            T::PREC_BITS,
            2 * cfg.precision_bits
        )));
    }
    let full = CFloat::from_complex(x, T::PREC_BITS);
    if !(full.re.is_finite() && full.im.is_finite()) {
        return Err(SicError::Domain("input is not finite".into()));
    }
    let work = full.round_to(cfg.precision_bits);
    Ok((work, full))
}

fn recognize_prepared(work: &CFloat, full: &CFloat, cfg: &RecognitionConfig) -> Result<MinimalPolynomial> {
    for n in degree_schedule(cfg.max_degree) {
        if let Some(p) = attempt(work, full, n, cfg) {
            if p.degree > 1 {
                if let Some(q) = attempt(work, full, p.degree - 1, cfg) {
                    if q.degree < p.degree {
                        return Ok(q);
                    }
                }
            }
            return Ok(p);
        }
    }
    Err(SicError::Recognition(format!("no certified polynomial up to degree {}", cfg.max_degree)))
}

/// Finds a lowest-degree integer polynomial vanishing at `x`.
///
/// `x` must carry at least `2 * cfg.precision_bits` bits.
pub fn recognize_algebraic<T: Real>(x: &Complex<T>, cfg: &RecognitionConfig) -> Result<MinimalPolynomial> {
    let (work, full) = prepare(x, cfg)?;
    recognize_prepared(&work, &full, cfg)
}

/// Evaluates a candidate at `x` with both certification checks.
pub fn check_polynomial<T: Real>(p: &MinimalPolynomial, x: &Complex<T>, cfg: &RecognitionConfig) -> Result<Option<MinimalPolynomial>> {
    let (work, full) = prepare(x, cfg)?;
    Ok(check_prepared(&p.coefficients, &work, &full, cfg))
}

fn check_prepared(c: &[i64], work: &CFloat, full: &CFloat, cfg: &RecognitionConfig) -> Option<MinimalPolynomial> {
    let ints: Vec<Integer> = c.iter().map(|&v| Integer::from(v)).collect();
    if relative_residual_log2(&ints, work) >= cfg.certify_threshold.log2() {
        return None;
    }
    let full_log2 = relative_residual_log2(&ints, full);
    (full_log2 < cfg.recheck_log2()).then(|| certified(c.to_vec(), full_log2))
}

#[derive(Clone, Debug)]
pub struct PhaseRecognition {
    pub p: DisplacementIndex,
    pub polynomial: Option<MinimalPolynomial>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhaseSummary {
    pub total: usize,
    pub recognized: usize,
    pub algebraic_integers: usize,
    pub units: usize,
    /// Recognized and certified, but monic with constant term other than +-1.
    pub certified_non_units: usize,
    pub failures: usize,
    pub distinct_polynomials: usize,
    pub max_degree_found: usize,
}

#[derive(Clone, Debug)]
pub struct PhaseReport {
    pub d: usize,
    pub config: RecognitionConfig,
    pub per_phase: Vec<PhaseRecognition>,
    pub summary: PhaseSummary,
    /// Distinct polynomials with the number of phases sharing each.
    pub census: BTreeMap<Vec<i64>, usize>,
}

impl PhaseReport {
    /// Fraction of phases certified as units.
    pub fn unit_coverage(&self) -> f64 {
        if self.summary.total == 0 {
            return 0.0;
        }
        self.summary.units as f64 / self.summary.total as f64
    }
}

/// Recognizes every phase of an overlap table.
///
/// Phases are handled in index order. Polynomials already found are tried
/// first (with the same two checks) before a fresh lattice search, so complex
/// conjugate and Galois-related phases reuse one reduction.
pub fn recognize_overlap_phases<T: Real>(t: &OverlapTable<T>, cfg: &RecognitionConfig) -> Result<PhaseReport> {
    cfg.validate()?;
    let mut per_phase = Vec::with_capacity(t.phases.len());
    let mut known: Vec<Vec<i64>> = Vec::new();
    for (p, x) in &t.phases {
        let entry = match prepare(x, cfg) {
            Err(e) => PhaseRecognition { p: *p, polynomial: None, failure: Some(e.to_string()) },
            Ok((work, full)) => {
                let cached = known.iter().find_map(|c| check_prepared(c, &work, &full, cfg));
                let found = match cached {
                    Some(q) => Ok(q),
                    None => recognize_prepared(&work, &full, cfg),
                };
                match found {
                    Ok(mut q) => {
                        if !known.contains(&q.coefficients) {
                            known.push(q.coefficients.clone());
                        }
                        if !q.is_palindromic_up_to_sign() {
                            q.certified_unit = false;
                        }
                        PhaseRecognition { p: *p, polynomial: Some(q), failure: None }
                    }
                    Err(e) => PhaseRecognition { p: *p, polynomial: None, failure: Some(e.to_string()) },
                }
            }
        };
        per_phase.push(entry);
    }

    let mut summary = PhaseSummary { total: per_phase.len(), ..Default::default() };
    let mut census = BTreeMap::new();
    for r in &per_phase {
        match &r.polynomial {
            None => summary.failures += 1,
            Some(q) => {
                summary.recognized += 1;
                summary.max_degree_found = summary.max_degree_found.max(q.degree);
                if q.certified_monic {
                    summary.algebraic_integers += 1;
                    if q.certified_unit {
                        summary.units += 1;
                    } else {
                        summary.certified_non_units += 1;
                    }
                }
                *census.entry(q.coefficients.clone()).or_insert(0) += 1;
            }
        }
    }
    summary.distinct_polynomials = census.len();
    Ok(PhaseReport { d: t.d, config: cfg.clone(), per_phase, summary, census })
}

/// Uncertified estimate of the multiplicative rank of a set of phases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankEstimate {
    pub rank: usize,
    /// Phases kept after merging equal and mutually conjugate entries.
    pub generators: usize,
    /// Integer relations found among the generators and `2 pi`.
    pub relations: Vec<Vec<Integer>>,
    /// Relations and non-relations are separated by a wide margin.
    pub confident: bool,
}

/// Rank modulo torsion of the group generated by `phases`, from integer
/// relations among the `theta/2pi` and 1.
pub fn phase_rank<T: Real>(phases: &[Complex<T>], cfg: &RecognitionConfig) -> Result<RankEstimate> {
    cfg.validate()?;
    let prec = cfg.precision_bits;
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    let mut angles: Vec<Float> = Vec::new();
    for z in phases {
        let re = z.re.to_float(prec);
        let im = z.im.to_float(prec);
        let a = Float::with_val(prec, im.atan2_ref(&re)) / &two_pi;
        let dup = angles.iter().any(|b| {
            Float::with_val(prec, &a - b).abs() < tol || Float::with_val(prec, &a + b).abs() < tol
        });
        if !dup {
            angles.push(a);
        }
    }
    let m = angles.len();
    let scale = Float::with_val(prec, Float::i_exp(1, prec as i32 / 2));
    let mut basis: Vec<Vec<Integer>> = (0..=m)
        .map(|i| {
            let mut row = vec![Integer::new(); m + 1];
            row[i] = Integer::from(1);
            let v = if i < m { Float::with_val(prec, &angles[i] * &scale) } else { scale.clone() };
            row.push(v.round().to_integer().unwrap_or_default());
            row
        })
        .collect();
    lll_reduce(&mut basis);

    // a row is a relation when sum k_i a_i + k_0 vanishes at full precision
    let b = prec as f64;
    let mut relations = Vec::new();
    let mut confident = true;
    for row in &basis {
        let mut value = Float::with_val(prec, &row[m]);
        let mut l1 = Integer::from(row[m].abs_ref());
        for (k, a) in row[..m].iter().zip(&angles) {
            value += Float::with_val(prec, a * k);
            l1 += Integer::from(k.abs_ref());
        }
        let v_log2 = if value.is_zero() { f64::NEG_INFINITY } else { value.abs().log2().to_f64() };
        let l_log2 = l1.to_f64().max(1.0).log2();
        if v_log2 < -0.8 * b + l_log2 {
            if v_log2 > -0.9 * b + l_log2 {
                confident = false;
            }
            relations.push(row[..=m].to_vec());
        } else if v_log2 < -0.7 * b {
            confident = false;
        }
    }
    let rank = m.saturating_sub(relations.len());
    Ok(RankEstimate { rank, generators: m, relations, confident })
}

/// [`phase_rank`] over the phases of a table.
pub fn phase_relation_rank<T: Real>(t: &OverlapTable<T>, cfg: &RecognitionConfig) -> Result<RankEstimate> {
    let phases: Vec<Complex<T>> = t.phases.values().cloned().collect();
    phase_rank(&phases, cfg)
}
