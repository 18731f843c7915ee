//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line; the process fails if any criterion does.

use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde_json::{json, Value};

use sic_core::clifford::{clifford_unitary, covariance_error};
use sic_core::fiducial::{find_fiducial, frame_potential, frame_potential_minimum, search, Fiducial, SearchConfig};
use sic_core::io::{fiducial_to_json, overlaps_to_json, recognition_to_json, stability_to_json, to_pretty, tower_to_json};
use sic_core::linalg::phase_aligned_distance;
use sic_core::number_theory::{dimension_sequence, dimension_towers, is_squarefree, pell_four, pell_four_scan, sic_discriminant};
use sic_core::overlaps::{compute_overlaps, default_tolerance, is_closed_group, overlap_orbit_partition, partition_tolerance, stability_group};
use sic_core::recognition::{certify_algebraic_integer, certify_unit, recognize_algebraic, recognize_overlap_phases, RecognitionConfig};
use sic_core::wh_group::{is_canonical_order3, verify_displacement_orthogonality, SymplecticMatrix};
use sic_core::{make_context, DimensionContext, Mp1024, Mp256, Mp512, Real};

const SCAN_CAP: u64 = 1 << 20;
const D5_TERMS: [u64; 12] = [4, 8, 19, 48, 124, 323, 844, 2208, 5779, 15128, 39604, 103683];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// ---------------------------------------------------------------- criterion 1

fn group_law() -> Outcome {
    let mut worst53 = 0f64;
    let mut worst256 = 0f64;
    for d in 2..=8 {
        worst53 = worst53.max(verify_displacement_orthogonality(&make_context::<f64>(d).unwrap()));
        worst256 = worst256.max(verify_displacement_orthogonality(&make_context::<Mp256>(d).unwrap()).to_f64());
    }
    outcome(worst53 < 1e-10 && worst256 < 1e-60, format!("max error {worst53:.1e} (53 bits), {worst256:.1e} (256 bits)"))
}

// ---------------------------------------------------------------- criterion 2

fn random_esl(rng: &mut ChaCha8Rng, m: i64, want_det: Option<i64>) -> SymplecticMatrix {
    loop {
        let e = [[rng.random_range(0..m), rng.random_range(0..m)], [rng.random_range(0..m), rng.random_range(0..m)]];
        if let Ok(f) = SymplecticMatrix::new(e, m) {
            if want_det.is_none_or(|t| f.det().rem_euclid(m) == t.rem_euclid(m)) {
                return f;
            }
        }
    }
}

fn covariance_at<T: Real>(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let tol = 2f64.powf(-(T::PREC_BITS as f64) / 4.0);
    let (mut cov, mut proj) = (0f64, 0f64);
    for d in 2..=8usize {
        let ctx = make_context::<T>(d).unwrap();
        let m = ctx.d_prime() as i64;
        for k in 0..50 {
            // every fifth sample is antiunitary
            let det = if k % 5 == 4 { -1 } else { 1 };
            let f = random_esl(rng, m, Some(det));
            let u = clifford_unitary(&ctx, &f).unwrap();
            cov = cov.max(covariance_error(&ctx, &u, &f).unwrap().to_f64());
            if det == 1 {
                let g = random_esl(rng, m, Some(1));
                let ug = clifford_unitary(&ctx, &g).unwrap();
                let ufg = clifford_unitary(&ctx, &f.mul(&g)).unwrap();
                proj = proj.max(phase_aligned_distance(&u.compose(&ug).matrix, &ufg.matrix).to_f64());
            }
        }
    }
    (cov, proj, tol)
}

fn clifford_covariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (c53, p53, t53) = covariance_at::<f64>(&mut rng);
    let (c256, p256, t256) = covariance_at::<Mp256>(&mut rng);
    let pass = c53 < t53 && p53 < t53 && c256 < t256 && p256 < t256;
    outcome(
        pass,
        format!("53 bits: covariance {c53:.1e}, projectivity {p53:.1e} (< {t53:.1e}); 256 bits: {c256:.1e}, {p256:.1e} (< {t256:.1e})"),
    )
}

// ---------------------------------------------------------------- criteria 3-5

struct Run {
    fiducials: Vec<Fiducial<f64>>,
    artifacts: Vec<(String, String)>,
    recognition: Vec<(usize, sic_core::recognition::PhaseReport)>,
    round_trip: RoundTrip,
}

fn fiducial_searches(artifacts: &mut Vec<(String, String)>) -> Vec<Fiducial<f64>> {
    (2..=7usize)
        .map(|d| {
            let ctx = make_context::<f64>(d).unwrap();
            let f = search(&ctx, &SearchConfig::default()).unwrap();
            artifacts.push((format!("fiducial-{d}"), to_pretty(&fiducial_to_json(&f))));
            f
        })
        .collect()
}

fn check_search(fs: &[Fiducial<f64>]) -> Outcome {
    let mut worst_r = 0f64;
    let mut worst_fp = 0f64;
    let mut ok = true;
    for f in fs {
        let d = f.dimension;
        let ctx = make_context::<f64>(d).unwrap();
        let fp = (frame_potential(&ctx, &f.vector) - frame_potential_minimum::<f64>(d)).abs();
        ok &= f.converged && f.residual < 1e-12 && fp < 1e-12;
        worst_r = worst_r.max(f.residual);
        worst_fp = worst_fp.max(fp);
    }
    outcome(ok, format!("d=2..7 converged; max residual {worst_r:.1e}, max frame-potential gap {worst_fp:.1e}"))
}

fn check_overlaps(fs: &[Fiducial<f64>], artifacts: &mut Vec<(String, String)>) -> Outcome {
    let mut worst = 0f64;
    for f in fs {
        let ctx = make_context::<f64>(f.dimension).unwrap();
        let t = compute_overlaps(&ctx, f).unwrap();
        worst = worst.max(t.magnitude_defect());
        artifacts.push((format!("overlaps-{}", f.dimension), to_pretty(&overlaps_to_json(&t))));
    }
    outcome(worst < 1e-10, format!("max | |ov|^2 - 1/(d+1) | = {worst:.1e}"))
}

const SPORADIC_DIMENSION: usize = 2;

fn is_abelian(g: &std::collections::BTreeSet<SymplecticMatrix>) -> bool {
    g.iter().all(|a| g.iter().all(|b| a.mul(b) == b.mul(a)))
}

fn check_stability(fs: &[Fiducial<f64>], artifacts: &mut Vec<(String, String)>) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for f in fs {
        let d = f.dimension;
        let ctx = make_context::<f64>(d).unwrap();
        let report = stability_group(&ctx, f, &default_tolerance(&f.residual)).unwrap();
        let t = compute_overlaps(&ctx, f).unwrap();
        let partition = overlap_orbit_partition(&t, &report.overlap_stabilizers, &partition_tolerance(&f.residual));
        let order3 = report.symplectic_stabilizers.iter().any(|g| is_canonical_order3(g, &ctx).unwrap_or(false));
        let closed = is_closed_group(&report.symplectic_stabilizers) && is_closed_group(&report.overlap_stabilizers);
        // the qubit SIC is sporadic: its stabilizer is non-abelian
        let shape = if d == SPORADIC_DIMENSION {
            !report.cyclic && !is_abelian(&report.symplectic_stabilizers)
        } else {
            report.cyclic
        };
        let good = report.canonical_order3_present && order3 && shape && closed && partition.consistent();
        ok &= good;
        notes.push(format!(
            "d={d}: |S0|={} {}, {} violations",
            report.symplectic_stabilizers.len(),
            if report.cyclic { "cyclic" } else { "non-cyclic" },
            partition.violations.len()
        ));
        artifacts.push((format!("stability-{d}"), to_pretty(&stability_to_json(d, &report, &partition))));
    }
    outcome(ok, notes.join("; "))
}

// ---------------------------------------------------------------- criterion 6

/// Smallest solution of `x^2 - D y^2 = 4` from the convergents of `sqrt D`.
/// Valid for `D > 16`, where every solution gives a convergent.
fn pell_from_sqrt_convergents(disc: u64) -> (BigInt, BigInt) {
    let dd = BigInt::from(disc);
    let a0 = dd.sqrt();
    let (mut m, mut q, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut qq) = (BigInt::zero(), BigInt::one());
    let mut best: Option<(BigInt, BigInt)> = None;
    loop {
        if let Some((_, y)) = &best {
            if &qq > y {
                return best.unwrap();
            }
        }
        let n = &p * &p - &dd * &qq * &qq;
        let cand = if n == BigInt::from(4) {
            Some((p.clone(), qq.clone()))
        } else if n.is_one() {
            Some((&p * 2, &qq * 2))
        } else {
            None
        };
        if let Some(c) = cand {
            if best.as_ref().is_none_or(|b| c.1 < b.1) {
                best = Some(c);
            }
        }
        m = &a * &q - &m;
        q = (&dd - &m * &m) / &q;
        a = (&a0 + &m) / &q;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &qq + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut qq, q_next);
    }
}

fn number_theory_exact(artifacts: &mut Vec<(String, String)>) -> Outcome {
    let seq = dimension_sequence(5, 12).unwrap();
    let towers = dimension_towers(&seq.terms, 12);
    artifacts.push(("tower-5".into(), to_pretty(&tower_to_json(&seq, &towers, false))));
    let terms_ok = seq.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
        == "4, 8, 19, 48, 124, 323, 844, 2208, 5779, 15128, 39604, 103683";
    let want: [&[u64]; 3] = [&[4, 8, 48, 2208], &[4, 124, 15128], &[19, 323, 103683]];
    let towers_ok = want.iter().all(|w| {
        let w: Vec<BigInt> = w.iter().map(|&x| BigInt::from(x)).collect();
        towers.iter().any(|t| t.starts_with(&w))
    });

    let (mut scanned, mut beyond_cap, mut mismatches) = (0, Vec::new(), Vec::new());
    for disc in 2..=200u64 {
        if !is_squarefree(disc) {
            continue;
        }
        let (x, y) = pell_four(disc).unwrap();
        match pell_four_scan(disc, SCAN_CAP) {
            Some((sx, sy)) => {
                scanned += 1;
                if BigInt::from(sx) != x || BigInt::from(sy) != y {
                    mismatches.push(disc);
                }
            }
            None => {
                beyond_cap.push(disc);
                if y <= BigInt::from(SCAN_CAP) {
                    mismatches.push(disc);
                }
            }
        }
        if disc > 16 && pell_from_sqrt_convergents(disc) != (x, y) {
            mismatches.push(disc);
        }
    }
    let pass = terms_ok && towers_ok && mismatches.is_empty();
    outcome(
        pass,
        format!(
            "terms {}, towers {}, Pell: {scanned} D agree with scan, {} beyond scan cap 2^20 {:?} checked by sqrt(D) convergents, mismatches {:?}",
            if terms_ok { "ok" } else { "WRONG" },
            if towers_ok { "ok" } else { "MISSING" },
            beyond_cap.len(),
            beyond_cap,
            mismatches
        ),
    )
}

// ---------------------------------------------------------------- criterion 7

fn discriminants() -> Outcome {
    let bad: Vec<u64> = D5_TERMS.iter().copied().filter(|&d| sic_discriminant(d).map(|r| r.discriminant).ok() != Some(5)).collect();
    outcome(bad.is_empty(), format!("D=5 for all {} terms up to 103683; failures {bad:?}", D5_TERMS.len()))
}

// ---------------------------------------------------------------- criterion 8

type QPoly = Vec<BigRational>;

fn trim(mut p: QPoly) -> QPoly {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn poly_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lb;
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= &c * bi;
        }
        r.pop();
        r = trim(r);
        if r.len() < b.len() {
            break;
        }
    }
    trim(r)
}

fn poly_div(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let lb = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.iter().all(|c| c.is_zero()) {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lb;
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= &c * bi;
        }
        q[shift] = c;
        r.pop();
    }
    trim(q)
}

fn is_zero_poly(p: &QPoly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !is_zero_poly(&b) {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn derivative(p: &QPoly) -> QPoly {
    if p.len() == 1 {
        return vec![BigRational::zero()];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect()
}

/// Durand-Kerner on a monic double-precision polynomial.
fn approximate_roots(p: &[f64]) -> Vec<Complex<f64>> {
    let n = p.len() - 1;
    let lead = p[n];
    let monic: Vec<f64> = p.iter().map(|c| c / lead).collect();
    let eval = |z: Complex<f64>| monic.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c);
    let radius = 1.0 + monic[..n].iter().fold(0f64, |m, c| m.max(f64::abs(*c)));
    let seed = Complex::new(0.4, 0.9);
    let mut z: Vec<Complex<f64>> = (0..n).map(|k| seed.powu(k as u32) * radius.min(2.0)).collect();
    for _ in 0..2000 {
        let mut moved = 0f64;
        for i in 0..n {
            let mut den = Complex::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Newton's method at 1024 bits on a square-free integer polynomial.
fn refine_root(coeffs: &[BigInt], z0: Complex<f64>) -> Complex<Mp1024> {
    let c: Vec<Mp1024> = coeffs.iter().map(|c| Mp1024::from_float(&Float::with_val(1024, &rug::Integer::from_str_radix(&c.to_string(), 10).unwrap()))).collect();
    let dc: Vec<Mp1024> = c.iter().enumerate().skip(1).map(|(i, x)| x.clone() * Mp1024::from_i64(i as i64)).collect();
    let eval = |p: &[Mp1024], z: &Complex<Mp1024>| {
        p.iter().rev().fold(Complex::new(Mp1024::zero(), Mp1024::zero()), |acc, a| acc * z.clone() + Complex::new(a.clone(), Mp1024::zero()))
    };
    let mut z = Complex::new(Mp1024::from_f64(z0.re), Mp1024::from_f64(z0.im));
    for _ in 0..200 {
        let step = eval(&c, &z) / eval(&dc, &z);
        z = z - step.clone();
        if step.norm_sqr().log2_abs() < -2.0 * 1000.0 {
            break;
        }
    }
    z
}

fn to_rational(c: &[i64]) -> QPoly {
    c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

fn integer_primitive(p: &QPoly) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
    ints.iter().map(|c| c / &g).collect()
}

struct RoundTrip {
    recovered: usize,
    total: usize,
    failures: Vec<String>,
    worked: Vec<(String, Vec<i64>, Vec<i64>)>,
}

fn recognition_round_trip(artifacts: &mut Vec<(String, String)>) -> RoundTrip {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = RecognitionConfig::new(8, 256);
    let mut recovered = 0;
    let mut failures = Vec::new();
    let mut log = Vec::new();
    for case in 0..100 {
        let deg = rng.random_range(1..=8usize);
        let mut raw: Vec<i64> = (0..=deg).map(|_| rng.random_range(-20..=20)).collect();
        while raw[deg] == 0 {
            raw[deg] = rng.random_range(-20..=20);
        }
        let p = to_rational(&raw);
        let g = poly_gcd(&p, &derivative(&p));
        let sf = integer_primitive(&poly_div(&p, &g));
        let approx = approximate_roots(&sf.iter().map(|c| c.to_f64().unwrap()).collect::<Vec<_>>());
        let z0 = approx[rng.random_range(0..approx.len())];
        let root = refine_root(&sf, z0);
        let x = Complex::new(Mp512::from_float(root.re.as_float()), Mp512::from_float(root.im.as_float()));
        match recognize_algebraic(&x, &cfg) {
            Ok(q) => {
                let divides = is_zero_poly(&poly_rem(&p, &to_rational(&q.coefficients)));
                if divides && q.degree >= 1 {
                    recovered += 1;
                } else {
                    failures.push(format!("case {case}: {raw:?} -> {:?}", q.coefficients));
                }
                log.push(json!({ "poly": raw, "divisor": q.coefficients }));
            }
            Err(e) => {
                failures.push(format!("case {case}: {raw:?}: {e}"));
                log.push(json!({ "poly": raw, "divisor": Value::Null }));
            }
        }
    }
    artifacts.push(("round-trip".into(), to_pretty(&Value::Array(log))));

    let mut worked = Vec::new();
    let two = Mp512::from_i64(2);
    let sqrt2 = Complex::new(two.sqrt(), Mp512::zero());
    let (s7, c7) = (Mp512::pi() * Mp512::from_i64(2) / Mp512::from_i64(7)).sin_cos();
    let root7 = Complex::new(c7, s7);
    let beta = Complex::new(two.sqrt().sqrt(), Mp512::one());
    for (name, x, expect) in [
        ("sqrt(2)", sqrt2, vec![-2, 0, 1]),
        ("exp(2 pi i/7)", root7, vec![1; 7]),
        ("i + 2^(1/4)", beta, vec![1, 0, 28, 0, 2, 0, 4, 0, 1]),
    ] {
        let got = recognize_algebraic(&x, &cfg).map(|p| p.coefficients).unwrap_or_default();
        worked.push((name.to_string(), got, expect));
    }
    RoundTrip { recovered, total: 100, failures, worked }
}

fn check_round_trip(rt: &RoundTrip) -> Outcome {
    let worked_ok = rt.worked.iter().all(|(_, g, e)| g == e);
    let mut detail = format!("{}/{} random polynomials recovered a divisor", rt.recovered, rt.total);
    for (name, got, expect) in &rt.worked {
        detail.push_str(&format!("; {name} -> {got:?}{}", if got == expect { "" } else { " (expected different)" }));
    }
    if !rt.failures.is_empty() {
        detail.push_str(&format!("; first failure: {}", rt.failures[0]));
    }
    outcome(rt.recovered == rt.total && worked_ok, detail)
}

// ---------------------------------------------------------------- criterion 9

fn unit_recognition(artifacts: &mut Vec<(String, String)>) -> Vec<(usize, sic_core::recognition::PhaseReport)> {
    [4usize, 5]
        .into_iter()
        .map(|d| {
            let ctx: DimensionContext<Mp1024> = make_context(d).unwrap();
            let cfg = SearchConfig { polish_precision_bits: 1024, ..SearchConfig::default() };
            let f = find_fiducial(&ctx, &cfg).unwrap();
            let t = compute_overlaps(&ctx, &f).unwrap();
            let report = recognize_overlap_phases(&t, &RecognitionConfig::new(32, 512)).unwrap();
            artifacts.push((format!("fiducial1024-{d}"), to_pretty(&fiducial_to_json(&f))));
            artifacts.push((format!("recognition-{d}"), to_pretty(&recognition_to_json(&report, None))));
            (d, report)
        })
        .collect()
}

fn check_units(reports: &[(usize, sic_core::recognition::PhaseReport)]) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (d, r) in reports {
        let s = &r.summary;
        let polys_ok = r.per_phase.iter().filter_map(|p| p.polynomial.as_ref()).all(|p| {
            certify_algebraic_integer(p) && certify_unit(p) && p.is_palindromic_up_to_sign() && p.residual_log2 < -1.2 * 512.0
        });
        let coverage = r.unit_coverage();
        ok &= s.certified_non_units == 0 && coverage >= 0.9 && polys_ok;
        notes.push(format!(
            "d={d}: {}/{} units, {} non-units, {} failures, coverage {:.0}%, max degree {}",
            s.units,
            s.total,
            s.certified_non_units,
            s.failures,
            100.0 * coverage,
            s.max_degree_found
        ));
    }
    outcome(ok, notes.join("; "))
}

// ---------------------------------------------------------------- driver

fn pipeline() -> Run {
    let mut artifacts = Vec::new();
    let fiducials = fiducial_searches(&mut artifacts);
    let mut sink = Vec::new();
    check_overlaps(&fiducials, &mut sink);
    check_stability(&fiducials, &mut sink);
    number_theory_exact(&mut sink);
    artifacts.extend(sink);
    let round_trip = recognition_round_trip(&mut artifacts);
    let recognition = unit_recognition(&mut artifacts);
    Run { fiducials, artifacts, recognition, round_trip }
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut timed = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((n, name, o, t.elapsed().as_secs_f64()));
        let (n, name, o, secs) = results.last().unwrap();
        println!("[{}] criterion {n:>2} {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };

    timed(1, "group law", &mut group_law);
    timed(2, "Clifford covariance", &mut clifford_covariance);

    let t = Instant::now();
    let first = pipeline();
    let pipeline_secs = t.elapsed().as_secs_f64();
    let mut scratch = Vec::new();
    timed(3, "fiducial search", &mut || check_search(&first.fiducials));
    timed(4, "overlap magnitudes", &mut || check_overlaps(&first.fiducials, &mut scratch));
    timed(5, "stability", &mut || check_stability(&first.fiducials, &mut scratch));
    timed(6, "number theory", &mut || number_theory_exact(&mut scratch));
    timed(7, "discriminants", &mut discriminants);
    timed(8, "recognition round trip", &mut || check_round_trip(&first.round_trip));
    timed(9, "unit certification", &mut || check_units(&first.recognition));
    timed(10, "determinism", &mut || {
        let second = pipeline();
        let differing: Vec<&str> = first
            .artifacts
            .iter()
            .zip(&second.artifacts)
            .filter(|(a, b)| a != b)
            .map(|(a, _)| a.0.as_str())
            .collect();
        let same = differing.is_empty() && first.artifacts.len() == second.artifacts.len();
        outcome(same, format!("{} artifacts compared byte for byte, differing {differing:?}", first.artifacts.len()))
    });
    println!("pipeline for criteria 3-9 took {pipeline_secs:.1}s");

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", results.len(), results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
