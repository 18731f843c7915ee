//! Discriminants, the Pell-type equation `(d-1)^2 - m^2 D = 4`, Chebyshev
//! dimension sequences and dimension towers. All arithmetic is exact.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Result, SicError};

/// Trial division stops at this prime bound.
pub const TRIAL_DIVISION_BOUND: u64 = 1 << 32;

/// Largest square-free `D` with `n / D` a perfect square.
pub fn squarefree_part(n: &BigUint) -> Result<BigUint> {
    squarefree_part_bounded(n, TRIAL_DIVISION_BOUND)
}

/// As [`squarefree_part`], failing once a trial divisor reaches `bound`.
pub fn squarefree_part_bounded(n: &BigUint, bound: u64) -> Result<BigUint> {
    if n.is_zero() {
        return Err(SicError::Domain("square-free part of 0".into()));
    }
    if let Some(small) = n.to_u64().filter(|&s| s < bound.saturating_mul(bound)) {
        return Ok(BigUint::from(squarefree_part_u64(small)?));
    }
    let mut rest = n.clone();
    let mut out = BigUint::one();
    let mut p = 2u64;
    while BigUint::from(p) * BigUint::from(p) <= rest {
        if p >= bound {
            return Err(SicError::FactorBound(n.to_string()));
        }
        let bp = BigUint::from(p);
        let mut odd = false;
        while (&rest % p).is_zero() {
            rest /= p;
            odd = !odd;
        }
        if odd {
            out *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Ok(out * rest)
}

pub fn squarefree_part_u64(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(SicError::Domain("square-free part of 0".into()));
    }
    let mut rest = n;
    let mut out = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        let mut odd = false;
        while rest % p == 0 {
            rest /= p;
            odd = !odd;
        }
        if odd {
            out *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Ok(out * rest)
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && squarefree_part_u64(n).map(|s| s == n).unwrap_or(false)
}

/// `d'`: `d` for odd `d`, `2d` for even `d`.
pub fn dprime(d: &BigInt) -> BigInt {
    if d.is_even() {
        d * 2
    } else {
        d.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantRecord {
    pub d: u64,
    pub discriminant: u64,
    pub d_prime: u64,
}

/// `D` = square-free part of `(d-3)(d+1)` for `d >= 4`.
pub fn sic_discriminant(d: u64) -> Result<DiscriminantRecord> {
    if d < 4 {
        return Err(SicError::Domain(format!("d = {d}: discriminants are defined for d >= 4")));
    }
    let n = BigUint::from(d - 3) * BigUint::from(d + 1);
    let sf = squarefree_part(&n)?;
    let discriminant = sf.to_u64().ok_or_else(|| SicError::Domain("discriminant overflow".into()))?;
    Ok(DiscriminantRecord { d, discriminant, d_prime: if d % 2 == 0 { 2 * d } else { d } })
}

/// Fundamental solution `(d1, m1)` of `(d-1)^2 - m^2 D = 4` with `d1 > 3`,
/// from the fundamental unit of the order `Z[(1 + sqrt D)/2]` (for `D = 1 mod 4`)
/// or `Z[sqrt D]`.
pub fn pell_fundamental(discriminant: u64) -> Result<(BigInt, BigInt)> {
    let (x, y) = pell_four(discriminant)?;
    Ok((x + 1, y))
}

/// Smallest positive solution of `x^2 - D y^2 = 4`.
pub fn pell_four(discriminant: u64) -> Result<(BigInt, BigInt)> {
    if discriminant < 2 || !is_squarefree(discriminant) {
        return Err(SicError::Domain(format!("D = {discriminant} is not a square-free integer above 1")));
    }
    let dd = BigInt::from(discriminant);
    let one_mod_four = discriminant % 4 == 1;
    // continued fraction of (P + sqrt D) / Q
    let (mut big_p, mut big_q) = if one_mod_four { (BigInt::one(), BigInt::from(2)) } else { (BigInt::zero(), BigInt::one()) };
    let s = dd.sqrt();
    let (mut h, mut h_prev) = (BigInt::one(), BigInt::zero());
    let (mut k, mut k_prev) = (BigInt::zero(), BigInt::one());
    loop {
        let a = (&big_p + &s).div_floor(&big_q);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        // norm of the unit attached to the convergent h/k
        let (norm, x, y) = if one_mod_four {
            let n = &h * &h - &h * &k - &k * &k * ((&dd - 1u32) / 4u32);
            (n, &h * 2 - &k, k.clone())
        } else {
            (&h * &h - &dd * &k * &k, &h * 2, &k * 2)
        };
        if norm.is_one() {
            return Ok((x, y));
        }
        if norm == BigInt::from(-1) {
            // (x + y sqrt D)/2 has norm -1; square it
            let x2 = (&x * &x + &dd * &y * &y) / 2;
            let y2 = &x * &y;
            return Ok((x2, y2));
        }
        big_p = &a * &big_q - &big_p;
        big_q = (&dd - &big_p * &big_p) / &big_q;
    }
}

/// Scans `y = 1, 2, ..., y_max` for the first solution of `x^2 - D y^2 = 4`.
pub fn pell_four_scan(discriminant: u64, y_max: u64) -> Option<(u128, u128)> {
    let dd = discriminant as u128;
    // walk x upward alongside y, keeping t = x^2 - D y^2 - 4
    let mut x: u128 = 2;
    let mut t: i128 = 0;
    for y in 1..=y_max as u128 {
        t -= (dd * (2 * y - 1)) as i128;
        while t < 0 {
            t += (2 * x + 1) as i128;
            x += 1;
        }
        if t == 0 {
            return Some((x, y));
        }
    }
    None
}

/// `T_j(x)` by the three-term recurrence, over any numeric type.
pub fn chebyshev_t<N>(j: usize, x: &N) -> N
where
    N: num_traits::Num + Clone,
{
    let two = N::one() + N::one();
    let (mut a, mut b) = (N::one(), x.clone());
    if j == 0 {
        return a;
    }
    for _ in 1..j {
        let c = two.clone() * x.clone() * b.clone() - a;
        a = b;
        b = c;
    }
    b
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionSequence {
    pub discriminant: u64,
    pub d1: BigInt,
    pub terms: Vec<BigInt>,
    pub m_values: Vec<BigInt>,
}

/// First `count` dimensions `d_j = 1 + 2 T_j((d1 - 1)/2)` for the discriminant `D`.
pub fn dimension_sequence(discriminant: u64, count: usize) -> Result<DimensionSequence> {
    if count == 0 {
        return Err(SicError::Domain("count must be at least 1".into()));
    }
    let (d1, m1) = pell_fundamental(discriminant)?;
    let x1: BigInt = &d1 - 1u32;
    let dd = BigInt::from(discriminant);
    let (mut s_prev, mut s) = (BigInt::from(2), x1.clone());
    let (mut y_prev, mut y) = (BigInt::zero(), m1);
    let mut terms = Vec::with_capacity(count);
    let mut m_values = Vec::with_capacity(count);
    for _ in 0..count {
        let d = &s + 1;
        if &s * &s - &y * &y * &dd != BigInt::from(4) {
            return Err(SicError::Domain(format!("term {d} fails the Pell relation")));
        }
        terms.push(d);
        m_values.push(y.clone());
        let s_next = &x1 * &s - &s_prev;
        let y_next = &x1 * &y - &y_prev;
        s_prev = std::mem::replace(&mut s, s_next);
        y_prev = std::mem::replace(&mut y, y_next);
    }
    Ok(DimensionSequence { discriminant, d1, terms, m_values })
}

pub type Tower = Vec<BigInt>;

/// Maximal divisibility chains among `terms`: paths in the Hasse diagram from
/// a minimal to a maximal element, truncated at `max_len` terms. Sorted by first
/// element, then length, then lexicographically.
pub fn dimension_towers(terms: &[BigInt], max_len: usize) -> Vec<Tower> {
    let mut xs: Vec<BigInt> = terms.to_vec();
    xs.sort();
    xs.dedup();
    let n = xs.len();
    let divides = |a: &BigInt, b: &BigInt| a != b && (b % a).is_zero();
    // covering relation: a | b with nothing strictly between
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if divides(&xs[i], &xs[j]) && !(i + 1..j).any(|k| divides(&xs[i], &xs[k]) && divides(&xs[k], &xs[j])) {
                covers[i].push(j);
            }
        }
    }
    let minimal: Vec<usize> = (0..n).filter(|&j| !(0..j).any(|i| divides(&xs[i], &xs[j]))).collect();
    let mut out = Vec::new();
    let mut path = Vec::new();
    for &m in &minimal {
        walk(m, &covers, &xs, max_len.max(1), &mut path, &mut out);
    }
    out.sort_by(|a: &Tower, b: &Tower| a[0].cmp(&b[0]).then(a.len().cmp(&b.len())).then(a.cmp(b)));
    out.dedup();
    out
}

fn walk(i: usize, covers: &[Vec<usize>], xs: &[BigInt], max_len: usize, path: &mut Vec<usize>, out: &mut Vec<Tower>) {
    path.push(i);
    if covers[i].is_empty() || path.len() == max_len {
        out.push(path.iter().map(|&k| xs[k].clone()).collect());
    } else {
        for &j in &covers[i] {
            walk(j, covers, xs, max_len, path, out);
        }
    }
    path.pop();
}

pub fn is_tower(chain: &[BigInt]) -> bool {
    chain.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
}
