//! Representation numbers of sums of squares.
//!
//! `R_d(n)` counts `μ ∈ Z^d` with `|μ|² = n` and `A_d(n, t)` counts ordered
//! pairs on that sphere with inner product `t`. The near-diagonal sum
//!
//! ```text
//! S_d(λ, T) = Σ_{λ - T²/2 <= t <= λ - 1} A_d(λ, t)
//! ```
//!
//! counts pairs of distinct points at distance at most `T`, since
//! `|μ - ν|² = 2(λ - t)`. Everything here is exact integer arithmetic with
//! checked operations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{
    enumerate_sphere, equal_norm_shift_count_in, gcd, radius_sq_floor, sphere_count,
    visit_ball, visit_sphere_orbits, Eigenspace, MAX_NORM,
};

fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// `R_d(n)` by nested loops over the first `d - 1` coordinates and an exact
/// square-root test on the last. Deliberately independent of the lattice
/// enumerators so it can serve as their oracle.
pub fn r_d_bruteforce(d: usize, n: u64) -> Result<u64> {
    check_dim(d)?;
    let s = n.isqrt();
    (s + 2)
        .checked_mul(s + 2)
        .and_then(|q| q.checked_mul(d as u64))
        .ok_or(Error::Overflow("r_d_bruteforce"))?;

    // number of y in Z with y² = m
    let last = |m: u64| -> u64 {
        let r = m.isqrt();
        match (r * r == m, r) {
            (false, _) => 0,
            (true, 0) => 1,
            (true, _) => 2,
        }
    };
    let s = s as i64;
    let mut count = 0u64;
    match d {
        2 => {
            for a in -s..=s {
                count += last(n - (a * a) as u64);
            }
        }
        3 => {
            for a in -s..=s {
                let ra = n - (a * a) as u64;
                let sb = ra.isqrt() as i64;
                for b in -sb..=sb {
                    count += last(ra - (b * b) as u64);
                }
            }
        }
        _ => {
            for a in -s..=s {
                let ra = n - (a * a) as u64;
                let sb = ra.isqrt() as i64;
                for b in -sb..=sb {
                    let rb = ra - (b * b) as u64;
                    let sc = rb.isqrt() as i64;
                    for c in -sc..=sc {
                        count += last(rb - (c * c) as u64);
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `R_4(n) = 8 Σ_{k | n, 4 ∤ k} k`, with divisors found by trial division.
pub fn r4_jacobi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(precondition("r4_jacobi needs n >= 1"));
    }
    let overflow = Error::Overflow("r4_jacobi");
    let mut sum = 0u64;
    let mut add = |k: u64| -> Result<()> {
        if k % 4 != 0 {
            sum = sum.checked_add(k).ok_or(overflow.clone())?;
        }
        Ok(())
    };
    let mut k = 1u64;
    while k <= n / k {
        if n % k == 0 {
            add(k)?;
            if k != n / k {
                add(n / k)?;
            }
        }
        k += 1;
    }
    sum.checked_mul(8).ok_or(Error::Overflow("r4_jacobi"))
}

fn check_inner(n: u64, t: i64, strict: bool) -> Result<()> {
    let bad = if strict {
        t.unsigned_abs() >= n
    } else {
        t.unsigned_abs() > n
    };
    if bad {
        let rel = if strict { "<" } else { "<=" };
        return Err(precondition(format!("need |t| {rel} n, got n = {n}, t = {t}")));
    }
    Ok(())
}

/// `A_d(n, t)` by testing every ordered pair of `E_n`.
pub fn a_d_bruteforce(d: usize, n: u64, t: i64) -> Result<u64> {
    check_inner(n, t, false)?;
    let e = enumerate_sphere(d, n)?;
    let pts = e.points();
    let mut count = 0u64;
    for mu in pts {
        count += pts.iter().filter(|nu| mu.dot(nu) == t).count() as u64;
    }
    Ok(count)
}

/// `A_d(n, t)` over a contiguous range of `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepProfile {
    pub d: usize,
    pub n: u64,
    /// `(t, A_d(n, t))`, strictly increasing in `t`.
    pub entries: Vec<(i64, u64)>,
}

impl RepProfile {
    /// The full histogram over `-n <= t <= n` from one pass over all pairs.
    pub fn bruteforce(d: usize, n: u64) -> Result<Self> {
        let e = enumerate_sphere(d, n)?;
        Ok(Self::from_space(&e))
    }

    pub fn from_space(e: &Eigenspace) -> Self {
        let n = e.eigenvalue();
        let mut hist = vec![0u64; 2 * n as usize + 1];
        let pts = e.points();
        for (i, mu) in pts.iter().enumerate() {
            hist[2 * n as usize] += 1;
            for nu in &pts[i + 1..] {
                hist[(mu.dot(nu) + n as i64) as usize] += 2;
            }
        }
        RepProfile {
            d: e.dim(),
            n,
            entries: hist
                .into_iter()
                .enumerate()
                .map(|(i, c)| (i as i64 - n as i64, c))
                .collect(),
        }
    }

    /// `A_d(λ, t)` for `λ - k_max <= t <= λ`, using the four-square
    /// formula when `d = 4` and `λ` is odd and pair counting otherwise.
    pub fn near_diagonal(d: usize, lambda: u64, k_max: u64) -> Result<Self> {
        check_dim(d)?;
        if lambda == 0 || k_max > 2 * lambda {
            return Err(precondition(format!(
                "near-diagonal profile needs λ >= 1 and k_max <= 2λ, got λ = {lambda}, k_max = {k_max}"
            )));
        }
        let mut entries = Vec::with_capacity(k_max as usize + 1);
        if d == 4 && lambda % 2 == 1 {
            for k in (1..=k_max).rev() {
                let t = lambda as i64 - k as i64;
                let c = if k == 2 * lambda {
                    // t = -λ pairs μ with -μ
                    r4_jacobi(lambda)?
                } else {
                    a4_pall_taussky(lambda, t)?
                };
                entries.push((t, c));
            }
            entries.push((lambda as i64, r4_jacobi(lambda)?));
        } else {
            let e = enumerate_sphere(d, lambda)?;
            let hist = close_pair_histogram(&e, k_max);
            for k in (0..=k_max).rev() {
                entries.push((lambda as i64 - k as i64, hist[k as usize]));
            }
        }
        Ok(RepProfile {
            d,
            n: lambda,
            entries,
        })
    }

    pub fn count(&self, t: i64) -> Option<u64> {
        self.entries
            .binary_search_by_key(&t, |&(s, _)| s)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn total(&self) -> u128 {
        self.entries.iter().map(|&(_, c)| c as u128).sum()
    }

    /// `S_d(n, T)` read off the profile; fails if the needed `t` range is
    /// not covered.
    pub fn s_sum(&self, t_radius: f64) -> Result<u64> {
        let k_max = check_s_radius(self.n, t_radius)?;
        let mut total = 0u64;
        for k in 1..=k_max {
            let t = self.n as i64 - k as i64;
            let c = self
                .count(t)
                .ok_or_else(|| precondition(format!("profile does not cover t = {t}")))?;
            total = total.checked_add(c).ok_or(Error::Overflow("s_sum"))?;
        }
        Ok(total)
    }

    /// Sorted, symmetric where both sides are present, and `A(n, n) = R_d(n)`.
    pub fn check_invariants(&self) -> Result<()> {
        if !self.entries.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(precondition("profile entries are not strictly increasing in t"));
        }
        for &(t, c) in &self.entries {
            if let Some(m) = self.count(-t) {
                if m != c {
                    return Err(precondition(format!("A({t}) = {c} but A({}) = {m}", -t)));
                }
            }
        }
        if let Some(c) = self.count(self.n as i64) {
            let r = sphere_count(self.d, self.n)?;
            if c != r {
                return Err(precondition(format!("A(n, n) = {c} but R_d(n) = {r}")));
            }
        }
        Ok(())
    }
}

/// `hist[k]` = ordered pairs `(μ, ν)` of `E` with `|μ - ν|² = 2k`, for
/// `k <= k_max`. Only pairs within the first-coordinate window are touched.
fn close_pair_histogram(e: &Eigenspace, k_max: u64) -> Vec<u64> {
    let mut hist = vec![0u64; k_max as usize + 1];
    hist[0] = e.len() as u64;
    let bound = 2 * k_max as i64;
    let span = (bound as u64).isqrt() as i64;
    let pts = e.points();
    for (i, mu) in pts.iter().enumerate() {
        let x0 = mu.as_slice()[0];
        for nu in &pts[i + 1..] {
            if nu.as_slice()[0] - x0 > span {
                break;
            }
            let d2 = mu.dist_sq(nu);
            if d2 <= bound {
                hist[(d2 / 2) as usize] += 2;
            }
        }
    }
    hist
}

fn check_odd(n: u64, t: i64) -> Result<()> {
    if n % 2 == 0 {
        return Err(precondition(format!("n must be odd, got {n}")));
    }
    check_inner(n, t, true)
}

/// `n² - t²`, the squared radius of the three-dimensional sphere that
/// parametrises pairs with inner product `t`.
fn inner_norm(n: u64, t: i64) -> Result<u64> {
    let ta = t.unsigned_abs();
    let m = n
        .checked_mul(n)
        .and_then(|n2| n2.checked_sub(ta * ta))
        .ok_or(Error::Overflow("n² - t²"))?;
    if m > MAX_NORM {
        return Err(Error::TooLarge {
            value: m,
            bound: MAX_NORM,
        });
    }
    Ok(m)
}

/// `A_4(n, t)` for odd `n` and `|t| < n`:
///
/// ```text
/// A_4(n, t) = Σ_{h | e} R_4(h) · #{ν ∈ Z³ : |ν|² = n² - t², gcd(ν, e) = h},   e = gcd(n, t).
/// ```
///
/// The inner count is gathered over hyperoctahedral orbits, since the gcd of
/// the coordinates is invariant under signed permutations.
pub fn a4_pall_taussky(n: u64, t: i64) -> Result<u64> {
    check_odd(n, t)?;
    let m = inner_norm(n, t)?;
    let e = gcd(n, t.unsigned_abs());
    let mut by_h: BTreeMap<u64, u64> = BTreeMap::new();
    visit_sphere_orbits(3, m, |rep, size| {
        let g = rep.iter().fold(e, |g, &c| gcd(g, c as u64));
        *by_h.entry(g).or_default() += size;
    })?;
    let overflow = Error::Overflow("a4_pall_taussky");
    let mut total = 0u64;
    for (h, count) in by_h {
        let term = r4_jacobi(h)?
            .checked_mul(count)
            .ok_or(overflow.clone())?;
        total = total.checked_add(term).ok_or(overflow.clone())?;
    }
    Ok(total)
}

/// `8 · R_3(n² - t²)`, a lower bound for `A_4(n, t)` that is an equality
/// when `gcd(n, t) = 1`.
pub fn a4_lower_bound(n: u64, t: i64) -> Result<u64> {
    check_odd(n, t)?;
    let m = inner_norm(n, t)?;
    sphere_count(3, m)?
        .checked_mul(8)
        .ok_or(Error::Overflow("a4_lower_bound"))
}

/// Validates `0 < T <= √(2λ)` and returns `k_max = ⌊T²/2⌋`, the largest
/// `λ - t` in the summation range.
fn check_s_radius(lambda: u64, t_radius: f64) -> Result<u64> {
    if lambda == 0 {
        return Err(precondition("S_d needs λ >= 1"));
    }
    if !(t_radius > 0.0) || t_radius * t_radius > 2.0 * lambda as f64 * (1.0 + 1e-12) {
        return Err(precondition(format!(
            "need 0 < T <= √(2λ), got T = {t_radius}, λ = {lambda}"
        )));
    }
    let k = radius_sq_floor(t_radius).max(0) as u64 / 2;
    Ok(k.min(lambda))
}

/// `S_d(λ, T)`: exact sum of `A_d(λ, t)` over integer `t` with
/// `λ - T²/2 <= t <= λ - 1`.
///
/// Odd `λ` in four dimensions goes through [`a4_pall_taussky`] term by
/// term, which is far cheaper than enumerating `E_λ` once `λ` is large.
/// Everything else counts close pairs directly.
pub fn s_d(d: usize, lambda: u64, t_radius: f64) -> Result<u64> {
    check_dim(d)?;
    let k_max = check_s_radius(lambda, t_radius)?;
    if k_max == 0 {
        return Ok(0);
    }
    if d == 4 && lambda % 2 == 1 {
        let mut total = 0u64;
        for k in 1..=k_max {
            let c = a4_pall_taussky(lambda, lambda as i64 - k as i64)?;
            total = total.checked_add(c).ok_or(Error::Overflow("s_d"))?;
        }
        return Ok(total);
    }
    s_d_bruteforce(d, lambda, t_radius)
}

/// `S_d(λ, T)` by counting close pairs of `E_λ`, whatever `d` and `λ` are.
pub fn s_d_bruteforce(d: usize, lambda: u64, t_radius: f64) -> Result<u64> {
    check_dim(d)?;
    let k_max = check_s_radius(lambda, t_radius)?;
    if k_max == 0 {
        return Ok(0);
    }
    let e = enumerate_sphere(d, lambda)?;
    Ok(close_pair_histogram(&e, k_max)[1..].iter().sum())
}

/// `S_d(λ, T)` the other way round: sum over shifts `ζ` with
/// `2 <= |ζ|² <= T²` of `#{μ : |μ|² = λ = |μ + ζ|²}`.
pub fn s_d_via_pairs(d: usize, lambda: u64, t_radius: f64) -> Result<u64> {
    check_dim(d)?;
    check_s_radius(lambda, t_radius)?;
    let bound = radius_sq_floor(t_radius);
    if bound < 2 {
        return Ok(0);
    }
    let e = enumerate_sphere(d, lambda)?;
    let mut total = 0u64;
    let mut failure = None;
    visit_ball(d, bound as u64, |zeta| {
        let z2 = zeta.norm_sq();
        if z2 < 2 || z2 % 2 == 1 || failure.is_some() {
            return;
        }
        match equal_norm_shift_count_in(&e, zeta) {
            Ok(c) => total += c,
            Err(err) => failure = Some(err),
        }
    })?;
    match failure {
        Some(err) => Err(err),
        None => Ok(total),
    }
}

/// `A_3(n, t) / gcd(n, t)^{1/2}`.
pub fn a3_ratio(n: u64, t: i64) -> Result<f64> {
    check_inner(n, t, true)?;
    let a = a_d_bruteforce(3, n, t)?;
    let e = gcd(n, t.unsigned_abs());
    Ok(a as f64 / (e as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rep_examples() {
        assert_eq!(r_d_bruteforce(3, 1).unwrap(), 6);
        assert_eq!(r_d_bruteforce(2, 25).unwrap(), 12);
        assert_eq!(r_d_bruteforce(4, 3).unwrap(), 32);
        assert_eq!(r_d_bruteforce(2, 0).unwrap(), 1);
        assert_eq!(r_d_bruteforce(1, 4), Err(Error::Dimension(1)));
        assert!(matches!(
            r_d_bruteforce(4, u64::MAX),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(r4_jacobi(1).unwrap(), 8);
        assert_eq!(r4_jacobi(3).unwrap(), 32);
        assert_eq!(r4_jacobi(4).unwrap(), 24);
        assert!(r4_jacobi(0).is_err());
        for n in 1..=300 {
            assert_eq!(r4_jacobi(n).unwrap(), r_d_bruteforce(4, n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn pair_examples() {
        assert_eq!(a_d_bruteforce(2, 1, 0).unwrap(), 8);
        assert_eq!(a_d_bruteforce(4, 1, 0).unwrap(), 48);
        assert_eq!(a_d_bruteforce(3, 1, 1).unwrap(), 6);
        assert!(a_d_bruteforce(3, 1, 2).is_err());
    }

    #[test]
    fn four_square_formula_examples() {
        assert_eq!(a4_pall_taussky(1, 0).unwrap(), 48);
        assert_eq!(a4_pall_taussky(3, 2).unwrap(), a_d_bruteforce(4, 3, 2).unwrap());
        // e = 25 here and the h = 5, 25 terms do contribute, so the value
        // sits strictly above 8·R_3(625)
        let pt = a4_pall_taussky(25, 0).unwrap();
        assert_eq!(pt, a_d_bruteforce(4, 25, 0).unwrap());
        assert!(pt > 8 * r_d_bruteforce(3, 625).unwrap());
        assert!(a4_pall_taussky(4, 1).is_err());
        assert!(a4_pall_taussky(5, 5).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(a4_lower_bound(1, 0).unwrap(), 48);
        assert_eq!(r_d_bruteforce(3, 25).unwrap(), 30);
        assert_eq!(a4_lower_bound(5, 0).unwrap(), 240);
        assert!(a_d_bruteforce(4, 5, 0).unwrap() >= 240);
        assert_eq!(r_d_bruteforce(3, 9).unwrap(), 30);
        assert_eq!(a4_lower_bound(3, 0).unwrap(), 240);
        assert!(a4_pall_taussky(3, 0).unwrap() >= 240);
    }

    #[test]
    fn s_examples() {
        assert_eq!(s_d(2, 25, 2.0).unwrap(), 8);
        assert_eq!(a_d_bruteforce(2, 25, 23).unwrap(), 0);
        assert_eq!(s_d(3, 1, 1.0).unwrap(), 0);
        // T² / 2 = 2, so both t = 4 and t = 3 are in range
        let direct = a_d_bruteforce(4, 5, 4).unwrap() + a_d_bruteforce(4, 5, 3).unwrap();
        assert_eq!(s_d(4, 5, 2.0).unwrap(), direct);
        assert_eq!(s_d_bruteforce(4, 5, 2.0).unwrap(), direct);
        assert_eq!(s_d(4, 5, 1.9).unwrap(), a_d_bruteforce(4, 5, 4).unwrap());
        assert!(s_d(2, 25, 7.1).is_err());
        assert!(s_d(2, 25, 0.0).is_err());
        // T = √(2λ) is admissible despite rounding
        assert!(s_d(2, 25, (50f64).sqrt()).is_ok());
    }

    #[test]
    fn s_via_pairs_examples() {
        assert_eq!(s_d_via_pairs(2, 25, 2.0).unwrap(), 8);
        assert_eq!(s_d_via_pairs(3, 2, 2.0).unwrap(), s_d(3, 2, 2.0).unwrap());
        for d in 2..=4 {
            for lambda in 1..20 {
                assert_eq!(s_d_via_pairs(d, lambda, 1.0).unwrap(), 0);
            }
        }
    }

    #[test]
    fn a3_examples() {
        let a = a_d_bruteforce(3, 25, 0).unwrap() as f64;
        assert!((a3_ratio(25, 0).unwrap() - a / 5.0).abs() < 1e-12);
        assert_eq!(a3_ratio(2, 1).unwrap(), 48.0);
        assert_eq!(a3_ratio(1, 0).unwrap(), 24.0);
        assert!(a3_ratio(3, 3).is_err());
    }

    #[test]
    fn profile_invariants() {
        for d in 2..=4 {
            for n in [1u64, 5, 9, 25, 30] {
                let p = RepProfile::bruteforce(d, n).unwrap();
                p.check_invariants().unwrap();
                let r = r_d_bruteforce(d, n).unwrap() as u128;
                assert_eq!(p.total(), r * r);
                for t in [-(n as i64), 0, 1, n as i64 - 1] {
                    assert_eq!(p.count(t).unwrap(), a_d_bruteforce(d, n, t).unwrap());
                }
            }
        }
    }

    #[test]
    fn near_diagonal_matches_full_profile() {
        for d in 2..=4 {
            for n in [5u64, 9, 21, 26] {
                let full = RepProfile::bruteforce(d, n).unwrap();
                let near = RepProfile::near_diagonal(d, n, n.min(6)).unwrap();
                near.check_invariants().unwrap();
                for &(t, c) in &near.entries {
                    assert_eq!(full.count(t), Some(c), "d = {d}, n = {n}, t = {t}");
                }
                let t_rad = (2.0 * n.min(6) as f64).sqrt();
                assert_eq!(near.s_sum(t_rad).unwrap(), s_d(d, n, t_rad).unwrap());
            }
        }
    }

    #[test]
    fn siegel_floor_small() {
        for lambda in 1..=600u64 {
            if ![0, 4, 7].contains(&(lambda % 8)) {
                assert!(r_d_bruteforce(3, lambda).unwrap() >= 1, "λ = {lambda}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pair_count_is_symmetric(d in 2usize..=4, n in 1u64..40, s in 0.0f64..1.0) {
            let t = (s * n as f64).floor() as i64;
            prop_assert_eq!(a_d_bruteforce(d, n, t).unwrap(), a_d_bruteforce(d, n, -t).unwrap());
        }

        #[test]
        fn four_square_formula_agrees(half in 0u64..40, s in -1.0f64..1.0) {
            let n = 2 * half + 1;
            let t = (s * (n - 1) as f64).round() as i64;
            let exact = a_d_bruteforce(4, n, t).unwrap();
            prop_assert_eq!(a4_pall_taussky(n, t).unwrap(), exact);
            let lb = a4_lower_bound(n, t).unwrap();
            prop_assert!(lb <= exact);
            if gcd(n, t.unsigned_abs()) == 1 {
                prop_assert_eq!(lb, exact);
            }
        }

        #[test]
        fn shift_identity(d in 2usize..=4, lambda in 1u64..60, frac in 0.0f64..1.0) {
            let t_rad = (frac * 2.0 * lambda as f64).sqrt().max(0.5);
            prop_assert_eq!(
                s_d_via_pairs(d, lambda, t_rad).unwrap(),
                s_d_bruteforce(d, lambda, t_rad).unwrap()
            );
            prop_assert_eq!(s_d(d, lambda, t_rad).unwrap(), s_d_bruteforce(d, lambda, t_rad).unwrap());
        }
    }
}
