//! Explicit eigenfunction families.
//!
//! * [`theorem31_family`]: `cos(m x₁ + (m+1) x₂) + cos((m+1) x₁ + m x₂)`,
//!   whose mass on shrinking balls about the origin tends to 2.
//! * [`blowup_family`]: the equal-amplitude sum over a whole eigenspace,
//!   which concentrates at the origin, together with the arithmetic lower
//!   bound [`blowup_lower_bound`] for its ball averages in four dimensions.
//! * [`bourgain_pairs`] and [`pair_eigenfunction`]: two-mode eigenfunctions
//!   `(e_μ - e_μ')/√2` built from close pairs on the sphere, which vanish to
//!   second order at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{a4_lower_bound, r4_jacobi, s_d, RepProfile};
use crate::error::{check_dim, Error, Result};
use crate::lattice::{enumerate_sphere, neighbors_within, Eigenspace, LatticePoint};
use crate::spectral::{ball_kernel, Eigenfunction};

fn axis_point(d: usize, a: i64, b: i64) -> LatticePoint {
    let mut c = [0i64; 4];
    c[0] = a;
    c[1] = b;
    LatticePoint::from_slice(&c[..d])
}

/// `ψ_m = cos(m x₁ + (m+1) x₂) + cos((m+1) x₁ + m x₂)` on `T^d`, with
/// eigenvalue `m² + (m+1)²` and coefficient `1/2` on each of its four
/// frequencies.
pub fn theorem31_family(m: u64, d: usize) -> Result<Eigenfunction> {
    check_dim(d)?;
    if m == 0 || m > 1 << 19 {
        return Err(Error::Precondition(format!("m must lie in 1..=2^19, got {m}")));
    }
    let (a, b) = (m as i64, m as i64 + 1);
    let half = Complex64::new(0.5, 0.0);
    Eigenfunction::new(
        d,
        m * m + (m + 1) * (m + 1),
        [
            (axis_point(d, a, b), half),
            (axis_point(d, -a, -b), half),
            (axis_point(d, b, a), half),
            (axis_point(d, -b, -a), half),
        ],
    )
}

/// The radius `r_m = λ_m^{-1/2} m^{1/2}` at which the family is compared
/// with its limit: `r_m → 0` while `r_m √λ_m → ∞`.
pub fn theorem31_radius(m: u64) -> f64 {
    let lambda = (m * m + (m + 1) * (m + 1)) as f64;
    (m as f64).sqrt() / lambda.sqrt()
}

/// `N_λ^{-1/2} Σ_{|μ|² = λ} e_μ`.
pub fn blowup_family(lambda: u64, d: usize) -> Result<Eigenfunction> {
    let e = enumerate_sphere(d, lambda)?;
    if e.is_empty() {
        return Err(Error::Precondition(format!(
            "no lattice points with |μ|² = {lambda} in dimension {d}"
        )));
    }
    let amp = Complex64::new(1.0 / (e.len() as f64).sqrt(), 0.0);
    Eigenfunction::normalized(d, lambda, e.iter().map(|&mu| (mu, amp)))
}

/// Ball average of [`blowup_family`] over `B(0, r)`.
///
/// All coefficients are equal, so the double sum over frequency pairs
/// collapses onto the inner-product histogram:
/// `N_λ^{-1} Σ_t A_d(λ, t) K_d(r √(2(λ - t)))`. The histogram costs one
/// integer pass over pairs, which reaches well past the pair budget of the
/// general engine.
pub fn blowup_mass_average(d: usize, lambda: u64, r: f64) -> Result<f64> {
    let e = enumerate_sphere(d, lambda)?;
    if e.is_empty() {
        return Err(Error::Precondition(format!(
            "no lattice points with |μ|² = {lambda} in dimension {d}"
        )));
    }
    if !(r > 0.0 && r < std::f64::consts::PI) {
        return Err(Error::Precondition(format!("radius must lie in (0, π), got {r}")));
    }
    let profile = RepProfile::from_space(&e);
    let mut acc = 0.0;
    for &(t, count) in &profile.entries {
        if count > 0 {
            let dist = (2.0 * (lambda as i64 - t) as f64).sqrt();
            acc += count as f64 * ball_kernel(d, r * dist)?;
        }
    }
    Ok(acc / e.len() as f64)
}

/// Arithmetic lower bound for the ball averages of the four-dimensional
/// blowup family, with the unspecified small power realized as a log:
/// `T = 1/(r log(3 + λ))` and value `(1 + S_4(λ, T))/N_λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupBound {
    pub lambda: u64,
    pub r: f64,
    pub t_radius: f64,
    pub s_value: u64,
    pub n_lambda: u64,
    pub value: f64,
}

fn blowup_threshold(lambda: u64, r: f64) -> Result<f64> {
    if lambda % 2 == 0 {
        return Err(Error::Precondition(format!("λ must be odd, got {lambda}")));
    }
    let floor = 1.0 / (lambda as f64).sqrt();
    if !(r > floor) || !r.is_finite() {
        return Err(Error::Precondition(format!(
            "need r > λ^(-1/2) = {floor}, got r = {r}"
        )));
    }
    Ok(1.0 / (r * (3.0 + lambda as f64).ln()))
}

/// `(1 + S_4(λ, T))/N_λ` with `S_4` evaluated exactly through the
/// four-square formula.
pub fn blowup_lower_bound(lambda: u64, r: f64) -> Result<BlowupBound> {
    let t_radius = blowup_threshold(lambda, r)?;
    let s_value = s_d(4, lambda, t_radius)?;
    let n_lambda = r4_jacobi(lambda)?;
    Ok(BlowupBound {
        lambda,
        r,
        t_radius,
        s_value,
        n_lambda,
        value: (1.0 + s_value as f64) / n_lambda as f64,
    })
}

/// The weaker certified floor that keeps only even `t` and replaces
/// `A_4(λ, t)` by `8 R_3(λ² - t²)`; `s_value` is then a lower bound for
/// `S_4(λ, T)`.
pub fn blowup_lower_bound_floor(lambda: u64, r: f64) -> Result<BlowupBound> {
    let t_radius = blowup_threshold(lambda, r)?;
    let k_max = (t_radius * t_radius / 2.0).floor() as u64;
    let mut s_value = 0u64;
    for k in 1..=k_max.min(lambda) {
        let t = lambda as i64 - k as i64;
        if t % 2 == 0 {
            s_value = s_value
                .checked_add(a4_lower_bound(lambda, t)?)
                .ok_or(Error::Overflow("blowup_lower_bound_floor"))?;
        }
    }
    let n_lambda = r4_jacobi(lambda)?;
    Ok(BlowupBound {
        lambda,
        r,
        t_radius,
        s_value,
        n_lambda,
        value: (1.0 + s_value as f64) / n_lambda as f64,
    })
}

/// Disjoint close pairs `{μ, μ'}` on one sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairList {
    pub schema_version: u32,
    pub d: usize,
    pub lambda: u64,
    pub n_lambda: usize,
    /// Pairing radius `Y`.
    pub y: f64,
    pub pairs: Vec<(LatticePoint, LatticePoint)>,
}

impl PairList {
    /// `2 · #pairs / N_λ`.
    pub fn density(&self) -> f64 {
        if self.n_lambda == 0 {
            0.0
        } else {
            2.0 * self.pairs.len() as f64 / self.n_lambda as f64
        }
    }

    /// Largest `|μ - μ'|` over the pairs.
    pub fn max_separation(&self) -> f64 {
        self.pairs
            .iter()
            .map(|(a, b)| (a.dist_sq(b) as f64).sqrt())
            .fold(0.0, f64::max)
    }

    /// Pairs lie on the sphere, are pairwise disjoint and have
    /// `0 < |μ - μ'| <= Y`.
    pub fn check_invariants(&self) -> Result<()> {
        let bound = crate::lattice::radius_sq_floor(self.y);
        let mut seen: Vec<LatticePoint> = Vec::with_capacity(2 * self.pairs.len());
        for (a, b) in &self.pairs {
            for p in [a, b] {
                if p.dim() != self.d || p.norm_sq() as u64 != self.lambda {
                    return Err(Error::NotOnSphere(p.to_string(), self.lambda));
                }
                seen.push(*p);
            }
            let gap = a.dist_sq(b);
            if gap == 0 || gap > bound {
                return Err(Error::Precondition(format!(
                    "pair {a}, {b} has squared separation {gap} outside (0, {bound}]"
                )));
            }
        }
        seen.sort();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Precondition(format!("{} appears in two pairs", w[0])));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let list: PairList = serde_json::from_str(s)?;
        list.check_invariants()?;
        Ok(list)
    }
}

/// Greedy pairing: repeatedly take the lexicographically smallest remaining
/// point that still has a remaining neighbor within `Y`, and pair it with
/// its nearest such neighbor (ties broken lexicographically).
///
/// Removing points never creates new neighbors, so a point skipped once
/// stays unpairable and one lexicographic sweep realizes the loop.
pub fn bourgain_pairs(space: &Eigenspace, y: f64) -> PairList {
    let pts = space.points();
    let nbrs = neighbors_within(space, y);
    let mut alive = vec![true; pts.len()];
    let mut pairs = Vec::new();
    for i in 0..pts.len() {
        if !alive[i] {
            continue;
        }
        if let Some(&j) = nbrs[i].iter().find(|&&j| alive[j]) {
            alive[i] = false;
            alive[j] = false;
            pairs.push((pts[i], pts[j]));
        }
    }
    PairList {
        schema_version: 1,
        d: space.dim(),
        lambda: space.eigenvalue(),
        n_lambda: pts.len(),
        y,
        pairs,
    }
}

/// The pairing radius `Y = λ^{1/(2(d-1))} log λ`.
pub fn pairing_radius(d: usize, lambda: u64) -> f64 {
    let l = lambda as f64;
    l.powf(1.0 / (2.0 * (d as f64 - 1.0))) * l.ln()
}

/// `(e_μ - e_μ')/√2`.
pub fn pair_eigenfunction(mu: LatticePoint, mu2: LatticePoint) -> Result<Eigenfunction> {
    if mu == mu2 {
        return Err(Error::Precondition(format!("pair {mu} is degenerate")));
    }
    if mu.dim() != mu2.dim() || mu.norm_sq() != mu2.norm_sq() {
        return Err(Error::NotOnSphere(mu2.to_string(), mu.norm_sq() as u64));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Eigenfunction::new(
        mu.dim(),
        mu.norm_sq() as u64,
        [(mu, Complex64::new(s, 0.0)), (mu2, Complex64::new(-s, 0.0))],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{mass_average, Ball};
    use proptest::prelude::*;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::from_slice(c)
    }

    #[test]
    fn theorem31_examples() {
        let psi = theorem31_family(10, 2).unwrap();
        assert_eq!(psi.eigenvalue(), 221);
        assert_eq!(psi.support_len(), 4);
        assert_eq!(psi.norm_sq(), 1.0);
        assert!((psi.intensity(&[0.0, 0.0]) - 4.0).abs() < 1e-12);
        let ball = Ball::at_origin(2, 221f64.powf(-0.25)).unwrap();
        let m = mass_average(&psi, &ball).unwrap();
        assert!((m - 2.0).abs() < 0.25, "{m}");
        let psi3 = theorem31_family(3, 3).unwrap();
        assert_eq!(psi3.coeff(&p(&[-4, -3, 0])), Complex64::new(0.5, 0.0));
        assert!(theorem31_family(0, 2).is_err());
    }

    #[test]
    fn theorem31_limit() {
        let mut prev = f64::INFINITY;
        let mut last = 0.0;
        for m in [10u64, 20, 40, 80, 160] {
            let psi = theorem31_family(m, 2).unwrap();
            let ball = Ball::at_origin(2, theorem31_radius(m)).unwrap();
            let gap = (mass_average(&psi, &ball).unwrap() - 2.0).abs();
            assert!(gap <= prev * 1.2, "m = {m}: {gap} after {prev}");
            prev = gap;
            last = gap;
        }
        assert!(last < 0.1);
    }

    #[test]
    fn blowup_examples() {
        let psi = blowup_family(25, 2).unwrap();
        assert_eq!(psi.support_len(), 12);
        for (_, c) in psi.modes() {
            assert!((c.re - 1.0 / 12f64.sqrt()).abs() < 1e-15 && c.im == 0.0);
        }
        assert!((psi.eval(&[0.0, 0.0]).re - 12f64.sqrt()).abs() < 1e-12);
        assert!(blowup_family(3, 2).is_err());

        let lambda = 21;
        let psi = blowup_family(lambda, 4).unwrap();
        let ball = Ball::at_origin(4, 0.9 / (lambda as f64).sqrt()).unwrap();
        assert!(mass_average(&psi, &ball).unwrap() > 20.0);
    }

    #[test]
    fn closed_form_mass_matches_engine() {
        for (d, lambda, r) in [(2usize, 25u64, 0.3), (3, 17, 0.2), (4, 15, 0.25), (4, 9, 1.0)] {
            let psi = blowup_family(lambda, d).unwrap();
            let ball = Ball::at_origin(d, r).unwrap();
            let a = mass_average(&psi, &ball).unwrap();
            let b = blowup_mass_average(d, lambda, r).unwrap();
            assert!((a - b).abs() < 1e-10 * a.max(1.0), "d = {d}, λ = {lambda}: {a} vs {b}");
        }
    }

    #[test]
    fn blowup_bound_examples() {
        // T = 1/ln(104) < √2 leaves the S sum empty
        let b = blowup_lower_bound(101, 1.0).unwrap();
        assert_eq!(b.s_value, 0);
        assert_eq!(b.value, 1.0 / r4_jacobi(101).unwrap() as f64);
        assert!(blowup_lower_bound(100, 1.0).is_err());
        assert!(blowup_lower_bound(101, 0.05).is_err());

        for lambda in [101u64, 333, 1001] {
            let r = 1.1 / (lambda as f64).sqrt();
            let exact = blowup_lower_bound(lambda, r).unwrap();
            let floor = blowup_lower_bound_floor(lambda, r).unwrap();
            assert!(floor.s_value <= exact.s_value);
            assert!(exact.s_value > 0);
            assert_eq!(floor.t_radius, exact.t_radius);
        }
    }

    #[test]
    fn bound_against_exact_average() {
        // the bound holds up to a constant; here the constant is at most 1
        for lambda in (1..=201u64).step_by(2) {
            let r = 1.5 / (lambda as f64).sqrt();
            if r >= 1.0 {
                continue;
            }
            let b = blowup_lower_bound(lambda, r).unwrap();
            let m = blowup_mass_average(4, lambda, r).unwrap();
            assert!(m > 0.0 && b.value <= m, "λ = {lambda}: {} > {m}", b.value);
        }
    }

    #[test]
    fn pairing_examples() {
        let e = enumerate_sphere(2, 25).unwrap();
        let list = bourgain_pairs(&e, 2.0);
        assert_eq!(list.pairs.len(), 4);
        assert!((list.density() - 8.0 / 12.0).abs() < 1e-15);
        list.check_invariants().unwrap();
        for (a, b) in &list.pairs {
            assert_eq!(a.dist_sq(b), 2);
            assert!(a.as_slice().iter().all(|c| c.abs() == 3 || c.abs() == 4));
        }
        // the first pair is the lexicographically smallest point with its
        // nearest neighbor
        assert_eq!(list.pairs[0], (p(&[-4, -3]), p(&[-3, -4])));

        let single = Eigenspace::from_sorted(2, 0, vec![LatticePoint::zero(2)]);
        assert!(bourgain_pairs(&single, 10.0).pairs.is_empty());

        let back = PairList::from_json(&list.to_json().unwrap()).unwrap();
        assert_eq!(back, list);
    }

    #[test]
    fn pairing_density_in_three_dimensions() {
        let lambda = 1009;
        let e = enumerate_sphere(3, lambda).unwrap();
        let list = bourgain_pairs(&e, pairing_radius(3, lambda));
        list.check_invariants().unwrap();
        assert!(list.density() >= 0.5, "{}", list.density());
    }

    #[test]
    fn pair_eigenfunction_examples() {
        let (a, b) = (p(&[3, 4]), p(&[4, 3]));
        let psi = pair_eigenfunction(a, b).unwrap();
        assert!((psi.norm_sq() - 1.0).abs() < 1e-15);
        let r = 0.05 / 2f64.sqrt();
        let m = mass_average(&psi, &Ball::at_origin(2, r).unwrap()).unwrap();
        let expected = 1.0 - ball_kernel(2, 0.05).unwrap();
        assert!((m - expected).abs() < 1e-14);
        assert!(m <= 2.5e-3);
        let other = pair_eigenfunction(p(&[-3, 4]), p(&[-4, 3])).unwrap();
        assert_eq!(psi.inner(&other), Complex64::default());
        assert!(pair_eigenfunction(a, a).is_err());
        assert!(pair_eigenfunction(a, p(&[1, 1])).is_err());
    }

    #[test]
    fn pair_masses_follow_two_mode_formula() {
        for lambda in [101u64, 201, 309] {
            let e = enumerate_sphere(3, lambda).unwrap();
            let y = pairing_radius(3, lambda);
            let r = 1.0 / (y * (lambda as f64).ln());
            let list = bourgain_pairs(&e, y);
            let ball = Ball::at_origin(3, r).unwrap();
            for (a, b) in list.pairs.iter().take(40) {
                let m = mass_average(&pair_eigenfunction(*a, *b).unwrap(), &ball).unwrap();
                let sep = (a.dist_sq(b) as f64).sqrt();
                let exact = 1.0 - ball_kernel(3, r * sep).unwrap();
                assert!((m - exact).abs() < 1e-12);
                assert!(m <= 1.0 - ball_kernel(3, r * y).unwrap() + 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn pair_lists_are_valid(d in 2usize..=4, lambda in 1u64..400, y in 0.5f64..30.0) {
            let e = enumerate_sphere(d, lambda).unwrap();
            let list = bourgain_pairs(&e, y);
            prop_assert!(list.check_invariants().is_ok());
            prop_assert!(list.density() <= 1.0);
            // no two unpaired points are left within reach of each other
            let paired: Vec<LatticePoint> =
                list.pairs.iter().flat_map(|(a, b)| [*a, *b]).collect();
            let rest: Vec<&LatticePoint> = e.iter().filter(|q| !paired.contains(q)).collect();
            let bound = crate::lattice::radius_sq_floor(y);
            for (i, a) in rest.iter().enumerate() {
                for b in &rest[i + 1..] {
                    prop_assert!(a.dist_sq(b) > bound);
                }
            }
        }
    }
}
