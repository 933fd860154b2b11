//! Integer points on spheres and in balls.
//!
//! The eigenspace of the torus Laplacian with eigenvalue `λ` is spanned by
//! the exponentials `e_μ` with `|μ|² = λ`, so almost every computation in
//! this crate starts by listing those `μ`. The enumerators here are exact,
//! integer-only and deterministic: points always come out in lexicographic
//! order.

mod cache;
mod point;

pub use cache::SphereCache;
pub use point::{gcd, primitive_part, LatticePoint, PrimitiveDecomposition, COORD_BOUND, MAX_DIM};

use crate::error::{check_dim, Error, Result};

/// Largest squared radius accepted by the enumerators.
pub const MAX_NORM: u64 = 1 << 40;

fn check_norm(lambda: u64) -> Result<()> {
    if lambda > MAX_NORM {
        Err(Error::TooLarge {
            value: lambda,
            bound: MAX_NORM,
        })
    } else {
        Ok(())
    }
}

/// Largest integer `k` with `k <= radius²`, allowing a relative rounding slack
/// of `1e-12` so that radii such as `2√λ` computed in floating point still
/// admit the antipodal point.
pub fn radius_sq_floor(radius: f64) -> i64 {
    if radius.is_nan() || radius < 0.0 {
        return -1;
    }
    let r2 = radius * radius * (1.0 + 1e-12);
    if r2 >= i64::MAX as f64 {
        i64::MAX
    } else {
        r2.floor() as i64
    }
}

/// The full solution set `E_λ = {μ ∈ Z^d : |μ|² = λ}`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenspace {
    dim: usize,
    eigenvalue: u64,
    points: Vec<LatticePoint>,
}

impl Eigenspace {
    /// Wraps a sorted point list. Used by the cache loader; callers are
    /// expected to have produced `points` with [`enumerate_sphere`].
    pub(crate) fn from_sorted(dim: usize, eigenvalue: u64, points: Vec<LatticePoint>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Eigenspace {
            dim,
            eigenvalue,
            points,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalue(&self) -> u64 {
        self.eigenvalue
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LatticePoint> {
        self.points.iter()
    }

    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.index_of(p).is_some()
    }
}

impl<'a> IntoIterator for &'a Eigenspace {
    type Item = &'a LatticePoint;
    type IntoIter = std::slice::Iter<'a, LatticePoint>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Calls `f` on every point of the sphere `|μ|² = λ` in lexicographic order.
///
/// The first `d - 1` coordinates are looped over; the last is resolved with
/// an exact integer square root.
pub fn visit_sphere<F: FnMut(&LatticePoint)>(d: usize, lambda: u64, mut f: F) -> Result<()> {
    check_dim(d)?;
    check_norm(lambda)?;
    let mut buf = LatticePoint::zero(d);
    sphere_rec(d, 0, lambda, &mut buf, &mut f);
    Ok(())
}

fn sphere_rec<F: FnMut(&LatticePoint)>(
    d: usize,
    idx: usize,
    rem: u64,
    buf: &mut LatticePoint,
    f: &mut F,
) {
    let s = rem.isqrt();
    if idx == d - 1 {
        if s * s == rem {
            if s == 0 {
                set_coord(buf, idx, 0);
                f(buf);
            } else {
                set_coord(buf, idx, -(s as i64));
                f(buf);
                set_coord(buf, idx, s as i64);
                f(buf);
            }
        }
        return;
    }
    let s = s as i64;
    for x in -s..=s {
        set_coord(buf, idx, x);
        sphere_rec(d, idx + 1, rem - (x * x) as u64, buf, f);
    }
    set_coord(buf, idx, 0);
}

#[inline]
fn set_coord(p: &mut LatticePoint, idx: usize, v: i64) {
    p.set(idx, v);
}

/// Lists `E_λ` in lexicographic order.
pub fn enumerate_sphere(d: usize, lambda: u64) -> Result<Eigenspace> {
    let mut points = Vec::new();
    visit_sphere(d, lambda, |p| points.push(*p))?;
    Ok(Eigenspace {
        dim: d,
        eigenvalue: lambda,
        points,
    })
}

/// Calls `f(rep, orbit_size)` once per orbit of the hyperoctahedral group
/// (signed coordinate permutations) acting on the sphere `|μ|² = λ`.
///
/// `rep` is the canonical representative with non-negative, non-increasing
/// coordinates. Anything invariant under sign changes and permutations (gcd
/// of the coordinates, for instance) can be summed over the sphere this way
/// at a fraction of the cost of [`visit_sphere`].
pub fn visit_sphere_orbits<F: FnMut(&[i64], u64)>(d: usize, lambda: u64, mut f: F) -> Result<()> {
    check_dim(d)?;
    check_norm(lambda)?;
    let mut buf = [0i64; MAX_DIM];
    orbit_rec(d, 0, lambda, i64::MAX, &mut buf, &mut f);
    Ok(())
}

fn orbit_rec<F: FnMut(&[i64], u64)>(
    d: usize,
    idx: usize,
    rem: u64,
    prev: i64,
    buf: &mut [i64; MAX_DIM],
    f: &mut F,
) {
    if idx == d - 1 {
        let s = rem.isqrt();
        if s * s == rem && (s as i64) <= prev {
            buf[idx] = s as i64;
            f(&buf[..d], orbit_size(&buf[..d]));
        }
        return;
    }
    let slots = (d - idx) as u64;
    let q = rem.div_ceil(slots);
    let mut lo = q.isqrt();
    if lo * lo < q {
        lo += 1;
    }
    let hi = (rem.isqrt() as i64).min(prev);
    for x in (lo as i64)..=hi {
        buf[idx] = x;
        orbit_rec(d, idx + 1, rem - (x * x) as u64, x, buf, f);
    }
}

/// Number of signed permutations of a non-increasing, non-negative tuple.
fn orbit_size(rep: &[i64]) -> u64 {
    const FACT: [u64; 5] = [1, 1, 2, 6, 24];
    let nonzero = rep.iter().filter(|&&x| x != 0).count();
    let mut size = FACT[rep.len()] << nonzero;
    let mut i = 0;
    while i < rep.len() {
        let mut j = i;
        while j < rep.len() && rep[j] == rep[i] {
            j += 1;
        }
        size /= FACT[j - i];
        i = j;
    }
    size
}

/// `#E_λ`, summed over orbits.
pub fn sphere_count(d: usize, lambda: u64) -> Result<u64> {
    let mut total = 0u64;
    visit_sphere_orbits(d, lambda, |_, m| total += m)?;
    Ok(total)
}

/// Calls `f` on every `μ` with `|μ|² <= bound`, in lexicographic order.
pub fn visit_ball<F: FnMut(&LatticePoint)>(d: usize, bound: u64, mut f: F) -> Result<()> {
    check_dim(d)?;
    check_norm(bound)?;
    let mut buf = LatticePoint::zero(d);
    ball_rec(d, 0, bound, &mut buf, &mut f);
    Ok(())
}

fn ball_rec<F: FnMut(&LatticePoint)>(
    d: usize,
    idx: usize,
    rem: u64,
    buf: &mut LatticePoint,
    f: &mut F,
) {
    let s = rem.isqrt() as i64;
    for x in -s..=s {
        set_coord(buf, idx, x);
        if idx == d - 1 {
            f(buf);
        } else {
            ball_rec(d, idx + 1, rem - (x * x) as u64, buf, f);
        }
    }
    set_coord(buf, idx, 0);
}

/// All eigenspaces `E_0, …, E_Λ` at once, from a single pass over the ball.
pub fn ball_shells(d: usize, max_lambda: u64) -> Result<Vec<Eigenspace>> {
    let mut shells: Vec<Vec<LatticePoint>> = vec![Vec::new(); max_lambda as usize + 1];
    visit_ball(d, max_lambda, |p| shells[p.norm_sq() as usize].push(*p))?;
    Ok(shells
        .into_iter()
        .enumerate()
        .map(|(lambda, points)| Eigenspace {
            dim: d,
            eigenvalue: lambda as u64,
            points,
        })
        .collect())
}

/// `#{μ ∈ Z^d : |μ|² <= Λ}`, the number of eigenvalues up to `Λ` counted
/// with multiplicity.
pub fn weyl_count(d: usize, max_lambda: u64) -> Result<u64> {
    check_dim(d)?;
    check_norm(max_lambda)?;
    fn rec(d: usize, idx: usize, rem: u64) -> u64 {
        let s = rem.isqrt();
        if idx == d - 1 {
            return 2 * s + 1;
        }
        let s = s as i64;
        (-s..=s).map(|x| rec(d, idx + 1, rem - (x * x) as u64)).sum()
    }
    Ok(rec(d, 0, max_lambda))
}

fn check_shift(d: usize, zeta: &LatticePoint) -> Result<()> {
    check_dim(d)?;
    if zeta.dim() != d {
        return Err(Error::Precondition(format!(
            "shift {zeta} does not have dimension {d}"
        )));
    }
    if zeta.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

/// `#{μ ∈ Z^d : |μ|² <= X, |μ|² = |μ + ζ|²}`.
///
/// The condition is the affine hyperplane `2⟨μ, ζ⟩ = -|ζ|²`. One coordinate
/// with `ζ_j ≠ 0` is solved for, the remaining `d - 1` run over the ball.
pub fn equal_norm_shift_count(d: usize, x_bound: u64, zeta: &LatticePoint) -> Result<u64> {
    check_shift(d, zeta)?;
    check_norm(x_bound)?;
    let z2 = zeta.norm_sq() as u64;
    if z2 % 2 == 1 || z2 > 4 * x_bound {
        return Ok(0);
    }
    let target = -((z2 / 2) as i64);
    let z = zeta.as_slice();
    let j = (0..d).max_by_key(|&i| z[i].abs()).expect("d >= 2");
    let others: Vec<usize> = (0..d).filter(|&i| i != j).collect();

    fn rec(
        others: &[usize],
        k: usize,
        rem: u64,
        partial: i64,
        z: &[i64],
        j: usize,
        target: i64,
        x_bound: u64,
    ) -> u64 {
        if k == others.len() {
            let num = target - partial;
            if num % z[j] != 0 {
                return 0;
            }
            let mj = num / z[j];
            let used = x_bound - rem;
            return u64::from(used + (mj * mj) as u64 <= x_bound);
        }
        let s = rem.isqrt() as i64;
        let zi = z[others[k]];
        (-s..=s)
            .map(|x| {
                rec(
                    others,
                    k + 1,
                    rem - (x * x) as u64,
                    partial + zi * x,
                    z,
                    j,
                    target,
                    x_bound,
                )
            })
            .sum()
    }
    Ok(rec(&others, 0, x_bound, 0, z, j, target, x_bound))
}

/// `#{μ ∈ E_λ : μ + ζ ∈ E_λ}`, by membership lookup in the sorted eigenspace.
pub fn equal_norm_shift_count_in(space: &Eigenspace, zeta: &LatticePoint) -> Result<u64> {
    check_shift(space.dim(), zeta)?;
    let z2 = zeta.norm_sq() as u64;
    if z2 % 2 == 1 || z2 > 4 * space.eigenvalue() {
        return Ok(0);
    }
    // |μ| = |μ + ζ| forces 2⟨μ, ζ⟩ = -|ζ|², a cheap filter before the lookup
    let target = -(z2 as i64);
    Ok(space
        .iter()
        .filter(|&&mu| 2 * mu.dot(zeta) == target && space.contains(&(mu + *zeta)))
        .count() as u64)
}

/// `#{μ ∈ Z^d : |μ|² = λ = |μ + ζ|²}`.
pub fn equal_norm_shift_count_exact(d: usize, lambda: u64, zeta: &LatticePoint) -> Result<u64> {
    check_shift(d, zeta)?;
    let z2 = zeta.norm_sq() as u64;
    if z2 % 2 == 1 || z2 > 4 * lambda {
        return Ok(0);
    }
    equal_norm_shift_count_in(&enumerate_sphere(d, lambda)?, zeta)
}

fn require_member(space: &Eigenspace, nu: &LatticePoint) -> Result<()> {
    if space.contains(nu) {
        Ok(())
    } else {
        Err(Error::NotOnSphere(nu.to_string(), space.eigenvalue()))
    }
}

/// Range of indices whose first coordinate lies within `span` of `center`.
fn first_coord_window(space: &Eigenspace, center: i64, span: i64) -> std::ops::Range<usize> {
    let pts = space.points();
    let lo = pts.partition_point(|p| p.as_slice()[0] < center.saturating_sub(span));
    let hi = pts.partition_point(|p| p.as_slice()[0] <= center.saturating_add(span));
    lo..hi
}

/// `n(ν, Y) = #{μ ∈ E : 0 < |μ - ν| <= Y}`, the number of other lattice
/// points in the chordal cap of size `Y` about `ν`.
pub fn cap_count(space: &Eigenspace, nu: &LatticePoint, y: f64) -> Result<usize> {
    require_member(space, nu)?;
    let bound = radius_sq_floor(y);
    if bound < 1 {
        return Ok(0);
    }
    let span = (bound as u64).isqrt() as i64;
    let pts = space.points();
    Ok(first_coord_window(space, nu.as_slice()[0], span)
        .filter(|&i| {
            let d2 = pts[i].dist_sq(nu);
            d2 > 0 && d2 <= bound
        })
        .count())
}

/// For every point, the indices of the other points within distance `Y`.
/// Each list is sorted by distance, ties broken lexicographically.
pub fn neighbors_within(space: &Eigenspace, y: f64) -> Vec<Vec<usize>> {
    let pts = space.points();
    let bound = radius_sq_floor(y);
    let mut out: Vec<Vec<(i64, usize)>> = vec![Vec::new(); pts.len()];
    if bound >= 1 {
        let span = (bound as u64).isqrt() as i64;
        for i in 0..pts.len() {
            let x0 = pts[i].as_slice()[0];
            for j in (i + 1)..pts.len() {
                if pts[j].as_slice()[0] - x0 > span {
                    break;
                }
                let d2 = pts[i].dist_sq(&pts[j]);
                if d2 <= bound {
                    out[i].push((d2, j));
                    out[j].push((d2, i));
                }
            }
        }
    }
    out.into_iter()
        .map(|mut v| {
            // index order is lexicographic order
            v.sort_unstable();
            v.into_iter().map(|(_, j)| j).collect()
        })
        .collect()
}

/// Points of `E` with at least one other point of `E` within distance `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct CapDenseSet {
    pub points: Vec<LatticePoint>,
    pub density: f64,
}

pub fn cap_dense_set(space: &Eigenspace, y: f64) -> CapDenseSet {
    let nbrs = neighbors_within(space, y);
    let points: Vec<LatticePoint> = space
        .iter()
        .zip(&nbrs)
        .filter(|(_, n)| !n.is_empty())
        .map(|(p, _)| *p)
        .collect();
    let density = if space.is_empty() {
        0.0
    } else {
        points.len() as f64 / space.len() as f64
    };
    CapDenseSet { points, density }
}

/// `max_μ #{ν ∈ E : |μ - ν| <= ρ}` for a planar eigenspace; the centre counts
/// itself.
pub fn arc_max_in(space: &Eigenspace, rho: f64) -> usize {
    if space.is_empty() {
        return 0;
    }
    neighbors_within(space, rho)
        .iter()
        .map(|n| n.len() + 1)
        .max()
        .unwrap_or(0)
}

/// Maximal number of lattice points of the circle `|μ|² = λ` within an arc
/// (chordal ball) of size `ρ`.
pub fn arc_max(lambda: u64, rho: f64) -> Result<usize> {
    Ok(arc_max_in(&enumerate_sphere(2, lambda)?, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::from_slice(c)
    }

    #[test]
    fn sphere_examples() {
        let e = enumerate_sphere(2, 25).unwrap();
        assert_eq!(e.len(), 12);
        assert!(e.contains(&p(&[3, 4])));
        assert!(e.contains(&p(&[-5, 0])));
        assert!(enumerate_sphere(2, 3).unwrap().is_empty());
        let e = enumerate_sphere(3, 0).unwrap();
        assert_eq!(e.points(), &[LatticePoint::zero(3)]);
    }

    #[test]
    fn sphere_is_sorted_and_exact() {
        for d in 2..=4 {
            for lambda in 0..60 {
                let e = enumerate_sphere(d, lambda).unwrap();
                assert!(e.points().windows(2).all(|w| w[0] < w[1]));
                assert!(e.iter().all(|q| q.norm_sq() as u64 == lambda));
                assert_eq!(e.len() as u64, sphere_count(d, lambda).unwrap());
            }
        }
    }

    #[test]
    fn guards() {
        assert_eq!(enumerate_sphere(5, 1), Err(Error::Dimension(5)));
        assert!(matches!(
            enumerate_sphere(2, MAX_NORM + 1),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn shells_match_spheres() {
        let shells = ball_shells(3, 40).unwrap();
        for (lambda, s) in shells.iter().enumerate() {
            assert_eq!(s, &enumerate_sphere(3, lambda as u64).unwrap());
        }
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_count(2, 1).unwrap(), 5);
        assert_eq!(weyl_count(2, 2).unwrap(), 9);
        assert_eq!(weyl_count(3, 1).unwrap(), 7);
        let total: usize = ball_shells(4, 30).unwrap().iter().map(|s| s.len()).sum();
        assert_eq!(weyl_count(4, 30).unwrap(), total as u64);
    }

    #[test]
    fn shift_count_examples() {
        assert_eq!(equal_norm_shift_count(2, 25, &p(&[1, 1])).unwrap(), 8);
        assert_eq!(equal_norm_shift_count(2, 25, &p(&[11, 0])).unwrap(), 0);
        assert_eq!(equal_norm_shift_count(3, 10, &p(&[1, 0, 0])).unwrap(), 0);
        assert_eq!(
            equal_norm_shift_count(2, 25, &LatticePoint::zero(2)),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn shift_count_matches_ball_scan() {
        for d in 2..=4 {
            let x = 30u64;
            let mut ball = Vec::new();
            visit_ball(d, x, |q| ball.push(*q)).unwrap();
            for zeta in ball.iter().filter(|z| !z.is_zero()).step_by(7) {
                let brute = ball
                    .iter()
                    .filter(|&&mu| (mu + *zeta).norm_sq() == mu.norm_sq())
                    .count() as u64;
                assert_eq!(equal_norm_shift_count(d, x, zeta).unwrap(), brute, "{zeta}");
            }
        }
    }

    #[test]
    fn exact_shift_examples() {
        assert_eq!(equal_norm_shift_count_exact(2, 25, &p(&[1, -1])).unwrap(), 2);
        assert_eq!(equal_norm_shift_count_exact(2, 25, &p(&[1, 1])).unwrap(), 2);
        assert_eq!(
            equal_norm_shift_count_exact(4, 5, &p(&[10, 0, 0, 0])).unwrap(),
            0
        );
    }

    #[test]
    fn cap_examples() {
        let e = enumerate_sphere(2, 25).unwrap();
        assert_eq!(cap_count(&e, &p(&[3, 4]), 2.0).unwrap(), 1);
        assert_eq!(cap_count(&e, &p(&[3, 4]), 1.0).unwrap(), 0);
        assert_eq!(cap_count(&e, &p(&[3, 4]), 2.0 * 5.0).unwrap(), 11);
        assert!(cap_count(&e, &p(&[1, 1]), 2.0).is_err());

        let e = enumerate_sphere(3, 101).unwrap();
        let y = 2.0 * (101f64).sqrt();
        for nu in e.iter() {
            assert_eq!(cap_count(&e, nu, y).unwrap(), e.len() - 1);
        }
    }

    #[test]
    fn cap_dense_examples() {
        let e = enumerate_sphere(2, 25).unwrap();
        let v = cap_dense_set(&e, 2.0);
        assert_eq!(v.points.len(), 8);
        assert!((v.density - 8.0 / 12.0).abs() < 1e-15);
        assert!(v.points.iter().all(|q| q.as_slice()[0] != 0 && q.as_slice()[0].abs() != 5));

        let single = enumerate_sphere(2, 0).unwrap();
        assert!(cap_dense_set(&single, 10.0).points.is_empty());
    }

    #[test]
    fn arc_examples() {
        assert_eq!(arc_max(25, 0.1).unwrap(), 1);
        assert_eq!(arc_max(25, 1.5).unwrap(), 2);
        // brute force for 325 = 1² + 18² = 6² + 17² = 10² + 15²
        let e = enumerate_sphere(2, 325).unwrap();
        let rho = 18f64.sqrt();
        let brute = e
            .iter()
            .map(|mu| e.iter().filter(|nu| mu.dist_sq(nu) <= 18).count())
            .max()
            .unwrap();
        assert_eq!(arc_max(325, rho).unwrap(), brute);
        assert_eq!(arc_max(3, 5.0).unwrap(), 0);
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(orbit_size(&[0, 0, 0]), 1);
        assert_eq!(orbit_size(&[1, 0, 0]), 6);
        assert_eq!(orbit_size(&[1, 1, 0, 0]), 24);
        assert_eq!(orbit_size(&[3, 2, 1, 0]), 24 * 8);
        assert_eq!(orbit_size(&[1, 1, 1, 1]), 16);
    }
}
