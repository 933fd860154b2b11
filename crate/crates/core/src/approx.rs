//! Trigonometric minorants and majorants of ball indicators on the torus.
//!
//! Both are built from the radial bump `g(x) = f(|x|)` with
//! `f(u) = exp(-1/(1/4 - u²))` on `|u| < 1/2`. Its autocorrelation `g∗g` is
//! supported in the unit ball, and periodizing `(g∗g)(x/r)` gives
//!
//! ```text
//! F_r(x) = Σ_{n ∈ Z^d} (g∗g)((x + 2πn)/r),   F̂_r(ζ) = r^d ĝ(r|ζ|)² / (2π)^d,
//! ```
//!
//! where `ĝ(ξ) = ∫ g(x) e^{-i⟨x, ξ⟩} dx`. `F_r` is a minorant of the
//! indicator of `B(0, r)` with non-negative Fourier coefficients. The
//! coefficients are not compactly supported, so they are truncated at a
//! radius `T_cut`. Because all of them are non-negative, the exact sup-norm
//! error of truncation is the tail sum
//!
//! ```text
//! tail = Σ_{|ζ| > T_cut} F̂_r(ζ) = F_r(0) - Σ_{|ζ| <= T_cut} F̂_r(ζ),   F_r(0) = ∫ g²,
//! ```
//!
//! and subtracting it from the constant term keeps the truncated polynomial
//! a rigorous minorant.
//!
//! The majorant rescales a wider minorant: with `r' = r/(1-δ)` and
//! `m = (g∗g)(1-δ)`, which is the minimum of `g∗g` on the ball of radius
//! `1 - δ` because `g∗g` is radial and log-concave,
//! `a⁺ = (F_{r'} + tail)/m` is at least 1 on `B(0, r)` and non-negative
//! everywhere.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{sphere_count, visit_ball, LatticePoint};
use crate::quadrature::{adaptive_simpson, gauss_legendre};
use crate::spectral::{
    contract_axis, grid_points, normalized_bessel, unit_ball_volume, unit_sphere_area, Eigenfunction,
    TrigPolynomial, MAX_DENSE_ENTRIES,
};

/// Largest number of Fourier coefficients an approximant may keep.
pub const MAX_COEFFICIENTS: u64 = 200_000_000;

/// Relative accuracy assumed for the quadrature behind `F_r(0)` and the
/// coefficients; it is added to every tail bound.
pub const QUADRATURE_SLACK: f64 = 1e-9;

/// The bump profile `f(u) = exp(-1/(1/4 - u²))` on `|u| < 1/2`, zero outside.
pub fn bump(u: f64) -> f64 {
    let q = 0.25 - u * u;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// `ĝ(ξ) = σ_{d-1} ∫_0^{1/2} f(u) u^{d-1} Ω_d(ξu) du`, with `Ω_d` the
/// spherical average of a plane wave.
///
/// Composite 16-point Gauss–Legendre with panel count growing with `ξ`;
/// the integrand is smooth on the closed interval, so this converges
/// spectrally and is much cheaper than adaptive refinement.
pub fn bump_transform(d: usize, xi: f64) -> f64 {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (nodes, weights) = RULE.get_or_init(|| gauss_legendre(16));
    let alpha2 = d as u32 - 2;
    let panels = 24 + (xi.abs() / 2.0).ceil() as usize;
    let h = 0.5 / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let mut part = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            let u = mid + 0.5 * h * t;
            part += w * bump(u) * u.powi(d as i32 - 1) * normalized_bessel(alpha2, xi * u);
        }
        acc += part;
    }
    unit_sphere_area(d) * 0.5 * h * acc
}

/// `(g∗g)(0) = ∫ g²`.
pub fn bump_l2(d: usize) -> f64 {
    unit_sphere_area(d)
        * adaptive_simpson(|u| bump(u).powi(2) * u.powi(d as i32 - 1), 0.0, 0.5, 1e-20)
}

/// `(g∗g)(s)` in cylindrical coordinates about the axis through `0` and
/// `s e_1`, by nested adaptive Simpson, to relative accuracy about `1e-10`.
pub fn bump_autocorrelation(d: usize, s: f64) -> f64 {
    let s = s.abs();
    if s >= 1.0 {
        return 0.0;
    }
    // area of S^{d-2}: 2 points, a circle, a 2-sphere
    let sigma = unit_ball_volume(d - 1) * (d - 1) as f64;
    let eval = |tol: f64| {
        let inner = |z: f64| -> f64 {
            let reach = 0.25 - z.abs().max((s - z).abs()).powi(2);
            if reach <= 0.0 {
                return 0.0;
            }
            adaptive_simpson(
                |rho| {
                    let a = bump((z * z + rho * rho).sqrt());
                    let b = bump(((s - z) * (s - z) + rho * rho).sqrt());
                    a * b * rho.powi(d as i32 - 2)
                },
                0.0,
                reach.sqrt(),
                tol,
            )
        };
        sigma * adaptive_simpson(inner, s - 0.5, 0.5, tol)
    };
    let rough = eval(1e-6 * bump(s / 2.0).powi(2).max(1e-300));
    eval((rough.abs() * 1e-11).max(1e-300))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxKind {
    Minorant,
    Majorant,
}

/// A truncated radial trigonometric polynomial approximating `1_{B(0,r)}`
/// from one side. Coefficient `â(ζ)` depends only on `|ζ|²`, so it is
/// stored per shell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallApproximant {
    pub kind: ApproxKind,
    pub dim: usize,
    pub radius: f64,
    /// Every kept frequency has `|ζ|² <= k_max`.
    pub k_max: u64,
    /// `â` on the shell `|ζ|² = k`, for `k = 0..=k_max`.
    pub shells: Vec<f64>,
    /// Bound on the sup-norm truncation error of the underlying bump sum,
    /// already folded into the constant term.
    pub tail_bound: f64,
    /// Number of frequencies kept.
    pub coefficient_count: u64,
}

impl BallApproximant {
    pub fn t_cut(&self) -> f64 {
        (self.k_max as f64).sqrt()
    }

    pub fn coeff(&self, zeta: &LatticePoint) -> f64 {
        let k = zeta.norm_sq() as u64;
        if k <= self.k_max {
            self.shells[k as usize]
        } else {
            0.0
        }
    }

    pub fn zero_coefficient(&self) -> f64 {
        self.shells[0]
    }

    /// `vol B(0, r) = c_d r^d / (2π)^d`.
    pub fn ball_volume(&self) -> f64 {
        unit_ball_volume(self.dim) * (self.radius / (2.0 * PI)).powi(self.dim as i32)
    }

    /// `â(0) / vol B(0, r)`, the constant-factor gap to the ball volume.
    pub fn zero_coefficient_ratio(&self) -> f64 {
        self.zero_coefficient() / self.ball_volume()
    }

    /// `max_ζ |â(ζ)| / r^d`.
    pub fn coefficient_constant(&self) -> f64 {
        let m = self.shells.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        m / self.radius.powi(self.dim as i32)
    }

    /// Direct evaluation, summing over every kept frequency.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        visit_ball(self.dim, self.k_max, |z| {
            let c = self.shells[z.norm_sq() as usize];
            if c != 0.0 {
                acc += c * z.dot_real(x).cos();
            }
        })
        .expect("dimension was validated at construction");
        acc
    }

    /// Values on the tensor grid `x_i = -h + 2h k_i/(n-1)`, row-major.
    ///
    /// Radial coefficients are even in every coordinate separately, so
    /// `a(x) = Σ_{ζ >= 0} â(ζ) Π_i w(ζ_i) cos(ζ_i x_i)` with `w(0) = 1` and
    /// `w(j) = 2` otherwise, contracted one axis at a time.
    pub fn eval_grid(&self, half_width: f64, n: usize) -> Result<Vec<f64>> {
        let d = self.dim;
        let t = self.k_max.isqrt() as usize;
        let f = t + 1;
        let biggest = f.max(n).checked_pow(d as u32).unwrap_or(usize::MAX);
        if n < 2 || biggest > MAX_DENSE_ENTRIES {
            return Err(Error::Precondition(format!(
                "grid of {n}^{d} points over {f}^{d} frequencies is outside the dense budget"
            )));
        }
        let mut dense = vec![0.0f64; f.pow(d as u32)];
        for (idx, slot) in dense.iter_mut().enumerate() {
            let mut rem = idx;
            let mut k = 0usize;
            for _ in 0..d {
                let j = rem % f;
                k += j * j;
                rem /= f;
            }
            if k as u64 <= self.k_max {
                *slot = self.shells[k];
            }
        }
        let grid = grid_points(half_width, n);
        let mat: Vec<f64> = grid
            .iter()
            .flat_map(|&x| {
                (0..f).map(move |j| if j == 0 { 1.0 } else { 2.0 * (j as f64 * x).cos() })
            })
            .collect();
        let mut shape = vec![f; d];
        for axis in 0..d {
            dense = contract_axis(&dense, &shape, axis, &mat, n);
            shape[axis] = n;
        }
        Ok(dense)
    }

    /// Largest violation of the one-sided bound on the grid of
    /// [`BallApproximant::eval_grid`]: `max (a - 1_B)` for a minorant and
    /// `max (1_B - a)` for a majorant. Non-positive means the bound holds.
    pub fn sandwich_violation(&self, half_width: f64, n: usize) -> Result<f64> {
        let vals = self.eval_grid(half_width, n)?;
        let grid = grid_points(half_width, n);
        let d = self.dim;
        let r2 = self.radius * self.radius;
        let mut worst = f64::NEG_INFINITY;
        for (idx, v) in vals.iter().enumerate() {
            let mut rem = idx;
            let mut norm2 = 0.0;
            for _ in 0..d {
                norm2 += grid[rem % n].powi(2);
                rem /= n;
            }
            let ind = if norm2 <= r2 { 1.0 } else { 0.0 };
            let gap = match self.kind {
                ApproxKind::Minorant => v - ind,
                ApproxKind::Majorant => ind - v,
            };
            worst = worst.max(gap);
        }
        Ok(worst)
    }

    /// `∫ a |ψ|² dvol = Σ_{μ,ν} c(μ) conj(c(ν)) â(|μ - ν|²)`.
    pub fn pair_with(&self, psi: &Eigenfunction) -> f64 {
        let modes = psi.modes();
        let mut acc = 0.0;
        for (mu, c) in modes {
            for (nu, c2) in modes {
                acc += (c * c2.conj()).re * self.coeff(&(*mu - *nu));
            }
        }
        acc
    }

    /// The same polynomial as an explicit sparse coefficient list.
    pub fn trig_polynomial(&self) -> Result<TrigPolynomial> {
        if self.coefficient_count > 5_000_000 {
            return Err(Error::Precondition(format!(
                "{} coefficients is too many to list explicitly",
                self.coefficient_count
            )));
        }
        let mut coeffs = Vec::with_capacity(self.coefficient_count as usize);
        visit_ball(self.dim, self.k_max, |z| {
            coeffs.push((*z, Complex64::new(self.shells[z.norm_sq() as usize], 0.0)));
        })?;
        TrigPolynomial::new(self.dim, coeffs)
    }
}

/// Truncated coefficients of `F_r`: shells up to the first `k_max` whose
/// exact tail is below `tail_tol · F̂_r(0)`.
struct Truncation {
    k_max: u64,
    shells: Vec<f64>,
    tail_bound: f64,
    count: u64,
}

fn truncate(d: usize, r: f64, tail_tol: f64) -> Result<Truncation> {
    let total = bump_l2(d);
    let scale = r.powi(d as i32) / (2.0 * PI).powi(d as i32);
    let coeff = |k: u64| -> f64 {
        let g = bump_transform(d, r * (k as f64).sqrt());
        scale * g * g
    };
    let c0 = coeff(0);
    let slack = QUADRATURE_SLACK * total;
    let target = tail_tol * c0;
    if !(tail_tol > 0.0) || target <= 2.0 * slack {
        return Err(Error::TailUnreachable(tail_tol));
    }

    let mut shells = vec![c0];
    let mut partial = c0;
    let mut count = 1u64;
    let mut k = 0u64;
    // Shells are processed in parallel blocks; each block is summed in
    // order so the result is independent of the thread count.
    const BLOCK: u64 = 256;
    loop {
        let lo = k + 1;
        let block: Vec<(u64, f64)> = (lo..lo + BLOCK)
            .into_par_iter()
            .map(|kk| {
                let n = sphere_count(d, kk).expect("dimension checked");
                (n, if n == 0 { 0.0 } else { coeff(kk) })
            })
            .collect();
        for (n, c) in block {
            k += 1;
            shells.push(c);
            partial += n as f64 * c;
            count += n;
            if count > MAX_COEFFICIENTS {
                return Err(Error::TailUnreachable(tail_tol));
            }
            let tail = (total - partial).max(0.0);
            if tail + slack <= target {
                return Ok(Truncation {
                    k_max: k,
                    shells,
                    tail_bound: tail + slack,
                    count,
                });
            }
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < PI / 2.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "approximant radius must lie in (0, π/2), got {r}"
        )))
    }
}

/// The smooth minorant `F_r - tail` of `1_{B(0, r)}`.
pub fn smooth_minorant(d: usize, r: f64, tail_tol: f64) -> Result<BallApproximant> {
    check_dim(d)?;
    check_radius(r)?;
    let t = truncate(d, r, tail_tol)?;
    let mut shells = t.shells;
    shells[0] -= t.tail_bound;
    Ok(BallApproximant {
        kind: ApproxKind::Minorant,
        dim: d,
        radius: r,
        k_max: t.k_max,
        shells,
        tail_bound: t.tail_bound,
        coefficient_count: t.count,
    })
}

/// The majorant `(F_{r'} + tail)/m` of `1_{B(0, r)}` with `r' = r/(1-δ)`
/// and `m = (g∗g)(1-δ)`.
pub fn scaled_majorant(d: usize, r: f64, delta: f64, tail_tol: f64) -> Result<BallApproximant> {
    check_dim(d)?;
    if !(delta > 0.0 && delta <= 0.25) {
        return Err(Error::Precondition(format!(
            "δ must lie in (0, 1/4], got {delta}"
        )));
    }
    let wide = r / (1.0 - delta);
    check_radius(r)?;
    check_radius(wide)?;
    // shrink m slightly so quadrature error in m can only loosen the bound
    let m = bump_autocorrelation(d, 1.0 - delta) * (1.0 - 1e-8);
    let t = truncate(d, wide, tail_tol)?;
    let mut shells: Vec<f64> = t.shells.iter().map(|c| c / m).collect();
    shells[0] += t.tail_bound / m;
    Ok(BallApproximant {
        kind: ApproxKind::Majorant,
        dim: d,
        radius: r,
        k_max: t.k_max,
        shells,
        tail_bound: t.tail_bound / m,
        coefficient_count: t.count,
    })
}

/// Does `|x|` lie within `r` of the origin on the torus? Used by tests that
/// compare approximants against the indicator at arbitrary points.
pub fn in_ball(x: &[f64], r: f64) -> bool {
    let n2: f64 = x
        .iter()
        .map(|&c| {
            let w = (c + PI).rem_euclid(2.0 * PI) - PI;
            w * w
        })
        .sum();
    n2 <= r * r
}
