//! Eigenfunctions of the flat torus `T^d = R^d / 2πZ^d` and their local
//! `L²` mass.
//!
//! Volumes use the probability measure `dvol = dx / (2π)^d`. The mass of
//! `|ψ|²` in a ball is computed in frequency space: averaging
//! `e^{i⟨ζ, x⟩}` over `B(y, r)` gives `e^{i⟨ζ, y⟩} K_d(r|ζ|)`, so
//!
//! ```text
//! (1/vol B) ∫_B |ψ|² dvol = Σ_{μ,ν} c(μ) conj(c(ν)) e^{i⟨μ-ν, y⟩} K_d(r|μ-ν|).
//! ```

mod basis;
mod eigenfunction;
mod kernel;
mod trig;

pub use basis::{random_onb, v1_localized, v1_localized_sum, OrthonormalBasis};
pub use eigenfunction::{Eigenfunction, EigenfunctionFile, ModeRecord, NORMALIZATION_TOL};
pub use kernel::{
    ball_kernel, ball_kernel_quadrature, gamma_half, normalized_bessel, sphere_kernel,
    unit_ball_volume, unit_sphere_area, HANKEL_LIMIT, SERIES_LIMIT,
};
pub use trig::{contract_axis, grid_points, TrigPolynomial, MAX_DENSE_ENTRIES};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::lattice::{radius_sq_floor, LatticePoint};
use crate::quadrature::gauss_legendre_on;

/// Default cap on the number of support pairs visited by [`mass_average`].
pub const DEFAULT_PAIR_BUDGET: u64 = 300_000_000;

/// Largest kernel lookup table built by [`mass_average`].
const MAX_KERNEL_TABLE: u64 = 10_000_000;

/// Rows of the pair triangle handled per parallel work item. Fixed so the
/// floating-point summation order never depends on the thread count.
const ROW_CHUNK: usize = 32;

/// `B(y, r)` on the torus, with `0 < r < π` so the ball never wraps onto
/// itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_dim(center.len())?;
        if !(radius > 0.0 && radius < PI) {
            return Err(Error::Precondition(format!(
                "ball radius must lie in (0, π), got {radius}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Precondition("ball center must be finite".into()));
        }
        Ok(Ball { center, radius })
    }

    pub fn at_origin(d: usize, radius: f64) -> Result<Self> {
        Ball::new(vec![0.0; d], radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `c_d r^d / (2π)^d`.
    pub fn volume(&self) -> f64 {
        let d = self.dim();
        unit_ball_volume(d) * (self.radius / (2.0 * PI)).powi(d as i32)
    }
}

/// `⟨e_ζ ψ, ψ⟩ = ∫ e_ζ |ψ|² dvol = Σ_μ c(μ) conj(c(μ + ζ))`.
pub fn matrix_element(psi: &Eigenfunction, zeta: &LatticePoint) -> Complex64 {
    if zeta.dim() != psi.dim() || zeta.norm_sq() as u64 > 4 * psi.eigenvalue() {
        return Complex64::default();
    }
    psi.modes()
        .iter()
        .map(|(mu, c)| c * psi.coeff(&(*mu + *zeta)).conj())
        .sum()
}

fn check_ball(psi: &Eigenfunction, ball: &Ball) -> Result<()> {
    if ball.dim() != psi.dim() {
        return Err(Error::Precondition(format!(
            "ball dimension {} does not match eigenfunction dimension {}",
            ball.dim(),
            psi.dim()
        )));
    }
    Ok(())
}

/// Normalized mass `(1/vol B) ∫_B |ψ|² dvol`, exact up to rounding.
pub fn mass_average(psi: &Eigenfunction, ball: &Ball) -> Result<f64> {
    mass_average_with_budget(psi, ball, DEFAULT_PAIR_BUDGET)
}

/// [`mass_average`] with an explicit cap on the number of support pairs.
pub fn mass_average_with_budget(psi: &Eigenfunction, ball: &Ball, budget: u64) -> Result<f64> {
    check_ball(psi, ball)?;
    let n = psi.support_len();
    let pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
    if pairs > budget {
        return Err(Error::PairBudget { pairs, budget });
    }
    let d = psi.dim();
    let r = ball.radius();
    let y = ball.center();
    let points: Vec<LatticePoint> = psi.modes().iter().map(|(mu, _)| *mu).collect();
    let w: Vec<Complex64> = psi
        .modes()
        .iter()
        .map(|(mu, c)| c * Complex64::cis(mu.dot_real(y)))
        .collect();

    // |μ - ν|² = 2λ - 2⟨μ, ν⟩ is even, so the table is indexed by half of it
    let half_max = 2 * psi.eigenvalue();
    let table: Option<Vec<f64>> = if pairs > half_max && half_max < MAX_KERNEL_TABLE {
        Some(
            (0..=half_max)
                .into_par_iter()
                .map(|h| normalized_bessel(d as u32, r * ((2 * h) as f64).sqrt()))
                .collect(),
        )
    } else {
        None
    };
    let kernel = |d2: i64| -> f64 {
        match &table {
            Some(t) => t[(d2 / 2) as usize],
            None => normalized_bessel(d as u32, r * (d2 as f64).sqrt()),
        }
    };

    let diagonal: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let partials: Vec<f64> = (0..n.div_ceil(ROW_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = 0.0;
            for i in chunk * ROW_CHUNK..((chunk + 1) * ROW_CHUNK).min(n) {
                let (pi, wi) = (points[i], w[i]);
                for j in (i + 1)..n {
                    let k = kernel(pi.dist_sq(&points[j]));
                    acc += (wi * w[j].conj()).re * k;
                }
            }
            acc
        })
        .collect();
    Ok(diagonal + 2.0 * partials.iter().sum::<f64>())
}

/// Product rule on the unit sphere `S^{d-1}` in spherical coordinates:
/// Gauss–Legendre with `n` nodes in each polar angle and a `2n`-point
/// trapezoid rule in the azimuth. Weights include the Jacobian.
fn sphere_rule(d: usize, n: usize) -> Vec<([f64; 4], f64)> {
    let polar = gauss_legendre_on(n, 0.0, PI);
    let m = 2 * n;
    let azimuth: Vec<(f64, f64)> = (0..m)
        .map(|k| (2.0 * PI * k as f64 / m as f64, 2.0 * PI / m as f64))
        .collect();
    let mut out = Vec::new();
    match d {
        2 => {
            for &(phi, wp) in &azimuth {
                out.push(([phi.cos(), phi.sin(), 0.0, 0.0], wp));
            }
        }
        3 => {
            for &(th, wt) in &polar {
                let s = th.sin();
                for &(phi, wp) in &azimuth {
                    out.push(([s * phi.cos(), s * phi.sin(), th.cos(), 0.0], wt * s * wp));
                }
            }
        }
        _ => {
            for &(t1, w1) in &polar {
                for &(t2, w2) in &polar {
                    let (s1, s2) = (t1.sin(), t2.sin());
                    for &(phi, wp) in &azimuth {
                        out.push((
                            [t1.cos(), s1 * t2.cos(), s1 * s2 * phi.cos(), s1 * s2 * phi.sin()],
                            w1 * w2 * s1 * s1 * s2 * wp,
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Spatial-quadrature oracle for [`mass_average`]: integrates `|ψ|²` over
/// the ball with tensor Gauss rules in spherical coordinates, doubling the
/// order until successive estimates agree to `tol`.
pub fn mass_average_quadrature(psi: &Eigenfunction, ball: &Ball, tol: f64) -> Result<f64> {
    check_ball(psi, ball)?;
    let d = psi.dim();
    let r = ball.radius();
    let y = ball.center();
    let cap = match d {
        2 => 512,
        3 => 128,
        _ => 64,
    };
    let vol = unit_ball_volume(d) * r.powi(d as i32);
    let estimate = |n: usize| -> f64 {
        let dirs = sphere_rule(d, n);
        let shells: Vec<f64> = gauss_legendre_on(n, 0.0, r)
            .into_par_iter()
            .map(|(rho, wr)| {
                let mut acc = 0.0;
                let mut x = [0.0; 4];
                for (u, w) in &dirs {
                    for k in 0..d {
                        x[k] = y[k] + rho * u[k];
                    }
                    acc += w * psi.intensity(&x[..d]);
                }
                acc * wr * rho.powi(d as i32 - 1)
            })
            .collect();
        shells.iter().sum::<f64>() / vol
    };
    // |ψ|² oscillates with frequency up to 2√λ across a diameter of 2r
    let osc = 2.0 * r * 2.0 * (psi.eigenvalue() as f64).sqrt();
    let mut n = ((osc / 2.0).ceil() as usize + 6).clamp(6, cap);
    let mut prev = estimate(n);
    while n < cap {
        n = (2 * n).min(cap);
        let next = estimate(n);
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// `D(ψ, T) = Σ_{1 <= |ζ| <= T} |⟨e_ζ ψ, ψ⟩|`, a bound on the deviation of
/// the ball mass from 1 that holds uniformly in the centre.
///
/// Every nonzero `ζ` with `M(ζ) ≠ 0` is a difference of two support points.
/// The points are sorted, so `μ_j - μ_i` for `i < j` is lexicographically
/// positive, and `M(-ζ) = conj(M(ζ))` accounts for the other half.
pub fn discrepancy_bound(psi: &Eigenfunction, t_radius: f64) -> f64 {
    let bound = radius_sq_floor(t_radius);
    if bound < 1 {
        return 0.0;
    }
    let modes = psi.modes();
    let span = (bound as u64).isqrt() as i64;
    let mut contrib: Vec<(LatticePoint, Complex64)> = Vec::new();
    for (i, (mu, c)) in modes.iter().enumerate() {
        let x0 = mu.as_slice()[0];
        for (nu, c2) in &modes[i + 1..] {
            if nu.as_slice()[0] - x0 > span {
                break;
            }
            if mu.dist_sq(nu) <= bound {
                contrib.push((*nu - *mu, c * c2.conj()));
            }
        }
    }
    contrib.sort_by(|a, b| a.0.cmp(&b.0));
    let mut total = 0.0;
    let mut k = 0;
    while k < contrib.len() {
        let zeta = contrib[k].0;
        let mut m = Complex64::default();
        while k < contrib.len() && contrib[k].0 == zeta {
            m += contrib[k].1;
            k += 1;
        }
        total += m.norm();
    }
    2.0 * total
}
