//! Normalized Bessel functions.
//!
//! Both kernels used by the crate are instances of
//!
//! ```text
//! Λ_α(ξ) = Γ(α + 1) (2/ξ)^α J_α(ξ) = Σ_k (-ξ²/4)^k / (k! (α+1)_k),
//! ```
//!
//! the average of `cos⟨x, ξe⟩` over the unit ball (`α = d/2`) or the unit
//! sphere (`α = d/2 - 1`) of `R^d`.

use std::f64::consts::PI;

use crate::error::{check_dim, Error, Result};
use crate::quadrature::adaptive_simpson;

/// Above this argument the Hankel expansion replaces the power series.
pub const SERIES_LIMIT: f64 = 5.0;

/// Beyond this argument the Hankel expansion is used for every order.
pub const HANKEL_LIMIT: f64 = 20.0;

/// `Γ(n/2)` for small positive `n`.
pub fn gamma_half(n: u32) -> f64 {
    assert!(n >= 1);
    let (mut g, mut k) = if n % 2 == 0 { (1.0, 2) } else { (PI.sqrt(), 1) };
    while k < n {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

/// Volume `c_d = π^{d/2} / Γ(d/2 + 1)` of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half(d as u32 + 2)
}

/// Surface area `d · c_d` of the unit sphere `S^{d-1}`.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

fn series(alpha: f64, xi: f64) -> f64 {
    let q = 0.25 * xi * xi;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= -q / (k * (k + alpha));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > q.sqrt() {
            break;
        }
    }
    sum
}

/// `J_α(x)` from the Hankel expansion, summed until the terms are
/// negligible or start to grow.
fn bessel_j_asymptotic(alpha: f64, x: f64) -> f64 {
    let mu = 4.0 * alpha * alpha;
    let mut a = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() >= prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        // signs run +, -, -, +, +, -, ... over k = 0, 1, 2, ...
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let omega = x - alpha * PI / 2.0 - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// `J_n(x)` for integer `n` by Miller's backward recurrence, normalized
/// with `J_0 + 2 Σ_k J_{2k} = 1`. Accurate to rounding for moderate `x`.
fn bessel_j_miller(n: usize, x: f64) -> f64 {
    let top = 2 * ((x as usize + n + 60) / 2 + 1);
    let mut next = 0.0f64;
    let mut cur = 1e-30f64;
    let mut norm = 0.0f64;
    let mut wanted = 0.0f64;
    for k in (1..=top).rev() {
        // cur = J_k, next = J_{k+1}; step down to J_{k-1}
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let km1 = k - 1;
        if km1 == n {
            wanted = cur;
        }
        if km1 > 0 && km1 % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e200 {
            next *= 1e-200;
            cur *= 1e-200;
            norm *= 1e-200;
            wanted *= 1e-200;
        }
    }
    norm += cur;
    wanted / norm
}

/// `Λ_α(ξ)` for `α = two_alpha / 2`.
///
/// Small arguments use the power series. Integer orders use Miller's
/// recurrence up to [`HANKEL_LIMIT`], half-integer orders the closed
/// spherical Bessel forms, and everything beyond uses the Hankel expansion.
pub fn normalized_bessel(two_alpha: u32, xi: f64) -> f64 {
    let alpha = two_alpha as f64 / 2.0;
    let xi = xi.abs();
    match two_alpha {
        1 if xi >= 1.0 => xi.sin() / xi,
        3 if xi >= 1.0 => 3.0 * (xi.sin() - xi * xi.cos()) / (xi * xi * xi),
        _ if xi <= SERIES_LIMIT => series(alpha, xi),
        _ if two_alpha % 2 == 0 && xi <= HANKEL_LIMIT => {
            let n = (two_alpha / 2) as i32;
            gamma_half(two_alpha + 2) * (2.0 / xi).powi(n) * bessel_j_miller(n as usize, xi)
        }
        _ if two_alpha % 2 == 1 && xi <= HANKEL_LIMIT => series(alpha, xi),
        _ => {
            gamma_half(two_alpha + 2) * (2.0 / xi).powf(alpha) * bessel_j_asymptotic(alpha, xi)
        }
    }
}

fn check_arg(xi: f64) -> Result<()> {
    if xi >= 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "kernel argument must be finite and non-negative, got {xi}"
        )))
    }
}

/// Fourier transform of the normalized indicator of the unit ball,
/// `K_d(ξ) = Γ(d/2 + 1) (2/ξ)^{d/2} J_{d/2}(ξ)`, with `K_d(0) = 1`.
pub fn ball_kernel(d: usize, xi: f64) -> Result<f64> {
    check_dim(d)?;
    check_arg(xi)?;
    Ok(normalized_bessel(d as u32, xi))
}

/// Average of `cos⟨x, se⟩` over the unit sphere of `R^d`,
/// `Γ(d/2) (2/s)^{d/2 - 1} J_{d/2 - 1}(s)`.
pub fn sphere_kernel(d: usize, s: f64) -> Result<f64> {
    check_dim(d)?;
    check_arg(s)?;
    Ok(normalized_bessel(d as u32 - 2, s))
}

/// Independent evaluation of [`ball_kernel`] by slicing the ball
/// orthogonally to `e`:
///
/// ```text
/// K_d(ξ) = (c_{d-1}/c_d) ∫_{-π/2}^{π/2} cos(ξ sin θ) cos^d θ dθ.
/// ```
pub fn ball_kernel_quadrature(d: usize, xi: f64, tol: f64) -> Result<f64> {
    check_dim(d)?;
    check_arg(xi)?;
    let c = unit_ball_volume(d - 1) / unit_ball_volume(d);
    let integral = adaptive_simpson(
        |t| (xi * t.sin()).cos() * t.cos().powi(d as i32),
        -PI / 2.0,
        PI / 2.0,
        tol / c,
    );
    Ok(c * integral)
}
