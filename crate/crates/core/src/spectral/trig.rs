use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Eigenfunction;
use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticePoint;

/// Cap on the size of the dense coefficient box and of each intermediate
/// tensor in grid evaluation.
pub const MAX_DENSE_ENTRIES: usize = 60_000_000;

/// `a(x) = Σ_ζ â(ζ) e^{i⟨ζ, x⟩}` with finitely many nonzero `â(ζ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    dim: usize,
    coeffs: Vec<(LatticePoint, Complex64)>,
}

impl TrigPolynomial {
    /// Repeated frequencies are summed.
    pub fn new(
        dim: usize,
        coeffs: impl IntoIterator<Item = (LatticePoint, Complex64)>,
    ) -> Result<Self> {
        check_dim(dim)?;
        let mut v: Vec<_> = coeffs.into_iter().collect();
        if let Some((z, _)) = v.iter().find(|(z, _)| z.dim() != dim) {
            return Err(Error::Precondition(format!(
                "frequency {z} does not have dimension {dim}"
            )));
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(LatticePoint, Complex64)> = Vec::with_capacity(v.len());
        for (z, c) in v {
            match merged.last_mut() {
                Some((last, acc)) if *last == z => *acc += c,
                _ => merged.push((z, c)),
            }
        }
        Ok(TrigPolynomial {
            dim,
            coeffs: merged,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[(LatticePoint, Complex64)] {
        &self.coeffs
    }

    pub fn coeff(&self, zeta: &LatticePoint) -> Complex64 {
        self.coeffs
            .binary_search_by(|(z, _)| z.cmp(zeta))
            .map(|i| self.coeffs[i].1)
            .unwrap_or_default()
    }

    /// `â(-ζ) = conj â(ζ)` for every frequency, to within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .all(|(z, c)| (self.coeff(&-*z) - c.conj()).norm() <= tol)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(z, c)| c * Complex64::cis(z.dot_real(x)))
            .sum()
    }

    /// `∫ a |ψ|² dvol = Σ_{μ,ν} c(μ) conj(c(ν)) â(ν - μ)`.
    pub fn pair_with(&self, psi: &Eigenfunction) -> Complex64 {
        let modes = psi.modes();
        let mut acc = Complex64::default();
        for (mu, c) in modes {
            for (nu, c2) in modes {
                acc += c * c2.conj() * self.coeff(&(*nu - *mu));
            }
        }
        acc
    }

    /// Largest `|ζ_i|` over all frequencies and coordinates.
    pub fn max_frequency(&self) -> i64 {
        self.coeffs
            .iter()
            .flat_map(|(z, _)| z.as_slice().iter().map(|c| c.abs()).collect::<Vec<_>>())
            .max()
            .unwrap_or(0)
    }

    /// Values on the tensor grid `{x : x_i = -h + 2h k_i/(n-1)}`, `0 <= k_i < n`,
    /// listed row-major in `(k_0, …, k_{d-1})`.
    ///
    /// The coefficients are laid out in a dense box and contracted one axis
    /// at a time, so the cost is `O(n F^d + … + n^d F)` with `F = 2T + 1`
    /// rather than `O(n^d F^d)`.
    pub fn eval_grid(&self, half_width: f64, n: usize) -> Result<Vec<Complex64>> {
        let d = self.dim;
        let t = self.max_frequency();
        let f = (2 * t + 1) as usize;
        let biggest = f.max(n).checked_pow(d as u32).unwrap_or(usize::MAX);
        if n < 2 || biggest > MAX_DENSE_ENTRIES {
            return Err(Error::Precondition(format!(
                "grid of {n}^{d} points over {f}^{d} frequencies is outside the dense budget"
            )));
        }
        let mut dense = vec![Complex64::default(); f.pow(d as u32)];
        for (z, c) in &self.coeffs {
            let idx = z
                .as_slice()
                .iter()
                .fold(0usize, |acc, &zi| acc * f + (zi + t) as usize);
            dense[idx] = *c;
        }
        let grid = grid_points(half_width, n);
        let mat: Vec<Complex64> = grid
            .iter()
            .flat_map(|&x| (0..f).map(move |j| Complex64::cis((j as i64 - t) as f64 * x)))
            .collect();
        let mut shape = vec![f; d];
        for axis in 0..d {
            dense = contract_axis(&dense, &shape, axis, &mat, n);
            shape[axis] = n;
        }
        Ok(dense)
    }
}

/// `n` equally spaced points from `-h` to `h` inclusive.
pub fn grid_points(h: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| -h + 2.0 * h * k as f64 / (n - 1) as f64)
        .collect()
}

/// Replaces axis `axis` of the row-major tensor `data` (of the given shape)
/// by its product with the `n × shape[axis]` matrix `mat`:
/// `out[…, g, …] = Σ_j mat[g][j] · data[…, j, …]`.
pub fn contract_axis<S>(data: &[S], shape: &[usize], axis: usize, mat: &[S], n: usize) -> Vec<S>
where
    S: Copy + Default + Add<Output = S> + Mul<Output = S>,
{
    let f = shape[axis];
    debug_assert_eq!(mat.len(), n * f);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![S::default(); outer * n * inner];
    for o in 0..outer {
        let src = &data[o * f * inner..(o + 1) * f * inner];
        let dst = &mut out[o * n * inner..(o + 1) * n * inner];
        for g in 0..n {
            let row = &mat[g * f..(g + 1) * f];
            let out_row = &mut dst[g * inner..(g + 1) * inner];
            for (j, &m) in row.iter().enumerate() {
                let in_row = &src[j * inner..(j + 1) * inner];
                for (acc, &v) in out_row.iter_mut().zip(in_row) {
                    *acc = *acc + m * v;
                }
            }
        }
    }
    out
}
