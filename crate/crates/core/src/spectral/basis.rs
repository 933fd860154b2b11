use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{discrepancy_bound, matrix_element, Eigenfunction};
use crate::error::{Error, Result};
use crate::lattice::{Eigenspace, LatticePoint};

/// An orthonormal basis `{ψ_n}` of one eigenspace, each `ψ_n` expanded in
/// the exponentials `e_μ`, `μ ∈ E_λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    space: Eigenspace,
    members: Vec<Eigenfunction>,
}

impl OrthonormalBasis {
    /// The basis of exponentials itself.
    pub fn exponential(space: &Eigenspace) -> Self {
        OrthonormalBasis {
            space: space.clone(),
            members: space.iter().map(|&mu| Eigenfunction::pure_mode(mu)).collect(),
        }
    }

    /// Builds a basis from the columns of a unitary matrix: member `n` has
    /// coefficient `columns[n][j]` on the `j`-th point of `space`.
    pub fn from_columns(space: &Eigenspace, columns: Vec<Vec<Complex64>>) -> Result<Self> {
        if columns.len() != space.len() || columns.iter().any(|c| c.len() != space.len()) {
            return Err(Error::Precondition(format!(
                "need a square matrix of size {}",
                space.len()
            )));
        }
        let members = columns
            .into_iter()
            .map(|col| {
                Eigenfunction::new(
                    space.dim(),
                    space.eigenvalue(),
                    space.iter().copied().zip(col),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OrthonormalBasis {
            space: space.clone(),
            members,
        })
    }

    pub fn space(&self) -> &Eigenspace {
        &self.space
    }

    pub fn members(&self) -> &[Eigenfunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `max_{j,k} |⟨ψ_j, ψ_k⟩ - δ_{jk}|`.
    pub fn gram_defect(&self) -> f64 {
        self.members
            .par_iter()
            .enumerate()
            .map(|(j, a)| {
                self.members
                    .iter()
                    .enumerate()
                    .map(|(k, b)| {
                        let delta = if j == k { 1.0 } else { 0.0 };
                        (a.inner(b) - delta).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// `max_μ |Σ_n |c_n(μ)|² - 1|`; a unitary matrix has orthonormal rows
    /// as well as columns.
    pub fn parseval_defect(&self) -> f64 {
        self.space
            .iter()
            .map(|mu| {
                let s: f64 = self.members.iter().map(|psi| psi.coeff(mu).norm_sqr()).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// One sweep of modified Gram–Schmidt, in its right-looking form: once a
/// column is normalized its component is removed from every later column,
/// which parallelizes over the later columns without changing the result.
fn gram_schmidt_pass(cols: &mut [Vec<Complex64>]) -> Result<()> {
    for n in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(n + 1);
        let q = &mut done[n];
        let norm = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-300) {
            return Err(Error::Precondition("rank-deficient sample matrix".into()));
        }
        q.iter_mut().for_each(|z| *z /= norm);
        let q: &Vec<Complex64> = q;
        rest.par_iter_mut().for_each(|v| {
            let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(q) {
                *x -= proj * a;
            }
        });
    }
    Ok(())
}

/// A random orthonormal basis of `E_λ`, determined by `seed`: a complex
/// Gaussian matrix orthonormalized by two passes of modified Gram–Schmidt.
pub fn random_onb(space: &Eigenspace, seed: u64) -> Result<OrthonormalBasis> {
    let n = space.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    gram_schmidt_pass(&mut cols)?;
    gram_schmidt_pass(&mut cols)?;
    OrthonormalBasis::from_columns(space, cols)
}

/// `Σ_n |⟨e_ζ ψ_n, ψ_n⟩|` over the basis, for `ζ ≠ 0`.
pub fn v1_localized(basis: &OrthonormalBasis, zeta: &LatticePoint) -> Result<f64> {
    if zeta.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(basis
        .members()
        .iter()
        .map(|psi| matrix_element(psi, zeta).norm())
        .sum())
}

/// `Σ_{1 <= |ζ| <= T} v1_localized(basis, ζ)`, gathered member by member.
pub fn v1_localized_sum(basis: &OrthonormalBasis, t_radius: f64) -> f64 {
    let parts: Vec<f64> = basis
        .members()
        .par_iter()
        .map(|psi| discrepancy_bound(psi, t_radius))
        .collect();
    parts.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_sphere, equal_norm_shift_count_exact, visit_ball};

    #[test]
    fn random_basis_examples() {
        let e = enumerate_sphere(2, 25).unwrap();
        let a = random_onb(&e, 11).unwrap();
        let b = random_onb(&e, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
        assert!(a.gram_defect() < 1e-10);
        assert!(a.parseval_defect() < 1e-10);
        assert_ne!(a, random_onb(&e, 12).unwrap());

        let e1 = enumerate_sphere(2, 1).unwrap();
        let c = random_onb(&e1, 0).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.parseval_defect() < 1e-10);
    }

    #[test]
    fn localized_examples() {
        let e = enumerate_sphere(2, 25).unwrap();
        let exp = OrthonormalBasis::exponential(&e);
        let zeta = LatticePoint::from_slice(&[1, -1]);
        assert_eq!(v1_localized(&exp, &zeta).unwrap(), 0.0);
        let mixed = random_onb(&e, 5).unwrap();
        let v = v1_localized(&mixed, &zeta).unwrap();
        assert!(v <= 2.0 + 1e-9);
        assert!(v > 0.0);
        assert_eq!(v1_localized(&mixed, &LatticePoint::from_slice(&[11, 0])).unwrap(), 0.0);
        assert_eq!(v1_localized(&mixed, &LatticePoint::zero(2)), Err(Error::ZeroVector));
    }

    #[test]
    fn localized_bound_by_shift_count() {
        for (d, lambda) in [(2usize, 65u64), (3, 26), (4, 7)] {
            let e = enumerate_sphere(d, lambda).unwrap();
            let basis = random_onb(&e, lambda).unwrap();
            let reach = 4 * lambda;
            visit_ball(d, reach, |zeta| {
                if zeta.is_zero() {
                    return;
                }
                let v = v1_localized(&basis, zeta).unwrap();
                let bound = equal_norm_shift_count_exact(d, lambda, zeta).unwrap() as f64;
                assert!(v <= bound + 1e-9, "d = {d}, ζ = {zeta}: {v} > {bound}");
            })
            .unwrap();
            let total = v1_localized_sum(&basis, 2.5);
            let mut direct = 0.0;
            visit_ball(d, 6, |zeta| {
                if !zeta.is_zero() {
                    direct += v1_localized(&basis, zeta).unwrap();
                }
            })
            .unwrap();
            assert!((total - direct).abs() < 1e-10);
        }
    }
}
