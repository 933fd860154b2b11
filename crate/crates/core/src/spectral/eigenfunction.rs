use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticePoint;

/// Tolerance on `Σ |c(μ)|² = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// `ψ = Σ_μ c(μ) e_μ` with every `μ` on the sphere `|μ|² = λ`.
///
/// Modes are stored sorted by frequency, so lookups are binary searches and
/// every sum over the support runs in the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenfunction {
    dim: usize,
    eigenvalue: u64,
    modes: Vec<(LatticePoint, Complex64)>,
}

impl Eigenfunction {
    /// Validates sphere membership, uniqueness of frequencies and
    /// normalization.
    pub fn new(
        dim: usize,
        eigenvalue: u64,
        modes: impl IntoIterator<Item = (LatticePoint, Complex64)>,
    ) -> Result<Self> {
        let psi = Self::build(dim, eigenvalue, modes)?;
        let n = psi.norm_sq();
        if (n - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(psi)
    }

    /// Like [`Eigenfunction::new`] but rescales to unit norm first.
    pub fn normalized(
        dim: usize,
        eigenvalue: u64,
        modes: impl IntoIterator<Item = (LatticePoint, Complex64)>,
    ) -> Result<Self> {
        let mut psi = Self::build(dim, eigenvalue, modes)?;
        let n = psi.norm_sq();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        let s = 1.0 / n.sqrt();
        for (_, c) in psi.modes.iter_mut() {
            *c *= s;
        }
        Ok(psi)
    }

    fn build(
        dim: usize,
        eigenvalue: u64,
        modes: impl IntoIterator<Item = (LatticePoint, Complex64)>,
    ) -> Result<Self> {
        check_dim(dim)?;
        let mut modes: Vec<_> = modes.into_iter().collect();
        for (mu, _) in &modes {
            if mu.dim() != dim || mu.norm_sq() as u64 != eigenvalue {
                return Err(Error::NotOnSphere(mu.to_string(), eigenvalue));
            }
        }
        modes.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = modes.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Precondition(format!("frequency {} repeated", w[0].0)));
        }
        Ok(Eigenfunction {
            dim,
            eigenvalue,
            modes,
        })
    }

    /// The exponential `e_μ`.
    pub fn pure_mode(mu: LatticePoint) -> Self {
        Eigenfunction {
            dim: mu.dim(),
            eigenvalue: mu.norm_sq() as u64,
            modes: vec![(mu, Complex64::new(1.0, 0.0))],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalue(&self) -> u64 {
        self.eigenvalue
    }

    pub fn modes(&self) -> &[(LatticePoint, Complex64)] {
        &self.modes
    }

    pub fn support_len(&self) -> usize {
        self.modes.len()
    }

    pub fn coeff(&self, mu: &LatticePoint) -> Complex64 {
        self.modes
            .binary_search_by(|(p, _)| p.cmp(mu))
            .map(|i| self.modes[i].1)
            .unwrap_or_default()
    }

    pub fn norm_sq(&self) -> f64 {
        self.modes.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// `ψ(x) = Σ c(μ) e^{i⟨μ, x⟩}`.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.modes
            .iter()
            .map(|(mu, c)| c * Complex64::cis(mu.dot_real(x)))
            .sum()
    }

    pub fn intensity(&self, x: &[f64]) -> f64 {
        self.eval(x).norm_sqr()
    }

    /// `⟨ψ, φ⟩ = ∫ ψ φ̄ dvol = Σ c_ψ(μ) conj(c_φ(μ))`.
    pub fn inner(&self, other: &Eigenfunction) -> Complex64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = Complex64::default();
        while i < self.modes.len() && j < other.modes.len() {
            match self.modes[i].0.cmp(&other.modes[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.modes[i].1 * other.modes[j].1.conj();
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&EigenfunctionFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: EigenfunctionFile = serde_json::from_str(s)?;
        file.try_into()
    }
}

/// On-disk form of an eigenfunction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionFile {
    pub schema_version: u32,
    pub d: usize,
    pub lambda: u64,
    pub modes: Vec<ModeRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub coords: LatticePoint,
    pub re: f64,
    pub im: f64,
}

impl From<&Eigenfunction> for EigenfunctionFile {
    fn from(psi: &Eigenfunction) -> Self {
        EigenfunctionFile {
            schema_version: 1,
            d: psi.dim,
            lambda: psi.eigenvalue,
            modes: psi
                .modes
                .iter()
                .map(|(mu, c)| ModeRecord {
                    coords: *mu,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<EigenfunctionFile> for Eigenfunction {
    type Error = Error;
    fn try_from(f: EigenfunctionFile) -> Result<Self> {
        Eigenfunction::new(
            f.d,
            f.lambda,
            f.modes
                .into_iter()
                .map(|m| (m.coords, Complex64::new(m.re, m.im))),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::from_slice(c)
    }

    #[test]
    fn validation() {
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        assert!(Eigenfunction::new(2, 25, [(p(&[3, 4]), h), (p(&[5, 0]), h)]).is_ok());
        assert!(matches!(
            Eigenfunction::new(2, 25, [(p(&[3, 4]), h)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            Eigenfunction::new(2, 25, [(p(&[3, 3]), h), (p(&[5, 0]), h)]),
            Err(Error::NotOnSphere(..))
        ));
        assert!(Eigenfunction::new(2, 25, [(p(&[3, 4]), h), (p(&[3, 4]), h)]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let psi = Eigenfunction::normalized(
            3,
            2,
            [
                (p(&[1, 1, 0]), Complex64::new(1.0, 2.0)),
                (p(&[0, -1, 1]), Complex64::new(-0.5, 0.0)),
            ],
        )
        .unwrap();
        let s = psi.to_json().unwrap();
        assert!(s.contains("\"schema_version\": 1"));
        let back = Eigenfunction::from_json(&s).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn evaluation_and_inner_products() {
        let psi = Eigenfunction::pure_mode(p(&[3, 4]));
        assert!((psi.intensity(&[0.3, -1.2]) - 1.0).abs() < 1e-15);
        let a = Eigenfunction::normalized(2, 1, [(p(&[1, 0]), Complex64::new(1.0, 0.0)), (p(&[0, 1]), Complex64::new(-1.0, 0.0))]).unwrap();
        let b = Eigenfunction::normalized(2, 1, [(p(&[-1, 0]), Complex64::new(1.0, 0.0)), (p(&[0, -1]), Complex64::new(-1.0, 0.0))]).unwrap();
        assert_eq!(a.inner(&b), Complex64::default());
        assert!((a.inner(&a).re - 1.0).abs() < 1e-15);
    }
}
