use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;

/// Per-coordinate magnitude guard for points produced by the enumerators.
pub const COORD_BOUND: i64 = 1 << 20;

/// An integer vector in `Z^d` for `1 <= d <= 4`.
///
/// Unused trailing slots are kept at zero, so the derived equality and hash
/// only ever see meaningful data. Ordering is lexicographic within a
/// dimension.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    dim: u8,
    coords: [i64; MAX_DIM],
}

impl LatticePoint {
    pub fn new(coords: &[i64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::Dimension(coords.len()));
        }
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(LatticePoint {
            dim: coords.len() as u8,
            coords: c,
        })
    }

    /// Panicking constructor for literals in tests and examples.
    pub fn from_slice(coords: &[i64]) -> Self {
        Self::new(coords).expect("lattice point dimension must be 1..=4")
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        LatticePoint {
            dim: dim as u8,
            coords: [0; MAX_DIM],
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, idx: usize, v: i64) {
        debug_assert!(idx < self.dim as usize);
        self.coords[idx] = v;
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn as_slice(&self) -> &[i64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coords == [0; MAX_DIM]
    }

    /// Squared Euclidean norm. Exact for all points within the coordinate guard.
    #[inline]
    pub fn norm_sq(&self) -> i64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    #[inline]
    pub fn dot(&self, other: &LatticePoint) -> i64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    #[inline]
    pub fn dist_sq(&self, other: &LatticePoint) -> i64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Real inner product with a point of `R^d`.
    #[inline]
    pub fn dot_real(&self, x: &[f64]) -> f64 {
        self.as_slice()
            .iter()
            .zip(x)
            .map(|(&a, &b)| a as f64 * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }
}

impl std::ops::Add for LatticePoint {
    type Output = LatticePoint;
    fn add(mut self, rhs: LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a += b;
        }
        self
    }
}

impl std::ops::Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(mut self, rhs: LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a -= b;
        }
        self
    }
}

impl std::ops::Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(mut self) -> LatticePoint {
        for a in self.coords.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl std::ops::Mul<LatticePoint> for i64 {
    type Output = LatticePoint;
    fn mul(self, mut rhs: LatticePoint) -> LatticePoint {
        for a in rhs.coords.iter_mut() {
            *a *= self;
        }
        rhs
    }
}

impl Ord for LatticePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.coords.cmp(&other.coords))
    }
}

impl PartialOrd for LatticePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.as_slice().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for LatticePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        LatticePoint::new(&v).map_err(serde::de::Error::custom)
    }
}

/// `zeta = multiplier * primitive` with `gcd(primitive) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimitiveDecomposition {
    pub multiplier: u64,
    pub primitive: LatticePoint,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Splits a nonzero vector into its content and primitive direction. The
/// sign stays on the primitive vector.
pub fn primitive_part(zeta: &LatticePoint) -> Result<PrimitiveDecomposition> {
    if zeta.is_zero() {
        return Err(Error::ZeroVector);
    }
    let m = zeta
        .as_slice()
        .iter()
        .fold(0u64, |g, &c| gcd(g, c.unsigned_abs()));
    let mut p = *zeta;
    for c in p.coords.iter_mut() {
        *c /= m as i64;
    }
    Ok(PrimitiveDecomposition {
        multiplier: m,
        primitive: p,
    })
}
