use core::fmt;
use core::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use alloc::vec::Vec;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// A point of `R^n`, `1 <= n <= MAX_DIM`, with finite coordinates.
///
/// Primal points `x, y` and dual points `x*, y*` share this type; the duality
/// pairing is the dot product.
#[derive(Clone, Copy)]
pub struct Vector {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Vector {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::invalid(alloc::format!(
                "dimension {} outside 1..={MAX_DIM}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid(alloc::format!(
                "coordinate {i} is not finite"
            )));
        }
        let mut v = Vector::zeros(coords.len());
        v.coords[..coords.len()].copy_from_slice(coords);
        Ok(v)
    }

    /// The origin of `R^dim`. Panics when `dim` is out of range.
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Vector {
            coords: [0.0; MAX_DIM],
            dim,
        }
    }

    pub fn splat(dim: usize, value: f64) -> Self {
        Vector::from_fn(dim, |_| value)
    }

    pub fn basis(dim: usize, axis: usize) -> Self {
        Vector::from_fn(dim, |i| if i == axis { 1.0 } else { 0.0 })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> f64) -> Self {
        let mut v = Vector::zeros(dim);
        for i in 0..dim {
            v.coords[i] = f(i);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.as_slice().to_vec()
    }

    pub fn set(&mut self, i: usize, value: f64) {
        assert!(i < self.dim);
        self.coords[i] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        (*self - *other).norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `self / ||self||`, or `None` for (numerically) zero vectors.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(*self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Vector {
        Vector::from_fn(self.dim, |i| f(self.coords[i]))
    }

    pub fn zip_map(&self, other: &Vector, mut f: impl FnMut(f64, f64) -> f64) -> Vector {
        debug_assert_eq!(self.dim, other.dim);
        Vector::from_fn(self.dim, |i| f(self.coords[i], other.coords[i]))
    }

    /// Fails with an invalid-input error unless `self` lives in `R^dim`.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::invalid(alloc::format!(
                "dimension mismatch: expected {dim}, got {}",
                self.dim
            )))
        }
    }
}

impl PartialEq for Vector {
    fn eq(&self, other: &Self) -> bool {
        self.as_slice() == other.as_slice()
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl Add for Vector {
    type Output = Vector;

    fn add(self, rhs: Vector) -> Vector {
        self.zip_map(&rhs, |a, b| a + b)
    }
}

impl Sub for Vector {
    type Output = Vector;

    fn sub(self, rhs: Vector) -> Vector {
        self.zip_map(&rhs, |a, b| a - b)
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, rhs: Vector) {
        *self = *self + rhs;
    }
}

impl SubAssign for Vector {
    fn sub_assign(&mut self, rhs: Vector) {
        *self = *self - rhs;
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;

    fn mul(self, s: f64) -> Vector {
        self.map(|a| a * s)
    }
}

impl Neg for Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.map(|a| -a)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Vector::new(&coords).map_err(serde::de::Error::custom)
    }
}
