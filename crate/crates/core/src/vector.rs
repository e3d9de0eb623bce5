//! Small dense vectors in R^n.
//!
//! Curves in this crate live in low dimensions (almost always 2 or 3), so the
//! storage is inline for up to four coordinates and spills to the heap beyond
//! that.

use smallvec::SmallVec;
use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// A point or direction in R^n.
#[derive(Clone, PartialEq, Default)]
pub struct VecN(SmallVec<[f64; 4]>);

impl VecN {
    /// The zero vector of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        VecN(SmallVec::from_elem(0.0, n))
    }

    /// Builds a vector from a coordinate slice.
    pub fn from_slice(xs: &[f64]) -> Self {
        VecN(SmallVec::from_slice(xs))
    }

    /// The standard basis vector `e_i` in R^n.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1.0;
        v
    }

    /// Embeds a planar point into R^n, padding with zeros.
    pub fn planar(n: usize, x: f64, y: f64) -> Self {
        let mut v = Self::zeros(n);
        v.0[0] = x;
        v.0[1] = y;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &VecN) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Euclidean distance to `other`.
    pub fn dist(&self, other: &VecN) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Returns `self / |self|`, or `None` when the norm is not positive.
    pub fn normalized(&self) -> Option<VecN> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self.scaled(1.0 / n))
        } else {
            None
        }
    }

    pub fn scaled(&self, c: f64) -> VecN {
        VecN(self.0.iter().map(|x| c * x).collect())
    }

    /// In-place `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &VecN) {
        for (s, xi) in self.0.iter_mut().zip(x.0.iter()) {
            *s += a * xi;
        }
    }

    /// Returns `self + a * x`.
    pub fn plus_scaled(&self, a: f64, x: &VecN) -> VecN {
        let mut out = self.clone();
        out.axpy(a, x);
        out
    }

    /// Removes the component of `self` along the unit vector `u`.
    pub fn reject_unit(&self, u: &VecN) -> VecN {
        self.plus_scaled(-self.dot(u), u)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }

    /// Rotation by a quarter turn in the (x1, x2) plane, used for planar normals.
    pub fn perp2(&self) -> VecN {
        let mut out = Self::zeros(self.dim());
        out.0[0] = -self.0[1];
        out.0[1] = self.0[0];
        out
    }
}

impl fmt::Debug for VecN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl From<Vec<f64>> for VecN {
    fn from(v: Vec<f64>) -> Self {
        VecN(SmallVec::from_vec(v))
    }
}

impl Index<usize> for VecN {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for VecN {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add<&VecN> for &VecN {
    type Output = VecN;
    fn add(self, rhs: &VecN) -> VecN {
        VecN(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&VecN> for &VecN {
    type Output = VecN;
    fn sub(self, rhs: &VecN) -> VecN {
        VecN(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&VecN> for f64 {
    type Output = VecN;
    fn mul(self, rhs: &VecN) -> VecN {
        rhs.scaled(self)
    }
}

impl Neg for &VecN {
    type Output = VecN;
    fn neg(self) -> VecN {
        self.scaled(-1.0)
    }
}

impl AddAssign<&VecN> for VecN {
    fn add_assign(&mut self, rhs: &VecN) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&VecN> for VecN {
    fn sub_assign(&mut self, rhs: &VecN) {
        self.axpy(-1.0, rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_norms() {
        let a = VecN::from_slice(&[3.0, 4.0]);
        let b = VecN::basis(2, 0);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&b), 3.0);
        assert_eq!((&a - &b).as_slice(), &[2.0, 4.0]);
        assert_eq!(a.reject_unit(&b).as_slice(), &[0.0, 4.0]);
        assert_eq!(a.perp2().as_slice(), &[-4.0, 3.0]);
        assert!(VecN::zeros(3).normalized().is_none());
    }

    #[test]
    fn spills_past_four_coordinates() {
        let v = VecN::from(vec![1.0; 7]);
        assert_eq!(v.dim(), 7);
        assert!((v.norm() - 7f64.sqrt()).abs() < 1e-15);
    }
}
