//! Minimal 3-vector used for positions, frames and fields.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vector3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Vector3<S> {
    #[inline]
    pub const fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero())
    }

    #[inline]
    pub fn unit_x() -> Self {
        Self::new(S::one(), S::zero(), S::zero())
    }

    #[inline]
    pub fn unit_y() -> Self {
        Self::new(S::zero(), S::one(), S::zero())
    }

    #[inline]
    pub fn unit_z() -> Self {
        Self::new(S::zero(), S::zero(), S::one())
    }

    #[inline]
    pub fn from_array(a: [S; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn to_array(self) -> [S; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> S {
        self.norm_squared().sqrt()
    }

    /// Returns `None` for a vector whose norm is not strictly positive.
    #[inline]
    pub fn try_normalize(self) -> Option<Self> {
        let n = self.norm();
        (n > S::zero() && n.is_finite()).then(|| self / n)
    }

    #[inline]
    pub fn normalize(self) -> Self {
        self / self.norm()
    }

    /// Angle in `[0, π]`, computed with `atan2` so it stays accurate near 0 and π.
    pub fn angle_to(self, o: Self) -> S {
        self.cross(o).norm().atan2(self.dot(o))
    }

    pub fn max_abs(self) -> S {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<T: Scalar>(self) -> Vector3<T> {
        Vector3::new(
            T::lit(self.x.to_f64_lossy()),
            T::lit(self.y.to_f64_lossy()),
            T::lit(self.z.to_f64_lossy()),
        )
    }
}

impl<S: Scalar> Add for Vector3<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<S: Scalar> AddAssign for Vector3<S> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Scalar> Sub for Vector3<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<S: Scalar> SubAssign for Vector3<S> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<S: Scalar> Mul<S> for Vector3<S> {
    type Output = Self;
    #[inline]
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl<S: Scalar> Div<S> for Vector3<S> {
    type Output = Self;
    #[inline]
    fn div(self, k: S) -> Self {
        Self::new(self.x / k, self.y / k, self.z / k)
    }
}

impl<S: Scalar> Neg for Vector3<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<S> Index<usize> for Vector3<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vector3 index {i} out of range"),
        }
    }
}

impl<S: Scalar> std::iter::Sum for Vector3<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let x = Vector3::<f64>::unit_x();
        let y = Vector3::<f64>::unit_y();
        assert_eq!(x.cross(y), Vector3::unit_z());
        assert_eq!(y.cross(x), -Vector3::unit_z());
    }

    #[test]
    fn angle_near_parallel_is_accurate() {
        let a = Vector3::new(1.0_f64, 0.0, 0.0);
        let b = Vector3::new(1.0, 1e-9, 0.0);
        assert!((a.angle_to(b) - 1e-9).abs() < 1e-20);
    }

    #[test]
    fn zero_vector_does_not_normalize() {
        assert!(Vector3::<f32>::zero().try_normalize().is_none());
    }
}
