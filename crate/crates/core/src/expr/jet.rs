//! Truncated second-order Taylor jets in `N` variables.
//!
//! Every operation writes the upper triangle of the Hessian and mirrors it,
//! so the stored Hessian is symmetric bit-for-bit.

use crate::scalar::Scalar;

/// Value, gradient and Hessian of a function of `N` variables at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<S, const N: usize> {
    pub value: S,
    pub grad: [S; N],
    pub hess: [[S; N]; N],
}

impl<S: Scalar, const N: usize> Jet2<S, N> {
    pub fn constant(value: S) -> Self {
        Self { value, grad: [S::zero(); N], hess: [[S::zero(); N]; N] }
    }

    /// The `i`-th coordinate function evaluated at `value`.
    pub fn variable(i: usize, value: S) -> Self {
        let mut j = Self::constant(value);
        j.grad[i] = S::one();
        j
    }

    fn build(value: S, grad: [S; N], mut upper: impl FnMut(usize, usize) -> S) -> Self {
        let mut hess = [[S::zero(); N]; N];
        for i in 0..N {
            for j in i..N {
                let h = upper(i, j);
                hess[i][j] = h;
                hess[j][i] = h;
            }
        }
        Self { value, grad, hess }
    }

    pub fn add(&self, o: &Self) -> Self {
        let grad = std::array::from_fn(|i| self.grad[i] + o.grad[i]);
        Self::build(self.value + o.value, grad, |i, j| self.hess[i][j] + o.hess[i][j])
    }

    pub fn sub(&self, o: &Self) -> Self {
        let grad = std::array::from_fn(|i| self.grad[i] - o.grad[i]);
        Self::build(self.value - o.value, grad, |i, j| self.hess[i][j] - o.hess[i][j])
    }

    pub fn neg(&self) -> Self {
        let grad = std::array::from_fn(|i| -self.grad[i]);
        Self::build(-self.value, grad, |i, j| -self.hess[i][j])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self.value, o.value);
        let grad = std::array::from_fn(|i| a * o.grad[i] + b * self.grad[i]);
        Self::build(a * b, grad, |i, j| {
            a * o.hess[i][j] + b * self.hess[i][j] + self.grad[i] * o.grad[j] + o.grad[i] * self.grad[j]
        })
    }

    /// Composition with a scalar function given its value and first two
    /// derivatives at `self.value`.
    pub fn chain(&self, f: S, df: S, d2f: S) -> Self {
        let grad = std::array::from_fn(|i| df * self.grad[i]);
        Self::build(f, grad, |i, j| df * self.hess[i][j] + d2f * self.grad[i] * self.grad[j])
    }

    /// `self^k` by binary exponentiation (repeated multiplication).
    pub fn powi_nonneg(&self, mut k: u32) -> Self {
        let mut result = Self::constant(S::one());
        let mut base = *self;
        let mut first = true;
        while k > 0 {
            if k & 1 == 1 {
                result = if first { base } else { result.mul(&base) };
                first = false;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().flatten().all(|h| h.is_finite())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..N).all(|i| (0..N).all(|j| self.hess[i][j] == self.hess[j][i]))
    }
}
