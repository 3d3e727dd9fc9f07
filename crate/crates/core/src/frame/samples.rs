use super::FrameError;
use crate::scalar::Scalar;
use crate::vector::Vector3;

/// An ordered sampling of a curve by arc length.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSamples<S> {
    s: Vec<S>,
    points: Vec<Vector3<S>>,
    uv: Option<Vec<(S, S)>>,
}

impl<S: Scalar> CurveSamples<S> {
    /// Validates lengths, finiteness and strictly increasing `s`.
    pub fn new(s: Vec<S>, points: Vec<Vector3<S>>, uv: Option<Vec<(S, S)>>) -> Result<Self, FrameError> {
        if s.is_empty() {
            return Err(FrameError::TooFewSamples { needed: 1, got: 0 });
        }
        if points.len() != s.len() || uv.as_ref().is_some_and(|p| p.len() != s.len()) {
            return Err(FrameError::LengthMismatch);
        }
        if let Some(i) = s.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(FrameError::NonIncreasing { index: i + 1 });
        }
        let finite = s.iter().all(|x| x.is_finite())
            && points.iter().all(|p| p.is_finite())
            && uv.as_ref().is_none_or(|p| p.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
        if !finite {
            return Err(FrameError::NonFinite);
        }
        Ok(Self { s, points, uv })
    }

    /// Samples `f` at `n + 1` equally spaced arc-length values on `[s0, s0 + length]`.
    pub fn from_fn(s0: S, length: S, n: usize, f: impl Fn(S) -> Vector3<S>) -> Result<Self, FrameError> {
        let s: Vec<S> = (0..=n).map(|i| s0 + length * S::from_count(i) / S::from_count(n)).collect();
        let points = s.iter().map(|&t| f(t)).collect();
        Self::new(s, points, None)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s(&self) -> &[S] {
        &self.s
    }

    pub fn points(&self) -> &[Vector3<S>] {
        &self.points
    }

    pub fn uv(&self) -> Option<&[(S, S)]> {
        self.uv.as_deref()
    }

    pub fn with_uv(mut self, uv: Vec<(S, S)>) -> Result<Self, FrameError> {
        if uv.len() != self.s.len() {
            return Err(FrameError::LengthMismatch);
        }
        self.uv = Some(uv);
        Ok(self)
    }

    /// Largest `|chord / Δs − 1|` over consecutive samples.
    pub fn unit_speed_residual(&self) -> S {
        self.s
            .windows(2)
            .zip(self.points.windows(2))
            .map(|(ds, p)| ((p[1] - p[0]).norm() / (ds[1] - ds[0]) - S::one()).abs())
            .fold(S::zero(), S::max)
    }

    pub fn check_unit_speed(&self, tol: S) -> Result<(), FrameError> {
        let r = self.unit_speed_residual();
        if r > tol {
            return Err(FrameError::NotUnitSpeed { residual: r.to_f64_lossy(), tol: tol.to_f64_lossy() });
        }
        Ok(())
    }

    /// Largest relative deviation of a spacing from the mean spacing.
    pub fn spacing_nonuniformity(&self) -> S {
        let n = self.s.len();
        if n < 2 {
            return S::zero();
        }
        let mean = (self.s[n - 1] - self.s[0]) / S::from_count(n - 1);
        self.s
            .windows(2)
            .map(|w| ((w[1] - w[0]) - mean).abs() / mean)
            .fold(S::zero(), S::max)
    }
}
