use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{Dim, Point};
use crate::{Error, Result};

/// Unit space-time direction `ω(c) = (c·ω, −1) / √(c² + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeDirection {
    dim: Dim,
    omega: Point,
    c: f64,
    vec: [f64; 3],
    normalizer: f64,
}

/// Builds `ω(c)`. In 1D `omega` must be `±1` (only its sign matters) and any
/// nonzero `c` is allowed; in 2D `c > 0`.
pub fn omega_c(dim: Dim, omega: Point, c: f64) -> Result<SpaceTimeDirection> {
    let norm = match dim {
        Dim::One => omega[0].abs(),
        Dim::Two => omega[0].hypot(omega[1]),
    };
    if (norm - 1.0).abs() > 1e-12 || (dim == Dim::One && omega[1] != 0.0) {
        return Err(Error::NonUnitDirection { norm });
    }
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidSpeed(""));
    }
    if dim == Dim::Two && c < 0.0 {
        return Err(Error::InvalidSpeed(" and positive in two dimensions"));
    }
    let normalizer = (c * c + 1.0).sqrt();
    let vec = match dim {
        Dim::One => [c * omega[0] / normalizer, -1.0 / normalizer, 0.0],
        Dim::Two => [c * omega[0] / normalizer, c * omega[1] / normalizer, -1.0 / normalizer],
    };
    Ok(SpaceTimeDirection { dim, omega, c, vec, normalizer })
}

impl SpaceTimeDirection {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn omega(&self) -> Point {
        self.omega
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `√(c² + 1)`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Components of `ω(c)`, length `n + 1`, time last.
    pub fn vector(&self) -> &[f64] {
        &self.vec[..self.dim.n() + 1]
    }

    /// `c·ω` as a signed 1D speed: in 1D the sign of `omega` folds into `c`.
    pub fn signed_speed(&self) -> f64 {
        match self.dim {
            Dim::One => self.c * self.omega[0],
            Dim::Two => self.c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn displayed_examples() {
        let s = 0.5f64.sqrt();
        let d = omega_c(Dim::One, [1.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(d.vector()[0], s, epsilon = 1e-15);
        assert_relative_eq!(d.vector()[1], -s, epsilon = 1e-15);

        let d = omega_c(Dim::Two, [1.0, 0.0], 2.0).unwrap();
        let r5 = 5f64.sqrt();
        assert_eq!(d.vector().len(), 3);
        assert_relative_eq!(d.vector()[0], 2.0 / r5, epsilon = 1e-15);
        assert_relative_eq!(d.vector()[1], 0.0);
        assert_relative_eq!(d.vector()[2], -1.0 / r5, epsilon = 1e-15);

        let d = omega_c(Dim::One, [1.0, 0.0], -1.0).unwrap();
        assert_relative_eq!(d.vector()[0], -s, epsilon = 1e-15);
        assert_relative_eq!(d.vector()[1], -s, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(omega_c(Dim::One, [1.0, 0.0], 0.0), Err(Error::InvalidSpeed(_))));
        assert!(matches!(omega_c(Dim::Two, [0.6, 0.7], 1.0), Err(Error::NonUnitDirection { .. })));
        assert!(matches!(omega_c(Dim::Two, [1.0, 0.0], -1.0), Err(Error::InvalidSpeed(_))));
    }

    proptest! {
        #[test]
        fn unit_with_negative_time_and_level_identity(
            theta in 0.0..core::f64::consts::TAU,
            c in 0.01f64..20.0,
            x in -3.0f64..3.0, y in -3.0f64..3.0, t in -3.0f64..3.0,
        ) {
            let om = [theta.cos(), theta.sin()];
            let d = omega_c(Dim::Two, om, c).unwrap();
            let v = d.vector();
            let n: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() < 1e-12);
            prop_assert!(v[2] < 0.0);
            for k in 0..2 {
                prop_assert!((d.normalizer() * v[k] - c * om[k]).abs() < 1e-12);
            }
            prop_assert!((d.normalizer() * v[2] + 1.0).abs() < 1e-12);
            // t − c x·ω = −√(c²+1) (x,t)·ω(c)
            let lhs = t - c * (x * om[0] + y * om[1]);
            let rhs = -d.normalizer() * (x * v[0] + y * v[1] + t * v[2]);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
