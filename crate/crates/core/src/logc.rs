//! Complex numbers in log-polar form and an overflow-safe summation.
//!
//! Probe fields reach magnitudes like `exp(±τ)` with `τ` in the thousands, so
//! values travel as `(ln|z|, arg z)` and only touch `f64` magnitudes inside
//! [`LogSum`], which keeps a running shift equal to the largest log-magnitude
//! seen so far.

use core::f64::consts::PI;
use core::ops::{Mul, MulAssign};

use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// `exp(log_abs + i·phase)`; zero is `log_abs = -∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_abs: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: Self = Self { log_abs: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: Self = Self { log_abs: 0.0, phase: 0.0 };

    pub fn new(log_abs: f64, phase: f64) -> Self {
        Self { log_abs, phase }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        Self { log_abs: z.norm().ln(), phase: z.arg() }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            Self { log_abs: x.ln(), phase: 0.0 }
        } else {
            Self { log_abs: (-x).ln(), phase: PI }
        }
    }

    /// `exp(w)` for complex `w`.
    pub fn exp(w: Complex64) -> Self {
        Self { log_abs: w.re, phase: w.im }
    }

    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    /// Multiplies by `exp(k)` for real `k`.
    pub fn scale_exp(self, k: f64) -> Self {
        Self { log_abs: self.log_abs + k, ..self }
    }

    /// Phase reduced to `(-π, π]`.
    pub fn arg(&self) -> f64 {
        wrap_phase(self.phase)
    }

    /// Converts back to a plain complex number (may overflow to ∞ or flush to 0).
    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_abs.exp(), self.phase)
    }

    /// `self / other`, with `x / 0 = ∞` in the log domain.
    pub fn div(self, other: Self) -> Self {
        Self { log_abs: self.log_abs - other.log_abs, phase: self.phase - other.phase }
    }
}

impl Mul for LogComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self { log_abs: self.log_abs + rhs.log_abs, phase: self.phase + rhs.phase }
    }
}

impl MulAssign for LogComplex {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Mul<Complex64> for LogComplex {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        self * LogComplex::from_complex(rhs)
    }
}

pub fn wrap_phase(phase: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut p = phase % two_pi;
    if p <= -PI {
        p += two_pi;
    } else if p > PI {
        p -= two_pi;
    }
    p
}

/// Max-shifted accumulator for sums of log-polar terms.
///
/// Tracks `Σ|term|` alongside the signed sum so callers can see how many
/// digits the sum lost to cancellation.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    shift: f64,
    sum: Complex64,
    abs_sum: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self { shift: f64::NEG_INFINITY, sum: Complex64::new(0.0, 0.0), abs_sum: 0.0 }
    }

    /// Adds `weight · term`.
    pub fn add(&mut self, term: LogComplex, weight: f64) {
        if term.is_zero() || weight == 0.0 {
            return;
        }
        if term.log_abs > self.shift {
            if self.shift > f64::NEG_INFINITY {
                let r = (self.shift - term.log_abs).exp();
                self.sum *= r;
                self.abs_sum *= r;
            }
            self.shift = term.log_abs;
        }
        let mag = (term.log_abs - self.shift).exp() * weight;
        self.sum += Complex64::from_polar(mag, term.phase);
        self.abs_sum += mag.abs();
    }

    pub fn add_sum(&mut self, other: &LogSum) {
        if other.shift == f64::NEG_INFINITY {
            return;
        }
        if other.shift > self.shift {
            if self.shift > f64::NEG_INFINITY {
                let r = (self.shift - other.shift).exp();
                self.sum *= r;
                self.abs_sum *= r;
            }
            self.shift = other.shift;
        }
        let r = (other.shift - self.shift).exp();
        self.sum += other.sum * r;
        self.abs_sum += other.abs_sum * r;
    }

    pub fn value(&self) -> LogComplex {
        if self.shift == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        LogComplex::from_complex(self.sum).scale_exp(self.shift)
    }

    /// Whether the shifted sum is exactly zero or smaller than `floor`
    /// relative to the largest term seen.
    pub fn underflows(&self, floor: f64) -> bool {
        self.shift == f64::NEG_INFINITY || self.sum.norm() < floor
    }

    /// `ln Σ|term|`.
    pub fn abs_sum_log(&self) -> f64 {
        if self.abs_sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.abs_sum.ln() + self.shift
        }
    }

    /// `ln(Σ|term| / |Σ term|)`; zero when nothing cancels, `+∞` for an exact zero sum.
    pub fn log_cancellation(&self) -> f64 {
        if self.abs_sum == 0.0 {
            return 0.0;
        }
        let n = self.sum.norm();
        if n == 0.0 {
            f64::INFINITY
        } else {
            (self.abs_sum / n).ln()
        }
    }
}
