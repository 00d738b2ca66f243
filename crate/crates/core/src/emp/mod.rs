//! Auxiliary (Ermakov-Milne-Pinney) functions of the normal modes.
//!
//! Each mode's Gaussian width is parameterized by `b_j(t) > 0` obeying
//!
//! ```text
//! b'' + lambda_j(t) b - lambda_j(0) / b^3 = 0,   b(0) = 1, b'(0) = 0.
//! ```
//!
//! With `lambda_j(t)` piecewise constant, `b^2` is a quadratic form in two
//! classical solutions on each segment. [`analytic`] builds those forms and
//! matches them across boundaries; [`oracle`] integrates the equation with a
//! fixed-step RK4 scheme as an independent check.

pub mod analytic;
pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};

pub use analytic::{
    build_mode_solution, evaluate_auxiliary, initial_segment_constants, propagate_constants,
    wronskian_invariant_residual, ModeSolution, SegmentSolution,
};
pub use oracle::{integrate_emp_oracle, integrate_emp_oracle_modes, rk4_step};

/// Constants of `b^2` on one segment, in local time `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SegmentConstants<T> {
    /// `b^2 = alpha cos(2y) + beta sin(2y) + gamma`, `y = sqrt(lambda) tau`,
    /// with `gamma^2 - beta^2 - alpha^2 = lambda_j(0) / lambda`.
    NonDegenerate { alpha: T, beta: T, gamma: T },
    /// `b^2 = a0 + 2 a1 tau + a2 tau^2` for a massless segment,
    /// with `a0 a2 - a1^2 = lambda_j(0)`.
    Degenerate { a0: T, a1: T, a2: T },
}

impl<T: Real> SegmentConstants<T> {
    /// The constants of `b == 1` in a segment whose eigenvalue equals `lambda_j(0)`.
    pub fn identity() -> Self {
        SegmentConstants::NonDegenerate {
            alpha: T::zero(),
            beta: T::zero(),
            gamma: T::one(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, SegmentConstants::Degenerate { .. })
    }

    /// `(b^2, b b')` at local time `tau`.
    #[inline]
    pub fn quadratic_form(&self, lambda: T, tau: T) -> (T, T) {
        match *self {
            SegmentConstants::NonDegenerate { alpha, beta, gamma } => {
                let w = lambda.sqrt();
                let y = w * tau;
                let (s, c) = (lit::<T>(2.0) * y).sin_cos();
                // cos(2y) - 1 = -2 sin^2(y) keeps b^2 - b^2(0) accurate at small tau
                let sy = y.sin();
                let b2 = (alpha + gamma) - lit::<T>(2.0) * alpha * sy * sy + beta * s;
                (b2, w * (beta * c - alpha * s))
            }
            SegmentConstants::Degenerate { a0, a1, a2 } => {
                (a0 + (a1 + a1 + a2 * tau) * tau, a1 + a2 * tau)
            }
        }
    }

    /// `d^2(b^2)/dtau^2`, used to form `b''` without going through the ODE.
    pub fn second_derivative(&self, lambda: T, tau: T) -> T {
        match *self {
            SegmentConstants::NonDegenerate { alpha, beta, .. } => {
                let w = lambda.sqrt();
                let (s, c) = (lit::<T>(2.0) * w * tau).sin_cos();
                -lit::<T>(4.0) * lambda * (alpha * c + beta * s)
            }
            SegmentConstants::Degenerate { a2, .. } => a2 + a2,
        }
    }
}

/// `(b, b')` of one mode at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryState<T> {
    pub b: T,
    pub b_dot: T,
}

impl<T: Real> AuxiliaryState<T> {
    /// The `t = 0` state `b = 1, b' = 0`.
    pub fn initial() -> Self {
        Self {
            b: T::one(),
            b_dot: T::zero(),
        }
    }

    pub fn b_squared(&self) -> T {
        self.b * self.b
    }

    /// `b b'`.
    pub fn b_bdot(&self) -> T {
        self.b * self.b_dot
    }
}
