//! Spectral analysis of a non-self-adjoint tridiagonal operator from thin-film
//! flow on a rotating cylinder.
//!
//! On the Fourier side the operator is the tridiagonal matrix `A₊` with
//! rows `(ε/2)n(n−1)·v_{n−1} + n·v_n − (ε/2)n(n+1)·v_{n+1}`. The crate computes
//! its eigenvalues by three independent routes and checks them against each
//! other:
//!
//! * [`eigen`]: truncated sections with an asymptotic boundary closure;
//! * [`recurrence`]: Miller shooting on the three-term recurrence;
//! * [`sturm_liouville`]: a Galerkin discretization of the self-adjoint form.
//!
//! [`heun`] tests the connection-coefficient characterization of eigenvalues
//! and [`analysis`] measures eigenvector decay.
//!
//! The crate is `no_std` (with `alloc`) when built without the `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod closure;
pub mod dd;
pub mod eigen;
pub mod error;
pub mod heun;
pub mod linalg;
pub mod operator;
pub mod quadrature;
pub mod real;
pub mod recurrence;
pub mod sturm_liouville;

pub use error::{Error, NumericalError, ParamError, Result};
pub use operator::{
    build_truncated, entry_sub, entry_sup, heun_parameters, reflect_minus, sl_coefficients,
    Epsilon, HeunParams, OperatorKind, SlCoefficients, TridiagonalOperator,
};
pub use real::{DoubleDouble, Precision, Real};
