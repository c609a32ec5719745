//! Stationary discs for decoupled submanifolds of codimension two in C^4.
//!
//! The pipeline: describe a pair of scalar model hypersurface equations (plus
//! optional higher-order perturbations), attach the conormal lift equations,
//! build the explicit initial disc and certify it is stationary, linearize the
//! boundary conditions into an 8x8 symbol matrix, compute its partial indices /
//! Maslov index / kernel dimension, and finally solve the nonlinear
//! Riemann-Hilbert problem numerically to continue the disc family under a
//! perturbation.
//!
//! Two coefficient backends run through the whole algebraic pipeline: exact
//! Gaussian rationals (certification) and complex doubles (numerics). See
//! [`scalar::Coeff`].

pub mod cli;
pub mod expr;
pub mod indices;
pub mod laurent;
pub mod lift;
pub mod model;
pub mod rh_solver;
pub mod samples;
pub mod scalar;
pub mod symbol;
pub mod winding;
