//! Numerical toolkit for input-to-state stability analysis of 1-D parabolic PDEs.
//!
//! The PDE is `x_t = a(z) x_zz + b(z) x_z + c(z) x + u(t,z)` on `z ∈ [0,1]` with
//! `a = p/r`, `b = p'/r`, `c = -q/r` and Robin/Dirichlet boundary inputs
//! `g0 x(t,0) + v0 x_z(t,0) = d0(t)`, `g1 x(t,1) + v1 x_z(t,1) = d1(t)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod discrete_lemmas;
pub mod expr;
pub mod fd_simulator;
pub mod gains;
pub mod norms;
pub mod spectral;
pub mod thermoelasticity;
mod tridiag;

pub use expr::{parse, Expr, ExprError, Var};
pub use norms::{Grid, Profile};
pub use spectral::Problem;
