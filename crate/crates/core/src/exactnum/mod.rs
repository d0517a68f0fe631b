//! Exact rationals, dense matrices, the certified LP kernel and the
//! floating-point spectral routines everything else is built on.

pub mod lp;
pub mod mat;
pub mod rational;
pub mod spectral;

pub use lp::{conic_combination, lp_solve, LpOutcome, LpProblem, LpStatus};
pub use mat::{FMat, Mat, QMat};
pub use rational::{format_rational, int, parse_rational, qvec, rat, QVec, Rational};
pub use spectral::{eig_sym, svd, SymEigen, DEFAULT_TOL};
