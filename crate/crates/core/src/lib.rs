//! Spectral data for the Schrodinger operator `-d^2/dx^2 + sum l_i(l_i+1) wp(x + omega_i)`
//! with integer couplings: the doubly periodic product solution, the spectral
//! curve, the commuting operator, monodromy multipliers, boundary value
//! eigenvalues and the Heun parameter map.

pub mod commuting_operator;
pub mod coupling;
pub mod elliptic;
pub mod error;
pub mod heun_map;
pub mod invariant_space;
pub mod laurent;
pub mod linalg;
pub mod monodromy;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod series;
pub mod spectral_curve;
pub mod spectral_problem;
pub mod xi_solver;

pub use coupling::CouplingVector;
pub use elliptic::{make_context, EllipticContext};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::Poly;
