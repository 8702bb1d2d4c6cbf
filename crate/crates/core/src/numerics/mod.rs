//! Numerical engines shared by the physics modules: adaptive quadrature,
//! polynomial roots, small dense linear algebra and a Lyapunov solver.

pub mod eigen;
pub mod linalg;
pub mod lyapunov;
pub mod poly;
pub mod quadrature;

pub use eigen::eigenvalues;
pub use linalg::{determinant, solve, Mat};
pub use lyapunov::{lyapunov_steady, LyapunovProblem};
pub use poly::{bisect, roots_polynomial, roots_quartic, solve_real_cubic};
pub use quadrature::{integrate, integrate_real_line, peak_breakpoints, Quadrature, QuadratureConfig, TailMap};
