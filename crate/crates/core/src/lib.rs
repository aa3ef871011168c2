//! Decategorified calculus of categorified Legendrian points and knots.
//!
//! * [`exactla`]: exact linear algebra over the Gaussian rationals.
//! * [`puiseux`]: exponential factors (formal types) modulo `z^{-1}·C[[z^{1/∞}]]`.
//! * [`front`]: Legendrian fronts on the cylinder built from formal types.
//! * [`sheafline`]: pure sheaves on the line and the Beilinson disk model.
//! * [`sheafknot`]: pure sheaves on fronts, microstalk transport and monodromy.
//! * [`mutation`]: mutation braiding of exceptional sequences on `K_0`.
//! * [`schober`]: flags of sublattices along Stokes rays and irregular gluing data.
//! * [`cli`]: the `lkcat` command line.

pub mod cli;
pub mod exactla;
pub mod front;
pub mod mutation;
pub mod puiseux;
pub mod report;
pub mod scalar;
pub mod schober;
pub mod sheafknot;
pub mod sheafline;

pub use exactla::{ExactMatrix, QuotientSpace, Subspace};
pub use scalar::Scalar;
