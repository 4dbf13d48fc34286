//! Coefficients of Catalan states of lattice crossings.
//!
//! States are crossingless connections on a rectangle ([`Connection`]); their
//! coefficients are Laurent polynomials in `A` ([`LaurentPoly`]). Three independent
//! routes compute them: the state sum in [`kauffman`], the plucking polynomial in
//! [`plucking`] for states without returns on one side, and Theta-state expansions
//! in [`theta`] for everything else.

pub mod exact_arith;
pub mod finsets;
pub mod kauffman;
pub mod planar;
pub mod plucking;
pub mod theta;

pub use exact_arith::{qint, rf_make, rf_to_laurent, unimodality, ArithError, LaurentPoly, RationalFn};
pub use finsets::{enumerate_ln, oplus, phi, phi_inv, psi_inv, FinSet, FinSetError};
pub use kauffman::{bracket_coeff, coeff_first_row, enumerate_catalan, FirstRowMemo, KauffmanError};
pub use planar::{enumerate_connections, vprod, Connection, Extended, PlanarError, Point};
pub use plucking::{coeff_no_bottom_returns, coeff_no_top_returns, plucking_poly, PlaneRootedTree, PluckingError};
pub use theta::{coeff_any, theta_expand, ThetaEngine, ThetaError, ThetaExpansion, Transform};
