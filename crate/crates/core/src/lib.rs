//! Exact arithmetic in truncated de Rham-Witt complexes of `F_p[x_1, ..., x_n]`
//! and the matrix calculus of de Rham-Witt connections.

pub mod cli;
pub mod coeff;
pub mod connections;
pub mod context;
pub mod decomposition;
pub mod error;
pub mod form;
pub mod frobenius;
pub mod gen;
pub mod matrix;
pub mod poly;
pub mod rng;
pub mod weight;
pub mod witt;

pub use coeff::{Coeff, PadicRational};
pub use context::Context;
pub use decomposition::{d_inverse, decompose, find_delta, zeta, zeta_check, Decomposition, Epsilon, ZetaValue};
pub use error::{DrwError, Result};
pub use form::{Basis, DlogSet, Form, MonomialForm};
pub use poly::ZPoly;
pub use weight::{Weight, WeightCoord};
pub use witt::{from_witt_coordinates, ghost, teichmuller, to_witt_coordinates};
pub use connections::{
    base_change, curvature, evaluate, frobenius_pullback, horizontal_check, invert, lift_connection, normalize,
    normalize_step, BaseChange, ConnMatrix, CurvatureMatrix,
};
pub use frobenius::{tf_coordinates, tf_form, tf_scalar, FrobeniusLift};
pub use matrix::FormMatrix;
