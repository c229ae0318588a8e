//! Extremal analytic self-maps of the unit disk built from slit-strip Koenigs
//! semigroups, with numerical angular derivatives, reduced moduli of digons,
//! the associated star quadratic differential, and checks of the weighted and
//! unweighted angular-derivative inequalities at boundary fixed points.

pub mod angular;
pub mod error;
pub mod geometry;
pub mod inequality;
pub mod moduli;
pub mod koenigs;
pub mod numerics;
pub mod quaddiff;

pub use error::{Error, Result};
pub use num_complex::Complex64;
