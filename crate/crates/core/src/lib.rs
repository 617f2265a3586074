//! Radial nonlocal gauged Schrödinger energy on a ball: closed-form solitons,
//! the limit problem on the line, its linearization, the radial
//! discretization, and the boundary-layer construction of concentrated
//! solutions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod driver;
pub mod error;
pub mod io;
pub mod limit;
pub mod line;
pub mod linearized;
pub mod quadrature;
pub mod radial;
pub mod soliton;
pub mod tridiag;

pub use driver::{
    AnsatzSpec, ScanConfig, ScanResult, SolveOptions, SolveReport, SweepCell, SweepSpec,
};
pub use error::{Error, Result};
pub use limit::{LimitRoots, RootKind, ThresholdRow, Thresholds};
pub use line::{LineGrid, Profile1d};
pub use linearized::{LinearizedOperator, Spectrum};
pub use quadrature::Quadrature;
pub use radial::{EnergyReport, RadialField, RadialGrid};
pub use soliton::{Params, Soliton, SolitonConstants};
