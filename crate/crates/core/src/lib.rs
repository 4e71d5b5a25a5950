//! Cubic surfaces over GF(2) and the Jordan constant of the plane Cremona
//! group over F_2, F_4 and F_8.
//!
//! The pieces, bottom up: finite field and matrix arithmetic ([`gf2k`]),
//! projective points and lines ([`projspace`]), cubic forms and the
//! substitution action ([`forms`]), a Jacobian smoothness test backed by
//! Gröbner bases ([`idealtest`]), finite matrix and permutation groups
//! ([`grouptool`], [`recognize`]), the exhaustive orbit census ([`census`])
//! and the order arithmetic behind the constants ([`jordan`]).

pub mod arith;
pub mod census;
pub mod forms;
pub mod gf2k;
pub mod grouptool;
pub mod idealtest;
pub mod jordan;
pub mod projspace;
pub mod recognize;
pub mod suite;
pub mod unionfind;

pub use census::{Census, CensusReport, OrbitRecord};
pub use forms::CubicForm;
pub use gf2k::{gf, gf2, FieldSpec, Matrix};
pub use grouptool::{FiniteGroup, PglElement};
pub use idealtest::{is_smooth, SmoothnessVerdict};
pub use jordan::{jordan_constant, JordanReport};
pub use suite::{run_suite, Report, SuiteId};
