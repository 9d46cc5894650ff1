//! Exact computation with George–Veeramani fuzzy metric spaces: t-norms,
//! balls and bounded sets, covers and their multiplicities, asymptotic
//! dimension witnesses at explicit scales, and coarse maps.
//!
//! Every value of `M(x, y, t)` is an exact rational, and every strict
//! inequality is checked as strict. Infinite spaces are examined on finite
//! windows; a witness is certified "on window W", never on the whole space.

pub mod asdim;
pub mod cli;
pub mod coarse;
pub mod config;
pub mod covers;
pub mod error;
pub mod point;
pub mod rational;
pub mod report;
pub mod space;
pub mod tnorm;

pub use error::{Error, Result};
pub use point::{Point, PointSet, Window};
pub use rational::{q, Rational};
pub use report::{CertReport, Record, Verdict};
pub use space::{FuzzyMetricSpace, ScaleParams};
pub use tnorm::TNorm;
