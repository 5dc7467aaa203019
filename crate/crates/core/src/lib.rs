//! Circle-tangency incidence combinatorics.
//!
//! Circles are lifted to points `(x, y, r)` of ℝ³. Near-tangencies between
//! the two sides of a bipartite family are counted through (δ,t)-rectangles,
//! either by brute force or by recursing over the cells of a polynomial
//! partition of the lifted points.

pub mod counting;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod lifting;
pub mod params;
pub mod partition;
pub mod tangency;

pub use error::{Result, TangenciaError};
pub use geometry::{d_metric, delta_metric, AngularWindow, Circle};
pub use params::ParamSet;
pub use tangency::{BipartitePair, DeltaRectangle, IncidenceReport};
