//! Finite topological spaces and sampled metric spaces.

pub mod finite;
mod index;
pub mod metric;

pub use finite::{FiniteSpace, Marker, Quotient, SeparationFlags, PRODUCT_BOUND};
pub use metric::{CoordMetric, Geometry, MetricSample, SampleSpec};
