//! Chart-based multilinear algebra: metrics, connections, curvature and
//! exterior calculus at points of a coordinate patch.

pub mod chart;
pub mod connection;
pub mod forms;
pub mod lie;
pub mod linalg;
pub mod metric;
pub mod stencil;

pub use chart::Chart;
pub use connection::{christoffel_coordinate, curvature_coordinate, ConnectionCoeffs, TensorResult};
pub use forms::{exterior_derivative, hodge_star, ChartForm, Form, FormField};
pub use lie::{
    lie_bracket, lie_derivative_cartan, lie_derivative_form, lie_derivative_metric, lie_derivative_tensor,
    CoordinateField, VectorField,
};
pub use linalg::{invert_metric, spd_inverse_sqrt, spd_sqrt};
pub use metric::{ChartMetric, MetricField, Scheme};
