use thiserror::Error;

/// Errors raised by the solver components.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: requested {requested} modes but the grid supports {available}")]
    Capacity { requested: usize, available: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("boundary tag mismatch: expected {expected}, found {found}")]
    BoundaryTag { expected: &'static str, found: &'static str },

    #[error("point ({x}, {y}) lies outside the domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("time step {dt} violates the advective CFL limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("mass operator is singular: inf rho = {inf_rho}")]
    SingularMass { inf_rho: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("trajectory left the domain: {0}")]
    Geometry(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("invalid sweep plan: {0}")]
    Plan(String),

    #[error("snapshot format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
