//! Sturm–Liouville problems, quasi-derivative integration, Lagrange
//! brackets and their endpoint limits, Weyl classification, boundary
//! bases, and self-adjoint extension parameters.

mod basis;
mod classify;
mod extension;
mod limit;
mod problem;
mod state;
mod trajectory;

pub use basis::BoundaryBasis;
pub use classify::{classify_endpoint, classify_endpoint_with, ClassifyConfig, EndpointClass, WeylClass};
pub use extension::{BracketData, Extension};
pub use limit::{bracket_limit, bracket_limit_estimate, solve_with_bracket_ic, IcConfig, LimitConfig, LimitEstimate};
pub use problem::{Bound, CoefFn, Endpoint, Family, ProblemSpec, SLProblem, Tabulated};
pub use state::{bracket, plucker_residual, plucker_scale, QuasiState};
pub use trajectory::{
    closed_form, combination, integrate, integrate_span, ClosedForm, Combination, Conjugate, Solution,
    SolutionEval, Trajectory,
};
