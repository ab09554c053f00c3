//! Krein resolvent identities: defect solutions, the scalar and matrix
//! corrections for every family of self-adjoint extensions, Green's
//! functions, resolvent application and traces of resolvent differences.

mod correction;
mod defect;
mod integral;
mod resolvent;

pub use correction::{
    krein_correction, krein_coupled, krein_degenerate_separated, krein_matrix_two_lc, krein_scalar_one_lc,
    CorrectionForm, DegenerateSide, KreinCorrection, SINGULAR_THRESHOLD,
};
pub use defect::{defect_solutions, endpoint_bracket, DefectBrackets, DefectConfig, DefectSolutions, Setting};
pub use integral::bilinear_integral;
pub use resolvent::{
    common_part_membership, greens_kernel, resolvent_apply, trace_between_one_lc, trace_resolvent_diff,
    AppliedResolvent, ResolventOp, Supported,
};
