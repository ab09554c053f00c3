//! Complex powers and logarithms on the arg ∈ [0, 2π) branch, the real gamma
//! function, and cylinder functions of real order.

mod branch;
mod cylinder;
mod gamma;

pub use branch::{arg_0_2pi, complex_log, complex_pow, SpectralPoint};
pub use cylinder::{
    bessel_j, bessel_j_derivative, bessel_y, hankel1, hankel1_derivative, CROSSOVER_RADIUS,
};
pub use gamma::{gamma_real, EULER_GAMMA};
