//! Maps between density kernels, characteristic functions, Wigner functions,
//! and rotated kernels.

mod frft;
mod phase_space;

pub use frft::{frft, rotate_kernel, FrftPlan, SINGULAR_SNAP};
pub use phase_space::{
    char_from_kernel, char_from_wigner, kernel_from_char, phase_space_axes, wigner_from_char,
    wigner_from_kernel, CharFunction, WignerFunction, PAD,
};
