//! Uniform grids, quadrature, continuous Fourier transforms and interpolation.

mod axis;
mod field;
mod fourier;
mod interp;

pub use axis::{make_axis, Axis};
pub use field::{integrate, relative_l2, SampledField, FLAG_TOL};
pub use fourier::{continuous_ft, ft_1d, partial_ft, Direction, LaneFt};
pub use interp::{interp_1d, interp_2d, resample, resample_with, Interpolation, Stencil, MAX_STENCIL};

pub(crate) use field::{hermitian_defect, max_abs};
pub(crate) use fourier::transpose;
