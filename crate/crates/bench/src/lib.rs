//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use qtomo_core::grid::make_axis;
use qtomo_core::states::{coherent_state, fock_state, mix, pure_kernel};
use qtomo_core::{Axis, DensityKernel};

/// Grid sizes swept by the benchmarks.
pub const COUNTS: [usize; 3] = [64, 128, 256];

pub fn axis(count: usize) -> Axis {
    make_axis(8.0, count).expect("valid axis")
}

/// A mixed, non-Gaussian kernel so no route hits a special case.
pub fn kernel(count: usize) -> DensityKernel {
    let a = axis(count);
    let f = pure_kernel(&fock_state(2, a).expect("fock"));
    let c = pure_kernel(&coherent_state(Complex64::new(1.0, -0.5), a).expect("coherent"));
    mix(&[(0.4, &f), (0.6, &c)]).expect("mixture")
}
