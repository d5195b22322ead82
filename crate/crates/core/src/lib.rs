//! Phase-space representations of quantum states on uniform grids.
//!
//! Density kernels `ρ(q, q′)`, characteristic functions `f(x, y)`, Wigner
//! functions `W(q, p)` and optical tomograms `ω(x, α)`, with the maps between
//! them, transition probabilities by three routes and Sobolev-regularity
//! diagnostics. Units: `ħ = m = ω = 1`.
//!
//! Every operation is a deterministic function of its inputs. Parallel loops
//! only map independent lanes; reductions run in a fixed order, so results
//! do not depend on the thread count.

pub mod acceptance;
pub mod error;
pub mod fidelity;
pub mod format;
pub mod grid;
pub mod sobolev;
pub mod states;
pub mod tomography;
pub mod transforms;

pub use error::{Error, Result};
pub use fidelity::{Route, TransitionResult};
pub use grid::{Axis, Direction, SampledField};
pub use sobolev::{RegularityReport, Verdict};
pub use states::{DensityKernel, PureState};
pub use tomography::{RadialSlice, Tomogram};
pub use transforms::{CharFunction, WignerFunction};
