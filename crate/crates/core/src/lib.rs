//! Coupled linear systems whose state is a vector, matrix or higher-order
//! tensor.
//!
//! * [`tensor`]: dense tensors, outer products, contractions, unfolding.
//! * [`system`]: validated coupling tensors, time-invariant or scheduled.
//! * [`simulate`]: discrete iteration, closed form, RK4 and exact
//!   continuous integration.
//! * [`analysis`]: stability, controllability, observability via unfolding.
//! * [`multirate`]: coupled processes on different clocks.
//! * [`cli`]: JSON system files, CSV output and the `tssr` commands.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod expm;
pub mod multirate;
pub mod simulate;
pub mod system;
pub mod tensor;

pub use error::{Error, Result};
pub use expm::matrix_exponential;
pub use simulate::{InputSignal, Method, Sample, Trajectory};
pub use system::{lift_matrix_state, CoefficientSet, Segment, SystemShapes, TimeKind, TssrSystem};
pub use tensor::Tensor;
