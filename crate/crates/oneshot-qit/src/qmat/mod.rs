//! Dense complex linear algebra over labeled tensor-product register spaces.
//!
//! Everything else in the crate computes on these types: labeled operators,
//! density matrices and pure states, the Jacobi eigensolver and spectral
//! functions, canonical purifications, Uhlmann isometries, and Kraus-form
//! channels. All values are immutable after construction and every operation
//! is a pure function.

pub mod channel;
pub mod eig;
pub mod json;
pub mod op;
pub mod purify;
pub mod space;
pub mod state;

pub use channel::KrausChannel;
pub use eig::{eig_hermitian, mat_func, support_projector, trace_norm, EigH, MatFunc, SUPPORT_CUTOFF};
pub use json::{ChannelJson, MatrixJson};
pub use op::{CMat, CVec, Operator, C64};
pub use purify::{purify, uhlmann_isometry, IsometryOp};
pub use space::RegisterSpace;
pub use state::{DensityMatrix, PureState};
