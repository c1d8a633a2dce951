//! State families and channels used by the protocols: random ensembles,
//! IM-states, the rejection-sampling purification, and the channels that
//! reconstruct a tripartite state from purifications of its marginals.

pub mod channels;
pub mod im;
pub mod random;
pub mod rejection;

pub use channels::{dephasing_channel, general_channel, im_extended_channel};
pub use im::{classically_correlated_tripartite, make_im_state, ImState};
pub use random::{haar_isometry, random_channel, random_povm, random_pure, random_state};
pub use rejection::{rejection_purification, RejectionPurification};
