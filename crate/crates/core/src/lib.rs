//! Numerics for bosonic qubit codes: truncated Fock-space linear algebra,
//! codeword construction, noise channels, the Knill-Laflamme cost, and
//! Petz and optimal recovery fidelities.

pub mod channels;
pub mod error;
pub mod hilbert;
pub mod kl;
pub mod optimal;
pub mod petz;
pub mod sdp;
pub mod states;

pub use channels::{DensityMatrix, KrausSet, RateFamily};
pub use error::{Error, Result};
pub use hilbert::{CMatrix, CVector};
pub use states::{CodePair, CodeSpec, ReferenceCode, StateVector};
