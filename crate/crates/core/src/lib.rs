//! Separability of multi-qubit X-shaped states.
//!
//! The crate evaluates the four functionals that govern block-positivity of
//! X-shaped witnesses and separability of X-states (the posynomial infimum
//! `δ_n`, the torus norm `‖·‖_X_n` and their duals `Δ_n`, `‖·‖′_X_n`) as
//! certified intervals, enumerates irreducible balanced multisets, analyses
//! phase identities, and turns all of it into verdicts that carry
//! independently re-checkable certificates.

pub mod cli;
pub mod error;
pub mod index;
mod lp;
pub mod multiset;
pub mod norms;
pub mod oracle;
pub mod phase;
pub mod separability;
pub mod xstate;

pub use error::{Result, XsepError};
pub use index::{monomial, Index, MAX_QUBITS};
pub use multiset::{BalancedMultiset, MultisetCatalog};
pub use norms::{delta, delta_cap, dual_norm, xnorm, BoundInterval, Method, OptimConfig};
pub use phase::{PhaseDifference, ThetaMap};
pub use separability::{Outcome, Verdict, WitnessCandidate, WitnessStatus};
pub use xstate::{xpart, DenseState, DiagVec, HermVec, PhaseVec, XState};
