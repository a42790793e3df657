//! Quantum Fisher information for unitary and thermal parametrizations whose
//! Hamiltonian admits a conserved operator `𝒱 = [(H^×)² − Ω²]∂_θH`.
//!
//! The characteristic operator `ℋ_θ = i(∂_θU†)U` is computed three ways (a
//! commutator series, a closed form built from `𝒱` and `Ω`, and a
//! finite-difference oracle), and the QFI follows from its variance. Thermal
//! states get a closed-form SLD, and the alternative QFI `4Tr(∂√ρ)²` is
//! covered for unitary and exponential families.

pub mod altqfi;
pub mod audit;
pub mod charop;
pub mod conserved;
mod ddmat;
pub mod error;
pub mod models;
pub mod operator;
pub mod qfi;
pub mod random;
pub mod state;
pub mod thermal;
pub mod window;

pub use conserved::{analyze, analyze_truncated, ConservedStructure, OmegaSq};
pub use error::{Error, Result};
pub use models::{ModelBundle, Params};
pub use operator::{CMatrix, CVector, HermitianOperator, Spectrum};
pub use qfi::{CrbBound, QfimMatrix};
pub use state::{PureState, QuantumState, SpectralState};
pub use window::{ExactWindow, Truncation};
