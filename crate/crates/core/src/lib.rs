pub mod algebra;
pub mod error;
pub mod hamiltonian;
pub mod trotter;
pub mod fock;
pub mod lanczos;
pub mod ci;
pub mod oracle;
pub mod stateprep;
pub mod haar;
pub mod analysis;
pub mod cli;
