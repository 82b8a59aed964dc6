pub mod dynamics;
pub mod experiments;
pub mod graphs;
pub mod hamiltonian;
pub mod linalg;
pub mod ordering;
pub mod rng;
