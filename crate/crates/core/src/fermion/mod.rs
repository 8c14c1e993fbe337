//! Fermionic impurity models on fixed-particle-number determinant spaces.

mod model;
mod observables;
mod operator;
mod sector;

pub use model::{
    build_siam_position, momentum_mode, to_k_adjacent_natural_orbitals, to_momentum_basis,
    BasisRotation, FermionHamiltonian, SiamParams, TwoBody,
};
pub use observables::{
    correlation_functions, one_rdm, spin_resolved_rdm, staggered_density_correlation,
    staggered_spin_correlation, CorrelationPoint, OneRdm,
};
pub use operator::SectorHamiltonian;
pub use sector::{annihilate, binomial, create, hop, mode_bit, DeterminantSector, Spin, MAX_MODES};
