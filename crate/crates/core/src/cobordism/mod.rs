//! Point-scale cobordism of self-dual complexes: bounded complexes of
//! Q-vector spaces with a perfect ε-symmetric pairing into Q in degree 0.

mod complex;
mod construct;
mod witness;

pub use complex::{acyclic_block, ChainMap, Cohomology, Complex, Pairing, SelfDualComplex, ValidationReport, Violation};
pub use construct::{
    acyclic_extension, cobordism_class, core_reduction, null_witness, orthogonal_split, square_homotopy, transport,
    truncation_witness, CobordismClass, CoreReduction, OrthogonalSplit,
};
pub use witness::{solve_homotopy, verify_witness, CobordismWitness, WitnessCheck, WitnessKind, WitnessReport};
