//! Brute-force reference: the Hamiltonians as explicit sparse matrices on a
//! truncated zero-momentum excitation Fock space.

pub mod basis;
pub mod hamiltonians;
pub mod operator;
pub mod solve;

pub use basis::{FockBasis, ModeSet, DEFAULT_BASIS_LIMIT};
pub use hamiltonians::{build_g0, build_g1_tilde, build_g2, number_operator, ModeTables};
pub use operator::{Ladder, SparseSymmetricOperator};
pub use solve::{ground_state, rs_pt2, GroundState};
