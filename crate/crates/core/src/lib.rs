//! Quantum adjoint representation of a finite-type Cartan datum: canonical
//! basis, generator matrices over `Z[v, v^-1]`, an exact verification suite,
//! and Chevalley groups over prime fields obtained by specializing `v = 1`.

pub mod adjoint;
pub mod cartan;
pub mod chevalley;
pub mod cli;
pub mod qpoly;
pub mod ratfunc;
pub mod roots;
pub mod verify;
