//! Index-theory toolkit for closed characteristics on compact convex
//! hypersurfaces: exact scalars, symplectic normal forms, splitting numbers,
//! index iteration, common index jump certificates and stability pipelines.

pub mod dynamics;
pub mod io;
pub mod iteration;
pub mod jump;
pub mod linalg;
pub mod normal_form;
pub mod scalar;
pub mod symplectic;
pub mod theorem;
