//! Exact computations with graded modules over the Weyl algebra: presentations,
//! de Rham cohomology, Matlis duality, and checks of the duality statements.

pub mod constructors;
pub mod derham;
pub mod dual;
pub mod gmodule;
pub mod linalg;
pub mod maps;
pub mod verify;
pub mod weyl;
