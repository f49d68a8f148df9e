//! Classification machinery for flocks of the quadratic cone in PG(3, q),
//! q even, through herds of ovals in PG(2, q).

pub mod error;
pub mod gf2e;

pub use error::{Error, Result};
pub use gf2e::{ExtElem, Fe, FieldCtx, QuadExt};
pub mod opoly;
pub mod plane;
pub mod magic;
pub mod qclan;
pub mod herd;
pub mod gq;
