pub mod affine;
pub mod construct;
pub mod error;
pub mod field;
pub mod groupfile;
pub mod linalg;
pub mod quadform;
pub mod search;
pub mod verify;

pub use affine::AffineElem;
pub use construct::{build_rw, RegularSubgroupDesc};
pub use error::{Error, Result};
pub use field::{ArithOp, Field, FieldValue};
pub use linalg::Mat;
pub use quadform::{AdditiveHom, HomKind, QuadraticForm, SubspaceBasis};
