#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod constraints;
pub mod demos;
pub mod elements;
pub mod error;
pub mod gates;
pub mod interaction;
pub mod linalg;
pub mod mesh;
pub mod num;
pub mod op;
pub mod qcore;
pub mod quad;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use num::{DMat, C64};
pub use op::Operator;
pub use qcore::{BlockEncoding, PostselectResult, StatePrepPair};
pub use sparse::SparseMat;
