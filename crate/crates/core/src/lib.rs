pub mod algebra;
pub mod catalog;
pub mod cpmap;
pub mod error;
pub mod mats;
pub mod perron;
pub mod spectra;

pub use error::{Error, Result};
pub use mats::{DenseMatrix, Tolerance, C64};
