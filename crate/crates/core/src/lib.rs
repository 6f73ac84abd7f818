pub mod campaign;
pub mod char2;
pub mod cmindex;
pub mod error;
pub mod field;
pub mod forms;
pub mod hasse;
pub mod deform;
pub mod localmodel;
pub mod pimodule;
pub mod weights;

pub use error::{Error, Result};
