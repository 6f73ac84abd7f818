//! Finite fields, dense matrices over them, and truncated power series.

mod gf;
mod matrix;
mod series;

pub use gf::{Elem, FieldDescriptor, Gf};
pub use matrix::{Echelon, Matrix};
pub use series::{generic_rank, special_rank, SeriesMatrix, TruncSeries, Valuation};
