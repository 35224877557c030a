//! Self-contained test problems: a small analytic box-constrained desk
//! suite and a generator for affine systems over the spectrahedron with a
//! planted low-rank solution.

mod desk;
mod io;
mod spectra;

pub use desk::{desk_by_name, desk_suite, DeskProblem};
pub use io::{read_instance, write_instance};
pub use spectra::{gen_spectra_instance, spectra_start, SpectraInstance};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("malformed instance file: {0}")]
    MalformedInstance(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
