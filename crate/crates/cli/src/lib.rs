//! File formats, fixtures, sweeps and the command-line front end for
//! [`cagres_core`].

pub mod cli;
pub mod fixtures;
pub mod io;
pub mod sweep;

pub use cagres_core as core;
