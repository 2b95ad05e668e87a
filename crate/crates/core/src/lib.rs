//! Causal DAG summarization by node contraction.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the labeled DAG
//! model, d-separation and s-separation, summary DAGs with their canonical
//! grounding, the greedy summarizer, graphical do-calculus checks, and the
//! baselines and metrics used to evaluate summaries. File formats and the
//! command-line front end live in the companion `cagres` crate.
//!
//! ```
//! use cagres_core::{summarize, CagresConfig, Dag};
//!
//! let g = Dag::new(
//!     ["A", "B", "C", "D", "E"],
//!     [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D"), ("D", "E")],
//! )?;
//! let h = summarize(&g, &CagresConfig::new(4, 0))?;
//! assert_eq!(h.additional_edges(), 1);
//! assert_eq!(h.cluster_of("C")?.as_str(), "BC");
//! # Ok::<(), cagres_core::Error>(())
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bench;
pub mod docalc;
mod error;
pub mod graph;
pub mod greedy;
pub mod separation;
pub mod summary;

pub use error::{Error, Result};
pub use graph::{Dag, NodeId, VarSet};
pub use greedy::{summarize, CagresConfig, CostCaches, SimilarityMatrix};
pub use separation::{d_separated, d_separated_oracle, s_separated, SeparationQuery};
pub use summary::{CiStatement, RecursiveBasis, SummaryDag, Universe};
