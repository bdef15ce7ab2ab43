//! Supplier selection under mixed evidence.
//!
//! Daily series, expert range estimates and linguistic appraisals all become
//! triangular fuzzy numbers, suppliers are ranked by fuzzy closeness to an
//! ideal, and a goal program turns the ranking into order quantities.
//!
//! ```
//! let ds = supplier_dss::fixtures::paper_case();
//! let a = supplier_dss::pipeline::Artifacts::compute(&ds).unwrap();
//! assert_eq!(a.ranking.all.order()[0], "S3");
//! ```

pub mod cli;
pub mod dataset;
pub mod fixtures;
pub mod fuzzy;
pub mod goal;
pub mod granular;
pub mod lp;
pub mod pipeline;
pub mod qualitative;
pub mod service;
pub mod session;
pub mod synth;
pub mod temporal;
pub mod topsis;
