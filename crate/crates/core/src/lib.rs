//! q-dependent detrended cross-correlation matrices and what can be built
//! on top of them: random-matrix diagnostics, planar maximally filtered
//! graphs, and centrality-driven mean-variance portfolios.
//!
//! The modules follow the pipeline order:
//!
//! - [`seriesio`]: price/return panels, reference models;
//! - [`qdcca`]: profiles, box detrending, `ρ(q, s)` and its matrices;
//! - [`rmt`]: Marchenko-Pastur benchmark, eigen-analysis, IPR, sectors;
//! - [`planarity`] and [`pmfg`]: planar filtered networks and their topology;
//! - [`portfolio`]: composite centrality, selection, efficient frontiers;
//! - [`pipeline`]: the file-based grid runner behind the `qcorr` binary.
//!
//! The guide under `book/` walks through each stage; its code blocks are
//! compiled and run as doctests of this crate.

pub mod error;
pub mod graph;
pub mod pipeline;
pub mod planarity;
pub mod pmfg;
pub mod portfolio;
pub mod qdcca;
pub mod rmt;
pub mod seriesio;
pub mod stats;

pub use error::{Error, Result};
pub use qdcca::{DetrendConfig, QCorrMatrix};
pub use seriesio::{ReturnPanel, Seed};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/panels.md")]
    mod panels {}
    #[doc = include_str!("../../../book/src/qdcca.md")]
    mod qdcca {}
    #[doc = include_str!("../../../book/src/rmt.md")]
    mod rmt {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/portfolios.md")]
    mod portfolios {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
